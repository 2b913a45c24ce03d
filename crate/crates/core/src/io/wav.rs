//! Mono 16 kHz WAV in PCM16 or IEEE float32.
//!
//! PCM16 samples map to `[-1, 1)` by dividing by 32768; writing multiplies by
//! 32768, rounds and saturates. Float32 passes through bit-exactly.

use std::io::{Read, Seek, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const ENGINE_SAMPLE_RATE: u32 = 16_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFormat {
    Pcm16,
    Float32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    /// Encoding of the source file, reused when writing.
    pub format: SampleFormat,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32, format: SampleFormat) -> Self {
        AudioBuffer {
            samples,
            sample_rate,
            format,
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

fn map_hound(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::io(path, io),
        hound::Error::Unsupported => Error::UnsupportedWavFormat("unsupported encoding".into()),
        hound::Error::FormatError(m) => Error::MalformedWav(m.to_string()),
        other => Error::MalformedWav(other.to_string()),
    }
}

/// Reads from any seekable source; `path` is only used in error messages.
pub fn read_wav_from<R: Read>(reader: R, path: &Path) -> Result<AudioBuffer> {
    let mut wav = hound::WavReader::new(reader).map_err(|e| map_hound(path, e))?;
    let spec = wav.spec();
    if spec.channels != 1 {
        return Err(Error::NotMono(spec.channels));
    }
    if spec.sample_rate != ENGINE_SAMPLE_RATE {
        return Err(Error::UnsupportedSampleRate(spec.sample_rate));
    }
    let (format, samples) = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => (
            SampleFormat::Pcm16,
            wav.samples::<i16>()
                .map(|s| s.map(|v| v as f32 / 32768.0))
                .collect::<std::result::Result<Vec<_>, _>>(),
        ),
        (hound::SampleFormat::Float, 32) => (
            SampleFormat::Float32,
            wav.samples::<f32>().collect::<std::result::Result<Vec<_>, _>>(),
        ),
        (f, b) => {
            return Err(Error::UnsupportedWavFormat(format!("{b}-bit {f:?}")));
        }
    };
    Ok(AudioBuffer {
        samples: samples.map_err(|e| map_hound(path, e))?,
        sample_rate: spec.sample_rate,
        format,
    })
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_wav_from(std::io::BufReader::new(file), path)
}

pub fn write_wav_to<W: Write + Seek>(writer: W, audio: &AudioBuffer, path: &Path) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate,
        bits_per_sample: match audio.format {
            SampleFormat::Pcm16 => 16,
            SampleFormat::Float32 => 32,
        },
        sample_format: match audio.format {
            SampleFormat::Pcm16 => hound::SampleFormat::Int,
            SampleFormat::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut w = hound::WavWriter::new(writer, spec).map_err(|e| map_hound(path, e))?;
    for &s in &audio.samples {
        let r = match audio.format {
            SampleFormat::Pcm16 => w.write_sample((s * 32768.0).round().clamp(-32768.0, 32767.0) as i16),
            SampleFormat::Float32 => w.write_sample(s),
        };
        r.map_err(|e| map_hound(path, e))?;
    }
    w.finalize().map_err(|e| map_hound(path, e))
}

pub fn write_wav(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_wav_to(std::io::BufWriter::new(file), audio, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn encode(audio: &AudioBuffer) -> Vec<u8> {
        let mut c = Cursor::new(Vec::new());
        write_wav_to(&mut c, audio, Path::new("mem")).unwrap();
        c.into_inner()
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let samples = vec![0.0, -1.0, 0.123_456_79, f32::MIN_POSITIVE, 3.5];
        let a = AudioBuffer::new(samples, 16_000, SampleFormat::Float32);
        let b = read_wav_from(Cursor::new(encode(&a)), Path::new("mem")).unwrap();
        assert_eq!(
            a.samples.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.samples.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn pcm16_convention() {
        let a = AudioBuffer::new(vec![-1.0, 0.5, 1.0], 16_000, SampleFormat::Pcm16);
        let b = read_wav_from(Cursor::new(encode(&a)), Path::new("mem")).unwrap();
        assert_eq!(b.samples, vec![-1.0, 0.5, 32767.0 / 32768.0]);
        assert_eq!(b.format, SampleFormat::Pcm16);
    }

    #[test]
    fn rejects_rate_channels_and_garbage() {
        let a = AudioBuffer::new(vec![0.0; 4], 44_100, SampleFormat::Float32);
        assert!(matches!(
            read_wav_from(Cursor::new(encode(&a)), Path::new("mem")),
            Err(Error::UnsupportedSampleRate(44_100))
        ));
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 16_000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut c = Cursor::new(Vec::new());
        let mut w = hound::WavWriter::new(&mut c, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(
            read_wav_from(Cursor::new(c.into_inner()), Path::new("mem")),
            Err(Error::NotMono(2))
        ));
        assert!(matches!(
            read_wav_from(Cursor::new(b"RIFFnope".to_vec()), Path::new("mem")),
            Err(Error::MalformedWav(_)) | Err(Error::Io { .. })
        ));
    }
}
