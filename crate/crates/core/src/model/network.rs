use std::collections::VecDeque;

use num_complex::Complex32;

use super::config::{count_parameters, Head, ModelConfig};
use crate::complex_nn::{
    ComplexBatchNorm, ComplexConv2d, ComplexDeconv2d, ComplexLinear, ComplexLstm, ComplexLstmState,
    ComplexPrelu, ComplexTensor, TimeHistory, WeightStore,
};
use crate::error::{Error, Result};

/// Named intermediate activations, in the order they were produced.
pub type Trace = Vec<(String, ComplexTensor)>;

/// One step of predictions: entry `k` estimates the spectrum of frame
/// `frame - k`, each with `W / 2 + 1` bins.
pub type FrameStack = Vec<Vec<Complex32>>;

#[derive(Clone, Debug)]
struct EncoderBlock {
    conv: ComplexConv2d,
    bn: ComplexBatchNorm,
    prelu: ComplexPrelu,
}

#[derive(Clone, Debug)]
struct DecoderBlock {
    deconv: ComplexDeconv2d,
    act: Option<(ComplexBatchNorm, ComplexPrelu)>,
}

/// Inference network with fixed weights.
#[derive(Clone, Debug)]
pub struct Model {
    cfg: ModelConfig,
    encoder: Vec<EncoderBlock>,
    lstm: ComplexLstm,
    dense: ComplexLinear,
    pathways: Option<Vec<ComplexConv2d>>,
    decoder: Vec<DecoderBlock>,
    head: Option<ComplexLinear>,
    freqs: Vec<usize>,
    params: usize,
}

/// Caller-owned streaming state of a [`Model`].
#[derive(Clone, Debug, Default)]
pub struct ModelState {
    enc_hist: Vec<TimeHistory>,
    dec_hist: Vec<TimeHistory>,
    dec_main: Vec<VecDeque<ComplexTensor>>,
    dec_skip: Vec<VecDeque<ComplexTensor>>,
    lstm: ComplexLstmState,
    inputs: VecDeque<Vec<Complex32>>,
    steps: usize,
}

impl ModelState {
    /// A state that must be reset against a model before use.
    pub fn uninit() -> Self {
        Self::default()
    }

    pub fn is_initialized(&self) -> bool {
        self.lstm.is_initialized()
    }

    /// Frames consumed so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn reset(&mut self, model: &Model) {
        let n = model.encoder.len();
        self.enc_hist = model
            .encoder
            .iter()
            .map(|b| TimeHistory::new(b.conv.spec().kernel.1))
            .collect();
        self.dec_hist = model
            .decoder
            .iter()
            .map(|b| TimeHistory::new(b.deconv.spec().kernel.1))
            .collect();
        self.dec_main = vec![VecDeque::new(); n];
        self.dec_skip = vec![VecDeque::new(); n];
        self.lstm.reset(&model.lstm);
        self.inputs.clear();
        self.steps = 0;
    }
}

fn check_finite(x: &ComplexTensor, path: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericOverflow(path.to_string()))
    }
}

fn record(trace: &mut Option<&mut Trace>, name: impl Into<String>, x: &ComplexTensor) {
    if let Some(t) = trace {
        t.push((name.into(), x.clone()));
    }
}

impl Model {
    /// Builds the network; every tensor in `store` must be used.
    pub fn from_weights(cfg: &ModelConfig, store: &WeightStore) -> Result<Self> {
        Self::build(cfg, store, false)
    }

    /// Like [`Model::from_weights`] but ignores tensors the network does not use.
    pub fn from_weights_permissive(cfg: &ModelConfig, store: &WeightStore) -> Result<Self> {
        Self::build(cfg, store, true)
    }

    fn build(cfg: &ModelConfig, store: &WeightStore, permissive: bool) -> Result<Self> {
        cfg.validate()?;
        let store = store.clone();
        let encoder = cfg
            .encoder_blocks
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let c = spec.out_channels;
                Ok(EncoderBlock {
                    conv: ComplexConv2d::load(&store, &format!("encoder.{i}.conv"), spec.clone())?,
                    bn: ComplexBatchNorm::load(&store, &format!("encoder.{i}.bn"), c)?,
                    prelu: ComplexPrelu::load(&store, &format!("encoder.{i}.prelu"), c)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let lstm = ComplexLstm::load(&store, "lstm", cfg.dense_units, cfg.lstm_hidden, cfg.lstm_layers)?;
        let dense = ComplexLinear::load(&store, "dense", cfg.lstm_hidden, cfg.dense_units)?;
        let n = cfg.encoder_blocks.len();
        let pathways = if cfg.pathways {
            Some(
                (0..n)
                    .map(|j| {
                        let c = cfg.encoder_blocks[n - 1 - j].out_channels;
                        ComplexConv2d::load(
                            &store,
                            &format!("pathway.{j}.conv"),
                            crate::complex_nn::LayerSpec::pathway(c),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        let decoder = cfg
            .decoder_blocks
            .iter()
            .enumerate()
            .map(|(j, spec)| {
                let c = spec.out_channels;
                let act = if j + 1 < n {
                    Some((
                        ComplexBatchNorm::load(&store, &format!("decoder.{j}.bn"), c)?,
                        ComplexPrelu::load(&store, &format!("decoder.{j}.prelu"), c)?,
                    ))
                } else {
                    None
                };
                Ok(DecoderBlock {
                    deconv: ComplexDeconv2d::load(&store, &format!("decoder.{j}.deconv"), spec.clone())?,
                    act,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let head = match cfg.head {
            Head::Signal => {
                let f = cfg.net_bins();
                Some(ComplexLinear::load(&store, "head.linear", f, f)?)
            }
            Head::Mask => None,
        };
        let orphans = store.unreferenced();
        if !orphans.is_empty() && !permissive {
            return Err(Error::OrphanTensors(orphans));
        }
        Ok(Model {
            cfg: cfg.clone(),
            encoder,
            lstm,
            dense,
            pathways,
            decoder,
            head,
            freqs: cfg.encoder_freqs()?,
            params: count_parameters(cfg),
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn parameter_count(&self) -> usize {
        self.params
    }

    /// Frames between an input frame and the output step that predicts it.
    pub fn delay(&self) -> usize {
        self.cfg.lookahead_frames
    }

    pub fn init_state(&self) -> ModelState {
        let mut st = ModelState::uninit();
        st.reset(self);
        st
    }

    fn input_tensor(&self, frame: &[Complex32]) -> Result<ComplexTensor> {
        let bins = self.cfg.frame.bins();
        if frame.len() != bins {
            return Err(Error::LengthMismatch {
                what: "input spectrum frame",
                expected: bins,
                got: frame.len(),
            });
        }
        // The Nyquist bin is not seen by the network.
        let f = self.cfg.net_bins();
        let x = ComplexTensor::from_parts(
            1,
            f,
            1,
            frame[..f].iter().map(|c| c.re).collect(),
            frame[..f].iter().map(|c| c.im).collect(),
        )?;
        check_finite(&x, "input")?;
        Ok(x)
    }

    /// Consumes spectrum frame `t` and returns predictions for frame
    /// `t - delay()` and its predecessors, or `None` while the look-ahead
    /// pipeline fills.
    pub fn forward_step(&self, frame: &[Complex32], state: &mut ModelState) -> Result<Option<FrameStack>> {
        self.step_impl(frame, state, None)
    }

    /// [`Model::forward_step`] that also records every block output.
    pub fn forward_step_traced(
        &self,
        frame: &[Complex32],
        state: &mut ModelState,
        trace: &mut Trace,
    ) -> Result<Option<FrameStack>> {
        self.step_impl(frame, state, Some(trace))
    }

    fn step_impl(
        &self,
        frame: &[Complex32],
        st: &mut ModelState,
        mut trace: Option<&mut Trace>,
    ) -> Result<Option<FrameStack>> {
        if !st.is_initialized() || st.enc_hist.len() != self.encoder.len() {
            return Err(Error::UninitializedState);
        }
        let mut x = self.input_tensor(frame)?;
        record(&mut trace, "input", &x);
        st.inputs.push_back(frame.to_vec());
        let keep = self.cfg.frames_per_step() + self.delay();
        while st.inputs.len() > keep {
            st.inputs.pop_front();
        }
        st.steps += 1;

        let n = self.encoder.len();
        for (i, b) in self.encoder.iter().enumerate() {
            let hist = &mut st.enc_hist[i];
            hist.push(x);
            if hist.pushed() <= b.conv.spec().lookahead() {
                return Ok(None);
            }
            let mut y = b.conv.step(hist, self.freqs[i])?;
            let (re, im) = y.parts_mut();
            b.bn.apply_slice(re, im, self.freqs[i + 1]);
            b.prelu.apply_slice(re, im, self.freqs[i + 1]);
            let name = format!("encoder.{i}");
            check_finite(&y, &name)?;
            record(&mut trace, name, &y);
            st.dec_skip[n - 1 - i].push_back(y.clone());
            x = y;
        }

        let (h_re, h_im) = self.lstm.step(x.re(), x.im(), &mut st.lstm)?;
        let lstm_out = ComplexTensor::from_parts(1, h_re.len(), 1, h_re, h_im)?;
        check_finite(&lstm_out, "lstm")?;
        record(&mut trace, "lstm", &lstm_out);
        let (d_re, d_im) = self.dense.forward(lstm_out.re(), lstm_out.im())?;
        let mut x = ComplexTensor::from_parts(x.channels(), x.freq(), 1, d_re, d_im)?;
        check_finite(&x, "dense")?;
        record(&mut trace, "dense", &x);

        for (j, b) in self.decoder.iter().enumerate() {
            st.dec_main[j].push_back(x);
            if st.dec_main[j].is_empty() || st.dec_skip[j].is_empty() {
                return Ok(None);
            }
            let main = st.dec_main[j].pop_front().unwrap();
            let skip = st.dec_skip[j].pop_front().unwrap();
            let inp = self.merge_skip(j, &main, &skip, &mut trace)?;
            let fin = inp.freq();
            let hist = &mut st.dec_hist[j];
            hist.push(inp);
            if hist.pushed() <= b.deconv.spec().lookahead() {
                return Ok(None);
            }
            let mut y = b.deconv.step(hist, fin)?;
            if let Some((bn, prelu)) = &b.act {
                let f = y.freq();
                let (re, im) = y.parts_mut();
                bn.apply_slice(re, im, f);
                prelu.apply_slice(re, im, f);
            }
            let name = format!("decoder.{j}");
            check_finite(&y, &name)?;
            record(&mut trace, name, &y);
            x = y;
        }

        let t = st.steps - 1;
        let tau = t as isize - self.delay() as isize;
        let inputs = &st.inputs;
        let out = self.apply_head(&x, 0, |k| {
            let back = self.delay() + k;
            let idx = tau - k as isize;
            (idx >= 0 && back < inputs.len()).then(|| inputs[inputs.len() - 1 - back].as_slice())
        })?;
        Ok(Some(out))
    }

    fn merge_skip(
        &self,
        j: usize,
        main: &ComplexTensor,
        skip: &ComplexTensor,
        trace: &mut Option<&mut Trace>,
    ) -> Result<ComplexTensor> {
        match &self.pathways {
            Some(p) => {
                let path = p[j].forward(skip)?;
                let name = format!("pathway.{j}");
                check_finite(&path, &name)?;
                record(trace, name, &path);
                main.add(&path)
            }
            None => main.concat_channels(skip),
        }
    }

    /// Turns decoder output column `t` into spectrum frames; `input(k)`
    /// gives the noisy frame predicted by channel `k`, if it exists.
    fn apply_head<'a>(
        &self,
        dec: &ComplexTensor,
        t: usize,
        input: impl Fn(usize) -> Option<&'a [Complex32]>,
    ) -> Result<FrameStack> {
        let f = self.cfg.net_bins();
        let bins = self.cfg.frame.bins();
        let (re, im) = dec.time_slice(t);
        let mut out = Vec::with_capacity(dec.channels());
        for k in 0..dec.channels() {
            let (r, i) = (&re[k * f..(k + 1) * f], &im[k * f..(k + 1) * f]);
            let mut frame = vec![Complex32::new(0.0, 0.0); bins];
            match &self.head {
                Some(lin) => {
                    let (yr, yi) = lin.forward(r, i)?;
                    for b in 0..f {
                        frame[b] = Complex32::new(yr[b], yi[b]);
                    }
                }
                None => {
                    if let Some(x) = input(k) {
                        for b in 0..f {
                            frame[b] = bounded_mask(r[b], i[b]) * x[b];
                        }
                    }
                }
            }
            if frame.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NumericOverflow("head".into()));
            }
            out.push(frame);
        }
        Ok(out)
    }

    /// Whole-sequence forward pass. Entry `t` of the result holds the
    /// predictions made for frame `t`; frames beyond the end are zero.
    pub fn forward_sequence(&self, frames: &[Vec<Complex32>]) -> Result<Vec<FrameStack>> {
        let t_len = frames.len();
        let f = self.cfg.net_bins();
        let mut x = ComplexTensor::zeros(1, f, t_len);
        for (t, fr) in frames.iter().enumerate() {
            let col = self.input_tensor(fr)?;
            let (re, im) = x.time_slice_mut(t);
            re.copy_from_slice(col.re());
            im.copy_from_slice(col.im());
        }
        let mut skips = Vec::with_capacity(self.encoder.len());
        for (i, b) in self.encoder.iter().enumerate() {
            let y = b.prelu.forward(&b.bn.forward(&b.conv.forward(&x)?)?)?;
            check_finite(&y, &format!("encoder.{i}"))?;
            skips.push(y.clone());
            x = y;
        }
        let mut st = ComplexLstmState::uninit();
        st.reset(&self.lstm);
        let mut dense = ComplexTensor::zeros(x.channels(), x.freq(), t_len);
        for t in 0..t_len {
            let (xr, xi) = x.time_slice(t);
            let (h_re, h_im) = self.lstm.step(xr, xi, &mut st)?;
            let (d_re, d_im) = self.dense.forward(&h_re, &h_im)?;
            let (or, oi) = dense.time_slice_mut(t);
            or.copy_from_slice(&d_re);
            oi.copy_from_slice(&d_im);
        }
        check_finite(&dense, "dense")?;
        let mut x = dense;
        let n = self.decoder.len();
        for (j, b) in self.decoder.iter().enumerate() {
            let inp = self.merge_skip(j, &x, &skips[n - 1 - j], &mut None)?;
            let mut y = b.deconv.forward(&inp)?;
            if let Some((bn, prelu)) = &b.act {
                y = prelu.forward(&bn.forward(&y)?)?;
            }
            check_finite(&y, &format!("decoder.{j}"))?;
            x = y;
        }
        (0..t_len)
            .map(|t| {
                self.apply_head(&x, t, |k| t.checked_sub(k).map(|i| frames[i].as_slice()))
            })
            .collect()
    }
}

/// `tanh(|m|) * m / |m|`: keeps the phase, bounds the magnitude below 1.
pub fn bounded_mask(re: f32, im: f32) -> Complex32 {
    let mag = (re * re + im * im).sqrt();
    if mag == 0.0 {
        return Complex32::new(0.0, 0.0);
    }
    let g = mag.tanh() / mag;
    Complex32::new(re * g, im * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::config::Variant;
    use crate::model::init::{identity_mask_weights, random_weights, zero_weights, InitOptions};

    fn frames(n: usize, bins: usize, seed: u32) -> Vec<Vec<Complex32>> {
        (0..n)
            .map(|t| {
                (0..bins)
                    .map(|b| {
                        let v = ((t * 31 + b * 7 + seed as usize) % 17) as f32 / 8.0 - 1.0;
                        Complex32::new(v, 0.5 - v * 0.3)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn mask_of_twenty_is_exactly_one() {
        assert_eq!(bounded_mask(20.0, 0.0), Complex32::new(1.0, 0.0));
        assert_eq!(bounded_mask(0.0, 0.0), Complex32::new(0.0, 0.0));
        let m = bounded_mask(3.0, -4.0);
        assert!((m.norm() - 5.0f32.tanh()).abs() < 1e-6);
    }

    #[test]
    fn unused_tensors_are_rejected_unless_permissive() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let mut store = random_weights(&cfg, InitOptions::seeded(1));
        store.insert("extra.weight", crate::complex_nn::Tensor::new(vec![1], vec![0.0]).unwrap());
        assert!(matches!(Model::from_weights(&cfg, &store), Err(Error::OrphanTensors(_))));
        assert!(Model::from_weights_permissive(&cfg, &store).is_ok());
    }

    #[test]
    fn uninitialized_state_is_rejected() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let model = Model::from_weights(&cfg, &zero_weights(&cfg)).unwrap();
        let mut st = ModelState::uninit();
        let frame = vec![Complex32::new(0.0, 0.0); 257];
        assert!(matches!(model.forward_step(&frame, &mut st), Err(Error::UninitializedState)));
    }

    #[test]
    fn zero_model_gives_zero_output() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let model = Model::from_weights(&cfg, &zero_weights(&cfg)).unwrap();
        let mut st = model.init_state();
        let frame = vec![Complex32::new(0.0, 0.0); 257];
        let out = model.forward_step(&frame, &mut st).unwrap().unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().flatten().all(|c| *c == Complex32::new(0.0, 0.0)));
    }

    #[test]
    fn identity_mask_reproduces_input() {
        let cfg = ModelConfig::adopted(Variant::BASELINE);
        let model = Model::from_weights(&cfg, &identity_mask_weights(&cfg).unwrap()).unwrap();
        let xs = frames(6, 257, 3);
        let mut st = model.init_state();
        let mut got = Vec::new();
        for x in &xs {
            if let Some(stack) = model.forward_step(x, &mut st).unwrap() {
                got.push(stack[0].clone());
            }
        }
        assert_eq!(got.len(), 6 - model.delay());
        for (t, g) in got.iter().enumerate() {
            assert_eq!(&g[..256], &xs[t][..256]);
            assert_eq!(g[256], Complex32::new(0.0, 0.0));
        }
    }

    #[test]
    fn streaming_matches_batch_for_all_switches() {
        for v in [Variant::BASELINE, Variant::PROPOSED] {
            let cfg = ModelConfig::adopted(v);
            let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(5))).unwrap();
            let xs = frames(7, 257, 11);
            let batch = model.forward_sequence(&xs).unwrap();
            let mut st = model.init_state();
            let mut t_out = 0;
            for x in &xs {
                if let Some(stack) = model.forward_step(x, &mut st).unwrap() {
                    assert_eq!(stack, batch[t_out], "{} frame {t_out}", v.label());
                    t_out += 1;
                }
            }
            assert_eq!(t_out, xs.len() - model.delay());
        }
    }

    #[test]
    fn trace_names_every_block() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(2))).unwrap();
        let mut st = model.init_state();
        let mut trace = Trace::new();
        model
            .forward_step_traced(&frames(1, 257, 0)[0], &mut st, &mut trace)
            .unwrap();
        let names: Vec<_> = trace.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names[0], "input");
        assert!(names.contains(&"lstm") && names.contains(&"pathway.5") && names.contains(&"decoder.5"));
        assert_eq!(trace.last().unwrap().1.shape(), [4, 256, 1]);
    }

    #[test]
    fn overflow_is_reported() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let model = Model::from_weights(&cfg, &zero_weights(&cfg)).unwrap();
        let mut st = model.init_state();
        let mut frame = vec![Complex32::new(0.0, 0.0); 257];
        frame[3].re = f32::INFINITY;
        assert!(matches!(model.forward_step(&frame, &mut st), Err(Error::NumericOverflow(_))));
    }
}
