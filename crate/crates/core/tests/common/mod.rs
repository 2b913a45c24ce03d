#![allow(dead_code)]
//! Independent reference computations shared by the integration tests.
//! Everything here runs in f64 with plain nested loops.

use dccrn::complex_nn::{ComplexParams, ComplexTensor, LayerSpec};
use num_complex::{Complex32, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn noise(len: usize, seed: u64) -> Vec<f32> {
    let mut r = rng(seed);
    (0..len).map(|_| r.gen_range(-0.5f32..0.5)).collect()
}

pub fn noise_f64(len: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn random_params(n: usize, bias: usize, seed: u64) -> ComplexParams {
    let mut r = rng(seed);
    let mut v = |k: usize| (0..k).map(|_| r.gen_range(-1.0f32..1.0)).collect::<Vec<_>>();
    ComplexParams {
        w_re: v(n),
        w_im: v(n),
        b_re: v(bias),
        b_im: v(bias),
    }
}

pub fn random_tensor(c: usize, f: usize, t: usize, seed: u64) -> ComplexTensor {
    let mut r = rng(seed);
    ComplexTensor::from_fn(c, f, t, |_, _, _| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

pub fn random_frames(n: usize, bins: usize, seed: u64) -> Vec<Vec<Complex32>> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            (0..bins)
                .map(|_| Complex32::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)))
                .collect()
        })
        .collect()
}

/// Dense `[c][f][t]` complex array.
pub type Grid = Vec<Vec<Vec<Complex64>>>;

pub fn grid(x: &ComplexTensor) -> Grid {
    let [c, f, t] = x.shape();
    (0..c)
        .map(|ci| {
            (0..f)
                .map(|fi| {
                    (0..t)
                        .map(|ti| {
                            let (re, im) = x.get(ci, fi, ti);
                            Complex64::new(re as f64, im as f64)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn weight(p: &ComplexParams, idx: usize) -> Complex64 {
    Complex64::new(p.w_re[idx] as f64, p.w_im[idx] as f64)
}

fn bias(p: &ComplexParams, o: usize) -> Complex64 {
    Complex64::new(p.b_re[o] as f64, p.b_im[o] as f64)
}

/// Gather form: `y[o][fo][t] = b + sum w[o][i][kf][k] x[i][fo*s + kf - p][t - pt + k]`.
pub fn conv_oracle(x: &ComplexTensor, p: &ComplexParams, spec: &LayerSpec) -> Grid {
    let xg = grid(x);
    let [ci, fin, t_len] = x.shape();
    let (kf_n, kt_n) = spec.kernel;
    let (sf, pf) = (spec.stride.0 as isize, spec.padding.0 as isize);
    let pt = spec.padding.1 as isize;
    let fout = ((fin as isize + 2 * pf - kf_n as isize) / sf + 1) as usize;
    let mut y = vec![vec![vec![Complex64::new(0.0, 0.0); t_len]; fout]; spec.out_channels];
    for o in 0..spec.out_channels {
        for fo in 0..fout {
            for t in 0..t_len {
                let mut acc = bias(p, o);
                for i in 0..ci {
                    for kf in 0..kf_n {
                        for k in 0..kt_n {
                            let fi = fo as isize * sf + kf as isize - pf;
                            let ti = t as isize - pt + k as isize;
                            if fi < 0 || fi >= fin as isize || ti < 0 || ti >= t_len as isize {
                                continue;
                            }
                            let w = weight(p, ((o * ci + i) * kf_n + kf) * kt_n + k);
                            acc += w * xg[i][fi as usize][ti as usize];
                        }
                    }
                }
                y[o][fo][t] = acc;
            }
        }
    }
    y
}

/// Scatter form of the transposed convolution: input `(fi, ti)` adds
/// `w * x` to output `(fi*s + kf - p, ti + k - lookahead)`.
pub fn deconv_oracle(x: &ComplexTensor, p: &ComplexParams, spec: &LayerSpec) -> Grid {
    let xg = grid(x);
    let [ci, fin, t_len] = x.shape();
    let (kf_n, kt_n) = spec.kernel;
    let (sf, pf) = (spec.stride.0, spec.padding.0 as isize);
    let ahead = (kt_n - 1 - spec.padding.1) as isize;
    let fout = (fin - 1) * sf + kf_n + spec.output_padding.0 - 2 * spec.padding.0;
    let co = spec.out_channels;
    let mut y = vec![vec![vec![Complex64::new(0.0, 0.0); t_len]; fout]; co];
    for o in 0..co {
        for row in y[o].iter_mut() {
            row.fill(bias(p, o));
        }
    }
    for i in 0..ci {
        for fi in 0..fin {
            for ti in 0..t_len {
                for o in 0..co {
                    for kf in 0..kf_n {
                        for k in 0..kt_n {
                            let fo = (fi * sf + kf) as isize - pf;
                            let to = ti as isize + k as isize - ahead;
                            if fo < 0 || fo >= fout as isize || to < 0 || to >= t_len as isize {
                                continue;
                            }
                            let w = weight(p, ((i * co + o) * kf_n + kf) * kt_n + k);
                            y[o][fo as usize][to as usize] += w * xg[i][fi][ti];
                        }
                    }
                }
            }
        }
    }
    y
}

/// Largest deviation relative to the oracle's peak magnitude.
pub fn rel_err(got: &ComplexTensor, want: &Grid) -> f64 {
    let g = grid(got);
    let mut peak = 0.0f64;
    let mut diff = 0.0f64;
    assert_eq!(g.len(), want.len(), "channel count");
    for (a, b) in g.iter().flatten().flatten().zip(want.iter().flatten().flatten()) {
        peak = peak.max(b.norm());
        diff = diff.max((a - b).norm());
    }
    assert_eq!(
        g.iter().flatten().flatten().count(),
        want.iter().flatten().flatten().count(),
        "element count"
    );
    diff / peak.max(1e-30)
}

/// Scalar LSTM cell, PyTorch gate order `i, f, g, o`.
pub struct LstmOracle {
    pub input: usize,
    pub hidden: usize,
    pub w_ih: Vec<f64>,
    pub w_hh: Vec<f64>,
    pub b: Vec<f64>,
}

impl LstmOracle {
    pub fn step(&self, x: &[f64], h: &mut [f64], c: &mut [f64]) {
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let n = self.hidden;
        let gate = |row: usize, h: &[f64]| {
            let mut a = self.b[row];
            for j in 0..self.input {
                a += self.w_ih[row * self.input + j] * x[j];
            }
            for j in 0..n {
                a += self.w_hh[row * n + j] * h[j];
            }
            a
        };
        let prev = h.to_vec();
        for j in 0..n {
            let i = sig(gate(j, &prev));
            let f = sig(gate(n + j, &prev));
            let g = gate(2 * n + j, &prev).tanh();
            let o = sig(gate(3 * n + j, &prev));
            c[j] = f * c[j] + i * g;
            h[j] = o * c[j].tanh();
        }
    }
}

/// Parameter count of the adopted architecture written out layer by layer.
pub fn architecture_param_oracle(signal_head: bool, causal: bool, frames_out: usize, pathways: bool) -> usize {
    let enc = [1usize, 16, 32, 64, 128, 128, 128];
    let conv = |i: usize, o: usize, kf: usize, kt: usize| 2 * i * o * kf * kt + 2 * o;
    let bn = |c: usize| 4 * c;
    let prelu = |c: usize| 2 * c;
    let mut n = 0;
    for w in enc.windows(2) {
        n += conv(w[0], w[1], 5, 2) + bn(w[1]) + prelu(w[1]);
    }
    let h = 128;
    let lstm = |input: usize| 2 * (4 * h * input + 4 * h * h + 8 * h);
    n += lstm(512) + lstm(h);
    n += 2 * h * 512 + 2 * 512;
    let kt = if causal { 1 } else { 2 };
    for j in 0..6 {
        let skip = enc[6 - j];
        let input = if pathways { skip } else { 2 * skip };
        let out = if j == 5 { frames_out } else { enc[5 - j] };
        n += conv(input, out, 5, kt);
        if j < 5 {
            n += bn(out) + prelu(out);
        }
        if pathways {
            n += conv(skip, skip, 1, 1);
        }
    }
    if signal_head {
        n += 2 * 256 * 256 + 2 * 256;
    }
    n
}

/// Interior relative RMS error of `y` against `x` over `range`.
pub fn rel_rms(x: &[f64], y: &[f64], range: std::ops::Range<usize>) -> f64 {
    let (mut e, mut s) = (0.0, 0.0);
    for i in range {
        e += (x[i] - y[i]).powi(2);
        s += x[i].powi(2);
    }
    (e / s).sqrt()
}
