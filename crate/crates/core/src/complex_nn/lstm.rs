use super::WeightStore;
use crate::error::{Error, Result};

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// Single-layer real LSTM cell with the PyTorch parameter layout: gate rows
/// ordered input, forget, cell, output, and separate input/hidden biases.
#[derive(Clone, Debug)]
pub struct LstmCell {
    input: usize,
    hidden: usize,
    w_ih: Vec<f32>,
    w_hh: Vec<f32>,
    b_ih: Vec<f32>,
    b_hh: Vec<f32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellState {
    pub h: Vec<f32>,
    pub c: Vec<f32>,
}

impl CellState {
    pub fn zeros(hidden: usize) -> Self {
        CellState {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

impl LstmCell {
    pub fn new(
        input: usize,
        hidden: usize,
        w_ih: Vec<f32>,
        w_hh: Vec<f32>,
        b_ih: Vec<f32>,
        b_hh: Vec<f32>,
    ) -> Result<Self> {
        let g = 4 * hidden;
        for (v, n) in [
            (&w_ih, g * input),
            (&w_hh, g * hidden),
            (&b_ih, g),
            (&b_hh, g),
        ] {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    what: "lstm parameter",
                    expected: n,
                    got: v.len(),
                });
            }
        }
        Ok(LstmCell {
            input,
            hidden,
            w_ih,
            w_hh,
            b_ih,
            b_hh,
        })
    }

    pub fn load(store: &WeightStore, path: &str, input: usize, hidden: usize) -> Result<Self> {
        let g = 4 * hidden;
        Self::new(
            input,
            hidden,
            store.fetch(&format!("{path}.weight_ih"), &[g, input])?,
            store.fetch(&format!("{path}.weight_hh"), &[g, hidden])?,
            store.fetch(&format!("{path}.bias_ih"), &[g])?,
            store.fetch(&format!("{path}.bias_hh"), &[g])?,
        )
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn step(&self, x: &[f32], state: &mut CellState) {
        let (n_in, n_h) = (self.input, self.hidden);
        let mut gates = vec![0.0f32; 4 * n_h];
        for (r, g) in gates.iter_mut().enumerate() {
            let wi = &self.w_ih[r * n_in..(r + 1) * n_in];
            let wh = &self.w_hh[r * n_h..(r + 1) * n_h];
            let a: f32 = wi.iter().zip(x).map(|(w, v)| w * v).sum();
            let b: f32 = wh.iter().zip(&state.h).map(|(w, v)| w * v).sum();
            *g = a + b + self.b_ih[r] + self.b_hh[r];
        }
        for j in 0..n_h {
            let i = sigmoid(gates[j]);
            let f = sigmoid(gates[n_h + j]);
            let g = gates[2 * n_h + j].tanh();
            let o = sigmoid(gates[3 * n_h + j]);
            state.c[j] = f * state.c[j] + i * g;
            state.h[j] = o * state.c[j].tanh();
        }
    }
}

/// One complex LSTM layer built from two real LSTMs.
///
/// `out_re = LSTM_re(x_re) - LSTM_im(x_im)` and
/// `out_im = LSTM_re(x_im) + LSTM_im(x_re)`, where every application keeps its
/// own recurrent state.
#[derive(Clone, Debug)]
pub struct ComplexLstmLayer {
    pub real: LstmCell,
    pub imag: LstmCell,
}

/// Recurrent state of one complex layer, one cell state per real LSTM application.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLayerState {
    pub re_of_re: CellState,
    pub im_of_im: CellState,
    pub re_of_im: CellState,
    pub im_of_re: CellState,
}

/// Stacked complex LSTM.
#[derive(Clone, Debug)]
pub struct ComplexLstm {
    layers: Vec<ComplexLstmLayer>,
}

/// Caller-owned state of a [`ComplexLstm`]. Starts uninitialized; call
/// [`ComplexLstmState::reset`] before stepping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexLstmState {
    layers: Vec<ComplexLayerState>,
}

impl ComplexLstmState {
    pub fn uninit() -> Self {
        Self::default()
    }

    pub fn is_initialized(&self) -> bool {
        !self.layers.is_empty()
    }

    pub fn reset(&mut self, lstm: &ComplexLstm) {
        self.layers = lstm
            .layers
            .iter()
            .map(|l| {
                let z = CellState::zeros(l.real.hidden());
                ComplexLayerState {
                    re_of_re: z.clone(),
                    im_of_im: z.clone(),
                    re_of_im: z.clone(),
                    im_of_re: z,
                }
            })
            .collect();
    }
}

impl ComplexLstm {
    pub fn new(layers: Vec<ComplexLstmLayer>) -> Self {
        ComplexLstm { layers }
    }

    /// Loads `lstm.<l>.{real,imag}.*` for each layer.
    pub fn load(store: &WeightStore, path: &str, input: usize, hidden: usize, layers: usize) -> Result<Self> {
        let layers = (0..layers)
            .map(|l| {
                let n_in = if l == 0 { input } else { hidden };
                Ok(ComplexLstmLayer {
                    real: LstmCell::load(store, &format!("{path}.{l}.real"), n_in, hidden)?,
                    imag: LstmCell::load(store, &format!("{path}.{l}.imag"), n_in, hidden)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexLstm { layers })
    }

    pub fn layers(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden(&self) -> usize {
        self.layers.first().map_or(0, |l| l.real.hidden())
    }

    pub fn step(
        &self,
        x_re: &[f32],
        x_im: &[f32],
        state: &mut ComplexLstmState,
    ) -> Result<(Vec<f32>, Vec<f32>)> {
        if !state.is_initialized() || state.layers.len() != self.layers.len() {
            return Err(Error::UninitializedState);
        }
        let mut re = x_re.to_vec();
        let mut im = x_im.to_vec();
        for (layer, st) in self.layers.iter().zip(&mut state.layers) {
            if re.len() != layer.real.input {
                return Err(Error::LengthMismatch {
                    what: "lstm input",
                    expected: layer.real.input,
                    got: re.len(),
                });
            }
            layer.real.step(&re, &mut st.re_of_re);
            layer.imag.step(&im, &mut st.im_of_im);
            layer.real.step(&im, &mut st.re_of_im);
            layer.imag.step(&re, &mut st.im_of_re);
            re = st
                .re_of_re
                .h
                .iter()
                .zip(&st.im_of_im.h)
                .map(|(a, b)| a - b)
                .collect();
            im = st
                .re_of_im
                .h
                .iter()
                .zip(&st.im_of_re.h)
                .map(|(a, b)| a + b)
                .collect();
        }
        Ok((re, im))
    }
}
