use super::conv::ComplexParams;
use super::WeightStore;
use crate::error::{Error, Result};

/// Complex fully connected layer, weights `[out, in]` per part.
#[derive(Clone, Debug)]
pub struct ComplexLinear {
    path: String,
    input: usize,
    output: usize,
    params: ComplexParams,
}

impl ComplexLinear {
    pub fn new(path: impl Into<String>, input: usize, output: usize, params: ComplexParams) -> Result<Self> {
        let path = path.into();
        if params.w_re.len() != input * output || params.w_im.len() != input * output {
            return Err(Error::shape(
                format!("{path}.real.weight"),
                &[output, input],
                &[params.w_re.len()],
            ));
        }
        if params.b_re.len() != output || params.b_im.len() != output {
            return Err(Error::shape(format!("{path}.real.bias"), &[output], &[params.b_re.len()]));
        }
        Ok(ComplexLinear {
            path,
            input,
            output,
            params,
        })
    }

    pub fn load(store: &WeightStore, path: &str, input: usize, output: usize) -> Result<Self> {
        let params = ComplexParams::load(store, path, &[output, input], output)?;
        Self::new(path, input, output, params)
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn input(&self) -> usize {
        self.input
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// `y = W x + b` with complex `W`, `x` and `b`.
    pub fn forward(&self, x_re: &[f32], x_im: &[f32]) -> Result<(Vec<f32>, Vec<f32>)> {
        if x_re.len() != self.input || x_im.len() != self.input {
            return Err(Error::shape(&self.path, &[self.input], &[x_re.len()]));
        }
        let p = &self.params;
        let mut y_re = p.b_re.clone();
        let mut y_im = p.b_im.clone();
        for o in 0..self.output {
            let wr = &p.w_re[o * self.input..(o + 1) * self.input];
            let wi = &p.w_im[o * self.input..(o + 1) * self.input];
            let (mut ar, mut ai) = (0.0f32, 0.0f32);
            for j in 0..self.input {
                ar += wr[j] * x_re[j] - wi[j] * x_im[j];
                ai += wi[j] * x_re[j] + wr[j] * x_im[j];
            }
            y_re[o] += ar;
            y_im[o] += ai;
        }
        Ok((y_re, y_im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_product() {
        // (1 + 2i) * (3 - i) = 5 + 5i, plus bias (0.5 - 0.5i)
        let params = ComplexParams {
            w_re: vec![1.0],
            w_im: vec![2.0],
            b_re: vec![0.5],
            b_im: vec![-0.5],
        };
        let lin = ComplexLinear::new("l", 1, 1, params).unwrap();
        let (r, i) = lin.forward(&[3.0], &[-1.0]).unwrap();
        assert_eq!((r[0], i[0]), (5.5, 4.5));
    }

    #[test]
    fn rejects_wrong_width() {
        let params = ComplexParams {
            w_re: vec![0.0; 6],
            w_im: vec![0.0; 6],
            b_re: vec![0.0; 2],
            b_im: vec![0.0; 2],
        };
        let lin = ComplexLinear::new("dense", 3, 2, params).unwrap();
        assert!(lin.forward(&[0.0; 2], &[0.0; 2]).is_err());
    }
}
