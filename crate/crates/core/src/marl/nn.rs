//! Small fully connected nets over flat parameter vectors with exact
//! reverse-mode gradients.
//!
//! Layer l stores its weight matrix row-major (out × in) followed by its
//! bias. Hidden layers use tanh; the output layer is linear unless
//! `tanh_output` is set.

use rand::Rng;

use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub tanh_output: bool,
}

/// Layer activations from one forward pass; `acts[0]` is the input.
#[derive(Debug, Clone)]
pub struct Trace {
    pub acts: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("nonempty trace")
    }
}

impl Mlp {
    pub fn new(sizes: Vec<usize>, tanh_output: bool) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        Self { sizes, tanh_output }
    }

    pub fn input_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for w in self.sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            p.extend((0..fan_in * fan_out).map(|_| rng.random_range(-a..a)));
            p.extend(std::iter::repeat_n(0.0, fan_out));
        }
        p
    }

    fn is_tanh(&self, layer: usize) -> bool {
        layer + 2 < self.sizes.len() || self.tanh_output
    }

    pub fn forward(&self, params: &[f64], x: &[f64]) -> Result<Trace, ModelError> {
        if x.len() != self.input_size() || params.len() != self.num_params() {
            return Err(ModelError::ShapeMismatch {
                expected: self.input_size(),
                got: x.len(),
            });
        }
        let mut acts = Vec::with_capacity(self.sizes.len());
        acts.push(x.to_vec());
        let mut off = 0;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &params[off..off + n_in * n_out];
            let bias = &params[off + n_in * n_out..off + n_in * n_out + n_out];
            off += n_in * n_out + n_out;
            let input = acts.last().unwrap();
            let mut out: Vec<f64> = (0..n_out)
                .map(|o| {
                    let row = &weights[o * n_in..(o + 1) * n_in];
                    bias[o] + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect();
            if self.is_tanh(l) {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
            acts.push(out);
        }
        Ok(Trace { acts })
    }

    /// Accumulate dLoss/dparams into `grad` given dLoss/doutput, and
    /// return dLoss/dinput.
    pub fn backward(
        &self,
        params: &[f64],
        trace: &Trace,
        d_out: &[f64],
        grad: &mut [f64],
    ) -> Result<Vec<f64>, ModelError> {
        if d_out.len() != self.output_size() || grad.len() != self.num_params() {
            return Err(ModelError::ShapeMismatch {
                expected: self.output_size(),
                got: d_out.len(),
            });
        }
        let layers = self.sizes.len() - 1;
        let mut offsets = Vec::with_capacity(layers);
        let mut off = 0;
        for w in self.sizes.windows(2) {
            offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        let mut delta = d_out.to_vec();
        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            if self.is_tanh(l) {
                let y = &trace.acts[l + 1];
                delta.iter_mut().zip(y).for_each(|(d, y)| *d *= 1.0 - y * y);
            }
            let input = &trace.acts[l];
            let o = offsets[l];
            let weights = &params[o..o + n_in * n_out];
            {
                let (gw, gb) = grad[o..o + n_in * n_out + n_out].split_at_mut(n_in * n_out);
                for j in 0..n_out {
                    let d = delta[j];
                    if d == 0.0 {
                        continue;
                    }
                    gb[j] += d;
                    let row = &mut gw[j * n_in..(j + 1) * n_in];
                    row.iter_mut().zip(input).for_each(|(g, x)| *g += d * x);
                }
            }
            let mut prev = vec![0.0; n_in];
            for j in 0..n_out {
                let d = delta[j];
                if d == 0.0 {
                    continue;
                }
                let row = &weights[j * n_in..(j + 1) * n_in];
                prev.iter_mut().zip(row).for_each(|(p, w)| *p += d * w);
            }
            delta = prev;
        }
        Ok(delta)
    }
}
