//! Fully-connected networks over flat parameter vectors.
//!
//! Keeping all parameters in one flat `Vec<f64>` makes the optimizer, polyak
//! averaging, checkpointing, and finite-difference checks uniform: they all
//! operate on slices.

use crate::error::NnError;
use crate::tape::{layer_norm_forward, GroupId, Tape, Var};
use ndarray::{Array2, ArrayView2};
use offdyn_core::StreamRng;
use rand::Rng;

/// Flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Params(pub Vec<f64>);

impl Params {
    pub fn zeros(n: usize) -> Self {
        Params(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// ReLU MLP layout: `sizes = [input, hidden.., output]`. When `layer_norm` is
/// set, each hidden layer is followed by layer normalization (learnable
/// gain/bias) before the ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpLayout {
    pub sizes: Vec<usize>,
    pub layer_norm: bool,
}

impl MlpLayout {
    pub fn new(input: usize, hidden: &[usize], output: usize) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(input);
        sizes.extend_from_slice(hidden);
        sizes.push(output);
        MlpLayout { sizes, layer_norm: false }
    }

    pub fn with_layer_norm(mut self) -> Self {
        self.layer_norm = true;
        self
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn param_count(&self) -> usize {
        let mut n = 0;
        for l in 0..self.n_layers() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            n += i * o + o;
            if self.layer_norm && l + 1 < self.n_layers() {
                n += 2 * o;
            }
        }
        n
    }

    /// Fan-in uniform initialization: `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`
    /// for weights and biases; layer-norm gain 1, bias 0.
    pub fn init(&self, rng: &mut StreamRng) -> Params {
        let mut p = Vec::with_capacity(self.param_count());
        for l in 0..self.n_layers() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            let bound = 1.0 / (i as f64).sqrt();
            for _ in 0..(i * o + o) {
                p.push(rng.random_range(-bound..bound));
            }
            if self.layer_norm && l + 1 < self.n_layers() {
                p.extend(std::iter::repeat(1.0).take(o));
                p.extend(std::iter::repeat(0.0).take(o));
            }
        }
        Params(p)
    }

    /// Builds the forward graph on `tape`. The final layer has no activation.
    pub fn forward_tape(&self, tape: &mut Tape, group: GroupId, mut x: Var) -> Var {
        let mut off = 0;
        for l in 0..self.n_layers() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            x = tape.linear(x, group, off, i, o);
            off += i * o + o;
            if l + 1 < self.n_layers() {
                if self.layer_norm {
                    x = tape.layer_norm(x, group, off);
                    off += 2 * o;
                }
                x = tape.relu(x);
            }
        }
        x
    }

    /// Tape-free forward pass. Produces bit-identical values to
    /// [`MlpLayout::forward_tape`] because both run the same kernels in the
    /// same order.
    pub fn forward_eval(&self, params: &[f64], x: &Array2<f64>) -> Array2<f64> {
        debug_assert_eq!(params.len(), self.param_count());
        let mut h = x.clone();
        let mut off = 0;
        for l in 0..self.n_layers() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            let w = ArrayView2::from_shape((i, o), &params[off..off + i * o]).expect("weights");
            let b = &params[off + i * o..off + i * o + o];
            let mut y = h.dot(&w);
            for mut row in y.outer_iter_mut() {
                for (v, bv) in row.iter_mut().zip(b) {
                    *v += bv;
                }
            }
            off += i * o + o;
            if l + 1 < self.n_layers() {
                if self.layer_norm {
                    let gain = &params[off..off + o];
                    let bias = &params[off + o..off + 2 * o];
                    let (normed, _, _) = layer_norm_forward(&y.view(), gain, bias);
                    y = normed;
                    off += 2 * o;
                }
                y.mapv_inplace(|v| v.max(0.0));
            }
            h = y;
        }
        h
    }
}

/// An MLP bundled with its parameters.
#[derive(Debug, Clone)]
pub struct Mlp {
    pub layout: MlpLayout,
    pub params: Params,
}

impl Mlp {
    pub fn new(layout: MlpLayout, rng: &mut StreamRng) -> Self {
        let params = layout.init(rng);
        Mlp { layout, params }
    }

    /// Registers this network's parameters on the tape and runs the forward
    /// graph. `track` controls gradient accumulation.
    pub fn forward_tape(&self, tape: &mut Tape, x: Var, track: bool) -> (Var, GroupId) {
        let g = tape.register(&self.params.0, track);
        (self.layout.forward_tape(tape, g, x), g)
    }

    pub fn forward_eval(&self, x: &Array2<f64>) -> Array2<f64> {
        self.layout.forward_eval(&self.params.0, x)
    }

    /// Applies a gradient: the caller combines this with an optimizer.
    pub fn check_grad_shape(&self, grads: &[f64]) -> Result<(), NnError> {
        if grads.len() != self.params.len() {
            return Err(NnError::ShapeMismatch {
                expected: self.params.len(),
                got: grads.len(),
            });
        }
        Ok(())
    }
}

/// Rows of per-sample vectors -> matrix.
pub fn rows_to_array(rows: &[Vec<f64>]) -> Array2<f64> {
    let b = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let mut a = Array2::zeros((b, d));
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            a[[r, c]] = *v;
        }
    }
    a
}

/// Column vector `[B,1]` from a slice.
pub fn col_vec(values: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((values.len(), 1), values.to_vec()).expect("column vector")
}
