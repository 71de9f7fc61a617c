//! Minimal reverse-mode autodiff over batched 2-D arrays.
//!
//! A [`Tape`] records a graph of `[batch, dim]`-shaped values. Parameters are
//! flat `f64` vectors registered as groups; after [`Tape::backward`] the
//! accumulated gradient of each group can be read back in the same flat
//! layout. The op set is exactly what the agents in this workspace need —
//! linear layers, pointwise nonlinearities, broadcasts, and reductions.
//!
//! Every op computes its value in a fixed sequential order, so losses and
//! gradients are bit-reproducible.

use ndarray::{Array1, Array2, ArrayView2, Axis};

pub const LN_EPS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupId(usize);

#[derive(Debug, Clone)]
enum Op {
    Input,
    Detach,
    Linear { g: usize, w_off: usize, in_dim: usize, out_dim: usize, x: usize },
    LayerNorm { g: usize, off: usize, x: usize },
    Relu { x: usize },
    Tanh { x: usize },
    Sigmoid { x: usize },
    Exp { x: usize },
    Ln { x: usize },
    Softplus { x: usize },
    Neg { x: usize },
    Add { a: usize, b: usize },
    Sub { a: usize, b: usize },
    Mul { a: usize, b: usize },
    Div { a: usize, b: usize },
    AddScalar { x: usize },
    MulScalar { x: usize, c: f64 },
    Clamp { x: usize, lo: f64, hi: f64 },
    Square { x: usize },
    Abs { x: usize },
    Min2 { a: usize, b: usize },
    Max2 { a: usize, b: usize },
    Concat { a: usize, b: usize },
    SliceCols { x: usize, from: usize, to: usize },
    SumCols { x: usize },
    SumAll { x: usize },
    MeanAll { x: usize },
    MulBcastCol { x: usize, w: usize },
}

struct Node {
    op: Op,
    value: Array2<f64>,
}

struct Group {
    params: Vec<f64>,
    grads: Vec<f64>,
    track: bool,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
    groups: Vec<Group>,
}

/// Shared forward kernel for layer normalization (per-row, with affine).
/// Returns `(y, xhat, inv_std)` so the backward pass can reuse them.
pub fn layer_norm_forward(
    x: &ArrayView2<f64>,
    gain: &[f64],
    bias: &[f64],
) -> (Array2<f64>, Array2<f64>, Array1<f64>) {
    let d = x.ncols();
    let mut y = Array2::zeros(x.raw_dim());
    let mut xhat = Array2::zeros(x.raw_dim());
    let mut inv_std = Array1::zeros(x.nrows());
    for (r, row) in x.outer_iter().enumerate() {
        let mean = row.sum() / d as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
        let is = 1.0 / (var + LN_EPS).sqrt();
        inv_std[r] = is;
        for c in 0..d {
            let xh = (row[c] - mean) * is;
            xhat[[r, c]] = xh;
            y[[r, c]] = xh * gain[c] + bias[c];
        }
    }
    (y, xhat, inv_std)
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    /// Registers a flat parameter vector. `track = false` skips gradient
    /// accumulation (target networks, frozen models).
    pub fn register(&mut self, params: &[f64], track: bool) -> GroupId {
        self.groups.push(Group {
            params: params.to_vec(),
            grads: vec![0.0; if track { params.len() } else { 0 }],
            track,
        });
        GroupId(self.groups.len() - 1)
    }

    /// Gradient of the most recent backward pass for a tracked group.
    pub fn group_grad(&self, g: GroupId) -> &[f64] {
        &self.groups[g.0].grads
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    /// Value of a `[1,1]` node.
    pub fn scalar(&self, v: Var) -> f64 {
        let val = &self.nodes[v.0].value;
        debug_assert_eq!(val.dim(), (1, 1));
        val[[0, 0]]
    }

    fn push(&mut self, op: Op, value: Array2<f64>) -> Var {
        self.nodes.push(Node { op, value });
        Var(self.nodes.len() - 1)
    }

    pub fn input(&mut self, value: Array2<f64>) -> Var {
        self.push(Op::Input, value)
    }

    pub fn scalar_input(&mut self, value: f64) -> Var {
        self.input(Array2::from_elem((1, 1), value))
    }

    pub fn detach(&mut self, x: Var) -> Var {
        let value = self.nodes[x.0].value.clone();
        self.push(Op::Detach, value)
    }

    /// `y = x W + b`, with `W` at `w_off` (row-major `[in, out]`) and `b`
    /// directly after it inside the group's flat parameter vector.
    pub fn linear(&mut self, x: Var, g: GroupId, w_off: usize, in_dim: usize, out_dim: usize) -> Var {
        let xv = &self.nodes[x.0].value;
        debug_assert_eq!(xv.ncols(), in_dim);
        let group = &self.groups[g.0];
        let w = ArrayView2::from_shape((in_dim, out_dim), &group.params[w_off..w_off + in_dim * out_dim])
            .expect("weight shape");
        let b = &group.params[w_off + in_dim * out_dim..w_off + in_dim * out_dim + out_dim];
        let mut y = xv.dot(&w);
        for mut row in y.outer_iter_mut() {
            for (v, bv) in row.iter_mut().zip(b) {
                *v += bv;
            }
        }
        self.push(Op::Linear { g: g.0, w_off, in_dim, out_dim, x: x.0 }, y)
    }

    /// Per-row layer normalization with learnable gain/bias stored at `off`
    /// (gain `[d]` then bias `[d]`).
    pub fn layer_norm(&mut self, x: Var, g: GroupId, off: usize) -> Var {
        let xv = self.nodes[x.0].value.view();
        let d = xv.ncols();
        let group = &self.groups[g.0];
        let gain = &group.params[off..off + d];
        let bias = &group.params[off + d..off + 2 * d];
        let (y, _, _) = layer_norm_forward(&xv, gain, bias);
        self.push(Op::LayerNorm { g: g.0, off, x: x.0 }, y)
    }

    fn unary(&mut self, x: Var, op: impl Fn(usize) -> Op, f: impl Fn(f64) -> f64) -> Var {
        let y = self.nodes[x.0].value.mapv(f);
        self.push(op(x.0), y)
    }

    pub fn relu(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Relu { x }, |v| v.max(0.0))
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Tanh { x }, f64::tanh)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Sigmoid { x }, sigmoid)
    }

    pub fn exp(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Exp { x }, f64::exp)
    }

    pub fn ln(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Ln { x }, f64::ln)
    }

    pub fn softplus(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Softplus { x }, softplus)
    }

    pub fn neg(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Neg { x }, |v| -v)
    }

    pub fn square(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Square { x }, |v| v * v)
    }

    pub fn abs(&mut self, x: Var) -> Var {
        self.unary(x, |x| Op::Abs { x }, f64::abs)
    }

    pub fn clamp(&mut self, x: Var, lo: f64, hi: f64) -> Var {
        let y = self.nodes[x.0].value.mapv(|v| v.clamp(lo, hi));
        self.push(Op::Clamp { x: x.0, lo, hi }, y)
    }

    pub fn add_scalar(&mut self, x: Var, c: f64) -> Var {
        let y = self.nodes[x.0].value.mapv(|v| v + c);
        let _ = c;
        self.push(Op::AddScalar { x: x.0 }, y)
    }

    pub fn mul_scalar(&mut self, x: Var, c: f64) -> Var {
        let y = self.nodes[x.0].value.mapv(|v| v * c);
        self.push(Op::MulScalar { x: x.0, c }, y)
    }

    fn binary(&mut self, a: Var, b: Var, op: Op, f: impl Fn(f64, f64) -> f64) -> Var {
        let av = &self.nodes[a.0].value;
        let bv = &self.nodes[b.0].value;
        debug_assert_eq!(av.dim(), bv.dim(), "elementwise op shape mismatch");
        let mut y = av.clone();
        y.zip_mut_with(bv, |x, &w| *x = f(*x, w));
        self.push(op, y)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Add { a: a.0, b: b.0 }, |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Sub { a: a.0, b: b.0 }, |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Mul { a: a.0, b: b.0 }, |x, y| x * y)
    }

    pub fn div(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Div { a: a.0, b: b.0 }, |x, y| x / y)
    }

    /// Elementwise minimum; ties route the gradient to `a`.
    pub fn min2(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Min2 { a: a.0, b: b.0 }, |x, y| if x <= y { x } else { y })
    }

    /// Elementwise maximum; ties route the gradient to `a`.
    pub fn max2(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, Op::Max2 { a: a.0, b: b.0 }, |x, y| if x >= y { x } else { y })
    }

    /// Concatenation along the feature axis.
    pub fn concat(&mut self, a: Var, b: Var) -> Var {
        let av = &self.nodes[a.0].value;
        let bv = &self.nodes[b.0].value;
        debug_assert_eq!(av.nrows(), bv.nrows());
        let mut y = Array2::zeros((av.nrows(), av.ncols() + bv.ncols()));
        y.slice_mut(ndarray::s![.., ..av.ncols()]).assign(av);
        y.slice_mut(ndarray::s![.., av.ncols()..]).assign(bv);
        self.push(Op::Concat { a: a.0, b: b.0 }, y)
    }

    pub fn slice_cols(&mut self, x: Var, from: usize, to: usize) -> Var {
        let y = self.nodes[x.0].value.slice(ndarray::s![.., from..to]).to_owned();
        self.push(Op::SliceCols { x: x.0, from, to }, y)
    }

    /// `[B, D] -> [B, 1]` row sums.
    pub fn sum_cols(&mut self, x: Var) -> Var {
        let xv = &self.nodes[x.0].value;
        let mut y = Array2::zeros((xv.nrows(), 1));
        for (r, row) in xv.outer_iter().enumerate() {
            y[[r, 0]] = row.sum();
        }
        self.push(Op::SumCols { x: x.0 }, y)
    }

    pub fn sum_all(&mut self, x: Var) -> Var {
        let s = self.nodes[x.0].value.sum();
        self.push(Op::SumAll { x: x.0 }, Array2::from_elem((1, 1), s))
    }

    pub fn mean_all(&mut self, x: Var) -> Var {
        let xv = &self.nodes[x.0].value;
        let s = xv.sum() / xv.len() as f64;
        self.push(Op::MeanAll { x: x.0 }, Array2::from_elem((1, 1), s))
    }

    /// `x[B, D] * w[B, 1]` with `w` broadcast across columns.
    pub fn mul_bcast_col(&mut self, x: Var, w: Var) -> Var {
        let xv = &self.nodes[x.0].value;
        let wv = &self.nodes[w.0].value;
        debug_assert_eq!(wv.ncols(), 1);
        debug_assert_eq!(wv.nrows(), xv.nrows());
        let mut y = xv.clone();
        for (r, mut row) in y.outer_iter_mut().enumerate() {
            let c = wv[[r, 0]];
            row.mapv_inplace(|v| v * c);
        }
        self.push(Op::MulBcastCol { x: x.0, w: w.0 }, y)
    }

    /// Runs reverse-mode accumulation from a `[1,1]` loss node. Gradients of
    /// all tracked groups are accumulated into their flat grad buffers.
    pub fn backward(&mut self, loss: Var) {
        assert_eq!(self.nodes[loss.0].value.dim(), (1, 1), "loss must be scalar");
        let n = self.nodes.len();
        let mut grads: Vec<Option<Array2<f64>>> = (0..n).map(|_| None).collect();
        grads[loss.0] = Some(Array2::from_elem((1, 1), 1.0));

        for i in (0..n).rev() {
            let Some(dy) = grads[i].take() else { continue };
            // Re-borrow per op; values are read-only during backward.
            match self.nodes[i].op.clone() {
                Op::Input | Op::Detach => {}
                Op::Linear { g, w_off, in_dim, out_dim, x } => {
                    let xv = self.nodes[x].value.clone();
                    let group = &self.groups[g];
                    if group.track {
                        let dw = xv.t().dot(&dy);
                        let db = dy.sum_axis(Axis(0));
                        let gm = &mut self.groups[g];
                        for (k, v) in dw.iter().enumerate() {
                            gm.grads[w_off + k] += v;
                        }
                        for (k, v) in db.iter().enumerate() {
                            gm.grads[w_off + in_dim * out_dim + k] += v;
                        }
                    }
                    let group = &self.groups[g];
                    let w = ArrayView2::from_shape(
                        (in_dim, out_dim),
                        &group.params[w_off..w_off + in_dim * out_dim],
                    )
                    .expect("weight shape");
                    accumulate(&mut grads[x], dy.dot(&w.t()));
                }
                Op::LayerNorm { g, off, x } => {
                    let xv = self.nodes[x].value.view();
                    let d = xv.ncols();
                    let (gain, _bias) = {
                        let group = &self.groups[g];
                        (
                            group.params[off..off + d].to_vec(),
                            group.params[off + d..off + 2 * d].to_vec(),
                        )
                    };
                    let (_, xhat, inv_std) = layer_norm_forward(&xv, &gain, &vec![0.0; d]);
                    let mut dx = Array2::zeros(xv.raw_dim());
                    let mut dgain = vec![0.0; d];
                    let mut dbias = vec![0.0; d];
                    for r in 0..xv.nrows() {
                        let mut mean_dxhat = 0.0;
                        let mut mean_dxhat_xhat = 0.0;
                        for c in 0..d {
                            let dxh = dy[[r, c]] * gain[c];
                            mean_dxhat += dxh;
                            mean_dxhat_xhat += dxh * xhat[[r, c]];
                            dgain[c] += dy[[r, c]] * xhat[[r, c]];
                            dbias[c] += dy[[r, c]];
                        }
                        mean_dxhat /= d as f64;
                        mean_dxhat_xhat /= d as f64;
                        for c in 0..d {
                            let dxh = dy[[r, c]] * gain[c];
                            dx[[r, c]] =
                                (dxh - mean_dxhat - xhat[[r, c]] * mean_dxhat_xhat) * inv_std[r];
                        }
                    }
                    let gm = &mut self.groups[g];
                    if gm.track {
                        for c in 0..d {
                            gm.grads[off + c] += dgain[c];
                            gm.grads[off + d + c] += dbias[c];
                        }
                    }
                    accumulate(&mut grads[x], dx);
                }
                Op::Relu { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[x].value, |g, &v| {
                        if v <= 0.0 {
                            *g = 0.0
                        }
                    });
                    accumulate(&mut grads[x], dx);
                }
                Op::Tanh { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[i].value, |g, &y| *g *= 1.0 - y * y);
                    accumulate(&mut grads[x], dx);
                }
                Op::Sigmoid { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[i].value, |g, &y| *g *= y * (1.0 - y));
                    accumulate(&mut grads[x], dx);
                }
                Op::Exp { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[i].value, |g, &y| *g *= y);
                    accumulate(&mut grads[x], dx);
                }
                Op::Ln { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[x].value, |g, &v| *g /= v);
                    accumulate(&mut grads[x], dx);
                }
                Op::Softplus { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[x].value, |g, &v| *g *= sigmoid(v));
                    accumulate(&mut grads[x], dx);
                }
                Op::Neg { x } => {
                    accumulate(&mut grads[x], dy.mapv(|v| -v));
                }
                Op::Add { a, b } => {
                    accumulate(&mut grads[a], dy.clone());
                    accumulate(&mut grads[b], dy);
                }
                Op::Sub { a, b } => {
                    accumulate(&mut grads[a], dy.clone());
                    accumulate(&mut grads[b], dy.mapv(|v| -v));
                }
                Op::Mul { a, b } => {
                    let mut da = dy.clone();
                    da.zip_mut_with(&self.nodes[b].value, |g, &v| *g *= v);
                    accumulate(&mut grads[a], da);
                    let mut db = dy;
                    db.zip_mut_with(&self.nodes[a].value, |g, &v| *g *= v);
                    accumulate(&mut grads[b], db);
                }
                Op::Div { a, b } => {
                    let mut da = dy.clone();
                    da.zip_mut_with(&self.nodes[b].value, |g, &v| *g /= v);
                    accumulate(&mut grads[a], da);
                    let mut db = dy;
                    db.zip_mut_with(&self.nodes[i].value, |g, &y| *g *= -y);
                    db.zip_mut_with(&self.nodes[b].value, |g, &v| *g /= v);
                    accumulate(&mut grads[b], db);
                }
                Op::AddScalar { x, .. } => accumulate(&mut grads[x], dy),
                Op::MulScalar { x, c } => accumulate(&mut grads[x], dy.mapv(|v| v * c)),
                Op::Clamp { x, lo, hi } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[x].value, |g, &v| {
                        if v <= lo || v >= hi {
                            *g = 0.0
                        }
                    });
                    accumulate(&mut grads[x], dx);
                }
                Op::Square { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[x].value, |g, &v| *g *= 2.0 * v);
                    accumulate(&mut grads[x], dx);
                }
                Op::Abs { x } => {
                    let mut dx = dy;
                    dx.zip_mut_with(&self.nodes[x].value, |g, &v| *g *= v.signum());
                    accumulate(&mut grads[x], dx);
                }
                Op::Min2 { a, b } => {
                    let av = &self.nodes[a].value;
                    let bv = &self.nodes[b].value;
                    let mut da = dy.clone();
                    let mut db = dy;
                    for ((g_a, g_b), (x, y)) in da
                        .iter_mut()
                        .zip(db.iter_mut())
                        .zip(av.iter().zip(bv.iter()))
                    {
                        if x <= y {
                            *g_b = 0.0;
                        } else {
                            *g_a = 0.0;
                        }
                    }
                    accumulate(&mut grads[a], da);
                    accumulate(&mut grads[b], db);
                }
                Op::Max2 { a, b } => {
                    let av = &self.nodes[a].value;
                    let bv = &self.nodes[b].value;
                    let mut da = dy.clone();
                    let mut db = dy;
                    for ((g_a, g_b), (x, y)) in da
                        .iter_mut()
                        .zip(db.iter_mut())
                        .zip(av.iter().zip(bv.iter()))
                    {
                        if x >= y {
                            *g_b = 0.0;
                        } else {
                            *g_a = 0.0;
                        }
                    }
                    accumulate(&mut grads[a], da);
                    accumulate(&mut grads[b], db);
                }
                Op::Concat { a, b } => {
                    let na = self.nodes[a].value.ncols();
                    accumulate(&mut grads[a], dy.slice(ndarray::s![.., ..na]).to_owned());
                    accumulate(&mut grads[b], dy.slice(ndarray::s![.., na..]).to_owned());
                }
                Op::SliceCols { x, from, to } => {
                    let xv = &self.nodes[x].value;
                    let mut dx = Array2::zeros(xv.raw_dim());
                    dx.slice_mut(ndarray::s![.., from..to]).assign(&dy);
                    accumulate(&mut grads[x], dx);
                }
                Op::SumCols { x } => {
                    let xv = &self.nodes[x].value;
                    let mut dx = Array2::zeros(xv.raw_dim());
                    for (r, mut row) in dx.outer_iter_mut().enumerate() {
                        row.fill(dy[[r, 0]]);
                    }
                    accumulate(&mut grads[x], dx);
                }
                Op::SumAll { x } => {
                    let xv = &self.nodes[x].value;
                    accumulate(&mut grads[x], Array2::from_elem(xv.raw_dim(), dy[[0, 0]]));
                }
                Op::MeanAll { x } => {
                    let xv = &self.nodes[x].value;
                    let scale = dy[[0, 0]] / xv.len() as f64;
                    accumulate(&mut grads[x], Array2::from_elem(xv.raw_dim(), scale));
                }
                Op::MulBcastCol { x, w } => {
                    let xv = &self.nodes[x].value;
                    let wv = &self.nodes[w].value;
                    let mut dx = dy.clone();
                    for (r, mut row) in dx.outer_iter_mut().enumerate() {
                        let c = wv[[r, 0]];
                        row.mapv_inplace(|v| v * c);
                    }
                    accumulate(&mut grads[x], dx);
                    let mut dw = Array2::zeros((xv.nrows(), 1));
                    for r in 0..xv.nrows() {
                        let mut s = 0.0;
                        for c in 0..xv.ncols() {
                            s += dy[[r, c]] * xv[[r, c]];
                        }
                        dw[[r, 0]] = s;
                    }
                    accumulate(&mut grads[w], dw);
                }
            }
        }
    }
}

fn accumulate(slot: &mut Option<Array2<f64>>, delta: Array2<f64>) {
    match slot {
        Some(existing) => *existing += &delta,
        None => *slot = Some(delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Central finite differences on a scalar function of flat params.
    fn fd_grad(f: impl Fn(&[f64]) -> f64, params: &[f64], eps: f64) -> Vec<f64> {
        let mut g = vec![0.0; params.len()];
        let mut p = params.to_vec();
        for i in 0..params.len() {
            let orig = p[i];
            p[i] = orig + eps;
            let hi = f(&p);
            p[i] = orig - eps;
            let lo = f(&p);
            p[i] = orig;
            g[i] = (hi - lo) / (2.0 * eps);
        }
        g
    }

    #[test]
    fn linear_layer_gradients_match_fd() {
        // One linear layer (2 -> 3) followed by tanh and a mean reduction.
        let params: Vec<f64> = vec![0.3, -0.2, 0.5, 0.1, 0.4, -0.6, 0.05, -0.15, 0.25];
        let x = ndarray::array![[0.7, -1.2], [0.4, 0.9], [-0.3, 0.1]];

        let loss_of = |p: &[f64]| {
            let mut tape = Tape::new();
            let g = tape.register(p, true);
            let xv = tape.input(x.clone());
            let h = tape.linear(xv, g, 0, 2, 3);
            let t = tape.tanh(h);
            let l = tape.mean_all(t);
            tape.scalar(l)
        };

        let mut tape = Tape::new();
        let g = tape.register(&params, true);
        let xv = tape.input(x.clone());
        let h = tape.linear(xv, g, 0, 2, 3);
        let t = tape.tanh(h);
        let l = tape.mean_all(t);
        tape.backward(l);

        let fd = fd_grad(loss_of, &params, 1e-6);
        for (a, b) in tape.group_grad(g).iter().zip(&fd) {
            assert_relative_eq!(a, b, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn composite_op_gradients_match_fd() {
        // Exercise mul, div, min2, softplus, clamp, exp, sum_cols, mul_bcast_col.
        let params: Vec<f64> = vec![0.9, -0.4, 0.2, 0.7, -0.8, 0.3, 0.25, -0.6]; // two 3->1 layers
        let build = |p: &[f64]| {
            let mut tape = Tape::new();
            let g = tape.register(p, true);
            let a = tape.input(ndarray::array![[1.2, -0.5, 0.3], [-0.4, 0.8, 0.9]]);
            let h = tape.linear(a, g, 0, 3, 1); // [2,1]
            let k = tape.linear(a, g, 4, 3, 1); // [2,1]
            let sp = tape.softplus(h);
            let e = tape.exp(k);
            let q = tape.div(sp, e);
            let m = tape.min2(q, sp);
            let w = tape.mul_bcast_col(a, m);
            let s = tape.sum_cols(w);
            let c = tape.clamp(s, -5.0, 5.0);
            let l = tape.mean_all(c);
            (tape, g, l)
        };
        let loss_of = |p: &[f64]| {
            let (tape, _, l) = build(p);
            tape.scalar(l)
        };
        let (mut tape, g, l) = build(&params);
        tape.backward(l);
        let fd = fd_grad(loss_of, &params, 1e-6);
        for (a, b) in tape.group_grad(g).iter().zip(&fd) {
            assert_relative_eq!(a, b, max_relative = 1e-5, epsilon = 1e-9);
        }
    }

    #[test]
    fn layer_norm_gradients_match_fd() {
        // linear -> layer_norm -> relu -> mean
        let mut params: Vec<f64> = vec![0.5, -0.3, 0.2, 0.8, -0.1, 0.4, 0.15, 0.3, -0.2]; // 2x3 W + 3 b
        params.extend([1.1, 0.9, 1.05, 0.02, -0.03, 0.05]); // gain(3) + bias(3)
        let x = ndarray::array![[0.3, -0.8], [1.1, 0.2]];
        let w_len = 2 * 3 + 3;
        assert_eq!(params.len(), w_len + 6);
        let loss_of = |p: &[f64]| {
            let mut tape = Tape::new();
            let g = tape.register(p, true);
            let xv = tape.input(x.clone());
            let h = tape.linear(xv, g, 0, 2, 3);
            let n = tape.layer_norm(h, g, w_len);
            let r = tape.relu(n);
            let l = tape.mean_all(r);
            tape.scalar(l)
        };
        let mut tape = Tape::new();
        let g = tape.register(&params, true);
        let xv = tape.input(x.clone());
        let h = tape.linear(xv, g, 0, 2, 3);
        let n = tape.layer_norm(h, g, w_len);
        let r = tape.relu(n);
        let l = tape.mean_all(r);
        tape.backward(l);
        let fd = fd_grad(loss_of, &params, 1e-6);
        for (a, b) in tape.group_grad(g).iter().zip(&fd) {
            assert_relative_eq!(a, b, max_relative = 1e-5, epsilon = 1e-8);
        }
    }

    #[test]
    fn detach_stops_gradient() {
        let params = vec![0.4, 0.6, 0.1];
        let mut tape = Tape::new();
        let g = tape.register(&params, true);
        let x = tape.input(ndarray::array![[1.0, 2.0]]);
        let h = tape.linear(x, g, 0, 2, 1);
        let d = tape.detach(h);
        let prod = tape.mul(h, d); // only the non-detached factor carries grad
        let l = tape.sum_all(prod);
        tape.backward(l);
        let analytic = tape.group_grad(g).to_vec();
        // d(h * detach(h))/dp = detach(h) * dh/dp, with h = 0.4 + 1.2 + 0.1.
        let h_val = 0.4 + 2.0 * 0.6 + 0.1;
        assert_relative_eq!(analytic[0], h_val * 1.0, epsilon = 1e-12);
        assert_relative_eq!(analytic[1], h_val * 2.0, epsilon = 1e-12);
        assert_relative_eq!(analytic[2], h_val, epsilon = 1e-12);
    }

    #[test]
    fn untracked_groups_accumulate_nothing() {
        let params = vec![0.4, 0.6, 0.1];
        let mut tape = Tape::new();
        let g = tape.register(&params, false);
        let x = tape.input(ndarray::array![[1.0, 2.0]]);
        let h = tape.linear(x, g, 0, 2, 1);
        let l = tape.sum_all(h);
        tape.backward(l);
        assert!(tape.group_grad(g).is_empty());
    }
}
