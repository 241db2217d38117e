//! Reverse-mode autodiff over row-major matrices.

use crate::params::ParamStore;
use crate::tensor::{matmul_acc, matmul_t_acc, t_matmul_acc, Scalar, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug)]
enum Op<F> {
    Leaf,
    Param(usize),
    MatMul(Var, Var),
    /// `a · bᵀ`
    MatMulT(Var, Var),
    Add(Var, Var),
    /// `a + b` with `b` a single row broadcast over the rows of `a`.
    AddRow(Var, Var),
    Mul(Var, Var),
    Scale(Var, F),
    Gather(Var, Vec<usize>),
    GatherCols(Var, Vec<usize>),
    ScatterAdd(Var, Var, Vec<usize>),
    Rows(Var, usize),
    SliceCols(Var, usize),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    LayerNorm { x: Var, gain: Var, bias: Var, xhat: Tensor<F>, inv_std: Vec<F> },
    Softmax(Var),
    LogSoftmax(Var),
    Tanh(Var),
    Sigmoid(Var),
    Gelu(Var),
    LogSigmoid(Var),
    Pick(Var, usize, usize),
    Sum(Var),
}

struct Node<F> {
    value: Option<Tensor<F>>,
    op: Op<F>,
}

/// One forward pass. Parameters are read from the store, not copied.
pub struct Tape<'p, F: Scalar> {
    params: &'p ParamStore<F>,
    nodes: Vec<Node<F>>,
    param_vars: Vec<Option<Var>>,
}

const LN_EPS: f64 = 1e-5;
const GELU_C: f64 = 0.797_884_560_802_865_4;
const GELU_A: f64 = 0.044_715;

fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

impl<'p, F: Scalar> Tape<'p, F> {
    pub fn new(params: &'p ParamStore<F>) -> Self {
        Tape {
            params,
            nodes: Vec::with_capacity(256),
            param_vars: vec![None; params.len()],
        }
    }

    pub fn value(&self, v: Var) -> &Tensor<F> {
        let node = &self.nodes[v.0];
        match (&node.value, &node.op) {
            (Some(t), _) => t,
            (None, Op::Param(i)) => self.params.get(*i),
            _ => unreachable!("only parameter nodes borrow their value"),
        }
    }

    pub fn shape(&self, v: Var) -> [usize; 2] {
        self.value(v).shape()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor<F>, op: Op<F>) -> Var {
        debug_assert!(value.is_finite(), "non-finite value from {op:?}");
        self.nodes.push(Node { value: Some(value), op });
        Var(self.nodes.len() - 1)
    }

    pub fn constant(&mut self, value: Tensor<F>) -> Var {
        self.push(value, Op::Leaf)
    }

    /// Copy of `v` that gradients do not flow through.
    pub fn detach(&mut self, v: Var) -> Var {
        let t = self.value(v).clone();
        self.constant(t)
    }

    pub fn param(&mut self, id: usize) -> Var {
        if let Some(v) = self.param_vars[id] {
            return v;
        }
        self.nodes.push(Node { value: None, op: Op::Param(id) });
        let v = Var(self.nodes.len() - 1);
        self.param_vars[id] = Some(v);
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        let mut out = Tensor::zeros(ta.rows, tb.cols);
        matmul_acc(ta, tb, &mut out);
        self.push(out, Op::MatMul(a, b))
    }

    pub fn matmul_t(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        let mut out = Tensor::zeros(ta.rows, tb.rows);
        matmul_t_acc(ta, tb, &mut out);
        self.push(out, Op::MatMulT(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape(), tb.shape(), "add shapes");
        let data = ta.data.iter().zip(&tb.data).map(|(x, y)| *x + *y).collect();
        let out = Tensor::from_vec(ta.rows, ta.cols, data);
        self.push(out, Op::Add(a, b))
    }

    pub fn add_row(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(tb.shape(), [1, ta.cols], "add_row shapes");
        let mut out = ta.clone();
        for r in 0..out.rows {
            for (x, y) in out.row_mut(r).iter_mut().zip(&tb.data) {
                *x = *x + *y;
            }
        }
        self.push(out, Op::AddRow(a, b))
    }

    /// `x · w + b` for a weight and a bias row.
    pub fn linear(&mut self, x: Var, w: Var, b: Var) -> Var {
        let y = self.matmul(x, w);
        self.add_row(y, b)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape(), tb.shape(), "mul shapes");
        let data = ta.data.iter().zip(&tb.data).map(|(x, y)| *x * *y).collect();
        let out = Tensor::from_vec(ta.rows, ta.cols, data);
        self.push(out, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: Var, s: F) -> Var {
        let ta = self.value(a);
        let out = Tensor::from_vec(ta.rows, ta.cols, ta.data.iter().map(|x| *x * s).collect());
        self.push(out, Op::Scale(a, s))
    }

    pub fn gather(&mut self, table: Var, ids: Vec<usize>) -> Var {
        let t = self.value(table);
        let mut out = Tensor::zeros(ids.len(), t.cols);
        for (r, &i) in ids.iter().enumerate() {
            assert!(i < t.rows, "gather index {i} out of {} rows", t.rows);
            out.row_mut(r).copy_from_slice(t.row(i));
        }
        self.push(out, Op::Gather(table, ids))
    }

    pub fn gather_cols(&mut self, a: Var, ids: Vec<usize>) -> Var {
        let t = self.value(a);
        let mut out = Tensor::zeros(t.rows, ids.len());
        for r in 0..t.rows {
            for (c, &i) in ids.iter().enumerate() {
                out.data[r * ids.len() + c] = t.at(r, i);
            }
        }
        self.push(out, Op::GatherCols(a, ids))
    }

    /// Copy of `base` with row `src[k]` added to row `index[k]`.
    pub fn scatter_add_rows(&mut self, base: Var, src: Var, index: Vec<usize>) -> Var {
        let (tb, ts) = (self.value(base), self.value(src));
        assert_eq!(ts.rows, index.len(), "scatter index length");
        assert_eq!(ts.cols, tb.cols, "scatter width");
        let mut out = tb.clone();
        for (k, &i) in index.iter().enumerate() {
            assert!(i < out.rows, "scatter index {i} out of {} rows", out.rows);
            for (x, y) in out.row_mut(i).iter_mut().zip(ts.row(k)) {
                *x = *x + *y;
            }
        }
        self.push(out, Op::ScatterAdd(base, src, index))
    }

    pub fn rows(&mut self, a: Var, start: usize, len: usize) -> Var {
        let t = self.value(a);
        assert!(start + len <= t.rows, "row slice out of range");
        let out = Tensor::from_vec(len, t.cols, t.data[start * t.cols..(start + len) * t.cols].to_vec());
        self.push(out, Op::Rows(a, start))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Var {
        let t = self.value(a);
        assert!(start + len <= t.cols, "column slice out of range");
        let mut out = Tensor::zeros(t.rows, len);
        for r in 0..t.rows {
            out.row_mut(r).copy_from_slice(&t.row(r)[start..start + len]);
        }
        self.push(out, Op::SliceCols(a, start))
    }

    pub fn concat_cols(&mut self, parts: Vec<Var>) -> Var {
        let rows = self.value(parts[0]).rows;
        let cols: usize = parts.iter().map(|p| self.value(*p).cols).sum();
        let mut out = Tensor::zeros(rows, cols);
        for r in 0..rows {
            let mut c = 0;
            for p in &parts {
                let t = self.value(*p);
                assert_eq!(t.rows, rows, "concat_cols rows");
                out.row_mut(r)[c..c + t.cols].copy_from_slice(t.row(r));
                c += t.cols;
            }
        }
        self.push(out, Op::ConcatCols(parts))
    }

    pub fn concat_rows(&mut self, parts: Vec<Var>) -> Var {
        let cols = self.value(parts[0]).cols;
        let mut data = Vec::new();
        for p in &parts {
            let t = self.value(*p);
            assert_eq!(t.cols, cols, "concat_rows cols");
            data.extend_from_slice(&t.data);
        }
        let out = Tensor::from_vec(data.len() / cols.max(1), cols, data);
        self.push(out, Op::ConcatRows(parts))
    }

    /// Row-wise layer normalization with learned gain and bias rows.
    pub fn layer_norm(&mut self, x: Var, gain: Var, bias: Var) -> Var {
        let (tx, tg, tb) = (self.value(x), self.value(gain), self.value(bias));
        assert_eq!(tg.shape(), [1, tx.cols], "layer_norm gain");
        assert_eq!(tb.shape(), [1, tx.cols], "layer_norm bias");
        let n = F::of(tx.cols as f64);
        let mut xhat = Tensor::zeros(tx.rows, tx.cols);
        let mut out = Tensor::zeros(tx.rows, tx.cols);
        let mut inv_std = Vec::with_capacity(tx.rows);
        for r in 0..tx.rows {
            let row = tx.row(r);
            let mean = row.iter().fold(F::zero(), |s, v| s + *v) / n;
            let var = row.iter().fold(F::zero(), |s, v| s + (*v - mean) * (*v - mean)) / n;
            let is = F::one() / (var + F::of(LN_EPS)).sqrt();
            inv_std.push(is);
            for c in 0..tx.cols {
                let h = (row[c] - mean) * is;
                xhat.data[r * tx.cols + c] = h;
                out.data[r * tx.cols + c] = h * tg.data[c] + tb.data[c];
            }
        }
        self.push(out, Op::LayerNorm { x, gain, bias, xhat, inv_std })
    }

    pub fn softmax(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for r in 0..out.rows {
            let row = out.row_mut(r);
            let m = row.iter().fold(F::neg_infinity(), |m, v| m.max(*v));
            let mut s = F::zero();
            for v in row.iter_mut() {
                *v = (*v - m).exp();
                s = s + *v;
            }
            for v in row.iter_mut() {
                *v = *v / s;
            }
        }
        self.push(out, Op::Softmax(a))
    }

    pub fn log_softmax(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for r in 0..out.rows {
            let row = out.row_mut(r);
            let m = row.iter().fold(F::neg_infinity(), |m, v| m.max(*v));
            let lse = row.iter().fold(F::zero(), |s, v| s + (*v - m).exp()).ln() + m;
            for v in row.iter_mut() {
                *v = *v - lse;
            }
        }
        self.push(out, Op::LogSoftmax(a))
    }

    fn map(&mut self, a: Var, f: impl Fn(F) -> F, op: Op<F>) -> Var {
        let t = self.value(a);
        let out = Tensor::from_vec(t.rows, t.cols, t.data.iter().map(|x| f(*x)).collect());
        self.push(out, op)
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.map(a, |x| x.tanh(), Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        self.map(a, sigmoid, Op::Sigmoid(a))
    }

    /// GELU, tanh approximation.
    pub fn gelu(&mut self, a: Var) -> Var {
        let (c, k) = (F::of(GELU_C), F::of(GELU_A));
        let half = F::of(0.5);
        self.map(a, |x| half * x * (F::one() + (c * (x + k * x * x * x)).tanh()), Op::Gelu(a))
    }

    /// `log σ(x)`, stable for large `|x|`.
    pub fn log_sigmoid(&mut self, a: Var) -> Var {
        self.map(a, |x| x.min(F::zero()) - (F::one() + (-x.abs()).exp()).ln(), Op::LogSigmoid(a))
    }

    pub fn pick(&mut self, a: Var, r: usize, c: usize) -> Var {
        let v = self.value(a).at(r, c);
        self.push(Tensor::from_vec(1, 1, vec![v]), Op::Pick(a, r, c))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).data.iter().fold(F::zero(), |s, x| s + *x);
        self.push(Tensor::from_vec(1, 1, vec![s]), Op::Sum(a))
    }

    /// Gradients of the scalar `loss` with respect to every parameter, in
    /// store order. Unused parameters get zeros.
    pub fn backward(&self, loss: Var) -> Vec<Tensor<F>> {
        assert_eq!(self.shape(loss), [1, 1], "loss must be a scalar");
        let mut grads: Vec<Option<Tensor<F>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::from_vec(1, 1, vec![F::one()]));
        let mut out = self.params.zeros_like();

        for i in (0..=loss.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            debug_assert!(g.is_finite(), "non-finite gradient at node {i}");
            let y = self.nodes[i].value.as_ref();
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::Param(p) => out[*p].add_assign(&g),
                Op::MatMul(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    matmul_t_acc(&g, tb, self.slot(&mut grads, *a));
                    t_matmul_acc(ta, &g, self.slot(&mut grads, *b));
                }
                Op::MatMulT(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    matmul_acc(&g, tb, self.slot(&mut grads, *a));
                    t_matmul_acc(&g, ta, self.slot(&mut grads, *b));
                }
                Op::Add(a, b) => {
                    self.slot(&mut grads, *a).add_assign(&g);
                    self.slot(&mut grads, *b).add_assign(&g);
                }
                Op::AddRow(a, b) => {
                    self.slot(&mut grads, *a).add_assign(&g);
                    let gb = self.slot(&mut grads, *b);
                    for r in 0..g.rows {
                        for (x, y) in gb.data.iter_mut().zip(g.row(r)) {
                            *x = *x + *y;
                        }
                    }
                }
                Op::Mul(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    let ga = self.slot(&mut grads, *a);
                    for ((x, d), w) in ga.data.iter_mut().zip(&g.data).zip(&tb.data) {
                        *x = *x + *d * *w;
                    }
                    let gb = self.slot(&mut grads, *b);
                    for ((x, d), w) in gb.data.iter_mut().zip(&g.data).zip(&ta.data) {
                        *x = *x + *d * *w;
                    }
                }
                Op::Scale(a, s) => {
                    let ga = self.slot(&mut grads, *a);
                    for (x, d) in ga.data.iter_mut().zip(&g.data) {
                        *x = *x + *d * *s;
                    }
                }
                Op::Gather(t, ids) => {
                    let gt = self.slot(&mut grads, *t);
                    for (r, &id) in ids.iter().enumerate() {
                        for (x, d) in gt.row_mut(id).iter_mut().zip(g.row(r)) {
                            *x = *x + *d;
                        }
                    }
                }
                Op::GatherCols(a, ids) => {
                    let ga = self.slot(&mut grads, *a);
                    for r in 0..g.rows {
                        for (c, &id) in ids.iter().enumerate() {
                            let x = &mut ga.data[r * ga.cols + id];
                            *x = *x + g.at(r, c);
                        }
                    }
                }
                Op::ScatterAdd(base, src, index) => {
                    self.slot(&mut grads, *base).add_assign(&g);
                    let gs = self.slot(&mut grads, *src);
                    for (k, &i) in index.iter().enumerate() {
                        for (x, d) in gs.row_mut(k).iter_mut().zip(g.row(i)) {
                            *x = *x + *d;
                        }
                    }
                }
                Op::Rows(a, start) => {
                    let ga = self.slot(&mut grads, *a);
                    let off = start * ga.cols;
                    for (x, d) in ga.data[off..off + g.data.len()].iter_mut().zip(&g.data) {
                        *x = *x + *d;
                    }
                }
                Op::SliceCols(a, start) => {
                    let ga = self.slot(&mut grads, *a);
                    for r in 0..g.rows {
                        for (x, d) in ga.row_mut(r)[*start..*start + g.cols].iter_mut().zip(g.row(r)) {
                            *x = *x + *d;
                        }
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut c = 0;
                    for p in parts {
                        let gp = self.slot(&mut grads, *p);
                        let w = gp.cols;
                        for r in 0..g.rows {
                            for (x, d) in gp.row_mut(r).iter_mut().zip(&g.row(r)[c..c + w]) {
                                *x = *x + *d;
                            }
                        }
                        c += w;
                    }
                }
                Op::ConcatRows(parts) => {
                    let mut off = 0;
                    for p in parts {
                        let gp = self.slot(&mut grads, *p);
                        let n = gp.data.len();
                        for (x, d) in gp.data.iter_mut().zip(&g.data[off..off + n]) {
                            *x = *x + *d;
                        }
                        off += n;
                    }
                }
                Op::LayerNorm { x, gain, bias, xhat, inv_std } => {
                    let tg = self.value(*gain).clone();
                    let n = F::of(xhat.cols as f64);
                    {
                        let gg = self.slot(&mut grads, *gain);
                        for r in 0..g.rows {
                            for c in 0..g.cols {
                                gg.data[c] = gg.data[c] + g.at(r, c) * xhat.at(r, c);
                            }
                        }
                    }
                    {
                        let gb = self.slot(&mut grads, *bias);
                        for r in 0..g.rows {
                            for (x, d) in gb.data.iter_mut().zip(g.row(r)) {
                                *x = *x + *d;
                            }
                        }
                    }
                    let gx = self.slot(&mut grads, *x);
                    for r in 0..g.rows {
                        let dh: Vec<F> = g.row(r).iter().zip(&tg.data).map(|(d, w)| *d * *w).collect();
                        let s1 = dh.iter().fold(F::zero(), |s, v| s + *v);
                        let s2 = dh.iter().zip(xhat.row(r)).fold(F::zero(), |s, (d, h)| s + *d * *h);
                        for c in 0..g.cols {
                            let v = inv_std[r] / n * (n * dh[c] - s1 - xhat.at(r, c) * s2);
                            let o = &mut gx.data[r * g.cols + c];
                            *o = *o + v;
                        }
                    }
                }
                Op::Softmax(a) => {
                    let y = y.expect("softmax output");
                    let ga = self.slot(&mut grads, *a);
                    for r in 0..g.rows {
                        let dot = g.row(r).iter().zip(y.row(r)).fold(F::zero(), |s, (d, p)| s + *d * *p);
                        for c in 0..g.cols {
                            let o = &mut ga.data[r * g.cols + c];
                            *o = *o + y.at(r, c) * (g.at(r, c) - dot);
                        }
                    }
                }
                Op::LogSoftmax(a) => {
                    let y = y.expect("log_softmax output");
                    let ga = self.slot(&mut grads, *a);
                    for r in 0..g.rows {
                        let total = g.row(r).iter().fold(F::zero(), |s, d| s + *d);
                        for c in 0..g.cols {
                            let o = &mut ga.data[r * g.cols + c];
                            *o = *o + g.at(r, c) - y.at(r, c).exp() * total;
                        }
                    }
                }
                Op::Tanh(a) => {
                    let y = y.expect("tanh output");
                    self.unary_back(&mut grads, *a, &g, |_, yv| F::one() - yv * yv, y);
                }
                Op::Sigmoid(a) => {
                    let y = y.expect("sigmoid output");
                    self.unary_back(&mut grads, *a, &g, |_, yv| yv * (F::one() - yv), y);
                }
                Op::Gelu(a) => {
                    let y = y.expect("gelu output");
                    let (c, k) = (F::of(GELU_C), F::of(GELU_A));
                    let half = F::of(0.5);
                    let three = F::of(3.0);
                    self.unary_back(
                        &mut grads,
                        *a,
                        &g,
                        |x, _| {
                            let t = (c * (x + k * x * x * x)).tanh();
                            half * (F::one() + t) + half * x * (F::one() - t * t) * c * (F::one() + three * k * x * x)
                        },
                        y,
                    );
                }
                Op::LogSigmoid(a) => {
                    let y = y.expect("log_sigmoid output");
                    self.unary_back(&mut grads, *a, &g, |x, _| sigmoid(-x), y);
                }
                Op::Pick(a, r, c) => {
                    let ga = self.slot(&mut grads, *a);
                    let o = &mut ga.data[r * ga.cols + c];
                    *o = *o + g.data[0];
                }
                Op::Sum(a) => {
                    let ga = self.slot(&mut grads, *a);
                    for x in ga.data.iter_mut() {
                        *x = *x + g.data[0];
                    }
                }
            }
        }
        out
    }

    fn unary_back(
        &self,
        grads: &mut [Option<Tensor<F>>],
        a: Var,
        g: &Tensor<F>,
        dydx: impl Fn(F, F) -> F,
        y: &Tensor<F>,
    ) {
        let x = self.value(a);
        let mut delta = Vec::with_capacity(g.data.len());
        for ((d, xv), yv) in g.data.iter().zip(&x.data).zip(&y.data) {
            delta.push(*d * dydx(*xv, *yv));
        }
        let ga = self.slot(grads, a);
        for (o, d) in ga.data.iter_mut().zip(delta) {
            *o = *o + d;
        }
    }

    fn slot<'g>(&self, grads: &'g mut [Option<Tensor<F>>], v: Var) -> &'g mut Tensor<F> {
        let [r, c] = self.shape(v);
        grads[v.0].get_or_insert_with(|| Tensor::zeros(r, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(ts: Vec<Tensor<f64>>) -> ParamStore<f64> {
        let mut s = ParamStore::default();
        for (i, t) in ts.into_iter().enumerate() {
            s.push(format!("p{i}"), t);
        }
        s
    }

    #[test]
    fn linear_layer_gradient_is_x_transpose_delta() {
        let x = Tensor::from_vec(2, 3, vec![1.0, -2.0, 0.5, 3.0, 0.0, -1.0]);
        let w = Tensor::from_vec(3, 2, vec![0.1, 0.2, -0.3, 0.4, 0.5, -0.6]);
        let delta = Tensor::from_vec(2, 2, vec![1.0, 2.0, -1.0, 0.5]);
        let s = store(vec![w]);
        let mut t = Tape::new(&s);
        let xv = t.constant(x.clone());
        let wv = t.param(0);
        let y = t.matmul(xv, wv);
        let d = t.constant(delta.clone());
        let yd = t.mul(y, d);
        let loss = t.sum(yd);
        let g = t.backward(loss);
        let mut want = Tensor::zeros(3, 2);
        t_matmul_acc(&x, &delta, &mut want);
        assert_eq!(g[0], want);
    }

    #[test]
    fn detached_output_has_zero_gradients() {
        let s = store(vec![Tensor::from_vec(1, 2, vec![0.3, -0.7])]);
        let mut t = Tape::new(&s);
        let p = t.param(0);
        let h = t.tanh(p);
        let d = t.detach(h);
        let loss = t.sum(d);
        let g = t.backward(loss);
        assert!(g[0].data.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn log_sigmoid_is_stable() {
        let s = store(vec![]);
        let mut t = Tape::new(&s);
        let x = t.constant(Tensor::row_vector(vec![-800.0, 0.0, 800.0]));
        let y = t.log_sigmoid(x);
        let v = &t.value(y).data;
        assert_eq!(v[0], -800.0);
        assert!((v[1] + std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
    }
}
