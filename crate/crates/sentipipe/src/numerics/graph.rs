//! Reverse-mode tape over a fixed op vocabulary: matmul (plain and
//! transposed), elementwise add/mul, row broadcasts, masked row softmax,
//! layer norm, GELU, embedding gather, row/column slicing and concat, and a
//! mean cross-entropy head. Nodes only reference earlier nodes, so the
//! reverse insertion order is a valid backward schedule.

use std::rc::Rc;

use super::{NumericsError, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

enum Op {
    Leaf,
    Add(NodeId, NodeId),
    /// `[m,n] + [n]`, the row vector broadcast over rows.
    AddRow(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Scale(NodeId, f64),
    Sum(NodeId),
    /// `[m,k] x [k,n]`
    MatMul(NodeId, NodeId),
    /// `[m,k] x [n,k]^T`
    MatMulNT(NodeId, NodeId),
    Gelu(NodeId),
    /// Row-wise softmax over the positions the mask allows; disallowed
    /// entries are exactly zero (hard exclusion, not an additive penalty),
    /// which is what makes masked-out inputs bit-invisible downstream.
    MaskedSoftmaxRows {
        x: NodeId,
        mask: Rc<Vec<bool>>,
    },
    LayerNorm {
        x: NodeId,
        gain: NodeId,
        bias: NodeId,
        eps: f64,
    },
    Gather {
        table: NodeId,
        ids: Rc<Vec<usize>>,
    },
    SliceRows {
        x: NodeId,
        start: usize,
        len: usize,
    },
    SliceCols {
        x: NodeId,
        start: usize,
        len: usize,
    },
    ConcatCols(Vec<NodeId>),
    /// Mean of per-row `-log softmax(row)[target]`; the scalar loss head.
    CrossEntropyRows {
        logits: NodeId,
        targets: Rc<Vec<usize>>,
    },
}

struct Node {
    op: Op,
    value: Tensor,
    grad: Option<Tensor>,
}

/// A define-by-run computation tape. Build one per forward pass.
#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
    backward_done: bool,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].value
    }

    /// Gradient of the last `backward` target with respect to `id`; zero
    /// tensor if the node is unreachable from the loss.
    pub fn grad(&self, id: NodeId) -> Tensor {
        self.nodes[id.0]
            .grad
            .clone()
            .unwrap_or_else(|| Tensor::zeros(self.nodes[id.0].value.shape()))
    }

    fn push(&mut self, op: Op, value: Tensor) -> NodeId {
        debug_assert!(value.all_finite(), "non-finite activation");
        self.nodes.push(Node {
            op,
            value,
            grad: None,
        });
        NodeId(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Leaf, value)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.shape(), vb.shape(), "add shape mismatch");
        let data = va.data().iter().zip(vb.data()).map(|(x, y)| x + y).collect();
        let value = Tensor::new(va.shape().to_vec(), data).unwrap();
        self.push(Op::Add(a, b), value)
    }

    pub fn add_row(&mut self, a: NodeId, row: NodeId) -> NodeId {
        let (m, n) = self.nodes[a.0].value.dims2();
        assert_eq!(self.nodes[row.0].value.len(), n, "add_row width mismatch");
        let mut value = self.nodes[a.0].value.clone();
        for r in 0..m {
            for c in 0..n {
                let v = value.at2(r, c) + self.nodes[row.0].value.data()[c];
                value.set2(r, c, v);
            }
        }
        self.push(Op::AddRow(a, row), value)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.shape(), vb.shape(), "mul shape mismatch");
        let data = va.data().iter().zip(vb.data()).map(|(x, y)| x * y).collect();
        let value = Tensor::new(va.shape().to_vec(), data).unwrap();
        self.push(Op::Mul(a, b), value)
    }

    pub fn scale(&mut self, a: NodeId, k: f64) -> NodeId {
        let va = &self.nodes[a.0].value;
        let data = va.data().iter().map(|x| x * k).collect();
        let value = Tensor::new(va.shape().to_vec(), data).unwrap();
        self.push(Op::Scale(a, k), value)
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let total: f64 = self.nodes[a.0].value.data().iter().sum();
        self.push(Op::Sum(a), Tensor::scalar(total))
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (m, k) = self.nodes[a.0].value.dims2();
        let (k2, n) = self.nodes[b.0].value.dims2();
        assert_eq!(k, k2, "matmul inner dims differ");
        let value = matmul_values(&self.nodes[a.0].value, &self.nodes[b.0].value, m, k, n);
        self.push(Op::MatMul(a, b), value)
    }

    /// `a x b^T` without materializing the transpose.
    pub fn matmul_nt(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (m, k) = self.nodes[a.0].value.dims2();
        let (n, k2) = self.nodes[b.0].value.dims2();
        assert_eq!(k, k2, "matmul_nt inner dims differ");
        let va = &self.nodes[a.0].value;
        let vb = &self.nodes[b.0].value;
        let mut out = Tensor::zeros(&[m, n]);
        for r in 0..m {
            for c in 0..n {
                let mut acc = 0.0;
                for i in 0..k {
                    acc += va.data()[r * k + i] * vb.data()[c * k + i];
                }
                out.set2(r, c, acc);
            }
        }
        self.push(Op::MatMulNT(a, b), out)
    }

    pub fn gelu(&mut self, a: NodeId) -> NodeId {
        let va = &self.nodes[a.0].value;
        let data = va.data().iter().map(|&x| gelu(x)).collect();
        let value = Tensor::new(va.shape().to_vec(), data).unwrap();
        self.push(Op::Gelu(a), value)
    }

    pub fn masked_softmax_rows(&mut self, x: NodeId, mask: Rc<Vec<bool>>) -> NodeId {
        let (m, n) = self.nodes[x.0].value.dims2();
        assert_eq!(mask.len(), m * n, "mask size mismatch");
        let vx = &self.nodes[x.0].value;
        let mut out = Tensor::zeros(&[m, n]);
        for r in 0..m {
            let row = &vx.data()[r * n..(r + 1) * n];
            let allowed = &mask[r * n..(r + 1) * n];
            debug_assert!(
                allowed.iter().any(|&a| a),
                "softmax row {r} has no allowed positions"
            );
            let max = row
                .iter()
                .zip(allowed)
                .filter(|(_, &a)| a)
                .map(|(v, _)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for c in 0..n {
                if allowed[c] {
                    let e = (row[c] - max).exp();
                    out.set2(r, c, e);
                    sum += e;
                }
            }
            for c in 0..n {
                if allowed[c] {
                    let v = out.at2(r, c) / sum;
                    out.set2(r, c, v);
                }
            }
        }
        self.push(Op::MaskedSoftmaxRows { x, mask }, out)
    }

    pub fn layer_norm(&mut self, x: NodeId, gain: NodeId, bias: NodeId, eps: f64) -> NodeId {
        let value = super::tensor::layer_norm(
            &self.nodes[x.0].value,
            &self.nodes[gain.0].value,
            &self.nodes[bias.0].value,
            eps,
        )
        .expect("layer_norm shapes");
        self.push(Op::LayerNorm { x, gain, bias, eps }, value)
    }

    pub fn gather(&mut self, table: NodeId, ids: Rc<Vec<usize>>) -> NodeId {
        let (rows, width) = self.nodes[table.0].value.dims2();
        let mut out = Tensor::zeros(&[ids.len(), width]);
        for (r, &id) in ids.iter().enumerate() {
            assert!(id < rows, "gather id {id} out of range ({rows} rows)");
            for c in 0..width {
                out.set2(r, c, self.nodes[table.0].value.at2(id, c));
            }
        }
        self.push(Op::Gather { table, ids }, out)
    }

    pub fn slice_rows(&mut self, x: NodeId, start: usize, len: usize) -> NodeId {
        let (m, n) = self.nodes[x.0].value.dims2();
        assert!(start + len <= m, "slice_rows out of range");
        let data = self.nodes[x.0].value.data()[start * n..(start + len) * n].to_vec();
        let value = Tensor::new(vec![len, n], data).unwrap();
        self.push(Op::SliceRows { x, start, len }, value)
    }

    pub fn slice_cols(&mut self, x: NodeId, start: usize, len: usize) -> NodeId {
        let (m, n) = self.nodes[x.0].value.dims2();
        assert!(start + len <= n, "slice_cols out of range");
        let mut out = Tensor::zeros(&[m, len]);
        for r in 0..m {
            for c in 0..len {
                out.set2(r, c, self.nodes[x.0].value.at2(r, start + c));
            }
        }
        self.push(Op::SliceCols { x, start, len }, out)
    }

    pub fn concat_cols(&mut self, parts: &[NodeId]) -> NodeId {
        assert!(!parts.is_empty(), "concat_cols needs at least one part");
        let m = self.nodes[parts[0].0].value.dims2().0;
        let total: usize = parts
            .iter()
            .map(|p| {
                let (pm, pn) = self.nodes[p.0].value.dims2();
                assert_eq!(pm, m, "concat_cols row mismatch");
                pn
            })
            .sum();
        let mut out = Tensor::zeros(&[m, total]);
        let mut offset = 0;
        for p in parts {
            let (_, pn) = self.nodes[p.0].value.dims2();
            for r in 0..m {
                for c in 0..pn {
                    out.set2(r, offset + c, self.nodes[p.0].value.at2(r, c));
                }
            }
            offset += pn;
        }
        self.push(Op::ConcatCols(parts.to_vec()), out)
    }

    pub fn cross_entropy_rows(&mut self, logits: NodeId, targets: Rc<Vec<usize>>) -> NodeId {
        let (m, n) = self.nodes[logits.0].value.dims2();
        assert_eq!(targets.len(), m, "one target per logits row");
        assert!(targets.iter().all(|&t| t < n), "target out of range");
        let v = &self.nodes[logits.0].value;
        let mut total = 0.0;
        for (r, &t) in targets.iter().enumerate() {
            let row = &v.data()[r * n..(r + 1) * n];
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
            total += lse - row[t];
        }
        let value = Tensor::scalar(total / m as f64);
        self.push(Op::CrossEntropyRows { logits, targets }, value)
    }

    /// Reverse pass from a scalar loss node. Errs if called twice on the
    /// same tape.
    pub fn backward(&mut self, loss: NodeId) -> Result<(), NumericsError> {
        if self.backward_done {
            return Err(NumericsError::BackwardAlreadyRun);
        }
        self.backward_done = true;
        if self.nodes[loss.0].value.len() != 1 {
            return Err(NumericsError::ShapeMismatch(
                "backward target must be a scalar".to_string(),
            ));
        }
        self.nodes[loss.0].grad = Some(Tensor::scalar(1.0));
        for i in (0..=loss.0).rev() {
            let Some(grad) = self.nodes[i].grad.take() else {
                continue;
            };
            self.propagate(i, &grad);
            self.nodes[i].grad = Some(grad);
        }
        Ok(())
    }

    fn accumulate(&mut self, id: NodeId, delta: &Tensor) {
        let node = &mut self.nodes[id.0];
        match &mut node.grad {
            Some(g) => {
                for (a, b) in g.data_mut().iter_mut().zip(delta.data()) {
                    *a += b;
                }
            }
            None => node.grad = Some(delta.clone()),
        }
    }

    fn propagate(&mut self, i: usize, grad: &Tensor) {
        // Ops only reference earlier nodes. Take the op out for the duration
        // of the rule so accumulate() can borrow the node list mutably.
        let op = std::mem::replace(&mut self.nodes[i].op, Op::Leaf);
        match &op {
            Op::Leaf => {}
            Op::Add(a, b) => {
                let (a, b) = (*a, *b);
                self.accumulate(a, grad);
                self.accumulate(b, grad);
            }
            Op::AddRow(a, row) => {
                let (a, row) = (*a, *row);
                self.accumulate(a, grad);
                let (m, n) = grad.dims2();
                let mut rg = Tensor::zeros(&[n]);
                for r in 0..m {
                    for c in 0..n {
                        rg.data_mut()[c] += grad.at2(r, c);
                    }
                }
                self.accumulate(row, &rg);
            }
            Op::Mul(a, b) => {
                let (a, b) = (*a, *b);
                let da = elementwise_mul(grad, &self.nodes[b.0].value);
                let db = elementwise_mul(grad, &self.nodes[a.0].value);
                self.accumulate(a, &da);
                self.accumulate(b, &db);
            }
            Op::Scale(a, k) => {
                let (a, k) = (*a, *k);
                let mut d = grad.clone();
                d.data_mut().iter_mut().for_each(|v| *v *= k);
                self.accumulate(a, &d);
            }
            Op::Sum(a) => {
                let a = *a;
                let g = grad.item();
                let mut d = Tensor::zeros(self.nodes[a.0].value.shape());
                d.fill(g);
                self.accumulate(a, &d);
            }
            Op::MatMul(a, b) => {
                let (a, b) = (*a, *b);
                let va = self.nodes[a.0].value.clone();
                let vb = self.nodes[b.0].value.clone();
                let (m, k) = va.dims2();
                let (_, n) = vb.dims2();
                // dA = dC x B^T
                let mut da = Tensor::zeros(&[m, k]);
                for r in 0..m {
                    for c in 0..k {
                        let mut acc = 0.0;
                        for j in 0..n {
                            acc += grad.at2(r, j) * vb.at2(c, j);
                        }
                        da.set2(r, c, acc);
                    }
                }
                // dB = A^T x dC
                let mut db = Tensor::zeros(&[k, n]);
                for r in 0..k {
                    for c in 0..n {
                        let mut acc = 0.0;
                        for j in 0..m {
                            acc += va.at2(j, r) * grad.at2(j, c);
                        }
                        db.set2(r, c, acc);
                    }
                }
                self.accumulate(a, &da);
                self.accumulate(b, &db);
            }
            Op::MatMulNT(a, b) => {
                let (a, b) = (*a, *b);
                let va = self.nodes[a.0].value.clone();
                let vb = self.nodes[b.0].value.clone();
                let (m, k) = va.dims2();
                let (n, _) = vb.dims2();
                // C = A x B^T: dA = dC x B, dB = dC^T x A
                let mut da = Tensor::zeros(&[m, k]);
                for r in 0..m {
                    for c in 0..k {
                        let mut acc = 0.0;
                        for j in 0..n {
                            acc += grad.at2(r, j) * vb.at2(j, c);
                        }
                        da.set2(r, c, acc);
                    }
                }
                let mut db = Tensor::zeros(&[n, k]);
                for r in 0..n {
                    for c in 0..k {
                        let mut acc = 0.0;
                        for j in 0..m {
                            acc += grad.at2(j, r) * va.at2(j, c);
                        }
                        db.set2(r, c, acc);
                    }
                }
                self.accumulate(a, &da);
                self.accumulate(b, &db);
            }
            Op::Gelu(a) => {
                let a = *a;
                let va = &self.nodes[a.0].value;
                let data = va
                    .data()
                    .iter()
                    .zip(grad.data())
                    .map(|(&x, &g)| g * gelu_derivative(x))
                    .collect();
                let d = Tensor::new(va.shape().to_vec(), data).unwrap();
                self.accumulate(a, &d);
            }
            Op::MaskedSoftmaxRows { x, mask } => {
                let x = *x;
                let mask = Rc::clone(mask);
                let y = self.nodes[i].value.clone();
                let (m, n) = y.dims2();
                let mut dx = Tensor::zeros(&[m, n]);
                for r in 0..m {
                    let mut dot = 0.0;
                    for c in 0..n {
                        if mask[r * n + c] {
                            dot += grad.at2(r, c) * y.at2(r, c);
                        }
                    }
                    for c in 0..n {
                        if mask[r * n + c] {
                            dx.set2(r, c, y.at2(r, c) * (grad.at2(r, c) - dot));
                        }
                    }
                }
                self.accumulate(x, &dx);
            }
            Op::LayerNorm { x, gain, bias, eps } => {
                let (x, gain, bias, eps) = (*x, *gain, *bias, *eps);
                let vx = self.nodes[x.0].value.clone();
                let vg = self.nodes[gain.0].value.clone();
                let width = *vx.shape().last().unwrap();
                let rows = vx.len() / width;
                let mut dx = Tensor::zeros(vx.shape());
                let mut dgain = Tensor::zeros(&[width]);
                let mut dbias = Tensor::zeros(&[width]);
                for r in 0..rows {
                    let xr = &vx.data()[r * width..(r + 1) * width];
                    let gr = &grad.data()[r * width..(r + 1) * width];
                    let mean = xr.iter().sum::<f64>() / width as f64;
                    let var = xr.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / width as f64;
                    let inv = 1.0 / (var + eps).sqrt();
                    let xhat: Vec<f64> = xr.iter().map(|v| (v - mean) * inv).collect();
                    for c in 0..width {
                        dgain.data_mut()[c] += gr[c] * xhat[c];
                        dbias.data_mut()[c] += gr[c];
                    }
                    let dxhat: Vec<f64> = (0..width).map(|c| gr[c] * vg.data()[c]).collect();
                    let mean_dxhat = dxhat.iter().sum::<f64>() / width as f64;
                    let mean_dxhat_xhat = dxhat
                        .iter()
                        .zip(&xhat)
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                        / width as f64;
                    for c in 0..width {
                        dx.data_mut()[r * width + c] =
                            inv * (dxhat[c] - mean_dxhat - xhat[c] * mean_dxhat_xhat);
                    }
                }
                self.accumulate(x, &dx);
                self.accumulate(gain, &dgain);
                self.accumulate(bias, &dbias);
            }
            Op::Gather { table, ids } => {
                let table = *table;
                let ids = Rc::clone(ids);
                let (rows, width) = self.nodes[table.0].value.dims2();
                let mut dt = Tensor::zeros(&[rows, width]);
                for (r, &id) in ids.iter().enumerate() {
                    for c in 0..width {
                        let v = dt.at2(id, c) + grad.at2(r, c);
                        dt.set2(id, c, v);
                    }
                }
                self.accumulate(table, &dt);
            }
            Op::SliceRows { x, start, len } => {
                let (x, start, len) = (*x, *start, *len);
                let (m, n) = self.nodes[x.0].value.dims2();
                let mut dx = Tensor::zeros(&[m, n]);
                for r in 0..len {
                    for c in 0..n {
                        dx.set2(start + r, c, grad.at2(r, c));
                    }
                }
                self.accumulate(x, &dx);
            }
            Op::SliceCols { x, start, len } => {
                let (x, start, len) = (*x, *start, *len);
                let (m, n) = self.nodes[x.0].value.dims2();
                let mut dx = Tensor::zeros(&[m, n]);
                for r in 0..m {
                    for c in 0..len {
                        dx.set2(r, start + c, grad.at2(r, c));
                    }
                }
                self.accumulate(x, &dx);
            }
            Op::ConcatCols(parts) => {
                let parts = parts.clone();
                let mut offset = 0;
                for p in parts {
                    let (m, pn) = self.nodes[p.0].value.dims2();
                    let mut dp = Tensor::zeros(&[m, pn]);
                    for r in 0..m {
                        for c in 0..pn {
                            dp.set2(r, c, grad.at2(r, offset + c));
                        }
                    }
                    self.accumulate(p, &dp);
                    offset += pn;
                }
            }
            Op::CrossEntropyRows { logits, targets } => {
                let logits = *logits;
                let targets = Rc::clone(targets);
                let v = self.nodes[logits.0].value.clone();
                let (m, n) = v.dims2();
                let g = grad.item() / m as f64;
                let mut dl = Tensor::zeros(&[m, n]);
                for (r, &t) in targets.iter().enumerate() {
                    let row = &v.data()[r * n..(r + 1) * n];
                    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let sum: f64 = row.iter().map(|x| (x - max).exp()).sum();
                    for c in 0..n {
                        let p = (row[c] - max).exp() / sum;
                        let onehot = if c == t { 1.0 } else { 0.0 };
                        dl.set2(r, c, g * (p - onehot));
                    }
                }
                self.accumulate(logits, &dl);
            }
        }
        self.nodes[i].op = op;
    }
}

fn matmul_values(a: &Tensor, b: &Tensor, m: usize, k: usize, n: usize) -> Tensor {
    let mut out = Tensor::zeros(&[m, n]);
    for r in 0..m {
        for i in 0..k {
            let av = a.data()[r * k + i];
            if av == 0.0 {
                continue;
            }
            for c in 0..n {
                out.data_mut()[r * n + c] += av * b.data()[i * n + c];
            }
        }
    }
    out
}

fn elementwise_mul(a: &Tensor, b: &Tensor) -> Tensor {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect();
    Tensor::new(a.shape().to_vec(), data).unwrap()
}

const GELU_COEFF: f64 = 0.044715;

fn sqrt_2_over_pi() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt()
}

/// Smooth tanh-form GELU; smoothness keeps central-difference gradient
/// checks well conditioned.
fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (sqrt_2_over_pi() * (x + GELU_COEFF * x.powi(3))).tanh())
}

fn gelu_derivative(x: f64) -> f64 {
    let u = sqrt_2_over_pi() * (x + GELU_COEFF * x.powi(3));
    let t = u.tanh();
    let sech2 = 1.0 - t * t;
    0.5 * (1.0 + t) + 0.5 * x * sech2 * sqrt_2_over_pi() * (1.0 + 3.0 * GELU_COEFF * x * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_gradient_is_all_ones() {
        let mut g = Graph::new();
        let theta = g.leaf(Tensor::new(vec![4], vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let loss = g.sum(theta);
        g.backward(loss).unwrap();
        assert_eq!(g.grad(theta).data(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn dot_with_self_gradient_is_two_theta() {
        let mut g = Graph::new();
        let theta = g.leaf(Tensor::new(vec![3], vec![1.0, -2.0, 0.5]).unwrap());
        let sq = g.mul(theta, theta);
        let loss = g.sum(sq);
        g.backward(loss).unwrap();
        assert_eq!(g.grad(theta).data(), &[2.0, -4.0, 1.0]);
    }

    #[test]
    fn backward_twice_errors() {
        let mut g = Graph::new();
        let theta = g.leaf(Tensor::scalar(2.0));
        let loss = g.sum(theta);
        g.backward(loss).unwrap();
        assert!(matches!(
            g.backward(loss),
            Err(NumericsError::BackwardAlreadyRun)
        ));
    }

    #[test]
    fn masked_softmax_ignores_disallowed_columns() {
        let mut g = Graph::new();
        let x = g.leaf(Tensor::new(vec![1, 3], vec![1.0, 100.0, 2.0]).unwrap());
        let mask = Rc::new(vec![true, false, true]);
        let y = g.masked_softmax_rows(x, mask);
        let v = g.value(y);
        assert_eq!(v.at2(0, 1), 0.0);
        assert!((v.at2(0, 0) + v.at2(0, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matmul_agrees_with_matmul_nt() {
        let mut g = Graph::new();
        let a = g.leaf(Tensor::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]));
        let b = g.leaf(Tensor::from_rows(&[vec![5.0, 6.0], vec![7.0, 8.0]]));
        let bt = g.leaf(Tensor::from_rows(&[vec![5.0, 7.0], vec![6.0, 8.0]]));
        let c1 = g.matmul(a, b);
        let c2 = g.matmul_nt(a, bt);
        assert_eq!(g.value(c1).data(), g.value(c2).data());
    }

    #[test]
    fn gather_backward_scatters() {
        let mut g = Graph::new();
        let table = g.leaf(Tensor::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]));
        let rows = g.gather(table, Rc::new(vec![1, 1, 0]));
        let loss = g.sum(rows);
        g.backward(loss).unwrap();
        let grad = g.grad(table);
        assert_eq!(grad.row(0), &[1.0, 1.0]);
        assert_eq!(grad.row(1), &[2.0, 2.0]);
    }

    #[test]
    fn cross_entropy_rows_matches_scalar_version() {
        let mut g = Graph::new();
        let logits = g.leaf(Tensor::from_rows(&[vec![0.3, -0.4, 1.2]]));
        let loss = g.cross_entropy_rows(logits, Rc::new(vec![2]));
        let expected = super::super::tensor::cross_entropy(
            &Tensor::new(vec![3], vec![0.3, -0.4, 1.2]).unwrap(),
            2,
        )
        .unwrap();
        assert!((g.value(loss).item() - expected).abs() < 1e-12);
    }
}
