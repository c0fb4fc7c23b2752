//! Dense row-major f64 tensor. Deliberately minimal: just what the model,
//! optimizer, and checkpoint code need.

use rand::Rng;

use super::NumericsError;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Tensor, NumericsError> {
        let expected: usize = shape.iter().product();
        if shape.iter().any(|&d| d == 0) || data.len() != expected {
            return Err(NumericsError::ShapeMismatch(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Tensor {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn scalar(v: f64) -> Tensor {
        Tensor {
            shape: vec![1],
            data: vec![v],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Tensor {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Tensor {
            shape: vec![r, c],
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Seeded uniform init on (-scale, scale); the model uses
    /// `scale = 1/sqrt(fan_in)`.
    pub fn uniform(shape: &[usize], scale: f64, rng: &mut impl Rng) -> Tensor {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: (0..len).map(|_| rng.gen_range(-scale..scale)).collect(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Row/column extents of a rank-2 tensor.
    pub fn dims2(&self) -> (usize, usize) {
        assert_eq!(self.rank(), 2, "expected rank-2 tensor, got {:?}", self.shape);
        (self.shape[0], self.shape[1])
    }

    pub fn at2(&self, r: usize, c: usize) -> f64 {
        let (_, cols) = self.dims2();
        self.data[r * cols + c]
    }

    pub fn set2(&mut self, r: usize, c: usize, v: f64) {
        let (_, cols) = self.dims2();
        self.data[r * cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let (_, cols) = self.dims2();
        &self.data[r * cols..(r + 1) * cols]
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn item(&self) -> f64 {
        assert_eq!(self.len(), 1, "item() on non-scalar tensor");
        self.data[0]
    }
}

/// Numerically stable softmax along `axis`; every lane sums to one.
pub fn softmax(x: &Tensor, axis: usize) -> Result<Tensor, NumericsError> {
    if axis >= x.rank() {
        return Err(NumericsError::EmptyAxis(format!(
            "axis {axis} out of range for shape {:?}",
            x.shape()
        )));
    }
    let extent = x.shape()[axis];
    if extent == 0 {
        return Err(NumericsError::EmptyAxis(format!(
            "axis {axis} has zero extent"
        )));
    }
    let inner: usize = x.shape()[axis + 1..].iter().product();
    let outer: usize = x.shape()[..axis].iter().product();
    let mut out = x.clone();
    for o in 0..outer {
        for i in 0..inner {
            let base = o * extent * inner + i;
            let idx = |k: usize| base + k * inner;
            let max = (0..extent)
                .map(|k| x.data[idx(k)])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for k in 0..extent {
                let e = (x.data[idx(k)] - max).exp();
                out.data[idx(k)] = e;
                sum += e;
            }
            for k in 0..extent {
                out.data[idx(k)] /= sum;
            }
        }
    }
    Ok(out)
}

/// Normalizes each row of the last axis to mean 0 / variance 1, then applies
/// the gain and bias.
pub fn layer_norm(
    x: &Tensor,
    gain: &Tensor,
    bias: &Tensor,
    eps: f64,
) -> Result<Tensor, NumericsError> {
    let width = *x.shape().last().expect("non-empty shape");
    if gain.len() != width || bias.len() != width {
        return Err(NumericsError::ShapeMismatch(format!(
            "layer_norm gain/bias must have extent {width}"
        )));
    }
    let mut out = x.clone();
    for row in out.data.chunks_mut(width) {
        let mean = row.iter().sum::<f64>() / width as f64;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / width as f64;
        let inv = 1.0 / (var + eps).sqrt();
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - mean) * inv * gain.data[j] + bias.data[j];
        }
    }
    Ok(out)
}

/// `-log softmax(logits)[target]` for a rank-1 logits vector.
pub fn cross_entropy(logits: &Tensor, target: usize) -> Result<f64, NumericsError> {
    if target >= logits.len() {
        return Err(NumericsError::ShapeMismatch(format!(
            "target {target} out of range for {} logits",
            logits.len()
        )));
    }
    let max = logits.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.data.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    Ok(lse - logits.data[target])
}
