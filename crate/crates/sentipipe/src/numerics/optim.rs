//! Named parameters and the AdamW optimizer with decoupled weight decay.

use std::collections::HashMap;

use super::{NumericsError, Tensor};

/// A named value/gradient pair; the two tensors always share a shape.
#[derive(Debug, Clone)]
pub struct Parameter {
    pub name: String,
    pub value: Tensor,
    pub grad: Tensor,
}

impl Parameter {
    pub fn new(name: impl Into<String>, value: Tensor) -> Parameter {
        let grad = Tensor::zeros(value.shape());
        Parameter {
            name: name.into(),
            value,
            grad,
        }
    }
}

/// Ordered collection of parameters with name lookup. Order is the
/// checkpoint and optimizer-state order.
#[derive(Debug, Clone, Default)]
pub struct ParamSet {
    params: Vec<Parameter>,
    index: HashMap<String, usize>,
}

impl ParamSet {
    pub fn new() -> ParamSet {
        ParamSet::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor) {
        let name = name.into();
        assert!(
            !self.index.contains_key(&name),
            "duplicate parameter `{name}`"
        );
        self.index.insert(name.clone(), self.params.len());
        self.params.push(Parameter::new(name, value));
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn total_values(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    pub fn get(&self, name: &str) -> &Parameter {
        &self.params[*self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter `{name}`"))]
    }

    pub fn get_mut(&mut self, name: &str) -> &mut Parameter {
        let i = *self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter `{name}`"));
        &mut self.params[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Parameter> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Parameter> {
        self.params.iter_mut()
    }

    pub fn zero_grads(&mut self) {
        for p in &mut self.params {
            p.grad.fill(0.0);
        }
    }
}

/// AdamW hyperparameters and per-parameter moment estimates.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
    pub step: u64,
    first_moment: Vec<Tensor>,
    second_moment: Vec<Tensor>,
}

impl OptimizerState {
    /// Moments are allocated to match `params`; the learning rate default
    /// is the tuned training value 2e-4.
    pub fn new(params: &ParamSet, lr: f64, weight_decay: f64) -> OptimizerState {
        OptimizerState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay,
            step: 0,
            first_moment: params.iter().map(|p| Tensor::zeros(p.value.shape())).collect(),
            second_moment: params.iter().map(|p| Tensor::zeros(p.value.shape())).collect(),
        }
    }
}

/// One AdamW update: bias-corrected moments plus decoupled decay,
/// `theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta)`.
pub fn adamw_step(params: &mut ParamSet, state: &mut OptimizerState) -> Result<(), NumericsError> {
    if state.first_moment.len() != params.len() {
        return Err(NumericsError::ShapeMismatch(
            "optimizer state does not match parameter set".to_string(),
        ));
    }
    state.step += 1;
    let bc1 = 1.0 - state.beta1.powi(state.step as i32);
    let bc2 = 1.0 - state.beta2.powi(state.step as i32);
    for (i, p) in params.iter_mut().enumerate() {
        let m = state.first_moment[i].data_mut();
        let v = state.second_moment[i].data_mut();
        let g = p.grad.data();
        let theta = p.value.data_mut();
        for j in 0..theta.len() {
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
            let m_hat = m[j] / bc1;
            let v_hat = v[j] / bc2;
            theta[j] -=
                state.lr * (m_hat / (v_hat.sqrt() + state.epsilon) + state.weight_decay * theta[j]);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_param(v: f64) -> ParamSet {
        let mut params = ParamSet::new();
        params.add("theta", Tensor::scalar(v));
        params
    }

    #[test]
    fn zero_gradient_zero_decay_leaves_theta() {
        let mut params = single_param(1.5);
        let mut state = OptimizerState::new(&params, 2e-4, 0.0);
        adamw_step(&mut params, &mut state).unwrap();
        assert_eq!(params.get("theta").value.item(), 1.5);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn zero_gradient_with_decay_shrinks_theta() {
        let mut params = single_param(1.0);
        let mut state = OptimizerState::new(&params, 2e-4, 0.01);
        adamw_step(&mut params, &mut state).unwrap();
        let expected = 1.0 - 2e-4 * 0.01;
        assert!((params.get("theta").value.item() - expected).abs() < 1e-15);
    }

    #[test]
    fn single_step_matches_hand_arithmetic() {
        // theta=1, g=1, defaults: m=0.1, v=1e-3, m_hat=1, v_hat=1,
        // update = lr * (1/(1+eps) + wd*1)
        let mut params = single_param(1.0);
        params.get_mut("theta").grad = Tensor::scalar(1.0);
        let mut state = OptimizerState::new(&params, 2e-4, 0.01);
        adamw_step(&mut params, &mut state).unwrap();
        let m_hat = (0.1f64) / (1.0 - 0.9);
        let v_hat = (0.001f64) / (1.0 - 0.999);
        let expected = 1.0 - 2e-4 * (m_hat / (v_hat.sqrt() + 1e-8) + 0.01 * 1.0);
        assert!((params.get("theta").value.item() - expected).abs() < 1e-15);
    }

    #[test]
    fn steps_are_bit_deterministic() {
        let run = || {
            let mut params = single_param(0.3);
            let mut state = OptimizerState::new(&params, 1e-2, 0.05);
            for k in 0..20 {
                params.get_mut("theta").grad = Tensor::scalar(0.1 * (k as f64 - 10.0));
                adamw_step(&mut params, &mut state).unwrap();
            }
            params.get("theta").value.item()
        };
        assert_eq!(run().to_bits(), run().to_bits());
    }
}
