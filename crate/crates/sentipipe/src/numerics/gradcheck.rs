//! Central finite-difference verification of analytic gradients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{NumericsError, ParamSet};

/// Outcome of a finite-difference sweep.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub worst_param: String,
    pub worst_index: usize,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    pub coords_checked: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Per-coordinate cap: parameters at or below it are checked exhaustively,
/// larger ones on a seeded sample of this many coordinates.
pub const DEFAULT_SAMPLE_CUTOFF: usize = 4096;

const REL_ERR_FLOOR: f64 = 1e-3;

/// Compares the parameter gradients already stored in `params` (the caller
/// runs forward + backward first) against central differences
/// `(f(theta+h) - f(theta-h)) / 2h` of `loss_fn`. Parameters are restored
/// exactly afterwards.
pub fn check_gradients(
    params: &mut ParamSet,
    mut loss_fn: impl FnMut(&ParamSet) -> f64,
    h: f64,
    tolerance: f64,
    sample_per_param: Option<usize>,
    seed: u64,
) -> Result<GradCheckReport, NumericsError> {
    let analytic: Vec<(String, Vec<f64>)> = params
        .iter()
        .map(|p| (p.name.clone(), p.grad.data().to_vec()))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        worst_param: String::new(),
        worst_index: 0,
        worst_analytic: 0.0,
        worst_numeric: 0.0,
        coords_checked: 0,
        tolerance,
        pass: true,
    };

    for (pi, (name, grads)) in analytic.iter().enumerate() {
        let len = grads.len();
        let coords: Vec<usize> = match sample_per_param {
            Some(k) if len > k => {
                let mut all: Vec<usize> = (0..len).collect();
                all.shuffle(&mut rng);
                all.truncate(k);
                all.sort_unstable();
                all
            }
            _ => (0..len).collect(),
        };
        for &j in &coords {
            let original = nth_value(params, pi, j);
            set_nth_value(params, pi, j, original + h);
            let f_plus = loss_fn(params);
            set_nth_value(params, pi, j, original - h);
            let f_minus = loss_fn(params);
            set_nth_value(params, pi, j, original);
            if !f_plus.is_finite() || !f_minus.is_finite() {
                return Err(NumericsError::NonFinite(format!(
                    "loss non-finite while perturbing {name}[{j}]"
                )));
            }
            let numeric = (f_plus - f_minus) / (2.0 * h);
            let a = grads[j];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_ERR_FLOOR);
            report.coords_checked += 1;
            if rel > report.max_rel_err {
                report.max_rel_err = rel;
                report.worst_param = name.clone();
                report.worst_index = j;
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    report.pass = report.max_rel_err <= tolerance;
    Ok(report)
}

fn nth_value(params: &ParamSet, pi: usize, j: usize) -> f64 {
    params.iter().nth(pi).unwrap().value.data()[j]
}

fn set_nth_value(params: &mut ParamSet, pi: usize, j: usize, v: f64) {
    params.iter_mut().nth(pi).unwrap().value.data_mut()[j] = v;
}
