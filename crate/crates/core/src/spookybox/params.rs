use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a `SB(m, b, V, e, ℓ, M)` game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxGameConfig {
    /// Maker claims per round.
    pub m: u32,
    /// Breaker claims per round.
    pub b: u32,
    /// `|V|`.
    pub vertex_count: u32,
    /// Number of boxes, empty ones included.
    pub e: u32,
    /// Maximum box size.
    #[serde(rename = "M")]
    pub max_box: u32,
    /// Fair-share slack.
    pub ell: f64,
    #[serde(default)]
    pub strict_preconditions: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub lambda: f64,
    pub tau: f64,
    /// Smallest slack for which the potential strategy is guaranteed to win.
    pub ell_min: f64,
    /// `M ≥ 9(m+b)·ln e` and `ℓ ≥ ell_min`.
    pub preconditions_ok: bool,
    pub box_size_ok: bool,
    pub slack_ok: bool,
    /// `ln e = 0` (a single box): every effect vanishes.
    pub degenerate: bool,
    /// `λ` was capped at `1/(3m)` because the box-size condition fails.
    pub lambda_capped: bool,
}

/// Computes `λ`, `τ` and the slack threshold for `cfg`.
///
/// `λ = √((m+b)·ln e / M) / m` and `τ` solves `(1+τ)^b = 1 + mλ`. When the
/// box-size condition fails `λ` would exceed `1/(3m)` (possibly `1`); it is
/// capped there so the strategy stays defined.
pub fn derive_parameters(cfg: &BoxGameConfig) -> Result<Parameters> {
    if cfg.m == 0 || cfg.e == 0 || cfg.max_box == 0 {
        return Err(Error::Config(format!(
            "m, e and M must be positive (m = {}, e = {}, M = {})",
            cfg.m, cfg.e, cfg.max_box
        )));
    }
    if !cfg.ell.is_finite() || cfg.ell < 0.0 {
        return Err(Error::Config(format!("ell must be finite and >= 0, got {}", cfg.ell)));
    }
    let m = cfg.m as f64;
    let b = cfg.b as f64;
    let big_m = cfg.max_box as f64;
    let ln_e = (cfg.e as f64).ln();

    let raw_lambda = ((m + b) * ln_e / big_m).sqrt() / m;
    let cap = 1.0 / (3.0 * m);
    let lambda_capped = raw_lambda > cap;
    let lambda = raw_lambda.min(cap);
    let tau = if cfg.b == 0 {
        0.0
    } else {
        ((m * lambda).ln_1p() / b).exp_m1()
    };
    let ell_min = 5.0 * m * b / (m + b) * (big_m * ln_e / (m + b)).sqrt();
    let box_size_ok = big_m >= 9.0 * (m + b) * ln_e;
    let slack_ok = cfg.ell >= ell_min;
    let preconditions_ok = box_size_ok && slack_ok;
    if cfg.strict_preconditions && !preconditions_ok {
        return Err(Error::Config(format!(
            "potential strategy not guaranteed: need M >= {:.3} (have {}) and ell >= {:.3} (have {})",
            9.0 * (m + b) * ln_e,
            cfg.max_box,
            ell_min,
            cfg.ell
        )));
    }
    Ok(Parameters {
        lambda,
        tau,
        ell_min,
        preconditions_ok,
        box_size_ok,
        slack_ok,
        degenerate: ln_e == 0.0,
        lambda_capped,
    })
}

/// `ln Φ` of a box with `x_count` Maker and `y_count` Breaker vertices.
#[inline]
pub fn box_log_potential(x_count: u64, y_count: u64, lambda: f64, tau: f64) -> f64 {
    let mut acc = 0.0;
    if x_count > 0 {
        acc += x_count as f64 * (-lambda).ln_1p();
    }
    if y_count > 0 {
        acc += y_count as f64 * tau.ln_1p();
    }
    acc
}

/// `ln Σ exp(v)` with the maximum shifted out. Empty input gives `-∞`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: u32, b: u32, e: u32, big_m: u32, ell: f64) -> BoxGameConfig {
        BoxGameConfig {
            m,
            b,
            vertex_count: 1000,
            e,
            max_box: big_m,
            ell,
            strict_preconditions: false,
        }
    }

    #[test]
    fn reference_configuration() {
        let p = derive_parameters(&cfg(1, 2, 16, 512, 80.0)).unwrap();
        assert!((p.lambda - 0.127_456).abs() < 1e-5, "{}", p.lambda);
        assert!((p.tau - 0.061_817).abs() < 1e-5, "{}", p.tau);
        assert!((p.ell_min - 72.5).abs() < 0.05, "{}", p.ell_min);
        assert!(p.box_size_ok && p.slack_ok && p.preconditions_ok);
        let low = derive_parameters(&cfg(1, 2, 16, 512, 72.0)).unwrap();
        assert!(!low.preconditions_ok);
    }

    #[test]
    fn unit_bias_gives_tau_equal_lambda() {
        for (e, big_m) in [(4, 100), (64, 1000), (10, 37)] {
            let p = derive_parameters(&cfg(1, 1, e, big_m, 0.0)).unwrap();
            assert!((p.tau - p.lambda).abs() < 1e-15);
        }
    }

    #[test]
    fn defining_equation_holds() {
        for m in 1..4 {
            for b in 1..12 {
                for e in [2, 9, 64, 1000] {
                    let p = derive_parameters(&cfg(m, b, e, 5000, 0.0)).unwrap();
                    let lhs = (1.0 + p.tau).powi(b as i32);
                    let rhs = 1.0 + m as f64 * p.lambda;
                    assert!((lhs - rhs).abs() < 1e-12, "m={m} b={b} e={e}");
                }
            }
        }
    }

    #[test]
    fn degenerate_and_invalid_configs() {
        let p = derive_parameters(&cfg(1, 2, 1, 10, 0.0)).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.lambda, 0.0);
        assert_eq!(p.tau, 0.0);
        assert!(derive_parameters(&cfg(0, 2, 4, 10, 0.0)).is_err());
        assert!(derive_parameters(&cfg(1, 2, 4, 10, -1.0)).is_err());
        let mut strict = cfg(1, 2, 16, 512, 1.0);
        strict.strict_preconditions = true;
        assert!(matches!(derive_parameters(&strict), Err(Error::Config(_))));
    }

    #[test]
    fn lambda_is_capped_when_boxes_are_small() {
        let p = derive_parameters(&cfg(1, 80, 99, 99, 0.0)).unwrap();
        assert!(p.lambda_capped && !p.box_size_ok);
        assert!((p.lambda - 1.0 / 3.0).abs() < 1e-15);
        let lhs = (1.0 + p.tau).powi(80);
        assert!((lhs - (1.0 + p.lambda)).abs() < 1e-12);
    }

    #[test]
    fn zero_bias_has_no_breaker_weight() {
        let p = derive_parameters(&cfg(1, 0, 8, 100, 0.0)).unwrap();
        assert_eq!(p.tau, 0.0);
        assert_eq!(p.ell_min, 0.0);
    }

    #[test]
    fn log_potential_values() {
        assert_eq!(box_log_potential(0, 0, 0.3, 0.2), 0.0);
        let v = box_log_potential(1, 1, 0.5, 0.5);
        assert!((v - 0.75f64.ln()).abs() < 1e-15);
        // huge Breaker counts stay finite in log domain
        assert!(box_log_potential(0, 1_000_000, 0.1, 0.5).is_finite());
    }

    #[test]
    fn log_sum_exp_is_shift_stable() {
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        let big = log_sum_exp(&[1000.0, 1000.0]);
        assert!((big - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
