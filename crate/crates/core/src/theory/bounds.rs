//! Closed-form entropy bounds. All logarithms are natural.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

fn check_unit(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        invalid(format!("{name} must lie in [0, 1], got {p}"))
    }
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// h_b(p) = −p ln p − (1−p) ln(1−p), with h_b(0) = h_b(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(-xlnx(p) - xlnx(1.0 - p))
}

/// h_b(ε) + ε ln(|Y| − 1).
pub fn fano_bound(eps: f64, num_classes: usize) -> Result<f64> {
    if num_classes < 2 {
        return invalid(format!("need at least 2 classes, got {num_classes}"));
    }
    Ok(binary_entropy(eps)? + eps * ((num_classes - 1) as f64).ln())
}

/// The reverse Fano bound e_RF(z). With m = ⌊1/(1−z)⌋:
/// (1 − (1−z)m)(1+m) ln(1+m) − (z − (1−z)m) m ln m.
pub fn reverse_fano(z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return invalid(format!("z must lie in [0, 1), got {z}"));
    }
    Ok(reverse_fano_unchecked(z))
}

fn reverse_fano_unchecked(z: f64) -> f64 {
    let m = (1.0 / (1.0 - z)).floor();
    (1.0 - (1.0 - z) * m) * (1.0 + m) * (1.0 + m).ln() - (z - (1.0 - z) * m) * m * m.ln()
}

/// Upper end of the e_max search domain.
pub const E_MAX_UPPER: f64 = 1.0 - 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EMax {
    pub value: f64,
    /// The target exceeds e_RF on the whole search domain; `value` is the
    /// domain's upper end.
    pub saturated: bool,
}

/// The largest z in (0, 1) with e_RF(z) ≤ h_b(x) + x ln(|Y|−1) + y.
pub fn e_max(x: f64, y: f64, num_classes: usize) -> Result<EMax> {
    check_unit("x", x)?;
    if !y.is_finite() {
        return invalid(format!("y must be finite, got {y}"));
    }
    let target = fano_bound(x, num_classes)? + y;
    Ok(invert_reverse_fano(target))
}

/// The largest z in [0, 1−1e−12] with e_RF(z) ≤ target.
pub fn invert_reverse_fano(target: f64) -> EMax {
    if target <= 0.0 {
        return EMax { value: 0.0, saturated: false };
    }
    if reverse_fano_unchecked(E_MAX_UPPER) <= target {
        return EMax { value: E_MAX_UPPER, saturated: true };
    }
    // e_RF is continuous and strictly increasing, so plain bisection works.
    let (mut lo, mut hi) = (0.0f64, E_MAX_UPPER);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reverse_fano_unchecked(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    EMax { value: lo, saturated: false }
}

/// κ′ ≤ ζ + h_b(ε) + ε ln(|Y|−1).
pub fn theorem1_kappa(zeta: f64, eps: f64, num_classes: usize) -> Result<f64> {
    check_unit("zeta", zeta)?;
    Ok(zeta + fano_bound(eps, num_classes)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem1Terms {
    pub e_max: f64,
    pub xi: f64,
    pub tau: f64,
    pub eta: f64,
    /// Whether δ lies in (0, 9ε* − e_max(ε*, κ)).
    pub hypotheses_hold: bool,
}

/// ξ = δ + e_max(ε*, κ) − ε*, τ = (2√2 ε* + √ξ)²/2 and η = h_b(τ) + τ,
/// evaluated whether or not δ is in the admissible range.
pub fn theorem1_terms(eps_star: f64, kappa: f64, delta: f64, num_classes: usize) -> Result<Theorem1Terms> {
    check_unit("eps_star", eps_star)?;
    check_unit("kappa", kappa)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return invalid(format!("delta must be non-negative, got {delta}"));
    }
    let em = e_max(eps_star, kappa, num_classes)?.value;
    let xi = delta + em - eps_star;
    if xi < 0.0 {
        return Err(Error::Domain(format!("xi = {xi} is negative")));
    }
    let tau = (2.0 * 2f64.sqrt() * eps_star + xi.sqrt()).powi(2) / 2.0;
    if tau > 1.0 {
        return Err(Error::Domain(format!("tau = {tau} exceeds 1")));
    }
    let eta = binary_entropy(tau)? + tau;
    let hypotheses_hold = delta > 0.0 && delta < 9.0 * eps_star - em;
    Ok(Theorem1Terms { e_max: em, xi, tau, eta, hypotheses_hold })
}

/// η for a δ in the theorem's range; out-of-range δ is a domain error.
pub fn theorem1_eta(eps_star: f64, kappa: f64, delta: f64, num_classes: usize) -> Result<Theorem1Terms> {
    let t = theorem1_terms(eps_star, kappa, delta, num_classes)?;
    if !t.hypotheses_hold {
        return Err(Error::Domain(format!(
            "delta = {delta} is outside (0, 9·eps* − e_max) = (0, {})",
            9.0 * eps_star - t.e_max
        )));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.1).unwrap(), binary_entropy(0.9).unwrap());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn fano_values() {
        assert_eq!(fano_bound(0.0, 5).unwrap(), 0.0);
        assert_eq!(fano_bound(0.3, 2).unwrap(), binary_entropy(0.3).unwrap());
        let want = -(0.1f64 * 0.1f64.ln()) - 0.9 * 0.9f64.ln() + 0.1 * 3f64.ln();
        assert!((fano_bound(0.1, 4).unwrap() - want).abs() < 1e-15);
        assert!(fano_bound(0.1, 1).is_err());
    }

    #[test]
    fn reverse_fano_values() {
        assert_eq!(reverse_fano(0.0).unwrap(), 0.0);
        assert!((reverse_fano(0.5).unwrap() - LN_2).abs() < 1e-12);
        assert!(reverse_fano(0.3).unwrap() <= reverse_fano(0.6).unwrap());
        // Below one half the formula is 2z ln 2.
        assert!((reverse_fano(0.2).unwrap() - 0.4 * LN_2).abs() < 1e-15);
        assert!(reverse_fano(1.0).is_err());
    }

    #[test]
    fn e_max_values() {
        assert_eq!(e_max(0.0, 0.0, 2).unwrap().value, 0.0);
        let r = invert_reverse_fano(LN_2);
        assert!((r.value - 0.5).abs() < 1e-9);
        assert!(invert_reverse_fano(1e6).saturated);
        let sat = invert_reverse_fano(1e6);
        assert_eq!(sat.value, E_MAX_UPPER);
    }

    #[test]
    fn kappa_values() {
        assert_eq!(theorem1_kappa(0.0, 0.0, 2).unwrap(), 0.0);
        assert_eq!(theorem1_kappa(0.1, 0.0, 2).unwrap(), 0.1);
        assert_eq!(theorem1_kappa(0.0, 0.05, 2).unwrap(), binary_entropy(0.05).unwrap());
    }

    #[test]
    fn theorem1_second_path() {
        // An admissible triple: tiny κ keeps e_max below 9ε*.
        let (es, k, d) = (0.05, 0.0, 0.01);
        let t = theorem1_eta(es, k, d, 2).unwrap();
        assert!(t.hypotheses_hold);
        // Independent evaluation: e_max for |Y| = 2 at target h_b(ε*) + κ.
        let target = -(es * f64::ln(es)) - (1.0 - es) * f64::ln(1.0 - es) + k;
        // For targets below ln 2, e_RF(z) = 2 z ln 2.
        assert!(target < LN_2);
        let em = target / (2.0 * LN_2);
        let xi = d + em - es;
        let tau = (2.0 * 2f64.sqrt() * es + xi.sqrt()).powi(2) / 2.0;
        let eta = -(tau * tau.ln()) - (1.0 - tau) * (1.0 - tau).ln() + tau;
        assert!((t.e_max - em).abs() < 1e-12);
        assert!((t.xi - xi).abs() < 1e-12);
        assert!((t.tau - tau).abs() < 1e-12);
        assert!((t.eta - eta).abs() < 1e-12);
        assert_eq!(t.xi, d + t.e_max - es);
    }

    #[test]
    fn theorem1_range_is_enforced() {
        // At 1e−5 the admissible δ interval is already empty.
        let err = theorem1_eta(1e-5, 1e-5, 1e-5, 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let t = theorem1_terms(1e-5, 1e-5, 1e-5, 2).unwrap();
        assert!(!t.hypotheses_hold);
        assert!(theorem1_eta(1e-3, 1e-3, 1e-3, 2).unwrap().hypotheses_hold);
        assert!(matches!(theorem1_eta(0.05, 0.0, 0.0, 2), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn reverse_fano_is_monotone(a in 0.0f64..0.999, b in 0.0f64..0.999) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(reverse_fano(lo).unwrap() <= reverse_fano(hi).unwrap() + 1e-12);
        }

        #[test]
        fn e_max_inverts(target in 0.0f64..10.0) {
            let r = invert_reverse_fano(target);
            prop_assert!(!r.saturated);
            let v = reverse_fano(r.value).unwrap();
            prop_assert!(v <= target);
            prop_assert!((v - target).abs() <= 1e-9);
            prop_assert!(reverse_fano(r.value + 1e-9).unwrap() > target);
        }

        #[test]
        fn e_max_grows_with_y(x in 0.0f64..=1.0, y1 in 0.0f64..2.0, y2 in 0.0f64..2.0) {
            let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
            prop_assert!(e_max(x, lo, 3).unwrap().value <= e_max(x, hi, 3).unwrap().value);
        }

        #[test]
        fn bounds_are_monotone(z1 in 0.0f64..=1.0, z2 in 0.0f64..=1.0, e in 0.0f64..=0.5, k in 2usize..6) {
            let (lo, hi) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
            prop_assert!(theorem1_kappa(lo, e, k).unwrap() <= theorem1_kappa(hi, e, k).unwrap());
            let (a, b) = (lo * 0.5, hi * 0.5);
            prop_assert!(fano_bound(a, k).unwrap() <= fano_bound(b, k).unwrap() + 1e-15);
            prop_assert!(binary_entropy(lo).unwrap() <= LN_2 + 1e-15);
        }
    }
}
