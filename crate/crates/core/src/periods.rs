//! Real periods of the curves `E_k: y² = (t²-1)(t²-k²)` and
//! `E_{1/k}: y² = (t²-1)(t²-1/k²)`.
//!
//! Every period is reduced to an integral over `[0, π/2]` or `[-π/2, π/2]`
//! by a trigonometric substitution that removes the square-root endpoint
//! singularities, then integrated adaptively.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::quad::integrate;

const TOL: f64 = 1e-13;

fn open_unit(k: EllipticModulus) -> Result<f64> {
    let v = k.value();
    if v <= 0.0 {
        return Err(Error::Domain { what: "k", value: v, domain: "(0, 1)" });
    }
    Ok(v)
}

fn gamma_raw(k: f64) -> f64 {
    // t = k sin θ
    let k2 = k * k;
    2.0 * integrate(|t: f64| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), -FRAC_PI_2, FRAC_PI_2, TOL, TOL).value
}

/// `∫_γ ω_k = 2 ∫_{-k}^{k} dt / √((1-t²)(k²-t²))`; equals `4K(k)`.
pub fn period_gamma(k: EllipticModulus) -> Result<f64> {
    Ok(gamma_raw(open_unit(k)?))
}

/// `∫_{γ'} ω_{1/k} = 2 ∫_{-1}^{1} dt / √((1-t²)(1/k²-t²))`.
pub fn period_gamma_inv(k: EllipticModulus) -> Result<f64> {
    let k = open_unit(k)?;
    let inv2 = 1.0 / (k * k);
    // t = sin θ
    Ok(2.0 * integrate(|t: f64| 1.0 / (inv2 - t.sin().powi(2)).sqrt(), -FRAC_PI_2, FRAC_PI_2, TOL, TOL).value)
}

/// `∫_δ ω_k = 2 ∫_k^1 dt / √((1-t²)(t²-k²))`, via `t² = k² + k'² sin²φ`.
pub fn period_delta(k: EllipticModulus) -> Result<f64> {
    let kv = open_unit(k)?;
    let (k2, kp2) = (kv * kv, (1.0 - kv) * (1.0 + kv));
    Ok(2.0 * integrate(|p: f64| 1.0 / (k2 + kp2 * p.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, TOL, TOL).value)
}

/// `∫_{δ'} ω_{1/k} = 2 ∫_1^{1/k} dt / √((t²-1)(1/k²-t²))`, via
/// `t² = 1 + (1/k² - 1) sin²φ`.
pub fn period_delta_inv(k: EllipticModulus) -> Result<f64> {
    let kv = open_unit(k)?;
    let ratio = (1.0 - kv) * (1.0 + kv) / (kv * kv);
    Ok(2.0 * integrate(|p: f64| 1.0 / (1.0 + ratio * p.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, TOL, TOL).value)
}

/// The four real periods of the pair `(E_k, E_{1/k})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticCurvePair {
    pub k: EllipticModulus,
    pub gamma_k: f64,
    pub gamma_inv: f64,
    pub delta_k: f64,
    pub delta_inv: f64,
}

impl EllipticCurvePair {
    pub fn compute(k: EllipticModulus) -> Result<Self> {
        Ok(EllipticCurvePair {
            k,
            gamma_k: period_gamma(k)?,
            gamma_inv: period_gamma_inv(k)?,
            delta_k: period_delta(k)?,
            delta_inv: period_delta_inv(k)?,
        })
    }

    pub fn tau_k(&self) -> f64 {
        self.delta_k / self.gamma_k
    }

    pub fn tau_inv(&self) -> f64 {
        self.delta_inv / self.gamma_inv
    }
}

/// Modular ratios `τ(E_k) = ∫_δ ω_k / ∫_γ ω_k` and `τ(E_{1/k})`.
pub fn tau_invariant(k: EllipticModulus) -> Result<(f64, f64)> {
    let pair = EllipticCurvePair::compute(k)?;
    Ok((pair.tau_k(), pair.tau_inv()))
}

/// Per-component density of states as a sum of half-periods,
/// `(∫_γ ω_k + ∫_{γ'} ω_{1/k}) / (8π² ab)` with `k = (4-|λ|)/(4+|λ|)`.
///
/// At `|λ| = 4` the modulus is 0, `E_{1/k}` degenerates and only
/// `∫_γ ω_0 = 2π` survives.
pub fn dos_from_half_periods(lambda: f64, a: u32, b: u32) -> Result<f64> {
    if a == 0 || b == 0 {
        return Err(Error::invalid("a and b must be positive"));
    }
    let k = EllipticModulus::from_energy(lambda)?;
    let volume = 8.0 * PI * PI * a as f64 * b as f64;
    if k.value() == 0.0 {
        return Ok(gamma_raw(0.0) / volume);
    }
    let pair = EllipticCurvePair::compute(k)?;
    Ok((pair.gamma_k + pair.gamma_inv) / volume)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::complete_k;

    fn m(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    fn log_grid(n: usize) -> impl Iterator<Item = f64> {
        let (lo, hi) = (0.01f64.ln(), 0.99f64.ln());
        (0..n).map(move |i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
    }

    #[test]
    fn gamma_half() {
        let g = period_gamma(m(0.5)).unwrap();
        assert!((g - 6.743_001_419_250_384).abs() < 1e-8);
    }

    #[test]
    fn gamma_is_four_k() {
        for k in log_grid(20) {
            let g = period_gamma(m(k)).unwrap();
            assert!((g - 4.0 * complete_k(m(k)).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn gamma_near_one_diverges() {
        assert!(period_gamma(m(0.999_999)).unwrap() > 28.0);
    }

    #[test]
    fn isomorphism_scaling() {
        for k in log_grid(20).chain([0.1, 0.5, 0.9]) {
            let p = EllipticCurvePair::compute(m(k)).unwrap();
            assert!(p.gamma_k > 0.0 && p.gamma_inv > 0.0 && p.delta_k > 0.0 && p.delta_inv > 0.0);
            assert!((p.gamma_inv / p.gamma_k - k).abs() < 1e-8 * k);
            assert!((p.delta_inv / p.delta_k - k).abs() < 1e-8 * k);
            assert!((p.tau_k() - p.tau_inv()).abs() < 1e-8);
        }
    }

    #[test]
    fn delta_is_twice_complementary_k() {
        for k in [0.1, 0.5, 0.9] {
            let kp = m(k).complement();
            let d = period_delta(m(k)).unwrap();
            assert!((d - 2.0 * complete_k(m(kp)).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn half_period_identity() {
        for k in log_grid(20) {
            let p = EllipticCurvePair::compute(m(k)).unwrap();
            let lhs = (p.gamma_k + p.gamma_inv) / (8.0 * PI * PI);
            let rhs = (1.0 + k) * complete_k(m(k)).unwrap() / (2.0 * PI * PI);
            assert!((lhs - rhs).abs() < 1e-8 * rhs);
        }
    }

    #[test]
    fn dos_examples() {
        let edge = dos_from_half_periods(4.0, 1, 1).unwrap();
        assert!((edge - 1.0 / (4.0 * PI)).abs() < 1e-14);
        let k = 1.0 / 3.0;
        let want = (1.0 + k) * complete_k(m(k)).unwrap() / (2.0 * PI * PI * 15.0);
        let got = dos_from_half_periods(2.0, 3, 5).unwrap();
        assert!((got - want).abs() < 1e-8 * want);
        assert_eq!(dos_from_half_periods(0.0, 3, 5), Err(Error::VanHoveDivergence));
        assert!(matches!(dos_from_half_periods(4.1, 3, 5), Err(Error::OutOfBand(_))));
        assert_eq!(dos_from_half_periods(-1.3, 3, 5).unwrap(), dos_from_half_periods(1.3, 3, 5).unwrap());
    }

    #[test]
    fn domain() {
        assert!(period_gamma(m(0.0)).is_err());
        assert!(tau_invariant(m(0.0)).is_err());
    }
}
