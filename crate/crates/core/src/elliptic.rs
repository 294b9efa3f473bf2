//! Elliptic integrals of the first kind.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::quad::integrate;

/// Moduli closer to 1 than this are rejected by [`complete_k`].
pub const NEAR_DIVERGENCE: f64 = 1e-10;

/// Elliptic modulus `k ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Domain { what: "k", value: k, domain: "[0, 1)" });
        }
        Ok(EllipticModulus(k))
    }

    /// `k = (4 - |λ|) / (4 + |λ|)` for `0 < |λ| ≤ 4`.
    pub fn from_energy(lambda: f64) -> Result<Self> {
        let l = lambda.abs();
        if l == 0.0 {
            return Err(Error::VanHoveDivergence);
        }
        if l > 4.0 || !l.is_finite() {
            return Err(Error::OutOfBand(lambda));
        }
        Self::new((4.0 - l) / (4.0 + l))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `k' = √(1 - k²)`, evaluated as `√((1-k)(1+k))`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }

    /// Inverse of [`EllipticModulus::from_energy`]: `|λ| = 4(1-k)/(1+k)`.
    pub fn energy(self) -> f64 {
        4.0 * (1.0 - self.0) / (1.0 + self.0)
    }
}

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a.abs() {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `K` from the complementary modulus, with no divergence guard.
pub(crate) fn complete_k_from_complement(kprime: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, kprime)
}

/// `K(k) = π / (2 AGM(1, √(1-k²)))`.
pub fn complete_k(k: EllipticModulus) -> Result<f64> {
    if k.0 > 1.0 - NEAR_DIVERGENCE {
        return Err(Error::Domain { what: "k", value: k.0, domain: "[0, 1 - 1e-10]" });
    }
    Ok(complete_k_from_complement(k.complement()))
}

/// `F(x, k) = ∫₀ˣ dt / √((1-t²)(1-k²t²))` for `|x| ≤ 1`, integrated in
/// `θ = arcsin t`.
pub fn incomplete_f(x: f64, k: EllipticModulus) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain { what: "x", value: x, domain: "[-1, 1]" });
    }
    let k2 = k.0 * k.0;
    let upper = x.asin();
    let q = integrate(|t: f64| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, upper.abs(), 1e-13, 1e-14);
    Ok(q.value.copysign(upper))
}

/// `|(1+k) K(k) - K(2√k / (1+k))|`.
pub fn landen_check(k: EllipticModulus) -> Result<f64> {
    if k.0 <= 0.0 {
        return Err(Error::Domain { what: "k", value: k.0, domain: "(0, 1)" });
    }
    let lhs = (1.0 + k.0) * complete_k(k)?;
    // complement of the transformed modulus is (1-k)/(1+k) exactly
    let rhs = complete_k_from_complement((1.0 - k.0) / (1.0 + k.0));
    Ok((lhs - rhs).abs())
}
