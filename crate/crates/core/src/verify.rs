//! Self-check suite run by `harper verify`.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::butterfly::bands_rational;
use crate::dos::dos_elliptic;
use crate::eigen::eigen_hermitian;
use crate::elliptic::{complete_k, landen_check, EllipticModulus};
use crate::error::Result;
use crate::lattice::{factorization_report, HermitianMatrix, OperatorSpec};
use crate::periods::{dos_from_half_periods, tau_invariant};
use crate::spectral::{zeta_am_quadrature, zeta_am_winding, zeta_harper};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// `None` for report-only measurements.
    pub passed: Option<bool>,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<(Option<bool>, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (Some(false), format!("error: {e}")),
    };
    Check { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn modulus(k: f64) -> Result<EllipticModulus> {
    EllipticModulus::new(k)
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let lower: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..=i)
                .map(|j| {
                    let re = rng.gen_range(-1.0..1.0);
                    let im = if i == j { 0.0 } else { rng.gen_range(-1.0..1.0) };
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    HermitianMatrix::from_lower(&lower)
}

/// Runs every check; `quick` shrinks the sampled sizes.
pub fn run_verification(quick: bool) -> Vec<Check> {
    let mut out = Vec::new();

    out.push(timed("elliptic K(0) and Landen identity", || {
        let k0 = (complete_k(modulus(0.0)?)? - FRAC_PI_2).abs();
        let mut worst = 0.0f64;
        for i in 1..=9 {
            worst = worst.max(landen_check(modulus(i as f64 / 10.0)?)?);
        }
        Ok((Some(k0 < 1e-12 && worst < 1e-10), format!("|K(0)-π/2| = {k0:e}, max Landen residual {worst:e}")))
    }));

    out.push(timed("modular ratio τ(E_k) = τ(E_1/k)", || {
        let mut worst = 0.0f64;
        let n = if quick { 5 } else { 20 };
        for i in 0..n {
            let k = 0.01 + 0.98 * i as f64 / (n - 1) as f64;
            let (t1, t2) = tau_invariant(modulus(k)?)?;
            worst = worst.max((t1 - t2).abs());
        }
        Ok((Some(worst < 1e-8), format!("max |Δτ| = {worst:e} over {n} moduli")))
    }));

    out.push(timed("half-period density of states", || {
        let mut worst = 0.0f64;
        let n = if quick { 10 } else { 50 };
        for i in 1..=n {
            let l = 4.0 * i as f64 / (n + 1) as f64;
            let a = dos_elliptic(l, 3, 5)?.value;
            let b = dos_from_half_periods(l, 3, 5)?;
            worst = worst.max((a - b).abs() / a);
        }
        Ok((Some(worst < 1e-8), format!("max relative deviation {worst:e} over {n} energies")))
    }));

    out.push(timed("zeta total mass 1/(2ab)", || {
        let z = zeta_harper(0, 3, 5)?;
        let d = (z - 1.0 / 30.0).abs();
        Ok((Some(d < 1e-8), format!("zeta(0) = {z}, deviation {d:e}")))
    }));

    out.push(timed("winding numbers vs quadrature", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        let trials = if quick { 3 } else { 10 };
        for _ in 0..trials {
            let alpha = rng.gen::<f64>();
            let a = rng.gen_range(1..10usize);
            let l = rng.gen_range(-4..5i64);
            let j = rng.gen_range(1..=a as i64);
            for n in 0..=12 {
                let w = zeta_am_winding(n, a, alpha, l, j)?;
                let q = zeta_am_quadrature(n, a, alpha, l, j)?;
                worst = worst.max((w - q).abs());
            }
        }
        Ok((Some(worst < 1e-9), format!("max |Δζ| = {worst:e} over {trials} components, n ≤ 12")))
    }));

    out.push(timed("Jacobi eigensolver on random Hermitian matrices", || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let count = if quick { 20 } else { 200 };
        let (mut res, mut orth) = (0.0f64, 0.0f64);
        for _ in 0..count {
            let n = rng.gen_range(1..=20);
            let m = random_hermitian(&mut rng, n);
            let d = eigen_hermitian(&m)?;
            res = res.max(d.residual / (1.0 + m.frobenius_norm()));
            orth = orth.max(d.orthonormality_defect());
        }
        Ok((Some(res <= 1e-10 && orth < 1e-10), format!("max scaled residual {res:e}, orthonormality {orth:e}")))
    }));

    out.push(timed("factorization at zero flux", || {
        let r = factorization_report(&OperatorSpec::new(3, 5, 0.0, 0.0)?, 4)?;
        Ok((Some(r.max_deviation < 1e-10), format!("max {:e}, mean {:e}", r.max_deviation, r.mean_deviation)))
    }));

    out.push(timed("factorization at flux (0.3, 0.1)", || {
        let r = factorization_report(&OperatorSpec::new(3, 5, 0.3, 0.1)?, 4)?;
        Ok((None, format!("max {:.6}, mean {:.6} (measured)", r.max_deviation, r.mean_deviation)))
    }));

    out.push(timed("almost Mathieu bands at flux 1/2", || {
        let b = bands_rational(1, 2)?;
        let r = 2.0 * 2f64.sqrt();
        let d = b.intervals.first().map_or(f64::INFINITY, |&(lo, hi)| (lo + r).abs().max((hi - r).abs()));
        Ok((Some(b.count() == 1 && d < 1e-9), format!("{} band(s), edge deviation {d:e}", b.count())))
    }));

    out
}

/// Text table, one line per check.
pub fn format_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let status = match c.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        let pad = width - c.name.chars().count();
        s.push_str(&format!("{status}  {}{}  {}  ({:.2}s)\n", c.name, " ".repeat(pad), c.detail, c.seconds));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = run_verification(true);
        assert_eq!(checks.len(), 9);
        for c in &checks {
            assert_ne!(c.passed, Some(false), "{}: {}", c.name, c.detail);
        }
        let table = format_table(&checks);
        assert_eq!(table.lines().count(), 9);
        assert!(table.contains("INFO"));
    }
}
