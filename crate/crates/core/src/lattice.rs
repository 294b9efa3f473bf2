//! Finite matrices for the Harper and almost Mathieu spectral problems.
//!
//! The two-dimensional Harper operator
//!
//! ```text
//! (Hψ)(m,n) = e^{-2πiαn} ψ(m+1,n) + e^{2πiαn} ψ(m-1,n)
//!           + e^{-2πiβm} ψ(m,n+1) + e^{2πiβm} ψ(m,n-1)
//! ```
//!
//! restricted to quasi-periodic functions `ψ(m+a,n) = ξ₁ψ(m,n)`,
//! `ψ(m,n+b) = ξ₂ψ(m,n)` becomes an `ab × ab` matrix per component `(k, ℓ)`
//! of the Bloch variety, the component shifting the phases to
//! `α(n+ℓb)` and `β(m+ka)`. The almost Mathieu operator
//! `(H'φ)(j) = 2cos(2παj)φ(j) + φ(j+1) + φ(j-1)` with `φ(j+a) = ξφ(j)`
//! becomes an `a × a` periodic Jacobi matrix.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::eigen::eigen_hermitian;
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-14;

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_unit(what: &'static str, z: Complex64, tol: f64) -> Result<()> {
    let r = z.norm();
    if (r - 1.0).abs() > tol || !r.is_finite() {
        return Err(Error::Domain { what, value: r, domain: "|z| = 1" });
    }
    Ok(())
}

/// `e^{-2πix}` with the argument reduced to `[0, 1)` first.
fn phase(x: f64) -> Complex64 {
    let frac = x - x.floor();
    Complex64::from_polar(1.0, -2.0 * PI * frac)
}

/// Unit complex number `e^{2πit}`.
pub fn unit(t: f64) -> Complex64 {
    let frac = t - t.floor();
    Complex64::from_polar(1.0, 2.0 * PI * frac)
}

/// Physical parameters of one component of the Harper Bloch problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    /// Period along `m`; an odd prime.
    pub a: u32,
    /// Period along `n`; an odd prime different from `a`.
    pub b: u32,
    pub alpha: f64,
    pub beta: f64,
    pub comp_k: i64,
    pub comp_l: i64,
    pub xi1: Complex64,
    pub xi2: Complex64,
}

impl OperatorSpec {
    /// Component `(0, 0)` with periodic boundary phases.
    pub fn new(a: u32, b: u32, alpha: f64, beta: f64) -> Result<Self> {
        let spec = OperatorSpec {
            a,
            b,
            alpha,
            beta,
            comp_k: 0,
            comp_l: 0,
            xi1: Complex64::new(1.0, 0.0),
            xi2: Complex64::new(1.0, 0.0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_component(mut self, k: i64, l: i64) -> Self {
        self.comp_k = k;
        self.comp_l = l;
        self
    }

    pub fn with_phases(mut self, xi1: Complex64, xi2: Complex64) -> Self {
        self.xi1 = xi1;
        self.xi2 = xi2;
        self
    }

    pub fn dim(&self) -> usize {
        (self.a * self.b) as usize
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("a", self.a), ("b", self.b)] {
            if p % 2 == 0 || !is_prime(p) {
                return Err(Error::invalid(format!("{name} = {p} must be an odd prime")));
            }
        }
        if self.a == self.b {
            return Err(Error::invalid(format!("a and b must differ (both {})", self.a)));
        }
        for (what, x) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::Domain { what, value: x, domain: "[0, 1)" });
            }
        }
        check_unit("|xi1|", self.xi1, UNIT_TOL)?;
        check_unit("|xi2|", self.xi2, UNIT_TOL)?;
        Ok(())
    }

    /// Flattened site index for `m ∈ 1..=a`, `n ∈ 1..=b` (row-major, `m` outer).
    pub fn site(&self, m: u32, n: u32) -> usize {
        ((m - 1) * self.b + (n - 1)) as usize
    }
}

/// Dense complex Hermitian matrix.
///
/// Off-diagonal entries are only ever written in conjugate pairs and the
/// diagonal is real, so `entry(j, i) == entry(i, j).conj()` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    /// Builds from a lower triangle; `lower[i][j]` for `j <= i`. Diagonal
    /// imaginary parts are discarded.
    pub fn from_lower(lower: &[Vec<Complex64>]) -> Self {
        let mut m = Self::zeros(lower.len());
        for (i, row) in lower.iter().enumerate() {
            for (j, &v) in row.iter().enumerate().take(i + 1) {
                if i == j {
                    m.add_diagonal(i, v.re);
                } else {
                    m.add_hop(i, j, v);
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn add_diagonal(&mut self, i: usize, v: f64) {
        self.data[i * self.dim + i].re += v;
    }

    /// Adds `v` at `(i, j)` and `conj(v)` at `(j, i)`.
    pub fn add_hop(&mut self, i: usize, j: usize, v: Complex64) {
        assert_ne!(i, j, "hops are off-diagonal");
        self.data[i * self.dim + j] += v;
        self.data[j * self.dim + i] += v.conj();
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A(i,j) - conj(A(j,i))|`; zero by construction.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn conj(&self) -> Self {
        HermitianMatrix { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub(crate) fn raw(&self) -> &[Complex64] {
        &self.data
    }
}

/// The `ab × ab` Bloch matrix `M^{(k,ℓ)}(ξ₁, ξ₂)` of the Harper operator.
///
/// Wraparound hops carry both their magnetic phase and the boundary phase,
/// `ψ(a+1,n) = ξ₁ψ(1,n)` and `ψ(m,b+1) = ξ₂ψ(m,1)`.
pub fn build_harper_matrix(spec: &OperatorSpec) -> Result<HermitianMatrix> {
    spec.validate()?;
    let (a, b) = (spec.a, spec.b);
    let mut h = HermitianMatrix::zeros(spec.dim());
    for m in 1..=a {
        for n in 1..=b {
            let here = spec.site(m, n);
            let horizontal = phase(spec.alpha * (n as f64 + (spec.comp_l * b as i64) as f64));
            let (right, hop) = if m == a {
                (spec.site(1, n), horizontal * spec.xi1)
            } else {
                (spec.site(m + 1, n), horizontal)
            };
            h.add_hop(here, right, hop);

            let vertical = phase(spec.beta * (m as f64 + (spec.comp_k * a as i64) as f64));
            let (up, hop) = if n == b {
                (spec.site(m, 1), vertical * spec.xi2)
            } else {
                (spec.site(m, n + 1), vertical)
            };
            h.add_hop(here, up, hop);
        }
    }
    Ok(h)
}

/// On-site potential `2cos(2πα(j+ℓa))`, `j = 1..=a`.
pub fn am_potential(a: usize, alpha: f64, comp_l: i64) -> Vec<f64> {
    (1..=a)
        .map(|j| {
            let x = alpha * (j as f64 + (comp_l * a as i64) as f64);
            2.0 * (2.0 * PI * (x - x.floor())).cos()
        })
        .collect()
}

/// On-site potential `2cos(2παj + θ)`, `j = 1..=a`.
pub fn am_potential_phased(a: usize, alpha: f64, theta: f64) -> Vec<f64> {
    (1..=a)
        .map(|j| {
            let x = alpha * j as f64;
            2.0 * (2.0 * PI * (x - x.floor()) + theta).cos()
        })
        .collect()
}

/// Periodic Jacobi matrix with the given diagonal, unit hopping and
/// Floquet phase `ξ` on the wrap (`φ(a+1) = ξφ(1)`).
pub fn jacobi_ring(potential: &[f64], xi: Complex64) -> Result<HermitianMatrix> {
    let a = potential.len();
    if a < 2 {
        return Err(Error::invalid(format!("ring length a = {a} must be at least 2")));
    }
    check_unit("|xi|", xi, UNIT_TOL)?;
    let mut h = HermitianMatrix::zeros(a);
    for (j, &v) in potential.iter().enumerate() {
        h.add_diagonal(j, v);
    }
    for j in 0..a - 1 {
        h.add_hop(j, j + 1, Complex64::new(1.0, 0.0));
    }
    // for a = 2 the wrap lands on the same pair as the bulk hop and adds to it
    h.add_hop(a - 1, 0, xi);
    Ok(h)
}

/// The `a × a` almost Mathieu Bloch matrix `M'^ℓ(ξ)`.
///
/// `a` need not be prime, so that continued-fraction denominators can be used.
pub fn build_am_matrix(a: usize, alpha: f64, comp_l: i64, xi: Complex64) -> Result<HermitianMatrix> {
    if a < 2 {
        return Err(Error::invalid(format!("a = {a} must be at least 2")));
    }
    jacobi_ring(&am_potential(a, alpha, comp_l), xi)
}

/// Floquet discriminant `tr(T_a ⋯ T_1)` of a unit-hopping periodic Jacobi
/// operator, from the leading principal minor recurrence
/// `D_j = (λ - v_j) D_{j-1} - D_{j-2}`: `Δ = D_{1..a} - D_{2..a-1}`.
///
/// `λ` is in the spectrum at Floquet phase `ξ` iff `Δ(λ) = ξ + ξ⁻¹`, so
/// `det(λ - M(ξ)) = Δ(λ) - ξ - ξ⁻¹`.
pub fn discriminant(potential: &[f64], lambda: f64) -> f64 {
    let minor = |vals: &[f64]| {
        let (mut prev, mut cur) = (0.0f64, 1.0f64);
        for &v in vals {
            let next = (lambda - v) * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    };
    let a = potential.len();
    let inner = if a >= 2 { minor(&potential[1..a - 1]) } else { 0.0 };
    minor(potential) - inner
}

/// `p_ℓ(λ, α)`, the ξ-independent part of `det(M'^ℓ(ξ) - λI)`.
///
/// With the Floquet convention `φ(j+a) = ξφ(j)` the expansion reads
/// `det(M'^ℓ(ξ) - λI) = p_ℓ(λ, α) - (-1)^a (ξ + ξ⁻¹)`, and `p_ℓ` has leading
/// term `(-λ)^a`. The band condition is `p_ℓ ∈ [-2, 2]`.
pub fn char_poly_am(a: usize, alpha: f64, comp_l: i64, lambda: f64) -> Result<f64> {
    if a < 2 {
        return Err(Error::invalid(format!("a = {a} must be at least 2")));
    }
    let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * discriminant(&am_potential(a, alpha, comp_l), lambda))
}

/// Index of one diagonal Fourier mode: site `(m, n)` and covering-group
/// element `ρ = (ρ₀₁^p, ρ₀₂^q)` with `ρ₀₁ = e^{2πi/a}`, `ρ₀₂ = e^{2πi/b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierMode {
    pub m: u32,
    pub n: u32,
    pub p: u32,
    pub q: u32,
}

impl FourierMode {
    pub fn new(m: u32, n: u32, p: u32, q: u32) -> Self {
        FourierMode { m, n, p, q }
    }

    pub fn value(&self, spec: &OperatorSpec, z1: Complex64, z2: Complex64) -> Result<f64> {
        fourier_mode_value(spec, self, z1, z2)
    }
}

/// Value of the diagonal mode `ρz + (ρz)⁻¹`-type function on the unit torus:
/// `2cos(2π(κ₁ + α(n+ℓb)) + 2πp/a) + 2cos(2π(κ₂ + β(m+ka)) + 2πq/b)`,
/// where `z_i = e^{2πiκ_i}`.
pub fn fourier_mode_value(spec: &OperatorSpec, mode: &FourierMode, z1: Complex64, z2: Complex64) -> Result<f64> {
    check_unit("|z1|", z1, 1e-12)?;
    check_unit("|z2|", z2, 1e-12)?;
    let (a, b) = (spec.a as f64, spec.b as f64);
    if !(1..=spec.a).contains(&mode.m) || !(1..=spec.b).contains(&mode.n) {
        return Err(Error::invalid(format!("mode site ({}, {}) outside 1..=a × 1..=b", mode.m, mode.n)));
    }
    if !(1..=spec.a).contains(&mode.p) || !(1..=spec.b).contains(&mode.q) {
        return Err(Error::invalid(format!("mode root ({}, {}) outside 1..=a × 1..=b", mode.p, mode.q)));
    }
    let kappa1 = z1.arg() / (2.0 * PI);
    let kappa2 = z2.arg() / (2.0 * PI);
    let s1 = spec.alpha * (mode.n as f64 + (spec.comp_l * spec.b as i64) as f64);
    let s2 = spec.beta * (mode.m as f64 + (spec.comp_k * spec.a as i64) as f64);
    let t1 = kappa1 + s1 + mode.p as f64 / a;
    let t2 = kappa2 + s2 + mode.q as f64 / b;
    Ok(2.0 * (2.0 * PI * (t1 - t1.floor())).cos() + 2.0 * (2.0 * PI * (t2 - t2.floor())).cos())
}

/// Deviation between the Bloch-matrix spectrum and the diagonal Fourier-mode
/// values over a boundary-phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    pub grid: usize,
    pub points: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
}

/// Compares sorted eigenvalues of `M^{(k,ℓ)}(ξ₁, ξ₂)` at
/// `ξ_i = e^{2πi m_i/grid}` with the sorted mode values at the covering point
/// `z₁ = e^{2πi m₁/(a·grid)}`, `z₂ = e^{2πi m₂/(b·grid)}` (so `z₁^a = ξ₁`,
/// `z₂^b = ξ₂`), pairing site `(m, n)` with root `ρ = (ρ₀₁^m, ρ₀₂^n)`.
///
/// This is a measurement: for non-zero flux the deviation is reported, not
/// expected to vanish.
pub fn factorization_report(spec: &OperatorSpec, grid: usize) -> Result<FactorizationReport> {
    spec.validate()?;
    if grid == 0 {
        return Err(Error::invalid("grid must be at least 1"));
    }
    let (a, b) = (spec.a, spec.b);
    let mut max_dev = 0.0f64;
    let mut sum_dev = 0.0f64;
    let mut count = 0usize;
    for m1 in 1..=grid {
        for m2 in 1..=grid {
            let t1 = m1 as f64 / grid as f64;
            let t2 = m2 as f64 / grid as f64;
            let at = spec.with_phases(unit(t1), unit(t2));
            let eig = eigen_hermitian(&build_harper_matrix(&at)?)
                .map_err(|e| Error::GridPoint { m1, m2, source: Box::new(e) })?;
            let z1 = unit(t1 / a as f64);
            let z2 = unit(t2 / b as f64);
            let mut modes = Vec::with_capacity(spec.dim());
            for m in 1..=a {
                for n in 1..=b {
                    modes.push(fourier_mode_value(&at, &FourierMode::new(m, n, m, n), z1, z2)?);
                }
            }
            modes.sort_by(f64::total_cmp);
            for (e, v) in eig.values.iter().zip(&modes) {
                let d = (e - v).abs();
                max_dev = max_dev.max(d);
                sum_dev += d;
                count += 1;
            }
        }
    }
    Ok(FactorizationReport {
        grid,
        points: grid * grid,
        max_deviation: max_dev,
        mean_deviation: sum_dev / count as f64,
    })
}
