//! Density of states: elliptic closed form, eigenvalue counting, and the
//! almost Mathieu counting-measure formula.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use crate::eigen::{band_sweep_threads, BandGrid};
use crate::elliptic::{complete_k, complete_k_from_complement, EllipticModulus};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::lattice::OperatorSpec;
use crate::parallel::default_threads;

/// Radicands closer to zero than this mark a band-edge divergence.
const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DosFlag {
    Ok,
    Divergent,
    OutOfBand,
}

impl DosFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            DosFlag::Ok => "ok",
            DosFlag::Divergent => "divergent",
            DosFlag::OutOfBand => "out_of_band",
        }
    }
}

impl fmt::Display for DosFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DosPoint {
    pub lambda: f64,
    /// `+∞` when divergent, `0` when out of band.
    pub value: f64,
    pub flag: DosFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DosMethod {
    Elliptic,
    Counting,
    AmFormula,
}

impl DosMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DosMethod::Elliptic => "elliptic",
            DosMethod::Counting => "counting",
            DosMethod::AmFormula => "am_formula",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DosCurve {
    pub method: DosMethod,
    /// Generating parameters, free text.
    pub meta: String,
    pub points: Vec<DosPoint>,
}

impl DosCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "lambda,value,flag")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", fmt_f64(p.lambda), fmt_f64(p.value), p.flag)?;
        }
        Ok(())
    }

    /// Largest finite value.
    pub fn max_finite(&self) -> f64 {
        self.points.iter().map(|p| p.value).filter(|v| v.is_finite()).fold(0.0, f64::max)
    }
}

/// Uniform grid over `[-4, 4]` with both endpoints.
pub fn energy_grid(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::invalid("steps must be at least 2"));
    }
    let n = (steps - 1) as f64;
    // 4(2i - n)/n is exactly antisymmetric and hits 0 for odd `steps`
    Ok((0..steps).map(|i| 4.0 * (2.0 * i as f64 - n) / n).collect())
}

/// Shape of the λ-fiber of the zero-flux Bloch variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberType {
    /// `0 < |λ| < 4`: smooth elliptic curve.
    Smooth,
    /// `λ = 0`: the fiber splits into two components (Van Hove point).
    Reducible,
    /// `|λ| = 4`: the fiber degenerates to isolated points.
    Degenerate,
    /// `|λ| > 4`: no real states.
    Empty,
}

pub fn classify_fiber(lambda: f64) -> FiberType {
    let l = lambda.abs();
    if l == 0.0 {
        FiberType::Reducible
    } else if l == 4.0 {
        FiberType::Degenerate
    } else if l > 4.0 {
        FiberType::Empty
    } else {
        FiberType::Smooth
    }
}

fn check_periods(a: u32, b: u32) -> Result<()> {
    if a == 0 || b == 0 {
        return Err(Error::invalid("a and b must be positive"));
    }
    Ok(())
}

/// `(1+k) K(k) / (2π² ab)` with `k = (4-|λ|)/(4+|λ|)`.
pub fn dos_elliptic(lambda: f64, a: u32, b: u32) -> Result<DosPoint> {
    check_periods(a, b)?;
    let (value, flag) = match EllipticModulus::from_energy(lambda) {
        Ok(k) => {
            let kk = complete_k(k).unwrap_or_else(|_| complete_k_from_complement(k.complement()));
            ((1.0 + k.value()) * kk / (2.0 * PI * PI * a as f64 * b as f64), DosFlag::Ok)
        }
        Err(Error::VanHoveDivergence) => (f64::INFINITY, DosFlag::Divergent),
        Err(Error::OutOfBand(_)) => (0.0, DosFlag::OutOfBand),
        Err(e) => return Err(e),
    };
    Ok(DosPoint { lambda, value, flag })
}

pub fn dos_elliptic_curve(a: u32, b: u32, steps: usize) -> Result<DosCurve> {
    let points = energy_grid(steps)?
        .into_iter()
        .map(|l| dos_elliptic(l, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(DosCurve { method: DosMethod::Elliptic, meta: format!("a={a} b={b} steps={steps}"), points })
}

/// Fraction of the sampled eigenvalues that are `≤ λ`.
pub fn ids_from_grid(grid: &BandGrid, lambda: f64) -> f64 {
    let total = grid.len();
    if total == 0 {
        return 0.0;
    }
    grid.all_energies().filter(|&e| e <= lambda).count() as f64 / total as f64
}

/// `ν_n(λ) / (ab n²)` from a Harper band sweep with `grid_n = n`.
pub fn ids_counting(spec: &OperatorSpec, n: usize, lambda: f64) -> Result<f64> {
    Ok(ids_from_grid(&band_sweep_threads(spec, n, default_threads())?, lambda))
}

/// Histogram of all band-sweep energies in `bins` equal bins on `[-4, 4]`,
/// normalized to unit mass. Points sit at bin centers.
pub fn dos_counting_derivative(spec: &OperatorSpec, n: usize, bins: usize, threads: usize) -> Result<DosCurve> {
    if n < 8 {
        return Err(Error::invalid("n must be at least 8"));
    }
    if bins < 16 {
        return Err(Error::invalid("bins must be at least 16"));
    }
    let grid = band_sweep_threads(spec, n, threads)?;
    Ok(histogram(&grid, bins, format!("a={} b={} alpha={} beta={} n={n} bins={bins}", spec.a, spec.b, spec.alpha, spec.beta)))
}

fn histogram(grid: &BandGrid, bins: usize, meta: String) -> DosCurve {
    let width = 8.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for e in grid.all_energies() {
        let i = ((e + 4.0) / width).floor();
        counts[(i.max(0.0) as usize).min(bins - 1)] += 1;
    }
    let total = grid.len().max(1) as f64;
    let points = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| DosPoint {
            lambda: -4.0 + width * (i as f64 + 0.5),
            value: c as f64 / (total * width),
            flag: DosFlag::Ok,
        })
        .collect();
    DosCurve { method: DosMethod::Counting, meta, points }
}

/// One-constant fit `value ≈ C · K(√(1-(λ/4)²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFit {
    pub constant: f64,
    /// `max |value / (C·shape) - 1|`.
    pub max_rel_dev: f64,
    pub points: usize,
}

/// `K(√(1-(λ/4)²))`; equals `(1+k) K(k)` by the Landen transformation.
pub fn elliptic_shape(lambda: f64) -> f64 {
    let x = lambda / 4.0;
    // complement of √(1-x²) is |x|
    complete_k_from_complement(x.abs())
}

/// Least-squares fit of the elliptic shape over curve points with
/// `lo ≤ |λ| ≤ hi`.
pub fn fit_elliptic_shape(curve: &DosCurve, lo: f64, hi: f64) -> Result<ShapeFit> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| (lo..=hi).contains(&p.lambda.abs()) && p.value.is_finite())
        .map(|p| (p.value, elliptic_shape(p.lambda)))
        .collect();
    if pts.is_empty() {
        return Err(Error::invalid("no curve points inside the fit window"));
    }
    let (vg, gg) = pts.iter().fold((0.0, 0.0), |(vg, gg), &(v, g)| (vg + v * g, gg + g * g));
    let constant = vg / gg;
    let max_rel_dev = pts.iter().map(|&(v, g)| (v / (constant * g) - 1.0).abs()).fold(0.0, f64::max);
    Ok(ShapeFit { constant, max_rel_dev, points: pts.len() })
}

/// `(1/(4πa)) Σ_{ℓ∈window} Σ_{j=1}^{a} 1/√(1 - (λ/2 - cos 2πα(j+ℓa))²)`.
///
/// Terms with a non-positive radicand contribute nothing; a radicand within
/// `1e-12` of zero flags a band-edge divergence.
pub fn dos_am(lambda: f64, a: usize, alpha: f64, window: &[i64]) -> Result<DosPoint> {
    if a == 0 {
        return Err(Error::invalid("a must be positive"));
    }
    if window.is_empty() {
        return Err(Error::invalid("component window must be nonempty"));
    }
    let mut sum = 0.0;
    let mut divergent = false;
    for &l in window {
        for j in 1..=a {
            let x = alpha * (j as f64 + (l * a as i64) as f64);
            let c = (2.0 * PI * (x - x.floor())).cos();
            let radicand = 1.0 - (lambda / 2.0 - c).powi(2);
            if radicand.abs() <= EDGE_TOL {
                divergent = true;
            } else if radicand > 0.0 {
                sum += 1.0 / radicand.sqrt();
            }
        }
    }
    let (value, flag) = if divergent {
        (f64::INFINITY, DosFlag::Divergent)
    } else {
        (sum / (4.0 * PI * a as f64), DosFlag::Ok)
    };
    Ok(DosPoint { lambda, value, flag })
}

/// [`dos_am`] divided by the window size.
pub fn dos_am_average(lambda: f64, a: usize, alpha: f64, window: &[i64]) -> Result<DosPoint> {
    let mut p = dos_am(lambda, a, alpha, window)?;
    if p.flag == DosFlag::Ok {
        p.value /= window.len() as f64;
    }
    Ok(p)
}

pub fn dos_am_curve(a: usize, alpha: f64, window: &[i64], steps: usize) -> Result<DosCurve> {
    let points = energy_grid(steps)?
        .into_iter()
        .map(|l| dos_am(l, a, alpha, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(DosCurve {
        method: DosMethod::AmFormula,
        meta: format!("a={a} alpha={alpha} window={window:?} steps={steps}"),
        points,
    })
}

/// Uniform average of per-component values over a finite window.
pub fn window_average(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::OperatorSpec;
    use crate::quad::integrate_pieces;

    fn zero_flux() -> OperatorSpec {
        OperatorSpec::new(3, 5, 0.0, 0.0).unwrap()
    }

    /// Brute-force `2cos(2π(m+s)/3) + 2cos(2π(n+t)/5)` over the phase grid.
    fn zero_flux_energies(n: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for m1 in 1..=n {
            for m2 in 1..=n {
                for m in 0..3 {
                    for q in 0..5 {
                        let s = (m as f64 + m1 as f64 / n as f64) / 3.0;
                        let t = (q as f64 + m2 as f64 / n as f64) / 5.0;
                        out.push(2.0 * (2.0 * PI * s).cos() + 2.0 * (2.0 * PI * t).cos());
                    }
                }
            }
        }
        out
    }

    #[test]
    fn ids_trivial_limits() {
        let spec = OperatorSpec::new(3, 5, 0.3, 0.7).unwrap();
        assert_eq!(ids_counting(&spec, 4, 4.0 + 1e-6).unwrap(), 1.0);
        assert_eq!(ids_counting(&spec, 4, -5.0).unwrap(), 0.0);
    }

    #[test]
    fn ids_half_filling() {
        let v = ids_counting(&zero_flux(), 16, 0.0).unwrap();
        let oracle = zero_flux_energies(16);
        let count = oracle.iter().filter(|&&e| e <= 1e-12).count() as f64 / oracle.len() as f64;
        assert!((v - 0.5).abs() < 0.02, "{v}");
        assert!((v - count).abs() < 0.01, "{v} vs {count}");
    }

    #[test]
    fn ids_monotone() {
        let spec = OperatorSpec::new(3, 5, 0.2, 0.4).unwrap();
        let grid = band_sweep_threads(&spec, 6, 2).unwrap();
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = ids_from_grid(&grid, -4.5 + 9.0 * i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn elliptic_examples() {
        let edge = dos_elliptic(4.0, 1, 1).unwrap();
        assert!((edge.value - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(dos_elliptic(-4.0, 1, 1).unwrap().value, edge.value);
        // K(1/3) from mpmath
        let want = (4.0 / 3.0) * 1.617_386_735_624_732_4 / (2.0 * PI * PI);
        assert!((dos_elliptic(2.0, 1, 1).unwrap().value - want).abs() < 1e-14);
        assert!((want - 0.109_250_358_973_943_15).abs() < 1e-15);
        let z = dos_elliptic(0.0, 3, 5).unwrap();
        assert_eq!(z.flag, DosFlag::Divergent);
        let out = dos_elliptic(4.5, 3, 5).unwrap();
        assert_eq!((out.value, out.flag), (0.0, DosFlag::OutOfBand));
    }

    #[test]
    fn elliptic_symmetric_and_matches_shape() {
        for i in 1..=80 {
            let l = i as f64 / 20.0;
            let p = dos_elliptic(l, 3, 5).unwrap();
            assert_eq!(p.value, dos_elliptic(-l, 3, 5).unwrap().value);
            let s = elliptic_shape(l) / (2.0 * PI * PI * 15.0);
            assert!((p.value - s).abs() < 1e-13 * s);
        }
    }

    #[test]
    fn elliptic_matches_half_periods() {
        for i in 1..=50 {
            let l = 4.0 * i as f64 / 51.0;
            let a = dos_elliptic(l, 3, 5).unwrap().value;
            let b = crate::periods::dos_from_half_periods(l, 3, 5).unwrap();
            assert!((a - b).abs() < 1e-8 * a);
        }
    }

    #[test]
    fn elliptic_mass() {
        let q = integrate_pieces(|l| dos_elliptic(l, 1, 1).unwrap().value, &[-4.0, 0.0, 4.0], 1e-12, 1e-12);
        assert!((q.value - 1.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn curve_csv() {
        let c = dos_elliptic_curve(3, 5, 401).unwrap();
        assert_eq!(c.points.len(), 401);
        assert_eq!(c.points[200].lambda, 0.0);
        assert_eq!(c.points[200].flag, DosFlag::Divergent);
        assert_eq!(c.points.iter().filter(|p| p.flag != DosFlag::Ok).count(), 1);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 402);
        assert!(s.starts_with("lambda,value,flag\n-4,"));
        assert!(s.contains("\n0,inf,divergent\n"));
    }

    #[test]
    fn counting_curve_invariants() {
        let spec = zero_flux();
        let c = dos_counting_derivative(&spec, 16, 32, 3).unwrap();
        let mass: f64 = c.points.iter().map(|p| p.value * 0.25).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(c.points.iter().all(|p| p.value >= 0.0));
        assert_eq!(c, dos_counting_derivative(&spec, 16, 32, 1).unwrap());
        assert!(dos_counting_derivative(&spec, 7, 32, 1).is_err());
        assert!(dos_counting_derivative(&spec, 8, 15, 1).is_err());
    }

    #[test]
    fn am_examples() {
        assert_eq!(dos_am(4.0, 1, 0.0, &[0]).unwrap().flag, DosFlag::Divergent);
        assert!((dos_am(2.0, 1, 0.0, &[0]).unwrap().value - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let want = 1.0 / (4.0 * PI * 2.0 * 0.75f64.sqrt());
        assert!((dos_am(1.0, 2, 0.5, &[0]).unwrap().value - want).abs() < 1e-15);
        assert!(dos_am(1.0, 2, 0.5, &[]).is_err());
        assert_eq!(dos_am(4.5, 3, 0.2, &[0]).unwrap().value, 0.0);
    }

    #[test]
    fn am_window_sums_components() {
        let w = [-1, 0, 2];
        let total = dos_am(0.7, 3, 0.37, &w).unwrap().value;
        let parts: Vec<f64> = w.iter().map(|&l| dos_am(0.7, 3, 0.37, &[l]).unwrap().value).collect();
        assert!((total - parts.iter().sum::<f64>()).abs() < 1e-15);
        let avg = dos_am_average(0.7, 3, 0.37, &w).unwrap().value;
        assert!((avg - window_average(&parts).unwrap()).abs() < 1e-15);
        assert_eq!(window_average(&[]), None);
    }

    /// Mass of the AM formula over its support, with the substitution
    /// `λ = u + (v-u)(1-cos φ)/2` on each piece between consecutive edges.
    fn am_mass(a: usize, alpha: f64) -> f64 {
        let mut edges = vec![-4.0, 4.0];
        for j in 1..=a {
            let c = 2.0 * (2.0 * PI * alpha * j as f64).cos();
            edges.extend([c - 2.0, c + 2.0]);
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (u, v) = (w[0], w[1]);
            let f = |phi: f64| {
                let l = u + (v - u) * (1.0 - phi.cos()) / 2.0;
                let d = dos_am(l, a, alpha, &[0]).unwrap();
                if d.flag == DosFlag::Ok {
                    d.value * (v - u) * phi.sin() / 2.0
                } else {
                    0.0
                }
            };
            total += crate::quad::integrate(f, 0.0, PI, 1e-12, 1e-12).value;
        }
        total
    }

    #[test]
    fn am_formula_mass_is_one_half() {
        // one root per band: each cosine band carries mass 1/(2a)
        for (p, q) in [(1, 2), (1, 3), (2, 5), (3, 7)] {
            let m = am_mass(q, p as f64 / q as f64);
            assert!((m - 0.5).abs() < 0.005, "{p}/{q}: {m}");
        }
    }

    #[test]
    fn fibers() {
        assert_eq!(classify_fiber(0.0), FiberType::Reducible);
        assert_eq!(classify_fiber(-4.0), FiberType::Degenerate);
        assert_eq!(classify_fiber(2.0), FiberType::Smooth);
        assert_eq!(classify_fiber(4.01), FiberType::Empty);
    }

    #[test]
    fn grid_is_symmetric() {
        let g = energy_grid(401).unwrap();
        assert_eq!((g[0], g[400], g[200]), (-4.0, 4.0, 0.0));
        for i in 0..401 {
            assert_eq!(g[i], -g[400 - i]);
        }
        assert!(energy_grid(1).is_err());
    }
}
