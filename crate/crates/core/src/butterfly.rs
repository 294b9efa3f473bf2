//! Rational flux approximation and the Hofstadter butterfly.
//!
//! At flux `p/q` the almost Mathieu spectrum is the union over the phase `θ`
//! of the spectra of the period-`q` operators with potential
//! `2cos(2πpj/q + θ)`. Its discriminant depends on `θ` only through a term
//! `-2cos(qθ)`, so with `Δ₀` the phase average the spectrum is
//! `{λ : |Δ₀(λ)| ≤ 4}`, and the edges are the eigenvalues at `(θ, ξ) = (0, 1)`
//! and `(π/q, -1)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::lattice::{am_potential_phased, jacobi_ring};
use crate::parallel::map_indexed;

pub const MAX_Q: u64 = 200;
pub const MAX_RASTER_Q: u64 = 60;
pub const MAX_BINS: usize = 4096;
pub const MAX_CONVERGENTS: usize = 40;
/// Bands closer than this are merged; also the rasterization padding.
pub const TOUCH_TOL: f64 = 1e-9;
/// Largest tolerated distance between an eigenvalue edge and the nearest
/// root of `|Δ₀| = 4`.
pub const EDGE_CONSISTENCY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
}

impl Convergent {
    pub fn value(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Continued-fraction convergents of `α ∈ (0, 1)`.
///
/// Stops early when the expansion terminates: a remainder of zero, a partial
/// quotient above `1e15`, or a convergent equal to `α` as a double.
pub fn convergents(alpha: f64, count: usize) -> Result<Vec<Convergent>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { what: "alpha", value: alpha, domain: "(0, 1)" });
    }
    if count > MAX_CONVERGENTS {
        return Err(Error::invalid(format!("count = {count} exceeds {MAX_CONVERGENTS}")));
    }
    let mut out = Vec::with_capacity(count);
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut p, mut q) = (0u64, 1u64);
    let mut x = alpha;
    while out.len() < count {
        out.push(Convergent { p, q });
        if (p as f64 / q as f64) == alpha {
            break;
        }
        if x == 0.0 {
            break;
        }
        let inv = 1.0 / x;
        if inv > 1e15 {
            break;
        }
        let mut c = inv.floor();
        let mut frac = inv - c;
        // 1/x can land just below an integer on exactly representable input
        if frac > 1.0 - 1e-12 {
            c += 1.0;
            frac = 0.0;
        }
        let c = c as u64;
        let (Some(pn), Some(qn)) = (
            c.checked_mul(p).and_then(|v| v.checked_add(p_prev)),
            c.checked_mul(q).and_then(|v| v.checked_add(q_prev)),
        ) else {
            break;
        };
        (p_prev, q_prev, p, q) = (p, q, pn, qn);
        x = frac;
    }
    Ok(out)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Farey sequence of order `n`: reduced `p/q ∈ [0, 1]` with `q ≤ n`, ascending.
pub fn farey(n: u64) -> Vec<Convergent> {
    if n == 0 {
        return Vec::new();
    }
    let mut out = vec![Convergent { p: 0, q: 1 }];
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    while c <= n {
        out.push(Convergent { p: c, q: d });
        let k = (n + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    out
}

/// Spectrum at one rational flux as disjoint ascending closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    pub flux: Convergent,
    pub intervals: Vec<(f64, f64)>,
    /// Largest estimated distance from an eigenvalue edge to the discriminant
    /// edge set.
    pub edge_consistency: f64,
}

impl BandSet {
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= lambda && lambda <= hi)
    }
}

/// `Δ, Δ', Δ''` at `λ` from the minor recurrence and its derivatives.
fn discriminant_jet(potential: &[f64], lambda: f64) -> [f64; 3] {
    let minor = |vals: &[f64]| {
        let (mut prev, mut cur) = ([0.0f64; 3], [1.0f64, 0.0, 0.0]);
        for &v in vals {
            let x = lambda - v;
            let next = [
                x * cur[0] - prev[0],
                cur[0] + x * cur[1] - prev[1],
                2.0 * cur[1] + x * cur[2] - prev[2],
            ];
            prev = cur;
            cur = next;
        }
        cur
    };
    let a = potential.len();
    let full = minor(potential);
    let inner = if a >= 2 { minor(&potential[1..a - 1]) } else { [0.0; 3] };
    [full[0] - inner[0], full[1] - inner[1], full[2] - inner[2]]
}

/// `Δ₀`, the phase-averaged discriminant at flux `p/q`, with two derivatives.
pub fn mean_discriminant(p: u64, q: u64, lambda: f64) -> [f64; 3] {
    let alpha = p as f64 / q as f64;
    let d0 = discriminant_jet(&am_potential_phased(q as usize, alpha, 0.0), lambda);
    let d1 = discriminant_jet(&am_potential_phased(q as usize, alpha, PI / q as f64), lambda);
    [0.5 * (d0[0] + d1[0]), 0.5 * (d0[1] + d1[1]), 0.5 * (d0[2] + d1[2])]
}

/// Distance from `λ` to the nearest solution of `|Δ₀| = 4`, from the local
/// Taylor model (the quadratic term covers tangential touching).
fn edge_distance(p: u64, q: u64, lambda: f64) -> f64 {
    let [d, d1, d2] = mean_discriminant(p, q, lambda);
    let g = (d.abs() - 4.0).abs();
    if g == 0.0 {
        return 0.0;
    }
    let linear = if d1 != 0.0 { g / d1.abs() } else { f64::INFINITY };
    let quadratic = if d2 != 0.0 { (2.0 * g / d2.abs()).sqrt() } else { f64::INFINITY };
    linear.min(quadratic)
}

fn check_flux(p: u64, q: u64) -> Result<()> {
    if q == 0 || q > MAX_Q {
        return Err(Error::invalid(format!("q = {q} must lie in 1..={MAX_Q}")));
    }
    if q == 1 {
        return if p <= 1 { Ok(()) } else { Err(Error::invalid(format!("p = {p} must be 0 or 1 for q = 1"))) };
    }
    if p == 0 || p >= q {
        return Err(Error::invalid(format!("p = {p} must satisfy 1 <= p < q = {q}")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::invalid(format!("{p}/{q} is not reduced")));
    }
    Ok(())
}

/// Bands of the almost Mathieu operator at flux `p/q`.
pub fn bands_rational(p: u64, q: u64) -> Result<BandSet> {
    check_flux(p, q)?;
    let flux = Convergent { p, q };
    if q == 1 {
        return Ok(BandSet { flux, intervals: vec![(-4.0, 4.0)], edge_consistency: 0.0 });
    }
    let alpha = p as f64 / q as f64;
    let n = q as usize;
    let periodic = jacobi_ring(&am_potential_phased(n, alpha, 0.0), Complex64::new(1.0, 0.0))?;
    let antiperiodic = jacobi_ring(&am_potential_phased(n, alpha, PI / q as f64), Complex64::new(-1.0, 0.0))?;
    let mut edges = eigenvalues(&periodic)?;
    edges.extend(eigenvalues(&antiperiodic)?);
    edges.sort_by(f64::total_cmp);

    let mut consistency = 0.0f64;
    for &e in &edges {
        consistency = consistency.max(edge_distance(p, q, e));
    }
    if consistency.is_nan() || consistency > EDGE_CONSISTENCY {
        return Err(Error::Inconsistent(format!(
            "flux {p}/{q}: eigenvalue edges are {consistency:e} from the discriminant edges"
        )));
    }

    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(n);
    for pair in edges.chunks(2) {
        let (lo, hi) = (pair[0], pair[1]);
        match intervals.last_mut() {
            Some(last) if lo - last.1 < TOUCH_TOL => last.1 = last.1.max(hi),
            _ => intervals.push((lo, hi)),
        }
    }
    Ok(BandSet { flux, intervals, edge_consistency: consistency })
}

/// Flux × energy occupancy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyRaster {
    pub q_max: u64,
    pub energy_bins: usize,
    pub fluxes: Vec<Convergent>,
    pub bands: Vec<BandSet>,
    /// Flux-major: `occupancy[f * energy_bins + bin]`, bin 0 lowest energy.
    pub occupancy: Vec<u8>,
}

/// Lower edge of bin `i` of `bins` over `[-4, 4]`; exactly antisymmetric,
/// `edge(bins - i) = -edge(i)`.
fn bin_edge(i: usize, bins: usize) -> f64 {
    4.0 * (2.0 * i as f64 - bins as f64) / bins as f64
}

/// A bin is lit when its closed range meets a band padded by [`TOUCH_TOL`].
pub fn rasterize(bands: &BandSet, bins: usize) -> Vec<u8> {
    let mut row = vec![0u8; bins];
    let mut k = 0;
    let iv = &bands.intervals;
    for (j, px) in row.iter_mut().enumerate() {
        let (lo, hi) = (bin_edge(j, bins), bin_edge(j + 1, bins));
        while k < iv.len() && iv[k].1 + TOUCH_TOL < lo {
            k += 1;
        }
        if k < iv.len() && iv[k].0 - TOUCH_TOL <= hi {
            *px = 255;
        }
    }
    row
}

pub fn render_butterfly(q_max: u64, energy_bins: usize, threads: usize) -> Result<ButterflyRaster> {
    if q_max == 0 || q_max > MAX_RASTER_Q {
        return Err(Error::invalid(format!("q_max = {q_max} must lie in 1..={MAX_RASTER_Q}")));
    }
    if energy_bins == 0 || energy_bins > MAX_BINS {
        return Err(Error::invalid(format!("energy_bins = {energy_bins} must lie in 1..={MAX_BINS}")));
    }
    let fluxes = farey(q_max);
    let rows = map_indexed(fluxes.len(), threads, |i| {
        let f = fluxes[i];
        bands_rational(f.p, f.q).map_err(|e| Error::Flux { p: f.p, q: f.q, source: Box::new(e) })
    });
    let bands = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let occupancy = bands.iter().flat_map(|b| rasterize(b, energy_bins)).collect();
    Ok(ButterflyRaster { q_max, energy_bins, fluxes, bands, occupancy })
}

impl ButterflyRaster {
    pub fn width(&self) -> usize {
        self.fluxes.len()
    }

    pub fn height(&self) -> usize {
        self.energy_bins
    }

    /// Occupancy of one flux, bin 0 lowest energy.
    pub fn row(&self, flux_index: usize) -> &[u8] {
        &self.occupancy[flux_index * self.energy_bins..(flux_index + 1) * self.energy_bins]
    }

    /// Binary PGM: one column per flux, top row is the highest energy bin.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width(), self.height())?;
        let mut line = vec![0u8; self.width()];
        for r in 0..self.height() {
            let bin = self.energy_bins - 1 - r;
            for (x, px) in line.iter_mut().enumerate() {
                *px = self.occupancy[x * self.energy_bins + bin];
            }
            w.write_all(&line)?;
        }
        Ok(())
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.occupancy.len() + 32);
        self.write_pgm(&mut buf).expect("writing to memory");
        buf
    }

    pub fn write_bands_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_bands_csv(&self.bands, w)
    }
}

/// One row `p,q,lo,hi` per band interval.
pub fn write_bands_csv<W: Write>(bands: &[BandSet], mut w: W) -> io::Result<()> {
    writeln!(w, "p,q,lo,hi")?;
    for b in bands {
        for &(lo, hi) in &b.intervals {
            writeln!(w, "{},{},{},{}", b.flux.p, b.flux.q, fmt_f64(lo), fmt_f64(hi))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(p: u64, q: u64) -> Convergent {
        Convergent { p, q }
    }

    /// Bands of `{|Δ₀| ≤ 4}` located by a fine scan plus bisection.
    fn scan_oracle(p: u64, q: u64) -> Vec<(f64, f64)> {
        let inside = |l: f64| mean_discriminant(p, q, l)[0].abs() <= 4.0 + 1e-7;
        let n = 400_000;
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut start: Option<f64> = None;
        for i in 0..=n {
            let l = -4.5 + 9.0 * i as f64 / n as f64;
            match (inside(l), start) {
                (true, None) => start = Some(l),
                (false, Some(s)) => {
                    out.push((s, l));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }

    #[test]
    fn golden_convergents() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let cs = convergents(g, 7).unwrap();
        assert_eq!(cs, vec![c(0, 1), c(1, 1), c(1, 2), c(2, 3), c(3, 5), c(5, 8), c(8, 13)]);
        // Fibonacci recurrence and the Diophantine bound
        let cs = convergents(g, 30).unwrap();
        for w in cs.windows(3) {
            assert_eq!(w[2].q, w[1].q + w[0].q);
        }
        for k in &cs {
            assert_eq!(gcd(k.p, k.q), 1);
            assert!((g - k.value()).abs() < 1.0 / (k.q * k.q) as f64);
        }
    }

    #[test]
    fn rational_terminates() {
        assert_eq!(convergents(1.0 / 3.0, 10).unwrap(), vec![c(0, 1), c(1, 3)]);
        assert_eq!(convergents(0.5, 10).unwrap(), vec![c(0, 1), c(1, 2)]);
        assert_eq!(*convergents(0.375, 10).unwrap().last().unwrap(), c(3, 8));
    }

    #[test]
    fn pi_convergents() {
        let cs = convergents(PI - 3.0, 4).unwrap();
        assert_eq!(cs, vec![c(0, 1), c(1, 7), c(15, 106), c(16, 113)]);
    }

    #[test]
    fn convergent_domain() {
        assert!(convergents(0.0, 3).is_err());
        assert!(convergents(1.0, 3).is_err());
        assert!(convergents(0.3, 41).is_err());
    }

    #[test]
    fn farey_counts() {
        // |F_n| = 1 + Σ φ(k)
        let phi = |k: u64| (1..=k).filter(|&i| gcd(i, k) == 1).count();
        for n in 1..=30u64 {
            let f = farey(n);
            assert_eq!(f.len(), 1 + (1..=n).map(phi).sum::<usize>());
            assert!(f.windows(2).all(|w| w[0].value() < w[1].value()));
            assert!(f.iter().all(|x| gcd(x.p, x.q) == 1 && x.q <= n));
        }
        assert_eq!(farey(30).len(), 279);
        assert_eq!(farey(2), vec![c(0, 1), c(1, 2), c(1, 1)]);
    }

    #[test]
    fn half_flux() {
        let b = bands_rational(1, 2).unwrap();
        assert_eq!(b.count(), 1);
        let r = 2.0 * 2f64.sqrt();
        assert!((b.intervals[0].0 + r).abs() < 1e-9 && (b.intervals[0].1 - r).abs() < 1e-9);
    }

    #[test]
    fn third_flux() {
        let b = bands_rational(1, 3).unwrap();
        assert_eq!(b.count(), 3);
        for (x, y) in b.intervals.iter().zip(b.intervals.iter().rev()) {
            assert!((x.0 + y.1).abs() < 1e-9 && (x.1 + y.0).abs() < 1e-9);
        }
        let oracle = scan_oracle(1, 3);
        assert_eq!(oracle.len(), 3);
        for (x, y) in b.intervals.iter().zip(&oracle) {
            assert!((x.0 - y.0).abs() < 1e-4 && (x.1 - y.1).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_flux() {
        assert_eq!(bands_rational(1, 1).unwrap().intervals, vec![(-4.0, 4.0)]);
        assert_eq!(bands_rational(0, 1).unwrap().intervals, vec![(-4.0, 4.0)]);
    }

    #[test]
    fn flux_validation() {
        assert!(bands_rational(2, 4).is_err());
        assert!(bands_rational(0, 3).is_err());
        assert!(bands_rational(3, 3).is_err());
        assert!(bands_rational(1, 201).is_err());
        assert!(bands_rational(2, 1).is_err());
    }

    #[test]
    fn band_counts_match_oracle() {
        for q in 2..=8u64 {
            for p in (1..q).filter(|&p| gcd(p, q) == 1) {
                let b = bands_rational(p, q).unwrap();
                let want = if q % 2 == 1 { q } else { q - 1 } as usize;
                assert_eq!(b.count(), want, "{p}/{q}");
                assert_eq!(scan_oracle(p, q).len(), want, "oracle {p}/{q}");
                // outer edges are simple roots of |Δ₀| = 4
                for &(lo, hi) in &b.intervals {
                    for e in [lo, hi] {
                        let [d, d1, _] = mean_discriminant(p, q, e);
                        assert!((d.abs() - 4.0).abs() / d1.abs() < 1e-8, "{p}/{q} at {e}");
                    }
                }
                // a tangential touch is only resolved to about √ε
                assert!(b.edge_consistency < 1e-7, "{p}/{q}: {}", b.edge_consistency);
            }
        }
    }

    #[test]
    fn edges_contained_and_symmetric() {
        for q in 2..=40u64 {
            for p in (1..q).filter(|&p| gcd(p, q) == 1) {
                let b = bands_rational(p, q).unwrap();
                assert!(b.count() <= q as usize);
                let iv = &b.intervals;
                assert!(iv.iter().all(|&(lo, hi)| -4.0 - 1e-9 <= lo && lo <= hi && hi <= 4.0 + 1e-9));
                assert!(iv.windows(2).all(|w| w[0].1 < w[1].0));
                for (x, y) in iv.iter().zip(iv.iter().rev()) {
                    assert!((x.0 + y.1).abs() < 1e-9, "{p}/{q}");
                }
            }
        }
    }

    #[test]
    fn measure_decreases_along_golden_convergents() {
        let m = |p, q| bands_rational(p, q).unwrap().measure();
        let (a, b, c) = (m(1, 2), m(3, 5), m(8, 13));
        assert!((a - 4.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!(a > b && b > c, "{a} {b} {c}");
    }

    #[test]
    fn large_q() {
        let b = bands_rational(89, 144).unwrap();
        assert_eq!(b.count(), 143);
        assert!(b.measure() < 0.5);
        assert!(bands_rational(61, 200).unwrap().count() <= 200);
    }

    #[test]
    fn small_raster() {
        let r = render_butterfly(2, 8, 2).unwrap();
        assert_eq!(r.fluxes, vec![c(0, 1), c(1, 2), c(1, 1)]);
        assert_eq!(r.row(0), &[255; 8]);
        // ±2√2 ≈ ±2.83: the outer bins [-4, -3] and [3, 4] stay dark
        let mut want = [255u8; 8];
        (want[0], want[7]) = (0, 0);
        assert_eq!(r.row(1), &want);
        let r = render_butterfly(2, 16, 1).unwrap();
        let mut want = [255u8; 16];
        (want[0], want[1], want[14], want[15]) = (0, 0, 0, 0);
        assert_eq!(r.row(1), &want);
    }

    #[test]
    fn raster_symmetries_and_pgm() {
        let r = render_butterfly(12, 200, 3).unwrap();
        assert_eq!(r, render_butterfly(12, 200, 1).unwrap());
        for (i, f) in r.fluxes.iter().enumerate() {
            let j = r.fluxes.iter().position(|g| g.q == f.q && g.p == f.q - f.p).unwrap();
            assert_eq!(r.row(i), r.row(j), "{}/{}", f.p, f.q);
            let row = r.row(i);
            assert!(row.iter().eq(row.iter().rev()));
        }
        let pgm = r.to_pgm();
        let header = format!("P5\n{} 200\n255\n", r.width());
        assert!(pgm.starts_with(header.as_bytes()));
        assert_eq!(pgm.len(), header.len() + r.width() * 200);
        let mut csv = Vec::new();
        r.write_bands_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("p,q,lo,hi\n0,1,-4,4\n"));
    }

    #[test]
    fn raster_limits() {
        assert!(render_butterfly(61, 10, 1).is_err());
        assert!(render_butterfly(5, 4097, 1).is_err());
        assert!(render_butterfly(0, 10, 1).is_err());
    }

    proptest! {
        #[test]
        fn reflection_same_bands(q in 2u64..=30, p0 in 1u64..30) {
            let p = 1 + p0 % (q - 1);
            prop_assume!(gcd(p, q) == 1);
            let a = bands_rational(p, q).unwrap();
            let b = bands_rational(q - p, q).unwrap();
            prop_assert_eq!(a.count(), b.count());
            for (x, y) in a.intervals.iter().zip(&b.intervals) {
                prop_assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
            }
        }

        #[test]
        fn convergents_approximate(alpha in 0.001f64..0.999) {
            // beyond q ~ 1e7 the bound is below double resolution
            for k in convergents(alpha, 20).unwrap().into_iter().filter(|k| k.q < 10_000_000) {
                prop_assert_eq!(gcd(k.p, k.q), 1);
                prop_assert!((alpha - k.value()).abs() <= 1.0 / (k.q * k.q) as f64);
            }
        }
    }
}
