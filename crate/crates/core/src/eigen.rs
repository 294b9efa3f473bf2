//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices, and band
//! sweeps over boundary-phase grids.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{build_am_matrix, build_harper_matrix, unit, HermitianMatrix, OperatorSpec};
use crate::parallel::{default_threads, map_indexed};

const MAX_SWEEPS: usize = 60;
const OFF_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[j]` is the unit eigenvector paired with `values[j]`.
    pub vectors: Vec<Vec<Complex64>>,
    /// `max_j ‖A v_j - λ_j v_j‖₂` against the input matrix.
    pub residual: f64,
}

impl EigenDecomposition {
    /// `max |⟨v_i, v_j⟩ - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.vectors.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let g: Complex64 = self.vectors[i].iter().zip(&self.vectors[j]).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn residual(m: &HermitianMatrix, values: &[f64], vectors: &[Vec<Complex64>]) -> f64 {
    values
        .iter()
        .zip(vectors)
        .map(|(&l, v)| {
            m.mul_vec(v)
                .iter()
                .zip(v)
                .map(|(av, x)| (av - x * l).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Full eigendecomposition by row-cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary,
/// then applies the real symmetric Jacobi rotation. Converged when the
/// off-diagonal Frobenius mass falls below `1e-13 ‖A‖_F`.
pub fn eigen_hermitian(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.raw().to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let norm = m.frobenius_norm();
    let target = OFF_TOL * norm;

    let mut converged = off_diagonal_norm(&a, n) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = apq / r; // e^{iφ}
                let ec = e.conj();

                // A ← A J, with J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * ec * s;
                    a[k * n + q] = akp * s + akq * ec * c;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c - vkq * ec * s;
                    v[k * n + q] = vkp * s + vkq * ec * c;
                }
                // A ← J^H A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * e * s;
                    a[q * n + k] = apk * s + aqk * e * c;
                }
                a[p * n + p] = Complex64::new(app - t * r, 0.0);
                a[q * n + q] = Complex64::new(aqq + t * r, 0.0);
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a, n) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors: Vec<Vec<Complex64>> = order.iter().map(|&j| (0..n).map(|k| v[k * n + j]).collect()).collect();
    let res = residual(m, &values, &vectors);
    if !converged {
        return Err(Error::NoConvergence { sweeps, residual: res });
    }
    Ok(EigenDecomposition { values, vectors, residual: res })
}

/// Ascending eigenvalues only.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    eigen_hermitian(m).map(|d| d.values)
}

/// Sampled band functions `E_j(m₁/N, m₂/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGrid {
    pub grid_n: usize,
    /// 2 for the Harper torus `(ξ₁, ξ₂)`, 1 for the almost Mathieu circle.
    pub dims: usize,
    energies: Vec<Vec<f64>>,
}

impl BandGrid {
    /// Sorted energies at grid index `m₁` (and `m₂` for 2D), both 1-based.
    pub fn energies_at(&self, m1: usize, m2: usize) -> &[f64] {
        let idx = if self.dims == 2 { (m1 - 1) * self.grid_n + (m2 - 1) } else { m1 - 1 };
        &self.energies[idx]
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize, &[f64])> {
        let (g, d) = (self.grid_n, self.dims);
        self.energies.iter().enumerate().map(move |(i, e)| {
            if d == 2 {
                (i / g + 1, i % g + 1, e.as_slice())
            } else {
                (i + 1, 0, e.as_slice())
            }
        })
    }

    pub fn all_energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.energies.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.energies.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Harper band functions on the `grid_n × grid_n` phase grid
/// `ξ_i = e^{2πi m_i/grid_n}`, `m_i ∈ 1..=grid_n`.
pub fn band_sweep(spec: &OperatorSpec, grid_n: usize) -> Result<BandGrid> {
    band_sweep_threads(spec, grid_n, default_threads())
}

pub fn band_sweep_threads(spec: &OperatorSpec, grid_n: usize, threads: usize) -> Result<BandGrid> {
    spec.validate()?;
    if grid_n == 0 {
        return Err(Error::invalid("grid_n must be at least 1"));
    }
    let g = grid_n as f64;
    let results = map_indexed(grid_n * grid_n, threads, |i| {
        let (m1, m2) = (i / grid_n + 1, i % grid_n + 1);
        let at = spec.with_phases(unit(m1 as f64 / g), unit(m2 as f64 / g));
        build_harper_matrix(&at)
            .and_then(|h| eigenvalues(&h))
            .map_err(|e| Error::GridPoint { m1, m2, source: Box::new(e) })
    });
    let energies = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BandGrid { grid_n, dims: 2, energies })
}

/// Almost Mathieu band functions at `ξ = e^{2πi m/grid_n}`, `m ∈ 1..=grid_n`.
pub fn am_band_sweep(a: usize, alpha: f64, comp_l: i64, grid_n: usize, threads: usize) -> Result<BandGrid> {
    if grid_n == 0 {
        return Err(Error::invalid("grid_n must be at least 1"));
    }
    let results = map_indexed(grid_n, threads, |i| {
        build_am_matrix(a, alpha, comp_l, unit((i + 1) as f64 / grid_n as f64))
            .and_then(|h| eigenvalues(&h))
            .map_err(|e| Error::GridPoint { m1: i + 1, m2: 0, source: Box::new(e) })
    });
    let energies = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BandGrid { grid_n, dims: 1, energies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
        let lower: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..=i).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        HermitianMatrix::from_lower(&lower)
    }

    #[test]
    fn diagonal_input() {
        let mut m = HermitianMatrix::zeros(3);
        m.add_diagonal(0, 3.0);
        m.add_diagonal(1, -1.0);
        m.add_diagonal(2, 2.0);
        let d = eigen_hermitian(&m).unwrap();
        assert_eq!(d.values, vec![-1.0, 2.0, 3.0]);
        assert_eq!(d.vectors[0], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(d.vectors[2], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn complex_two_by_two() {
        let m = HermitianMatrix::from_lower(&[vec![c(0.0, 0.0)], vec![c(1.0, -1.0), c(0.0, 0.0)]]);
        let d = eigen_hermitian(&m).unwrap();
        let r = 2f64.sqrt();
        assert!((d.values[0] + r).abs() < 1e-14 && (d.values[1] - r).abs() < 1e-14);
    }

    #[test]
    fn empty_and_zero_matrices() {
        assert!(eigen_hermitian(&HermitianMatrix::zeros(0)).unwrap().values.is_empty());
        assert_eq!(eigen_hermitian(&HermitianMatrix::zeros(4)).unwrap().values, vec![0.0; 4]);
    }

    #[test]
    fn random_matrices_residual_orthonormality_trace() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let n = rng.gen_range(1..=20);
            let m = random_hermitian(&mut rng, n);
            let d = eigen_hermitian(&m).unwrap();
            let fro = m.frobenius_norm();
            assert!(d.residual <= 1e-10 * (1.0 + fro));
            assert!(d.orthonormality_defect() < 1e-10);
            assert!(d.values.windows(2).all(|w| w[0] <= w[1]));
            let tr: f64 = d.values.iter().sum();
            assert!((tr - m.trace()).abs() <= 1e-9 * (1.0 + m.trace().abs().max(fro)));
        }
    }

    #[test]
    fn conjugate_phases_same_spectrum() {
        let spec = OperatorSpec::new(3, 5, 0.3, 0.1).unwrap().with_phases(unit(0.17), unit(0.42));
        let h = build_harper_matrix(&spec).unwrap();
        let e1 = eigenvalues(&h).unwrap();
        let e2 = eigenvalues(&h.conj()).unwrap();
        // conjugating the matrix is (α, β, ξ) → (1-α, 1-β, ξ̄)
        let mut spec_c = spec.with_phases(spec.xi1.conj(), spec.xi2.conj());
        spec_c.alpha = 1.0 - spec.alpha;
        spec_c.beta = 1.0 - spec.beta;
        let e3 = eigenvalues(&build_harper_matrix(&spec_c).unwrap()).unwrap();
        for ((x, y), z) in e1.iter().zip(&e2).zip(&e3) {
            assert!((x - y).abs() < 1e-10);
            assert!((x - z).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_zero_flux_single_point() {
        let spec = OperatorSpec::new(3, 5, 0.0, 0.0).unwrap();
        let g = band_sweep(&spec, 1).unwrap();
        assert_eq!(g.len(), 15);
        assert!((g.energies_at(1, 1)[14] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_counts_and_bounds() {
        let spec = OperatorSpec::new(3, 5, 0.41, 0.13).unwrap().with_component(1, 2);
        let g = band_sweep_threads(&spec, 4, 3).unwrap();
        assert_eq!(g.len(), 16 * 15);
        assert!(g.all_energies().all(|e| e.abs() <= 4.0 + 1e-9));
        assert_eq!(g, band_sweep_threads(&spec, 4, 1).unwrap());
    }

    #[test]
    fn even_grid_negation_symmetry() {
        for &(al, be) in &[(0.0, 0.0), (0.3, 0.1), (0.77, 0.52)] {
            let spec = OperatorSpec::new(3, 5, al, be).unwrap();
            let g = band_sweep(&spec, 2).unwrap();
            let mut e: Vec<f64> = g.all_energies().collect();
            e.sort_by(f64::total_cmp);
            let n = e.len();
            for i in 0..n {
                assert!((e[i] + e[n - 1 - i]).abs() < 1e-9, "α={al} β={be}");
            }
        }
    }

    #[test]
    fn am_sweep_shape() {
        let g = am_band_sweep(5, 0.4, 0, 8, 2).unwrap();
        assert_eq!(g.len(), 40);
        assert_eq!(g.points().count(), 8);
        assert!(g.all_energies().all(|e| e.abs() <= 4.0 + 1e-9));
    }
}
