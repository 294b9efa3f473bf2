//! Spectral theory of the two-dimensional Harper operator and the almost
//! Mathieu operator: Bloch matrices, band spectra, elliptic periods, densities
//! of states, spectral zeta functions and the Hofstadter butterfly.

pub mod butterfly;
pub mod dos;
pub mod eigen;
pub mod elliptic;
pub mod error;
pub mod format;
pub mod lattice;
pub mod parallel;
pub mod periods;
pub mod quad;
pub mod spectral;
pub mod verify;

pub use butterfly::{bands_rational, convergents, farey, render_butterfly, BandSet, ButterflyRaster, Convergent};
pub use dos::{dos_am, dos_counting_derivative, dos_elliptic, ids_counting, DosCurve, DosFlag, DosPoint};
pub use eigen::{band_sweep, eigen_hermitian, BandGrid, EigenDecomposition};
pub use elliptic::{complete_k, incomplete_f, landen_check, EllipticModulus};
pub use error::{Error, Result};
pub use lattice::{build_am_matrix, build_harper_matrix, char_poly_am, factorization_report, HermitianMatrix, OperatorSpec};
pub use periods::{dos_from_half_periods, tau_invariant, EllipticCurvePair};
pub use spectral::{partition_harper, zeta_am_quadrature, zeta_am_winding, zeta_harper, ZetaTable};
