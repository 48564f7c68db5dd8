//! Exact-arithmetic machinery for the quiver description of framed
//! perverse coherent sheaves on the blown-up plane: representation data
//! with the moment-map relation, stability in a two-parameter family with
//! Hom-vanishing criteria, Harder-Narasimhan and Jordan-Holder
//! filtrations, Kronecker pencil canonical forms, pointwise monad
//! evaluation on the surface, wall/chamber bookkeeping, and the bridge to
//! plane ADHM data.
//!
//! All scalar arithmetic is exact: arbitrary-precision rationals or
//! finite fields `GF(p^k)`, behind the [`field::Field`] trait. The core
//! is generic over that trait; the crate root exports concrete aliases
//! for the two supported scalar types.
//!
//! ```
//! use adhm_core::{GaloisField, StabilityParam, StabilityStatus};
//! use adhm_core::rep::cm_data;
//! use adhm_core::stability::zeta_semistable;
//!
//! // The rigid representation C_1 is stable on its wall.
//! let f2 = GaloisField::prime(2)?;
//! let c1 = cm_data(f2, 1);
//! let zeta = StabilityParam::from_ints(-2, 1);
//! let verdict = zeta_semistable(&c1, &zeta, true, None)?;
//! assert_eq!(verdict.status, StabilityStatus::Stable);
//! # Ok::<(), adhm_core::Error>(())
//! ```

pub mod error;
pub mod field;
pub mod filtration;
pub mod json;
pub mod kronecker;
pub mod linsys;
pub mod mat;
pub mod monad;
pub mod plane;
pub mod poly;
pub mod rep;
pub mod stability;
pub mod subspace;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, GaloisField, Rationals};
pub use mat::Mat;
pub use rep::{BlowupRep, NewQuiverRep, SubrepPair};
pub use stability::{StabilityParam, StabilityStatus, StabilityVerdict};
pub use subspace::Subspace;

/// Matrices over the rationals.
pub type QMat = Mat<Rationals>;
/// Matrices over a finite field.
pub type GfMat = Mat<GaloisField>;
/// Blowup-quiver data over the rationals.
pub type QBlowupRep = BlowupRep<Rationals>;
/// Blowup-quiver data over a finite field.
pub type GfBlowupRep = BlowupRep<GaloisField>;
/// Subspaces over the rationals.
pub type QSubspace = Subspace<Rationals>;
/// Subspaces over a finite field.
pub type GfSubspace = Subspace<GaloisField>;

/// The rank/kernel/image triple of a matrix: the rank, the
/// kernel inside the domain, and the column span inside the target.
pub fn rank_kernel<F: Field>(m: &Mat<F>) -> (usize, Subspace<F>, Subspace<F>) {
    let kernel = Subspace::from_vectors(m.field.clone(), m.cols, &m.kernel_rows());
    let image = Subspace::span(&m.transpose());
    let rank = m.cols - kernel.dim();
    (rank, kernel, image)
}
