//! Finite projective geometry over GF(p^n): incidence structures,
//! collineations and semilinear maps, extension of partial collineations from
//! ample subsets, prime-set arithmetic, and a genus-zero function field
//! pipeline that recovers ring isomorphisms from projective data.

pub mod ample;
pub mod cli;
pub mod extend;
pub mod funcfield;
pub mod gf;
pub mod linalg;
pub mod numth;
pub mod poly;
pub mod primesets;
pub mod projgeom;
pub mod semilinear;

pub use ample::{is_ample, AmpleFamily, AmpleSubset};
pub use extend::{brute_force_extensions, extend, restrict, validate_partial, ExtendOptions, PartialCollineation};
pub use gf::{Fe, Gf};
pub use projgeom::ProjSpace;
pub use semilinear::{decode_ftpg, equal_up_to_scalar, Collineation, FieldIso, SemilinearIso};
