//! Block coordinate descent for nonconvex composite problems
//! min ½xᵀHx + qᵀx + h(x) − g(x) over a set with one coupling constraint
//! (simplex, nonnegative unit sphere, or a box cut by a hyperplane).
//!
//! Each iteration picks a small working set and solves the block subproblem
//! to global optimality by enumerating breakpoints and quartic roots, so the
//! limit points are coordinate-wise stationary rather than merely critical.
//!
//! Four problem families are built in: sparse index tracking
//! ([`ProblemInstance::sit`](model::ProblemInstance::sit)), nonnegative
//! sparse PCA, and two relaxations of binary least squares. PSG, MSCR and
//! PDCA are included as baselines.
//!
//! Start with the examples:
//!
//! | example | shows |
//! |---|---|
//! | `sparse_index_tracking` | all five solvers on one instance, sparsity check |
//! | `nonnegative_sparse_pca` | working-set rules on the sphere |
//! | `binary_programs` | binary/extreme-point solutions of the box relaxations |
//! | `block_subproblem` | a single exact pair update |
//! | `quartic_roots` | the real-root solver |
//! | `hybrid_escape` | BCD restarted from a PDCA critical point |
//! | `cws_probe` | testing a point for coordinate-wise stationarity |
//! | `expectation_identities` | random-block identities by enumeration |
//! | `parameter_sweep` | a TOML experiment run in parallel, CSV output |

pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod polyroots;
pub mod selection;
pub mod solvers;
pub mod subsolvers;

pub use error::{Error, Result};
