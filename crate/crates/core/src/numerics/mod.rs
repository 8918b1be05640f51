//! Shared numerical kernels: bracketed root finding, finite-difference
//! derivatives, and the flat Hodge star.

mod fd;
mod hodge;
mod root;

pub use fd::{
    fd_d_one_form_r3, fd_d_two_form_r4, fd_gradient, fd_hessian, fd_laplacian, fd_partial,
    fd_second, FdOrder, FdSettings, THREE_FORM_TRIPLES_R4, TWO_FORM_PAIRS_R4,
};
pub use hodge::{hodge_star_r3, hodge_star_r3_two_form};
pub use root::{solve_monotone_root, RootSolveSettings};
