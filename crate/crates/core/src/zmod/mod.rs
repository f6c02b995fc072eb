//! Exact integer linear algebra and finitely generated abelian groups.

mod matrix;
mod module;
mod normal_form;

pub use matrix::IntMatrix;
pub use module::{
    coset_representatives, hom_module, isolator, AbelianModule, AbelianPresentation, HomModule, Submodule,
};
pub use normal_form::{
    hnf, hnf_basis, integer_kernel, left_kernel, smith, snf, solve_integer, IntegerSolution, SmithForm,
};
