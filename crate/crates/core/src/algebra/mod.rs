//! Scalars, symmetric multilinear forms, and exact linear algebra.

pub mod form;
pub mod linalg;
pub mod scalar;

pub use form::{DenseForm, SymmetricForm};
pub use scalar::{
    dot, dot_f64, format_rat, format_rat_vec, parse_rat, primitive, rat, rat_from_f64, rat_to_f64,
    rat_vec, ratio, serialize_rat, to_f64_vec, Field, Rat, Scalar,
};

use crate::error::Result;

/// `eval_form`: multilinear evaluation of `form` on `args`.
pub fn eval_form<T: Field>(form: &SymmetricForm<T>, args: &[&[T]]) -> Result<T> {
    form.eval(args)
}

/// `power_contract`: partial evaluation of `form` at `k` copies of `beta`.
pub fn power_contract<T: Field>(
    form: &SymmetricForm<T>,
    beta: &[T],
    k: usize,
) -> Result<SymmetricForm<T>> {
    form.power_contract(beta, k)
}
