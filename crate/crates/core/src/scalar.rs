//! The entry type of every tensor field.
//!
//! Two implementations exist: [`Poly`](crate::poly::Poly) (polynomial fields
//! in N coordinates) and [`RatFunc`](crate::ratfunc::RatFunc) (rational
//! functions of the first coordinate only, used by the cosmology metric).

use std::fmt::Debug;

use crate::rational::Rational;

pub trait Scalar: Clone + PartialEq + Debug + Send + Sync {
    /// Sum-of-products accumulator; see [`Scalar::acc_add`].
    type Acc;

    fn zero(dim: usize) -> Self;
    fn constant(dim: usize, c: Rational) -> Self;
    fn is_zero(&self) -> bool;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;

    /// Formal partial derivative along coordinate `k`.
    fn partial(&self, k: usize) -> Self;

    fn acc_new(dim: usize) -> Self::Acc;
    /// `acc += c * f_0 * f_1 * ...`
    fn acc_add(acc: &mut Self::Acc, c: &Rational, factors: &[&Self]);
    fn acc_finish(acc: Self::Acc) -> Self;
}

/// Scalars that form a field, so matrices over them can be inverted.
pub trait FieldScalar: Scalar {
    fn checked_inv(&self) -> Option<Self>;
}

/// Convenience: sum of `c_k * prod(factors_k)` for one output entry.
pub fn sum_products<S: Scalar>(dim: usize, terms: &[(Rational, Vec<&S>)]) -> S {
    let mut acc = S::acc_new(dim);
    for (c, fs) in terms {
        S::acc_add(&mut acc, c, fs);
    }
    S::acc_finish(acc)
}
