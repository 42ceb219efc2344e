//! Seeded random fields for verification sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::Poly;
use crate::rational::{frac, int, Rational};
use crate::tensor::TensorField;

pub type Rng8 = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldParams {
    pub degree: u32,
    /// Integer coefficients are drawn from `-bound..=bound`.
    pub bound: i64,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams { degree: 2, bound: 3 }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent seed for a sub-task, so parallel sweeps do not depend on
/// scheduling order.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn rng(base: u64, path: &[u64]) -> Rng8 {
    Rng8::seed_from_u64(derive_seed(base, path))
}

/// Exponent vectors of total degree at most `degree` in `dim` variables.
pub fn monomials(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[k] = e;
            go(k + 1, left - e, cur, out);
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    go(0, degree, &mut vec![0; dim], &mut out);
    out
}

pub fn random_poly(rng: &mut impl Rng, dim: usize, p: FieldParams) -> Poly {
    Poly::from_terms(
        dim,
        monomials(dim, p.degree)
            .into_iter()
            .map(|e| (e, int(rng.gen_range(-p.bound..=p.bound)))),
    )
}

pub fn random_tensor(
    rng: &mut impl Rng,
    dim: usize,
    upper: usize,
    lower: usize,
    p: FieldParams,
) -> TensorField<Poly> {
    TensorField::from_fn(dim, upper, lower, |_| random_poly(rng, dim, p))
}

/// A small nonzero-denominator rational `a/b` with `|a| <= 5`, `1 <= b <= 4`.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    frac(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count() {
        // C(n + d, d)
        assert_eq!(monomials(3, 2).len(), 10);
        assert_eq!(monomials(4, 3).len(), 35);
    }

    #[test]
    fn same_seed_same_field() {
        let a = random_poly(&mut rng(7, &[1, 2]), 3, FieldParams::default());
        let b = random_poly(&mut rng(7, &[1, 2]), 3, FieldParams::default());
        let c = random_poly(&mut rng(7, &[1, 3]), 3, FieldParams::default());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degree_bound_respected() {
        let f = random_poly(&mut rng(1, &[]), 4, FieldParams { degree: 3, bound: 3 });
        assert!(f.degree().unwrap_or(0) <= 3);
    }
}
