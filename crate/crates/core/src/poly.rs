//! Exact multivariate polynomials over the rationals.
//!
//! A monomial is packed into a `u64` with eight bits per coordinate, so a
//! product of monomials is a plain integer addition. Terms are kept sorted by
//! that key with no zero coefficients, which makes equality structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::coef::{Coef, KeyMap};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use crate::scalar::Scalar;

pub const MAX_DIM: usize = 6;
const BITS: u32 = 8;
const MASK: u64 = (1 << BITS) - 1;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    fn shift(k: usize) -> u32 {
        BITS * (MAX_DIM - 1 - k) as u32
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_DIM);
        let mut key = 0u64;
        for (k, &e) in exps.iter().enumerate() {
            assert!(e as u64 <= MASK, "exponent {e} too large");
            key |= (e as u64) << Self::shift(k);
        }
        Monomial(key)
    }

    pub fn exponent(self, k: usize) -> u32 {
        ((self.0 >> Self::shift(k)) & MASK) as u32
    }

    pub fn degree(self) -> u32 {
        (0..MAX_DIM).map(|k| self.exponent(k)).sum()
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }
}

/// A scalar field: exact polynomial in `dim` coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: Vec<(Monomial, Coef)>,
}

impl Poly {
    pub fn zero(dim: usize) -> Poly {
        Poly { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Poly {
        Poly::constant_coef(dim, Coef::from_rational(&c))
    }

    fn constant_coef(dim: usize, c: Coef) -> Poly {
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.push((Monomial::ONE, c));
        }
        p
    }

    /// The coordinate function `x_k`.
    pub fn var(dim: usize, k: usize) -> Result<Poly> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut e = vec![0; dim];
        e[k] = 1;
        Ok(Poly::monomial(dim, &e, Rational::one()))
    }

    pub fn monomial(dim: usize, exps: &[u32], c: Rational) -> Poly {
        assert_eq!(exps.len(), dim);
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.push((Monomial::from_exponents(exps), Coef::from_rational(&c)));
        }
        p
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Poly {
        let mut map: KeyMap<Coef> = KeyMap::default();
        for (e, c) in terms {
            assert_eq!(e.len(), dim);
            *map.entry(Monomial::from_exponents(&e)).or_insert(Coef::ZERO) += &Coef::from_rational(&c);
        }
        Self::from_map(dim, map)
    }

    fn from_map(dim: usize, map: KeyMap<Coef>) -> Poly {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|(m, _)| *m);
        Poly { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, Rational)> + '_ {
        self.terms
            .iter()
            .map(|(m, c)| ((0..self.dim).map(|k| m.exponent(k)).collect(), c.to_rational()))
    }

    /// Terms keyed by packed monomial, for building linear systems.
    pub fn packed_terms(&self) -> impl Iterator<Item = (Monomial, &Coef)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.coef_at(Monomial::from_exponents(exps)).to_rational()
    }

    pub fn coef_at(&self, key: Monomial) -> Coef {
        match self.terms.binary_search_by_key(&key, |(m, _)| *m) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Coef::ZERO,
        }
    }

    pub fn partial(&self, k: usize) -> Result<Poly> {
        if k >= self.dim {
            return Err(Error::IndexOutOfRange { index: k, dim: self.dim });
        }
        Ok(self.partial_unchecked(k))
    }

    fn partial_unchecked(&self, k: usize) -> Poly {
        let step = 1u64 << Monomial::shift(k);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exponent(k);
                (e > 0).then(|| (Monomial(m.0 - step), c.mul(&Coef::int(e.into()))))
            })
            .collect::<Vec<_>>();
        // lowering one exponent keeps lexicographic order
        Poly { dim: self.dim, terms }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.dim);
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_rational();
            for (k, x) in point.iter().enumerate() {
                let e = m.exponent(k);
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.dim);
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64();
                for (k, x) in point.iter().enumerate() {
                    t *= x.powi(m.exponent(k) as i32);
                }
                t
            })
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        self.scale_coef(&Coef::from_rational(c))
    }

    fn scale_coef(&self, c: &Coef) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, a)| (*m, a.mul(c))).collect(),
        }
    }

    /// Largest absolute coefficient, as a float; zero for the zero field.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max)
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let sign = |c: &Coef| if negate_other { c.neg() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0, sign(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = a[i].1.add(&sign(&b[j].1));
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (*m, sign(c))));
        Poly { dim: self.dim, terms: out }
    }

    fn product(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.dim, other.dim);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.dim);
        }
        let mut map = KeyMap::with_capacity_and_hasher(self.terms.len() * other.terms.len(), Default::default());
        mul_into(&mut map, &Coef::ONE, self, other);
        Self::from_map(self.dim, map)
    }
}

fn mul_into(map: &mut KeyMap<Coef>, c: &Coef, a: &Poly, b: &Poly) {
    for (ma, ca) in &a.terms {
        let cac = ca.mul(c);
        for (mb, cb) in &b.terms {
            let v = cac.mul(cb);
            map.entry(ma.mul(*mb))
                .and_modify(|x| *x += &v)
                .or_insert(v);
        }
    }
}

impl Scalar for Poly {
    type Acc = (usize, KeyMap<Coef>);

    fn zero(dim: usize) -> Self {
        Poly::zero(dim)
    }
    fn constant(dim: usize, c: Rational) -> Self {
        Poly::constant(dim, c)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.merge(rhs, false)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.merge(rhs, true)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.product(rhs)
    }
    fn negated(&self) -> Self {
        self.scale_coef(&Coef::int(-1))
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn partial(&self, k: usize) -> Self {
        assert!(k < self.dim, "coordinate {k} out of range");
        self.partial_unchecked(k)
    }
    fn acc_new(dim: usize) -> Self::Acc {
        (dim, KeyMap::default())
    }
    fn acc_add(acc: &mut Self::Acc, c: &Rational, factors: &[&Self]) {
        if c.is_zero() || factors.iter().any(|f| f.is_zero()) {
            return;
        }
        let c = Coef::from_rational(c);
        match factors {
            [] => {
                *acc.1.entry(Monomial::ONE).or_insert(Coef::ZERO) += &c;
            }
            [f] => {
                for (m, a) in &f.terms {
                    *acc.1.entry(*m).or_insert(Coef::ZERO) += &a.mul(&c);
                }
            }
            [init @ .., last] => {
                let mut head = (*init[0]).clone();
                for f in &init[1..] {
                    head = head.product(f);
                }
                mul_into(&mut acc.1, &c, &head, last);
            }
        }
    }
    fn acc_finish(acc: Self::Acc) -> Self {
        Poly::from_map(acc.0, acc.1)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.product(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale_coef(&Coef::int(-1))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest key first reads most naturally
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { c.neg() } else { c.clone() }.to_rational();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = (0..self.dim)
                .filter_map(|k| match m.exponent(k) {
                    0 => None,
                    1 => Some(format!("x{k}")),
                    e => Some(format!("x{k}^{e}")),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn x(dim: usize, k: usize) -> Poly {
        Poly::var(dim, k).unwrap()
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = Poly::constant(2, int(5));
        assert!(f.partial(0).unwrap().is_zero());
    }

    #[test]
    fn power_rule() {
        let f = &(&x(2, 0) * &x(2, 0)) * &x(2, 1);
        let expected = (&x(2, 0) * &x(2, 1)).scale(&int(2));
        assert_eq!(f.partial(0).unwrap(), expected);
    }

    #[test]
    fn out_of_range_partial() {
        let f = x(3, 1);
        assert_eq!(f.partial(3), Err(Error::IndexOutOfRange { index: 3, dim: 3 }));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let f = &x(2, 0) + &x(2, 1);
        let g = &f - &x(2, 1);
        assert_eq!(g, x(2, 0));
        assert_eq!((&f - &f).num_terms(), 0);
    }

    #[test]
    fn accumulator_matches_pairwise_products() {
        let a = &x(3, 0) + &Poly::constant(3, int(2));
        let b = &x(3, 1) - &x(3, 2);
        let c = &x(3, 0) * &x(3, 2);
        let mut acc = Poly::acc_new(3);
        Poly::acc_add(&mut acc, &int(3), &[&a, &b, &c]);
        Poly::acc_add(&mut acc, &int(-1), &[&c]);
        let direct = &(&(&a * &b) * &c).scale(&int(3)) - &c;
        assert_eq!(Poly::acc_finish(acc), direct);
    }

    #[test]
    fn display_is_readable() {
        let f = &(&x(2, 0) * &x(2, 0)).scale(&int(3)) - &Poly::constant(2, crate::rational::frac(1, 2));
        assert_eq!(f.to_string(), "3*x0^2 - 1/2");
    }

    #[test]
    fn eval_at_point() {
        let f = &(&x(2, 0) * &x(2, 1)) + &Poly::constant(2, int(1));
        assert_eq!(f.eval(&[int(2), int(3)]), int(7));
    }
}
