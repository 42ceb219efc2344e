//! Rational functions of the first coordinate `t`.
//!
//! The cosmology metric depends on `t` alone, and its inverse is exact only as
//! a rational function, so these fields carry a numerator/denominator pair of
//! dense univariate polynomials (ascending powers). Partial derivatives along
//! every other coordinate vanish.

use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{format_rational, to_f64, Rational};
use crate::scalar::{FieldScalar, Scalar};

/// Dense univariate polynomial, ascending powers, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> UPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub fn constant(c: Rational) -> UPoly {
        UPoly::new(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> UPoly {
        UPoly(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = Rational::zero();
        UPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        UPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dl = d.lead().expect("division by zero polynomial").clone();
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, b) in d.0.iter().enumerate() {
                    r[k + j] -= &c * b;
                }
            }
            q[k] = c;
        }
        (UPoly::new(q), UPoly::new(r))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.lead().cloned() {
            Some(l) => a.scale(&(Rational::one() / l)),
            None => a,
        }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + to_f64(c))
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            if var.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{}*{var}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

/// `num/den` in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    dim: usize,
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn new(dim: usize, num: UPoly, den: UPoly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::from_poly(dim, UPoly::zero());
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let l = Rational::one() / d.lead().unwrap();
        n = n.scale(&l);
        d = d.scale(&l);
        RatFunc { dim, num: n, den: d }
    }

    pub fn from_poly(dim: usize, p: UPoly) -> RatFunc {
        RatFunc {
            dim,
            num: p,
            den: UPoly::constant(Rational::one()),
        }
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn derivative(&self) -> RatFunc {
        // (n/d)' = (n'd - nd') / d^2
        let top = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(self.dim, top, self.den.mul(&self.den))
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let d = self.den.eval(t);
        (!d.is_zero()).then(|| self.num.eval(t) / d)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.num.eval_f64(t) / self.den.eval_f64(t)
    }
}

impl Scalar for RatFunc {
    type Acc = RatFunc;

    fn zero(dim: usize) -> Self {
        RatFunc::from_poly(dim, UPoly::zero())
    }
    fn constant(dim: usize, c: Rational) -> Self {
        RatFunc::from_poly(dim, UPoly::constant(c))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return RatFunc::new(self.dim, self.num.add(&rhs.num), self.den.clone());
        }
        RatFunc::new(
            self.dim,
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }
    fn times(&self, rhs: &Self) -> Self {
        RatFunc::new(self.dim, self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
    fn negated(&self) -> Self {
        RatFunc {
            dim: self.dim,
            num: self.num.scale(&-Rational::one()),
            den: self.den.clone(),
        }
    }
    fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        RatFunc {
            dim: self.dim,
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
    fn partial(&self, k: usize) -> Self {
        assert!(k < self.dim, "coordinate {k} out of range");
        if k == 0 {
            self.derivative()
        } else {
            Self::zero(self.dim)
        }
    }
    fn acc_new(dim: usize) -> Self::Acc {
        Self::zero(dim)
    }
    fn acc_add(acc: &mut Self::Acc, c: &Rational, factors: &[&Self]) {
        if c.is_zero() || factors.iter().any(|f| f.is_zero()) {
            return;
        }
        let mut p = Self::constant(acc.dim, c.clone());
        for f in factors {
            p = p.times(f);
        }
        *acc = acc.plus(&p);
    }
    fn acc_finish(acc: Self::Acc) -> Self {
        acc
    }
}

impl FieldScalar for RatFunc {
    fn checked_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| RatFunc::new(self.dim, self.den.clone(), self.num.clone()))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn reduces_to_lowest_terms() {
        // (t^2 - 1)/(2t - 2) = (t + 1)/2
        let f = RatFunc::new(4, up(&[-1, 0, 1]), up(&[-2, 2]));
        assert_eq!(f.num(), &UPoly::new(vec![frac(1, 2), frac(1, 2)]));
        assert_eq!(f.den(), &up(&[1]));
    }

    #[test]
    fn quotient_rule() {
        // d/dt (1/t) = -1/t^2
        let f = RatFunc::new(1, up(&[1]), up(&[0, 1]));
        let g = RatFunc::new(1, up(&[-1]), up(&[0, 0, 1]));
        assert_eq!(f.derivative(), g);
    }

    #[test]
    fn inverse_times_self_is_one() {
        let f = RatFunc::new(2, up(&[1, 2, 3]), up(&[5, 0, 1]));
        let one = f.times(&f.checked_inv().unwrap());
        assert_eq!(one, RatFunc::constant(2, int(1)));
    }

    #[test]
    fn other_coordinates_are_constant() {
        let f = RatFunc::from_poly(3, up(&[0, 0, 1]));
        assert!(f.partial(2).is_zero());
    }

    #[test]
    fn display() {
        let f = RatFunc::new(1, up(&[0, 3]), up(&[1, 0, 1]));
        assert_eq!(f.to_string(), "(3*t)/(t^2 + 1)");
    }
}
