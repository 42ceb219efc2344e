//! Polynomial coefficients: exact rationals that stay on machine words while
//! they fit and promote to [`Rational`] when they do not.

use std::hash::{BuildHasherDefault, Hasher};
use std::ops::{AddAssign, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::rational::Rational;

/// Canonical: `Small` whenever numerator and denominator fit in `i64`,
/// denominator positive, lowest terms. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Coef {
    Small(i64, i64),
    Big(Rational),
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Coef {
    pub const ZERO: Coef = Coef::Small(0, 1);
    pub const ONE: Coef = Coef::Small(1, 1);

    pub fn int(n: i64) -> Coef {
        Coef::Small(n, 1)
    }

    // n/d with d != 0, both i128
    fn from_i128(mut n: i128, mut d: i128) -> Coef {
        if d < 0 {
            // i128::MIN never occurs: operands come from i64 products
            n = -n;
            d = -d;
        }
        if d != 1 {
            let g = gcd(n.unsigned_abs(), d as u128) as i128;
            if g > 1 {
                n /= g;
                d /= g;
            }
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Coef::Small(a, b),
            _ => Coef::Big(Rational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: Rational) -> Coef {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Coef::Small(a, b),
            _ => Coef::Big(r),
        }
    }

    pub fn from_rational(r: &Rational) -> Coef {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Coef::Small(a, b),
            _ => Coef::Big(r.clone()),
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Coef::Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Coef::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coef::Small(0, _))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coef::Small(n, _) => *n < 0,
            Coef::Big(r) => r < &Rational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coef::Small(n, d) => *n as f64 / *d as f64,
            Coef::Big(r) => crate::rational::to_f64(r),
        }
    }

    pub fn add(&self, o: &Coef) -> Coef {
        match (self, o) {
            (Coef::Small(a, 1), Coef::Small(b, 1)) => match a.checked_add(*b) {
                Some(s) => Coef::Small(s, 1),
                None => Coef::from_i128(*a as i128 + *b as i128, 1),
            },
            (Coef::Small(a, b), Coef::Small(c, d)) if b == d => Coef::from_i128(*a as i128 + *c as i128, *b as i128),
            (Coef::Small(a, b), Coef::Small(c, d)) => Coef::from_i128(
                *a as i128 * *d as i128 + *c as i128 * *b as i128,
                *b as i128 * *d as i128,
            ),
            _ => Coef::from_big(self.to_rational() + o.to_rational()),
        }
    }

    pub fn mul(&self, o: &Coef) -> Coef {
        match (self, o) {
            (Coef::Small(a, 1), Coef::Small(b, 1)) => match a.checked_mul(*b) {
                Some(p) => Coef::Small(p, 1),
                None => Coef::from_i128(*a as i128 * *b as i128, 1),
            },
            (Coef::Small(a, b), Coef::Small(c, d)) => {
                Coef::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Coef::from_big(self.to_rational() * o.to_rational()),
        }
    }

    pub fn neg(&self) -> Coef {
        match self {
            Coef::Small(n, d) => match n.checked_neg() {
                Some(m) => Coef::Small(m, *d),
                None => Coef::from_i128(-(*n as i128), *d as i128),
            },
            Coef::Big(r) => Coef::from_big(-r),
        }
    }
}

impl AddAssign<&Coef> for Coef {
    fn add_assign(&mut self, o: &Coef) {
        *self = Coef::add(self, o);
    }
}

impl Mul for &Coef {
    type Output = Coef;
    fn mul(self, o: &Coef) -> Coef {
        Coef::mul(self, o)
    }
}

impl Neg for &Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        Coef::neg(self)
    }
}

/// Hasher for packed monomial keys; a single multiply spreads the bits.
#[derive(Default, Clone, Copy)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }
    fn write_u64(&mut self, n: u64) {
        self.0 = (n ^ (n >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

pub type KeyMap<V> = std::collections::HashMap<crate::poly::Monomial, V, BuildHasherDefault<KeyHasher>>;
