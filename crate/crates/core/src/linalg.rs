//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<RationalMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { left: cols, right: bad.len() });
        }
        Ok(RationalMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<RationalMatrix> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Rank by Bareiss fraction-free elimination on integer-scaled rows.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows).map(|r| integer_row(self.row(r))).collect();
        let mut rank = 0;
        let mut prev = BigInt::one();
        for c in 0..self.cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for r in rank + 1..m.len() {
                for k in c + 1..self.cols {
                    let v = &m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k];
                    // exact by Sylvester's identity
                    m[r][k] = v / &prev;
                }
                m[r][c] = BigInt::zero();
            }
            prev = m[rank][c].clone();
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Some `x` with `self * x = b`, free variables set to zero.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut e = Echelon::new(self.cols);
        for (r, rhs) in b.iter().enumerate() {
            if e.insert(self.row(r).to_vec(), rhs.clone()) == Insert::Inconsistent {
                return None;
            }
        }
        Some(e.particular_solution())
    }

    /// Inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut out = RationalMatrix::zeros(n, n);
        for c in 0..n {
            let mut e = Echelon::new(n);
            for r in 0..n {
                let rhs = if r == c { Rational::one() } else { Rational::zero() };
                e.insert(self.row(r).to_vec(), rhs);
            }
            if !e.is_full() {
                return None;
            }
            for (r, v) in e.particular_solution().into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Some(out)
    }
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Insert {
    /// The row raised the rank.
    Independent,
    /// The row was a combination of earlier rows and agreed with their right sides.
    Redundant,
    /// The row reduced to `0 = nonzero`.
    Inconsistent,
}

/// Incrementally built reduced row-echelon form of an augmented system
/// `A x = b`, for feeding rows one at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    // pivot column, row (leading 1 at the pivot), right side
    rows: Vec<(usize, Vec<Rational>, Rational)>,
}

impl Echelon {
    pub fn new(cols: usize) -> Echelon {
        Echelon { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _, _)| *p).collect()
    }

    fn reduce(&self, row: &mut [Rational], rhs: &mut Rational) {
        for (p, r, b) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let f = row[*p].clone();
            for (x, y) in row.iter_mut().zip(r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            *rhs -= &f * b;
        }
    }

    pub fn insert(&mut self, mut row: Vec<Rational>, mut rhs: Rational) -> Insert {
        assert_eq!(row.len(), self.cols);
        self.reduce(&mut row, &mut rhs);
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return if rhs.is_zero() { Insert::Redundant } else { Insert::Inconsistent };
        };
        let inv = Rational::one() / &row[p];
        for x in row.iter_mut() {
            *x *= &inv;
        }
        rhs *= &inv;
        // keep the form fully reduced
        for (_, r, b) in self.rows.iter_mut() {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, y) in r.iter_mut().zip(&row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            *b -= &f * &rhs;
        }
        self.rows.push((p, row, rhs));
        Insert::Independent
    }

    /// Whether `row` lies in the row space seen so far.
    pub fn contains(&self, row: &[Rational]) -> bool {
        let mut r = row.to_vec();
        let mut b = Rational::zero();
        self.reduce(&mut r, &mut b);
        r.iter().all(Zero::is_zero)
    }

    pub fn particular_solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.cols];
        for (p, _, b) in &self.rows {
            x[*p] = b.clone();
        }
        x
    }
}

/// Coefficients expressing `target` as a combination of `basis` rows, if any.
pub fn express_in_basis(basis: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let m = RationalMatrix::from_rows(basis.to_vec()).ok()?.transpose();
    m.solve(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = RationalMatrix::from_i64_rows(&[&[2, 1], &[7, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv, RationalMatrix::from_i64_rows(&[&[4, -1], &[-7, 2]]).unwrap());
        assert!(RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap().inverse().is_none());
    }

    #[test]
    fn identity_rank() {
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn nonsingular_triple() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 1, -1], &[1, -1, 1], &[1, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn dependent_triple() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[1, 1, -1], &[1, -1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn fractional_entries() {
        let m = RationalMatrix::from_rows(vec![
            vec![crate::rational::frac(1, 2), crate::rational::frac(1, 3)],
            vec![int(3), int(2)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_and_detect_inconsistency() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 1], &[1, -1]]).unwrap();
        assert_eq!(m.solve(&[int(3), int(1)]), Some(vec![int(2), int(1)]));
        let s = RationalMatrix::from_i64_rows(&[&[1, 1], &[2, 2]]).unwrap();
        assert_eq!(s.solve(&[int(1), int(3)]), None);
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(3);
        assert_eq!(e.insert(vec![int(1), int(2), int(0)], int(0)), Insert::Independent);
        assert_eq!(e.insert(vec![int(2), int(4), int(0)], int(0)), Insert::Redundant);
        assert!(e.contains(&[int(-1), int(-2), int(0)]));
        assert!(!e.contains(&[int(0), int(0), int(1)]));
    }
}
