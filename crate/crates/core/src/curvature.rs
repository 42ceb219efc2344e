//! Curvature of the associated space, the five-parameter rho family built on
//! it, and the bracket objects that mix symmetric and torsion parts.

use std::fmt;

use num_traits::One;

use crate::connection::{covariant_derivative, Connection, DerivKind};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, RationalMatrix};
use crate::poly::Poly;
use crate::rational::{int, Rational};
use crate::scalar::Scalar;
use crate::tensor::TensorField;

/// `R^i_{jmn}` of a symmetric connection.
pub fn curvature_r<S: Scalar>(l: &Connection<S>) -> Result<TensorField<S>> {
    if !l.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(riemann_of(l.sym()))
}

/// `R^i_{jmn}` of the associated space of any connection.
pub fn associated_curvature<S: Scalar>(l: &Connection<S>) -> TensorField<S> {
    riemann_of(l.sym())
}

fn riemann_of<S: Scalar>(s: &TensorField<S>) -> TensorField<S> {
    let dim = s.dim();
    let ds = s.gradient();
    let one = Rational::one();
    let minus = -Rational::one();
    TensorField::from_fn(dim, 1, 3, |ix| {
        let (i, j, m, n) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = S::acc_new(dim);
        S::acc_add(&mut acc, &one, &[ds.get(&[i, j, m, n])]);
        S::acc_add(&mut acc, &minus, &[ds.get(&[i, j, n, m])]);
        for al in 0..dim {
            S::acc_add(&mut acc, &one, &[s.get(&[al, j, m]), s.get(&[i, al, n])]);
            S::acc_add(&mut acc, &minus, &[s.get(&[al, j, n]), s.get(&[i, al, m])]);
        }
        S::acc_finish(acc)
    })
}

/// Coefficients `(u, u', v, v', w)` of a rho-family member.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RhoCoefficients {
    pub u: Rational,
    pub u_prime: Rational,
    pub v: Rational,
    pub v_prime: Rational,
    pub w: Rational,
}

impl RhoCoefficients {
    pub fn new(u: i64, u_prime: i64, v: i64, v_prime: i64, w: i64) -> RhoCoefficients {
        RhoCoefficients {
            u: int(u),
            u_prime: int(u_prime),
            v: int(v),
            v_prime: int(v_prime),
            w: int(w),
        }
    }

    pub fn zero() -> RhoCoefficients {
        RhoCoefficients::new(0, 0, 0, 0, 0)
    }

    /// `(1, u, u', v, v', w)`: the member as a vector over the span basis.
    pub fn basis_vector(&self) -> Vec<Rational> {
        vec![
            Rational::one(),
            self.u.clone(),
            self.u_prime.clone(),
            self.v.clone(),
            self.v_prime.clone(),
            self.w.clone(),
        ]
    }

    /// `c'` with `rho(c)^i_{jnm} = -rho(c')^i_{jmn}`; `w` keeps its sign
    /// because its tensor is already antisymmetric in `m, n`.
    pub fn swapped(&self) -> RhoCoefficients {
        RhoCoefficients {
            u: -&self.u_prime,
            u_prime: -&self.u,
            v: -&self.v_prime,
            v_prime: -&self.v,
            w: self.w.clone(),
        }
    }
}

impl fmt::Display for RhoCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {})", self.u, self.u_prime, self.v, self.v_prime, self.w)
    }
}

/// The fourteen catalogued members, in order.
pub fn rho_catalogue() -> Vec<RhoCoefficients> {
    [
        (1, -1, 1, -1, -2),
        (1, -1, -1, -1, 0),
        (1, -1, 1, -1, 0),
        (-1, -1, -1, -1, 0),
        (-1, -1, 1, -1, -2),
        (-1, -1, -1, -1, -2),
        (1, -1, -1, 1, 2),
        (1, -1, 1, 1, 2),
        (1, -1, 1, -1, 2),
        (-1, 1, -1, 1, 2),
        (-1, 1, 1, -1, -2),
        (-1, 1, -1, 1, -2),
        (1, -1, 1, 1, 0),
        (-1, -1, 1, 1, 0),
    ]
    .into_iter()
    .map(|(a, b, c, d, e)| RhoCoefficients::new(a, b, c, d, e))
    .collect()
}

/// The six tensors every rho-family member is a combination of.
#[derive(Clone, Debug)]
pub struct RhoBasis<S> {
    /// `R^i_{jmn}`
    pub r: TensorField<S>,
    /// `A^i_{jm|n}`
    pub du: TensorField<S>,
    /// `A^i_{jn|m}`
    pub du_prime: TensorField<S>,
    /// `A^a_{jm} A^i_{an}`
    pub v: TensorField<S>,
    /// `A^a_{jn} A^i_{am}`
    pub v_prime: TensorField<S>,
    /// `A^a_{mn} A^i_{ja}`
    pub w: TensorField<S>,
}

impl<S: Scalar> RhoBasis<S> {
    pub fn new(l: &Connection<S>) -> RhoBasis<S> {
        let dim = l.dim();
        let a = l.tor_half();
        let (assoc, _) = l.decompose();
        let da = covariant_derivative(DerivKind::Sym, a, &assoc).expect("same dimension");
        let du_prime = da.swap_lower(1, 2).expect("rank 4");
        let one = Rational::one();
        let quad = |f: &dyn Fn(usize, usize, usize, usize, usize) -> [[usize; 3]; 2]| {
            TensorField::from_fn(dim, 1, 3, |ix| {
                let mut acc = S::acc_new(dim);
                for al in 0..dim {
                    let [p, q] = f(ix[0], ix[1], ix[2], ix[3], al);
                    S::acc_add(&mut acc, &one, &[a.get(&p), a.get(&q)]);
                }
                S::acc_finish(acc)
            })
        };
        RhoBasis {
            r: associated_curvature(l),
            du: da,
            du_prime,
            v: quad(&|i, j, m, n, al| [[al, j, m], [i, al, n]]),
            v_prime: quad(&|i, j, m, n, al| [[al, j, n], [i, al, m]]),
            w: quad(&|i, j, m, n, al| [[al, m, n], [i, j, al]]),
        }
    }

    pub fn combine(&self, c: &RhoCoefficients) -> TensorField<S> {
        TensorField::linear_combination(&[
            (Rational::one(), &self.r),
            (c.u.clone(), &self.du),
            (c.u_prime.clone(), &self.du_prime),
            (c.v.clone(), &self.v),
            (c.v_prime.clone(), &self.v_prime),
            (c.w.clone(), &self.w),
        ])
        .expect("basis tensors share a shape")
    }
}

/// `rho^i_{jmn}` for the given coefficients.
pub fn rho<S: Scalar>(c: &RhoCoefficients, l: &Connection<S>) -> TensorField<S> {
    RhoBasis::new(l).combine(c)
}

/// A member of a rank query: the associated curvature or a catalogue entry.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RhoMember {
    R,
    /// 1-based catalogue index.
    Rho(usize),
}

impl RhoMember {
    pub fn coefficients(self) -> Result<RhoCoefficients> {
        match self {
            RhoMember::R => Ok(RhoCoefficients::zero()),
            RhoMember::Rho(k) => rho_catalogue()
                .get(k.wrapping_sub(1))
                .cloned()
                .ok_or(Error::IndexOutOfRange { index: k, dim: 14 }),
        }
    }

    pub fn label(self) -> String {
        match self {
            RhoMember::R => "R".into(),
            RhoMember::Rho(k) => format!("rho{k}"),
        }
    }
}

/// Rank of the rows `(1, u, u', v, v', w)`.
pub fn rho_family_rank(members: &[RhoMember]) -> Result<usize> {
    if members.is_empty() {
        return Err(Error::Empty);
    }
    let rows = members
        .iter()
        .map(|m| Ok(m.coefficients()?.basis_vector()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RationalMatrix::from_rows(rows)?.rank())
}

pub fn full_catalogue() -> Vec<RhoMember> {
    (1..=14).map(RhoMember::Rho).collect()
}

/// The three six-member sets singled out as independent.
pub fn independent_six_sets() -> [(&'static str, [RhoMember; 6]); 3] {
    use RhoMember::*;
    [
        ("rho-1-2-3-4-7-10", [Rho(1), Rho(2), Rho(3), Rho(4), Rho(7), Rho(10)]),
        ("R-2-3-4-7-10", [R, Rho(2), Rho(3), Rho(4), Rho(7), Rho(10)]),
        ("rho-1-2-3-4-7-R", [Rho(1), Rho(2), Rho(3), Rho(4), Rho(7), R]),
    ]
}

/// Rank of the members as sampled tensors: each member evaluated on the given
/// connections becomes one long row of polynomial coefficients. Generically
/// this is at least the coefficient rank; it is a diagnostic only.
pub fn rho_sampled_rank(members: &[RhoMember], connections: &[Connection<Poly>]) -> Result<usize> {
    let coeffs = members.iter().map(|m| m.coefficients()).collect::<Result<Vec<_>>>()?;
    let bases: Vec<_> = connections.iter().map(RhoBasis::new).collect();
    // column index per (connection, entry, monomial)
    let mut columns = std::collections::BTreeMap::new();
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); coeffs.len()];
    for (r, c) in coeffs.iter().enumerate() {
        for (b, basis) in bases.iter().enumerate() {
            for (e, p) in basis.combine(c).entries().iter().enumerate() {
                for (m, v) in p.packed_terms() {
                    let next = columns.len();
                    let col = *columns.entry((b, e, m)).or_insert(next);
                    rows[r].push((col, v.to_rational()));
                }
            }
        }
    }
    let mut ech = Echelon::new(columns.len());
    for row in rows {
        let mut dense = vec![Rational::from_integer(0.into()); columns.len()];
        for (c, v) in row {
            dense[c] = v;
        }
        ech.insert(dense, Rational::from_integer(0.into()));
    }
    Ok(ech.rank())
}

/// The five bracket objects, each of valence (1,3) indexed `[i; j, m, n]`.
#[derive(Clone, PartialEq, Debug)]
pub struct BracketObjects<S> {
    /// `a^i_{j<mn>}`
    pub angle: TensorField<S>,
    /// `a^i_{j<=mn>=}`
    pub le_ge: TensorField<S>,
    /// `a^i_{j=<mn=>}`
    pub sle_sge: TensorField<S>,
    /// `a^i_{j<=mn=>}`
    pub le_sge: TensorField<S>,
    /// `a^i_{j=<mn>=}`
    pub sle_ge: TensorField<S>,
}

impl<S> BracketObjects<S> {
    pub fn labelled(&self) -> [(&'static str, &TensorField<S>); 5] {
        [
            ("angle", &self.angle),
            ("le-ge", &self.le_ge),
            ("sle-sge", &self.sle_sge),
            ("le-sge", &self.le_sge),
            ("sle-ge", &self.sle_ge),
        ]
    }
}

// sum over al, be of c * a^al_be * X[p] * Y[q]; `be` must be the first slot of
// q and absent from p, so a^al_be Y[be, ..] is contracted first
fn bilinear_ab<S: Scalar>(
    a: &TensorField<S>,
    terms: &[(i64, &TensorField<S>, &TensorField<S>, Idx)],
) -> TensorField<S> {
    let dim = a.dim();
    let one = Rational::one();
    let staged: Vec<TensorField<S>> = terms
        .iter()
        .map(|(_, _, y, _)| {
            TensorField::from_fn(dim, 1, 2, |ix| {
                let mut acc = S::acc_new(dim);
                for be in 0..dim {
                    S::acc_add(&mut acc, &one, &[a.get(&[ix[0], be]), y.get(&[be, ix[1], ix[2]])]);
                }
                S::acc_finish(acc)
            })
        })
        .collect();
    const MARK: usize = usize::MAX;
    TensorField::from_fn(dim, 1, 3, |ix| {
        let mut acc = S::acc_new(dim);
        for al in 0..dim {
            for ((c, x, _, f), z) in terms.iter().zip(&staged) {
                let [p, mut q] = f([ix[0], ix[1], ix[2], ix[3], al, MARK]);
                debug_assert!(q[0] == MARK && !p.contains(&MARK));
                q[0] = al;
                S::acc_add(&mut acc, &int(*c), &[x.get(&p), z.get(&q)]);
            }
        }
        S::acc_finish(acc)
    })
}

// v = [i, j, m, n, al, be]
type Idx = fn([usize; 6]) -> [[usize; 3]; 2];

/// Bracket objects evaluated from the raw coefficients `L^i_{jk}`; the first
/// one uses the antisymmetrization of `L` written out directly.
pub fn bracket_objects_raw<S: Scalar>(a: &TensorField<S>, l: &Connection<S>) -> BracketObjects<S> {
    let dim = a.dim();
    let c = l.coeffs();
    let da = a.gradient();
    let half = Rational::new(1.into(), 2.into());
    let angle = TensorField::from_fn(dim, 1, 3, |ix| {
        let (i, j, m, n) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = S::acc_new(dim);
        for al in 0..dim {
            S::acc_add(&mut acc, &half, &[c.get(&[i, al, m]), da.get(&[al, j, n])]);
            S::acc_add(&mut acc, &-&half, &[c.get(&[i, m, al]), da.get(&[al, j, n])]);
            S::acc_add(&mut acc, &-&half, &[c.get(&[al, j, m]), da.get(&[i, al, n])]);
            S::acc_add(&mut acc, &half, &[c.get(&[al, m, j]), da.get(&[i, al, n])]);
        }
        S::acc_finish(acc)
    });
    let t = l.tor_half();
    let le_ge = bilinear_ab(a, &[
        (1, c, c, (|[i, j, m, n, al, be]| [[i, m, al], [be, j, n]]) as Idx),
        (-1, c, c, |[i, j, m, n, al, be]| [[i, al, m], [be, n, j]]),
    ]);
    let sle_sge = bilinear_ab(a, &[
        (1, c, c, (|[i, j, m, n, al, be]| [[i, m, al], [be, n, j]]) as Idx),
        (-1, c, c, |[i, j, m, n, al, be]| [[i, al, m], [be, j, n]]),
    ]);
    let le_sge = bilinear_ab(a, &[
        (1, t, c, (|[i, j, m, n, al, be]| [[i, m, al], [be, j, n]]) as Idx),
        (-1, c, t, |[i, j, m, n, al, be]| [[i, al, n], [be, m, j]]),
    ]);
    let sle_ge = bilinear_ab(a, &[
        (1, c, t, (|[i, j, m, n, al, be]| [[i, m, al], [be, j, n]]) as Idx),
        (-1, t, c, |[i, j, m, n, al, be]| [[i, al, n], [be, m, j]]),
    ]);
    BracketObjects { angle, le_ge, sle_sge, le_sge, sle_ge }
}

/// Bracket objects rewritten through the symmetric part `S` and torsion half
/// `A`. The second and third objects carry a factor 2 from the cross terms.
pub fn bracket_objects_decomposed<S: Scalar>(a: &TensorField<S>, l: &Connection<S>) -> BracketObjects<S> {
    let dim = a.dim();
    let s = l.sym();
    let t = l.tor_half();
    let da = a.gradient();
    let one = Rational::one();
    let angle = TensorField::from_fn(dim, 1, 3, |ix| {
        let (i, j, m, n) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = S::acc_new(dim);
        for al in 0..dim {
            S::acc_add(&mut acc, &one, &[t.get(&[i, al, m]), da.get(&[al, j, n])]);
            S::acc_add(&mut acc, &-&one, &[t.get(&[al, j, m]), da.get(&[i, al, n])]);
        }
        S::acc_finish(acc)
    });
    let sa: Idx = |[i, j, m, n, al, be]| [[i, al, m], [be, j, n]];
    let le_ge = bilinear_ab(a, &[(2, s, t, sa), (-2, t, s, sa)]);
    let sle_sge = bilinear_ab(a, &[(-2, s, t, sa), (-2, t, s, sa)]);
    let crossed: Idx = |[i, j, m, n, al, be]| [[i, al, n], [be, j, m]];
    let le_sge = bilinear_ab(a, &[
        (-1, t, t, sa),
        (1, t, t, crossed),
        (-1, t, s, sa),
        (1, s, t, crossed),
    ]);
    let sle_ge = bilinear_ab(a, &[
        (-1, t, t, sa),
        (1, t, t, crossed),
        (1, s, t, sa),
        (-1, t, s, crossed),
    ]);
    BracketObjects { angle, le_ge, sle_sge, le_sge, sle_ge }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_entries() {
        let c = rho_catalogue();
        assert_eq!(c.len(), 14);
        assert_eq!(c[1], RhoCoefficients::new(1, -1, -1, -1, 0));
        assert_eq!(c[13], RhoCoefficients::new(-1, -1, 1, 1, 0));
    }

    #[test]
    fn catalogue_ranks() {
        assert_eq!(rho_family_rank(&full_catalogue()).unwrap(), 6);
        for (_, set) in independent_six_sets() {
            assert_eq!(rho_family_rank(&set).unwrap(), 6);
        }
        assert_eq!(rho_family_rank(&[RhoMember::R]).unwrap(), 1);
    }

    #[test]
    fn bad_member_index() {
        assert!(rho_family_rank(&[RhoMember::Rho(15)]).is_err());
        assert!(rho_family_rank(&[RhoMember::Rho(0)]).is_err());
        assert_eq!(rho_family_rank(&[]), Err(Error::Empty));
    }

    #[test]
    fn non_symmetric_input_rejected() {
        let t = TensorField::from_fn(2, 1, 2, |ix| Poly::constant(2, int((ix == [0, 0, 1]) as i64)));
        let l = Connection::new(t).unwrap();
        assert_eq!(curvature_r(&l), Err(Error::NotSymmetric));
    }

    #[test]
    fn swap_is_involution() {
        for c in rho_catalogue() {
            assert_eq!(c.swapped().swapped(), c);
        }
    }
}
