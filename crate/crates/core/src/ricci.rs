//! Ricci-type identities for the three independent derivative kinds.
//!
//! For kinds `p, q, r, s` in K1..K3 the difference
//! `a_{p|m q|n} - a_{r|n s|m}` equals `B0 + sum_k c_k B_k` with seventeen
//! fixed basis tensors `B_k` built from the torsion half `A`, the symmetric
//! derivative `|`, and the associated curvature `R`:
//!
//! | k  | `B_k`                                |
//! |----|--------------------------------------|
//! | 0  | `a^a_j R^i_{amn} - a^i_a R^a_{jmn}`  |
//! | 1  | `2 A^a_{jm} a^i_{a|n}`               |
//! | 2  | `2 A^a_{jn} a^i_{a|m}`               |
//! | 3  | `2 A^a_{mn} a^i_{j|a}`               |
//! | 4  | `2 A^i_{an} a^a_{j|m}`               |
//! | 5  | `2 A^i_{am} a^a_{j|n}`               |
//! | 6  | `a^a_j A^i_{am|n}`                   |
//! | 7  | `a^a_j A^i_{an|m}`                   |
//! | 8  | `a^a_j A^b_{am} A^i_{bn}`            |
//! | 9  | `a^a_j A^b_{an} A^i_{bm}`            |
//! | 10 | `2 a^a_j A^i_{ab} A^b_{mn}`          |
//! | 11 | `-a^i_a A^a_{jm|n}`                  |
//! | 12 | `-a^i_a A^a_{jn|m}`                  |
//! | 13 | `-a^i_a A^a_{bn} A^b_{jm}`           |
//! | 14 | `-a^i_a A^a_{bm} A^b_{jn}`           |
//! | 15 | `-2 a^i_a A^a_{jb} A^b_{mn}`         |
//! | 16 | `-2 a^a_b A^i_{am} A^b_{jn}`         |
//! | 17 | `-2 a^a_b A^i_{an} A^b_{jm}`         |

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::connection::{covariant_derivative, double_covariant_derivative, Connection, DerivKind};
use crate::curvature::associated_curvature;
use crate::error::{Error, Result};
use crate::linalg::{express_in_basis, Echelon, Insert, RationalMatrix};
use crate::poly::{Monomial, Poly};
use crate::random::{random_rational, random_tensor, rng, FieldParams};
use crate::rational::{int, Rational};
use crate::scalar::Scalar;
use crate::tensor::TensorField;

pub const NUM_COEFFS: usize = 17;

/// A choice `(p, q, r, s)` of derivative kinds, each in 1..=3.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Combination(pub [u8; 4]);

impl Combination {
    pub fn new(p: u8, q: u8, r: u8, s: u8) -> Result<Combination> {
        let c = Combination([p, q, r, s]);
        if c.0.iter().any(|k| !(1..=3).contains(k)) {
            return Err(Error::UnsupportedKinds(c.to_string()));
        }
        Ok(c)
    }

    /// All 81 combinations in lexicographic order.
    pub fn all() -> Vec<Combination> {
        let mut v = Vec::with_capacity(81);
        for p in 1..=3 {
            for q in 1..=3 {
                for r in 1..=3 {
                    for s in 1..=3 {
                        v.push(Combination([p, q, r, s]));
                    }
                }
            }
        }
        v
    }

    pub fn kinds(self) -> [DerivKind; 4] {
        self.0.map(|k| DerivKind::from_number(k).expect("kind in 1..=3"))
    }

    /// `"ric<p><q>-<r><s>"`
    pub fn tag(self) -> String {
        let [p, q, r, s] = self.0;
        format!("ric{p}{q}-{r}{s}")
    }

    /// The combination with both sides exchanged, `(r, s, p, q)`.
    pub fn reversed(self) -> Combination {
        let [p, q, r, s] = self.0;
        Combination([r, s, p, q])
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r, s] = self.0;
        write!(f, "({p},{q},{r},{s})")
    }
}

impl std::str::FromStr for Combination {
    type Err = Error;
    fn from_str(s: &str) -> Result<Combination> {
        let digits: Vec<u8> = s
            .trim_start_matches("ric")
            .chars()
            .filter(|c| c.is_ascii_digit())
            .map(|c| c as u8 - b'0')
            .collect();
        match digits[..] {
            [p, q, r, s] => Combination::new(p, q, r, s),
            _ => Err(Error::UnsupportedKinds(s.to_string())),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdentityCoefficients {
    pub pqrs: Combination,
    pub c: [i8; NUM_COEFFS],
}

impl IdentityCoefficients {
    pub fn as_rationals(&self) -> Vec<Rational> {
        self.c.iter().map(|&x| int(x.into())).collect()
    }
}

const CATALOGUE: [([u8; 4], [i8; NUM_COEFFS]); 17] = [
    ([1, 1, 1, 1], [0, 0, -1, 0, 0, 1, -1, 1, -1, -1, 1, -1, 1, -1, -1, 0, 0]),
    ([1, 2, 1, 1], [0, 1, 0, -1, 0, 1, -1, -1, -1, 0, 1, -1, 1, 1, 0, -1, -1]),
    ([1, 3, 1, 1], [0, 1, 0, 0, 0, 1, -1, 1, -1, 0, 1, -1, 1, 1, 0, -1, 0]),
    ([2, 1, 1, 1], [1, 0, -1, 0, -1, -1, -1, -1, -1, 0, -1, -1, 1, 1, 0, -1, -1]),
    ([2, 2, 1, 1], [1, 1, 0, -1, -1, -1, -1, 1, -1, -1, -1, -1, 1, -1, -1, 0, 0]),
    ([2, 3, 1, 1], [1, 1, 0, 0, -1, -1, -1, -1, -1, -1, -1, -1, 1, -1, -1, 0, -1]),
    ([3, 1, 1, 1], [1, 0, -1, 0, 0, 1, -1, 1, -1, -1, -1, -1, 1, 1, 0, 0, -1]),
    ([3, 2, 1, 1], [1, 1, 0, -1, 0, 1, -1, -1, -1, 0, -1, -1, 1, -1, -1, -1, 0]),
    ([3, 3, 1, 1], [1, 1, 0, 0, 0, 1, -1, 1, -1, 0, -1, -1, 1, -1, -1, -1, -1]),
    ([1, 2, 1, 2], [-1, 1, 1, -1, 1, 1, -1, -1, 1, 1, 1, -1, -1, 1, 1, 0, 0]),
    // the often-quoted form of this row has c2 = 0, c4 = 1, which fails on
    // generic fields; the entries below are the ones that hold
    ([1, 3, 1, 2], [-1, 1, 1, 0, 1, 1, -1, 1, 1, 1, 1, -1, -1, 1, 1, 0, 1]),
    ([1, 3, 1, 3], [-1, 1, 1, 0, 0, 1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1]),
    ([2, 1, 2, 1], [1, -1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1, 1, 1, 0, 0]),
    ([2, 2, 2, 2], [0, 0, 1, 0, 0, -1, 1, 1, -1, -1, -1, 1, 1, -1, -1, 0, 0]),
    ([2, 3, 2, 3], [0, 0, 1, 1, -1, -1, 1, -1, 1, -1, -1, 1, 1, -1, -1, 1, -1]),
    ([3, 1, 3, 1], [1, -1, -1, 0, 0, 1, -1, 1, -1, -1, -1, 1, -1, 1, 1, 1, -1]),
    ([3, 3, 3, 3], [0, 0, 1, 0, 0, 1, -1, 1, -1, 1, -1, 1, 1, -1, -1, 0, 0]),
];

/// The seventeen catalogued identities.
pub fn identity_catalogue() -> Vec<IdentityCoefficients> {
    CATALOGUE
        .iter()
        .map(|(k, c)| IdentityCoefficients { pqrs: Combination(*k), c: *c })
        .collect()
}

pub fn catalogue_entry(pqrs: Combination) -> Option<IdentityCoefficients> {
    identity_catalogue().into_iter().find(|e| e.pqrs == pqrs)
}


// v = [i, j, m, n, al, be]; `sums` is how many of al, be are summed
fn field<S: Scalar>(dim: usize, sums: usize, f: impl Fn([usize; 6], &mut S::Acc)) -> TensorField<S> {
    let nb = if sums == 2 { dim } else { 1 };
    TensorField::from_fn(dim, 1, 3, |ix| {
        let mut acc = S::acc_new(dim);
        for al in 0..dim {
            for be in 0..nb {
                f([ix[0], ix[1], ix[2], ix[3], al, be], &mut acc);
            }
        }
        S::acc_finish(acc)
    })
}

/// `A x D` products for the five derivative slots, where `d[i, j, k]` is some
/// derivative of `a`. Unscaled: `B_k = 2 T_k(a|)`.
fn torsion_derivative_terms<S: Scalar>(t: &TensorField<S>, d: &TensorField<S>) -> Vec<TensorField<S>> {
    let dim = t.dim();
    let one = Rational::one();
    vec![
        field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &one, &[t.get(&[al, j, m]), d.get(&[i, al, n])])),
        field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &one, &[t.get(&[al, j, n]), d.get(&[i, al, m])])),
        field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &one, &[t.get(&[al, m, n]), d.get(&[i, j, al])])),
        field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &one, &[t.get(&[i, al, n]), d.get(&[al, j, m])])),
        field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &one, &[t.get(&[i, al, m]), d.get(&[al, j, n])])),
    ]
}

fn check_inputs<S: Scalar>(a: &TensorField<S>, l: &Connection<S>) -> Result<()> {
    if a.valence() != (1, 1) {
        return Err(Error::Valence(format!("expected a (1,1) field, got {:?}", a.valence())));
    }
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: l.dim() });
    }
    Ok(())
}

/// `B0` and `B1..B17` for one `(a, L)`.
#[derive(Clone, Debug)]
pub struct IdentityBasis<S> {
    pub b0: TensorField<S>,
    pub terms: Vec<TensorField<S>>,
}

impl<S: Scalar> IdentityBasis<S> {
    pub fn new(a: &TensorField<S>, l: &Connection<S>) -> Result<IdentityBasis<S>> {
        check_inputs(a, l)?;
        let dim = a.dim();
        let t = l.tor_half();
        let r = associated_curvature(l);
        let da = covariant_derivative(DerivKind::Sym, a, l)?;
        let dt = covariant_derivative(DerivKind::Sym, t, l)?;
        let one = Rational::one();
        let m1 = -Rational::one();
        let two = int(2);
        let m2 = int(-2);

        let b0 = field(dim, 1, |[i, j, m, n, al, _], acc| {
            S::acc_add(acc, &one, &[a.get(&[al, j]), r.get(&[i, al, m, n])]);
            S::acc_add(acc, &m1, &[a.get(&[i, al]), r.get(&[al, j, m, n])]);
        });

        // staged contractions keep every product to two factors
        let sum3 = |f: &dyn Fn([usize; 4], &mut S::Acc)| {
            TensorField::from_fn(dim, 1, 2, |ix| {
                let mut acc = S::acc_new(dim);
                for al in 0..dim {
                    f([ix[0], ix[1], ix[2], al], &mut acc);
                }
                S::acc_finish(acc)
            })
        };
        // P[b, j, m] = A^b_{am} a^a_j,  Pa[a, j, n] = a^a_b A^b_{jn}
        let p = sum3(&|[b, j, m, al], acc| S::acc_add(acc, &one, &[t.get(&[b, al, m]), a.get(&[al, j])]));
        let pa = sum3(&|[al, j, n, be], acc| S::acc_add(acc, &one, &[a.get(&[al, be]), t.get(&[be, j, n])]));
        // Q[i, a, m, n] = A^i_{ab} A^b_{mn},  W[a, j, m, n] = A^a_{bn} A^b_{jm}
        let q = field(dim, 1, |[i, al, m, n, be, _], acc| S::acc_add(acc, &one, &[t.get(&[i, al, be]), t.get(&[be, m, n])]));
        let w = field(dim, 1, |[al, j, m, n, be, _], acc| S::acc_add(acc, &one, &[t.get(&[al, be, n]), t.get(&[be, j, m])]));
        let mirror = |x: &TensorField<S>| x.swap_lower(1, 2).expect("rank 4");

        let mut terms: Vec<TensorField<S>> =
            torsion_derivative_terms(t, &da).into_iter().map(|x| x.scale(&two)).collect();
        let b6 = field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &one, &[a.get(&[al, j]), dt.get(&[i, al, m, n])]));
        let b8 = field(dim, 1, |[i, j, m, n, be, _], acc| S::acc_add(acc, &one, &[p.get(&[be, j, m]), t.get(&[i, be, n])]));
        let b10 = field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &two, &[a.get(&[al, j]), q.get(&[i, al, m, n])]));
        let b11 = field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &m1, &[a.get(&[i, al]), dt.get(&[al, j, m, n])]));
        let b13 = field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &m1, &[a.get(&[i, al]), w.get(&[al, j, m, n])]));
        let b15 = field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &m2, &[a.get(&[i, al]), q.get(&[al, j, m, n])]));
        let b16 = field(dim, 1, |[i, j, m, n, al, _], acc| S::acc_add(acc, &m2, &[t.get(&[i, al, m]), pa.get(&[al, j, n])]));
        let (b7, b9, b12, b14, b17) = (mirror(&b6), mirror(&b8), mirror(&b11), mirror(&b13), mirror(&b16));
        terms.extend([b6, b7, b8, b9, b10, b11, b12, b13, b14, b15, b16, b17]);
        debug_assert_eq!(terms.len(), NUM_COEFFS);
        Ok(IdentityBasis { b0, terms })
    }

    /// `B0 + sum_k c_k B_k`
    pub fn combine(&self, c: &[Rational]) -> TensorField<S> {
        assert_eq!(c.len(), NUM_COEFFS);
        let mut parts = vec![(Rational::one(), &self.b0)];
        parts.extend(c.iter().cloned().zip(&self.terms));
        TensorField::linear_combination(&parts).expect("basis tensors share a shape")
    }
}

/// The nine double derivatives `a_{p|m q|n}` for the independent kinds.
#[derive(Clone, Debug)]
pub struct DoubleDerivatives<S> {
    d: Vec<TensorField<S>>,
}

impl<S: Scalar> DoubleDerivatives<S> {
    pub fn new(a: &TensorField<S>, l: &Connection<S>) -> Result<DoubleDerivatives<S>> {
        check_inputs(a, l)?;
        let mut d = Vec::with_capacity(9);
        for p in DerivKind::INDEPENDENT {
            for q in DerivKind::INDEPENDENT {
                d.push(double_covariant_derivative(p, q, a, l)?);
            }
        }
        Ok(DoubleDerivatives { d })
    }

    pub fn get(&self, p: u8, q: u8) -> &TensorField<S> {
        &self.d[(p as usize - 1) * 3 + q as usize - 1]
    }

    /// `a_{p|m q|n} - a_{r|n s|m}`
    pub fn lhs(&self, pqrs: Combination) -> TensorField<S> {
        let [p, q, r, s] = pqrs.0;
        let swapped = self.get(r, s).swap_lower(1, 2).expect("rank 4");
        self.get(p, q).sub(&swapped).expect("same shape")
    }
}

/// Right side of the identity for arbitrary coefficients.
pub fn evaluate_identity_rhs<S: Scalar>(
    c: &IdentityCoefficients,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    Ok(IdentityBasis::new(a, l)?.combine(&c.as_rationals()))
}

/// Left minus right side for a catalogued combination; zero when it holds.
pub fn verify_identity<S: Scalar>(
    pqrs: Combination,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let entry = catalogue_entry(pqrs).ok_or(Error::Uncatalogued(pqrs.0))?;
    identity_residual(&entry, a, l)
}

pub fn identity_residual<S: Scalar>(
    c: &IdentityCoefficients,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let lhs = DoubleDerivatives::new(a, l)?.lhs(c.pqrs);
    lhs.sub(&evaluate_identity_rhs(c, a, l)?)
}

/// One random `(L, a)` with everything the solver needs precomputed.
#[derive(Clone, Debug)]
pub struct IdentityInstance {
    pub connection: Connection<Poly>,
    pub field: TensorField<Poly>,
    basis: IdentityBasis<Poly>,
    dd: DoubleDerivatives<Poly>,
    kinds: Vec<TensorField<Poly>>,
}

impl IdentityInstance {
    pub fn new(connection: Connection<Poly>, field: TensorField<Poly>) -> Result<IdentityInstance> {
        let basis = IdentityBasis::new(&field, &connection)?;
        let dd = DoubleDerivatives::new(&field, &connection)?;
        let kinds = single_derivatives(&field, &connection)?;
        Ok(IdentityInstance { connection, field, basis, dd, kinds })
    }

    pub fn random(seed: u64, path: &[u64], dim: usize, params: FieldParams) -> Result<IdentityInstance> {
        let mut r = rng(seed, path);
        let l = Connection::new(random_tensor(&mut r, dim, 1, 2, params))?;
        let a = random_tensor(&mut r, dim, 1, 1, params);
        IdentityInstance::new(l, a)
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn basis(&self) -> &IdentityBasis<Poly> {
        &self.basis
    }

    pub fn double_derivatives(&self) -> &DoubleDerivatives<Poly> {
        &self.dd
    }

    pub fn residual(&self, pqrs: Combination, c: &[Rational]) -> TensorField<Poly> {
        self.dd.lhs(pqrs).sub(&self.basis.combine(c)).expect("same shape")
    }

    pub fn mixed_residual(&self, c: &IdentityCoefficients, w: &MixWeights, corr: MixCorrection) -> TensorField<Poly> {
        let rhs = mixed_rhs_with(&self.basis, &self.kinds, self.connection.tor_half(), c, w, corr)
            .expect("instance fields share a shape");
        self.dd.lhs(c.pqrs).sub(&rhs).expect("same shape")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    /// Instances per dimension used to pick the linear system.
    pub fit_per_dim: usize,
    /// Further instances per dimension the solution must also satisfy.
    pub fresh_per_dim: usize,
    pub params: FieldParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { seed: 0, dims: vec![3, 4], fit_per_dim: 1, fresh_per_dim: 1, params: FieldParams::default() }
    }
}

#[derive(Clone, Copy, Debug)]
struct RowRef {
    inst: usize,
    entry: usize,
    mono: Monomial,
}

/// Recovers the coefficient vector of any combination from exact
/// polynomial data: 17 independent coefficient equations are selected once,
/// solved per combination, and the answer is re-checked on every instance.
#[derive(Clone, Debug)]
pub struct IdentitySolver {
    fit: Vec<IdentityInstance>,
    fresh: Vec<IdentityInstance>,
    rows: Vec<RowRef>,
    matrix: RationalMatrix,
}

impl IdentitySolver {
    pub fn new(cfg: &SolverConfig) -> Result<IdentitySolver> {
        let make = |tag: u64, count: usize| -> Result<Vec<IdentityInstance>> {
            let jobs: Vec<(usize, usize)> =
                cfg.dims.iter().flat_map(|&d| (0..count).map(move |k| (d, k))).collect();
            jobs.par_iter()
                .map(|&(d, k)| IdentityInstance::random(cfg.seed, &[tag, d as u64, k as u64], d, cfg.params))
                .collect()
        };
        let fit = make(1, cfg.fit_per_dim)?;
        let fresh = make(2, cfg.fresh_per_dim)?;

        let mut ech = Echelon::new(NUM_COEFFS);
        let mut rows = Vec::new();
        'outer: for (inst, x) in fit.iter().enumerate() {
            let terms = &x.basis.terms;
            for entry in 0..terms[0].entries().len() {
                let mut monos: Vec<Monomial> = terms
                    .iter()
                    .flat_map(|b| b.entries()[entry].packed_terms().map(|(m, _)| m))
                    .collect();
                monos.sort_unstable();
                monos.dedup();
                for mono in monos {
                    let row = terms.iter().map(|b| b.entries()[entry].coef_at(mono).to_rational()).collect();
                    if ech.insert(row, Rational::zero()) == Insert::Independent {
                        rows.push(RowRef { inst, entry, mono });
                        if ech.is_full() {
                            break 'outer;
                        }
                    }
                }
            }
        }
        let matrix = RationalMatrix::from_rows(
            rows.iter()
                .map(|r| {
                    fit[r.inst].basis.terms.iter().map(|b| b.entries()[r.entry].coef_at(r.mono).to_rational()).collect()
                })
                .collect(),
        )
        .unwrap_or_else(|_| RationalMatrix::zeros(0, NUM_COEFFS));
        Ok(IdentitySolver { fit, fresh, rows, matrix })
    }

    /// Rank of the selected system; 17 means every coefficient is determined.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn instances(&self) -> impl Iterator<Item = &IdentityInstance> {
        self.fit.iter().chain(&self.fresh)
    }

    pub fn solve(&self, pqrs: Combination) -> Result<IdentityCoefficients> {
        if self.rank() < NUM_COEFFS {
            return Err(Error::Ambiguous { pqrs: pqrs.0, rank: self.rank() });
        }
        let lhs: Vec<TensorField<Poly>> = self.fit.iter().map(|x| x.dd.lhs(pqrs)).collect();
        let b: Vec<Rational> = self
            .rows
            .iter()
            .map(|r| {
                let x = &self.fit[r.inst];
                lhs[r.inst].entries()[r.entry]
                    .minus(&x.basis.b0.entries()[r.entry])
                    .coef_at(r.mono)
                    .to_rational()
            })
            .collect();
        let x = self.matrix.solve(&b).ok_or_else(|| Error::NoSolution {
            pqrs: pqrs.0,
            detail: "selected system is singular".into(),
        })?;
        if let Some(k) = self.instances().position(|inst| !inst.residual(pqrs, &x).is_zero()) {
            return Err(Error::NoSolution {
                pqrs: pqrs.0,
                detail: format!("best fit leaves a nonzero residual on instance {k}"),
            });
        }
        let mut c = [0i8; NUM_COEFFS];
        for (slot, v) in c.iter_mut().zip(&x) {
            *slot = match v {
                v if v.is_zero() => 0,
                v if v.is_one() => 1,
                v if (-v).is_one() => -1,
                _ => {
                    let shown: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                    return Err(Error::NoSolution {
                        pqrs: pqrs.0,
                        detail: format!("solution [{}] leaves {{-1, 0, 1}}", shown.join(", ")),
                    });
                }
            };
        }
        Ok(IdentityCoefficients { pqrs, c })
    }

    /// Solves every combination in parallel; output order follows the input.
    pub fn solve_all(&self, combos: &[Combination]) -> Vec<(Combination, Result<IdentityCoefficients>)> {
        combos.par_iter().map(|&c| (c, self.solve(c))).collect()
    }
}

fn rows_of(v: &[IdentityCoefficients]) -> Vec<Vec<Rational>> {
    v.iter().map(IdentityCoefficients::as_rationals).collect()
}

/// Rank of the coefficient vectors as elements of Q^17.
pub fn coefficient_rank(v: &[IdentityCoefficients]) -> usize {
    match RationalMatrix::from_rows(rows_of(v)) {
        Ok(m) => m.rank(),
        Err(_) => 0,
    }
}

/// Rank of `[1 | c]`, i.e. one more than the affine dimension.
pub fn affine_rank(v: &[IdentityCoefficients]) -> usize {
    let rows = v
        .iter()
        .map(|e| std::iter::once(Rational::one()).chain(e.as_rationals()).collect())
        .collect();
    RationalMatrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0)
}

pub fn catalogue_independence_rank() -> usize {
    coefficient_rank(&identity_catalogue())
}

/// Rank of the formal left sides `a_{p|m q|n} - a_{r|n s|m}`, each treated
/// as a difference of two independent symbols (nine per index order).
pub fn formal_lhs_rank(combos: &[Combination]) -> usize {
    let rows: Vec<Vec<Rational>> = combos
        .iter()
        .map(|c| {
            let [p, q, r, s] = c.0.map(usize::from);
            let mut row = vec![Rational::zero(); 18];
            row[(p - 1) * 3 + q - 1] += Rational::one();
            row[9 + (r - 1) * 3 + s - 1] -= Rational::one();
            row
        })
        .collect();
    RationalMatrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0)
}

/// Weights of `c` in terms of the catalogue vectors, if it lies in their span.
pub fn express_in_catalogue(c: &IdentityCoefficients) -> Option<Vec<Rational>> {
    express_in_basis(&rows_of(&identity_catalogue()), &c.as_rationals())
}

/// Per-slot weights `d^1_k, d^2_k, d^3_k` of the three kinds in the five
/// derivative terms; each row sums to 1.
#[derive(Clone, PartialEq, Debug)]
pub struct MixWeights {
    rows: [[Rational; 3]; 5],
}

impl MixWeights {
    pub fn new(rows: [[Rational; 3]; 5]) -> Result<MixWeights> {
        for (k, r) in rows.iter().enumerate() {
            let sum: Rational = r.iter().sum();
            if !sum.is_one() {
                return Err(Error::WeightRowSum { row: k + 1, sum: sum.to_string() });
            }
        }
        Ok(MixWeights { rows })
    }

    /// Every slot uses kind `k` only.
    pub fn pure(k: u8) -> Result<MixWeights> {
        Combination::new(k, 1, 1, 1)?;
        let row: [Rational; 3] = std::array::from_fn(|l| if l + 1 == k as usize { Rational::one() } else { Rational::zero() });
        Ok(MixWeights { rows: std::array::from_fn(|_| row.clone()) })
    }

    pub fn random(seed: u64, path: &[u64]) -> MixWeights {
        let mut r = rng(seed, path);
        let rows = std::array::from_fn(|_| {
            let d1 = random_rational(&mut r);
            let d2 = random_rational(&mut r);
            let d3 = Rational::one() - &d1 - &d2;
            [d1, d2, d3]
        });
        MixWeights { rows }
    }

    pub fn rows(&self) -> &[[Rational; 3]; 5] {
        &self.rows
    }

    /// `d1 - d2 + d3` of slot `k` (0-based).
    pub fn u(&self, k: usize) -> Rational {
        let [a, b, c] = &self.rows[k];
        a - b + c
    }

    /// `-d1 + d2 + d3` of slot `k` (0-based).
    pub fn lambda(&self, k: usize) -> Rational {
        let [a, b, c] = &self.rows[k];
        b + c - a
    }
}

/// How the bracket coefficients absorb the mixing.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MixCorrection {
    /// Corrections obtained by expanding the mixed derivatives.
    Derived,
    /// The commonly quoted corrections, which drop a factor 2 in several
    /// slots; kept so the discrepancy stays demonstrable.
    Halved,
}

/// Coefficients of `B6..B17` after the mixing correction.
pub fn mixed_bracket_coefficients(c: &IdentityCoefficients, w: &MixWeights, corr: MixCorrection) -> Vec<Rational> {
    let c = c.as_rationals();
    let (u, lam) = (|k: usize| w.u(k - 1), |k: usize| w.lambda(k - 1));
    let mut out: Vec<Rational> = c[5..].to_vec();
    // out[k - 6] holds c_k
    let f = match corr {
        MixCorrection::Derived => int(2),
        MixCorrection::Halved => int(1),
    };
    out[8 - 6] -= &f * &c[3] * u(4);
    out[9 - 6] -= &f * &c[4] * u(5);
    out[13 - 6] += &f * &c[0] * lam(1);
    out[14 - 6] += &f * &c[1] * lam(2);
    match corr {
        MixCorrection::Derived => {
            out[10 - 6] -= &c[2] * u(3);
            out[15 - 6] += &c[2] * lam(3);
        }
        MixCorrection::Halved => {
            let [d1, d2, d3] = &w.rows()[2];
            out[10 - 6] -= &c[2] * (d1 + d2 - d3) / int(2);
            out[15 - 6] += &c[2] * lam(3) / int(2);
        }
    }
    out[16 - 6] += &c[1] * u(2) + &c[4] * lam(5);
    out[17 - 6] += &c[0] * u(1) + &c[3] * lam(4);
    out
}

/// Right side with derivative slot `k` taken as the weighted mixture of the
/// three kinds and corrected bracket coefficients.
pub fn mixed_family_rhs<S: Scalar>(
    c: &IdentityCoefficients,
    w: &MixWeights,
    corr: MixCorrection,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let basis = IdentityBasis::new(a, l)?;
    let kinds = single_derivatives(a, l)?;
    mixed_rhs_with(&basis, &kinds, l.tor_half(), c, w, corr)
}

fn single_derivatives<S: Scalar>(a: &TensorField<S>, l: &Connection<S>) -> Result<Vec<TensorField<S>>> {
    DerivKind::INDEPENDENT.iter().map(|&k| covariant_derivative(k, a, l)).collect()
}

fn mixed_rhs_with<S: Scalar>(
    basis: &IdentityBasis<S>,
    kinds: &[TensorField<S>],
    t: &TensorField<S>,
    c: &IdentityCoefficients,
    w: &MixWeights,
    corr: MixCorrection,
) -> Result<TensorField<S>> {
    let mut total = basis.b0.clone();
    for (k, wk) in w.rows().iter().enumerate() {
        let ck = int(c.c[k].into());
        if ck.is_zero() {
            continue;
        }
        let mix = TensorField::linear_combination(&[
            (wk[0].clone(), &kinds[0]),
            (wk[1].clone(), &kinds[1]),
            (wk[2].clone(), &kinds[2]),
        ])?;
        let term = torsion_derivative_terms(t, &mix).swap_remove(k);
        total = total.add(&term.scale(&(int(2) * ck)))?;
    }
    for (ck, b) in mixed_bracket_coefficients(c, w, corr).iter().zip(&basis.terms[5..]) {
        if !ck.is_zero() {
            total = total.add(&b.scale(ck))?;
        }
    }
    Ok(total)
}

/// Left side minus the mixed right side for a catalogued combination.
pub fn verify_mixed_family<S: Scalar>(
    pqrs: Combination,
    w: &MixWeights,
    corr: MixCorrection,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let entry = catalogue_entry(pqrs).ok_or(Error::Uncatalogued(pqrs.0))?;
    let lhs = DoubleDerivatives::new(a, l)?.lhs(pqrs);
    lhs.sub(&mixed_family_rhs(&entry, w, corr, a, l)?)
}

/// The right side with every symmetric derivative written out through
/// partials and `S`: 28 fixed pieces whose weights depend on `c`.
#[derive(Clone, Debug)]
pub struct ExpandedBasis<S> {
    pieces: Vec<TensorField<S>>,
}

impl<S: Scalar> ExpandedBasis<S> {
    pub fn new(a: &TensorField<S>, l: &Connection<S>) -> Result<ExpandedBasis<S>> {
        check_inputs(a, l)?;
        let dim = a.dim();
        let s = l.sym();
        let t = l.tor_half();
        let r = associated_curvature(l);
        let dt = covariant_derivative(DerivKind::Sym, t, l)?;
        let pa = a.gradient();
        let one = Rational::one();
        type Ix = fn([usize; 6]) -> [Vec<usize>; 3];
        // (summed indices, [a slot, first factor slot, second factor slot]) over
        // named tensors; factor 0 is `a`
        let four = |x: &TensorField<S>, y: &TensorField<S>, f: fn([usize; 6]) -> [Vec<usize>; 2]| {
            field(dim, 1, |v, acc| {
                let [p, q] = f(v);
                S::acc_add(acc, &one, &[x.get(&p), y.get(&q)]);
            })
        };
        let five = |y: &TensorField<S>, z: &TensorField<S>, f: Ix| {
            field(dim, 2, |v, acc| {
                let [p, q, w] = f(v);
                S::acc_add(acc, &one, &[a.get(&p), y.get(&q), z.get(&w)]);
            })
        };
        let pieces = vec![
            field(dim, 1, |[i, j, m, n, al, _], acc| {
                S::acc_add(acc, &one, &[a.get(&[al, j]), r.get(&[i, al, m, n])]);
                S::acc_add(acc, &-&one, &[a.get(&[i, al]), r.get(&[al, j, m, n])]);
            }),
            four(t, &pa, |[i, j, m, n, al, _]| [vec![al, j, m], vec![i, al, n]]),
            four(t, &pa, |[i, j, m, n, al, _]| [vec![al, j, n], vec![i, al, m]]),
            four(t, &pa, |[i, j, m, n, al, _]| [vec![al, m, n], vec![i, j, al]]),
            four(t, &pa, |[i, j, m, n, al, _]| [vec![i, al, n], vec![al, j, m]]),
            four(t, &pa, |[i, j, m, n, al, _]| [vec![i, al, m], vec![al, j, n]]),
            four(a, &dt, |[i, j, m, n, al, _]| [vec![al, j], vec![i, al, m, n]]),
            four(a, &dt, |[i, j, m, n, al, _]| [vec![al, j], vec![i, al, n, m]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![al, j], vec![be, al, m], vec![i, be, n]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![al, j], vec![be, al, n], vec![i, be, m]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![al, j], vec![i, al, be], vec![be, m, n]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, j], vec![be, m, n], vec![i, al, be]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, j], vec![i, be, n], vec![be, al, m]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, j], vec![i, be, m], vec![be, al, n]]),
            four(a, &dt, |[i, j, m, n, al, _]| [vec![i, al], vec![al, j, m, n]]),
            four(a, &dt, |[i, j, m, n, al, _]| [vec![i, al], vec![al, j, n, m]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![i, al], vec![al, be, n], vec![be, j, m]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![i, al], vec![al, be, m], vec![be, j, n]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![i, al], vec![al, j, be], vec![be, m, n]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![i, al], vec![be, j, m], vec![al, be, n]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![i, al], vec![be, j, n], vec![al, be, m]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![i, al], vec![be, m, n], vec![al, j, be]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![al, be], vec![i, al, m], vec![be, j, n]]),
            five(t, t, |[i, j, m, n, al, be]| [vec![al, be], vec![i, al, n], vec![be, j, m]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, be], vec![be, j, m], vec![i, al, n]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, be], vec![be, j, n], vec![i, al, m]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, be], vec![i, al, n], vec![be, j, m]]),
            five(t, s, |[i, j, m, n, al, be]| [vec![al, be], vec![i, al, m], vec![be, j, n]]),
        ];
        Ok(ExpandedBasis { pieces })
    }

    /// Weight of each piece, in construction order.
    pub fn weights(c: &IdentityCoefficients) -> Vec<Rational> {
        let k: Vec<Rational> = c.as_rationals();
        let x2 = |i: usize| &k[i - 1] * int(2);
        let m2 = |i: usize| &k[i - 1] * int(-2);
        let c = |i: usize| k[i - 1].clone();
        let m = |i: usize| -&k[i - 1];
        vec![
            Rational::one(),
            x2(1), x2(2), x2(3), x2(4), x2(5),
            c(6), c(7),
            c(8), c(9), x2(10),
            x2(3), x2(4), x2(5),
            m(11), m(12),
            m(13), m(14), m2(15),
            m2(1), m2(2), m2(3),
            m2(16), m2(17),
            x2(1), x2(2), m2(4), m2(5),
        ]
    }

    pub fn combine(&self, c: &IdentityCoefficients) -> TensorField<S> {
        let w = Self::weights(c);
        let parts: Vec<(Rational, &TensorField<S>)> = w.into_iter().zip(&self.pieces).collect();
        TensorField::linear_combination(&parts).expect("pieces share a shape")
    }
}

pub fn expanded_identity_rhs<S: Scalar>(
    c: &IdentityCoefficients,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    Ok(ExpandedBasis::new(a, l)?.combine(c))
}

/// Expanded form minus the compact form; zero when the expansion is right.
pub fn verify_expanded_identity<S: Scalar>(
    pqrs: Combination,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let entry = catalogue_entry(pqrs).ok_or(Error::Uncatalogued(pqrs.0))?;
    expanded_identity_rhs(&entry, a, l)?.sub(&evaluate_identity_rhs(&entry, a, l)?)
}

/// Residuals of `L^a_{mn} a^i_{j p|a}` against its split into `S` and `A`
/// parts, for `p` = 1 and 2.
pub fn product_expansion_residuals<S: Scalar>(
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<[TensorField<S>; 2]> {
    check_inputs(a, l)?;
    let dim = a.dim();
    let c = l.coeffs();
    let s = l.sym();
    let t = l.tor_half();
    let pa = a.gradient();
    let one = Rational::one();
    let m1 = -Rational::one();
    let mut out = Vec::with_capacity(2);
    for (kind, sign) in [(DerivKind::K1, 1i64), (DerivKind::K2, -1)] {
        let d = covariant_derivative(kind, a, l)?;
        let sg = int(sign);
        let msg = int(-sign);
        let lhs = field(dim, 1, |[i, j, m, n, al, _], acc| {
            S::acc_add(acc, &one, &[c.get(&[al, m, n]), d.get(&[i, j, al])]);
        });
        let rhs = field(dim, 2, |[i, j, m, n, al, be], acc| {
            // (S + A)^al_{mn} over each piece of a^i_{j p|al}
            for g in [s.get(&[al, m, n]), t.get(&[al, m, n])] {
                if be == 0 {
                    S::acc_add(acc, &one, &[g, pa.get(&[i, j, al])]);
                }
                S::acc_add(acc, &one, &[g, s.get(&[i, be, al]), a.get(&[be, j])]);
                S::acc_add(acc, &m1, &[g, s.get(&[be, j, al]), a.get(&[i, be])]);
                S::acc_add(acc, &sg, &[g, t.get(&[i, be, al]), a.get(&[be, j])]);
                S::acc_add(acc, &msg, &[g, t.get(&[be, j, al]), a.get(&[i, be])]);
            }
        });
        out.push(lhs.sub(&rhs)?);
    }
    let second = out.pop().expect("two kinds");
    let first = out.pop().expect("two kinds");
    Ok([first, second])
}
