//! Non-symmetric affine connections and their covariant derivatives.
//!
//! A connection `L^i_{jk}` splits as `S + A` with `S` symmetric and `A`
//! antisymmetric in the lower pair (`A` is half the torsion). Each derivative
//! kind is encoded by a signature `(su, sl)`: an upper index picks up
//! `(S + su*A)^i_{ak}` and a lower index loses `(S - sl*A)^a_{jk}`.

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{frac, int, Rational};
use crate::scalar::Scalar;
use crate::tensor::TensorField;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum DerivKind {
    Sym,
    K1,
    K2,
    K3,
    K4,
}

impl DerivKind {
    pub const ALL: [DerivKind; 5] = [
        DerivKind::Sym,
        DerivKind::K1,
        DerivKind::K2,
        DerivKind::K3,
        DerivKind::K4,
    ];

    /// The three kinds the identity family is built from.
    pub const INDEPENDENT: [DerivKind; 3] = [DerivKind::K1, DerivKind::K2, DerivKind::K3];

    pub fn signature(self) -> (i8, i8) {
        match self {
            DerivKind::Sym => (0, 0),
            DerivKind::K1 => (1, -1),
            DerivKind::K2 => (-1, 1),
            DerivKind::K3 => (1, 1),
            DerivKind::K4 => (-1, -1),
        }
    }

    /// 0 for the symmetric kind, 1..=4 otherwise.
    pub fn number(self) -> u8 {
        match self {
            DerivKind::Sym => 0,
            DerivKind::K1 => 1,
            DerivKind::K2 => 2,
            DerivKind::K3 => 3,
            DerivKind::K4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<DerivKind> {
        DerivKind::ALL.get(n as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            DerivKind::Sym => "Sym",
            DerivKind::K1 => "K1",
            DerivKind::K2 => "K2",
            DerivKind::K3 => "K3",
            DerivKind::K4 => "K4",
        }
    }
}

impl fmt::Display for DerivKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Connection<S> {
    coeffs: TensorField<S>,
    sym: TensorField<S>,
    tor: TensorField<S>,
}

impl<S: Scalar> Connection<S> {
    pub fn new(coeffs: TensorField<S>) -> Result<Connection<S>> {
        if coeffs.valence() != (1, 2) {
            return Err(Error::Valence(format!(
                "connection needs valence (1,2), got {:?}",
                coeffs.valence()
            )));
        }
        let h = frac(1, 2);
        let sw = coeffs.swap_lower(0, 1)?;
        let sym = coeffs.add(&sw)?.scale(&h);
        let tor = coeffs.sub(&sw)?.scale(&h);
        Ok(Connection { coeffs, sym, tor })
    }

    /// Reassembles `sym + tor_half`; the parts must have the right symmetry.
    pub fn from_parts(sym: TensorField<S>, tor: TensorField<S>) -> Result<Connection<S>> {
        if sym.swap_lower(0, 1)? != sym {
            return Err(Error::NotSymmetric);
        }
        if tor.swap_lower(0, 1)? != tor.neg() {
            return Err(Error::Valence("torsion half must be antisymmetric".into()));
        }
        let coeffs = sym.add(&tor)?;
        Ok(Connection { coeffs, sym, tor })
    }

    pub fn zero(dim: usize) -> Connection<S> {
        Connection::new(TensorField::zeros(dim, 1, 2)).expect("valence is (1,2)")
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coeffs(&self) -> &TensorField<S> {
        &self.coeffs
    }

    /// Symmetric part `L^i_{(jk)}`.
    pub fn sym(&self) -> &TensorField<S> {
        &self.sym
    }

    /// Antisymmetric part `L^i_{[jk]}`, half the torsion.
    pub fn tor_half(&self) -> &TensorField<S> {
        &self.tor
    }

    pub fn torsion(&self) -> TensorField<S> {
        self.tor.scale(&int(2))
    }

    pub fn is_symmetric(&self) -> bool {
        self.tor.is_zero()
    }

    /// The associated symmetric connection and the torsion half.
    pub fn decompose(&self) -> (Connection<S>, TensorField<S>) {
        let assoc = Connection {
            coeffs: self.sym.clone(),
            sym: self.sym.clone(),
            tor: TensorField::zeros(self.dim(), 1, 2),
        };
        (assoc, self.tor.clone())
    }

    /// Coefficient used for upper indices: `S + su*A`.
    pub fn upper_coeff(&self, kind: DerivKind) -> TensorField<S> {
        self.signed(kind.signature().0)
    }

    /// Coefficient used for lower indices: `S - sl*A`.
    pub fn lower_coeff(&self, kind: DerivKind) -> TensorField<S> {
        self.signed(-kind.signature().1)
    }

    fn signed(&self, s: i8) -> TensorField<S> {
        match s {
            0 => self.sym.clone(),
            1 => self.coeffs.clone(),
            _ => self.sym.sub(&self.tor).expect("same shape"),
        }
    }
}

/// Covariant derivative of any valence: `(r, s)` becomes `(r, s+1)` with the
/// differentiation index last.
pub fn covariant_derivative<S: Scalar>(
    kind: DerivKind,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: l.dim() });
    }
    let up = l.upper_coeff(kind);
    let lo = l.lower_coeff(kind);
    Ok(derivative_with(a, &up, &lo))
}

fn derivative_with<S: Scalar>(
    a: &TensorField<S>,
    up: &TensorField<S>,
    lo: &TensorField<S>,
) -> TensorField<S> {
    let dim = a.dim();
    let (r, s) = a.valence();
    let rank = r + s;
    let one = Rational::one();
    let minus = -Rational::one();
    let mut src = vec![0usize; rank];
    TensorField::from_fn(dim, r, s + 1, |ix| {
        let k = ix[rank];
        let base = &ix[..rank];
        let mut acc = S::acc_new(dim);
        S::acc_add(&mut acc, &one, &[&a.get(base).partial(k)]);
        for slot in 0..rank {
            src.copy_from_slice(base);
            for al in 0..dim {
                src[slot] = al;
                if slot < r {
                    // + C^{i}_{al k} a^{..al..}
                    S::acc_add(&mut acc, &one, &[up.get(&[base[slot], al, k]), a.get(&src)]);
                } else {
                    // - C^{al}_{j k} a_{..al..}
                    S::acc_add(&mut acc, &minus, &[lo.get(&[al, base[slot], k]), a.get(&src)]);
                }
            }
        }
        S::acc_finish(acc)
    })
}

/// Direct transcription of the four non-symmetric rules and the symmetric one
/// for a (1,1) field, written against the raw coefficients.
pub fn covariant_derivative_literal<S: Scalar>(
    kind: DerivKind,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    if a.valence() != (1, 1) {
        return Err(Error::Valence("literal rule is for (1,1) fields".into()));
    }
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: l.dim() });
    }
    let dim = a.dim();
    let c = if kind == DerivKind::Sym { l.sym() } else { l.coeffs() };
    // whether the differentiation index sits first in the upper / lower term
    let (k_first_up, k_first_lo) = match kind {
        DerivKind::Sym | DerivKind::K1 => (false, false),
        DerivKind::K2 => (true, true),
        DerivKind::K3 => (false, true),
        DerivKind::K4 => (true, false),
    };
    let one = Rational::one();
    let minus = -Rational::one();
    Ok(TensorField::from_fn(dim, 1, 2, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = S::acc_new(dim);
        S::acc_add(&mut acc, &one, &[&a.get(&[i, j]).partial(k)]);
        for al in 0..dim {
            let cu = if k_first_up { c.get(&[i, k, al]) } else { c.get(&[i, al, k]) };
            let cl = if k_first_lo { c.get(&[al, k, j]) } else { c.get(&[al, j, k]) };
            S::acc_add(&mut acc, &one, &[cu, a.get(&[al, j])]);
            S::acc_add(&mut acc, &minus, &[cl, a.get(&[i, al])]);
        }
        S::acc_finish(acc)
    }))
}

/// `a_{p|m q|n}` by composition: kind `p`, then kind `q` on every index.
pub fn double_covariant_derivative<S: Scalar>(
    p: DerivKind,
    q: DerivKind,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let first = covariant_derivative(p, a, l)?;
    covariant_derivative(q, &first, l)
}

// Index pairs of the 19 connection factors in the expanded double derivative,
// in reading order; 'a' and 'b' are the summation indices.
const EXPLICIT_SLOTS: [(u8, u8, &str); 9] = [
    (1, 1, "jn jm mn an am am am bn ab mn jm bm jn jb mn am jn an jm"),
    (1, 2, "nj jm nm na am am am nb ab nm jm bm nj jb nm am nj na jm"),
    (1, 3, "nj jm nm an am am am bn ab nm jm bm nj jb nm am nj an jm"),
    (2, 1, "jn mj mn an ma ma ma bn ba mn mj mb jn bj mn ma jn an mj"),
    (2, 2, "nj mj nm na ma ma ma nb ba nm mj mb nj bj nm ma nj na mj"),
    (2, 3, "nj mj nm an ma ma ma bn ba nm mj mb nj bj nm ma nj an mj"),
    (3, 1, "jn mj mn an am am am bn ab mn mj mb jn bj mn am jn an mj"),
    (3, 2, "nj mj nm na am am am nb ab nm mj mb nj bj nm am nj na mj"),
    (3, 3, "nj mj nm an am am am bn ab nm mj mb nj bj nm am nj an mj"),
];

/// Expanded closed form of `a_{p|m q|n}` for `p, q` among K1..K3, written
/// term by term against the raw coefficients. Independent of
/// [`covariant_derivative`], so it serves as an oracle for composition.
pub fn explicit_double_derivative<S: Scalar>(
    p: DerivKind,
    q: DerivKind,
    a: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    let (pn, qn) = (p.number(), q.number());
    let Some((_, _, table)) = EXPLICIT_SLOTS.iter().find(|(x, y, _)| *x == pn && *y == qn) else {
        return Err(Error::UnsupportedKinds(format!("{p},{q}")));
    };
    if a.valence() != (1, 1) {
        return Err(Error::Valence("explicit form is for (1,1) fields".into()));
    }
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: l.dim() });
    }
    let slots: Vec<[u8; 2]> = table.split(' ').map(|t| [t.as_bytes()[0], t.as_bytes()[1]]).collect();
    let dim = a.dim();
    let c = l.coeffs();
    let da = a.gradient();
    let dc = c.gradient();
    let one = Rational::one();
    let minus = -Rational::one();

    Ok(TensorField::from_fn(dim, 1, 3, |ix| {
        let (i, j, m, n) = (ix[0], ix[1], ix[2], ix[3]);
        let pick = |ch: u8, al: usize, be: usize| match ch {
            b'j' => j,
            b'm' => m,
            b'n' => n,
            b'a' => al,
            _ => be,
        };
        // L^{up}[slot], optionally differentiated along n
        let lc = |up: usize, t: usize, al: usize, be: usize| {
            c.get(&[up, pick(slots[t][0], al, be), pick(slots[t][1], al, be)])
        };
        let ldn = |up: usize, t: usize, al: usize| {
            dc.get(&[up, pick(slots[t][0], al, 0), pick(slots[t][1], al, 0), n])
        };
        let mut acc = S::acc_new(dim);
        S::acc_add(&mut acc, &one, &[&a.get(&[i, j]).partial(m).partial(n)]);
        for al in 0..dim {
            S::acc_add(&mut acc, &minus, &[lc(al, 0, al, 0), da.get(&[i, al, m])]);
            S::acc_add(&mut acc, &minus, &[lc(al, 1, al, 0), da.get(&[i, al, n])]);
            S::acc_add(&mut acc, &minus, &[lc(al, 2, al, 0), da.get(&[i, j, al])]);
            S::acc_add(&mut acc, &one, &[lc(i, 3, al, 0), da.get(&[al, j, m])]);
            S::acc_add(&mut acc, &one, &[lc(i, 4, al, 0), da.get(&[al, j, n])]);
            S::acc_add(&mut acc, &one, &[a.get(&[al, j]), ldn(i, 5, al)]);
            S::acc_add(&mut acc, &minus, &[a.get(&[i, al]), ldn(al, 10, al)]);
            for be in 0..dim {
                S::acc_add(&mut acc, &one, &[a.get(&[al, j]), lc(be, 6, al, be), lc(i, 7, al, be)]);
                S::acc_add(&mut acc, &minus, &[a.get(&[al, j]), lc(i, 8, al, be), lc(be, 9, al, be)]);
                S::acc_add(&mut acc, &one, &[a.get(&[i, al]), lc(al, 11, al, be), lc(be, 12, al, be)]);
                S::acc_add(&mut acc, &one, &[a.get(&[i, al]), lc(al, 13, al, be), lc(be, 14, al, be)]);
                S::acc_add(&mut acc, &minus, &[a.get(&[al, be]), lc(i, 15, al, be), lc(be, 16, al, be)]);
                S::acc_add(&mut acc, &minus, &[a.get(&[al, be]), lc(i, 17, al, be), lc(be, 18, al, be)]);
            }
        }
        S::acc_finish(acc)
    }))
}

/// A linear relation `lhs = sum c_k * kind_k` among derivative kinds.
#[derive(Clone, Debug)]
pub struct KindRelation {
    pub tag: &'static str,
    pub lhs: DerivKind,
    pub rhs: Vec<(Rational, DerivKind)>,
}

/// The ten relations expressing each kind through the others.
pub fn derivative_relations() -> Vec<KindRelation> {
    use DerivKind::*;
    let h = || frac(1, 2);
    let rel = |tag, lhs, rhs: Vec<(Rational, DerivKind)>| KindRelation { tag, lhs, rhs };
    vec![
        rel("d0-12", Sym, vec![(h(), K1), (h(), K2)]),
        rel("d0-34", Sym, vec![(h(), K3), (h(), K4)]),
        rel("d1-02", K1, vec![(int(2), Sym), (int(-1), K2)]),
        rel("d1-234", K1, vec![(int(-1), K2), (int(1), K3), (int(1), K4)]),
        rel("d2-01", K2, vec![(int(2), Sym), (int(-1), K1)]),
        rel("d2-134", K2, vec![(int(-1), K1), (int(1), K3), (int(1), K4)]),
        rel("d3-04", K3, vec![(int(2), Sym), (int(-1), K4)]),
        rel("d3-124", K3, vec![(int(1), K1), (int(1), K2), (int(-1), K4)]),
        rel("d4-03", K4, vec![(int(2), Sym), (int(-1), K3)]),
        rel("d4-123", K4, vec![(int(1), K1), (int(1), K2), (int(-1), K3)]),
    ]
}

/// Residual `lhs - rhs` of every relation; each should be the zero tensor.
pub fn verify_derivative_relations<S: Scalar>(
    l: &Connection<S>,
    a: &TensorField<S>,
) -> Result<Vec<(&'static str, TensorField<S>)>> {
    let mut d = Vec::with_capacity(5);
    for k in DerivKind::ALL {
        d.push(covariant_derivative(k, a, l)?);
    }
    derivative_relations()
        .into_iter()
        .map(|r| {
            let mut terms = vec![(Rational::one(), &d[r.lhs.number() as usize])];
            terms.extend(r.rhs.iter().map(|(c, k)| (-c, &d[k.number() as usize])));
            Ok((r.tag, TensorField::linear_combination(&terms)?))
        })
        .collect()
}

/// Rank of the rows `(1, su, sl)`, one per kind.
pub fn derivative_kind_rank(kinds: &[DerivKind]) -> Result<usize> {
    if kinds.is_empty() {
        return Err(Error::Empty);
    }
    for (n, k) in kinds.iter().enumerate() {
        if kinds[..n].contains(k) {
            return Err(Error::DuplicateKind(k.name()));
        }
    }
    let rows: Vec<Vec<Rational>> = kinds
        .iter()
        .map(|k| {
            let (u, l) = k.signature();
            vec![int(1), int(u.into()), int(l.into())]
        })
        .collect();
    Ok(RationalMatrix::from_rows(rows)?.rank())
}

/// The eight independent triples `b1..b8`.
pub fn independent_triples() -> [(&'static str, [DerivKind; 3]); 8] {
    use DerivKind::*;
    [
        ("b1", [K1, K2, K3]),
        ("b2", [K1, K2, K4]),
        ("b3", [K1, K3, K4]),
        ("b4", [K2, K3, K4]),
        ("b5", [Sym, K1, K3]),
        ("b6", [Sym, K1, K4]),
        ("b7", [Sym, K2, K3]),
        ("b8", [Sym, K2, K4]),
    ]
}

/// The two triples that are not independent.
pub fn dependent_triples() -> [(&'static str, [DerivKind; 3]); 2] {
    use DerivKind::*;
    [("sym-1-2", [Sym, K1, K2]), ("sym-3-4", [Sym, K3, K4])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::random::{random_tensor, rng, FieldParams};

    fn conn(dim: usize, f: impl Fn(&[usize]) -> i64) -> Connection<Poly> {
        Connection::new(TensorField::from_fn(dim, 1, 2, |ix| Poly::constant(dim, int(f(ix))))).unwrap()
    }

    #[test]
    fn single_entry_decomposition() {
        // 1-based L^1_{23} = 1
        let l = conn(3, |ix| (ix == [0, 1, 2]) as i64);
        assert_eq!(l.sym().get(&[0, 1, 2]), &Poly::constant(3, frac(1, 2)));
        assert_eq!(l.sym().get(&[0, 2, 1]), &Poly::constant(3, frac(1, 2)));
        assert_eq!(l.tor_half().get(&[0, 1, 2]), &Poly::constant(3, frac(1, 2)));
        assert_eq!(l.tor_half().get(&[0, 2, 1]), &Poly::constant(3, frac(-1, 2)));
    }

    #[test]
    fn symmetric_connection_has_no_torsion() {
        let l = conn(3, |ix| (ix[1] + ix[2]) as i64);
        assert!(l.is_symmetric());
    }

    #[test]
    fn kronecker_derivatives() {
        let mut r = rng(11, &[]);
        let l = Connection::new(random_tensor(&mut r, 3, 1, 2, FieldParams::default())).unwrap();
        let d = TensorField::<Poly>::kronecker(3);
        assert!(covariant_derivative(DerivKind::K1, &d, &l).unwrap().is_zero());
        assert_eq!(covariant_derivative(DerivKind::K3, &d, &l).unwrap(), l.torsion());
    }

    #[test]
    fn zero_connection_gives_partials() {
        let mut r = rng(3, &[]);
        let a = random_tensor(&mut r, 2, 1, 1, FieldParams::default());
        let l = Connection::zero(2);
        for k in DerivKind::ALL {
            assert_eq!(covariant_derivative(k, &a, &l).unwrap(), a.gradient());
        }
    }

    #[test]
    fn triple_ranks() {
        for (_, t) in independent_triples() {
            assert_eq!(derivative_kind_rank(&t).unwrap(), 3);
        }
        for (_, t) in dependent_triples() {
            assert_eq!(derivative_kind_rank(&t).unwrap(), 2);
        }
    }

    #[test]
    fn duplicate_kinds_rejected() {
        let r = derivative_kind_rank(&[DerivKind::K1, DerivKind::K1]);
        assert_eq!(r, Err(Error::DuplicateKind("K1")));
        assert_eq!(derivative_kind_rank(&[]), Err(Error::Empty));
    }

    #[test]
    fn signatures_distinct() {
        for (n, a) in DerivKind::ALL.iter().enumerate() {
            for b in &DerivKind::ALL[n + 1..] {
                assert_ne!(a.signature(), b.signature());
            }
        }
    }

    #[test]
    fn explicit_rejects_fourth_kind() {
        let a = TensorField::<Poly>::kronecker(2);
        let l = Connection::zero(2);
        let r = explicit_double_derivative(DerivKind::K4, DerivKind::K1, &a, &l);
        assert!(matches!(r, Err(Error::UnsupportedKinds(_))));
    }
}
