//! Dense tensor fields with declared valence.
//!
//! Entries are stored row-major over the index tuple `(i_1..i_r, j_1..j_s)`:
//! all upper slots first, then all lower slots.

use crate::error::{Error, Result};
use crate::poly::MAX_DIM;
use crate::rational::Rational;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct TensorField<S> {
    dim: usize,
    upper: usize,
    lower: usize,
    entries: Vec<S>,
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::BadDimension(dim));
    }
    Ok(())
}

/// Calls `f` on every index tuple of length `rank` over `0..dim`, in storage order.
pub fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl<S: Scalar> TensorField<S> {
    pub fn zeros(dim: usize, upper: usize, lower: usize) -> TensorField<S> {
        let n = dim.pow((upper + lower) as u32);
        TensorField {
            dim,
            upper,
            lower,
            entries: vec![S::zero(dim); n],
        }
    }

    pub fn from_fn(
        dim: usize,
        upper: usize,
        lower: usize,
        mut f: impl FnMut(&[usize]) -> S,
    ) -> TensorField<S> {
        let mut entries = Vec::with_capacity(dim.pow((upper + lower) as u32));
        for_each_index(dim, upper + lower, |idx| entries.push(f(idx)));
        TensorField { dim, upper, lower, entries }
    }

    /// Wraps already-ordered entries; the length must be `dim^(upper+lower)`.
    pub fn from_entries(dim: usize, upper: usize, lower: usize, entries: Vec<S>) -> Result<Self> {
        let n = dim.pow((upper + lower) as u32);
        if entries.len() != n {
            return Err(Error::Valence(format!(
                "{} entries for valence ({upper},{lower}) in dimension {dim}",
                entries.len()
            )));
        }
        Ok(TensorField { dim, upper, lower, entries })
    }

    /// The Kronecker delta as a (1,1) field.
    pub fn kronecker(dim: usize) -> TensorField<S> {
        Self::from_fn(dim, 1, 1, |ix| {
            if ix[0] == ix[1] {
                S::constant(dim, Rational::from_integer(1.into()))
            } else {
                S::zero(dim)
            }
        })
    }

    pub fn scalar(dim: usize, s: S) -> TensorField<S> {
        TensorField { dim, upper: 0, lower: 0, entries: vec![s] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn upper(&self) -> usize {
        self.upper
    }
    pub fn lower(&self) -> usize {
        self.lower
    }
    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }
    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }
    pub fn entries(&self) -> &[S] {
        &self.entries
    }
    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.entries[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.entries[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: o.dim });
        }
        if self.valence() != o.valence() {
            return Err(Error::Valence(format!(
                "({},{}) vs ({},{})",
                self.upper, self.lower, o.upper, o.lower
            )));
        }
        Ok(())
    }

    pub fn zip_with(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.same_shape(o)?;
        Ok(TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, |a, b| a.plus(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, |a, b| a.minus(b))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|a| a.scaled(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.negated())
    }

    /// Sums `c_k * T_k`; all terms must share a shape.
    pub fn linear_combination(terms: &[(Rational, &Self)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::Empty)?;
        for (_, t) in terms {
            first.same_shape(t)?;
        }
        let dim = first.dim;
        let entries = (0..first.entries.len())
            .map(|n| {
                let mut acc = S::acc_new(dim);
                for (c, t) in terms {
                    S::acc_add(&mut acc, c, &[&t.entries[n]]);
                }
                S::acc_finish(acc)
            })
            .collect();
        Ok(TensorField { dim, upper: first.upper, lower: first.lower, entries })
    }

    /// Comma derivative: valence (r, s) to (r, s+1), new index last.
    pub fn gradient(&self) -> Self {
        let rank = self.rank();
        Self::from_fn(self.dim, self.upper, self.lower + 1, |ix| {
            self.get(&ix[..rank]).partial(ix[rank])
        })
    }

    /// Sum over an upper slot `u` and a lower slot `l` (both counted within
    /// their own group).
    pub fn contract(&self, u: usize, l: usize) -> Result<Self> {
        if u >= self.upper || l >= self.lower {
            return Err(Error::ContractionSlot { upper: u, lower: l });
        }
        let (r, s) = (self.upper - 1, self.lower - 1);
        let lpos = self.upper + l;
        let mut full = vec![0usize; self.rank()];
        Ok(Self::from_fn(self.dim, r, s, |ix| {
            // reinsert the summed slot at both positions
            let mut src = ix.iter().copied();
            for (p, slot) in full.iter_mut().enumerate() {
                if p != u && p != lpos {
                    *slot = src.next().unwrap();
                }
            }
            let mut acc = S::acc_new(self.dim);
            for a in 0..self.dim {
                full[u] = a;
                full[lpos] = a;
                S::acc_add(&mut acc, &Rational::from_integer(1.into()), &[self.get(&full)]);
            }
            S::acc_finish(acc)
        }))
    }

    /// Tensor product: upper slots `self.upper ++ o.upper`, lower likewise.
    pub fn outer(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: o.dim });
        }
        let (r1, s1) = self.valence();
        let (r2, _) = o.valence();
        Ok(Self::from_fn(self.dim, r1 + r2, self.lower + o.lower, |ix| {
            let a: Vec<usize> = ix[..r1].iter().chain(&ix[r1 + r2..r1 + r2 + s1]).copied().collect();
            let b: Vec<usize> = ix[r1..r1 + r2].iter().chain(&ix[r1 + r2 + s1..]).copied().collect();
            self.get(&a).times(o.get(&b))
        }))
    }

    /// Reorders all slots: output slot `p` reads input slot `perm[p]`.
    /// Upper slots must stay among the first `upper` positions.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.rank();
        let mut seen = vec![false; rank];
        if perm.len() != rank
            || perm.iter().any(|&p| p >= rank || std::mem::replace(&mut seen[p], true))
            || perm[..self.upper].iter().any(|&p| p >= self.upper)
        {
            return Err(Error::Valence(format!("invalid slot permutation {perm:?}")));
        }
        let mut src = vec![0usize; rank];
        Ok(Self::from_fn(self.dim, self.upper, self.lower, |ix| {
            for (p, &q) in perm.iter().enumerate() {
                src[q] = ix[p];
            }
            self.get(&src).clone()
        }))
    }

    /// Exchanges lower slots `a` and `b`.
    pub fn swap_lower(&self, a: usize, b: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(self.upper + a, self.upper + b);
        self.permute(&perm)
    }
}
