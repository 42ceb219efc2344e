//! Generalized Riemannian spaces: a non-symmetric metric `g_{ij}`, the
//! Christoffel symbols it generates, and a four-dimensional cosmology family
//!
//! ```text
//!     [ s1  0   0   0  ]
//! b = [ 0   s2  n   0  ]      s_i, n functions of t = x0
//!     [ 0  -n   s3  0  ]
//!     [ 0   0   0   s4 ]
//! ```
//!
//! General polynomial metrics have no polynomial inverse, so their
//! Christoffel symbols are produced at rational points. The cosmology family
//! has a diagonal symmetric part and stays exact as rational functions of `t`.

use num_traits::{One, Signed, Zero};

use crate::connection::Connection;
use crate::curvature::associated_curvature;
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, UPoly};
use crate::rational::{format_rational, frac, half, int, to_f64, Rational};
use crate::scalar::{FieldScalar, Scalar};
use crate::tensor::TensorField;

fn check_metric<S: Scalar>(g: &TensorField<S>) -> Result<()> {
    if g.valence() != (0, 2) {
        return Err(Error::Valence(format!("metric must be (0,2), got {:?}", g.valence())));
    }
    Ok(())
}

/// `g_(ij) = (g_ij + g_ji) / 2`
pub fn sym_part<S: Scalar>(g: &TensorField<S>) -> TensorField<S> {
    let gt = g.swap_lower(0, 1).expect("rank 2");
    TensorField::linear_combination(&[(half(), g), (half(), &gt)]).expect("same shape")
}

/// `g_[ij] = (g_ij - g_ji) / 2`
pub fn vee_part<S: Scalar>(g: &TensorField<S>) -> TensorField<S> {
    let gt = g.swap_lower(0, 1).expect("rank 2");
    TensorField::linear_combination(&[(half(), g), (-half(), &gt)]).expect("same shape")
}

/// `G^i_{jk} = 1/2 g^{ia} (g_{ja,k} - g_{jk,a} + g_{ak,j})` from the metric
/// gradient `dg[j, a, k] = g_{ja,k}` and the inverse symmetric part.
pub fn christoffel_from_parts<S: Scalar>(dg: &TensorField<S>, ginv: &TensorField<S>) -> Result<Connection<S>> {
    if dg.valence() != (0, 3) || ginv.valence() != (2, 0) {
        return Err(Error::Valence("expected g_{ij,k} and g^{ij}".into()));
    }
    let dim = dg.dim();
    let h = half();
    let first = first_kind(dg);
    let coeffs = TensorField::from_fn(dim, 1, 2, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = S::acc_new(dim);
        for al in 0..dim {
            S::acc_add(&mut acc, &h, &[ginv.get(&[i, al]), first.get(&[al, j, k])]);
        }
        S::acc_finish(acc)
    });
    Connection::new(coeffs)
}

// [a, j, k] -> g_{ja,k} - g_{jk,a} + g_{ak,j}
fn first_kind<S: Scalar>(dg: &TensorField<S>) -> TensorField<S> {
    TensorField::from_fn(dg.dim(), 0, 3, |ix| {
        let (al, j, k) = (ix[0], ix[1], ix[2]);
        dg.get(&[j, al, k]).minus(dg.get(&[j, k, al])).plus(dg.get(&[al, k, j]))
    })
}

/// `G_{a.[jk]} = 1/2 (g_[ja],k - g_[jk],a + g_[ak],j)`, indexed `[a, j, k]`.
pub fn christoffel_first_kind_antisym<S: Scalar>(g: &TensorField<S>) -> Result<TensorField<S>> {
    check_metric(g)?;
    Ok(first_kind(&vee_part(g).gradient()).scale(&half()))
}

/// `g_{ij,k} - L^a_{ik} g_{aj} - L^a_{kj} g_{ia}` from the metric, its
/// gradient and a connection.
pub fn metricity_from_parts<S: Scalar>(
    g: &TensorField<S>,
    dg: &TensorField<S>,
    l: &Connection<S>,
) -> Result<TensorField<S>> {
    check_metric(g)?;
    if g.dim() != l.dim() {
        return Err(Error::DimensionMismatch { left: g.dim(), right: l.dim() });
    }
    let dim = g.dim();
    let c = l.coeffs();
    let m1 = -Rational::one();
    Ok(TensorField::from_fn(dim, 0, 3, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = S::acc_new(dim);
        S::acc_add(&mut acc, &Rational::one(), &[dg.get(&[i, j, k])]);
        for al in 0..dim {
            S::acc_add(&mut acc, &m1, &[c.get(&[al, i, k]), g.get(&[al, j])]);
            S::acc_add(&mut acc, &m1, &[c.get(&[al, k, j]), g.get(&[i, al])]);
        }
        S::acc_finish(acc)
    }))
}

/// Einstein metricity residual of a symbolic metric and connection.
pub fn einstein_metricity_residual<S: Scalar>(g: &TensorField<S>, l: &Connection<S>) -> Result<TensorField<S>> {
    metricity_from_parts(g, &g.gradient(), l)
}

/// A polynomial metric whose symmetric part is inverted pointwise.
#[derive(Clone, PartialEq, Debug)]
pub struct GeneralizedMetric {
    g: TensorField<Poly>,
}

fn eval_tensor(t: &TensorField<Poly>, p: &[Rational]) -> TensorField<Poly> {
    let dim = t.dim();
    t.map(|x| Poly::constant(dim, x.eval(p)))
}

impl GeneralizedMetric {
    pub fn new(g: TensorField<Poly>) -> Result<GeneralizedMetric> {
        check_metric(&g)?;
        Ok(GeneralizedMetric { g })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g(&self) -> &TensorField<Poly> {
        &self.g
    }

    pub fn sym(&self) -> TensorField<Poly> {
        sym_part(&self.g)
    }

    pub fn vee(&self) -> TensorField<Poly> {
        vee_part(&self.g)
    }

    fn check_point(&self, p: &[Rational]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { left: p.len(), right: self.dim() });
        }
        Ok(())
    }

    /// `g^{ij}` at `p`.
    pub fn sym_inverse_at(&self, p: &[Rational]) -> Result<RationalMatrix> {
        self.check_point(p)?;
        let s = self.sym();
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| s.get(&[i, j]).eval(p)).collect()).collect();
        RationalMatrix::from_rows(rows)?.inverse().ok_or(Error::SingularMetric)
    }

    /// Generalized Christoffel symbols at `p`, as a connection with constant
    /// entries.
    pub fn christoffel_at(&self, p: &[Rational]) -> Result<Connection<Poly>> {
        let inv = self.sym_inverse_at(p)?;
        let n = self.dim();
        let ginv = TensorField::from_fn(n, 2, 0, |ix| Poly::constant(n, inv.get(ix[0], ix[1]).clone()));
        christoffel_from_parts(&eval_tensor(&self.g.gradient(), p), &ginv)
    }

    /// Einstein metricity residual at `p` for any polynomial connection.
    pub fn einstein_metricity_residual_at(&self, l: &Connection<Poly>, p: &[Rational]) -> Result<TensorField<Poly>> {
        self.check_point(p)?;
        let lp = Connection::new(eval_tensor(l.coeffs(), p))?;
        metricity_from_parts(&eval_tensor(&self.g, p), &eval_tensor(&self.g.gradient(), p), &lp)
    }
}

/// Composite Simpson samples of a recovered `n`: `n1` and `n2 = -n1`, both
/// zero at the left end.
#[derive(Clone, PartialEq, Debug)]
pub struct Recovery {
    pub t: Vec<f64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
}

/// The cosmology family, with `coupling` the value of `v' - w`.
#[derive(Clone, PartialEq, Debug)]
pub struct CosmologyMetric {
    s: [UPoly; 4],
    n: UPoly,
    coupling: Rational,
}

const DIM: usize = 4;

fn rf(p: &UPoly) -> RatFunc {
    RatFunc::from_poly(DIM, p.clone())
}

impl CosmologyMetric {
    pub fn new(s: [UPoly; 4], n: UPoly, coupling: Rational) -> Result<CosmologyMetric> {
        if let Some(k) = s.iter().position(UPoly::is_zero) {
            return Err(Error::Vanishing(format!("s{}", k + 1)));
        }
        Ok(CosmologyMetric { s, n, coupling })
    }

    pub fn s(&self) -> &[UPoly; 4] {
        &self.s
    }

    pub fn n(&self) -> &UPoly {
        &self.n
    }

    pub fn coupling(&self) -> &Rational {
        &self.coupling
    }

    /// Same metric with `n` replaced by `c * n`.
    pub fn with_scaled_n(&self, c: &Rational) -> CosmologyMetric {
        CosmologyMetric { n: self.n.scale(c), ..self.clone() }
    }

    pub fn metric(&self) -> TensorField<RatFunc> {
        TensorField::from_fn(DIM, 0, 2, |ix| match (ix[0], ix[1]) {
            (i, j) if i == j => rf(&self.s[i]),
            (1, 2) => rf(&self.n),
            (2, 1) => rf(&self.n.scale(&int(-1))),
            _ => RatFunc::zero(DIM),
        })
    }

    /// `b^{ij}`: diagonal with entries `1 / s_i`.
    pub fn sym_inverse(&self) -> TensorField<RatFunc> {
        TensorField::from_fn(DIM, 2, 0, |ix| {
            if ix[0] == ix[1] {
                rf(&self.s[ix[0]]).checked_inv().expect("s_i is not the zero polynomial")
            } else {
                RatFunc::zero(DIM)
            }
        })
    }

    pub fn christoffel(&self) -> Connection<RatFunc> {
        christoffel_from_parts(&self.metric().gradient(), &self.sym_inverse()).expect("valences fixed")
    }

    /// Levi-Civita connection of the symmetric part.
    pub fn levi_civita(&self) -> Connection<RatFunc> {
        christoffel_from_parts(&sym_part(&self.metric()).gradient(), &self.sym_inverse()).expect("valences fixed")
    }

    pub fn first_kind_antisym(&self) -> TensorField<RatFunc> {
        christoffel_first_kind_antisym(&self.metric()).expect("valence fixed")
    }

    /// `R = b^{ab} R^c_{abc}` of the symmetric part.
    pub fn scalar_curvature_r(&self) -> RatFunc {
        let r = associated_curvature(&self.levi_civita());
        let inv = self.sym_inverse();
        let mut acc = RatFunc::acc_new(DIM);
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    RatFunc::acc_add(&mut acc, &Rational::one(), &[inv.get(&[a, b]), r.get(&[c, a, b, c])]);
                }
            }
        }
        RatFunc::acc_finish(acc)
    }

    // raise the listed slots of a (0,3) field with b^{ij}
    fn raise(&self, t: &TensorField<RatFunc>, slots: &[usize]) -> TensorField<RatFunc> {
        let inv = self.sym_inverse();
        let mut cur = t.clone();
        for &s in slots {
            let prev = cur;
            cur = TensorField::from_fn(DIM, 0, 3, |ix| {
                let mut acc = RatFunc::acc_new(DIM);
                let mut src = [ix[0], ix[1], ix[2]];
                for a in 0..DIM {
                    src[s] = a;
                    RatFunc::acc_add(&mut acc, &Rational::one(), &[inv.get(&[ix[s], a]), prev.get(&src)]);
                }
                RatFunc::acc_finish(acc)
            });
        }
        cur
    }

    /// `b^{ab} b^{ce} b^{dz} G_{a.[cd]} G_{b.[ez]}`
    pub fn torsion_contraction(&self) -> RatFunc {
        let g = self.first_kind_antisym();
        let up = self.raise(&g, &[0, 1, 2]);
        let terms: Vec<_> = g.entries().iter().zip(up.entries()).map(|(x, y)| (Rational::one(), vec![x, y])).collect();
        crate::scalar::sum_products(DIM, &terms)
    }

    /// `R + (v' - w) * contraction`
    pub fn scalar_curvature_family(&self) -> RatFunc {
        self.scalar_curvature_r().plus(&self.matter_lagrangian())
    }

    /// Matter Lagrangian through the triple contraction.
    pub fn matter_lagrangian(&self) -> RatFunc {
        self.torsion_contraction().scaled(&self.coupling)
    }

    /// `3 (v' - w) / 2 * n'^2 / (s1 s2 s3)`
    pub fn matter_lagrangian_closed_form(&self) -> RatFunc {
        let dn = self.n.derivative();
        let num = dn.mul(&dn).scale(&(&self.coupling * frac(3, 2)));
        let den = self.s[0].mul(&self.s[1]).mul(&self.s[2]);
        RatFunc::new(DIM, num, den)
    }

    /// `T_ij = -2 dL/db^{ij} + b_(ij) L`, each `b^{ij}` an independent
    /// variable and `L` the contraction form of the matter Lagrangian.
    pub fn energy_momentum(&self) -> TensorField<RatFunc> {
        let g = self.first_kind_antisym();
        let lm = self.matter_lagrangian();
        let bs = sym_part(&self.metric());
        // d/db^{ij} hits each of the three inverse factors once
        let w1 = self.raise(&g, &[1, 2]);
        let w2 = self.raise(&g, &[0, 2]);
        let w3 = self.raise(&g, &[0, 1]);
        let one = Rational::one();
        let m2k = &self.coupling * int(-2);
        TensorField::from_fn(DIM, 0, 2, |ix| {
            let (i, j) = (ix[0], ix[1]);
            let mut acc = RatFunc::acc_new(DIM);
            for a in 0..DIM {
                for b in 0..DIM {
                    RatFunc::acc_add(&mut acc, &m2k, &[g.get(&[i, a, b]), w1.get(&[j, a, b])]);
                    RatFunc::acc_add(&mut acc, &m2k, &[g.get(&[a, i, b]), w2.get(&[a, j, b])]);
                    RatFunc::acc_add(&mut acc, &m2k, &[g.get(&[a, b, i]), w3.get(&[a, b, j])]);
                }
            }
            RatFunc::acc_add(&mut acc, &one, &[bs.get(&[i, j]), &lm]);
            RatFunc::acc_finish(acc)
        })
    }

    /// `n_{1,2} = +-2 / (3 (v' - w)) * integral sqrt(L_M s1 s2 s3) dt` by
    /// composite Simpson with `panels` panels on `[t0, t1]`.
    pub fn recover_n(&self, t0: &Rational, t1: &Rational, panels: usize) -> Result<Recovery> {
        if !self.coupling.is_positive() {
            return Err(Error::NonPositiveCoupling(format_rational(&self.coupling)));
        }
        if panels == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one panel".into()));
        }
        if t1 <= t0 {
            return Err(Error::InvalidArgument("empty integration window".into()));
        }
        let prod = self.s[0].mul(&self.s[1]).mul(&self.s[2]);
        let radicand = self.matter_lagrangian().times(&RatFunc::from_poly(DIM, prod));
        let step = (t1 - t0) / int(2 * panels as i64);
        let mut f = Vec::with_capacity(2 * panels + 1);
        for k in 0..=2 * panels {
            let t = t0 + &step * int(k as i64);
            if let Some(i) = self.s.iter().position(|s| s.eval(&t).is_zero()) {
                return Err(Error::Vanishing(format!("s{} at t = {}", i + 1, format_rational(&t))));
            }
            let v = radicand.eval(&t).ok_or_else(|| Error::Vanishing(format!("denominator at t = {}", format_rational(&t))))?;
            if v.is_negative() {
                return Err(Error::NegativeRadicand(format_rational(&t)));
            }
            f.push(to_f64(&v).sqrt());
        }
        let scale = 2.0 / (3.0 * to_f64(&self.coupling));
        let h = to_f64(&step);
        let mut t = vec![to_f64(t0)];
        let mut n1 = vec![0.0];
        for p in 0..panels {
            let area = h / 3.0 * (f[2 * p] + 4.0 * f[2 * p + 1] + f[2 * p + 2]);
            n1.push(n1[p] + scale * area);
            t.push(to_f64(&(t0 + &step * int(2 * p as i64 + 2))));
        }
        let n2 = n1.iter().map(|x| -x).collect();
        Ok(Recovery { t, n1, n2 })
    }
}
