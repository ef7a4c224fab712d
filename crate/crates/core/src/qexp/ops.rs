use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expansion::{box_keys, in_box, CoeffSource, SiegelExpansion, Weight};
use crate::bqf::{act, coset_reps, Bqf, GL2Mat};
use crate::error::{Error, Result};
use crate::padic::{legendre, PValuedScalar, ScalarCtx};
use crate::symrep::{contract, DualQuadric, RhoMatrix, SymVector};

/// Default ceiling on the precision produced by V and V2.
pub const DEFAULT_PRECISION_CAP: u64 = 4096;

/// Letters of operator words. `U2` is shorthand for -1 + p X2 and `S` for
/// the scalar p^{j+k-6}; both are expanded by simplification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prim {
    Id,
    U,
    Z,
    V,
    Z2,
    X2,
    V2,
    S,
    U2,
}

impl Prim {
    pub const ALL: [Prim; 9] = [Prim::Id, Prim::U, Prim::Z, Prim::V, Prim::Z2, Prim::X2, Prim::V2, Prim::S, Prim::U2];

    /// Output precision from input precision b.
    pub fn output_precision(&self, p: u64, b: u64, cap: u64) -> Result<u64> {
        let out = match self {
            Prim::U | Prim::Z => b / p,
            Prim::Z2 => b / (p * p),
            Prim::V => (p * b).min(cap.max(b)),
            Prim::V2 => (p * p * b).min(cap.max(b)),
            Prim::Id | Prim::X2 | Prim::S | Prim::U2 => b,
        };
        if out == 0 {
            return Err(Error::PrecisionExhausted { op: self.to_string(), precision: b });
        }
        Ok(out)
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Prim::Id => "Id",
            Prim::U => "U",
            Prim::Z => "Z",
            Prim::V => "V",
            Prim::Z2 => "Z2",
            Prim::X2 => "X2",
            Prim::V2 => "V2",
            Prim::S => "S",
            Prim::U2 => "U2",
        };
        f.write_str(s)
    }
}

impl FromStr for Prim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Prim::ALL
            .iter()
            .find(|p| p.to_string() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown operator {s:?}")))
    }
}

/// p^{j+k-6}.
pub fn s_scalar(ctx: ScalarCtx, w: Weight) -> PValuedScalar {
    PValuedScalar::p_power(ctx, w.j as i32 + w.k as i32 - 6)
}

/// Coset representatives with their rho matrices, shared by Z and Z2.
#[derive(Clone, Debug)]
pub struct CosetData {
    reps: Vec<(GL2Mat, GL2Mat, RhoMatrix)>,
}

impl CosetData {
    pub fn new(ctx: ScalarCtx, d: usize) -> Self {
        let reps = coset_reps(ctx.p()).into_iter().map(|m| (m, m.adj(), RhoMatrix::new(ctx, &m, d))).collect();
        CosetData { reps }
    }

    /// sum over representatives M with M^{-1}.Q integral of rho(M) a(M^{-1}.Q).
    pub fn coset_sum(&self, src: &dyn CoeffSource, q: &Bqf) -> SymVector {
        let mut acc = SymVector::zero(src.ctx(), src.weight().degree());
        for (_, adj, rho) in &self.reps {
            if let Some(pq) = act(adj, q) {
                let a = src.coeff(&pq);
                if !a.is_zero() {
                    acc.add_assign(&rho.apply(&a).expect("degree fixed by source"));
                }
            }
        }
        acc
    }
}

/// a(X2 F, Q) multiplier: (D/p) for p-primitive Q, p for Q = 0 mod p.
pub fn x2_multiplier(q: &Bqf, p: u64) -> i128 {
    if q.is_zero_mod(p) {
        p as i128
    } else {
        legendre(q.disc(), p) as i128
    }
}

/// The lazy image of a source under one primitive.
pub struct Applied<'a> {
    op: Prim,
    inner: Box<dyn CoeffSource + 'a>,
    precision: u64,
    cosets: Option<Arc<CosetData>>,
    scalar: u64,
}

/// Borrow a source into a word chain.
pub struct Borrowed<'a>(pub &'a dyn CoeffSource);

impl CoeffSource for Borrowed<'_> {
    fn ctx(&self) -> ScalarCtx {
        self.0.ctx()
    }
    fn weight(&self) -> Weight {
        self.0.weight()
    }
    fn precision(&self) -> u64 {
        self.0.precision()
    }
    fn coeff(&self, q: &Bqf) -> SymVector {
        self.0.coeff(q)
    }
}

impl<'a> Applied<'a> {
    pub fn new(op: Prim, inner: Box<dyn CoeffSource + 'a>, cap: u64) -> Result<Self> {
        let ctx = inner.ctx();
        let precision = op.output_precision(ctx.p(), inner.precision(), cap)?;
        let cosets = matches!(op, Prim::Z | Prim::Z2).then(|| Arc::new(CosetData::new(ctx, inner.weight().degree())));
        let scalar = match op {
            Prim::S => s_scalar(ctx, inner.weight()).to_residue()?,
            _ => 0,
        };
        Ok(Applied { op, inner, precision, cosets, scalar })
    }
}

impl CoeffSource for Applied<'_> {
    fn ctx(&self) -> ScalarCtx {
        self.inner.ctx()
    }

    fn weight(&self) -> Weight {
        self.inner.weight()
    }

    fn precision(&self) -> u64 {
        self.precision
    }

    fn coeff(&self, q: &Bqf) -> SymVector {
        let ctx = self.ctx();
        let p = ctx.p() as i64;
        if !in_box(q, self.precision) {
            return SymVector::zero(ctx, self.weight().degree());
        }
        let zero = || SymVector::zero(ctx, self.weight().degree());
        match self.op {
            Prim::Id => self.inner.coeff(q),
            Prim::U => self.inner.coeff(&q.scale(p)),
            Prim::Z => self.cosets.as_ref().unwrap().coset_sum(self.inner.as_ref(), q),
            Prim::Z2 => self.cosets.as_ref().unwrap().coset_sum(self.inner.as_ref(), &q.scale(p)),
            Prim::V => q.divide(p).map_or_else(zero, |x| self.inner.coeff(&x)),
            Prim::V2 => q.divide(p * p).map_or_else(zero, |x| self.inner.coeff(&x)),
            Prim::X2 => self.inner.coeff(q).scale_int(x2_multiplier(q, ctx.p())),
            Prim::U2 => self.inner.coeff(q).scale_int(p as i128 * x2_multiplier(q, ctx.p()) - 1),
            Prim::S => self.inner.coeff(q).scale(self.scalar),
        }
    }
}

/// Apply one primitive to a stored expansion.
pub fn apply_primitive(op: Prim, f: &SiegelExpansion) -> Result<SiegelExpansion> {
    apply_primitive_capped(op, f, DEFAULT_PRECISION_CAP)
}

pub fn apply_primitive_capped(op: Prim, f: &SiegelExpansion, cap: u64) -> Result<SiegelExpansion> {
    let ctx = f.ctx();
    let p = ctx.p() as i64;
    let b = op.output_precision(ctx.p(), f.precision(), cap)?;
    let mut out = SiegelExpansion::new(ctx, f.weight(), b)?;
    match op {
        Prim::U | Prim::Z | Prim::Z2 | Prim::Id => {
            return SiegelExpansion::from_source(&Applied::new(op, Box::new(Borrowed(f)), cap)?, b);
        }
        Prim::V | Prim::V2 => {
            let s = if op == Prim::V { p } else { p * p };
            for (q, v) in f.iter() {
                let t = q.scale(s);
                if in_box(&t, b) {
                    out.insert(t, v.clone())?;
                }
            }
        }
        Prim::X2 | Prim::U2 | Prim::S => {
            let scalar = if op == Prim::S { Some(s_scalar(ctx, f.weight()).to_residue()?) } else { None };
            for (q, v) in f.iter() {
                let w = match op {
                    Prim::X2 => v.scale_int(x2_multiplier(q, ctx.p())),
                    Prim::U2 => v.scale_int(p as i128 * x2_multiplier(q, ctx.p()) - 1),
                    _ => v.scale(scalar.unwrap()),
                };
                out.insert(*q, w)?;
            }
        }
    }
    Ok(out)
}

/// Coefficientwise multiplication by det(Q) = (4mn - r^2)/4; parallel weight only.
pub fn theta(f: &SiegelExpansion) -> Result<SiegelExpansion> {
    let w = f.weight();
    let ctx = f.ctx();
    if w.j != w.k {
        return Err(Error::InvalidWeight(format!("theta needs parallel weight, got {w}")));
    }
    if ctx.p() <= 3 {
        return Err(Error::InvalidContext("theta needs p > 3".into()));
    }
    let k = w.k + ctx.p() as u32 + 1;
    let mut out = SiegelExpansion::new(ctx, Weight::new(k, k)?, f.precision())?;
    for (q, v) in f.iter() {
        out.insert(*q, v.scale(det_residue(ctx, q)))?;
    }
    Ok(out)
}

/// (4mn - r^2) * 4^{-1} mod p^m.
pub fn det_residue(ctx: ScalarCtx, q: &Bqf) -> u64 {
    let inv4 = ctx.inv(4).expect("p is odd");
    ctx.mul(ctx.reduce(-q.disc()), inv4)
}

/// a(Q) -> det(Q) con(a(Q), Q^vee); weight (j, k) -> (j + p - 1, k + p + 1).
pub fn theta1(f: &SiegelExpansion) -> Result<SiegelExpansion> {
    let w = f.weight();
    let ctx = f.ctx();
    let d = w.degree();
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    if ctx.p() as usize <= d {
        return Err(Error::PrimeTooSmall { p: ctx.p(), degree: d });
    }
    let p = ctx.p() as u32;
    let mut out = SiegelExpansion::new(ctx, Weight::new(w.j + p - 1, w.k + p + 1)?, f.precision())?;
    for (q, v) in f.iter() {
        let c = contract(v, &DualQuadric::from(*q))?;
        out.insert(*q, c.scale(det_residue(ctx, q)))?;
    }
    Ok(out)
}

/// Multiplication by the s-th power of the Hasse invariant (q-expansion 1).
pub fn hasse_shift(f: &SiegelExpansion, s: u32) -> Result<SiegelExpansion> {
    let shift = s * (f.ctx().p() as u32 - 1);
    let w = f.weight();
    f.clone().with_weight(Weight::new(w.j + shift, w.k + shift)?)
}

/// A failure of a(M.Q) = rho(M) a(Q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceViolation {
    pub form: Bqf,
    pub generator: GL2Mat,
    pub image: Bqf,
}

/// Check a(M.Q) = rho(M) a(Q) for the generators [[1,1],[0,1]], [[0,-1],[1,0]]
/// and their inverses, at every stored Q whose image stays in the box.
pub fn check_equivariance(f: &SiegelExpansion) -> Vec<EquivarianceViolation> {
    let gens = [
        GL2Mat { a: 1, b: 1, c: 0, d: 1 },
        GL2Mat { a: 1, b: -1, c: 0, d: 1 },
        GL2Mat { a: 0, b: -1, c: 1, d: 0 },
        GL2Mat { a: 0, b: 1, c: -1, d: 0 },
    ];
    let d = f.weight().degree();
    let rhos: Vec<RhoMatrix> = gens.iter().map(|g| RhoMatrix::new(f.ctx(), g, d)).collect();
    let mut out = Vec::new();
    for (q, v) in f.iter() {
        for (g, rho) in gens.iter().zip(&rhos) {
            let Some(img) = act(g, q) else { continue };
            if !in_box(&img, f.precision()) {
                continue;
            }
            if f.coeff(&img) != rho.apply(v).expect("degree") {
                out.push(EquivarianceViolation { form: *q, generator: *g, image: img });
            }
        }
    }
    out
}

/// Evaluate the box of a lazy source in parallel (used by word evaluation).
pub(crate) fn gather(src: &dyn CoeffSource, b: u64) -> Vec<(Bqf, SymVector)> {
    box_keys(b)
        .into_par_iter()
        .map(|q| (q, src.coeff(&q)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqf::neighbors;
    use crate::qexp::random::{random_expansion, symmetrized_expansion};

    fn ctx(p: u64, m: u32) -> ScalarCtx {
        ScalarCtx::new(p, m).unwrap()
    }

    fn single(c: ScalarCtx, w: Weight, b: u64, q: Bqf, v: SymVector) -> SiegelExpansion {
        let mut f = SiegelExpansion::new(c, w, b).unwrap();
        f.insert(q, v).unwrap();
        f
    }

    #[test]
    fn u_shifts_support() {
        let c = ctx(5, 1);
        let w = Weight::new(2, 2).unwrap();
        let v = SymVector::from_ints(c, &[3]);
        let f = single(c, w, 25, Bqf::new(5, 5, 10), v.clone());
        let g = apply_primitive(Prim::U, &f).unwrap();
        assert_eq!(g.precision(), 5);
        assert_eq!(g.iter().collect::<Vec<_>>(), vec![(&Bqf::new(1, 1, 2), &v)]);
    }

    #[test]
    fn x2_example() {
        let c = ctx(5, 2);
        let w = Weight::new(4, 2).unwrap();
        let v = SymVector::from_ints(c, &[1, 2, 3]);
        let f = single(c, w, 10, Bqf::new(1, 0, 2), v.clone());
        let g = apply_primitive(Prim::X2, &f).unwrap();
        assert_eq!(g.coeff(&Bqf::new(1, 0, 2)), v.neg());
        let h = single(c, w, 10, Bqf::new(5, 0, 5), v.clone());
        assert_eq!(apply_primitive(Prim::X2, &h).unwrap().coeff(&Bqf::new(5, 0, 5)), v.scale(5));
    }

    #[test]
    fn z_on_single_coefficient() {
        let c = ctx(5, 2);
        let w = Weight::new(4, 2).unwrap();
        let q0 = Bqf::new(5, 0, 1);
        let v = SymVector::from_ints(c, &[1, 7, 3]);
        let f = single(c, w, 50, q0, v.clone());
        let g = apply_primitive(Prim::Z, &f).unwrap();
        let mut expect = std::collections::BTreeMap::new();
        for m in coset_reps(5) {
            if let Some(t) = act(&m, &q0) {
                let e: &mut SymVector = expect.entry(t).or_insert_with(|| SymVector::zero(c, 2));
                e.add_assign(&crate::symrep::rho_apply(&m, &v));
            }
        }
        let got: std::collections::BTreeMap<Bqf, SymVector> = g.iter().map(|(q, v)| (*q, v.clone())).collect();
        expect.retain(|q, v| in_box(q, 10) && !v.is_zero());
        assert_eq!(got, expect);
        assert_eq!(got.len(), 5);
        // (1,0,1) is not M.P for any representative: nothing lands
        let f = single(c, w, 50, Bqf::new(1, 0, 1), v.clone());
        assert!(apply_primitive(Prim::Z, &f).unwrap().is_empty());
    }

    // The classical parallel-weight formula on an equivariant expansion, read
    // with a_F(n, r, m) = a(F, (m, r, n)); the swapped reading does not match.
    #[test]
    fn z_matches_closed_formula_in_parallel_weight() {
        let p = 5i64;
        let c = ctx(5, 2);
        let w = Weight::new(3, 3).unwrap();
        let f = symmetrized_expansion(c, w, 50, 11);
        let g = apply_primitive(Prim::Z, &f).unwrap();
        let closed = |a: &dyn Fn(i64, i64, i64) -> SymVector, q: &Bqf| {
            let (m, r, n) = (q.m, q.r, q.n);
            let mut out = SymVector::zero(c, 0);
            if m % p == 0 {
                out.add_assign(&a(p * n, r, m / p));
            }
            for al in 0..p {
                let t = n + al * r + al * al * m;
                if t % p == 0 {
                    out.add_assign(&a(t / p, r + 2 * m * al, p * m));
                }
            }
            out
        };
        let literal = |n: i64, r: i64, m: i64| f.coeff(&Bqf::new(m, r, n));
        let swapped = |n: i64, r: i64, m: i64| f.coeff(&Bqf::new(n, r, m));
        let mut swapped_mismatch = false;
        for q in box_keys(10) {
            assert_eq!(g.coeff(&q), closed(&literal, &q), "at {q}");
            swapped_mismatch |= g.coeff(&q) != closed(&swapped, &q);
        }
        assert!(swapped_mismatch);
    }

    // a(ZF, Q) = sum over (P, M) in the neighbor multiset of Q of rho(M) a(F, P),
    // checked on single-coefficient F.
    #[test]
    fn z_is_compatible_with_neighbor_multiset() {
        let c = ctx(5, 1);
        let w = Weight::new(4, 2).unwrap();
        let v = SymVector::from_ints(c, &[1, 2, 4]);
        let mut nonzero = 0;
        for q0 in box_keys(6).into_iter().filter(Bqf::is_definite) {
            let f = single(c, w, 50, q0, v.clone());
            let g = apply_primitive(Prim::Z, &f).unwrap();
            if legendre(q0.disc(), 5) == -1 {
                assert!(g.is_zero(), "class -1 forms are nobody's neighbor");
            }
            nonzero += usize::from(!g.is_zero());
            for q in box_keys(10) {
                let mut expect = SymVector::zero(c, 2);
                for nb in neighbors(&q, 5) {
                    if nb.form == q0 {
                        expect.add_assign(&crate::symrep::rho_apply(&nb.mat, &v));
                    }
                }
                assert_eq!(g.coeff(&q), expect, "q0={q0} q={q}");
            }
        }
        assert!(nonzero >= 10);
    }

    #[test]
    fn z_preserves_equivariance() {
        for (p, w) in [(5u64, Weight::new(4, 2).unwrap()), (3, Weight::new(2, 2).unwrap()), (7, Weight::new(6, 2).unwrap())] {
            let c = ctx(p, 2);
            let f = symmetrized_expansion(c, w, 6 * p, 3);
            assert!(check_equivariance(&f).is_empty());
            assert!(!f.is_zero());
            for op in [Prim::Z, Prim::U, Prim::X2, Prim::V] {
                let g = apply_primitive(op, &f).unwrap();
                assert!(check_equivariance(&g).is_empty(), "{op} p={p}");
            }
        }
    }

    #[test]
    fn equivariance_detects_asymmetry() {
        let c = ctx(5, 1);
        let w = Weight::new(2, 2).unwrap();
        let mut f = symmetrized_expansion(c, w, 6, 1);
        f.insert(Bqf::new(1, 0, 2), SymVector::from_ints(c, &[1])).unwrap();
        f.insert(Bqf::new(2, 0, 1), SymVector::from_ints(c, &[2])).unwrap();
        let bad = check_equivariance(&f);
        assert!(bad.iter().any(|x| x.form == Bqf::new(1, 0, 2)));
    }

    // a(Q) depends only on the reduced class and rho is trivial in weight (k,k).
    #[test]
    fn class_function_is_equivariant() {
        let c = ctx(7, 1);
        let w = Weight::new(4, 4).unwrap();
        let mut f = SiegelExpansion::new(c, w, 8).unwrap();
        for q in box_keys(8) {
            if q.is_definite() {
                let (red, _) = crate::bqf::reduce_form(&q).unwrap();
                f.insert(q, SymVector::from_ints(c, &[(red.m * 3 + red.r * 5 + red.n) as i128])).unwrap();
            }
        }
        assert!(check_equivariance(&f).is_empty());
    }

    #[test]
    fn theta_examples() {
        let c = ctx(5, 2);
        let w = Weight::new(2, 2).unwrap();
        let v = SymVector::from_ints(c, &[7]);
        let mut f = single(c, w, 5, Bqf::new(1, 0, 1), v.clone());
        f.insert(Bqf::new(1, 2, 1), v.clone()).unwrap();
        f.insert(Bqf::new(2, 1, 3), v.clone()).unwrap();
        let t = theta(&f).unwrap();
        assert_eq!(t.weight(), Weight::new(8, 8).unwrap());
        assert_eq!(t.coeff(&Bqf::new(1, 0, 1)), v);
        assert!(t.get(&Bqf::new(1, 2, 1)).is_none());
        // det (2,1,3) = 23/4
        let inv4 = c.inv(4).unwrap();
        assert_eq!(t.coeff(&Bqf::new(2, 1, 3)), v.scale(c.mul(23, inv4)));
        assert!(theta(&single(c, Weight::new(4, 2).unwrap(), 5, Bqf::new(1, 0, 1), SymVector::zero(c, 2))).is_err());
        assert!(theta(&SiegelExpansion::new(ctx(3, 1), w, 3).unwrap()).is_err());
    }

    #[test]
    fn theta_support_follows_discriminant() {
        let c = ctx(7, 1);
        let f = random_expansion(c, Weight::new(2, 2).unwrap(), 12, 5, 1.0);
        let t = theta(&f).unwrap();
        for (q, v) in f.iter() {
            assert_eq!(t.coeff(q).is_zero(), legendre(q.disc(), 7) == 0, "{q} {v:?}");
        }
    }

    #[test]
    fn theta1_anchor_and_det_kill() {
        let c = ctx(7, 2);
        let w = Weight::new(4, 2).unwrap();
        let q = Bqf::new(2, 1, 3);
        let f = single(c, w, 5, q, SymVector::from_form(c, &q));
        let t = theta1(&f).unwrap();
        assert_eq!(t.weight(), Weight::new(10, 10).unwrap());
        let det = det_residue(c, &q);
        assert_eq!(t.coeff(&q).coeffs(), &[c.mul(det, c.reduce(q.disc()))]);
        // supported on det = 0 mod p only: theta1 vanishes mod p
        let c1 = ctx(7, 1);
        let mut g = SiegelExpansion::new(c1, Weight::new(6, 2).unwrap(), 14).unwrap();
        for q in box_keys(14) {
            if legendre(q.disc(), 7) == 0 {
                g.insert(q, SymVector::from_ints(c1, &[1, 2, 3, 4, 5])).unwrap();
            }
        }
        assert!(theta1(&g).unwrap().is_zero());
        assert!(theta1(&SiegelExpansion::new(c1, Weight::new(3, 2).unwrap(), 3).unwrap()).is_err());
        assert!(theta1(&SiegelExpansion::new(ctx(5, 1), Weight::new(8, 2).unwrap(), 3).unwrap()).is_err());
    }

    #[test]
    fn hasse_shift_rules() {
        let c = ctx(5, 1);
        let f = random_expansion(c, Weight::new(2, 2).unwrap(), 6, 1, 0.5);
        let h = hasse_shift(&f, 1).unwrap();
        assert_eq!(h.weight(), Weight::new(6, 6).unwrap());
        assert!(h.agrees_with(&f));
        assert_eq!(hasse_shift(&h, 1).unwrap(), hasse_shift(&f, 2).unwrap());
        // theta commutes with the shift
        assert_eq!(theta(&h).unwrap(), hasse_shift(&theta(&f).unwrap(), 1).unwrap());
    }

    #[test]
    fn s_standalone_needs_integral_scalar() {
        let c = ctx(5, 2);
        let f = random_expansion(c, Weight::new(2, 2).unwrap(), 6, 1, 0.5);
        assert!(matches!(apply_primitive(Prim::S, &f), Err(Error::NonIntegral(_))));
        let g = random_expansion(c, Weight::new(4, 3).unwrap(), 6, 1, 0.5);
        let s = apply_primitive(Prim::S, &g).unwrap();
        for (q, v) in g.iter() {
            assert_eq!(s.coeff(q), v.scale(5));
        }
    }

    #[test]
    fn precision_bookkeeping() {
        let c = ctx(5, 1);
        let f = random_expansion(c, Weight::new(2, 2).unwrap(), 30, 1, 0.3);
        assert_eq!(apply_primitive(Prim::Z, &f).unwrap().precision(), 6);
        assert_eq!(apply_primitive(Prim::Z2, &f).unwrap().precision(), 1);
        assert_eq!(apply_primitive(Prim::V, &f).unwrap().precision(), 150);
        assert_eq!(apply_primitive_capped(Prim::V2, &f, 100).unwrap().precision(), 100);
        assert_eq!(apply_primitive(Prim::X2, &f).unwrap().precision(), 30);
        let small = random_expansion(c, Weight::new(2, 2).unwrap(), 4, 1, 0.3);
        assert!(matches!(apply_primitive(Prim::U, &small), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn lazy_and_stored_primitives_agree() {
        let c = ctx(3, 2);
        let f = random_expansion(c, Weight::new(4, 2).unwrap(), 27, 9, 0.6);
        for op in [Prim::U, Prim::Z, Prim::Z2, Prim::X2, Prim::U2, Prim::V, Prim::V2, Prim::Id] {
            let stored = apply_primitive(op, &f).unwrap();
            let lazy = Applied::new(op, Box::new(Borrowed(&f)), DEFAULT_PRECISION_CAP).unwrap();
            let b = stored.precision().min(40);
            let lz = SiegelExpansion::from_source(&lazy, b).unwrap();
            assert_eq!(stored.truncate(b).unwrap(), lz, "{op}");
        }
    }
}
