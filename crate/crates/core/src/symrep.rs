//! Sym^d of the standard rank-2 module, the extension of rho to all of M_2(Z),
//! and the contraction Sym^d x Sym^2 -> Sym^{d-2}.
//!
//! A vector stores the coefficient of f1^{d-i} f2^i at position i. A matrix
//! [[a, b], [c, d]] acts by the substitution f1 -> a f1 + c f2, f2 -> b f1 + d f2,
//! which makes rho multiplicative and sends the quadratic Q = m f1^2 + r f1 f2 + n f2^2
//! to the coefficients of M Q M^T.

use crate::bqf::{Bqf, GL2Mat};
use crate::error::{Error, Result};
use crate::padic::{PValuedScalar, ScalarCtx};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymVector {
    ctx: ScalarCtx,
    coeffs: Vec<u64>,
}

impl SymVector {
    pub fn zero(ctx: ScalarCtx, d: usize) -> Self {
        SymVector { ctx, coeffs: vec![0; d + 1] }
    }

    /// The monomial f1^{d-i} f2^i.
    pub fn basis(ctx: ScalarCtx, d: usize, i: usize) -> Self {
        let mut v = Self::zero(ctx, d);
        v.coeffs[i] = 1;
        v
    }

    pub fn from_ints(ctx: ScalarCtx, xs: &[i128]) -> Self {
        assert!(!xs.is_empty(), "a symmetric power vector has at least one coefficient");
        SymVector { ctx, coeffs: xs.iter().map(|&x| ctx.reduce(x)).collect() }
    }

    /// Q viewed as the quadratic m f1^2 + r f1 f2 + n f2^2.
    pub fn from_form(ctx: ScalarCtx, q: &Bqf) -> Self {
        Self::from_ints(ctx, &[q.m as i128, q.r as i128, q.n as i128])
    }

    pub fn ctx(&self) -> ScalarCtx {
        self.ctx
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add_assign(&mut self, o: &SymVector) {
        assert_eq!(self.coeffs.len(), o.coeffs.len(), "degree mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *x = self.ctx.add(*x, *y);
        }
    }

    pub fn add(&self, o: &SymVector) -> SymVector {
        let mut v = self.clone();
        v.add_assign(o);
        v
    }

    pub fn neg(&self) -> SymVector {
        SymVector { ctx: self.ctx, coeffs: self.coeffs.iter().map(|&x| self.ctx.neg(x)).collect() }
    }

    pub fn sub(&self, o: &SymVector) -> SymVector {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: u64) -> SymVector {
        SymVector { ctx: self.ctx, coeffs: self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect() }
    }

    pub fn scale_int(&self, c: i128) -> SymVector {
        self.scale(self.ctx.reduce(c))
    }

    /// Multiply by an integral p-valued scalar.
    pub fn scale_scalar(&self, s: &PValuedScalar) -> Result<SymVector> {
        Ok(self.scale(s.to_residue()?))
    }

    /// Reduce to a smaller precision of the same prime.
    pub fn reduce_to(&self, ctx: ScalarCtx) -> SymVector {
        assert_eq!(ctx.p(), self.ctx.p());
        assert!(ctx.m() <= self.ctx.m());
        SymVector { ctx, coeffs: self.coeffs.iter().map(|&x| x % ctx.modulus()).collect() }
    }
}

/// The matrix of rho(M) on Sym^d, entries mod p^m, column i = image of f1^{d-i} f2^i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoMatrix {
    ctx: ScalarCtx,
    d: usize,
    cols: Vec<Vec<u64>>,
}

impl RhoMatrix {
    pub fn new(ctx: ScalarCtx, mm: &GL2Mat, d: usize) -> Self {
        Self::from_entries(ctx, [mm.a, mm.b, mm.c, mm.d], d)
    }

    /// Same, for a possibly singular matrix given as [a, b, c, d].
    pub fn from_entries(ctx: ScalarCtx, e: [i128; 4], d: usize) -> Self {
        let [a, b, c, dd] = e.map(|x| ctx.reduce(x));
        let img1 = [a, c];
        let img2 = [b, dd];
        let cols = (0..=d)
            .map(|i| {
                let mut poly = vec![1 % ctx.modulus()];
                for _ in 0..d - i {
                    poly = poly_mul(ctx, &poly, &img1);
                }
                for _ in 0..i {
                    poly = poly_mul(ctx, &poly, &img2);
                }
                poly
            })
            .collect();
        RhoMatrix { ctx, d, cols }
    }

    pub fn apply(&self, v: &SymVector) -> Result<SymVector> {
        if v.degree() != self.d {
            return Err(Error::DegreeMismatch { expected: self.d, found: v.degree() });
        }
        let mut out = vec![0u64; self.d + 1];
        for (i, col) in self.cols.iter().enumerate() {
            let x = v.coeffs[i];
            if x == 0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(col) {
                *o = self.ctx.add(*o, self.ctx.mul(x, *c));
            }
        }
        Ok(SymVector { ctx: self.ctx, coeffs: out })
    }
}

fn poly_mul(ctx: ScalarCtx, x: &[u64], y: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] = ctx.add(out[i + j], ctx.mul(*a, *b));
        }
    }
    out
}

pub fn rho_apply(mm: &GL2Mat, v: &SymVector) -> SymVector {
    RhoMatrix::new(v.ctx, mm, v.degree()).apply(v).expect("degree matches by construction")
}

/// Q^vee = m e1^2 + r e1 e2 + n e2^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualQuadric {
    pub m: i64,
    pub r: i64,
    pub n: i64,
}

impl From<Bqf> for DualQuadric {
    fn from(q: Bqf) -> Self {
        DualQuadric { m: q.m, r: q.r, n: q.n }
    }
}

impl DualQuadric {
    /// rho(g) on the e-quadratic, i.e. the coefficients of g Q g^T.
    pub fn transform(&self, g: &GL2Mat) -> DualQuadric {
        let (m, r, n) = crate::bqf::conjugate(g, &Bqf::new(self.m, self.r, self.n));
        DualQuadric { m: m as i64, r: r as i64, n: n as i64 }
    }
}

/// Integral coefficients of the contraction on Sym^d x Sym^2.
///
/// con(v, Q^vee) = r d1 d2 v - m d2^2 v - n d1^2 v, with d1, d2 the partial
/// derivatives in f1, f2. On degree 2 this gives f2^2 x e1^2 -> -2,
/// f1^2 x e2^2 -> -2, f1 f2 x e1 e2 -> 1. It is -1/2 times the second
/// transvectant, so con(rho(g)v, rho(g)w) = det(g)^2 rho(g) con(v, w).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionTensor {
    d: usize,
    // for each input monomial i: [(out index, coeff of m), (.., r), (.., n)]
    rows: Vec<[Option<(usize, i64)>; 3]>,
}

impl ContractionTensor {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DegreeTooSmall(d));
        }
        let rows = (0..=d)
            .map(|i| {
                let (di, ii) = (d as i64 - i as i64, i as i64);
                // e1^2 pairs with d2^2: f1^{d-i} f2^{i-2}
                let em = (i >= 2).then(|| (i - 2, -ii * (ii - 1)));
                let er = (i >= 1 && i < d).then(|| (i - 1, di * ii));
                let en = (i + 2 <= d).then(|| (i, -di * (di - 1)));
                [em, er, en]
            })
            .collect();
        Ok(ContractionTensor { d, rows })
    }

    /// The coefficient of output monomial l for input monomial i paired with
    /// e1^2 (k = 0), e1 e2 (k = 1) or e2^2 (k = 2).
    pub fn entry(&self, l: usize, i: usize, k: usize) -> i64 {
        match self.rows[i][k] {
            Some((o, c)) if o == l => c,
            _ => 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn apply(&self, v: &SymVector, qd: &DualQuadric) -> Result<SymVector> {
        if v.degree() != self.d {
            return Err(Error::DegreeMismatch { expected: self.d, found: v.degree() });
        }
        let ctx = v.ctx;
        let w = [qd.m as i128, qd.r as i128, qd.n as i128].map(|x| ctx.reduce(x));
        let mut out = vec![0u64; self.d - 1];
        for (i, row) in self.rows.iter().enumerate() {
            let x = v.coeffs[i];
            if x == 0 {
                continue;
            }
            for (k, e) in row.iter().enumerate() {
                if let Some((o, c)) = e {
                    let t = ctx.mul(ctx.mul(x, w[k]), ctx.reduce(*c as i128));
                    out[*o] = ctx.add(out[*o], t);
                }
            }
        }
        Ok(SymVector { ctx, coeffs: out })
    }
}

/// con(v, Qd) with the precondition p > d.
pub fn contract(v: &SymVector, qd: &DualQuadric) -> Result<SymVector> {
    let d = v.degree();
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    if v.ctx.p() as usize <= d {
        return Err(Error::PrimeTooSmall { p: v.ctx.p(), degree: d });
    }
    ContractionTensor::new(d)?.apply(v, qd)
}
