//! The ordinary idempotent e = lim A^{n!} of a square matrix over Z/p^m.

use serde::{Deserialize, Serialize};

use super::linalg;
use crate::error::{Error, Result};
use crate::padic::ScalarCtx;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixModPM {
    ctx: ScalarCtx,
    rows: Vec<Vec<u64>>,
}

impl MatrixModPM {
    pub fn new(ctx: ScalarCtx, rows: Vec<Vec<i128>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: r.len() });
        }
        Ok(MatrixModPM { ctx, rows: rows.into_iter().map(|r| r.into_iter().map(|x| ctx.reduce(x)).collect()).collect() })
    }

    pub fn identity(ctx: ScalarCtx, n: usize) -> Self {
        MatrixModPM { ctx, rows: linalg::identity(n) }
    }

    pub fn ctx(&self) -> ScalarCtx {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn mul(&self, o: &MatrixModPM) -> MatrixModPM {
        let n = self.dim();
        let c = &self.ctx;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(0, |acc, k| c.add(acc, c.mul(self.rows[i][k], o.rows[k][j])))).collect())
            .collect();
        MatrixModPM { ctx: self.ctx, rows }
    }

    pub fn sub(&self, o: &MatrixModPM) -> MatrixModPM {
        let rows = self.rows.iter().zip(&o.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| self.ctx.sub(*x, *y)).collect()).collect();
        MatrixModPM { ctx: self.ctx, rows }
    }

    pub fn add(&self, o: &MatrixModPM) -> MatrixModPM {
        let rows = self.rows.iter().zip(&o.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| self.ctx.add(*x, *y)).collect()).collect();
        MatrixModPM { ctx: self.ctx, rows }
    }

    pub fn pow(&self, mut e: u64) -> MatrixModPM {
        let mut base = self.clone();
        let mut acc = MatrixModPM::identity(self.ctx, self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero(&self.rows)
    }

    /// Reduction mod p.
    pub fn residue(&self) -> Vec<Vec<u64>> {
        let p = self.ctx.p();
        self.rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect()
    }
}

/// Evidence that e is the ordinary idempotent of A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotentCertificate {
    /// n with e = A^{n!}.
    pub factorial_index: u64,
    /// rank of e mod p, the rank of the ordinary part.
    pub rank: usize,
    /// least k with ((1 - e) A)^k = 0.
    pub nilpotency: usize,
    /// e A e + (1 - e) is invertible mod p.
    pub unit_on_image: bool,
}

/// Iterates E <- E^n starting from A until E is idempotent, then certifies it.
pub fn ordinary_idempotent(a: &MatrixModPM) -> Result<(MatrixModPM, IdempotentCertificate)> {
    let mut e = a.clone();
    let mut n = 1u64;
    while e.mul(&e) != e {
        n += 1;
        if n > 10_000 {
            return Err(Error::InvalidContext("factorial powers did not stabilize".into()));
        }
        e = e.pow(n);
    }
    let cert = certify(a, &e, n)?;
    Ok((e, cert))
}

fn certify(a: &MatrixModPM, e: &MatrixModPM, n: u64) -> Result<IdempotentCertificate> {
    let ctx = a.ctx();
    let dim = a.dim();
    let id = MatrixModPM::identity(ctx, dim);
    let fail = |s: &str| Err(Error::InvalidContext(format!("idempotent certificate failed: {s}")));
    if e.mul(e) != *e {
        return fail("e^2 != e");
    }
    if e.mul(a) != a.mul(e) {
        return fail("eA != Ae");
    }
    let rest = id.sub(e).mul(a);
    let bound = dim * ctx.m() as usize;
    let mut pw = id.clone();
    let mut nilpotency = None;
    for k in 0..=bound {
        if pw.is_zero() {
            nilpotency = Some(k);
            break;
        }
        pw = pw.mul(&rest);
    }
    let Some(nilpotency) = nilpotency else { return fail("(1 - e)A is not nilpotent") };
    let unit = e.mul(a).mul(e).add(&id.sub(e));
    let p = ctx.p();
    let unit_on_image = linalg::rank(&unit.residue(), p) == dim;
    if !unit_on_image {
        return fail("A is not a unit on the image of e");
    }
    Ok(IdempotentCertificate { factorial_index: n, rank: linalg::rank(&e.residue(), p), nilpotency, unit_on_image })
}
