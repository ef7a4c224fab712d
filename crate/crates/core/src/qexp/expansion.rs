use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bqf::Bqf;
use crate::error::{Error, Result};
use crate::padic::ScalarCtx;
use crate::symrep::SymVector;

/// Weight (j, k) with j >= k >= 2; coefficients live in Sym^{j-k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub j: u32,
    pub k: u32,
}

impl Weight {
    pub fn new(j: u32, k: u32) -> Result<Self> {
        if k < 2 || j < k {
            return Err(Error::InvalidWeight(format!("({j},{k}) needs j >= k >= 2")));
        }
        Ok(Weight { j, k })
    }

    pub fn degree(&self) -> usize {
        (self.j - self.k) as usize
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.j, self.k)
    }
}

/// Anything that can report a coefficient a(F, Q) on a box m, n <= B.
pub trait CoeffSource: Sync {
    fn ctx(&self) -> ScalarCtx;
    fn weight(&self) -> Weight;
    fn precision(&self) -> u64;
    /// Zero outside the box.
    fn coeff(&self, q: &Bqf) -> SymVector;
}

pub fn in_box(q: &Bqf, b: u64) -> bool {
    q.is_semidefinite() && q.m as u64 <= b && q.n as u64 <= b
}

/// All semi-definite keys with m, n <= b, in (m, r, n) order.
pub fn box_keys(b: u64) -> Vec<Bqf> {
    let b = b as i64;
    let mut out = Vec::new();
    for m in 0..=b {
        let rmax = 2 * isqrt(m * b) + 1;
        for r in -rmax..=rmax {
            for n in 0..=b {
                let q = Bqf::new(m, r, n);
                if q.is_semidefinite() {
                    out.push(q);
                }
            }
        }
    }
    out
}

fn isqrt(x: i64) -> i64 {
    let mut s = (x as f64).sqrt() as i64;
    while s * s > x {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= x {
        s += 1;
    }
    s
}

/// A truncated q-expansion: coefficients on the box m, n <= precision.
/// Absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiegelExpansion {
    ctx: ScalarCtx,
    weight: Weight,
    precision: u64,
    coeffs: BTreeMap<Bqf, SymVector>,
}

impl SiegelExpansion {
    pub fn new(ctx: ScalarCtx, weight: Weight, precision: u64) -> Result<Self> {
        if precision == 0 {
            return Err(Error::PrecisionExhausted { op: "new".into(), precision });
        }
        Ok(SiegelExpansion { ctx, weight, precision, coeffs: BTreeMap::new() })
    }

    pub fn ctx(&self) -> ScalarCtx {
        self.ctx
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn precision(&self) -> u64 {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(SymVector::is_zero)
    }

    pub fn get(&self, q: &Bqf) -> Option<&SymVector> {
        self.coeffs.get(q)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bqf, &SymVector)> {
        self.coeffs.iter()
    }

    /// Set a(Q); zero vectors are dropped.
    pub fn insert(&mut self, q: Bqf, v: SymVector) -> Result<()> {
        if !in_box(&q, self.precision) {
            return Err(Error::InvalidContext(format!("key {q} is outside the box of size {}", self.precision)));
        }
        if v.degree() != self.weight.degree() {
            return Err(Error::DegreeMismatch { expected: self.weight.degree(), found: v.degree() });
        }
        if v.ctx() != self.ctx {
            return Err(Error::ContextMismatch(format!("{:?} vs {:?}", v.ctx(), self.ctx)));
        }
        if v.is_zero() {
            self.coeffs.remove(&q);
        } else {
            self.coeffs.insert(q, v);
        }
        Ok(())
    }

    /// a(Q) += v.
    pub fn accumulate(&mut self, q: Bqf, v: &SymVector) -> Result<()> {
        let cur = self.coeff(&q);
        self.insert(q, cur.add(v))
    }

    /// Restrict to the box of size b <= precision.
    pub fn truncate(&self, b: u64) -> Result<SiegelExpansion> {
        if b == 0 || b > self.precision {
            return Err(Error::PrecisionExhausted { op: "truncate".into(), precision: b });
        }
        Ok(SiegelExpansion {
            ctx: self.ctx,
            weight: self.weight,
            precision: b,
            coeffs: self.coeffs.iter().filter(|(q, _)| in_box(q, b)).map(|(q, v)| (*q, v.clone())).collect(),
        })
    }

    /// Same coefficients seen mod p^m' for m' <= m.
    pub fn reduce_to(&self, ctx: ScalarCtx) -> SiegelExpansion {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(q, v)| (*q, v.reduce_to(ctx)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SiegelExpansion { ctx, weight: self.weight, precision: self.precision, coeffs }
    }

    pub fn with_weight(mut self, weight: Weight) -> Result<SiegelExpansion> {
        if weight.degree() != self.weight.degree() {
            return Err(Error::DegreeMismatch { expected: self.weight.degree(), found: weight.degree() });
        }
        self.weight = weight;
        Ok(self)
    }

    /// Equality on the common box.
    pub fn agrees_with(&self, other: &SiegelExpansion) -> bool {
        self.first_difference(other).is_none()
    }

    /// A key in the common box where the two expansions differ.
    pub fn first_difference(&self, other: &SiegelExpansion) -> Option<Bqf> {
        let b = self.precision.min(other.precision);
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .filter(|q| in_box(q, b))
            .find(|q| self.coeff(q) != other.coeff(q))
            .copied()
    }

    pub fn add(&self, other: &SiegelExpansion) -> Result<SiegelExpansion> {
        if self.ctx != other.ctx || self.weight != other.weight {
            return Err(Error::ContextMismatch("adding expansions of different type".into()));
        }
        let b = self.precision.min(other.precision);
        let mut out = self.truncate(b)?;
        for (q, v) in other.coeffs.iter().filter(|(q, _)| in_box(q, b)) {
            out.accumulate(*q, v)?;
        }
        Ok(out)
    }

    /// Gather a(Q) for every key of the box b from a source.
    pub fn from_source(src: &dyn CoeffSource, b: u64) -> Result<SiegelExpansion> {
        use rayon::prelude::*;
        let mut out = SiegelExpansion::new(src.ctx(), src.weight(), b)?;
        let vals: Vec<(Bqf, SymVector)> = box_keys(b)
            .into_par_iter()
            .map(|q| (q, src.coeff(&q)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out.coeffs.extend(vals);
        Ok(out)
    }
}

impl CoeffSource for SiegelExpansion {
    fn ctx(&self) -> ScalarCtx {
        self.ctx
    }

    fn weight(&self) -> Weight {
        self.weight
    }

    fn precision(&self) -> u64 {
        self.precision
    }

    fn coeff(&self, q: &Bqf) -> SymVector {
        match self.coeffs.get(q) {
            Some(v) if in_box(q, self.precision) => v.clone(),
            _ => SymVector::zero(self.ctx, self.weight.degree()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_key_count_matches_brute_force() {
        for b in 0..7u64 {
            let mut n = 0;
            for m in 0..=b as i64 {
                for nn in 0..=b as i64 {
                    for r in -20..=20 {
                        if r * r <= 4 * m * nn {
                            n += 1;
                        }
                    }
                }
            }
            assert_eq!(box_keys(b).len(), n);
        }
    }

    #[test]
    fn insert_rules() {
        let ctx = ScalarCtx::new(5, 1).unwrap();
        let mut f = SiegelExpansion::new(ctx, Weight::new(4, 2).unwrap(), 3).unwrap();
        let v = SymVector::from_ints(ctx, &[1, 2, 3]);
        assert!(f.insert(Bqf::new(4, 0, 1), v.clone()).is_err());
        assert!(f.insert(Bqf::new(1, 3, 1), v.clone()).is_err());
        assert!(f.insert(Bqf::new(1, 0, 1), SymVector::basis(ctx, 1, 0)).is_err());
        f.insert(Bqf::new(1, 1, 1), v.clone()).unwrap();
        assert_eq!(f.coeff(&Bqf::new(1, 1, 1)), v);
        f.accumulate(Bqf::new(1, 1, 1), &v.neg()).unwrap();
        assert!(f.is_empty());
        assert!(Weight::new(2, 3).is_err());
    }
}
