//! q-expansions sum a_n q^n with the operators U, V and T = U + <p> V.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::padic::ScalarCtx;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticExpansion {
    ctx: ScalarCtx,
    weight: i64,
    diamond: u64,
    // a_0 .. a_B
    coeffs: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllipticOp {
    U,
    V,
    T,
}

impl FromStr for EllipticOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(EllipticOp::U),
            "V" => Ok(EllipticOp::V),
            "T" => Ok(EllipticOp::T),
            _ => Err(Error::Parse(format!("unknown elliptic operator {s:?}"))),
        }
    }
}

impl fmt::Display for EllipticOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl EllipticExpansion {
    pub fn new(ctx: ScalarCtx, weight: i64, diamond: u64, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::PrecisionExhausted { op: "new".into(), precision: 0 });
        }
        let q = ctx.modulus();
        Ok(EllipticExpansion { ctx, weight, diamond: diamond % q, coeffs: coeffs.into_iter().map(|c| c % q).collect() })
    }

    /// q^n up to precision b.
    pub fn monomial(ctx: ScalarCtx, weight: i64, diamond: u64, n: usize, b: usize) -> Self {
        let mut coeffs = vec![0; b + 1];
        coeffs[n] = 1;
        Self::new(ctx, weight, diamond, coeffs).expect("nonempty")
    }

    pub fn precision(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn diamond(&self) -> u64 {
        self.diamond
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// Equality on the common range of exponents.
    pub fn agrees_with(&self, o: &EllipticExpansion) -> bool {
        self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a == b)
    }

    pub fn apply(&self, op: EllipticOp) -> Result<EllipticExpansion> {
        let p = self.ctx.p() as usize;
        let b = self.precision() as usize;
        let coeffs = match op {
            EllipticOp::U => {
                if b / p == 0 {
                    return Err(Error::PrecisionExhausted { op: "U".into(), precision: b as u64 });
                }
                (0..=b / p).map(|n| self.coeffs[n * p]).collect()
            }
            EllipticOp::V => (0..=b * p).map(|n| if n % p == 0 { self.coeffs[n / p] } else { 0 }).collect(),
            EllipticOp::T => {
                let u = self.apply(EllipticOp::U)?;
                let v = self.apply(EllipticOp::V)?;
                u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| self.ctx.add(*a, self.ctx.mul(self.diamond, *b))).collect()
            }
        };
        Ok(EllipticExpansion { coeffs, ..self.clone() })
    }
}
