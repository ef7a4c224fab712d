//! Residues mod p^m, p-adic valuations and p-valued scalars `u * p^v`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest power of p we allow as a working modulus for unit digits.
const DIGIT_LIMIT: u128 = 1 << 62;

/// Unit digits kept beyond those the value mod p^m needs (fewer if they do not fit).
const GUARD_DIGITS: u32 = 8;

/// Prime and precision: all arithmetic is modulo p^m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarCtx {
    p: u64,
    m: u32,
}

impl ScalarCtx {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {p} is not an odd prime")));
        }
        if m == 0 {
            return Err(Error::InvalidContext("precision m must be at least 1".into()));
        }
        // Products of two residues must fit in u128 with room to spare.
        match (p as u128).checked_pow(m) {
            Some(q) if q < (1 << 40) => Ok(ScalarCtx { p, m }),
            _ => Err(Error::InvalidContext(format!("p^m = {p}^{m} is too large"))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// p^m.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// Same prime, different precision.
    pub fn with_m(&self, m: u32) -> Result<Self> {
        ScalarCtx::new(self.p, m)
    }

    /// Reduce an integer into [0, p^m).
    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus() as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus() as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let q = self.modulus();
        ((a as u128 + q as u128 - (b % q) as u128) % q as u128) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus() as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    /// Inverse of a residue prime to p.
    pub fn inv(&self, a: u64) -> Option<u64> {
        mod_inv(a as i128, self.modulus() as i128).map(|x| x as u64)
    }
}

/// Legendre symbol (a / p) for an odd prime p.
pub fn legendre(a: i128, p: u64) -> i8 {
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Largest v with p^v | n.
pub fn valuation(n: i128, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroValuation);
    }
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Ok(v)
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let q = modulus as u128;
    let mut acc: u128 = 1 % q;
    let mut b = base as u128 % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Inverse of a modulo q, if it exists.
pub fn mod_inv(a: i128, q: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(q), q);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(q))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    // unit is prime to p, kept mod digit_modulus(val)
    Unit { unit: u64, val: i32 },
}

/// A scalar `u * p^v` with the unit u known modulo p^m (or better).
///
/// Arithmetic keeps at least max(m, m - v) unit digits plus up to
/// GUARD_DIGITS more, whatever the valuation, so `(p + p^3) * p^-2` still
/// remembers its `p` and `-1 * p^-1 + p^-1` cancels. Equality, hashing and
/// `is_zero` only look at the value mod p^m: p^m equals zero.
#[derive(Clone, Copy, Debug)]
pub struct PValuedScalar {
    ctx: ScalarCtx,
    repr: Repr,
}

impl PValuedScalar {
    pub fn zero(ctx: ScalarCtx) -> Self {
        PValuedScalar { ctx, repr: Repr::Zero }
    }

    pub fn one(ctx: ScalarCtx) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: ScalarCtx, n: i128) -> Self {
        Self::from_parts(ctx, n, 0)
    }

    /// p^e.
    pub fn p_power(ctx: ScalarCtx, e: i32) -> Self {
        Self::from_parts(ctx, 1, e)
    }

    /// The value `n * p^v`, renormalized. `n` need not be prime to p.
    pub fn from_parts(ctx: ScalarCtx, n: i128, v: i32) -> Self {
        if n == 0 {
            return Self::zero(ctx);
        }
        let extra = valuation(n, ctx.p).unwrap() as i32;
        let val = v + extra;
        let q = digit_modulus(ctx, val);
        let unit_raw = n / (ctx.p as i128).pow(extra as u32);
        let unit = unit_raw.rem_euclid(q as i128) as u64;
        PValuedScalar { ctx, repr: Repr::Unit { unit, val } }
    }

    /// num / den as a p-valued scalar; den must be nonzero.
    pub fn from_ratio(ctx: ScalarCtx, num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidContext("zero denominator".into()));
        }
        if num == 0 {
            return Ok(Self::zero(ctx));
        }
        let vd = valuation(den, ctx.p)? as i32;
        let den_unit = den / (ctx.p as i128).pow(vd as u32);
        let vn = valuation(num, ctx.p)? as i32;
        let num_unit = num / (ctx.p as i128).pow(vn as u32);
        let val = vn - vd;
        let q = digit_modulus(ctx, val) as i128;
        let inv = mod_inv(den_unit, q).expect("unit is invertible");
        let unit = (num_unit.rem_euclid(q) * inv).rem_euclid(q) as u64;
        Ok(PValuedScalar { ctx, repr: Repr::Unit { unit, val } })
    }

    pub fn ctx(&self) -> ScalarCtx {
        self.ctx
    }

    /// Zero mod p^m.
    pub fn is_zero(&self) -> bool {
        self.key().is_none()
    }

    /// Valuation of a value that is nonzero mod p^m.
    pub fn valuation(&self) -> Result<i32> {
        self.key().map(|k| k.0).ok_or(Error::ZeroValuation)
    }

    /// The unit digits, reduced mod p^(m - v). None for zero.
    pub fn unit(&self) -> Option<u64> {
        self.key().map(|k| k.1)
    }

    /// Re-derive the canonical form from the stored parts.
    pub fn renormalize(&self) -> Self {
        match self.repr {
            Repr::Zero => *self,
            Repr::Unit { unit, val } => Self::from_parts(self.ctx, unit as i128, val),
        }
    }

    /// The residue in [0, p^m); fails on negative valuation.
    pub fn to_residue(&self) -> Result<u64> {
        match self.repr {
            Repr::Zero => Ok(0),
            Repr::Unit { unit, val } => {
                if val < 0 {
                    return Err(Error::NonIntegral(self.to_string()));
                }
                if val >= self.ctx.m as i32 {
                    return Ok(0);
                }
                let pv = self.ctx.p.pow(val as u32);
                Ok(self.ctx.mul(unit, pv))
            }
        }
    }

    /// The same value seen at another precision of the same prime.
    pub fn with_ctx(&self, ctx: ScalarCtx) -> Self {
        assert_eq!(ctx.p, self.ctx.p, "prime mismatch");
        match self.repr {
            Repr::Zero => Self::zero(ctx),
            Repr::Unit { unit, val } => Self::from_parts(ctx, unit as i128, val),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ctx);
        for _ in 0..e {
            acc = acc * *self;
        }
        acc
    }

    /// value / p^v reduced mod q, for v <= own valuation and q a power of p.
    fn aligned(&self, v: i32, q: u128) -> u128 {
        match self.repr {
            Repr::Zero => 0,
            Repr::Unit { unit, val } => {
                let shift = match (self.ctx.p as u128).checked_pow((val - v) as u32) {
                    Some(s) if s < q => s,
                    _ => return 0,
                };
                (unit as u128 % (q / shift)) * shift
            }
        }
    }

    /// Valuation at least m: zero mod p^m, though the digits are kept.
    fn high(&self) -> bool {
        matches!(self.repr, Repr::Unit { val, .. } if val >= self.ctx.m as i32)
    }

    /// (valuation, unit mod p^(m - v)): the value mod p^m.
    fn key(&self) -> Option<(i32, u64)> {
        match self.repr {
            Repr::Zero => None,
            Repr::Unit { .. } if self.high() => None,
            Repr::Unit { unit, val } => Some((val, unit % needed_modulus(self.ctx, val))),
        }
    }
}

/// p^(m - val): the digits that matter for the value mod p^m.
fn needed_modulus(ctx: ScalarCtx, val: i32) -> u64 {
    let digits = (ctx.m as i32 - val) as u32;
    let q = (ctx.p as u128)
        .checked_pow(digits)
        .filter(|q| *q < DIGIT_LIMIT)
        .unwrap_or_else(|| panic!("valuation {val} needs too many digits for p = {}", ctx.p));
    q as u64
}

/// p^max(m, m - val) times as many guard digits as fit under the limit.
fn digit_modulus(ctx: ScalarCtx, val: i32) -> u64 {
    let mut q = needed_modulus(ctx, val.min(0)) as u128;
    for _ in 0..GUARD_DIGITS {
        if q * ctx.p as u128 >= DIGIT_LIMIT {
            break;
        }
        q *= ctx.p as u128;
    }
    q as u64
}

impl PartialEq for PValuedScalar {
    fn eq(&self, o: &Self) -> bool {
        self.ctx == o.ctx && self.key() == o.key()
    }
}

impl Eq for PValuedScalar {}

impl std::hash::Hash for PValuedScalar {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.ctx.hash(h);
        self.key().hash(h);
    }
}

impl Add for PValuedScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "scalar context mismatch");
        let (va, vb) = match (self.repr, rhs.repr) {
            (Repr::Zero, _) => return rhs,
            (_, Repr::Zero) => return self,
            (Repr::Unit { val: a, .. }, Repr::Unit { val: b, .. }) => (a, b),
        };
        let v = va.min(vb);
        let q = digit_modulus(self.ctx, v) as u128;
        let s = (self.aligned(v, q) + rhs.aligned(v, q)) % q;
        Self::from_parts(self.ctx, s as i128, v)
    }
}

impl Neg for PValuedScalar {
    type Output = Self;
    fn neg(self) -> Self {
        match self.repr {
            Repr::Zero => self,
            Repr::Unit { unit, val } => Self::from_parts(self.ctx, -(unit as i128), val),
        }
    }
}

impl Sub for PValuedScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for PValuedScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "scalar context mismatch");
        match (self.repr, rhs.repr) {
            (Repr::Unit { unit: a, val: va }, Repr::Unit { unit: b, val: vb }) => {
                let val = va + vb;
                let q = digit_modulus(self.ctx, val) as u128;
                let unit = ((a as u128 % q) * (b as u128 % q) % q) as i128;
                Self::from_parts(self.ctx, unit, val)
            }
            _ => Self::zero(self.ctx),
        }
    }
}

impl fmt::Display for PValuedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.key() {
            None => write!(f, "0"),
            Some((val, unit)) => write!(f, "{unit}*p^{val}"),
        }
    }
}
