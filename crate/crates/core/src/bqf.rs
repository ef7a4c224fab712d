//! Binary quadratic forms Q = [[m, r/2], [r/2, n]] as q-expansion indices.
//!
//! GL2 acts by `M.Q = M Q M^T / det M`. The p-neighbors of Q are the forms
//! P = M^{-1}.Q for M running over determinant-p coset representatives.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::legendre;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bqf {
    pub m: i64,
    pub r: i64,
    pub n: i64,
}

impl Bqf {
    pub const fn new(m: i64, r: i64, n: i64) -> Self {
        Bqf { m, r, n }
    }

    /// r^2 - 4mn.
    pub fn disc(&self) -> i128 {
        let (m, r, n) = (self.m as i128, self.r as i128, self.n as i128);
        r * r - 4 * m * n
    }

    pub fn is_definite(&self) -> bool {
        self.m > 0 && self.disc() < 0
    }

    /// The index condition m, n >= 0 and 4mn >= r^2.
    pub fn is_semidefinite(&self) -> bool {
        self.m >= 0 && self.n >= 0 && self.disc() <= 0
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.m as i128 * x * x + self.r as i128 * x * y + self.n as i128 * y * y
    }

    pub fn scale(&self, k: i64) -> Bqf {
        Bqf::new(self.m * k, self.r * k, self.n * k)
    }

    /// Q / k when that is integral.
    pub fn divide(&self, k: i64) -> Option<Bqf> {
        if self.m % k == 0 && self.r % k == 0 && self.n % k == 0 {
            Some(Bqf::new(self.m / k, self.r / k, self.n / k))
        } else {
            None
        }
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        let p = p as i64;
        self.m % p == 0 && self.r % p == 0 && self.n % p == 0
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.m, self.r), self.n)
    }
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.r, self.n)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integer 2x2 matrix [[a, b], [c, d]] with nonzero determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GL2Mat {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl GL2Mat {
    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Result<Self> {
        if a * d - b * c == 0 {
            return Err(Error::SingularMatrix);
        }
        Ok(GL2Mat { a, b, c, d })
    }

    pub const fn identity() -> Self {
        GL2Mat { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &GL2Mat) -> GL2Mat {
        GL2Mat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Adjugate: M * adj(M) = det(M) * I.
    pub fn adj(&self) -> GL2Mat {
        GL2Mat { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn transpose(&self) -> GL2Mat {
        GL2Mat { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    /// Inverse of a matrix in SL2(Z) or GL2(Z).
    pub fn inverse_unimodular(&self) -> Option<GL2Mat> {
        match self.det() {
            1 => Some(self.adj()),
            -1 => Some(GL2Mat { a: -self.d, b: self.b, c: self.c, d: -self.a }),
            _ => None,
        }
    }

    /// Nonzero u (mod p) with u M = 0 mod p, for M of rank one mod p.
    pub fn left_kernel_mod(&self, p: u64) -> Option<ProjPoint> {
        let pi = p as i128;
        let (a, b, c, d) = (
            self.a.rem_euclid(pi),
            self.b.rem_euclid(pi),
            self.c.rem_euclid(pi),
            self.d.rem_euclid(pi),
        );
        if (a * d - b * c).rem_euclid(pi) != 0 {
            return None;
        }
        let (x, y) = if a != 0 || c != 0 { (c, -a) } else if b != 0 || d != 0 { (d, -b) } else { return None };
        Some(ProjPoint::normalize(x, y, p))
    }

    /// The form M (2Q) M^T as (2m', r', 2n') scaled entries.
    fn conj_doubled(&self, q: &Bqf) -> (i128, i128, i128) {
        let (m2, r, n2) = (2 * q.m as i128, q.r as i128, 2 * q.n as i128);
        // rows of M * 2Q
        let (x11, x12) = (self.a * m2 + self.b * r, self.a * r + self.b * n2);
        let (x21, x22) = (self.c * m2 + self.d * r, self.c * r + self.d * n2);
        let top = x11 * self.a + x12 * self.b;
        let off = x11 * self.c + x12 * self.d;
        let bot = x21 * self.c + x22 * self.d;
        (top, off, bot)
    }
}

impl fmt::Display for GL2Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// M.Q = M Q M^T / det M, or None when the result is not integral.
pub fn act(mm: &GL2Mat, q: &Bqf) -> Option<Bqf> {
    let det = mm.det();
    let (top, off, bot) = mm.conj_doubled(q);
    if top % (2 * det) != 0 || off % det != 0 || bot % (2 * det) != 0 {
        return None;
    }
    let conv = |x: i128| i64::try_from(x).ok();
    Some(Bqf::new(conv(top / (2 * det))?, conv(off / det)?, conv(bot / (2 * det))?))
}

/// M Q M^T for integer M, without the determinant division.
pub fn conjugate(mm: &GL2Mat, q: &Bqf) -> (i128, i128, i128) {
    let (top, off, bot) = mm.conj_doubled(q);
    (top / 2, off, bot / 2)
}

/// p + 1 determinant-p matrices in pairwise distinct cosets M SL2(Z):
/// [[1,0],[a,p]] for a in a centered residue system, then diag(p, 1).
///
/// The centered range keeps |a| <= p/2, so the neighbors of a form in the
/// box of size B/p all land in the box of size B.
pub fn coset_reps(p: u64) -> Vec<GL2Mat> {
    let p = p as i128;
    let lo = -((p - 1) / 2);
    let mut reps: Vec<GL2Mat> = (lo..lo + p).map(|a| GL2Mat { a: 1, b: 0, c: a, d: p }).collect();
    reps.push(GL2Mat { a: p, b: 0, c: 0, d: 1 });
    reps
}

/// A point of P^1(F_p), normalized to [x:1] or [1:0].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    pub x: u64,
    pub y: u64,
}

impl ProjPoint {
    pub fn normalize(x: i128, y: i128, p: u64) -> ProjPoint {
        let pi = p as i128;
        let (x, y) = (x.rem_euclid(pi), y.rem_euclid(pi));
        if y == 0 {
            assert!(x != 0, "zero vector is not a projective point");
            return ProjPoint { x: 1, y: 0 };
        }
        let inv = crate::padic::mod_inv(y, pi).unwrap();
        ProjPoint { x: (x * inv).rem_euclid(pi) as u64, y: 1 }
    }

    pub fn all(p: u64) -> Vec<ProjPoint> {
        let mut v: Vec<ProjPoint> = (0..p).map(|x| ProjPoint { x, y: 1 }).collect();
        v.push(ProjPoint { x: 1, y: 0 });
        v
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegendreClass {
    Symbol(i8),
    PDivisible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormClass {
    pub disc: i128,
    pub p_primitive: bool,
    pub legendre_class: LegendreClass,
}

pub fn classify_form(q: &Bqf, p: u64) -> FormClass {
    let disc = q.disc();
    let p_primitive = !q.is_zero_mod(p);
    let legendre_class = if p_primitive { LegendreClass::Symbol(legendre(disc, p)) } else { LegendreClass::PDivisible };
    FormClass { disc, p_primitive, legendre_class }
}

pub fn zeros_in_p1(q: &Bqf, p: u64) -> Vec<ProjPoint> {
    let pi = p as i128;
    ProjPoint::all(p)
        .into_iter()
        .filter(|pt| q.eval(pt.x as i128, pt.y as i128).rem_euclid(pi) == 0)
        .collect()
}

/// One element of the neighbor multiset: Q = M.P, and the zero of Q mod p
/// singled out by the coset of M (the left kernel of M mod p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighbor {
    pub form: Bqf,
    pub mat: GL2Mat,
    pub zero: ProjPoint,
}

/// All (P, M) with M a coset representative and P = M^{-1}.Q integral.
pub fn neighbors(q: &Bqf, p: u64) -> Vec<Neighbor> {
    coset_reps(p)
        .into_iter()
        .filter_map(|mm| {
            // M^{-1}.Q = adj(M).Q since scalars act trivially
            act(&mm.adj(), q).map(|form| Neighbor {
                form,
                mat: mm,
                zero: mm.left_kernel_mod(p).expect("coset representatives have rank one mod p"),
            })
        })
        .collect()
}

/// Gauss reduction of a positive definite form. Returns (Qred, g) with
/// g in SL2(Z) and g.Q = Qred.
pub fn reduce_form(q: &Bqf) -> Result<(Bqf, GL2Mat)> {
    if !q.is_definite() {
        return Err(Error::NotDefinite(*q));
    }
    let (mut m, mut r, mut n) = (q.m as i128, q.r as i128, q.n as i128);
    let mut g = GL2Mat::identity();
    // (m, r, n) -> (m, r + 2km, k^2 m + kr + n) under [[1,0],[k,1]]
    let translate = |m: i128, r: i128, n: i128, g: &mut GL2Mat| -> (i128, i128) {
        // choose k with r + 2km in (-m, m]
        let k = (m - r).div_euclid(2 * m);
        let t = GL2Mat { a: 1, b: 0, c: k, d: 1 };
        *g = t.mul(g);
        (r + 2 * k * m, k * k * m + k * r + n)
    };
    // (m, r, n) -> (n, -r, m) under [[0,1],[-1,0]]
    let swap = GL2Mat { a: 0, b: 1, c: -1, d: 0 };
    loop {
        (r, n) = translate(m, r, n, &mut g);
        if m > n {
            (m, r, n) = (n, -r, m);
            g = swap.mul(&g);
            continue;
        }
        if m == n && r < 0 {
            (m, r, n) = (n, -r, m);
            g = swap.mul(&g);
        }
        break;
    }
    let red = Bqf::new(m as i64, r as i64, n as i64);
    debug_assert_eq!(act(&g, q), Some(red));
    Ok((red, g))
}

pub fn is_reduced(q: &Bqf) -> bool {
    let (m, r, n) = (q.m, q.r, q.n);
    if !(r.abs() <= m && m <= n) {
        return false;
    }
    if (r.abs() == m || m == n) && r < 0 {
        return false;
    }
    true
}

/// Reduced positive definite forms of discriminant `disc` (< 0).
pub fn reduced_forms(disc: i128) -> Vec<Bqf> {
    let mut out = Vec::new();
    if disc >= 0 {
        return out;
    }
    let d = -disc;
    // 3m^2 <= 4mn - r^2 = |D| for reduced forms
    let mut m: i128 = 1;
    while 3 * m * m <= d {
        for r in -m..=m {
            let num = r * r + d;
            if num % (4 * m) != 0 {
                continue;
            }
            let n = num / (4 * m);
            let f = Bqf::new(m as i64, r as i64, n as i64);
            if is_reduced(&f) {
                out.push(f);
            }
        }
        m += 1;
    }
    out
}

/// The result of walking the neighbor dynamic around a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCycle {
    pub s: u32,
    pub a: GL2Mat,
    pub b: GL2Mat,
}

const MAX_ORBIT_STEPS: u32 = 100_000;
// keeps conjugate() inside i128 for coefficients below 2^12
const MAX_ORBIT_ENTRY: u128 = 1 << 50;

/// Walk the p-neighbor graph from [Q] without backtracking until [Q] comes
/// back. The accumulated matrix A satisfies A Q A^T = p^s Q, det A = p^s.
/// B is the same walk started from the other zero of Q mod p.
pub fn orbit_cycle(q: &Bqf, p: u64) -> Result<OrbitCycle> {
    if !q.is_definite() {
        return Err(Error::NotDefinite(*q));
    }
    let class = classify_form(q, p);
    match class.legendre_class {
        LegendreClass::Symbol(1) => {}
        LegendreClass::Symbol(c) => return Err(Error::WrongLegendreClass { form: *q, p, class: c }),
        LegendreClass::PDivisible => return Err(Error::NotPrimitive { form: *q, p }),
    }
    let zeros = zeros_in_p1(q, p);
    debug_assert_eq!(zeros.len(), 2);
    let (s, a) = walk(q, p, zeros[0])?;
    let (s2, b) = walk(q, p, zeros[1])?;
    debug_assert_eq!(s, s2);
    Ok(OrbitCycle { s, a, b })
}

fn walk(q0: &Bqf, p: u64, first: ProjPoint) -> Result<(u32, GL2Mat)> {
    let (target, h) = reduce_form(q0)?;
    let mut cur = *q0;
    // q0 = acc.cur
    let mut acc = GL2Mat::identity();
    let mut avoid: Option<ProjPoint> = None;
    let mut want = Some(first);
    for s in 1..=MAX_ORBIT_STEPS {
        let nb = neighbors(&cur, p)
            .into_iter()
            .find(|nb| match (want, avoid) {
                (Some(z), _) => nb.zero == z,
                (None, Some(z)) => nb.zero != z,
                (None, None) => true,
            })
            .expect("a form with (D/p) = 1 has two neighbors");
        let (red, g) = reduce_form(&nb.form)?;
        // cur = M.P = (M g^{-1}).red
        let step = nb.mat.mul(&g.inverse_unimodular().expect("reduction matrix is unimodular"));
        acc = acc.mul(&step);
        if [acc.a, acc.b, acc.c, acc.d].iter().any(|x| x.unsigned_abs() > MAX_ORBIT_ENTRY) {
            return Err(Error::InvalidContext(format!("orbit matrix of {q0} at p = {p} outgrew i128 arithmetic")));
        }
        // the way back from red is the coset of adj(step)
        avoid = step.adj().left_kernel_mod(p);
        want = None;
        cur = red;
        if red == target {
            let a = acc.mul(&h);
            return Ok((s, a));
        }
    }
    Err(Error::InvalidContext(format!("orbit of {q0} at p = {p} did not close")))
}
