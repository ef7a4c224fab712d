//! GSp4 weight combinatorics on X*(T) = {(a, b; c)}.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (a, b; c) with a, b integral and c allowed to be half-integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightGSp4 {
    pub a: i64,
    pub b: i64,
    pub c: Rational64,
}

impl WeightGSp4 {
    pub fn new(a: i64, b: i64, c: Rational64) -> Self {
        WeightGSp4 { a, b, c }
    }

    pub fn int(a: i64, b: i64, c: i64) -> Self {
        WeightGSp4 { a, b, c: Rational64::from_integer(c) }
    }

    fn add(&self, o: &WeightGSp4) -> WeightGSp4 {
        WeightGSp4 { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c }
    }

    fn sub(&self, o: &WeightGSp4) -> WeightGSp4 {
        WeightGSp4 { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c }
    }
}

impl fmt::Display for WeightGSp4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{})", self.a, self.b, self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coweight {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
}

/// Half the sum of the positive roots, (2, 1; -3/2).
pub fn rho() -> WeightGSp4 {
    WeightGSp4::new(2, 1, Rational64::new(-3, 2))
}

/// Simple and positive roots alpha_1..alpha_4.
pub const ROOTS: [(i64, i64, i64); 4] = [(1, -1, 0), (0, 2, -1), (1, 1, -1), (2, 0, -1)];
/// Matching coroots.
pub const COROOTS: [Coweight; 4] = [
    Coweight { alpha: 1, beta: -1, gamma: 0 },
    Coweight { alpha: 0, beta: 1, gamma: 0 },
    Coweight { alpha: 1, beta: 1, gamma: 0 },
    Coweight { alpha: 1, beta: 0, gamma: 0 },
];

pub fn root(i: usize) -> WeightGSp4 {
    let (a, b, c) = ROOTS[i - 1];
    WeightGSp4::int(a, b, c)
}

pub fn coroot(i: usize) -> Coweight {
    COROOTS[i - 1]
}

/// <(a,b;c), (alpha,beta,gamma)> = a alpha + b beta + c gamma.
pub fn pairing(l: &WeightGSp4, c: &Coweight) -> Rational64 {
    Rational64::from_integer(l.a * c.alpha + l.b * c.beta) + l.c * c.gamma
}

/// The Kostant representatives w~_1, w~_2, w~_3, the identity and w_0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeylElt {
    Id,
    W1,
    W2,
    W3,
    W0,
}

impl WeylElt {
    pub const REPS: [WeylElt; 4] = [WeylElt::Id, WeylElt::W1, WeylElt::W2, WeylElt::W3];

    fn linear(&self, l: &WeightGSp4) -> WeightGSp4 {
        let (a, b, c) = (l.a, l.b, l.c);
        match self {
            WeylElt::Id => *l,
            WeylElt::W1 => WeightGSp4::new(a, -b, c + b),
            WeylElt::W2 => WeightGSp4::new(b, -a, c + a),
            WeylElt::W3 => WeightGSp4::new(-b, -a, c + a + b),
            WeylElt::W0 => WeightGSp4::new(b, a, c),
        }
    }
}

/// w(l), or the dot action w(l + rho) - rho.
pub fn weyl_act(w: WeylElt, l: &WeightGSp4, dot: bool) -> WeightGSp4 {
    if dot {
        w.linear(&l.add(&rho())).sub(&rho())
    } else {
        w.linear(l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chamber {
    C0,
    C1,
    C2,
    C3,
}

impl Chamber {
    pub const ALL: [Chamber; 4] = [Chamber::C0, Chamber::C1, Chamber::C2, Chamber::C3];

    /// (lhs >= mid >= 0) as the pair (lhs, mid).
    fn chain(&self, x: i64, y: i64) -> (i64, i64) {
        match self {
            Chamber::C0 => (x, y),
            Chamber::C1 => (x, -y),
            Chamber::C2 => (-y, x),
            Chamber::C3 => (-y, -x),
        }
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        let (u, v) = self.chain(x, y);
        u >= v && v >= 0
    }

    pub fn contains_strictly(&self, x: i64, y: i64) -> bool {
        let (u, v) = self.chain(x, y);
        u > v && v > 0
    }

    pub fn weyl_rep(&self) -> WeylElt {
        match self {
            Chamber::C0 => WeylElt::Id,
            Chamber::C1 => WeylElt::W1,
            Chamber::C2 => WeylElt::W2,
            Chamber::C3 => WeylElt::W3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightClass {
    Regular,
    Lds,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberInfo {
    pub chambers: Vec<Chamber>,
    pub class: WeightClass,
}

/// Where (a - 1, b - 2) sits: regular if strictly inside a single chamber,
/// limit of discrete series if on exactly two chambers.
pub fn chamber_classify(a: i64, b: i64) -> ChamberInfo {
    let (x, y) = (a - 1, b - 2);
    let chambers: Vec<Chamber> = Chamber::ALL.into_iter().filter(|c| c.contains(x, y)).collect();
    let class = match chambers.as_slice() {
        [c] if c.contains_strictly(x, y) => WeightClass::Regular,
        [_, _] => WeightClass::Lds,
        _ => WeightClass::Degenerate,
    };
    ChamberInfo { chambers, class }
}

/// Which of the three limit of discrete series families (a,b) belongs to:
/// 1 for (a, 2), 2 for (a, 3 - a), 3 for (1, b).
pub fn lds_family(a: i64, b: i64) -> Option<u8> {
    if b == 2 && a >= 2 {
        Some(1)
    } else if b == 3 - a && a >= 2 {
        Some(2)
    } else if a == 1 && b <= 1 {
        Some(3)
    } else {
        None
    }
}

/// Degrees i in which the mod-p cuspidal cohomology of omega(a,b) is known
/// to vanish: three rules, each with its own hypothesis.
pub fn lan_suh_vanishing(a: i64, b: i64, p: u64) -> BTreeSet<u8> {
    let p = p as i64;
    let mut out = BTreeSet::new();
    let gap = a - b;
    if a >= 3 && (2..=p - 2).contains(&gap) {
        out.insert(3);
    }
    if a + b >= 6 && (2..=p - 2).contains(&gap) {
        out.extend([2, 3]);
    }
    if b >= 4 && (0..=p - 4).contains(&gap) {
        out.extend([1, 2, 3]);
    }
    out
}

pub fn serre_dual_weight(a: i64, b: i64) -> (i64, i64) {
    (3 - b, 3 - a)
}

/// Coefficients of X^4 - t1 X^3 + (x t2 + (x^3 + x) s) X^2 - x^3 s t1 X + x^6 s^2,
/// leading coefficient first.
pub fn hecke_poly(x: &BigRational, t1: &BigRational, t2: &BigRational, s: &BigRational) -> [BigRational; 5] {
    let x3 = x * x * x;
    [
        BigRational::one(),
        -t1.clone(),
        x * t2 + (&x3 + x) * s,
        -(&x3 * s * t1),
        &x3 * &x3 * s * s,
    ]
}

pub fn hecke_poly_int(x: i64, t1: i64, t2: i64, s: i64) -> [i128; 5] {
    let r = |n: i64| BigRational::from_integer(BigInt::from(n));
    hecke_poly(&r(x), &r(t1), &r(t2), &r(s)).map(|c| {
        let n = c.to_integer();
        i128::try_from(n).expect("coefficients fit in i128")
    })
}

fn rat_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut v = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(x.numer()) - count(x.denom()))
}

/// p-adic valuations of the roots of a polynomial (leading coefficient first),
/// read off its Newton polygon, ascending.
pub fn newton_root_valuations(coeffs: &[BigRational], p: u64) -> Vec<Rational64> {
    let deg = coeffs.len() - 1;
    // points (i, v(c_i)) for the coefficient of X^i
    let pts: Vec<(i64, i64)> = (0..=deg)
        .filter_map(|i| rat_valuation(&coeffs[deg - i], p).map(|v| (i as i64, v)))
        .collect();
    // lower convex hull
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (pt.1 - o.1) - (a.1 - o.1) * (pt.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let slope = Rational64::new(w[1].1 - w[0].1, w[1].0 - w[0].0);
        for _ in 0..(w[1].0 - w[0].0) {
            out.push(-slope);
        }
    }
    out.sort();
    out
}

/// (0, b - 2, a - 1, a + b - 3).
pub fn ordinary_root_valuations(a: i64, b: i64) -> Result<[i64; 4]> {
    if !(a >= b && b >= 2) {
        return Err(Error::InvalidWeight(format!("({a},{b}) needs a >= b >= 2")));
    }
    Ok([0, b - 2, a - 1, a + b - 3])
}

/// ((a+b-3-w)/2, (a-b+1-w)/2, (-a+b-1-w)/2, (-a-b+3-w)/2).
pub fn infinitesimal_char(a: i64, b: i64, w: i64) -> [Rational64; 4] {
    [a + b - 3 - w, a - b + 1 - w, -a + b - 1 - w, -a - b + 3 - w].map(|n| Rational64::new(n, 2))
}

/// Local contributions to the Greenberg-Wiles formula for ad^0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSelmerData {
    pub at_p: i64,
    pub at_q: i64,
    pub elsewhere: i64,
    pub archimedean_h0: i64,
}

impl LocalSelmerData {
    pub const STANDARD: LocalSelmerData = LocalSelmerData { at_p: 3, at_q: 1, elsewhere: 0, archimedean_h0: 4 };
}

/// The local term at p for a Fontaine-Laffaille condition: h^1_f - h^0 = 2 + 3 - 2 - 0.
pub fn fontaine_laffaille_local() -> i64 {
    let (h1_unr, fil_quot, h0_loc, h0) = (2, 3, 2, 0);
    h1_unr + fil_quot - h0_loc - h0
}

/// dim H^1_Q = dim H^1_Q(dual) - 1 + #Q.
pub fn gw_tangent_dim(dual_dim: i64, n_q: i64) -> Result<i64> {
    if dual_dim < 0 || n_q < 0 {
        return Err(Error::InvalidContext("dimensions must be nonnegative".into()));
    }
    Ok(dual_dim - 1 + n_q)
}

/// The same number summed from the local ledger.
pub fn gw_ledger(dual_dim: i64, n_q: i64, data: &LocalSelmerData) -> i64 {
    data.at_p + n_q * data.at_q + data.elsewhere - data.archimedean_h0 + dual_dim
}
