//! Seeded verification campaigns. Each check compares two independent
//! computations and reports the first counterexample it meets.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bqf::{
    classify_form, conjugate, neighbors, orbit_cycle, reduce_form, reduced_forms, Bqf, LegendreClass,
};
use crate::commalg::{
    ordinary_idempotent, random_balanced_module, tor_dims_periodic, GroupRingModule, MatrixModPM,
};
use crate::error::{Error, Result};
use crate::padic::{legendre, ScalarCtx};
use crate::qexp::ops::{Applied, Borrowed};
use crate::qexp::random::{random_elliptic, symmetrized_expansion, RandomSource};
use crate::qexp::{
    apply_primitive, build_expr, check_equivariance, evaluate_lazy, formally_equal, parse_expr, reduce_mod_p,
    simplify_expr, CoeffSource, EllipticOp, NamedOp, Prim, SiegelExpansion, Weight, DEFAULT_PRECISION_CAP,
};
use crate::rootdata::{chamber_classify, lds_family, serre_dual_weight, weyl_act, WeightClass, WeightGSp4, WeylElt};
use crate::symrep::{contract, DualQuadric, RhoMatrix, SymVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl CheckResult {
    fn new(name: &str, cases: u64, counterexample: Option<String>) -> Self {
        let status = if counterexample.is_none() { Status::Pass } else { Status::Fail };
        CheckResult { name: name.into(), status, cases, counterexample, precision: None }
    }

    fn with_precision(mut self, b: u64) -> Self {
        self.precision = Some(b);
        self
    }

    fn from_err(name: &str, e: Error) -> Self {
        CheckResult::new(name, 0, Some(format!("error: {e}")))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{st} {} ({} cases)", self.name, self.cases)?;
        if let Some(c) = &self.counterexample {
            write!(f, ": {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub p: u64,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Operators,
    Bqf,
    Contraction,
    Rootdata,
    Commalg,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "operators" => Suite::Operators,
            "bqf" => Suite::Bqf,
            "contraction" => Suite::Contraction,
            "rootdata" => Suite::Rootdata,
            "commalg" => Suite::Commalg,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format!("{self:?}").to_lowercase())
    }
}

pub fn run_suite(suite: Suite, p: u64, trials: u64, seed: u64) -> Result<Report> {
    ScalarCtx::new(p, 1)?;
    let weights = [Weight::new(2, 2)?, Weight::new(4, 2)?, Weight::new(6, 2)?];
    let mut checks = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Operators) {
        checks.push(check_z2_equals_uz(p, &weights, trials, seed, 8));
        checks.push(check_z2x2_vanishes(p, &weights, trials, seed, 8));
        checks.push(check_q2_congruence(p, trials.min(50), seed));
        checks.push(check_uv_identity(p, trials, seed));
        checks.push(check_equivariance_preserved(p, seed));
    }
    if wants(Suite::Bqf) {
        checks.push(check_neighbor_laws(p, 500));
        checks.push(check_orbit_cycles(p, trials.min(50) as usize, 500, seed));
    }
    if wants(Suite::Contraction) {
        checks.push(check_contraction_anchor(p, trials, seed));
        checks.push(check_kernel_literal(p, &[4, 6], RankOneFilter::Literal));
        checks.push(check_kernel_literal(p, &[4, 6], RankOneFilter::SimilitudeShadow));
        checks.push(check_kernel_orbit_matrices(p, &[4, 6], 300));
    }
    if wants(Suite::Rootdata) {
        checks.push(check_dot_actions(trials, seed));
        checks.push(check_lds_families(10));
        checks.push(check_serre_involution(10));
    }
    if wants(Suite::Commalg) {
        checks.push(check_defect_examples());
        checks.push(check_tor_oracle(trials.min(50), seed));
        checks.push(check_square_presentations(trials.min(50), seed));
        checks.push(check_ordinary_idempotents(trials, seed));
    }
    Ok(Report { suite: suite.to_string(), p, trials, seed, checks })
}

fn ctx(p: u64, m: u32) -> Result<ScalarCtx> {
    ScalarCtx::new(p, m)
}

fn lazy_chain<'a>(ops: &[Prim], src: &'a dyn CoeffSource) -> Result<Box<dyn CoeffSource + 'a>> {
    // ops are applied right to left
    let mut cur: Box<dyn CoeffSource + 'a> = Box::new(Borrowed(src));
    for &op in ops.iter().rev() {
        cur = Box::new(Applied::new(op, cur, DEFAULT_PRECISION_CAP)?);
    }
    Ok(cur)
}

fn compare_words(src: &dyn CoeffSource, lhs: &[Prim], rhs: &[Prim], b: u64) -> Result<Option<Bqf>> {
    let l = SiegelExpansion::from_source(lazy_chain(lhs, src)?.as_ref(), b)?;
    let r = SiegelExpansion::from_source(lazy_chain(rhs, src)?.as_ref(), b)?;
    Ok(l.first_difference(&r))
}

/// Z2 = U Z on dense random expansions with initial box 8 p^2, compared on box `b`.
pub fn check_z2_equals_uz(p: u64, weights: &[Weight], trials: u64, seed: u64, b: u64) -> CheckResult {
    let name = "Z2 = U*Z";
    let run = || -> Result<Option<String>> {
        let c = ctx(p, 2)?;
        for &w in weights {
            for t in 0..trials {
                let src = RandomSource::new(c, w, 8 * p * p, seed.wrapping_add(t));
                if let Some(q) = compare_words(&src, &[Prim::Z2], &[Prim::U, Prim::Z], b)? {
                    return Ok(Some(format!("weight {w}, trial {t}, key {q}")));
                }
            }
        }
        Ok(None)
    };
    match run() {
        Ok(ce) => CheckResult::new(name, trials * weights.len() as u64, ce).with_precision(b),
        Err(e) => CheckResult::from_err(name, e),
    }
}

/// Z2 X2 = 0 mod p.
pub fn check_z2x2_vanishes(p: u64, weights: &[Weight], trials: u64, seed: u64, b: u64) -> CheckResult {
    let name = "Z2*X2 = 0 mod p";
    let run = || -> Result<Option<String>> {
        let c = ctx(p, 1)?;
        for &w in weights {
            for t in 0..trials {
                let src = RandomSource::new(c, w, 8 * p * p, seed.wrapping_add(t));
                let img = SiegelExpansion::from_source(lazy_chain(&[Prim::Z2, Prim::X2], &src)?.as_ref(), b)?;
                let first = img.iter().next().map(|(q, _)| *q);
                if let Some(q) = first {
                    return Ok(Some(format!("weight {w}, trial {t}, nonzero at {q}")));
                }
            }
        }
        Ok(None)
    };
    match run() {
        Ok(ce) => CheckResult::new(name, trials * weights.len() as u64, ce).with_precision(b),
        Err(e) => CheckResult::from_err(name, e),
    }
}

/// Q2 is integral and reduces to Z2 + X2 (j = 2) or Z2 (j >= 3) mod p, formally and numerically.
pub fn check_q2_congruence(p: u64, trials: u64, seed: u64) -> CheckResult {
    let name = "Q2 = Z2 (+X2 if j=2) mod p";
    let mut cases = 0;
    let run = |cases: &mut u64| -> Result<Option<String>> {
        let c1 = ctx(p, 1)?;
        let c3 = ctx(p, 3)?;
        for j in 2..=(p as u32).saturating_sub(2) {
            let w = Weight::new(j, 2)?;
            let q2 = build_expr(NamedOp::Q2, w, c3);
            match simplify_expr(&q2).min_valuation() {
                Some(v) if v < 0 => return Ok(Some(format!("j={j}: coefficient of valuation {v}"))),
                _ => {}
            }
            let target = parse_expr(if j == 2 { "Z2 + X2" } else { "Z2" }, c1, w)?;
            let red = reduce_mod_p(&q2)?;
            if !formally_equal(&red, &target) {
                return Ok(Some(format!("j={j}: Q2 mod p = {red}")));
            }
            let q2_1 = build_expr(NamedOp::Q2, w, c1);
            for t in 0..trials {
                let src = RandomSource::new(c1, w, 4 * p * p, seed.wrapping_add(t));
                let a = evaluate_lazy(&q2_1, &src)?;
                let b = evaluate_lazy(&target, &src)?;
                if !a.agrees_with(&b) {
                    return Ok(Some(format!("j={j}, trial {t}: numeric mismatch")));
                }
                *cases += 1;
            }
        }
        Ok(None)
    };
    match run(&mut cases) {
        Ok(ce) => CheckResult::new(name, cases, ce),
        Err(e) => CheckResult::from_err(name, e),
    }
}

/// U V = Id on elliptic expansions.
pub fn check_uv_identity(p: u64, trials: u64, seed: u64) -> CheckResult {
    let name = "U*V = Id (elliptic)";
    let run = || -> Result<Option<String>> {
        let c = ctx(p, 2)?;
        for t in 0..trials {
            let f = random_elliptic(c, 2 + (t % 5) as i64, 30, seed.wrapping_add(t));
            if f.apply(EllipticOp::V)?.apply(EllipticOp::U)? != f {
                return Ok(Some(format!("trial {t}")));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(ce) => CheckResult::new(name, trials, ce),
        Err(e) => CheckResult::from_err(name, e),
    }
}

/// Z, U, X2 send equivariant expansions to equivariant expansions.
pub fn check_equivariance_preserved(p: u64, seed: u64) -> CheckResult {
    let name = "operators preserve equivariance";
    let run = || -> Result<Option<String>> {
        let c = ctx(p, 2)?;
        let w = Weight::new(4, 2)?;
        let f = symmetrized_expansion(c, w, 3 * p, seed);
        if let Some(v) = check_equivariance(&f).first() {
            return Ok(Some(format!("input not equivariant at {}", v.form)));
        }
        for op in [Prim::Z, Prim::U, Prim::X2] {
            let g = apply_primitive(op, &f)?;
            if let Some(v) = check_equivariance(&g).first() {
                return Ok(Some(format!("{op} breaks equivariance at {}", v.form)));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(ce) => CheckResult::new(name, 3, ce),
        Err(e) => CheckResult::from_err(name, e),
    }
}

/// Expected size of the neighbor multiset from the Legendre class.
pub fn expected_neighbor_count(q: &Bqf, p: u64) -> usize {
    match classify_form(q, p).legendre_class {
        LegendreClass::PDivisible => p as usize + 1,
        LegendreClass::Symbol(s) => (s + 1) as usize,
    }
}

/// Count law and symmetry law on every reduced definite form with |D| <= max_disc.
pub fn check_neighbor_laws(p: u64, max_disc: i128) -> CheckResult {
    let name = "neighbor count and symmetry laws";
    let forms: Vec<Bqf> = (1..=max_disc).flat_map(|d| reduced_forms(-d)).collect();
    let bad = forms.par_iter().find_map_first(|q| {
        let nbs = neighbors(q, p);
        if nbs.len() != expected_neighbor_count(q, p) {
            return Some(format!("{q}: {} neighbors, expected {}", nbs.len(), expected_neighbor_count(q, p)));
        }
        let (qred, _) = reduce_form(q).ok()?;
        for nb in nbs {
            let Ok((pred, _)) = reduce_form(&nb.form) else { return Some(format!("{q}: neighbor {} not definite", nb.form)) };
            let back = neighbors(&pred, p).into_iter().any(|x| reduce_form(&x.form).map(|r| r.0) == Ok(qred));
            if !back {
                return Some(format!("[{pred}] is a neighbor of [{q}] but not conversely"));
            }
        }
        None
    });
    CheckResult::new(name, forms.len() as u64, bad)
}

/// A Q A^T = p^s Q and det A = p^s for A and B, with s at most the class number.
pub fn check_orbit_cycles(p: u64, count: usize, max_disc: i128, seed: u64) -> CheckResult {
    let name = "orbit cycles";
    let mut forms: Vec<Bqf> = (1..=max_disc)
        .flat_map(|d| reduced_forms(-d))
        .filter(|q| classify_form(q, p).legendre_class == LegendreClass::Symbol(1))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..forms.len()).rev() {
        forms.swap(i, rng.gen_range(0..=i));
    }
    forms.truncate(count);
    let bad = forms.par_iter().find_map_first(|q| {
        let cyc = match orbit_cycle(q, p) {
            Ok(c) => c,
            Err(e) => return Some(format!("{q}: {e}")),
        };
        let ps = (p as i128).pow(cyc.s);
        for (label, a) in [("A", cyc.a), ("B", cyc.b)] {
            let img = conjugate(&a, q);
            if img != (ps * q.m as i128, ps * q.r as i128, ps * q.n as i128) || a.det() != ps {
                return Some(format!("{q}: {label} = {a:?} fails the similitude identity with s = {}", cyc.s));
            }
        }
        let h = reduced_forms(q.disc()).len() as u32;
        (cyc.s > h).then(|| format!("{q}: s = {} exceeds class number {h}", cyc.s))
    });
    CheckResult::new(name, forms.len() as u64, bad)
}

/// con(Q (x) Q^dual) = r^2 - 4mn on random forms mod p and p^2.
pub fn check_contraction_anchor(p: u64, trials: u64, seed: u64) -> CheckResult {
    let name = "con(Q (x) Q^dual) = r^2 - 4mn";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in [1, 2] {
        let Ok(c) = ctx(p, m) else { return CheckResult::from_err(name, Error::InvalidContext("bad p".into())) };
        for _ in 0..trials {
            let q = Bqf::new(rng.gen_range(-1000..1000), rng.gen_range(-1000..1000), rng.gen_range(-1000..1000));
            let got = contract(&SymVector::from_form(c, &q), &DualQuadric::from(q));
            match got {
                Ok(v) if v.coeffs()[0] == c.reduce(q.disc()) => {}
                Ok(v) => return CheckResult::new(name, trials, Some(format!("{q} mod {p}^{m}: got {}", v.coeffs()[0]))),
                Err(e) => return CheckResult::from_err(name, e),
            }
        }
    }
    CheckResult::new(name, 2 * trials, None)
}

/// Which rank <= 1 matrices the exhaustive kernel check ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankOneFilter {
    /// A Q A^T = 0 mod p.
    Literal,
    /// Also A^T adj(Q) A = 0 mod p, the reduction of A Q A^T = p^s Q with det A = p^s.
    SimilitudeShadow,
}

fn rank_le_one_mod_p(p: u64) -> Vec<[i128; 4]> {
    let p = p as i128;
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if (a * d - b * c).rem_euclid(p) == 0 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// M S M^T for symmetric S = [[s0, s1], [s1, s2]], entries (00, 01, 11).
fn sandwich(m: &[i128; 4], s: [i128; 3]) -> [i128; 3] {
    let [a, b, c, d] = *m;
    let [s0, s1, s2] = s;
    [
        a * a * s0 + 2 * a * b * s1 + b * b * s2,
        a * c * s0 + (a * d + b * c) * s1 + b * d * s2,
        c * c * s0 + 2 * c * d * s1 + d * d * s2,
    ]
}

/// Exhaustive: every Q mod p with (D/p) = 1, every admitted rank <= 1 matrix A
/// and every monomial x of Sym^{j-2}: con(rho(A) x, Q^dual) = 0 mod p.
pub fn check_kernel_literal(p: u64, js: &[u32], filter: RankOneFilter) -> CheckResult {
    let name = match filter {
        RankOneFilter::Literal => "theta1 kernel: all rank<=1 A with AQA^T=0",
        RankOneFilter::SimilitudeShadow => "theta1 kernel: rank<=1 A with AQA^T=0 and A^T adj(Q) A=0",
    };
    let Ok(c) = ctx(p, 1) else { return CheckResult::from_err(name, Error::InvalidContext("bad p".into())) };
    let mats = rank_le_one_mod_p(p);
    let pi = p as i128;
    let mut forms = Vec::new();
    for m in 0..pi {
        for r in 0..pi {
            for n in 0..pi {
                let q = Bqf::new(m as i64, r as i64, n as i64);
                if legendre(q.disc(), p) == 1 {
                    forms.push(q);
                }
            }
        }
    }
    let mut cases = 0u64;
    for &j in js {
        let d = (j - 2) as usize;
        if d as u64 >= p {
            return CheckResult::from_err(name, Error::PrimeTooSmall { p, degree: d });
        }
        for q in &forms {
            let (m, r, n) = (q.m as i128, q.r as i128, q.n as i128);
            // 2Q and its adjugate as symmetric matrices
            let two_q = [2 * m, r, 2 * n];
            let adj = [2 * n, -r, 2 * m];
            let qd = DualQuadric::from(*q);
            for a in &mats {
                if sandwich(a, two_q).iter().any(|x| x.rem_euclid(pi) != 0) {
                    continue;
                }
                let at = [a[0], a[2], a[1], a[3]];
                if filter == RankOneFilter::SimilitudeShadow && sandwich(&at, adj).iter().any(|x| x.rem_euclid(pi) != 0) {
                    continue;
                }
                let rho = RhoMatrix::from_entries(c, *a, d);
                for i in 0..=d {
                    cases += 1;
                    let v = match rho.apply(&SymVector::basis(c, d, i)).and_then(|v| contract(&v, &qd)) {
                        Ok(v) => v,
                        Err(e) => return CheckResult::from_err(name, e),
                    };
                    if !v.is_zero() {
                        let ce = format!(
                            "j={j}, Q={q}, A=[[{},{}],[{},{}]], x=f1^{}f2^{}: con = {:?}",
                            a[0],
                            a[1],
                            a[2],
                            a[3],
                            d - i,
                            i,
                            v.coeffs()
                        );
                        return CheckResult::new(name, cases, Some(ce));
                    }
                }
            }
        }
    }
    CheckResult::new(name, cases, None)
}

/// The kernel mechanism on the actual orbit matrices A, B of definite forms with (D/p) = 1.
pub fn check_kernel_orbit_matrices(p: u64, js: &[u32], max_disc: i128) -> CheckResult {
    let name = "theta1 kernel on orbit matrices";
    let Ok(c) = ctx(p, 1) else { return CheckResult::from_err(name, Error::InvalidContext("bad p".into())) };
    let forms: Vec<Bqf> = (1..=max_disc)
        .flat_map(|d| reduced_forms(-d))
        .filter(|q| classify_form(q, p).legendre_class == LegendreClass::Symbol(1))
        .collect();
    let results: Vec<std::result::Result<u64, String>> = forms
        .par_iter()
        .map(|q| {
            let cyc = orbit_cycle(q, p).map_err(|e| format!("{q}: {e}"))?;
            let qd = DualQuadric::from(*q);
            let mut cases = 0;
            for &j in js {
                let d = (j - 2) as usize;
                for a in [cyc.a, cyc.b] {
                    let rho = RhoMatrix::new(c, &a, d);
                    for i in 0..=d {
                        cases += 1;
                        let v = rho.apply(&SymVector::basis(c, d, i)).and_then(|v| contract(&v, &qd)).map_err(|e| e.to_string())?;
                        if !v.is_zero() {
                            return Err(format!("j={j}, Q={q}, A={a:?}, i={i}"));
                        }
                    }
                }
            }
            Ok(cases)
        })
        .collect();
    let mut cases = 0;
    for r in results {
        match r {
            Ok(n) => cases += n,
            Err(ce) => return CheckResult::new(name, cases, Some(ce)),
        }
    }
    CheckResult::new(name, cases, None)
}

/// w~_i . mu - (t, t; 0) against the three closed forms.
pub fn check_dot_actions(trials: u64, seed: u64) -> CheckResult {
    let name = "dot actions w~_i.mu - (t,t;0)";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let (al, be, t) = (rng.gen_range(-50..50), rng.gen_range(-50..50), rng.gen_range(-50..50));
        let gamma = Rational64::new(rng.gen_range(-50..50), 2);
        let mu = WeightGSp4::new(al, be, gamma);
        let expect = [(al - t, -be - 2 - t), (be - 1 - t, -al - 3 - t), (-be - 3 - t, -al - 3 - t)];
        for (w, e) in [WeylElt::W1, WeylElt::W2, WeylElt::W3].into_iter().zip(expect) {
            let x = weyl_act(w, &mu, true);
            if (x.a - t, x.b - t) != e {
                return CheckResult::new(name, trials, Some(format!("{w:?} on ({al},{be}) t={t}: ({},{})", x.a - t, x.b - t)));
            }
        }
    }
    CheckResult::new(name, trials, None)
}

/// LDS weights on [-r, r]^2 are exactly the three families.
pub fn check_lds_families(r: i64) -> CheckResult {
    let name = "LDS weights are the three families";
    for a in -r..=r {
        for b in -r..=r {
            let lds = chamber_classify(a, b).class == WeightClass::Lds;
            let fam = b == 2 && a >= 2 || b == 3 - a && a >= 2 || a == 1 && b <= 1;
            if lds != fam || lds != lds_family(a, b).is_some() {
                return CheckResult::new(name, 0, Some(format!("({a},{b})")));
            }
        }
    }
    CheckResult::new(name, ((2 * r + 1) * (2 * r + 1)) as u64, None)
}

pub fn check_serre_involution(r: i64) -> CheckResult {
    let name = "Serre duality involution fixes exactly b = 3 - a";
    for a in -r..=r {
        for b in -r..=r {
            let (c, d) = serre_dual_weight(a, b);
            if serre_dual_weight(c, d) != (a, b) || ((c, d) == (a, b)) != (b == 3 - a) {
                return CheckResult::new(name, 0, Some(format!("({a},{b})")));
            }
        }
    }
    CheckResult::new(name, ((2 * r + 1) * (2 * r + 1)) as u64, None)
}

/// defect(S) = 1, defect(k/k[Z/p]) = 0, defect(k/k[(Z/p)^2]) = -1, each
/// cross-checked with the periodic-resolution computation.
pub fn check_defect_examples() -> CheckResult {
    let name = "defect examples";
    let run = || -> Result<Option<String>> {
        let mut cases = 0;
        for p in [2u64, 3, 5, 7] {
            let cases_here = [
                (GroupRingModule::free(p, 1, 1, 1)?, 1),
                (GroupRingModule::trivial(p, 1, 1, 1)?, 0),
                (GroupRingModule::trivial(p, 1, 2, 1)?, -1),
            ];
            for (m, d) in cases_here {
                cases += 1;
                let got = m.defect_balanced();
                let oracle = tor_dims_periodic(&m);
                if got.d != d || oracle.t0 as i64 - oracle.t1 as i64 != d || got.balanced != (d >= 0) {
                    return Ok(Some(format!("p={p}: expected {d}, got {} (oracle {:?})", got.d, oracle)));
                }
            }
        }
        let _ = cases;
        Ok(None)
    };
    match run() {
        Ok(ce) => CheckResult::new(name, 12, ce),
        Err(e) => CheckResult::from_err(name, e),
    }
}

const RING_GRID: [(u64, u32, usize); 7] = [(2, 1, 1), (3, 1, 1), (5, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 2), (2, 1, 3)];

/// Minimal-cover Tor dimensions against the periodic resolution on random modules of dim <= 12.
pub fn check_tor_oracle(trials: u64, seed: u64) -> CheckResult {
    let name = "Tor dims agree with periodic resolution";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    for t in 0..trials {
        let (p, n, q) = RING_GRID[t as usize % RING_GRID.len()];
        let m = match random_balanced_module(p, n, q, 12, &mut rng) {
            Ok(m) => m,
            Err(e) => return CheckResult::from_err(name, e),
        };
        // also an unbalanced neighbor: m (+) k
        let k = GroupRingModule::trivial(p, n, q, 1).expect("valid");
        for x in [m.clone(), m.direct_sum(&k).expect("same ring")] {
            cases += 1;
            if x.tor_dims() != tor_dims_periodic(&x) {
                return CheckResult::new(name, cases, Some(format!("({p},{n},{q}) module of dim {}", x.dim())));
            }
        }
    }
    CheckResult::new(name, cases, None)
}

pub fn check_square_presentations(trials: u64, seed: u64) -> CheckResult {
    let name = "square presentation cokernel = M";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157);
    for t in 0..trials {
        let (p, n, q) = RING_GRID[t as usize % RING_GRID.len()];
        let res = random_balanced_module(p, n, q, 12, &mut rng).and_then(|m| {
            let pr = m.square_presentation()?;
            m.verify_presentation(&pr)?;
            Ok(())
        });
        if let Err(e) = res {
            return CheckResult::new(name, t, Some(format!("({p},{n},{q}): {e}")));
        }
    }
    CheckResult::new(name, trials, None)
}

/// e^2 = e, eA = Ae and the nilpotence certificate on random matrices over Z/p^m.
pub fn check_ordinary_idempotents(trials: u64, seed: u64) -> CheckResult {
    let name = "ordinary idempotent certificates";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1de);
    for t in 0..trials {
        let p = [3u64, 5][t as usize % 2];
        let m = 1 + (t / 2 % 3) as u32;
        let c = ScalarCtx::new(p, m).expect("valid");
        let n = rng.gen_range(1..=5);
        let rows = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..c.modulus()) as i128).collect()).collect();
        let res = MatrixModPM::new(c, rows).and_then(|a| {
            let (e, cert) = ordinary_idempotent(&a)?;
            if e.mul(&e) != e || e.mul(&a) != a.mul(&e) || cert.nilpotency > n * m as usize {
                return Err(Error::InvalidContext("certificate mismatch".into()));
            }
            Ok(())
        });
        if let Err(e) = res {
            return CheckResult::new(name, t, Some(format!("trial {t} over Z/{p}^{m}: {e}")));
        }
    }
    CheckResult::new(name, trials, None)
}

/// Rank-one counterexample to the unrestricted kernel statement, if one exists.
pub fn literal_kernel_counterexample(p: u64, j: u32) -> Option<String> {
    check_kernel_literal(p, &[j], RankOneFilter::Literal).counterexample
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Rootdata, Suite::Commalg] {
            let r = run_suite(suite, 5, 10, 1).unwrap();
            assert!(r.passed(), "{:?}", r.checks);
        }
        let r = run_suite(Suite::Bqf, 5, 10, 1).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn operator_checks_pass() {
        let w = [Weight::new(2, 2).unwrap(), Weight::new(4, 2).unwrap()];
        assert!(check_z2_equals_uz(5, &w, 2, 3, 4).passed());
        assert!(check_z2x2_vanishes(5, &w, 2, 3, 4).passed());
        assert!(check_q2_congruence(7, 2, 3).passed());
    }

    #[test]
    fn kernel_checks() {
        let lit = check_kernel_literal(5, &[4], RankOneFilter::Literal);
        assert!(!lit.passed());
        assert!(check_kernel_literal(5, &[4, 6], RankOneFilter::SimilitudeShadow).passed());
        assert!(check_kernel_orbit_matrices(5, &[4, 6], 100).passed());
        // diag(1, 0) on (5, 1, 1): A Q A^T = diag(5, 0) = 0 mod 5 but con(f1^2, Q^dual) = -2n
        let c = ScalarCtx::new(5, 1).unwrap();
        let q = Bqf::new(5, 1, 1);
        let v = RhoMatrix::from_entries(c, [1, 0, 0, 0], 2).apply(&SymVector::basis(c, 2, 0)).unwrap();
        assert!(!contract(&v, &DualQuadric::from(q)).unwrap().is_zero());
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite(Suite::Commalg, 3, 5, 9).unwrap();
        let b = run_suite(Suite::Commalg, 3, 5, 9).unwrap();
        assert_eq!(a, b);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn failing_check_reports() {
        let bad = CheckResult::new("x", 1, Some("here".into()));
        assert!(!bad.passed());
        assert_eq!(bad.to_string(), "FAIL x (1 cases): here");
    }
}
