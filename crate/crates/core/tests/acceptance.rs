//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed. Exits
//! nonzero if a criterion fails, except the literal reading of criterion 7,
//! which is false: there the run asserts that every counterexample is of the
//! kind explained in the README (rank-one A with AQA^T = 0 mod p but
//! A^T adj(Q) A != 0 mod p), and that the mechanism holds for actual similitudes.

use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use siegel_core::bqf::{neighbors, orbit_cycle, Bqf, GL2Mat};
use siegel_core::commalg::{
    ordinary_idempotent, random_balanced_module, tor_dims_periodic, GroupRingModule, MatrixModPM,
};
use siegel_core::padic::ScalarCtx;
use siegel_core::qexp::random::{random_elliptic, RandomSource};
use siegel_core::qexp::{
    apply_primitive, build_expr, evaluate_lazy, formally_equal, parse_expr, reduce_mod_p, simplify_expr, EllipticOp, NamedOp,
    Prim, SiegelExpansion, Weight,
};
use siegel_core::rootdata::{chamber_classify, serre_dual_weight, weyl_act, WeightClass, WeightGSp4, WeylElt};
use siegel_core::symrep::{contract, DualQuadric, RhoMatrix, SymVector};

type Outcome = Result<u64, String>;

struct Line {
    id: &'static str,
    name: &'static str,
    outcome: Outcome,
    secs: f64,
}

fn run(id: &'static str, name: &'static str, f: impl FnOnce() -> Outcome) -> Line {
    let t = Instant::now();
    let outcome = f();
    Line { id, name, outcome, secs: t.elapsed().as_secs_f64() }
}

fn report(l: &Line) {
    match &l.outcome {
        Ok(n) => println!("PASS {:<3} {} ({n} cases, {:.1}s)", l.id, l.name, l.secs),
        Err(e) => println!("FAIL {:<3} {} ({:.1}s): {e}", l.id, l.name, l.secs),
    }
}

// ---- independent oracles ----

fn euler_legendre(a: i128, p: u64) -> i8 {
    let p128 = p as i128;
    let a = a.rem_euclid(p128);
    if a == 0 {
        return 0;
    }
    let mut acc = 1i128;
    for _ in 0..(p - 1) / 2 {
        acc = acc * a % p128;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced definite forms (m, r, n) with r^2 - 4mn = d < 0, by direct search.
fn reduced_of_disc(d: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut m = 1;
    while 3 * m * m <= -d {
        for r in -m..=m {
            let num = r * r - d;
            if num % (4 * m) != 0 {
                continue;
            }
            let n = num / (4 * m);
            if n < m || ((r.abs() == m || m == n) && r < 0) {
                continue;
            }
            out.push((m, r, n));
        }
        m += 1;
    }
    out
}

fn class_number(d: i64) -> usize {
    reduced_of_disc(d).into_iter().filter(|&(m, r, n)| gcd(gcd(m, r), n) == 1).count()
}

/// Gauss reduction of a positive definite form.
fn gauss_reduce(q: (i64, i64, i64)) -> (i64, i64, i64) {
    let (mut m, mut r, mut n) = q;
    loop {
        if r.abs() > m {
            // x -> x + k y moves r by 2mk into (-m, m]
            let target = m - (m - r).rem_euclid(2 * m);
            let k = (target - r) / (2 * m);
            n = m * k * k + r * k + n;
            r = target;
        }
        if m > n {
            (m, r, n) = (n, -r, m);
            continue;
        }
        if (r.abs() == m || m == n) && r < 0 {
            r = -r;
        }
        return (m, r, n);
    }
}

fn tuple(q: &Bqf) -> (i64, i64, i64) {
    (q.m, q.r, q.n)
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] as u128 * b[k][j] as u128 % q as u128).sum::<u128>() as u64 % q).collect())
        .collect()
}

fn mat_pow(a: &[Vec<u64>], mut e: u64, q: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut acc: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j) % q).collect()).collect();
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base, q);
        }
        base = mat_mul(&base, &base, q);
        e >>= 1;
    }
    acc
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] % p != 0) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|x| x * rows[rank][c] % p == 1).unwrap();
        let pivot_row: Vec<u64> = rows[rank].iter().map(|x| x * inv % p).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] % p != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

// ---- criteria ----

const WEIGHTS: [(u32, u32); 3] = [(2, 2), (4, 2), (6, 2)];

fn expr_on(src: &RandomSource, s: &str, ctx: ScalarCtx, w: Weight) -> Result<SiegelExpansion, String> {
    let e = parse_expr(s, ctx, w).map_err(|e| e.to_string())?;
    evaluate_lazy(&e, src).map_err(|e| format!("{s}: {e}"))
}

fn c1_z2_equals_uz() -> Outcome {
    let jobs: Vec<(u64, (u32, u32), u64)> =
        [3u64, 5, 7].iter().flat_map(|&p| WEIGHTS.iter().flat_map(move |&w| (0..100).map(move |t| (p, w, t)))).collect();
    jobs.par_iter()
        .map(|&(p, (j, k), t)| {
            let ctx = ScalarCtx::new(p, 2).unwrap();
            let w = Weight::new(j, k).unwrap();
            let src = RandomSource::new(ctx, w, 8 * p * p, 1000 + t);
            let a = expr_on(&src, "Z2", ctx, w)?.truncate(8).map_err(|e| e.to_string())?;
            let b = expr_on(&src, "U*Z", ctx, w)?.truncate(8).map_err(|e| e.to_string())?;
            if a.precision() != 8 || b.precision() != 8 || a.is_zero() {
                return Err(format!("p={p} {w}: degenerate comparison"));
            }
            match a.first_difference(&b) {
                None => Ok(1),
                Some(q) => Err(format!("p={p} {w} trial {t}: differ at {q}")),
            }
        })
        .sum()
}

fn c2_z2x2_vanishes() -> Outcome {
    let jobs: Vec<(u64, (u32, u32), u64)> =
        [3u64, 5, 7].iter().flat_map(|&p| WEIGHTS.iter().flat_map(move |&w| (0..100).map(move |t| (p, w, t)))).collect();
    jobs.par_iter()
        .map(|&(p, (j, k), t)| {
            let ctx = ScalarCtx::new(p, 1).unwrap();
            let w = Weight::new(j, k).unwrap();
            let src = RandomSource::new(ctx, w, 8 * p * p, 1000 + t);
            let img = expr_on(&src, "Z2*X2", ctx, w)?;
            // Z2 alone is not zero, the composite is
            if img.precision() < 8 || !img.is_zero() || expr_on(&src, "Z2", ctx, w)?.is_zero() {
                return Err(format!("p={p} {w} trial {t}"));
            }
            Ok(1)
        })
        .sum()
}

/// Q2 in weight (j, 2) collected by hand: Z2 + p^{j-2} X2 + p^{j-1} V2 + p^{j-1} Id.
fn q2_by_hand(j: u32) -> String {
    // pT2 p^{2-k}: U2 -> p^{j-3}, Z2 -> 1, V2 -> p^{j-1}; U2 = -1 + p X2;
    // (p + p^3) S p^{2-k} = p^{j-3} + p^{j-1}
    let (u2, v2) = (j as i32 - 3, j as i32 - 1);
    format!("Z2 + p^{}*X2 + p^{v2}*V2 + p^{v2}*Id", u2 + 1)
}

fn c3_q2_congruence() -> Outcome {
    let mut jobs = Vec::new();
    for p in [5u64, 7, 11] {
        for j in 2..=(p as u32 - 2) {
            let w = Weight::new(j, 2).unwrap();
            let c4 = ScalarCtx::new(p, 4).unwrap();
            let c1 = ScalarCtx::new(p, 1).unwrap();
            let s = simplify_expr(&build_expr(NamedOp::Q2, w, c4));
            match s.min_valuation() {
                Some(v) if v >= 0 => {}
                v => return Err(format!("p={p} j={j}: min valuation {v:?}")),
            }
            let hand = parse_expr(&q2_by_hand(j), c4, w).unwrap();
            if !formally_equal(&s, &hand) {
                return Err(format!("p={p} j={j}: simplified to {s}"));
            }
            let target = parse_expr(if j == 2 { "Z2 + X2" } else { "Z2" }, c1, w).unwrap();
            let red = reduce_mod_p(&s).map_err(|e| e.to_string())?;
            if !formally_equal(&red, &target) {
                return Err(format!("p={p} j={j}: reduces to {red}"));
            }
            jobs.extend((0..50).map(|t| (p, j, t)));
        }
    }
    jobs.par_iter()
        .map(|&(p, j, t)| {
            let c1 = ScalarCtx::new(p, 1).unwrap();
            let w = Weight::new(j, 2).unwrap();
            let src = RandomSource::new(c1, w, 4 * p * p, 77 + t);
            let q2 = expr_on(&src, "Q2", c1, w)?;
            let mut rhs = expr_on(&src, "Z2", c1, w)?;
            if j == 2 {
                // X2 keeps the box, so apply it to the source cut down to Z2's box
                let small = SiegelExpansion::from_source(&src, rhs.precision()).unwrap();
                rhs = rhs.add(&apply_primitive(Prim::X2, &small).unwrap()).unwrap();
            }
            let b = q2.precision().min(rhs.precision());
            if b == 0 || !q2.truncate(b).unwrap().agrees_with(&rhs.truncate(b).unwrap()) {
                return Err(format!("p={p} j={j} trial {t}: numeric mismatch"));
            }
            Ok(1)
        })
        .sum()
}

fn c4_neighbor_laws() -> Outcome {
    let forms: Vec<(i64, i64, i64)> = (3..=500).flat_map(|d| reduced_of_disc(-d)).collect();
    let jobs: Vec<(u64, (i64, i64, i64))> = [3u64, 5, 7, 11].iter().flat_map(|&p| forms.iter().map(move |&q| (p, q))).collect();
    jobs.par_iter()
        .map(|&(p, (m, r, n))| {
            let q = Bqf::new(m, r, n);
            let pi = p as i64;
            let expected = if m % pi == 0 && r % pi == 0 && n % pi == 0 {
                p as usize + 1
            } else {
                (euler_legendre(q.disc(), p) + 1) as usize
            };
            let nbs = neighbors(&q, p);
            if nbs.len() != expected {
                return Err(format!("p={p} {q}: {} neighbors, expected {expected}", nbs.len()));
            }
            for nb in &nbs {
                let back = neighbors(&nb.form, p).iter().any(|x| gauss_reduce(tuple(&x.form)) == (m, r, n));
                if !back {
                    return Err(format!("p={p}: {} is a neighbor of {q} but not conversely", nb.form));
                }
            }
            Ok(1)
        })
        .sum()
}

fn c5_orbit_cycles() -> Outcome {
    let mut jobs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(823);
    for p in [3u64, 5, 7, 11] {
        let mut pool: Vec<(i64, i64, i64)> = (3..=500)
            .flat_map(|d| reduced_of_disc(-d))
            .filter(|&(m, r, n)| euler_legendre((r * r - 4 * m * n) as i128, p) == 1)
            .collect();
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.gen_range(0..=i));
        }
        jobs.extend(pool.into_iter().take(50).map(|q| (p, q)));
    }
    jobs.par_iter()
        .map(|&(p, (m, r, n))| {
            let q = Bqf::new(m, r, n);
            let cyc = orbit_cycle(&q, p).map_err(|e| format!("p={p} {q}: {e}"))?;
            let ps = (p as i128).pow(cyc.s);
            for a in [cyc.a, cyc.b] {
                let GL2Mat { a: x, b: y, c: z, d: w } = a;
                let (m, r, n) = (m as i128, r as i128, n as i128);
                // [[x,y],[z,w]] [[2m,r],[r,2n]] [[x,z],[y,w]]
                let top = 2 * m * x * x + 2 * r * x * y + 2 * n * y * y;
                let off = 2 * m * x * z + r * (x * w + y * z) + 2 * n * y * w;
                let bot = 2 * m * z * z + 2 * r * z * w + 2 * n * w * w;
                if (top, off, bot) != (2 * m * ps, r * ps, 2 * n * ps) || x * w - y * z != ps {
                    return Err(format!("p={p} {q}: {a:?} with s={}", cyc.s));
                }
            }
            let c = gcd(gcd(m, r), n);
            let h = class_number((r * r - 4 * m * n) / (c * c));
            if cyc.s == 0 || cyc.s as usize > h {
                return Err(format!("p={p} {q}: s={} against class number {h}", cyc.s));
            }
            Ok(1)
        })
        .sum()
}

fn c6_contraction_anchor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases = 0;
    for p in [5u64, 7] {
        for m in [1u32, 2] {
            let ctx = ScalarCtx::new(p, m).unwrap();
            for _ in 0..200 {
                let q = Bqf::new(rng.gen_range(-500..500), rng.gen_range(-500..500), rng.gen_range(-500..500));
                let v = contract(&SymVector::from_form(ctx, &q), &DualQuadric::from(q)).map_err(|e| e.to_string())?;
                let want = (q.r as i128 * q.r as i128 - 4 * q.m as i128 * q.n as i128).rem_euclid(ctx.modulus() as i128) as u64;
                if v.coeffs() != [want] {
                    return Err(format!("{q} mod {p}^{m}: {:?} != {want}", v.coeffs()));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

/// M S M^T for S = [[s0, s1], [s1, s2]], as (00, 01, 11).
fn sandwich(a: [i64; 4], s: [i64; 3]) -> [i64; 3] {
    let [x, y, z, w] = a;
    let [s0, s1, s2] = s;
    [x * x * s0 + 2 * x * y * s1 + y * y * s2, x * z * s0 + (x * w + y * z) * s1 + y * w * s2, z * z * s0 + 2 * z * w * s1 + w * w * s2]
}

struct KernelScan {
    literal_cases: u64,
    shadow_cases: u64,
    first_counterexample: Option<String>,
    counterexamples: u64,
    unexplained: Option<String>,
}

/// Exhaustive over p in {5, 7}, j in {4, 6}, Q mod p with (D/p) = 1, rank <= 1 A mod p.
fn c7_scan() -> KernelScan {
    let mut scan = KernelScan { literal_cases: 0, shadow_cases: 0, first_counterexample: None, counterexamples: 0, unexplained: None };
    for p in [5i64, 7] {
        let ctx = ScalarCtx::new(p as u64, 1).unwrap();
        let mats: Vec<[i64; 4]> = (0..p.pow(4))
            .map(|i| [i % p, i / p % p, i / (p * p) % p, i / (p * p * p)])
            .filter(|[x, y, z, w]| (x * w - y * z) % p == 0)
            .collect();
        for j in [4usize, 6] {
            let d = j - 2;
            for code in 0..p.pow(3) {
                let (m, r, n) = (code % p, code / p % p, code / (p * p));
                if euler_legendre((r * r - 4 * m * n) as i128, p as u64) != 1 {
                    continue;
                }
                let qd = DualQuadric::from(Bqf::new(m, r, n));
                for &a in &mats {
                    if sandwich(a, [2 * m, r, 2 * n]).iter().any(|x| x % p != 0) {
                        continue;
                    }
                    let at = [a[0], a[2], a[1], a[3]];
                    let shadow = sandwich(at, [2 * n, -r, 2 * m]).iter().all(|x| x.rem_euclid(p) == 0);
                    let rho = RhoMatrix::from_entries(ctx, a.map(|x| x as i128), d);
                    for i in 0..=d {
                        scan.literal_cases += 1;
                        scan.shadow_cases += u64::from(shadow);
                        let v = contract(&rho.apply(&SymVector::basis(ctx, d, i)).unwrap(), &qd).unwrap();
                        if v.is_zero() {
                            continue;
                        }
                        let ce = format!("p={p}, j={j}, Q=({m},{r},{n}), A={a:?}, x=basis {i}: con = {:?}", v.coeffs());
                        scan.counterexamples += 1;
                        scan.first_counterexample.get_or_insert(ce.clone());
                        if shadow {
                            scan.unexplained.get_or_insert(ce);
                        }
                    }
                }
            }
        }
    }
    scan
}

fn c7_orbit_matrices() -> Outcome {
    let mut jobs = Vec::new();
    for p in [5u64, 7] {
        for q in (3..=300).flat_map(|d| reduced_of_disc(-d)) {
            if euler_legendre((q.1 * q.1 - 4 * q.0 * q.2) as i128, p) == 1 {
                jobs.push((p, q));
            }
        }
    }
    jobs.par_iter()
        .map(|&(p, (m, r, n))| {
            let ctx = ScalarCtx::new(p, 1).unwrap();
            let q = Bqf::new(m, r, n);
            let cyc = orbit_cycle(&q, p).map_err(|e| e.to_string())?;
            let mut cases = 0;
            for d in [2usize, 4] {
                for a in [cyc.a, cyc.b] {
                    let rho = RhoMatrix::new(ctx, &a, d);
                    for i in 0..=d {
                        cases += 1;
                        let v = contract(&rho.apply(&SymVector::basis(ctx, d, i)).unwrap(), &DualQuadric::from(q)).unwrap();
                        if !v.is_zero() {
                            return Err(format!("p={p} {q} {a:?} basis {i}"));
                        }
                    }
                }
            }
            Ok(cases)
        })
        .sum()
}

fn c8_root_data() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    for _ in 0..100 {
        let (al, be, t) = (rng.gen_range(-40..40), rng.gen_range(-40..40), rng.gen_range(-40..40));
        let mu = WeightGSp4::new(al, be, Rational64::new(rng.gen_range(-40..40), 2));
        let closed = [(al - t, -be - 2 - t), (be - 1 - t, -al - 3 - t), (-be - 3 - t, -al - 3 - t)];
        for (w, want) in [WeylElt::W1, WeylElt::W2, WeylElt::W3].into_iter().zip(closed) {
            let x = weyl_act(w, &mu, true);
            if (x.a - t, x.b - t) != want {
                return Err(format!("{w:?} on ({al},{be}), t={t}: ({},{}) != {want:?}", x.a - t, x.b - t));
            }
            cases += 1;
        }
    }
    for a in -10..=10i64 {
        for b in -10..=10i64 {
            let fam = (b == 2 && a >= 2) || (b == 3 - a && a >= 2) || (a == 1 && b <= 1);
            if (chamber_classify(a, b).class == WeightClass::Lds) != fam {
                return Err(format!("LDS classification at ({a},{b})"));
            }
            if (serre_dual_weight(a, b) == (a, b)) != (b == 3 - a) {
                return Err(format!("Serre fixed locus at ({a},{b})"));
            }
            cases += 2;
        }
    }
    Ok(cases)
}

/// dim M / mM computed from the generators.
fn tor0(m: &GroupRingModule) -> usize {
    let p = m.p();
    let dim = m.dim();
    // columns of (g - 1) for every generator, as rows of the transpose
    let mut rows = Vec::new();
    for g in m.gens() {
        for c in 0..dim {
            rows.push((0..dim).map(|r| (g[r][c] + p - u64::from(r == c)) % p).collect());
        }
    }
    dim - rank_mod_p(rows, p)
}

fn c9_defects() -> Outcome {
    let mut cases = 0;
    for p in [2u64, 3, 5, 7] {
        let examples = [
            (GroupRingModule::free(p, 1, 1, 1).unwrap(), 1),
            (GroupRingModule::trivial(p, 1, 1, 1).unwrap(), 0),
            (GroupRingModule::trivial(p, 1, 2, 1).unwrap(), -1),
        ];
        for (m, d) in examples {
            let t = m.tor_dims();
            let o = tor_dims_periodic(&m);
            if m.defect_balanced().d != d || t != o || t.t0 != tor0(&m) {
                return Err(format!("p={p}: expected defect {d}, got {t:?} (oracle {o:?})"));
            }
            cases += 1;
        }
    }
    let grid = [(2u64, 1u32, 1usize), (3, 1, 1), (5, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 2), (2, 1, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let (p, n, q) = grid[i % grid.len()];
        let m = random_balanced_module(p, n, q, 12, &mut rng).map_err(|e| e.to_string())?;
        let k = GroupRingModule::trivial(p, n, q, 1).unwrap();
        for x in [m.clone(), m.direct_sum(&k).unwrap()] {
            if x.tor_dims() != tor_dims_periodic(&x) || x.tor_dims().t0 != tor0(&x) {
                return Err(format!("({p},{n},{q}) dim {}: Tor mismatch", x.dim()));
            }
        }
        let pres = m.square_presentation().map_err(|e| format!("({p},{n},{q}): {e}"))?;
        if pres.relations.len() != pres.d {
            return Err(format!("({p},{n},{q}): {} relations for {} generators", pres.relations.len(), pres.d));
        }
        m.verify_presentation(&pres).map_err(|e| format!("({p},{n},{q}): {e}"))?;
        cases += 1;
    }
    Ok(cases)
}

fn c10_idempotents() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..200u64 {
        let p = [3u64, 5, 7][t as usize % 3];
        let m = 1 + (t / 3 % 3) as u32;
        let ctx = ScalarCtx::new(p, m).unwrap();
        let q = ctx.modulus();
        let n = rng.gen_range(1..=4usize);
        let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect();
        let a = MatrixModPM::new(ctx, rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()).unwrap();
        let (e, cert) = ordinary_idempotent(&a).map_err(|e| format!("trial {t}: {e}"))?;
        let e_rows = e.rows().to_vec();
        let a_rows = rows.clone();
        if mat_mul(&e_rows, &e_rows, q) != e_rows || mat_mul(&e_rows, &a_rows, q) != mat_mul(&a_rows, &e_rows, q) {
            return Err(format!("trial {t}: e not an idempotent commuting with A"));
        }
        // ((1 - e) A)^{nm} = 0
        let id: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        let one_minus: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| (id[i][j] + q - e_rows[i][j]) % q).collect()).collect();
        let rest = mat_mul(&one_minus, &a_rows, q);
        if mat_pow(&rest, (n as u64) * m as u64, q).iter().flatten().any(|&x| x != 0) || cert.nilpotency > n * m as usize {
            return Err(format!("trial {t}: (1 - e)A not nilpotent"));
        }
        // e is A^N for N a multiple of the exponent of GL_n(Z/p^m), past the nilpotent part
        let mut exp = 1u64;
        for i in 1..=n as u32 {
            let v = p.pow(i) - 1;
            exp = exp / gcd(exp as i64, v as i64) as u64 * v;
        }
        let mut pc = 1;
        while pc < n as u64 {
            pc *= p;
        }
        let big = exp * pc * p.pow(m - 1) * (n as u64 * m as u64 + 1);
        if mat_pow(&a_rows, big, q) != e_rows {
            return Err(format!("trial {t}: e differs from A^{big}"));
        }
    }
    Ok(200)
}

fn c11_elliptic_uv() -> Outcome {
    for t in 0..100u64 {
        let p = [3u64, 5, 7][t as usize % 3];
        let ctx = ScalarCtx::new(p, 2).unwrap();
        let f = random_elliptic(ctx, 2 + (t % 6) as i64, 40, 500 + t);
        let v = f.apply(EllipticOp::V).map_err(|e| e.to_string())?;
        // V by hand: a_n(Vf) = a_{n/p}(f), zero off multiples of p
        let by_hand: Vec<u64> = (0..=40 * p as usize).map(|n| if n % p as usize == 0 { f.coeffs()[n / p as usize] } else { 0 }).collect();
        if v.coeffs() != &by_hand[..] {
            return Err(format!("trial {t}: V"));
        }
        let uv = v.apply(EllipticOp::U).map_err(|e| e.to_string())?;
        if uv.coeffs() != f.coeffs() || uv != f {
            return Err(format!("trial {t}: UV f != f"));
        }
    }
    Ok(100)
}

fn c7_kernel() -> Vec<Line> {
    let t = Instant::now();
    let scan = c7_scan();
    let secs = t.elapsed().as_secs_f64();
    let literal = match &scan.first_counterexample {
        None => Ok(scan.literal_cases),
        Some(ce) => Err(format!("{} of {} cases nonzero, e.g. {ce}", scan.counterexamples, scan.literal_cases)),
    };
    let shadow = match &scan.unexplained {
        None => Ok(scan.shadow_cases),
        Some(ce) => Err(ce.clone()),
    };
    vec![
        Line { id: "7", name: "theta1 kernel: every rank<=1 A with AQA^T = 0 mod p", outcome: literal, secs },
        Line { id: "7b", name: "theta1 kernel: rank<=1 A with AQA^T = 0 and A^T adj(Q) A = 0 mod p", outcome: shadow, secs },
        run("7c", "theta1 kernel on the orbit matrices A, B", c7_orbit_matrices),
    ]
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    ("1", "formal identity Z2 = U Z", c1_z2_equals_uz),
    ("2", "Z2 X2 = 0 mod p", c2_z2x2_vanishes),
    ("3", "Q2 integral, = Z2 (+ X2 when j = 2) mod p", c3_q2_congruence),
    ("4", "neighbor counts and symmetry, |D| <= 500", c4_neighbor_laws),
    ("5", "orbit cycles A Q A^T = p^s Q, s <= h(D)", c5_orbit_cycles),
    ("6", "con(Q x Q^dual) = r^2 - 4mn", c6_contraction_anchor),
    ("8", "dot actions, LDS families, Serre fixed locus", c8_root_data),
    ("9", "defects, Tor oracle, square presentations", c9_defects),
    ("10", "ordinary idempotent certificates", c10_idempotents),
    ("11", "elliptic U V = Id", c11_elliptic_uv),
];

/// Optional arguments select criteria by number, e.g. `-- 1 7`.
fn main() {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| only.is_empty() || only.iter().any(|o| o == id);
    let mut lines = Vec::new();
    for (id, name, f) in CRITERIA {
        if id == "8" && wanted("7") {
            for l in c7_kernel() {
                report(&l);
                lines.push(l);
            }
        }
        if wanted(id) {
            let l = run(id, name, f);
            report(&l);
            lines.push(l);
        }
    }
    let literal_failed = lines.iter().any(|l| l.id == "7" && l.outcome.is_err());
    if literal_failed {
        println!("note: criterion 7 as literally stated is false; 7b and 7c check the statement for genuine similitudes");
    }
    let blocking: Vec<&str> = lines.iter().filter(|l| l.outcome.is_err() && l.id != "7").map(|l| l.id).collect();
    if !blocking.is_empty() {
        eprintln!("failed: {}", blocking.join(", "));
        std::process::exit(1);
    }
}
