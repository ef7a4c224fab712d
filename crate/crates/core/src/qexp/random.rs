//! Seeded test expansions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::elliptic::EllipticExpansion;
use super::expansion::{box_keys, in_box, CoeffSource, SiegelExpansion, Weight};
use crate::bqf::{act, reduce_form, Bqf, GL2Mat};
use crate::padic::ScalarCtx;
use crate::symrep::{rho_apply, SymVector};

/// A dense pseudo-random expansion whose coefficient at Q is derived from
/// (seed, Q) alone, so huge boxes never need to be stored.
#[derive(Clone, Copy, Debug)]
pub struct RandomSource {
    ctx: ScalarCtx,
    weight: Weight,
    precision: u64,
    seed: u64,
}

impl RandomSource {
    pub fn new(ctx: ScalarCtx, weight: Weight, precision: u64, seed: u64) -> Self {
        RandomSource { ctx, weight, precision, seed }
    }
}

fn key_seed(seed: u64, q: &Bqf) -> u64 {
    // splitmix64 finalizer over the packed key
    let mut z = seed
        ^ (q.m as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (q.r as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
        ^ (q.n as u64).wrapping_mul(0x1656_67b1_9e37_79f9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl CoeffSource for RandomSource {
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
        let d = self.weight.degree();
        if !in_box(q, self.precision) {
            return SymVector::zero(self.ctx, d);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(key_seed(self.seed, q));
        let xs: Vec<i128> = (0..=d).map(|_| rng.gen_range(0..self.ctx.modulus()) as i128).collect();
        SymVector::from_ints(self.ctx, &xs)
    }
}

/// A stored random expansion; each key is filled with probability `density`.
pub fn random_expansion(ctx: ScalarCtx, weight: Weight, precision: u64, seed: u64, density: f64) -> SiegelExpansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SiegelExpansion::new(ctx, weight, precision).expect("positive precision");
    for q in box_keys(precision) {
        if rng.gen_bool(density) {
            let xs: Vec<i128> = (0..=weight.degree()).map(|_| rng.gen_range(0..ctx.modulus()) as i128).collect();
            f.insert(q, SymVector::from_ints(ctx, &xs)).expect("key in box");
        }
    }
    f
}

/// SL2(Z)-stabilizer of a reduced definite form (entries are small).
pub fn stabilizer(q: &Bqf) -> Vec<GL2Mat> {
    let mut out = Vec::new();
    for a in -2..=2 {
        for b in -2..=2 {
            for c in -2..=2 {
                for d in -2..=2 {
                    let g = GL2Mat { a, b, c, d };
                    if g.det() == 1 && act(&g, q) == Some(*q) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// An expansion satisfying a(M.Q) = rho(M) a(Q) for all M in SL2(Z): pick a
/// random vector on each reduced form, average it over the stabilizer and
/// transport it along the reduction matrix. Zero on singular forms.
pub fn symmetrized_expansion(ctx: ScalarCtx, weight: Weight, precision: u64, seed: u64) -> SiegelExpansion {
    let d = weight.degree();
    let src = RandomSource::new(ctx, weight, u64::MAX / 4, seed);
    let mut f = SiegelExpansion::new(ctx, weight, precision).expect("positive precision");
    let mut cache = std::collections::HashMap::new();
    for q in box_keys(precision) {
        if !q.is_definite() {
            continue;
        }
        let (red, g) = reduce_form(&q).expect("definite");
        let base = cache
            .entry(red)
            .or_insert_with(|| {
                let v = src.coeff(&red);
                let mut acc = SymVector::zero(ctx, d);
                for h in stabilizer(&red) {
                    acc.add_assign(&rho_apply(&h, &v));
                }
                acc
            })
            .clone();
        // g.Q = red, so a(Q) = rho(g^{-1}) a(red)
        let gi = g.inverse_unimodular().expect("unimodular");
        f.insert(q, rho_apply(&gi, &base)).expect("key in box");
    }
    f
}

pub fn random_elliptic(ctx: ScalarCtx, weight: i64, precision: u64, seed: u64) -> EllipticExpansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..=precision).map(|_| rng.gen_range(0..ctx.modulus())).collect();
    let diamond = rng.gen_range(0..ctx.modulus());
    EllipticExpansion::new(ctx, weight, diamond, coeffs).expect("nonempty")
}
