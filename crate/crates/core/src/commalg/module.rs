//! Finite modules over S = k[(Z/p^N)^q] = k[t_1..t_q]/(t_i^{p^N}), t_i = g_i - 1.
//!
//! Elements of the free module S^r are stored as vectors of length r * |S| in the
//! monomial basis t^alpha e_j, with index j * |S| + sum alpha_i L^i and L = p^N.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{self, Mat, Subspace};
use crate::error::{Error, Result};
use crate::padic::is_prime;

/// Largest group ring we are willing to expand densely.
pub const MAX_RING_DIM: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingModule {
    p: u64,
    n: u32,
    q: usize,
    dim: usize,
    gens: Vec<Mat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorDims {
    pub t0: usize,
    pub t1: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defect {
    pub d: i64,
    pub balanced: bool,
}

/// S^d -> S^d -> M -> 0. Column j of the relation matrix is `relations[j]`,
/// an element of S^d in the monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarePresentation {
    pub d: usize,
    pub ring_dim: usize,
    pub relations: Vec<Vec<u64>>,
}

impl SquarePresentation {
    /// Entry (row a, column j) as a group ring element.
    pub fn entry(&self, a: usize, j: usize) -> &[u64] {
        &self.relations[j][a * self.ring_dim..(a + 1) * self.ring_dim]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coinvariants {
    pub dim: usize,
    /// dim x M.dim matrix of the quotient map M -> M / mM.
    pub projection: Mat,
}

struct Cover {
    t0: usize,
    phi: Mat,
    kernel: Vec<Vec<u64>>,
}

impl GroupRingModule {
    pub fn new(p: u64, n: u32, q: usize, gens: Vec<Mat>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidModule(format!("{p} is not prime")));
        }
        if n == 0 || q == 0 {
            return Err(Error::InvalidModule("need N >= 1 and q >= 1".into()));
        }
        let ring = (p as u128).checked_pow(n * q as u32).filter(|&s| s <= MAX_RING_DIM as u128);
        if ring.is_none() {
            return Err(Error::InvalidModule(format!("group ring of dimension {p}^{} is too large", n as usize * q)));
        }
        if gens.len() != q {
            return Err(Error::InvalidModule(format!("expected {q} generators, found {}", gens.len())));
        }
        let dim = gens[0].len();
        for g in &gens {
            if g.len() != dim || g.iter().any(|r| r.len() != dim) {
                return Err(Error::InvalidModule("generators must be square of equal size".into()));
            }
        }
        let gens: Vec<Mat> = gens.into_iter().map(|g| g.into_iter().map(|r| r.into_iter().map(|x| x % p).collect()).collect()).collect();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if linalg::mul(a, b, p) != linalg::mul(b, a, p) {
                    return Err(Error::InvalidModule("generators do not commute".into()));
                }
            }
        }
        let m = GroupRingModule { p, n, q, dim, gens };
        let l = m.order();
        for (i, t) in m.t_mats().iter().enumerate() {
            let mut pw = linalg::identity(dim);
            for _ in 0..l {
                pw = linalg::mul(&pw, t, p);
            }
            if !linalg::is_zero(&pw) {
                return Err(Error::InvalidModule(format!("generator {i} does not have order dividing {p}^{n}")));
            }
        }
        Ok(m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn gens(&self) -> &[Mat] {
        &self.gens
    }

    /// L = p^N.
    pub fn order(&self) -> usize {
        self.p.pow(self.n) as usize
    }

    /// dim_k S = L^q.
    pub fn ring_dim(&self) -> usize {
        self.order().pow(self.q as u32)
    }

    pub fn t_mats(&self) -> Vec<Mat> {
        let id = linalg::identity(self.dim);
        self.gens.iter().map(|g| linalg::sub(g, &id, self.p)).collect()
    }

    /// The regular representation S^rank.
    pub fn free(p: u64, n: u32, q: usize, rank: usize) -> Result<Self> {
        let shape = RingShape::new(p, n, q)?;
        let size = rank * shape.size;
        let gens = (0..q)
            .map(|i| {
                let mut g = linalg::identity(size);
                for col in 0..size {
                    let v = shape.basis(rank, col);
                    let tv = shape.mul_t(i, &v, rank);
                    for (row, x) in tv.iter().enumerate() {
                        g[row][col] = (g[row][col] + x) % p;
                    }
                }
                g
            })
            .collect();
        Self::new(p, n, q, gens)
    }

    /// k^dim with trivial action.
    pub fn trivial(p: u64, n: u32, q: usize, dim: usize) -> Result<Self> {
        Self::new(p, n, q, vec![linalg::identity(dim); q])
    }

    /// S^rank modulo the S-submodule generated by `rels`.
    pub fn quotient_of_free(p: u64, n: u32, q: usize, rank: usize, rels: &[Vec<u64>]) -> Result<Self> {
        let shape = RingShape::new(p, n, q)?;
        let ambient = rank * shape.size;
        if rels.iter().any(|r| r.len() != ambient) {
            return Err(Error::InvalidModule("relation has the wrong length".into()));
        }
        let w = Subspace::span(&shape.s_span(rels, rank), ambient, p);
        let comp = w.complement();
        let gens = (0..q)
            .map(|i| {
                let mut g = linalg::zeros(comp.len(), comp.len());
                for (col, &c) in comp.iter().enumerate() {
                    let mut v = shape.basis(rank, c);
                    let tv = shape.mul_t(i, &v, rank);
                    for (x, y) in v.iter_mut().zip(tv) {
                        *x = (*x + y) % p;
                    }
                    for (row, x) in w.quotient_coords(&v).into_iter().enumerate() {
                        g[row][col] = x;
                    }
                }
                g
            })
            .collect();
        if comp.is_empty() {
            return Self::new(p, n, q, vec![vec![]; q]);
        }
        Self::new(p, n, q, gens)
    }

    pub fn direct_sum(&self, o: &GroupRingModule) -> Result<Self> {
        if (self.p, self.n, self.q) != (o.p, o.n, o.q) {
            return Err(Error::InvalidModule("direct sum over different rings".into()));
        }
        let d = self.dim + o.dim;
        let gens = self
            .gens
            .iter()
            .zip(&o.gens)
            .map(|(a, b)| {
                let mut g = linalg::zeros(d, d);
                for i in 0..self.dim {
                    g[i][..self.dim].copy_from_slice(&a[i]);
                }
                for i in 0..o.dim {
                    g[self.dim + i][self.dim..].copy_from_slice(&b[i]);
                }
                g
            })
            .collect();
        Self::new(self.p, self.n, self.q, gens)
    }

    fn shape(&self) -> RingShape {
        RingShape::new(self.p, self.n, self.q).expect("validated")
    }

    fn m_submodule(&self) -> Subspace {
        let mut vecs = Vec::new();
        for t in self.t_mats() {
            vecs.extend(linalg::transpose(&t));
        }
        Subspace::span(&vecs, self.dim, self.p)
    }

    fn cover(&self) -> Cover {
        let p = self.p;
        let shape = self.shape();
        let mm = self.m_submodule();
        let lifts: Vec<Vec<u64>> = mm
            .complement()
            .into_iter()
            .map(|c| {
                let mut v = vec![0; self.dim];
                v[c] = 1;
                v
            })
            .collect();
        let t0 = lifts.len();
        let ts = self.t_mats();
        // phi(t^alpha e_j) = prod t_i^{alpha_i} m_j, built from the monomial with
        // the first nonzero exponent lowered by one
        let cols = t0 * shape.size;
        let mut images: Vec<Vec<u64>> = vec![Vec::new(); cols];
        for (j, m) in lifts.iter().enumerate() {
            for idx in 0..shape.size {
                let alpha = shape.exponents(idx);
                let img = match alpha.iter().position(|&a| a > 0) {
                    None => m.clone(),
                    Some(i) => {
                        let prev = idx - shape.stride(i);
                        linalg::apply(&ts[i], &images[j * shape.size + prev], p)
                    }
                };
                images[j * shape.size + idx] = img;
            }
        }
        let phi = linalg::transpose(&images);
        let phi = if phi.is_empty() { vec![vec![0; cols]; self.dim] } else { phi };
        let kernel = linalg::kernel(&phi, cols, p);
        Cover { t0, phi, kernel }
    }

    pub fn tor_dims(&self) -> TorDims {
        let cover = self.cover();
        let shape = self.shape();
        let mk: Vec<Vec<u64>> =
            (0..self.q).flat_map(|i| cover.kernel.iter().map(move |k| (i, k))).map(|(i, k)| shape.mul_t(i, k, cover.t0)).collect();
        let t1 = cover.kernel.len() - linalg::rank(&mk, self.p);
        TorDims { t0: cover.t0, t1 }
    }

    pub fn defect_balanced(&self) -> Defect {
        let t = self.tor_dims();
        let d = t.t0 as i64 - t.t1 as i64;
        Defect { d, balanced: d >= 0 }
    }

    pub fn coinvariants(&self) -> Coinvariants {
        let mm = self.m_submodule();
        let dim = self.dim - mm.dim();
        let mut projection = linalg::zeros(dim, self.dim);
        for b in 0..self.dim {
            let mut e = vec![0; self.dim];
            e[b] = 1;
            for (row, x) in mm.quotient_coords(&e).into_iter().enumerate() {
                projection[row][b] = x;
            }
        }
        Coinvariants { dim, projection }
    }

    pub fn square_presentation(&self) -> Result<SquarePresentation> {
        let def = self.defect_balanced();
        if !def.balanced {
            return Err(Error::NotBalanced(def.d));
        }
        let cover = self.cover();
        let shape = self.shape();
        let d = cover.t0;
        let mk: Vec<Vec<u64>> =
            (0..self.q).flat_map(|i| cover.kernel.iter().map(move |k| (i, k))).map(|(i, k)| shape.mul_t(i, k, d)).collect();
        let mut chosen = mk;
        let mut relations = Vec::new();
        let base = linalg::rank(&chosen, self.p);
        for k in &cover.kernel {
            chosen.push(k.clone());
            if linalg::rank(&chosen, self.p) > base + relations.len() {
                relations.push(k.clone());
            } else {
                chosen.pop();
            }
        }
        relations.resize(d, vec![0; d * shape.size]);
        let pres = SquarePresentation { d, ring_dim: shape.size, relations };
        self.verify_presentation(&pres)?;
        Ok(pres)
    }

    /// Checks that S^d / (relations) maps isomorphically onto M under the
    /// minimal cover, compatibly with every generator.
    pub fn verify_presentation(&self, pres: &SquarePresentation) -> Result<()> {
        let p = self.p;
        let shape = self.shape();
        let cover = self.cover();
        let d = pres.d;
        if d != cover.t0 || pres.relations.len() != d {
            return Err(Error::InvalidModule("presentation has the wrong size".into()));
        }
        let bad = |s: &str| Err(Error::InvalidModule(format!("presentation check failed: {s}")));
        let image = Subspace::span(&shape.s_span(&pres.relations, d), d * shape.size, p);
        for v in &image.basis {
            if linalg::apply(&cover.phi, v, p).iter().any(|&x| x != 0) {
                return bad("relation not in the kernel");
            }
        }
        let comp = image.complement();
        if comp.len() != self.dim {
            return bad("cokernel dimension");
        }
        // psi: coker -> M on the complement basis
        let basis: Vec<Vec<u64>> = comp.iter().map(|&c| shape.basis(d, c)).collect();
        let psi = linalg::transpose(&basis.iter().map(|v| linalg::apply(&cover.phi, v, p)).collect::<Vec<_>>());
        if self.dim > 0 && linalg::rank(&psi, p) != self.dim {
            return bad("induced map is not bijective");
        }
        for (i, t) in self.t_mats().iter().enumerate() {
            let act: Vec<Vec<u64>> = basis.iter().map(|v| image.quotient_coords(&shape.mul_t(i, v, d))).collect();
            let act = linalg::transpose(&act);
            if self.dim > 0 && linalg::mul(&psi, &act, p) != linalg::mul(t, &psi, p) {
                return bad("generator actions differ");
            }
        }
        Ok(())
    }
}

/// dim Tor_0 and dim Tor_1 from the tensor product of the periodic resolutions
/// ... -> S --t^{L-1}--> S --t--> S -> k of each factor k[t_i]/(t_i^L),
/// using Tor^S(M, k) = Tor^S(k, M).
pub fn tor_dims_periodic(m: &GroupRingModule) -> TorDims {
    let (p, dim, q) = (m.p, m.dim, m.q);
    let l = m.order();
    let ts = m.t_mats();
    // d1 : M^q -> M
    let mut d1 = linalg::zeros(dim, q * dim);
    for (i, t) in ts.iter().enumerate() {
        for r in 0..dim {
            d1[r][i * dim..(i + 1) * dim].copy_from_slice(&t[r]);
        }
    }
    // d2 : M^{q + q(q-1)/2} -> M^q, written as a list of column blocks
    let mut blocks: Vec<Mat> = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        let mut pw = linalg::identity(dim);
        for _ in 0..l - 1 {
            pw = linalg::mul(&pw, t, p);
        }
        let mut b = linalg::zeros(q * dim, dim);
        for r in 0..dim {
            b[i * dim + r].copy_from_slice(&pw[r]);
        }
        blocks.push(b);
    }
    for i in 0..q {
        for j in i + 1..q {
            let mut b = linalg::zeros(q * dim, dim);
            for r in 0..dim {
                b[j * dim + r].copy_from_slice(&ts[i][r]);
                b[i * dim + r] = ts[j][r].iter().map(|&x| (p - x) % p).collect();
            }
            blocks.push(b);
        }
    }
    let d2_cols: Vec<Vec<u64>> = blocks.iter().flat_map(linalg::transpose).collect();
    let r1 = linalg::rank(&d1, p);
    let r2 = linalg::rank(&d2_cols, p);
    TorDims { t0: dim - r1, t1: q * dim - r1 - r2 }
}

/// Index bookkeeping for the monomial basis of S and S^r.
#[derive(Clone, Copy, Debug)]
struct RingShape {
    p: u64,
    l: usize,
    q: usize,
    size: usize,
}

impl RingShape {
    fn new(p: u64, n: u32, q: usize) -> Result<Self> {
        let l = (p as usize).checked_pow(n).ok_or_else(|| Error::InvalidModule("order overflow".into()))?;
        let size = l.checked_pow(q as u32).filter(|&s| s as u64 <= MAX_RING_DIM);
        let size = size.ok_or_else(|| Error::InvalidModule("group ring too large".into()))?;
        Ok(RingShape { p, l, q, size })
    }

    fn stride(&self, i: usize) -> usize {
        self.l.pow(i as u32)
    }

    fn exponents(&self, mut idx: usize) -> Vec<usize> {
        (0..self.q)
            .map(|_| {
                let a = idx % self.l;
                idx /= self.l;
                a
            })
            .collect()
    }

    fn basis(&self, rank: usize, c: usize) -> Vec<u64> {
        let mut v = vec![0; rank * self.size];
        v[c] = 1;
        v
    }

    /// t_i * v in S^rank.
    fn mul_t(&self, i: usize, v: &[u64], rank: usize) -> Vec<u64> {
        let mut out = vec![0; rank * self.size];
        let st = self.stride(i);
        for j in 0..rank {
            for idx in 0..self.size {
                let x = v[j * self.size + idx];
                if x != 0 && (idx / st) % self.l + 1 < self.l {
                    out[j * self.size + idx + st] = x;
                }
            }
        }
        out
    }

    /// A k-spanning set of the S-submodule generated by `gens`.
    fn s_span(&self, gens: &[Vec<u64>], rank: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for g in gens {
            let mut layer = vec![g.clone()];
            for idx in 0..self.size {
                if idx == 0 {
                    continue;
                }
                let alpha = self.exponents(idx);
                let i = alpha.iter().position(|&a| a > 0).expect("nonzero monomial");
                let prev = layer[idx - self.stride(i)].clone();
                layer.push(self.mul_t(i, &prev, rank));
            }
            out.extend(layer.into_iter().filter(|v| v.iter().any(|&x| x != 0)));
        }
        let _ = self.p;
        out
    }
}

/// Random element of m S^rank (zero constant terms).
pub fn random_relation<R: Rng>(p: u64, n: u32, q: usize, rank: usize, rng: &mut R) -> Result<Vec<u64>> {
    let shape = RingShape::new(p, n, q)?;
    Ok((0..rank * shape.size).map(|i| if i % shape.size == 0 { 0 } else { rng.gen_range(0..p) }).collect())
}

/// A nonzero balanced quotient S^r / (x_1..x_s) of k-dimension at most `max_dim`.
pub fn random_balanced_module<R: Rng>(p: u64, n: u32, q: usize, max_dim: usize, rng: &mut R) -> Result<GroupRingModule> {
    for _ in 0..10_000 {
        let rank = rng.gen_range(1..=2);
        let nrels = rng.gen_range(0..=rank + 1);
        let rels = (0..nrels).map(|_| random_relation(p, n, q, rank, rng)).collect::<Result<Vec<_>>>()?;
        let m = GroupRingModule::quotient_of_free(p, n, q, rank, &rels)?;
        if m.dim() > 0 && m.dim() <= max_dim && m.defect_balanced().balanced {
            return Ok(m);
        }
    }
    Err(Error::InvalidModule(format!("no small balanced module found over ({p},{n},{q})")))
}

/// Finite shape of the hypotheses of the patching criterion at one level N.
/// `r_ops` are the images of the variables of R_inf acting on H_N, `kernel_ops`
/// images of generators of ker(phi_N), `h_ops` the same variables acting on H,
/// and `psi` a candidate isomorphism from the coinvariants of H_N to H.
#[derive(Clone, Debug)]
pub struct PatchingLevel {
    pub module: GroupRingModule,
    pub r_ops: Vec<Mat>,
    pub kernel_ops: Vec<Mat>,
    pub h_ops: Vec<Mat>,
    pub psi: Mat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchingReport {
    pub image_condition: bool,
    pub coinvariants_condition: bool,
    pub balanced_condition: bool,
}

impl PatchingReport {
    pub fn all(&self) -> bool {
        self.image_condition && self.coinvariants_condition && self.balanced_condition
    }
}

fn flatten(m: &Mat) -> Vec<u64> {
    m.iter().flatten().copied().collect()
}

/// k-span of the unital algebra generated by `ops`.
fn algebra_span(ops: &[Mat], dim: usize, p: u64) -> Vec<Mat> {
    let mut basis = vec![linalg::identity(dim)];
    let mut span = Subspace::span(&[flatten(&basis[0])], dim * dim, p);
    let mut i = 0;
    while i < basis.len() {
        for o in ops {
            let prod = linalg::mul(o, &basis[i], p);
            if !span.contains(&flatten(&prod)) {
                let mut vecs = span.basis.clone();
                vecs.push(flatten(&prod));
                span = Subspace::span(&vecs, dim * dim, p);
                basis.push(prod);
            }
        }
        i += 1;
    }
    basis
}

pub fn check_patching_level(level: &PatchingLevel) -> PatchingReport {
    let m = &level.module;
    let (p, dim) = (m.p(), m.dim());
    let algebra = algebra_span(&level.r_ops, dim, p);
    let commute = level
        .r_ops
        .iter()
        .chain(&level.kernel_ops)
        .all(|o| m.gens().iter().all(|g| linalg::mul(o, g, p) == linalg::mul(g, o, p)));
    let ideal: Vec<Vec<u64>> =
        algebra.iter().flat_map(|a| level.kernel_ops.iter().map(move |k| flatten(&linalg::mul(a, k, p)))).collect();
    let ideal = Subspace::span(&ideal, dim * dim, p);
    let all_r: Vec<Vec<u64>> = algebra.iter().map(flatten).collect();
    let r_image = Subspace::span(&all_r, dim * dim, p);
    let ts = m.t_mats();
    let kernel_in_r = level.kernel_ops.iter().all(|k| r_image.contains(&flatten(k)));
    let image_condition = commute && kernel_in_r && ts.iter().all(|t| ideal.contains(&flatten(t)));

    let co = m.coinvariants();
    let hdim = level.psi.len();
    let coinvariants_condition = co.dim == hdim
        && level.h_ops.len() == level.r_ops.len()
        && (hdim == 0
            || (level.psi.iter().all(|r| r.len() == co.dim)
                && linalg::rank(&level.psi, p) == hdim
                && level.r_ops.iter().zip(&level.h_ops).all(|(x, hx)| {
                    let lhs = linalg::mul(&linalg::mul(&level.psi, &co.projection, p), x, p);
                    let rhs = linalg::mul(hx, &linalg::mul(&level.psi, &co.projection, p), p);
                    lhs == rhs
                })));
    PatchingReport { image_condition, coinvariants_condition, balanced_condition: m.defect_balanced().balanced }
}
