//! Dense linear algebra over F_p. Matrices act on column vectors.

pub type Mat = Vec<Vec<u64>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![0; cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime
    let mut r = 1u128;
    let mut b = a as u128 % p as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u128;
        }
        b = b * b % p as u128;
        e >>= 1;
    }
    r as u64
}

pub fn mul(a: &Mat, b: &Mat, p: u64) -> Mat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter().zip(b).fold(0u128, |acc, (x, brow)| (acc + *x as u128 * brow[j] as u128) % p as u128)
                        as u64
                })
                .collect()
        })
        .collect()
}

pub fn apply(a: &Mat, v: &[u64], p: u64) -> Vec<u64> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(0u128, |acc, (x, y)| (acc + *x as u128 * *y as u128) % p as u128) as u64)
        .collect()
}

pub fn sub(a: &Mat, b: &Mat, p: u64) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x + p - y) % p).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat, p: u64) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x + y) % p).collect()).collect()
}

pub fn is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|&x| x == 0))
}

pub fn transpose(a: &Mat) -> Mat {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Reduced row echelon form of the rows; returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<u64>], p: u64) -> (Mat, Vec<usize>) {
    let mut m: Mat = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = ((*x as u128 + (p - f) as u128 * *y as u128) % p as u128) as u64;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    rref(rows, p).1.len()
}

/// Basis of {x : A x = 0}.
pub fn kernel(a: &Mat, ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let (r, pivots) = rref(a, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; ncols];
            v[f] = 1;
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = (p - row[f]) % p;
            }
            v
        })
        .collect()
}

/// A row-reduced basis of a subspace, used to reduce vectors modulo it.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub p: u64,
    pub ambient: usize,
    pub basis: Mat,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(vectors: &[Vec<u64>], ambient: usize, p: u64) -> Self {
        let (basis, pivots) = rref(vectors, p);
        Subspace { p, ambient, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The canonical representative of v + W: zero at every pivot column.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut v = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let f = v[pc];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = ((*x as u128 + (p - f) as u128 * *y as u128) % p as u128) as u64;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates outside the pivots: a basis of the quotient.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The class of v in ambient / W, in complement coordinates.
    pub fn quotient_coords(&self, v: &[u64]) -> Vec<u64> {
        let r = self.reduce(v);
        self.complement().into_iter().map(|c| r[c]).collect()
    }
}
