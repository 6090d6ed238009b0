//! Exact linear algebra over Q(zeta_N): dense matrices and subspaces in
//! reduced row echelon form.
//!
//! Subspace canonical form is RREF with leading coefficient 1, so equality
//! of subspaces is vector comparison of their bases.

use crate::error::{Error, Result};
use crate::scalar::CycloScalar;

pub type Vector = Vec<CycloScalar>;

pub fn vec_zero(n: usize, conductor: u32) -> Vector {
    vec![CycloScalar::zero(conductor); n]
}

pub fn vec_is_zero(v: &[CycloScalar]) -> bool {
    v.iter().all(|c| c.is_zero())
}

pub fn vec_add_scaled(dst: &mut [CycloScalar], src: &[CycloScalar], c: &CycloScalar) {
    if c.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = d.add(&s.mul(c));
        }
    }
}

/// Dense matrix acting on column vectors: `rows x cols`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    conductor: u32,
    data: Vec<CycloScalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, conductor: u32) -> Self {
        ExactMatrix {
            rows,
            cols,
            conductor,
            data: vec![CycloScalar::zero(conductor); rows * cols],
        }
    }

    pub fn identity(n: usize, conductor: u32) -> Self {
        let mut m = Self::zeros(n, n, conductor);
        for i in 0..n {
            m.set(i, i, CycloScalar::one(conductor));
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        conductor: u32,
        mut f: impl FnMut(usize, usize) -> CycloScalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix {
            rows,
            cols,
            conductor,
            data,
        }
    }

    pub fn from_rows(rows: Vec<Vector>, cols: usize, conductor: u32) -> Self {
        let mut m = Self::zeros(rows.len(), cols, conductor);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, c) in r.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        m
    }

    /// Matrix whose j-th column is `cols[j]`.
    pub fn from_cols(cols: Vec<Vector>, rows: usize, conductor: u32) -> Self {
        let mut m = Self::zeros(rows, cols.len(), conductor);
        for (j, c) in cols.into_iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, e) in c.into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CycloScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.conductor, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, v: &[CycloScalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::ShapeError(format!(
                "apply: {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec_zero(self.rows, self.conductor);
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..self.rows {
                let a = self.get(i, j);
                if !a.is_zero() {
                    out[i] = out[i].add(&a.mul(x));
                }
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeError(format!(
                "matmul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.conductor);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, cur);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; index convention (i1, i2) -> i1 * other.rows + i2.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(
            self.rows * other.rows,
            self.cols * other.cols,
            self.conductor,
        );
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        let b = other.get(i2, j2);
                        if !b.is_zero() {
                            out.set(
                                i1 * other.rows + i2,
                                j1 * other.cols + j2,
                                a.mul(b),
                            );
                        }
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeError("matrix addition shape".into()));
        }
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d = d.add(s);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            *d = d.mul(c);
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut sp = Subspace::zero(self.cols, self.conductor);
        for i in 0..self.rows {
            sp.insert(self.row(i).to_vec());
        }
        sp.dim()
    }

    /// Column span as a subspace of k^rows.
    pub fn image(&self) -> Subspace {
        let mut sp = Subspace::zero(self.rows, self.conductor);
        for j in 0..self.cols {
            sp.insert(self.col(j));
        }
        sp
    }

    /// Null space {v : Mv = 0}, with the rank-nullity identity asserted.
    pub fn kernel(&self) -> Subspace {
        let (rref, pivots) = self.rref();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec_zero(self.cols, self.conductor);
            v[free] = CycloScalar::one(self.conductor);
            for &(r, c) in &pivots {
                v[c] = rref.get(r, free).neg();
            }
            basis.push(v);
        }
        let nullity = basis.len();
        let rank = pivot_cols.len();
        assert_eq!(
            rank + nullity,
            self.cols,
            "rank-nullity violated: bug in elimination"
        );
        Subspace::from_vectors(basis, self.cols, self.conductor)
    }

    /// Reduced row echelon form together with (row, col) pivot positions.
    fn rref(&self) -> (Self, Vec<(usize, usize)>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r >= m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot nonzero");
            for j in 0..m.cols {
                if !m.get(r, j).is_zero() {
                    m.set(r, j, m.get(r, j).mul(&inv));
                }
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        if m.get(r, j).is_zero() {
                            continue;
                        }
                        let nv = m.get(i, j).sub(&f.mul(m.get(r, j)));
                        m.set(i, j, nv);
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        (m, pivots)
    }

    /// Particular solution of Mx = b, or None when inconsistent.
    pub fn solve(&self, b: &[CycloScalar]) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(Error::ShapeError("solve: rhs length".into()));
        }
        let mut aug = ExactMatrix::zeros(self.rows, self.cols + 1, self.conductor);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (rref, pivots) = aug.rref();
        if pivots.iter().any(|&(_, c)| c == self.cols) {
            // pivot in the augmented column: inconsistent
            return Ok(None);
        }
        let mut x = vec_zero(self.cols, self.conductor);
        for &(r, c) in &pivots {
            x[c] = rref.get(r, self.cols).clone();
        }
        Ok(Some(x))
    }
}

impl std::fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.get(i, j).to_poly_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A subspace of k^n held as a reduced row echelon basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    conductor: u32,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize, conductor: u32) -> Self {
        Subspace {
            ambient,
            conductor,
            basis: vec![],
            pivots: vec![],
        }
    }

    pub fn full(ambient: usize, conductor: u32) -> Self {
        let mut s = Self::zero(ambient, conductor);
        for i in 0..ambient {
            let mut v = vec_zero(ambient, conductor);
            v[i] = CycloScalar::one(conductor);
            s.basis.push(v);
            s.pivots.push(i);
        }
        s
    }

    pub fn from_vectors(vs: Vec<Vector>, ambient: usize, conductor: u32) -> Self {
        let mut s = Self::zero(ambient, conductor);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Residual of v after reduction against the echelon basis. Zero iff
    /// v lies in the subspace.
    pub fn reduce(&self, v: &[CycloScalar]) -> Vector {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let c = w[p].neg();
                vec_add_scaled(&mut w, row, &c);
            }
        }
        w
    }

    pub fn contains(&self, v: &[CycloScalar]) -> bool {
        vec_is_zero(&self.reduce(v))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Insert a vector, keeping RREF canonical form. Returns true when the
    /// dimension grew.
    pub fn insert(&mut self, v: Vector) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut w = self.reduce(&v);
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("leading coefficient nonzero");
        for c in w.iter_mut() {
            if !c.is_zero() {
                *c = c.mul(&inv);
            }
        }
        // back-substitute into existing rows
        for row in self.basis.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].neg();
                vec_add_scaled(row, &w, &c);
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&q| q > p)
            .unwrap_or(self.pivots.len());
        self.basis.insert(at, w);
        self.pivots.insert(at, p);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v.clone());
        }
        s
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        // Columns: basis of self, then negated basis of other. Kernel
        // vectors give coefficients of common elements.
        let d1 = self.dim();
        let d2 = other.dim();
        if d1 == 0 || d2 == 0 {
            return Subspace::zero(self.ambient, self.conductor);
        }
        let m = ExactMatrix::from_fn(self.ambient, d1 + d2, self.conductor, |i, j| {
            if j < d1 {
                self.basis[j][i].clone()
            } else {
                other.basis[j - d1][i].neg()
            }
        });
        let ker = m.kernel();
        let mut out = Subspace::zero(self.ambient, self.conductor);
        for coef in ker.basis() {
            let mut v = vec_zero(self.ambient, self.conductor);
            for (j, row) in self.basis.iter().enumerate() {
                vec_add_scaled(&mut v, row, &coef[j]);
            }
            out.insert(v);
        }
        out
    }

    /// Matrix of the quotient map k^n -> k^n / self, written in the
    /// coordinates of the non-pivot positions.
    pub fn quotient_matrix(&self) -> ExactMatrix {
        let n = self.ambient;
        let free: Vec<usize> = (0..n).filter(|j| !self.pivots.contains(j)).collect();
        ExactMatrix::from_fn(free.len(), n, self.conductor, |r, c| {
            let j = free[r];
            if c == j {
                CycloScalar::one(self.conductor)
            } else if let Some(k) = self.pivots.iter().position(|&p| p == c) {
                self.basis[k][j].neg()
            } else {
                CycloScalar::zero(self.conductor)
            }
        })
    }
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Subspace dim {} of k^{} [", self.dim(), self.ambient)?;
        for row in &self.basis {
            let r: Vec<String> = row.iter().map(|c| c.to_poly_string()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Preimage {v : Mv in W}, canonical echelon result.
pub fn preimage(map: &ExactMatrix, w: &Subspace) -> Result<Subspace> {
    if map.rows() != w.ambient() {
        return Err(Error::ShapeError(format!(
            "preimage: map has {} rows, subspace ambient is {}",
            map.rows(),
            w.ambient()
        )));
    }
    // Reduce each image column modulo W; the kernel of the residual matrix
    // is exactly the preimage.
    let cols: Vec<Vector> = (0..map.cols()).map(|j| w.reduce(&map.col(j))).collect();
    let residual = ExactMatrix::from_cols(cols, map.rows(), map.conductor());
    Ok(residual.kernel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num_bigint::BigInt;

    fn s(n: i64) -> CycloScalar {
        CycloScalar::from_int(1, n)
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let id = ExactMatrix::identity(3, 1);
        assert_eq!(id.kernel().dim(), 0);
    }

    #[test]
    fn kernel_of_ones_matrix() {
        // [[1,1],[1,1]] over Q has kernel spanned by (1,-1)
        let m = ExactMatrix::from_rows(vec![vec![s(1), s(1)], vec![s(1), s(1)]], 2, 1);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        // canonical form has leading 1
        assert_eq!(k.basis()[0][0], s(1));
        assert_eq!(k.basis()[0][1], s(-1));
    }

    #[test]
    fn preimage_of_full_space_is_full() {
        let m = ExactMatrix::from_rows(vec![vec![s(2), s(3)], vec![s(0), s(0)]], 2, 1);
        let w = Subspace::full(2, 1);
        assert!(preimage(&m, &w).unwrap().is_full());
    }

    #[test]
    fn preimage_matches_definition() {
        // map (x,y,z) -> (x+y, z); W = span{(1,0)}; preimage = {z = 0}
        let m = ExactMatrix::from_rows(
            vec![vec![s(1), s(1), s(0)], vec![s(0), s(0), s(1)]],
            3,
            1,
        );
        let w = Subspace::from_vectors(vec![vec![s(1), s(0)]], 2, 1);
        let p = preimage(&m, &w).unwrap();
        assert_eq!(p.dim(), 2);
        assert!(p.contains(&[s(1), s(0), s(0)]));
        assert!(p.contains(&[s(0), s(1), s(0)]));
        assert!(!p.contains(&[s(0), s(0), s(1)]));
    }

    #[test]
    fn echelon_canonical_under_permutation() {
        let v1 = vec![s(1), s(2), s(3)];
        let v2 = vec![s(0), s(1), s(5)];
        let v3 = vec![s(1), s(3), s(8)];
        let a = Subspace::from_vectors(vec![v1.clone(), v2.clone(), v3.clone()], 3, 1);
        let b = Subspace::from_vectors(vec![v3, v1, v2], 3, 1);
        assert_eq!(a, b);
    }

    #[test]
    fn sum_and_intersection() {
        let x = Subspace::from_vectors(vec![vec![s(1), s(0), s(0)], vec![s(0), s(1), s(0)]], 3, 1);
        let y = Subspace::from_vectors(vec![vec![s(0), s(1), s(0)], vec![s(0), s(0), s(1)]], 3, 1);
        assert!(x.sum(&y).is_full());
        let i = x.intersect(&y);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[s(0), s(1), s(0)]));
    }

    #[test]
    fn quotient_matrix_kills_subspace() {
        let w = Subspace::from_vectors(
            vec![vec![s(1), s(2), s(0)], vec![s(0), s(0), s(1)]],
            3,
            1,
        );
        let q = w.quotient_matrix();
        assert_eq!(q.rows(), 1);
        for b in w.basis() {
            assert!(vec_is_zero(&q.apply(b).unwrap()));
        }
        // and does not kill a complement vector
        assert!(!vec_is_zero(&q.apply(&[s(0), s(1), s(0)]).unwrap()));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = ExactMatrix::from_rows(vec![vec![s(1), s(1)], vec![s(2), s(2)]], 2, 1);
        let sol = m.solve(&[s(3), s(6)]).unwrap().unwrap();
        let back = m.apply(&sol).unwrap();
        assert_eq!(back, vec![s(3), s(6)]);
        assert!(m.solve(&[s(3), s(5)]).unwrap().is_none());
    }

    #[test]
    fn preimage_image_round_trip_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let m = ExactMatrix::from_fn(rows, cols, 1, |_, _| {
                CycloScalar::from_rational(
                    1,
                    Rat::new(BigInt::from(rng.gen_range(-3i64..=3)), BigInt::from(1)),
                )
            });
            let wdim = rng.gen_range(0..=rows);
            let w = Subspace::from_vectors(
                (0..wdim)
                    .map(|_| {
                        (0..rows)
                            .map(|_| CycloScalar::from_int(1, rng.gen_range(-2i64..=2)))
                            .collect()
                    })
                    .collect(),
                rows,
                1,
            );
            let p = preimage(&m, &w).unwrap();
            // f(preimage(f, W)) is contained in W
            for b in p.basis() {
                let img = m.apply(b).unwrap();
                assert!(w.contains(&img));
            }
        }
    }
}
