//! Dense complex matrices, Kronecker products and site embedding.
//!
//! Site convention: for an `N`-site space, site 1 is the rightmost Kronecker
//! factor and site `N` the leftmost, so `L_N ... L_1` reads in written order.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix from {} entries",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn scalar(n: usize, z: C64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, z) in d.iter().enumerate() {
            m.data[i * n + i] = *z;
        }
        m
    }

    /// Builds a matrix from equal-length rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let nr = rows.len();
        let nc = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(nr * nc);
        for row in rows {
            assert_eq!(row.as_ref().len(), nc, "ragged rows");
            data.extend_from_slice(row.as_ref());
        }
        Self {
            rows: nr,
            cols: nc,
            data,
        }
    }

    pub fn m2(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![a, b, c, d],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(self.mismatch(other, "add"));
        }
        Ok(self + other)
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(self.mismatch(other, "multiply"));
        }
        Ok(self.matmul(other))
    }

    fn mismatch(&self, other: &Self, op: &str) -> Error {
        Error::DimensionMismatch(format!(
            "cannot {op} {}x{} and {}x{}",
            self.rows, self.cols, other.rows, other.cols
        ))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let orow = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * p..(k + 1) * p];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: p,
            data: out,
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Sub-block `[r0, r0+nr) x [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let mut out = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.data[i * nc + j] = self.get(r0 + i, c0 + j);
            }
        }
        out
    }

    /// Assembles `[[a, b], [c, d]]` from four equal square blocks.
    pub fn from_blocks(b: &[[CMatrix; 2]; 2]) -> Self {
        let n = b[0][0].rows;
        let mut out = Self::zeros(2 * n, 2 * n);
        for (bi, row) in b.iter().enumerate() {
            for (bj, m) in row.iter().enumerate() {
                assert_eq!(m.rows, n);
                for i in 0..n {
                    for j in 0..n {
                        out.set(bi * n + i, bj * n + j, m.get(i, j));
                    }
                }
            }
        }
        out
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Self { rows, cols, data }
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let inv = self
            .to_nalgebra()
            .try_inverse()
            .ok_or_else(|| Error::Singular("matrix inverse".into()))?;
        let out = Self::from_nalgebra(&inv);
        if !out.is_finite() {
            return Err(Error::Singular("matrix inverse".into()));
        }
        Ok(out)
    }

    /// Solves `self * x = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let lu = self.to_nalgebra().lu();
        let x = lu
            .solve(&rhs.to_nalgebra())
            .ok_or_else(|| Error::Singular("linear solve".into()))?;
        Ok(Self::from_nalgebra(&x))
    }

    /// All eigenvalues via complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "eigenvalues of non-square matrix".into(),
            ));
        }
        let schur = nalgebra::linalg::Schur::try_new(self.to_nalgebra(), 1e-14, 10_000)
            .ok_or_else(|| {
                Error::NoConvergence(format!(
                    "Schur iteration on {}x{} matrix (norm {:.3e})",
                    self.rows,
                    self.cols,
                    self.norm()
                ))
            })?;
        let (_, t) = schur.unpack();
        Ok((0..self.rows).map(|i| t[(i, i)]).collect())
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, o: &CMatrix) -> CMatrix {
        assert!(self.same_shape(o), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, o: &CMatrix) -> CMatrix {
        assert!(self.same_shape(o), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, o: CMatrix) -> CMatrix {
        &self + &o
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, o: CMatrix) -> CMatrix {
        &self - &o
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, o: &CMatrix) {
        assert!(self.same_shape(o), "add shape mismatch");
        self.data.iter_mut().zip(&o.data).for_each(|(a, b)| *a += b);
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, o: &CMatrix) -> CMatrix {
        self.matmul(o)
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, o: CMatrix) -> CMatrix {
        self.matmul(&o)
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, z: C64) -> CMatrix {
        self.scale(z)
    }
}

impl Mul<C64> for CMatrix {
    type Output = CMatrix;
    fn mul(self, z: C64) -> CMatrix {
        self.scale(z)
    }
}

impl Mul<&CMatrix> for C64 {
    type Output = CMatrix;
    fn mul(self, m: &CMatrix) -> CMatrix {
        m.scale(self)
    }
}

impl Mul<CMatrix> for C64 {
    type Output = CMatrix;
    fn mul(self, m: CMatrix) -> CMatrix {
        m.scale(self)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    let oc = ac * bc;
    for i in 0..ar {
        for j in 0..ac {
            let x = a.data[i * ac + j];
            if x == ZERO {
                continue;
            }
            for k in 0..br {
                let row = (i * br + k) * oc + j * bc;
                for l in 0..bc {
                    out.data[row + l] = x * b.data[k * bc + l];
                }
            }
        }
    }
    out
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
pub fn rel_residual(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(a.mismatch(b, "compare"));
    }
    if a.data == b.data {
        return Ok(0.0);
    }
    let d = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(d / 1f64.max(a.norm()).max(b.norm()))
}

/// Residual of `x·y = y·x`, relative to the size of the products.
pub fn commutator_residual(x: &CMatrix, y: &CMatrix) -> f64 {
    rel_residual(&x.matmul(y), &y.matmul(x)).expect("commutator of mismatched operators")
}

/// Pauli and ladder matrices.
pub mod pauli {
    use super::*;

    pub fn id2() -> CMatrix {
        CMatrix::identity(2)
    }
    pub fn sigma3() -> CMatrix {
        CMatrix::from_diag(&[ONE, -ONE])
    }
    pub fn sigma1() -> CMatrix {
        CMatrix::m2(ZERO, ONE, ONE, ZERO)
    }
    pub fn sigma2() -> CMatrix {
        CMatrix::m2(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO)
    }
    /// `σ₊ = (σ₁ + iσ₂)/2`, raising.
    pub fn sigma_plus() -> CMatrix {
        CMatrix::m2(ZERO, ONE, ZERO, ZERO)
    }
    pub fn sigma_minus() -> CMatrix {
        CMatrix::m2(ZERO, ZERO, ONE, ZERO)
    }
}

/// Operator on the `N`-site quantum space, dimension `2^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QOperator {
    n_sites: usize,
    matrix: CMatrix,
}

impl QOperator {
    pub fn new(n_sites: usize, matrix: CMatrix) -> Result<Self> {
        let d = 1usize << n_sites;
        if matrix.rows != d || matrix.cols != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on {n_sites} sites (expected {d}x{d})",
                matrix.rows, matrix.cols
            )));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn identity(n_sites: usize) -> Self {
        Self {
            n_sites,
            matrix: CMatrix::identity(1 << n_sites),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Places `op` on site `site` (1-based) of an `n_sites` chain.
pub fn embed_site(op: &CMatrix, site: usize, n_sites: usize) -> Result<QOperator> {
    if op.rows != 2 || op.cols != 2 {
        return Err(Error::DimensionMismatch("site operator must be 2x2".into()));
    }
    if site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    let left = CMatrix::identity(1 << (n_sites - site));
    let right = CMatrix::identity(1 << (site - 1));
    QOperator::new(n_sites, kron(&kron(&left, op), &right))
}

/// 2×2 matrix of quantum-space operators; the auxiliary space is the
/// leftmost factor when expanded.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxOperator {
    n_sites: usize,
    blocks: [[CMatrix; 2]; 2],
}

impl AuxOperator {
    pub fn new(n_sites: usize, blocks: [[CMatrix; 2]; 2]) -> Result<Self> {
        let d = 1usize << n_sites;
        for row in &blocks {
            for b in row {
                if b.rows != d || b.cols != d {
                    return Err(Error::DimensionMismatch(format!(
                        "aux block {}x{} on {n_sites} sites",
                        b.rows, b.cols
                    )));
                }
            }
        }
        Ok(Self { n_sites, blocks })
    }

    /// c-number 2×2 matrix times the identity on `n_sites`.
    pub fn from_c_number(k: &CMatrix, n_sites: usize) -> Self {
        let d = 1usize << n_sites;
        let b = |i, j| CMatrix::scalar(d, k.get(i, j));
        Self {
            n_sites,
            blocks: [[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]],
        }
    }

    /// Entry-wise `m[a][b] ⊗` placed on `site` of `n_sites`.
    pub fn from_site(m: &[[CMatrix; 2]; 2], site: usize, n_sites: usize) -> Result<Self> {
        let e =
            |a: usize, b: usize| embed_site(&m[a][b], site, n_sites).map(QOperator::into_matrix);
        Ok(Self {
            n_sites,
            blocks: [[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]],
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn blocks(&self) -> &[[CMatrix; 2]; 2] {
        &self.blocks
    }

    pub fn block(&self, a: usize, b: usize) -> &CMatrix {
        &self.blocks[a][b]
    }

    pub fn mul(&self, o: &AuxOperator) -> AuxOperator {
        assert_eq!(self.n_sites, o.n_sites);
        let x = &self.blocks;
        let y = &o.blocks;
        let e = |a: usize, b: usize| &x[a][0].matmul(&y[0][b]) + &x[a][1].matmul(&y[1][b]);
        AuxOperator {
            n_sites: self.n_sites,
            blocks: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    /// Full `2·2^N` matrix with the auxiliary space leftmost.
    pub fn to_full(&self) -> CMatrix {
        CMatrix::from_blocks(&self.blocks)
    }

    pub fn from_full(m: &CMatrix, n_sites: usize) -> Result<Self> {
        let d = 1usize << n_sites;
        if m.rows != 2 * d || m.cols != 2 * d {
            return Err(Error::DimensionMismatch("aux expansion size".into()));
        }
        Ok(Self {
            n_sites,
            blocks: [
                [m.block(0, 0, d, d), m.block(0, d, d, d)],
                [m.block(d, 0, d, d), m.block(d, d, d, d)],
            ],
        })
    }

    /// Trace over the auxiliary space against a c-number matrix: `Tr₀(k · self)`.
    pub fn trace_with(&self, k: &CMatrix) -> CMatrix {
        let d = 1usize << self.n_sites;
        let mut out = CMatrix::zeros(d, d);
        for a in 0..2 {
            for b in 0..2 {
                out += &self.blocks[b][a].scale(k.get(a, b));
            }
        }
        out
    }
}
