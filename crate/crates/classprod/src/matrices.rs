//! Dense n x n matrix algebra over GF(q), plus the structured constructors
//! used by the bound engine: companion matrices, direct sums, and the
//! conjugator families that are identity outside a trailing 2 x 2 block.

use crate::field::{Felt, Field};
use crate::polyring::Poly;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix rows must form a square matrix")]
    NotSquare,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("companion matrix requires a monic polynomial of degree >= 1")]
    NonMonicCompanion,
    #[error("direct sum of an empty block list")]
    EmptyDirectSum,
    #[error("conjugator block must be invertible (determinant zero)")]
    ZeroDeterminantBlock,
    #[error("affine conjugator requires x != 0")]
    AffineZeroX,
    #[error("det-one conjugator requires ad - bc = 1")]
    NotDetOne,
    #[error("conjugator embedding requires dimension >= 2")]
    EmbedTooSmall,
    #[error("malformed matrix literal `{0}`")]
    BadLiteral(String),
}

/// Square matrix over one field, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    n: usize,
    entries: Vec<Felt>,
}

impl Mat {
    pub fn from_rows(rows: Vec<Vec<Felt>>) -> Result<Mat, MatError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(MatError::NotSquare);
        }
        Ok(Mat {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Felt) -> Mat {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Mat { n, entries }
    }

    pub fn zeros(field: &Field, n: usize) -> Mat {
        Mat {
            n,
            entries: vec![field.zero(); n * n],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        Mat::from_fn(n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn scalar(field: &Field, n: usize, a: Felt) -> Mat {
        Mat::from_fn(n, |i, j| if i == j { a } else { field.zero() })
    }

    pub fn diagonal(field: &Field, entries: &[Felt]) -> Mat {
        Mat::from_fn(entries.len(), |i, j| {
            if i == j {
                entries[i]
            } else {
                field.zero()
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Felt {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Felt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Felt] {
        &self.entries
    }

    pub fn matmul(&self, field: &Field, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch in matrix product");
        let n = self.n;
        Mat::from_fn(n, |i, j| {
            let mut acc = field.zero();
            for k in 0..n {
                acc = field.add(acc, field.mul(self.get(i, k), other.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, field: &Field, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch in matrix sum");
        Mat::from_fn(self.n, |i, j| field.add(self.get(i, j), other.get(i, j)))
    }

    pub fn sub(&self, field: &Field, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch in matrix difference");
        Mat::from_fn(self.n, |i, j| field.sub(self.get(i, j), other.get(i, j)))
    }

    pub fn trace(&self, field: &Field) -> Felt {
        let mut acc = field.zero();
        for i in 0..self.n {
            acc = field.add(acc, self.get(i, i));
        }
        acc
    }

    pub fn det(&self, field: &Field) -> Felt {
        let n = self.n;
        let mut work = self.clone();
        let mut det = field.one();
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| !work.get(r, col).is_zero()) {
                Some(r) => r,
                None => return field.zero(),
            };
            if pivot_row != col {
                for j in 0..n {
                    let tmp = work.get(col, j);
                    work.set(col, j, work.get(pivot_row, j));
                    work.set(pivot_row, j, tmp);
                }
                det = field.neg(det);
            }
            let pivot = work.get(col, col);
            det = field.mul(det, pivot);
            let inv = field.inv(pivot).expect("pivot nonzero");
            for r in col + 1..n {
                let factor = field.mul(work.get(r, col), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = field.sub(work.get(r, j), field.mul(factor, work.get(col, j)));
                    work.set(r, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self, field: &Field) -> Result<Mat, MatError> {
        let n = self.n;
        let mut work = self.clone();
        let mut inv = Mat::identity(field, n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !work.get(r, col).is_zero())
                .ok_or(MatError::Singular)?;
            if pivot_row != col {
                for j in 0..n {
                    let tmp = work.get(col, j);
                    work.set(col, j, work.get(pivot_row, j));
                    work.set(pivot_row, j, tmp);
                    let tmp = inv.get(col, j);
                    inv.set(col, j, inv.get(pivot_row, j));
                    inv.set(pivot_row, j, tmp);
                }
            }
            let pinv = field.inv(work.get(col, col)).expect("pivot nonzero");
            for j in 0..n {
                work.set(col, j, field.mul(work.get(col, j), pinv));
                inv.set(col, j, field.mul(inv.get(col, j), pinv));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = work.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = field.sub(work.get(r, j), field.mul(factor, work.get(col, j)));
                    work.set(r, j, v);
                    let v = field.sub(inv.get(r, j), field.mul(factor, inv.get(col, j)));
                    inv.set(r, j, v);
                }
            }
        }
        assert_eq!(self.matmul(field, &inv), Mat::identity(field, n));
        Ok(inv)
    }

    /// U^{-1} A U.
    pub fn conjugate(&self, field: &Field, u: &Mat) -> Result<Mat, MatError> {
        if self.n != u.n {
            return Err(MatError::DimensionMismatch(self.n, u.n));
        }
        let uinv = u.inverse(field)?;
        Ok(uinv.matmul(field, self).matmul(field, u))
    }

    pub fn is_scalar(&self, _field: &Field) -> bool {
        let d = self.get(0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                let expect_diag = i == j;
                let e = self.get(i, j);
                if expect_diag && e != d {
                    return false;
                }
                if !expect_diag && !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// The companion matrix of a monic polynomial: ones on the subdiagonal,
    /// negated coefficients down the last column. The bound formulas depend
    /// on exactly this orientation.
    pub fn companion(field: &Field, f: &Poly) -> Result<Mat, MatError> {
        let r = match f.degree() {
            Some(r) if r >= 1 && f.is_monic(field) => r,
            _ => return Err(MatError::NonMonicCompanion),
        };
        let mut m = Mat::zeros(field, r);
        for i in 0..r {
            m.set(i, r - 1, field.neg(f.coeff(field, i)));
        }
        for i in 1..r {
            m.set(i, i - 1, field.one());
        }
        Ok(m)
    }

    /// Block-diagonal assembly in list order.
    pub fn direct_sum(field: &Field, blocks: &[Mat]) -> Result<Mat, MatError> {
        if blocks.is_empty() {
            return Err(MatError::EmptyDirectSum);
        }
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut m = Mat::zeros(field, n);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    m.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.n;
        }
        Ok(m)
    }

    /// Parses a matrix literal: rows separated by `;`, entries by `,`.
    pub fn parse(field: &Field, literal: &str) -> Result<Mat, MatError> {
        let bad = || MatError::BadLiteral(literal.to_string());
        let mut rows = Vec::new();
        for row in literal.split(';') {
            let mut entries = Vec::new();
            for part in row.split(',') {
                let v: u64 = part.trim().parse().map_err(|_| bad())?;
                entries.push(field.try_elt(v).map_err(|_| bad())?);
            }
            rows.push(entries);
        }
        Mat::from_rows(rows).map_err(|_| bad())
    }
}

impl fmt::Display for Mat {
    /// The literal form: rows separated by `;`, entries by `,`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// A 2 x 2 conjugator block embedded in the last two coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjugator {
    /// D = [[a,b],[c,d]] with ad - bc != 0.
    General { a: Felt, b: Felt, c: Felt, d: Felt },
    /// D(x,y) = [[x,y],[0,1]] with x != 0; determinant x.
    Affine { x: Felt, y: Felt },
    /// D = [[a,b],[c,d]] with ad - bc = 1.
    DetOne { a: Felt, b: Felt, c: Felt, d: Felt },
}

impl Conjugator {
    pub fn block(&self, field: &Field) -> Result<[Felt; 4], MatError> {
        match *self {
            Conjugator::General { a, b, c, d } => {
                let w = field.sub(field.mul(a, d), field.mul(b, c));
                if w.is_zero() {
                    return Err(MatError::ZeroDeterminantBlock);
                }
                Ok([a, b, c, d])
            }
            Conjugator::Affine { x, y } => {
                if x.is_zero() {
                    return Err(MatError::AffineZeroX);
                }
                Ok([x, y, field.zero(), field.one()])
            }
            Conjugator::DetOne { a, b, c, d } => {
                let w = field.sub(field.mul(a, d), field.mul(b, c));
                if w != field.one() {
                    return Err(MatError::NotDetOne);
                }
                Ok([a, b, c, d])
            }
        }
    }

    /// Identity except the trailing 2 x 2 block.
    pub fn build(&self, field: &Field, n: usize) -> Result<Mat, MatError> {
        if n < 2 {
            return Err(MatError::EmbedTooSmall);
        }
        let [a, b, c, d] = self.block(field)?;
        let mut m = Mat::identity(field, n);
        m.set(n - 2, n - 2, a);
        m.set(n - 2, n - 1, b);
        m.set(n - 1, n - 2, c);
        m.set(n - 1, n - 1, d);
        Ok(m)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Conjugator::General { .. } => "general",
            Conjugator::Affine { .. } => "affine",
            Conjugator::DetOne { .. } => "detone",
        }
    }

    pub fn param_encodings(&self, field: &Field) -> Vec<u32> {
        match self.block(field) {
            Ok([a, b, c, d]) => vec![a.encoding(), b.encoding(), c.encoding(), d.encoding()],
            Err(_) => Vec::new(),
        }
    }
}

// ---- rectangular elimination helpers used by the canonical-form module ----

/// In-place reduced row echelon form; returns the pivot columns.
pub(crate) fn rref(field: &Field, rows: &mut [Vec<Felt>]) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let pinv = field.inv(rows[rank][col]).expect("pivot nonzero");
        for j in col..ncols {
            rows[rank][j] = field.mul(rows[rank][j], pinv);
        }
        for r in 0..nrows {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col];
            for j in col..ncols {
                let v = field.sub(rows[r][j], field.mul(factor, rows[rank][j]));
                rows[r][j] = v;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    pivots
}

/// Basis of the right nullspace of the row system, one vector per free
/// column, in ascending free-column order.
pub(crate) fn nullspace_basis(field: &Field, rows: &[Vec<Felt>], ncols: usize) -> Vec<Vec<Felt>> {
    let mut work: Vec<Vec<Felt>> = rows.to_vec();
    let pivots = rref(field, &mut work);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (rank, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(work[rank][free]);
        }
        basis.push(v);
    }
    basis
}
