//! Rational canonical form over GF(q): invariant factors via Smith normal
//! form of xI - A, the GL-conjugacy label, and the block arrangement that
//! feeds the trace-set bound engine.
//!
//! Similarity is decided exactly, with no eigenvalue computation over
//! extension fields: two matrices are GL-conjugate iff their invariant
//! factors agree.

use crate::field::{Felt, Field};
use crate::matrices::{self, Mat};
use crate::polyring::{self, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CanonError {
    #[error("scalar matrix has no non-trivial block arrangement")]
    ScalarInput,
}

/// Canonical GL-conjugacy label: the nonconstant invariant factors of
/// xI - A, monic, each dividing the next.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ClassId {
    factors: Vec<Poly>,
}

impl ClassId {
    pub fn factors(&self) -> &[Poly] {
        &self.factors
    }

    /// Coefficient encodings of each factor, low degree first; the
    /// serialization key used for hashing and reporting.
    pub fn encodings(&self) -> Vec<Vec<u32>> {
        self.factors.iter().map(|f| f.encodings()).collect()
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}

fn char_matrix(field: &Field, a: &Mat) -> Vec<Vec<Poly>> {
    let n = a.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = Poly::constant(field, field.neg(a.get(i, j)));
                    if i == j {
                        c.add(field, &Poly::x(field))
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect()
}

/// Diagonalizes xI - A over GF(q)[x] by row/column reduction with
/// polynomial division, returning the monic diagonal entries in chain order.
fn smith_diagonal(field: &Field, a: &Mat) -> Vec<Poly> {
    let n = a.n();
    let mut m = char_matrix(field, a);
    for k in 0..n {
        loop {
            // Pivot: a minimal-degree nonzero entry of the trailing block.
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if let Some(d) = m[i][j].degree() {
                        if best.is_none_or(|(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let (_, pi, pj) = best.expect("xI - A is nonsingular over GF(q)[x]");
            m.swap(k, pi);
            if pj != k {
                for row in m.iter_mut() {
                    row.swap(k, pj);
                }
            }
            let mut dirty = false;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let (quo, _) = m[i][k].divmod(field, &m[k][k]).expect("pivot nonzero");
                for j in k..n {
                    let delta = quo.mul(field, &m[k][j]);
                    m[i][j] = m[i][j].sub(field, &delta);
                }
                if !m[i][k].is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..n {
                if m[k][j].is_zero() {
                    continue;
                }
                let (quo, _) = m[k][j].divmod(field, &m[k][k]).expect("pivot nonzero");
                for i in k..n {
                    let delta = quo.mul(field, &m[i][k]);
                    m[i][j] = m[i][j].sub(field, &delta);
                }
                if !m[k][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Row and column are clear; force the divisibility chain.
            let mut chained = true;
            'scan: for i in k + 1..n {
                for j in k + 1..n {
                    if !m[k][k].divides(field, &m[i][j]) {
                        for jj in k..n {
                            let bump = m[i][jj].clone();
                            m[k][jj] = m[k][jj].add(field, &bump);
                        }
                        chained = false;
                        break 'scan;
                    }
                }
            }
            if chained {
                break;
            }
        }
        m[k][k] = m[k][k].make_monic(field);
    }
    (0..n).map(|k| m[k][k].clone()).collect()
}

/// The invariant factors of A (nonconstant Smith diagonal entries of
/// xI - A), in chain order. Equal lists characterize GL-conjugacy.
pub fn invariant_factors(field: &Field, a: &Mat) -> Vec<Poly> {
    let diag = smith_diagonal(field, a);
    let factors: Vec<Poly> = diag
        .into_iter()
        .filter(|f| f.degree().is_some_and(|d| d >= 1))
        .collect();
    debug_assert_eq!(
        factors.iter().map(|f| f.degree().unwrap()).sum::<usize>(),
        a.n(),
        "invariant factor degrees must sum to n"
    );
    debug_assert!(
        factors.windows(2).all(|w| w[0].divides(field, &w[1])),
        "invariant factors must form a divisibility chain"
    );
    factors
}

pub fn class_id(field: &Field, a: &Mat) -> ClassId {
    ClassId {
        factors: invariant_factors(field, a),
    }
}

/// The characteristic polynomial (product of the invariant factors).
pub fn characteristic_polynomial(field: &Field, a: &Mat) -> Poly {
    invariant_factors(field, a)
        .iter()
        .fold(Poly::one(field), |acc, f| acc.mul(field, f))
}

/// Irreducible factors of a monic polynomial with multiplicities, found by
/// root scanning plus trial division in ascending order. Exhaustive and
/// exact at desk scale.
pub fn factor_monic(field: &Field, f: &Poly) -> Vec<(Poly, u32)> {
    assert!(
        f.is_monic(field),
        "factorization requires a monic polynomial"
    );
    let mut rest = f.clone();
    let mut out: Vec<(Poly, u32)> = Vec::new();
    let mut push = |p: Poly, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    for root in field.elements() {
        let lin = Poly::linear(field, root);
        let mut e = 0;
        while rest.degree().is_some_and(|d| d >= 1) && rest.eval(field, root).is_zero() {
            let (quo, rem) = rest.divmod(field, &lin).expect("linear divisor");
            debug_assert!(rem.is_zero());
            rest = quo;
            e += 1;
        }
        push(lin, e);
    }
    let mut d = 2;
    while rest.degree().is_some_and(|deg| deg >= 2 * d) {
        for g in polyring::monic_polys(field, d) {
            if !polyring::is_irreducible(field, &g).expect("monic candidate") {
                continue;
            }
            let mut e = 0;
            while g.divides(field, &rest) {
                rest = rest.divmod(field, &g).expect("nonzero divisor").0;
                e += 1;
            }
            push(g, e);
            if rest.degree().is_some_and(|deg| deg < 2 * d) {
                break;
            }
        }
        d += 1;
    }
    if rest.degree().is_some_and(|deg| deg >= 1) {
        push(rest, 1);
    }
    out.sort_by(|x, y| x.0.cmp_order(&y.0));
    out
}

/// Elementary divisors of A: the prime-power factors of the invariant
/// factors, as expanded polynomials, sorted by (degree, coefficients).
pub fn elementary_divisors(field: &Field, a: &Mat) -> Vec<Poly> {
    let mut divisors = Vec::new();
    for f in invariant_factors(field, a) {
        for (p, e) in factor_monic(field, &f) {
            divisors.push(p.pow(field, e));
        }
    }
    divisors.sort_by(|x, y| x.cmp_order(y));
    divisors
}

/// The trailing block of an arrangement: either a companion block of degree
/// >= 2 or a distinct diagonal pair in the last two coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    Companion(Poly),
    Diag(Felt, Felt),
}

/// A block-diagonal matrix similar to the source, shaped for the trace
/// formulas: the tail occupies the last coordinates, everything off the
/// blocks is zero, and only the tail structure matters to the bound engine.
#[derive(Clone, Debug)]
pub struct RcfArrangement {
    pub blocks: Vec<Mat>,
    pub matrix: Mat,
    pub head_dim: usize,
    pub tail: Tail,
}

impl RcfArrangement {
    pub fn tail_dim(&self) -> usize {
        match &self.tail {
            Tail::Companion(p) => p.degree().unwrap_or(0),
            Tail::Diag(_, _) => 2,
        }
    }
}

/// Arranges a non-scalar matrix for the bound engine.
///
/// If some elementary divisor has degree >= 2, the highest-degree one (ties
/// broken by coefficient order) becomes the trailing companion block — the
/// bound holds for any choice, so one is fixed deterministically. Otherwise
/// the matrix is diagonalizable over GF(q); it is rearranged by permutation
/// similarity so the last two diagonal entries are the two smallest-encoded
/// distinct eigenvalues.
pub fn arrange_for_hypothesis(field: &Field, a: &Mat) -> Result<RcfArrangement, CanonError> {
    if a.is_scalar(field) {
        return Err(CanonError::ScalarInput);
    }
    let divisors = elementary_divisors(field, a);
    let all_linear = divisors.iter().all(|d| d.degree() == Some(1));
    let (blocks, tail) = if all_linear {
        let mut eigenvalues: Vec<Felt> = divisors
            .iter()
            .map(|d| field.neg(d.coeff(field, 0)))
            .collect();
        eigenvalues.sort();
        let u = eigenvalues[0];
        let v = *eigenvalues
            .iter()
            .find(|&&e| e != u)
            .expect("non-scalar diagonalizable matrix has two distinct eigenvalues");
        let mut rest = eigenvalues.clone();
        rest.remove(rest.iter().position(|&e| e == u).unwrap());
        rest.remove(rest.iter().position(|&e| e == v).unwrap());
        let mut blocks: Vec<Mat> = rest
            .into_iter()
            .map(|e| Mat::from_rows(vec![vec![e]]).unwrap())
            .collect();
        blocks.push(Mat::from_rows(vec![vec![u]]).unwrap());
        blocks.push(Mat::from_rows(vec![vec![v]]).unwrap());
        (blocks, Tail::Diag(u, v))
    } else {
        let tail_poly = divisors
            .iter()
            .max_by(|x, y| x.cmp_order(y))
            .expect("non-scalar matrix has elementary divisors")
            .clone();
        let mut rest = divisors;
        rest.remove(rest.iter().position(|d| *d == tail_poly).unwrap());
        let mut blocks: Vec<Mat> = rest
            .iter()
            .map(|d| Mat::companion(field, d).expect("monic divisor"))
            .collect();
        blocks.push(Mat::companion(field, &tail_poly).expect("monic divisor"));
        (blocks, Tail::Companion(tail_poly))
    };
    let matrix = Mat::direct_sum(field, &blocks).expect("nonempty blocks");
    let head_dim = a.n()
        - match &tail {
            Tail::Companion(p) => p.degree().unwrap(),
            Tail::Diag(_, _) => 2,
        };
    debug_assert_eq!(class_id(field, a), class_id(field, &matrix));
    Ok(RcfArrangement {
        blocks,
        matrix,
        head_dim,
        tail,
    })
}

/// A conjugator U with U^{-1} A U = B, or None when A and B are not
/// similar. The solution space of AX = XB is computed exactly; an invertible
/// point is then located by a seeded random scan (invertible points make up
/// at least a 1/4 fraction) backed by an exhaustive scan of small spaces.
pub fn similarity_transform(field: &Field, a: &Mat, b: &Mat) -> Option<Mat> {
    if a.n() != b.n() {
        return None;
    }
    if class_id(field, a) != class_id(field, b) {
        return None;
    }
    let n = a.n();
    let vars = n * n;
    let mut rows = vec![vec![field.zero(); vars]; vars];
    for i in 0..n {
        for j in 0..n {
            let row = &mut rows[i * n + j];
            for k in 0..n {
                row[k * n + j] = field.add(row[k * n + j], a.get(i, k));
            }
            for l in 0..n {
                row[i * n + l] = field.sub(row[i * n + l], b.get(l, j));
            }
        }
    }
    let basis = matrices::nullspace_basis(field, &rows, vars);
    let dim = basis.len();
    debug_assert!(
        dim >= 1,
        "similar matrices have a nonzero intertwiner space"
    );
    let q = field.q() as u64;
    let combo_to_mat = |coeffs: &[Felt]| -> Mat {
        Mat::from_fn(n, |i, j| {
            let idx = i * n + j;
            let mut acc = field.zero();
            for (c, v) in coeffs.iter().zip(&basis) {
                acc = field.add(acc, field.mul(*c, v[idx]));
            }
            acc
        })
    };
    let space: u128 = (q as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if space <= 1 << 20 {
        for idx in 1..space {
            let mut coeffs = Vec::with_capacity(dim);
            let mut rest = idx;
            for _ in 0..dim {
                coeffs.push(field.elt((rest % q as u128) as u32));
                rest /= q as u128;
            }
            let u = combo_to_mat(&coeffs);
            if !u.det(field).is_zero() {
                return Some(u);
            }
        }
        unreachable!("similar matrices always admit an invertible intertwiner");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1a5);
    for _ in 0..200_000 {
        let coeffs: Vec<Felt> = (0..dim)
            .map(|_| field.elt(rng.random_range(0..field.q())))
            .collect();
        let u = combo_to_mat(&coeffs);
        if !u.det(field).is_zero() {
            return Some(u);
        }
    }
    unreachable!("invertible intertwiners have density >= 1/4 in the solution space")
}

/// Deterministic order on class ids: factor count, then factor order.
pub fn class_id_cmp(a: &ClassId, b: &ClassId) -> Ordering {
    match a.factors.len().cmp(&b.factors.len()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.factors.iter().zip(&b.factors) {
        match x.cmp_order(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}
