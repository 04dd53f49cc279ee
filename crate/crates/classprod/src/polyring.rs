//! Polynomials over GF(q): arithmetic, gcd, irreducibility, root scans.
//!
//! Coefficients are stored dense, low degree first, with no trailing zeros;
//! the zero polynomial is the empty list. Irreducibility is decided by
//! exhaustive trial division, which is exact at the field sizes this crate
//! targets.

use crate::field::{Felt, Field};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation requires a monic polynomial")]
    NonMonic,
    #[error("operation requires degree at least 1")]
    ConstantInput,
    #[error("operation requires an even field of order at least 4")]
    EvenFieldRequired,
    #[error("malformed polynomial literal `{0}`")]
    BadLiteral(String),
}

/// Dense polynomial over one field; low degree first, canonical (trimmed).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    coeffs: Vec<Felt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    /// Builds a polynomial from coefficients (low degree first), trimming
    /// trailing zeros to canonical form.
    pub fn from_coeffs(_field: &Field, mut coeffs: Vec<Felt>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(field: &Field, c: Felt) -> Poly {
        Poly::from_coeffs(field, vec![c])
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, field.one())
    }

    /// The monomial x.
    pub fn x(field: &Field) -> Poly {
        Poly::from_coeffs(field, vec![field.zero(), field.one()])
    }

    /// The monic linear polynomial x - root.
    pub fn linear(field: &Field, root: Felt) -> Poly {
        Poly::from_coeffs(field, vec![field.neg(root), field.one()])
    }

    /// x^d.
    pub fn monomial(field: &Field, d: usize) -> Poly {
        let mut coeffs = vec![field.zero(); d + 1];
        coeffs[d] = field.one();
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, field: &Field, i: usize) -> Felt {
        self.coeffs.get(i).copied().unwrap_or_else(|| field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<Felt> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self, field: &Field) -> bool {
        self.leading() == Some(field.one())
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.add(self.coeff(field, i), other.coeff(field, i)))
            .collect();
        Poly::from_coeffs(field, coeffs)
    }

    pub fn neg(&self, field: &Field) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = field.add(coeffs[i + j], field.mul(a, b));
            }
        }
        Poly::from_coeffs(field, coeffs)
    }

    pub fn mul_scalar(&self, field: &Field, s: Felt) -> Poly {
        Poly::from_coeffs(
            field,
            self.coeffs.iter().map(|&c| field.mul(c, s)).collect(),
        )
    }

    /// Euclidean division: self = q*g + r with deg r < deg g.
    pub fn divmod(&self, field: &Field, g: &Poly) -> Result<(Poly, Poly), PolyError> {
        if g.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let dg = g.degree().unwrap();
        let lead_inv = field.inv(g.leading().unwrap()).expect("nonzero leading");
        let mut rem = self.coeffs.clone();
        if rem.len() < g.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quo = vec![field.zero(); rem.len() - dg];
        for d in (dg..rem.len()).rev() {
            let c = rem[d];
            if c.is_zero() {
                continue;
            }
            let factor = field.mul(c, lead_inv);
            quo[d - dg] = factor;
            for (k, &gc) in g.coeffs.iter().enumerate() {
                rem[d - dg + k] = field.sub(rem[d - dg + k], field.mul(factor, gc));
            }
        }
        Ok((Poly::from_coeffs(field, quo), Poly::from_coeffs(field, rem)))
    }

    pub fn rem(&self, field: &Field, g: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divmod(field, g)?.1)
    }

    pub fn divides(&self, field: &Field, other: &Poly) -> bool {
        match other.divmod(field, self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    pub fn make_monic(&self, field: &Field) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.mul_scalar(field, field.inv(l).expect("nonzero leading")),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, field: &Field, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(field, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic(field)
    }

    pub fn eval(&self, field: &Field, x: Felt) -> Felt {
        let mut acc = field.zero();
        for &c in self.coeffs.iter().rev() {
            acc = field.add(field.mul(acc, x), c);
        }
        acc
    }

    pub fn pow(&self, field: &Field, e: u32) -> Poly {
        let mut acc = Poly::one(field);
        for _ in 0..e {
            acc = acc.mul(field, self);
        }
        acc
    }

    /// Total order used wherever a deterministic polynomial choice is
    /// needed: degree first, then coefficients compared low-degree-first.
    pub fn cmp_order(&self, other: &Poly) -> Ordering {
        let da = self.coeffs.len();
        let db = other.coeffs.len();
        if da != db {
            return da.cmp(&db);
        }
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            match a.encoding().cmp(&b.encoding()) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Coefficient encodings, low degree first; the serialization key.
    pub fn encodings(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.encoding()).collect()
    }

    /// Parses a polynomial literal: comma-separated coefficient encodings,
    /// low degree first, e.g. `1,0,1` for x^2+1.
    pub fn parse(field: &Field, literal: &str) -> Result<Poly, PolyError> {
        let bad = || PolyError::BadLiteral(literal.to_string());
        let mut coeffs = Vec::new();
        for part in literal.split(',') {
            let v: u64 = part.trim().parse().map_err(|_| bad())?;
            coeffs.push(field.try_elt(v).map_err(|_| bad())?);
        }
        Ok(Poly::from_coeffs(field, coeffs))
    }
}

impl fmt::Display for Poly {
    /// The literal form: comma-separated encodings, low degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All monic polynomials of the given degree, in the deterministic
/// low-degree-first lex order.
pub fn monic_polys(field: &Field, degree: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = field.q() as u64;
    let total = q.pow(degree as u32);
    (0..total).map(move |idx| {
        let mut coeffs = vec![field.zero(); degree + 1];
        coeffs[degree] = field.one();
        let mut rest = idx;
        for c in coeffs.iter_mut().take(degree).rev() {
            *c = field.elt((rest % q) as u32);
            rest /= q;
        }
        Poly { coeffs }
    })
}

/// Exhaustive irreducibility test by trial division against all monic
/// polynomials of degree up to deg f / 2.
pub fn is_irreducible(field: &Field, f: &Poly) -> Result<bool, PolyError> {
    let deg = f.degree().ok_or(PolyError::ConstantInput)?;
    if deg == 0 {
        return Err(PolyError::ConstantInput);
    }
    if !f.is_monic(field) {
        return Err(PolyError::NonMonic);
    }
    for d in 1..=deg / 2 {
        for g in monic_polys(field, d) {
            if g.divides(field, f) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The smallest-encoded w such that x^2 - wx + 1 is irreducible over an even
/// field of order at least 4.
pub fn find_w_irreducible(field: &Field) -> Result<Felt, PolyError> {
    if !field.has_even_order() || field.q() < 4 {
        return Err(PolyError::EvenFieldRequired);
    }
    for w in field.elements() {
        let f = Poly::from_coeffs(field, vec![field.one(), field.neg(w), field.one()]);
        if is_irreducible(field, &f).expect("monic quadratic") {
            return Ok(w);
        }
    }
    unreachable!("an irreducible x^2 - wx + 1 exists over every even field of order >= 4")
}
