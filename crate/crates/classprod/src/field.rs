//! Exact arithmetic in GF(p^m) for p prime, m >= 1, q = p^m <= 2^16.
//!
//! Elements are encoded as integers in [0, q): the encoding is the base-p
//! little-endian packing of the coefficient vector of the canonical
//! polynomial representative. This integer encoding is the bit-exact
//! interchange format used by all I/O.

use crate::polyring::{self, Poly};
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds 2^16")]
    OrderTooLarge(u64),
    #[error("modulus must be monic of degree m over Z/p and irreducible")]
    BadModulus,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element encoding {0} out of range for field of order {1}")]
    EncodingOutOfRange(u64, u32),
    #[error("malformed field literal `{0}`, expected `p^m`")]
    BadFieldLiteral(String),
    #[error("malformed element literal `{0}`, expected a decimal encoding")]
    BadElementLiteral(String),
}

/// A field element: integer encoding plus a stamp identifying its field.
///
/// The stamp makes mixed-field arithmetic a detectable contract violation
/// instead of silent garbage. Ordering is by encoding, which is the
/// tie-break order used everywhere canonical choices are needed.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Felt {
    repr: u32,
    tag: u32,
}

impl Felt {
    /// The integer encoding in [0, q).
    pub fn encoding(self) -> u32 {
        self.repr
    }

    pub fn is_zero(self) -> bool {
        self.repr == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr)
    }
}

const NON_SQUARE: u32 = u32::MAX;

/// GF(p^m) with an explicit irreducible modulus and precomputed tables.
///
/// Immutable after construction; all operations are pure, so a field can be
/// shared freely across threads.
#[derive(Clone)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    /// Base-p digits of the modulus, low degree first, length m+1, monic.
    /// For m = 1 this is the placeholder `x` and arithmetic is plain mod p.
    modulus: Vec<u32>,
    tag: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    sqrt_tab: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Field(GF({}), modulus {})",
            self.literal(),
            self.modulus_literal()
        )
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag
    }
}
impl Eq for Field {}

/// Tags are interned on (p, m, modulus) so that structurally equal fields
/// constructed independently produce interoperable elements.
fn intern_tag(p: u32, m: u32, modulus: &[u32]) -> u32 {
    static REGISTRY: OnceLock<Mutex<Vec<(u32, u32, Vec<u32>)>>> = OnceLock::new();
    let reg = REGISTRY.get_or_init(|| Mutex::new(Vec::new()));
    let mut reg = reg.lock().expect("field registry poisoned");
    if let Some(i) = reg
        .iter()
        .position(|e| e.0 == p && e.1 == m && e.2 == modulus)
    {
        return i as u32;
    }
    reg.push((p, m, modulus.to_vec()));
    (reg.len() - 1) as u32
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds GF(p^m) with the deterministic modulus: the lexicographically
    /// smallest monic irreducible degree-m polynomial over Z/p, coefficients
    /// compared low-degree-first.
    pub fn new(p: u32, m: u32) -> Result<Field, FieldError> {
        Self::check_shape(p, m)?;
        if m == 1 {
            return Ok(Self::build(p, 1, vec![0, 1]));
        }
        let base = Field::new(p, 1)?;
        // Lex order low-degree-first: c0 is the most significant scan digit.
        let total = (p as u64).pow(m);
        for idx in 0..total {
            let mut digits = vec![0u32; m as usize + 1];
            digits[m as usize] = 1;
            let mut rest = idx;
            for d in (0..m as usize).rev() {
                digits[d] = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            let candidate = Poly::from_coeffs(&base, digits.iter().map(|&c| base.elt(c)).collect());
            if polyring::is_irreducible(&base, &candidate).expect("monic by construction") {
                return Ok(Self::build(p, m, digits));
            }
        }
        unreachable!("an irreducible monic polynomial of every degree exists over Z/p")
    }

    /// Builds GF(p^m) with an explicitly chosen modulus (base-p digit vector,
    /// low degree first, length m+1). Used to demonstrate representation
    /// independence of all class-level quantities.
    pub fn with_modulus(p: u32, m: u32, modulus: Vec<u32>) -> Result<Field, FieldError> {
        Self::check_shape(p, m)?;
        if modulus.len() != m as usize + 1
            || modulus[m as usize] != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(FieldError::BadModulus);
        }
        if m == 1 {
            if modulus != vec![0, 1] {
                return Err(FieldError::BadModulus);
            }
            return Ok(Self::build(p, 1, modulus));
        }
        let base = Field::new(p, 1)?;
        let candidate = Poly::from_coeffs(&base, modulus.iter().map(|&c| base.elt(c)).collect());
        if !polyring::is_irreducible(&base, &candidate).map_err(|_| FieldError::BadModulus)? {
            return Err(FieldError::BadModulus);
        }
        Ok(Self::build(p, m, modulus))
    }

    fn check_shape(p: u32, m: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let mut q: u64 = 1;
        for _ in 0..m {
            q = q.saturating_mul(p as u64);
            if q > MAX_ORDER {
                return Err(FieldError::OrderTooLarge(q));
            }
        }
        Ok(())
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Field {
        let q = (p as u64).pow(m) as u32;
        let tag = intern_tag(p, m, &modulus);
        let mut field = Field {
            p,
            m,
            q,
            modulus,
            tag,
            exp: Vec::new(),
            log: Vec::new(),
            sqrt_tab: Vec::new(),
        };
        field.build_log_tables();
        field.build_sqrt_table();
        field
    }

    // ---- raw digit arithmetic, used only while building tables ----

    fn to_digits(&self, repr: u32) -> Vec<u32> {
        let mut digits = vec![0u32; self.m as usize];
        let mut rest = repr;
        for d in digits.iter_mut() {
            *d = rest % self.p;
            rest /= self.p;
        }
        digits
    }

    fn from_digits(&self, digits: &[u32]) -> u32 {
        let mut repr = 0u32;
        for &d in digits.iter().rev() {
            repr = repr * self.p + d;
        }
        repr
    }

    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let m = self.m as usize;
        let da = self.to_digits(a);
        let db = self.to_digits(b);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] += x as u64 * y as u64;
            }
        }
        for c in prod.iter_mut() {
            *c %= self.p as u64;
        }
        // Reduce by the monic modulus from the top down.
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (k, &mk) in self.modulus.iter().enumerate().take(m) {
                let pos = d - m + k;
                let sub = (c * mk as u64) % self.p as u64;
                prod[pos] = (prod[pos] + self.p as u64 - sub) % self.p as u64;
            }
        }
        let digits: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
        self.from_digits(&digits)
    }

    fn raw_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        let order = (q - 1) as u64;
        let mut prime_factors = Vec::new();
        let mut rest = order;
        let mut d = 2u64;
        while d * d <= rest {
            if rest.is_multiple_of(d) {
                prime_factors.push(d);
                while rest.is_multiple_of(d) {
                    rest /= d;
                }
            }
            d += 1;
        }
        if rest > 1 {
            prime_factors.push(rest);
        }
        let generator = (2..q)
            .find(|&g| {
                prime_factors
                    .iter()
                    .all(|&l| self.raw_pow(g, order / l) != 1)
            })
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = acc;
            log[acc as usize] = i as u32;
            acc = self.raw_mul(acc, generator);
        }
        debug_assert_eq!(acc, 1, "generator order must be q-1");
        self.exp = exp;
        self.log = log;
    }

    fn build_sqrt_table(&mut self) {
        let mut tab = vec![NON_SQUARE; self.q as usize];
        // Ascending scan records the smaller root first.
        for y in 0..self.q {
            let s = if y == 0 {
                0
            } else {
                self.exp[((2 * self.log[y as usize] as u64) % (self.q - 1) as u64) as usize]
            };
            if tab[s as usize] == NON_SQUARE {
                tab[s as usize] = y;
            }
        }
        self.sqrt_tab = tab;
    }

    // ---- accessors ----

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// The field order q = p^m.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn has_even_order(&self) -> bool {
        self.p == 2
    }

    /// Base-p digits of the modulus, low degree first.
    pub fn modulus_digits(&self) -> &[u32] {
        &self.modulus
    }

    /// The field literal `p^m`, e.g. `3^2`.
    pub fn literal(&self) -> String {
        format!("{}^{}", self.p, self.m)
    }

    /// The modulus as a polynomial literal (comma-separated digits, low
    /// degree first), e.g. `1,1,1` for t^2+t+1.
    pub fn modulus_literal(&self) -> String {
        self.modulus
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a field literal `p^m` (a bare `p` means m = 1).
    pub fn parse_spec(literal: &str) -> Result<(u32, u32), FieldError> {
        let bad = || FieldError::BadFieldLiteral(literal.to_string());
        let (p_str, m_str) = match literal.split_once('^') {
            Some((p, m)) => (p, m),
            None => (literal, "1"),
        };
        let p: u32 = p_str.trim().parse().map_err(|_| bad())?;
        let m: u32 = m_str.trim().parse().map_err(|_| bad())?;
        Ok((p, m))
    }

    pub fn from_literal(literal: &str) -> Result<Field, FieldError> {
        let (p, m) = Self::parse_spec(literal)?;
        Field::new(p, m)
    }

    // ---- element constructors ----

    pub fn elt(&self, encoding: u32) -> Felt {
        assert!(
            encoding < self.q,
            "encoding {} out of range for GF({})",
            encoding,
            self.literal()
        );
        Felt {
            repr: encoding,
            tag: self.tag,
        }
    }

    pub fn try_elt(&self, encoding: u64) -> Result<Felt, FieldError> {
        if encoding >= self.q as u64 {
            return Err(FieldError::EncodingOutOfRange(encoding, self.q));
        }
        Ok(Felt {
            repr: encoding as u32,
            tag: self.tag,
        })
    }

    pub fn zero(&self) -> Felt {
        Felt {
            repr: 0,
            tag: self.tag,
        }
    }

    pub fn one(&self) -> Felt {
        Felt {
            repr: 1,
            tag: self.tag,
        }
    }

    /// Embeds an integer via repeated addition of 1 (reduction mod p on the
    /// constant digit); handy for small literals like trace sums.
    pub fn from_int(&self, v: i64) -> Felt {
        let r = v.rem_euclid(self.p as i64) as u32;
        Felt {
            repr: r,
            tag: self.tag,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Felt> + '_ {
        (0..self.q).map(move |r| Felt {
            repr: r,
            tag: self.tag,
        })
    }

    pub fn parse_element(&self, literal: &str) -> Result<Felt, FieldError> {
        let v: u64 = literal
            .trim()
            .parse()
            .map_err(|_| FieldError::BadElementLiteral(literal.to_string()))?;
        self.try_elt(v)
    }

    /// True iff the element belongs to this field instance.
    pub fn owns(&self, a: Felt) -> bool {
        a.tag == self.tag
    }

    fn check(&self, a: Felt) -> u32 {
        assert_eq!(
            a.tag,
            self.tag,
            "operand from a different field passed to GF({})",
            self.literal()
        );
        a.repr
    }

    // ---- arithmetic ----

    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        let (a, b) = (self.check(a), self.check(b));
        let repr = if self.p == 2 {
            a ^ b
        } else if self.m == 1 {
            (a + b) % self.p
        } else {
            let da = self.to_digits(a);
            let db = self.to_digits(b);
            let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
            self.from_digits(&sum)
        };
        Felt {
            repr,
            tag: self.tag,
        }
    }

    pub fn neg(&self, a: Felt) -> Felt {
        let a = self.check(a);
        let repr = if self.p == 2 {
            a
        } else if self.m == 1 {
            (self.p - a) % self.p
        } else {
            let da = self.to_digits(a);
            let neg: Vec<u32> = da.iter().map(|x| (self.p - x) % self.p).collect();
            self.from_digits(&neg)
        };
        Felt {
            repr,
            tag: self.tag,
        }
    }

    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        let (a, b) = (self.check(a), self.check(b));
        if a == 0 || b == 0 {
            return self.zero();
        }
        let i = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        Felt {
            repr: self.exp[(i % (self.q - 1) as u64) as usize],
            tag: self.tag,
        }
    }

    pub fn inv(&self, a: Felt) -> Result<Felt, FieldError> {
        let a = self.check(a);
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let i = ((self.q - 1) as u64 - self.log[a as usize] as u64) % (self.q - 1) as u64;
        Ok(Felt {
            repr: self.exp[i as usize],
            tag: self.tag,
        })
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Felt, e: u64) -> Felt {
        let a = self.check(a);
        if e == 0 {
            return self.one();
        }
        if a == 0 {
            return self.zero();
        }
        let i = (self.log[a as usize] as u64 * (e % (self.q - 1) as u64)) % (self.q - 1) as u64;
        Felt {
            repr: self.exp[i as usize],
            tag: self.tag,
        }
    }

    /// True iff some y satisfies y^2 = a. Always true in even characteristic.
    pub fn is_square(&self, a: Felt) -> bool {
        let a = self.check(a);
        self.sqrt_tab[a as usize] != NON_SQUARE
    }

    /// The canonical square root (the root with the smaller encoding), or
    /// None for a non-square.
    pub fn sqrt(&self, a: Felt) -> Option<Felt> {
        let a = self.check(a);
        match self.sqrt_tab[a as usize] {
            NON_SQUARE => None,
            r => Some(Felt {
                repr: r,
                tag: self.tag,
            }),
        }
    }

    /// Discrete log with respect to the table generator; none for zero.
    pub fn dlog(&self, a: Felt) -> Option<u32> {
        let a = self.check(a);
        if a == 0 {
            None
        } else if self.q == 2 {
            Some(0)
        } else {
            Some(self.log[a as usize])
        }
    }

    /// The table generator of the multiplicative group.
    pub fn generator(&self) -> Felt {
        if self.q == 2 {
            self.one()
        } else {
            Felt {
                repr: self.exp[1],
                tag: self.tag,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructs_prime_fields() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.q(), 3);
        assert_eq!(f.modulus_digits(), &[0, 1]);
    }

    #[test]
    fn gf4_modulus_is_unique_quadratic() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.q(), 4);
        // t^2 + t + 1 is the only monic irreducible quadratic over Z/2.
        assert_eq!(f.modulus_digits(), &[1, 1, 1]);
    }

    #[test]
    fn gf9_modulus_found_by_deterministic_scan() {
        // Exhaustive scan over the 9 monic quadratics over Z/3, lex order
        // low-degree-first, lands on x^2 + 1.
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.modulus_digits(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            Field::new(4, 1),
            Err(FieldError::NonPrimeCharacteristic(4))
        ));
        assert!(matches!(
            Field::new(1, 1),
            Err(FieldError::NonPrimeCharacteristic(1))
        ));
        assert!(matches!(Field::new(3, 0), Err(FieldError::ZeroDegree)));
        assert!(matches!(
            Field::new(2, 17),
            Err(FieldError::OrderTooLarge(_))
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.add(f3.elt(2), f3.elt(2)), f3.elt(1));

        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.inv(f5.elt(2)).unwrap(), f5.elt(3));

        // GF(4) with modulus t^2+t+1: t*t = t+1, i.e. 2*2 = 3.
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(f4.mul(f4.elt(2), f4.elt(2)), f4.elt(3));
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = Field::new(7, 1).unwrap();
        assert!(matches!(f.inv(f.zero()), Err(FieldError::ZeroInverse)));
    }

    #[test]
    #[should_panic(expected = "different field")]
    fn mixed_field_operands_panic() {
        let f3 = Field::new(3, 1).unwrap();
        let f5 = Field::new(5, 1).unwrap();
        let _ = f3.add(f3.elt(1), f5.elt(1));
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for (p, m) in [
            (2, 1),
            (3, 1),
            (2, 2),
            (5, 1),
            (7, 1),
            (2, 3),
            (3, 2),
            (11, 1),
            (13, 1),
            (2, 4),
        ] {
            let f = Field::new(p, m).unwrap();
            let elts: Vec<Felt> = f.elements().collect();
            for &a in &elts {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &elts {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &elts {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn square_counts() {
        // Odd q: exactly (q+1)/2 squares (counting 0). Even q: squaring is a
        // bijection.
        for (p, m) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let f = Field::new(p, m).unwrap();
            let squares = f.elements().filter(|&a| f.is_square(a)).count() as u32;
            assert_eq!(squares, (f.q() + 1) / 2);
        }
        for (p, m) in [(2, 1), (2, 2), (2, 3), (2, 4)] {
            let f = Field::new(p, m).unwrap();
            let images: std::collections::HashSet<u32> =
                f.elements().map(|a| f.mul(a, a).encoding()).collect();
            assert_eq!(images.len() as u32, f.q());
        }
    }

    #[test]
    fn sqrt_examples_and_consistency() {
        let f7 = Field::new(7, 1).unwrap();
        assert!(f7.is_square(f7.elt(2)));
        assert!(!f7.is_square(f7.elt(3)));
        assert_eq!(f7.sqrt(f7.elt(2)), Some(f7.elt(3)));

        let f4 = Field::new(2, 2).unwrap();
        for a in f4.elements() {
            assert!(f4.is_square(a));
        }
        assert_eq!(f4.sqrt(f4.elt(2)), Some(f4.elt(3)));

        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.sqrt(f5.elt(2)), None);

        for (p, m) in [(3, 1), (5, 1), (2, 2), (7, 1), (3, 2), (2, 4)] {
            let f = Field::new(p, m).unwrap();
            for a in f.elements() {
                match f.sqrt(a) {
                    Some(r) => assert_eq!(f.mul(r, r), a),
                    None => assert!(!f.is_square(a)),
                }
            }
        }
    }

    #[test]
    fn interned_fields_interoperate() {
        let a = Field::new(3, 2).unwrap();
        let b = Field::new(3, 2).unwrap();
        assert_eq!(a.add(a.elt(4), b.elt(5)), b.add(b.elt(4), a.elt(5)));
        assert_eq!(a, b);
    }

    #[test]
    fn alternate_modulus_is_a_different_field() {
        let a = Field::new(3, 2).unwrap();
        let b = Field::with_modulus(3, 2, vec![2, 1, 1]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn with_modulus_rejects_reducible() {
        // x^2 + 2x + 1 = (x+1)^2 over Z/3.
        assert!(matches!(
            Field::with_modulus(3, 2, vec![1, 2, 1]),
            Err(FieldError::BadModulus)
        ));
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(Field::parse_spec("3^2").unwrap(), (3, 2));
        assert_eq!(Field::parse_spec("7").unwrap(), (7, 1));
        assert!(Field::parse_spec("x^2").is_err());
        let f = Field::from_literal("2^3").unwrap();
        assert_eq!(f.q(), 8);
        assert_eq!(f.parse_element("5").unwrap(), f.elt(5));
        assert!(f.parse_element("8").is_err());
        assert!(f.parse_element("q").is_err());
    }

    #[test]
    fn pow_and_dlog() {
        let f = Field::new(3, 2).unwrap();
        let g = f.generator();
        for e in 0..20u64 {
            let v = f.pow(g, e);
            if e % 8 == 0 {
                assert_eq!(v, f.one());
            }
        }
        for a in f.elements().filter(|a| !a.is_zero()) {
            let e = f.dlog(a).unwrap() as u64;
            assert_eq!(f.pow(g, e), a);
        }
    }
}
