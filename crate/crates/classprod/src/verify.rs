//! Seeded oracle suites: each closed form from the bounds module replayed
//! against direct conjugation, and each counting lemma replayed against
//! exhaustive enumeration. Shared by the `verify` CLI subcommand and the
//! acceptance tests.

use crate::bounds::{self, ceil_half};

use crate::field::{Felt, Field};
use crate::matrices::{Conjugator, Mat};
use crate::polyring::Poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::str::FromStr;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Suite {
    FieldSize,
    XySoln,
    GeneralCase,
    Main1,
    Main2,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::FieldSize => "fieldsize",
            Suite::XySoln => "xysoln",
            Suite::GeneralCase => "generalcase",
            Suite::Main1 => "main1",
            Suite::Main2 => "main2",
        }
    }

    pub const ALL: [Suite; 5] = [
        Suite::FieldSize,
        Suite::XySoln,
        Suite::GeneralCase,
        Suite::Main1,
        Suite::Main2,
    ];
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Suite, String> {
        match s {
            "fieldsize" => Ok(Suite::FieldSize),
            "xysoln" => Ok(Suite::XySoln),
            "generalcase" => Ok(Suite::GeneralCase),
            "main1" => Ok(Suite::Main1),
            "main2" => Ok(Suite::Main2),
            other => Err(format!(
                "unknown suite `{other}`, expected one of fieldsize, xysoln, generalcase, main1, main2"
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub field: String,
    pub modulus: String,
    pub trials: u64,
    pub seed: u64,
    pub checks: u64,
    pub mismatches: u64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn random_elt(field: &Field, rng: &mut ChaCha8Rng) -> Felt {
    field.elt(rng.random_range(0..field.q()))
}

fn random_monic(field: &Field, rng: &mut ChaCha8Rng, deg: usize) -> Poly {
    let coeffs: Vec<Felt> = (0..deg)
        .map(|_| random_elt(field, rng))
        .chain(std::iter::once(field.one()))
        .collect();
    Poly::from_coeffs(field, coeffs)
}

fn random_block(field: &Field, rng: &mut ChaCha8Rng, det_one: bool) -> [Felt; 4] {
    loop {
        let v: [Felt; 4] = std::array::from_fn(|_| random_elt(field, rng));
        let w = field.sub(field.mul(v[0], v[3]), field.mul(v[1], v[2]));
        if det_one {
            if w == field.one() {
                return v;
            }
        } else if !w.is_zero() {
            return v;
        }
    }
}

fn distinct_pair(field: &Field, rng: &mut ChaCha8Rng) -> (Felt, Felt) {
    let u = random_elt(field, rng);
    loop {
        let v = random_elt(field, rng);
        if v != u {
            return (u, v);
        }
    }
}

/// Runs one suite over one field and reports check/mismatch counts.
pub fn run_suite(field: &Field, suite: Suite, trials: u64, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0u64;
    let mut mismatches = 0u64;
    match suite {
        Suite::FieldSize => {
            // Exhaustive: every (a != 0, b, c).
            for a in field.elements().skip(1) {
                for b in field.elements() {
                    for c in field.elements() {
                        let size = bounds::quad_image_size(field, a, b, c).unwrap() as u64;
                        checks += 1;
                        if size < ceil_half(field.q()) {
                            mismatches += 1;
                        }
                        if field.has_even_order() && b.is_zero() && size != field.q() as u64 {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
        Suite::XySoln => {
            let exhaustive = field.q() <= 5;
            let tuples: Vec<[Felt; 5]> = if exhaustive {
                let elts: Vec<Felt> = field.elements().collect();
                let mut out = Vec::new();
                for &a in &elts {
                    for &b in &elts {
                        for &c in &elts {
                            for &d in &elts {
                                for &e in &elts {
                                    out.push([a, b, c, d, e]);
                                }
                            }
                        }
                    }
                }
                out
            } else {
                (0..trials)
                    .map(|_| std::array::from_fn(|_| random_elt(field, &mut rng)))
                    .collect()
            };
            for [a, b, c, d, e] in tuples {
                let (count, witnesses) = bounds::count_solvable_f(field, a, b, c, d, e);
                checks += 1;
                if (count as u64) < field.q() as u64 - 1 {
                    mismatches += 1;
                }
                for (&fenc, &(x, y)) in &witnesses {
                    let fval = field.elt(fenc);
                    let mut acc = field.mul(a, field.mul(x, x));
                    acc = field.sub(acc, field.mul(y, y));
                    acc = field.add(acc, field.mul(b, field.mul(x, y)));
                    acc = field.add(acc, field.mul(c, y));
                    acc = field.add(acc, field.mul(field.sub(d, fval), x));
                    acc = field.add(acc, e);
                    checks += 1;
                    if !acc.is_zero() || x.is_zero() {
                        mismatches += 1;
                    }
                }
                if !field.has_even_order() {
                    // The discriminant solver only promises q - 1 covered
                    // values of f; every witness it does emit must solve the
                    // equation with x != 0.
                    let mut solver_found = 0u64;
                    for fv in field.elements() {
                        checks += 1;
                        if let Some((x, _)) =
                            bounds::solve_f_witness_odd(field, [a, b, c, d, e], fv).unwrap()
                        {
                            solver_found += 1;
                            if x.is_zero() || !witnesses.contains_key(&fv.encoding()) {
                                mismatches += 1;
                            }
                        }
                    }
                    checks += 1;
                    if solver_found < field.q() as u64 - 1 {
                        mismatches += 1;
                    }
                }
            }
        }
        Suite::GeneralCase => {
            for _ in 0..trials {
                let r = [2usize, 3, 4][rng.random_range(0..3)];
                let poly = random_monic(field, &mut rng, r);
                let rmat = Mat::companion(field, &poly).unwrap();
                let [a, b, c, d] = random_block(field, &mut rng, false);
                let closed = bounds::conjugated_companion(field, &rmat, a, b, c, d).unwrap();
                let e = Conjugator::General { a, b, c, d }.build(field, r).unwrap();
                let direct = rmat.conjugate(field, &e).unwrap();
                checks += 1;
                if closed != direct {
                    mismatches += 1;
                }
            }
        }
        Suite::Main1 => {
            for _ in 0..trials {
                match rng.random_range(0..3u32) {
                    0 => {
                        // Case (i): heads are arbitrary block-diagonal fill.
                        let pa = random_monic(field, &mut rng, 3);
                        let pb = random_monic(field, &mut rng, 3);
                        let head_a = Mat::diagonal(
                            field,
                            &[
                                random_elt(field, &mut rng),
                                random_elt(field, &mut rng),
                                random_elt(field, &mut rng),
                            ],
                        );
                        let head_b = Mat::diagonal(
                            field,
                            &[
                                random_elt(field, &mut rng),
                                random_elt(field, &mut rng),
                                random_elt(field, &mut rng),
                            ],
                        );
                        let m =
                            Mat::direct_sum(field, &[head_a, Mat::companion(field, &pa).unwrap()])
                                .unwrap();
                        let n =
                            Mat::direct_sum(field, &[head_b, Mat::companion(field, &pb).unwrap()])
                                .unwrap();
                        let dblock = random_block(field, &mut rng, false);
                        let tr = m.matmul(field, &n).trace(field);
                        let closed = bounds::trace_main1_i(field, &pa, &pb, dblock, tr).unwrap();
                        let e = Conjugator::General {
                            a: dblock[0],
                            b: dblock[1],
                            c: dblock[2],
                            d: dblock[3],
                        }
                        .build(field, 6)
                        .unwrap();
                        let direct = m
                            .conjugate(field, &e)
                            .unwrap()
                            .matmul(field, &n)
                            .trace(field);
                        checks += 1;
                        if closed != direct {
                            mismatches += 1;
                        }
                    }
                    1 => {
                        // Case (ii): r = 2 against s in {2, 3}.
                        let s = 2 + rng.random_range(0..2usize);
                        let pa = random_monic(field, &mut rng, 2);
                        let pb = random_monic(field, &mut rng, s);
                        let mut m_blocks = Vec::new();
                        for _ in 0..s - 2 {
                            m_blocks.push(Mat::diagonal(field, &[random_elt(field, &mut rng)]));
                        }
                        m_blocks.push(Mat::companion(field, &pa).unwrap());
                        let m = Mat::direct_sum(field, &m_blocks).unwrap();
                        let n = Mat::companion(field, &pb).unwrap();
                        let dblock = random_block(field, &mut rng, false);
                        let tr = m.matmul(field, &n).trace(field);
                        let closed = bounds::trace_main1_ii(field, &pa, &pb, dblock, tr).unwrap();
                        let e = Conjugator::General {
                            a: dblock[0],
                            b: dblock[1],
                            c: dblock[2],
                            d: dblock[3],
                        }
                        .build(field, s)
                        .unwrap();
                        let direct = m
                            .conjugate(field, &e)
                            .unwrap()
                            .matmul(field, &n)
                            .trace(field);
                        checks += 1;
                        if closed != direct {
                            mismatches += 1;
                        }
                    }
                    _ => {
                        // Case (iii): companion tail against a diagonal pair.
                        if field.q() < 2 {
                            continue;
                        }
                        let r = 2 + rng.random_range(0..2usize);
                        let pa = random_monic(field, &mut rng, r);
                        let m = Mat::companion(field, &pa).unwrap();
                        let (u, v) = distinct_pair(field, &mut rng);
                        let mut n_entries: Vec<Felt> =
                            (0..r - 2).map(|_| random_elt(field, &mut rng)).collect();
                        n_entries.push(u);
                        n_entries.push(v);
                        let n = Mat::diagonal(field, &n_entries);
                        let dblock = random_block(field, &mut rng, false);
                        let tr = m.matmul(field, &n).trace(field);
                        let closed = bounds::trace_main1_iii(field, &pa, u, v, dblock, tr).unwrap();
                        let e = Conjugator::General {
                            a: dblock[0],
                            b: dblock[1],
                            c: dblock[2],
                            d: dblock[3],
                        }
                        .build(field, r)
                        .unwrap();
                        let direct = m
                            .conjugate(field, &e)
                            .unwrap()
                            .matmul(field, &n)
                            .trace(field);
                        checks += 1;
                        if closed != direct {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
        Suite::Main2 => {
            for _ in 0..trials {
                let (u1, v1) = distinct_pair(field, &mut rng);
                let (u2, v2) = distinct_pair(field, &mut rng);
                let head_dim = rng.random_range(0..2usize);
                let mut c_entries: Vec<Felt> =
                    (0..head_dim).map(|_| random_elt(field, &mut rng)).collect();
                let mut n_entries = c_entries.clone();
                c_entries.push(u1);
                c_entries.push(v1);
                n_entries.push(u2);
                n_entries.push(v2);
                let cmat = Mat::diagonal(field, &c_entries);
                let nmat = Mat::diagonal(field, &n_entries);
                let dblock = random_block(field, &mut rng, true);
                let tr = cmat.matmul(field, &nmat).trace(field);
                let closed = bounds::trace_main2(field, u1, v1, u2, v2, dblock, tr).unwrap();
                let e = Conjugator::DetOne {
                    a: dblock[0],
                    b: dblock[1],
                    c: dblock[2],
                    d: dblock[3],
                }
                .build(field, head_dim + 2)
                .unwrap();
                let direct = cmat
                    .conjugate(field, &e)
                    .unwrap()
                    .matmul(field, &nmat)
                    .trace(field);
                checks += 1;
                if closed != direct {
                    mismatches += 1;
                }
                // The conjugated diagonal block itself.
                let closed_block = bounds::conjugated_diag_pair(
                    field, u1, v1, dblock[0], dblock[1], dblock[2], dblock[3],
                );
                let e2 =
                    Mat::from_rows(vec![vec![dblock[0], dblock[1]], vec![dblock[2], dblock[3]]])
                        .unwrap();
                let direct_block = Mat::diagonal(field, &[u1, v1])
                    .conjugate(field, &e2)
                    .unwrap();
                checks += 1;
                if closed_block
                    != [
                        direct_block.get(0, 0),
                        direct_block.get(0, 1),
                        direct_block.get(1, 0),
                        direct_block.get(1, 1),
                    ]
                {
                    mismatches += 1;
                }
            }
        }
    }
    SuiteOutcome {
        suite: suite.name().to_string(),
        field: field.literal(),
        modulus: field.modulus_literal(),
        trials,
        seed,
        checks,
        mismatches,
    }
}

/// Sanity check used by tests: the reachable determinants of the
/// centralizer of a primary cyclic block really are the e-th powers.
pub fn centralizer_determinants(field: &Field, m: &Mat) -> std::collections::BTreeSet<u32> {
    let n = m.n();
    let q = field.q() as u64;
    let mut dets = std::collections::BTreeSet::new();
    let total = q.pow(n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut acc = Mat::zeros(field, n);
        let mut power = Mat::identity(field, n);
        for _ in 0..n {
            let c = field.elt((rest % q) as u32);
            rest /= q;
            if !c.is_zero() {
                let scaled = Mat::from_fn(n, |i, j| field.mul(c, power.get(i, j)));
                acc = acc.add(field, &scaled);
            }
            power = power.matmul(field, m);
        }
        let d = acc.det(field);
        if !d.is_zero() {
            dets.insert(d.encoding());
        }
    }
    dets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_small_fields() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let field = Field::new(p, m).unwrap();
            for suite in Suite::ALL {
                let outcome = run_suite(&field, suite, 50, 42);
                assert!(
                    outcome.passed(),
                    "suite {} failed on GF({}) with {} mismatches",
                    outcome.suite,
                    outcome.field,
                    outcome.mismatches
                );
                assert!(outcome.checks > 0);
            }
        }
    }

    #[test]
    fn stiff_block_determinants_are_exponent_powers() {
        // diag twists of a full-size (x-c)^e companion block reach exactly
        // the e-th powers of F^*.
        let f3 = Field::new(3, 1).unwrap();
        let p = Poly::parse(&f3, "1,1,1").unwrap(); // (x-1)^2
        let c = Mat::companion(&f3, &p).unwrap();
        let dets = centralizer_determinants(&f3, &c);
        // Squares of F_3^* = {1}.
        assert_eq!(dets.into_iter().collect::<Vec<_>>(), vec![1]);

        let f5 = Field::new(5, 1).unwrap();
        let p = Poly::parse(&f5, "1,3,3,1").unwrap(); // (x+1)^3
        let c = Mat::companion(&f5, &p).unwrap();
        let dets = centralizer_determinants(&f5, &c);
        // Cubes of F_5^* = all of F_5^* since gcd(3,4) = 1.
        assert_eq!(dets.len(), 4);
    }

    #[test]
    fn suite_parsing() {
        assert_eq!(Suite::from_str("main1").unwrap(), Suite::Main1);
        assert!(Suite::from_str("bogus").is_err());
    }
}
