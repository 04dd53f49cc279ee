//! Group-level engine: enumerate GL(n,q) and SL(n,q), partition them into
//! conjugacy classes, compute exact eta(A^G B^G), and scan min(G).
//!
//! Elements are stored as packed base-q integer codes. Classes are orbits
//! under conjugation by a transvection generating set (plus a primitive
//! diagonal for GL), computed by breadth-first closure — exact at the
//! element budgets this crate accepts. GL classes are additionally keyed by
//! their invariant factors; SL classes may split inside a GL class, so their
//! identity comes from the orbit partition itself.

use crate::canonical::{self, ClassId};
use crate::field::Field;
use crate::matrices::Mat;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Default cap on enumerated group order.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("group order {order} exceeds the element budget {budget}")]
    BudgetExceeded { order: u128, budget: u64 },
    #[error("matrix is not a member of the group")]
    NotInGroup,
    #[error("group dimension must be at least 2")]
    InvalidDimension,
    #[error("group has no non-central conjugacy class")]
    NoNonCentralClasses,
    #[error("unknown group family `{0}`, expected GL or SL")]
    BadFamily(String),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum GroupFamily {
    Gl,
    Sl,
}

impl GroupFamily {
    pub fn name(self) -> &'static str {
        match self {
            GroupFamily::Gl => "GL",
            GroupFamily::Sl => "SL",
        }
    }
}

impl FromStr for GroupFamily {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, GroupError> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Ok(GroupFamily::Gl),
            "SL" => Ok(GroupFamily::Sl),
            other => Err(GroupError::BadFamily(other.to_string())),
        }
    }
}

/// GL(n,q) or SL(n,q) over a constructed field.
#[derive(Clone, Debug)]
pub struct Group {
    family: GroupFamily,
    n: usize,
    field: Field,
    order: u128,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.family.name(), self.n, self.field.q())
    }
}

impl Group {
    pub fn new(family: GroupFamily, n: usize, field: Field) -> Result<Group, GroupError> {
        if n < 2 {
            return Err(GroupError::InvalidDimension);
        }
        let q = field.q() as u128;
        let qn = q.pow(n as u32);
        let mut order: u128 = 1;
        for i in 0..n {
            order = order.saturating_mul(qn - q.pow(i as u32));
        }
        if family == GroupFamily::Sl {
            order /= q - 1;
        }
        Ok(Group {
            family,
            n,
            field,
            order,
        })
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// |GL(n,q)| = prod_{i<n} (q^n - q^i); |SL(n,q)| = |GL(n,q)|/(q-1).
    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn is_member(&self, a: &Mat) -> bool {
        if a.n() != self.n || a.entries().iter().any(|&e| !self.field.owns(e)) {
            return false;
        }
        let d = a.det(&self.field);
        match self.family {
            GroupFamily::Gl => !d.is_zero(),
            GroupFamily::Sl => d == self.field.one(),
        }
    }

    /// Central elements are exactly the scalar members of the group; for SL
    /// that means aI with a^n = 1.
    pub fn is_central(&self, a: &Mat) -> bool {
        a.is_scalar(&self.field) && self.is_member(a)
    }

    pub fn encode(&self, a: &Mat) -> u64 {
        let q = self.field.q() as u64;
        let mut code = 0u64;
        for &e in a.entries().iter().rev() {
            code = code * q + e.encoding() as u64;
        }
        code
    }

    pub fn decode(&self, code: u64) -> Mat {
        let q = self.field.q() as u64;
        let n = self.n;
        let mut rest = code;
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            entries.push(self.field.elt((rest % q) as u32));
            rest /= q;
        }
        Mat::from_fn(n, |i, j| entries[i * n + j])
    }

    fn check_budget(&self, budget: u64) -> Result<(), GroupError> {
        if self.order > budget as u128 {
            return Err(GroupError::BudgetExceeded {
                order: self.order,
                budget,
            });
        }
        Ok(())
    }

    /// Every element exactly once, as packed codes in ascending order.
    pub fn enumerate(&self, budget: u64) -> Result<Vec<u64>, GroupError> {
        self.check_budget(budget)?;
        let q = self.field.q() as u64;
        let total = q.pow((self.n * self.n) as u32);
        let one = self.field.one();
        let codes: Vec<u64> = (0..total)
            .into_par_iter()
            .filter(|&code| {
                let m = self.decode(code);
                let d = m.det(&self.field);
                match self.family {
                    GroupFamily::Gl => !d.is_zero(),
                    GroupFamily::Sl => d == one,
                }
            })
            .collect();
        debug_assert_eq!(codes.len() as u128, self.order);
        Ok(codes)
    }

    /// Conjugation generators: all transvections I + c*E_ij, plus a
    /// primitive diagonal for GL. Orbits under these generate the full
    /// conjugation action.
    fn generators(&self) -> Vec<Mat> {
        let f = &self.field;
        let mut gens = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                for c in f.elements().skip(1) {
                    let mut t = Mat::identity(f, self.n);
                    t.set(i, j, c);
                    gens.push(t);
                }
            }
        }
        if self.family == GroupFamily::Gl && f.q() > 2 {
            let mut d = Mat::identity(f, self.n);
            d.set(0, 0, f.generator());
            gens.push(d);
        }
        gens
    }
}

/// Canonical class label: invariant factors (a complete GL invariant) plus,
/// for SL, the smallest member code of the orbit to separate split classes.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct ClassKey {
    pub invariant_factors: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sl_orbit_min: Option<u64>,
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|c| {
                c.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", parts.join(" | "))?;
        if let Some(m) = self.sl_orbit_min {
            write!(f, " #orbit{m}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ClassInfo {
    pub rep: u64,
    pub members: Vec<u64>,
    pub key: ClassKey,
    pub class_id: ClassId,
    pub central: bool,
}

impl ClassInfo {
    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }
}

/// The enumerated group with its conjugacy-class partition.
pub struct GroupData {
    codes: Vec<u64>,
    class_of: HashMap<u64, u32>,
    classes: Vec<ClassInfo>,
}

impl GroupData {
    /// Enumerates the group and partitions it into conjugacy classes by
    /// breadth-first orbit closure over the conjugation generators.
    pub fn build(group: &Group, budget: u64) -> Result<GroupData, GroupError> {
        let codes = group.enumerate(budget)?;
        let f = &group.field;
        let gens: Vec<(Mat, Mat)> = group
            .generators()
            .into_iter()
            .map(|g| {
                let ginv = g.inverse(f).expect("generators are invertible");
                (g, ginv)
            })
            .collect();
        let mut class_of: HashMap<u64, u32> = HashMap::with_capacity(codes.len());
        let mut classes: Vec<ClassInfo> = Vec::new();
        for &start in &codes {
            if class_of.contains_key(&start) {
                continue;
            }
            let idx = classes.len() as u32;
            let mut members = vec![start];
            let mut queue = vec![start];
            class_of.insert(start, idx);
            while let Some(code) = queue.pop() {
                let x = group.decode(code);
                for (g, ginv) in &gens {
                    let y = ginv.matmul(f, &x).matmul(f, g);
                    let ycode = group.encode(&y);
                    if let std::collections::hash_map::Entry::Vacant(e) = class_of.entry(ycode) {
                        e.insert(idx);
                        members.push(ycode);
                        queue.push(ycode);
                    }
                }
            }
            members.sort_unstable();
            let rep_mat = group.decode(members[0]);
            let class_id = canonical::class_id(f, &rep_mat);
            let key = ClassKey {
                invariant_factors: class_id.encodings(),
                sl_orbit_min: match group.family {
                    GroupFamily::Gl => None,
                    GroupFamily::Sl => Some(members[0]),
                },
            };
            classes.push(ClassInfo {
                rep: members[0],
                members,
                key,
                class_id,
                central: rep_mat.is_scalar(f),
            });
        }
        let total: u64 = classes.iter().map(|c| c.size()).sum();
        assert_eq!(total as u128, group.order(), "class sizes must sum to |G|");
        assert!(
            classes
                .iter()
                .all(|c| group.order().is_multiple_of(c.size() as u128)),
            "class sizes must divide |G|"
        );
        Ok(GroupData {
            codes,
            class_of,
            classes,
        })
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class_index_of(&self, code: u64) -> Option<u32> {
        self.class_of.get(&code).copied()
    }

    pub fn non_central_indices(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| !self.classes[i].central)
            .collect()
    }
}

/// Field and group coordinates carried by every report, including the
/// modulus, so element encodings are reproducible by third parties.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GroupDesc {
    pub family: String,
    pub n: usize,
    pub p: u32,
    pub m: u32,
    pub q: u32,
    pub modulus: String,
    pub order: u64,
}

impl GroupDesc {
    pub fn of(group: &Group) -> GroupDesc {
        GroupDesc {
            family: group.family.name().to_string(),
            n: group.n,
            p: group.field.p(),
            m: group.field.m(),
            q: group.field.q(),
            modulus: group.field.modulus_literal(),
            order: group.order as u64,
        }
    }
}

/// Result of an eta computation: the exact class count of the product when
/// computed, and/or the certified lower bound with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct EtaReport {
    pub group: GroupDesc,
    pub class_a: ClassKey,
    pub class_b: ClassKey,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_exact: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_set_size: Option<u64>,
}

impl EtaReport {
    /// The cross-field consistency demanded of every report.
    pub fn assert_invariants(&self) {
        if let (Some(eta), Some(t)) = (self.eta_exact, self.trace_set_size) {
            assert!(eta >= t, "eta_exact {eta} < trace_set_size {t}");
        }
        if let (Some(eta), Some(lb)) = (self.eta_exact, self.lower_bound) {
            assert!(eta >= lb, "eta_exact {eta} < lower_bound {lb}");
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EtaTableRow {
    pub class_a: ClassKey,
    pub class_b: ClassKey,
    pub eta: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinScanReport {
    pub group: GroupDesc,
    pub min: u64,
    pub argmin: (ClassKey, ClassKey),
    pub table: Vec<EtaTableRow>,
}

impl Group {
    fn class_of_mat(&self, data: &GroupData, a: &Mat) -> Result<u32, GroupError> {
        if !self.is_member(a) {
            return Err(GroupError::NotInGroup);
        }
        data.class_index_of(self.encode(a))
            .ok_or(GroupError::NotInGroup)
    }

    /// Distinct classes met by products of the two classes, computed from
    /// {X * B : X in A's class}: every product X*Y with Y in B's class is
    /// conjugate to such an element, so the reduction is exact while costing
    /// |A^G| products instead of |A^G| * |B^G|.
    fn eta_of_classes(&self, data: &GroupData, ca: usize, cb: usize) -> u64 {
        // Conjugating the smaller class is the same count by symmetry.
        let (ca, cb) = if data.classes[ca].size() <= data.classes[cb].size() {
            (ca, cb)
        } else {
            (cb, ca)
        };
        let f = &self.field;
        let b = data.classes[cb].rep;
        let bmat = self.decode(b);
        let members = &data.classes[ca].members;
        let hit: HashSet<u32> = members
            .par_iter()
            .fold(HashSet::new, |mut acc, &xcode| {
                let product = self.decode(xcode).matmul(f, &bmat);
                acc.insert(
                    data.class_index_of(self.encode(&product))
                        .expect("products stay in the group"),
                );
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        hit.len() as u64
    }

    /// Exact eta(A^G B^G).
    pub fn eta_exact(&self, data: &GroupData, a: &Mat, b: &Mat) -> Result<EtaReport, GroupError> {
        let ca = self.class_of_mat(data, a)? as usize;
        let cb = self.class_of_mat(data, b)? as usize;
        let eta = self.eta_of_classes(data, ca, cb);
        Ok(EtaReport {
            group: GroupDesc::of(self),
            class_a: data.classes[ca].key.clone(),
            class_b: data.classes[cb].key.clone(),
            eta_exact: Some(eta),
            lower_bound: None,
            bound_path: None,
            trace_set_size: None,
        })
    }

    /// Independent route for eta: classes met by the full product set
    /// {X * Y}. Quadratic in class size; the oracle the reduction is
    /// checked against on tiny groups.
    pub fn eta_exact_naive(&self, data: &GroupData, a: &Mat, b: &Mat) -> Result<u64, GroupError> {
        let ca = self.class_of_mat(data, a)? as usize;
        let cb = self.class_of_mat(data, b)? as usize;
        let f = &self.field;
        let mut hit = HashSet::new();
        for &x in &data.classes[ca].members {
            let xm = self.decode(x);
            for &y in &data.classes[cb].members {
                let product = xm.matmul(f, &self.decode(y));
                hit.insert(data.class_index_of(self.encode(&product)).unwrap());
            }
        }
        Ok(hit.len() as u64)
    }

    /// Minimum of eta over all unordered pairs of non-central classes
    /// (unordered is enough: class products commute), with the full table.
    pub fn min_scan(&self, data: &GroupData) -> Result<MinScanReport, GroupError> {
        let non_central = data.non_central_indices();
        if non_central.is_empty() {
            return Err(GroupError::NoNonCentralClasses);
        }
        let mut pairs = Vec::new();
        for (pos, &i) in non_central.iter().enumerate() {
            for &j in &non_central[pos..] {
                pairs.push((i, j));
            }
        }
        let etas: Vec<u64> = pairs
            .par_iter()
            .map(|&(i, j)| self.eta_of_classes(data, i, j))
            .collect();
        let table: Vec<EtaTableRow> = pairs
            .iter()
            .zip(&etas)
            .map(|(&(i, j), &eta)| EtaTableRow {
                class_a: data.classes[i].key.clone(),
                class_b: data.classes[j].key.clone(),
                eta,
            })
            .collect();
        let best = etas
            .iter()
            .enumerate()
            .min_by_key(|&(idx, &eta)| (eta, idx))
            .map(|(idx, _)| idx)
            .unwrap();
        Ok(MinScanReport {
            group: GroupDesc::of(self),
            min: etas[best],
            argmin: (table[best].class_a.clone(), table[best].class_b.clone()),
            table,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(family: GroupFamily, n: usize, p: u32, m: u32) -> Group {
        Group::new(family, n, Field::new(p, m).unwrap()).unwrap()
    }

    fn mat(field: &Field, literal: &str) -> Mat {
        Mat::parse(field, literal).unwrap()
    }

    #[test]
    fn order_formulas() {
        assert_eq!(group(GroupFamily::Gl, 2, 2, 1).order(), 6);
        assert_eq!(group(GroupFamily::Sl, 2, 3, 1).order(), 24);
        assert_eq!(group(GroupFamily::Gl, 3, 3, 1).order(), 11232);
        assert_eq!(group(GroupFamily::Gl, 2, 13, 1).order(), 26208);
    }

    #[test]
    fn enumeration_counts_match_orders() {
        for (fam, n, p, m) in [
            (GroupFamily::Gl, 2, 2, 1),
            (GroupFamily::Gl, 2, 3, 1),
            (GroupFamily::Sl, 2, 3, 1),
            (GroupFamily::Gl, 2, 2, 2),
            (GroupFamily::Sl, 3, 2, 1),
        ] {
            let g = group(fam, n, p, m);
            let codes = g.enumerate(DEFAULT_BUDGET).unwrap();
            assert_eq!(codes.len() as u128, g.order());
        }
    }

    #[test]
    fn budget_refusal() {
        let g = group(GroupFamily::Gl, 2, 3, 1);
        assert!(matches!(
            g.enumerate(47),
            Err(GroupError::BudgetExceeded {
                order: 48,
                budget: 47
            })
        ));
        // GL(4,3) exceeds the default budget.
        let big = group(GroupFamily::Gl, 4, 3, 1);
        assert!(big.order() > DEFAULT_BUDGET as u128);
        assert!(matches!(
            big.enumerate(DEFAULT_BUDGET),
            Err(GroupError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn class_counts() {
        let g = group(GroupFamily::Gl, 2, 2, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        assert_eq!(data.classes().len(), 3);

        let g = group(GroupFamily::Gl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        // Cross-check against the count q^2 - 1.
        assert_eq!(data.classes().len(), 8);

        let g = group(GroupFamily::Sl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        assert_eq!(data.classes().len(), 7);
    }

    #[test]
    fn naive_partition_agrees_on_tiny_groups() {
        // Oracle: partition by conjugating with every group element.
        for (p, expected) in [(2u32, 3usize), (3, 8)] {
            let g = group(GroupFamily::Gl, 2, p, 1);
            let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
            let f = g.field();
            let all: Vec<Mat> = data.codes().iter().map(|&c| g.decode(c)).collect();
            let mut seen: Vec<u64> = Vec::new();
            let mut orbit_count = 0;
            for a in &all {
                let acode = g.encode(a);
                if seen.contains(&acode) {
                    continue;
                }
                orbit_count += 1;
                let orbit: HashSet<u64> = all
                    .iter()
                    .map(|u| g.encode(&a.conjugate(f, u).unwrap()))
                    .collect();
                let idx = data.class_index_of(acode).unwrap();
                for &m in &orbit {
                    assert_eq!(data.class_index_of(m), Some(idx));
                    seen.push(m);
                }
                assert_eq!(orbit.len() as u64, data.classes()[idx as usize].size());
            }
            assert_eq!(orbit_count, expected);
        }
    }

    #[test]
    fn sl_classes_split_gl_classes() {
        // The GL(2,3) unipotent class restricted to SL(2,3) splits in two.
        let g = group(GroupFamily::Sl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        let f = g.field();
        let u = mat(f, "1,1;0,1");
        let u2 = mat(f, "1,2;0,1");
        let ia = data.class_index_of(g.encode(&u)).unwrap();
        let ib = data.class_index_of(g.encode(&u2)).unwrap();
        assert_ne!(ia, ib, "split classes must get distinct orbit keys");
        assert_eq!(
            canonical::class_id(f, &u),
            canonical::class_id(f, &u2),
            "same GL class id"
        );
        assert_eq!(data.classes()[ia as usize].size(), 4);
        assert_eq!(data.classes()[ib as usize].size(), 4);
    }

    #[test]
    fn eta_examples() {
        let g = group(GroupFamily::Gl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        let f = g.field();

        // Scalar A collapses the product to a single class.
        let report = g
            .eta_exact(&data, &Mat::scalar(f, 2, f.elt(2)), &mat(f, "1,1;0,1"))
            .unwrap();
        assert_eq!(report.eta_exact, Some(1));

        let u = mat(f, "1,1;0,1");
        let report = g.eta_exact(&data, &u, &u).unwrap();
        assert!(report.eta_exact.unwrap() >= 2);
        assert_eq!(
            report.eta_exact.unwrap(),
            g.eta_exact_naive(&data, &u, &u).unwrap()
        );
    }

    #[test]
    fn eta_rejects_non_members() {
        let g = group(GroupFamily::Sl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        let f = g.field();
        let not_sl = mat(f, "2,0;0,1");
        assert!(matches!(
            g.eta_exact(&data, &not_sl, &not_sl),
            Err(GroupError::NotInGroup)
        ));
    }

    #[test]
    fn eta_is_symmetric() {
        let g = group(GroupFamily::Gl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        let reps: Vec<Mat> = data.classes().iter().map(|c| g.decode(c.rep)).collect();
        for a in &reps {
            for b in &reps {
                let ab = g.eta_exact(&data, a, b).unwrap().eta_exact;
                let ba = g.eta_exact(&data, b, a).unwrap().eta_exact;
                assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn min_scan_reproduces_reference_values() {
        let g = group(GroupFamily::Gl, 2, 3, 1);
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        let report = g.min_scan(&data).unwrap();
        assert_eq!(report.min, 2);

        let g = Group::new(GroupFamily::Gl, 2, Field::new(2, 2).unwrap()).unwrap();
        let data = GroupData::build(&g, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.min_scan(&data).unwrap().min, 3);
    }

    #[test]
    fn central_detection() {
        let gl = group(GroupFamily::Gl, 2, 3, 1);
        let f = gl.field();
        assert!(gl.is_central(&Mat::scalar(f, 2, f.elt(2))));
        assert!(!gl.is_central(&mat(f, "1,1;0,1")));

        let sl = group(GroupFamily::Sl, 2, 3, 1);
        // 2I has det 4 = 1 in GF(3), so it is central in SL(2,3).
        assert!(sl.is_central(&Mat::scalar(f, 2, f.elt(2))));
    }
}
