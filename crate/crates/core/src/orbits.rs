//! Partition calculus for nilpotent orbits of sl, sp and so.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::{AlgebraFamily, Family};

/// Weakly decreasing list of positive parts. The empty partition is the
/// zero orbit of the zero algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts into decreasing order and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// `[1^k]`, the zero orbit of gl(k).
    pub fn ones(k: usize) -> Self {
        Partition(vec![1; k])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn largest(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Multiplicity r_i.
    pub fn mult(&self, i: u32) -> usize {
        self.0.iter().filter(|&&x| x == i).count()
    }

    /// Distinct parts, decreasing.
    pub fn distinct(&self) -> Vec<u32> {
        let mut d = self.0.clone();
        d.dedup();
        d
    }

    pub fn transpose(&self) -> Partition {
        let d = self.largest();
        Partition(
            (1..=d)
                .map(|j| self.0.iter().filter(|&&x| x >= j).count() as u32)
                .collect(),
        )
    }

    /// Partial sums of `self` bound those of `other` from above.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.sum() != other.sum() {
            return false;
        }
        let n = self.len().max(other.len());
        let (mut a, mut b) = (0u64, 0u64);
        for k in 0..n {
            a += u64::from(self.0.get(k).copied().unwrap_or(0));
            b += u64::from(other.0.get(k).copied().unwrap_or(0));
            if a < b {
                return false;
            }
        }
        true
    }

    /// Componentwise sum after padding with zeros.
    pub fn box_add(&self, other: &Partition, scale: u32) -> Partition {
        let n = self.len().max(other.len());
        Partition::new(
            (0..n)
                .map(|k| self.0.get(k).copied().unwrap_or(0) + scale * other.0.get(k).copied().unwrap_or(0))
                .collect(),
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitFamily {
    Sl,
    Sp,
    SoB,
    SoD,
}

impl OrbitFamily {
    pub fn of(fam: Family) -> Self {
        match fam {
            Family::A => OrbitFamily::Sl,
            Family::B => OrbitFamily::SoB,
            Family::C => OrbitFamily::Sp,
            Family::D => OrbitFamily::SoD,
        }
    }

    pub fn is_so(self) -> bool {
        matches!(self, OrbitFamily::SoB | OrbitFamily::SoD)
    }

    /// Parity of the parts that must come with even multiplicity, and of
    /// the special members in type II inductions (sp: even, so: odd).
    fn special_parity(self) -> Option<u32> {
        match self {
            OrbitFamily::Sl => None,
            OrbitFamily::Sp => Some(0),
            OrbitFamily::SoB | OrbitFamily::SoD => Some(1),
        }
    }

    /// Parts of this parity need even multiplicity.
    fn constrained_parity(self) -> Option<u32> {
        self.special_parity().map(|p| 1 - p)
    }

    /// Size of the natural representation for rank `n`.
    pub fn natural_dim(self, n: usize) -> usize {
        let fam = match self {
            OrbitFamily::Sl => Family::A,
            OrbitFamily::Sp => Family::C,
            OrbitFamily::SoB => Family::B,
            OrbitFamily::SoD => Family::D,
        };
        AlgebraFamily { family: fam, rank: n }.natural_dim()
    }

    /// Growth of the partition sum when a gl(k) block is absorbed.
    pub fn induction_growth(self, k: usize) -> usize {
        if self == OrbitFamily::Sl {
            k
        } else {
            2 * k
        }
    }
}

impl fmt::Display for OrbitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitFamily::Sl => "sl",
            OrbitFamily::Sp => "sp",
            OrbitFamily::SoB => "so(odd)",
            OrbitFamily::SoD => "so(even)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitId {
    pub family: OrbitFamily,
    pub dim: usize,
    pub partition: Partition,
}

impl OrbitId {
    pub fn new(family: OrbitFamily, partition: Partition) -> Self {
        OrbitId {
            family,
            dim: partition.sum(),
            partition,
        }
    }
}

/// First part of the constrained parity whose multiplicity is odd.
fn first_violation(family: OrbitFamily, p: &Partition) -> Option<u32> {
    let parity = family.constrained_parity()?;
    p.distinct()
        .into_iter()
        .find(|&x| x % 2 == parity && p.mult(x) % 2 == 1)
}

pub fn satisfies_parity(family: OrbitFamily, p: &Partition) -> bool {
    first_violation(family, p).is_none()
}

pub fn validate_orbit(o: &OrbitId) -> Result<()> {
    let sum = o.partition.sum();
    if sum != o.dim {
        return Err(Error::SumMismatch { sum, expected: o.dim });
    }
    if let Some(part) = first_violation(o.family, &o.partition) {
        return Err(Error::ParityViolation {
            part,
            multiplicity: o.partition.mult(part),
        });
    }
    if o.family.is_so() && !o.partition.is_empty() && o.partition.parts().iter().all(|x| x % 2 == 0) {
        return Err(Error::VeryEvenUnsupported);
    }
    Ok(())
}

/// Largest partition below `p` in dominance order obeying the family's
/// parity rule. Greedy: lower the last copy of the largest offending part
/// and raise the first later part that is at least two smaller.
pub fn x_collapse(family: OrbitFamily, p: &Partition) -> Partition {
    assert!(
        family != OrbitFamily::Sp || p.sum().is_multiple_of(2),
        "no symplectic partition of odd size {}",
        p.sum()
    );
    let mut parts = p.parts().to_vec();
    while let Some(q) = first_violation(family, &Partition(parts.clone())) {
        let j = parts.iter().rposition(|&x| x == q).expect("violating part present");
        parts[j] -= 1;
        match parts[j + 1..].iter().position(|&x| x + 1 < q) {
            Some(off) => parts[j + 1 + off] += 1,
            None => parts.push(1),
        }
        parts.retain(|&x| x > 0);
    }
    Partition(parts)
}

/// Induction from a classical factor and a gl(k) block carrying `q`:
/// collapse of `p ⊞ 2q` (sl: `p ⊞ q`, no collapse).
pub fn induce(family: OrbitFamily, p: &Partition, k: usize, q: &Partition) -> Result<Partition> {
    if q.sum() != k {
        return Err(Error::InvalidBlock(format!("{q} does not partition {k}")));
    }
    Ok(match family {
        OrbitFamily::Sl => p.box_add(q, 1),
        _ => x_collapse(family, &p.box_add(q, 2)),
    })
}

/// Partition whose transpose is `q1ᵀ + q2ᵀ`: the union of the parts.
pub fn gl_merge(q1: &Partition, q2: &Partition) -> Partition {
    q1.transpose().box_add(&q2.transpose(), 1).transpose()
}

/// Inverse of a type II step at the member `i`: parts above `i` drop by
/// two, the two copies of `i` become `i − 1`.
pub fn un_induce(family: OrbitFamily, pbar: &Partition, i: u32) -> Result<Partition> {
    let parity = family
        .special_parity()
        .ok_or_else(|| Error::PreconditionViolated("sl has no type II inductions".into()))?;
    if i % 2 != parity {
        return Err(Error::PreconditionViolated(format!(
            "member {i} has the wrong parity for {family}"
        )));
    }
    if pbar.mult(i) != 2 {
        return Err(Error::PreconditionViolated(format!(
            "member {i} has multiplicity {} instead of 2",
            pbar.mult(i)
        )));
    }
    Ok(Partition::new(
        pbar.parts()
            .iter()
            .map(|&x| match x.cmp(&i) {
                std::cmp::Ordering::Greater => x - 2,
                std::cmp::Ordering::Equal => x - 1,
                std::cmp::Ordering::Less => x,
            })
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InductionKind {
    TypeI,
    TypeII,
}

impl InductionKind {
    pub fn degree(self) -> u32 {
        match self {
            InductionKind::TypeI => 1,
            InductionKind::TypeII => 2,
        }
    }
}

impl fmt::Display for InductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InductionKind::TypeI => "I",
            InductionKind::TypeII => "II",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: InductionKind,
    /// The member `i` of `p̄` with `r̄_i = 2` that un-induces to `p`.
    pub witness: Option<u32>,
}

pub fn classify_induction(family: OrbitFamily, p: &Partition, pbar: &Partition, k: usize) -> Result<Classification> {
    let expected = p.sum() + family.induction_growth(k);
    if pbar.sum() != expected {
        return Err(Error::ChainMismatch {
            step: 0,
            detail: format!("{pbar} has size {}, expected {expected}", pbar.sum()),
        });
    }
    let witness = family.special_parity().and_then(|parity| {
        pbar.distinct()
            .into_iter()
            .filter(|&i| i % 2 == parity && pbar.mult(i) == 2)
            .find(|&i| un_induce(family, pbar, i).as_ref() == Ok(p))
    });
    Ok(Classification {
        kind: if witness.is_some() {
            InductionKind::TypeII
        } else {
            InductionKind::TypeI
        },
        witness,
    })
}

/// Every odd part has multiplicity exactly one.
pub fn is_rather_odd(p: &Partition) -> bool {
    p.distinct().into_iter().filter(|x| x % 2 == 1).all(|x| p.mult(x) == 1)
}

fn count_distinct(p: &Partition, parity: u32) -> u32 {
    p.distinct().into_iter().filter(|x| x % 2 == parity).count() as u32
}

/// Order of π₁ of the orbit. sp: 2^b with b distinct even parts; so:
/// 2^{max(a−1,0)}, doubled when the partition is rather odd.
pub fn pi1_order(o: &OrbitId) -> Result<u64> {
    let p = &o.partition;
    match o.family {
        OrbitFamily::Sl => Err(Error::UnsupportedFamily("π₁ of sl orbits".into())),
        _ if p.is_empty() => Ok(1),
        OrbitFamily::Sp => Ok(1 << count_distinct(p, 0)),
        OrbitFamily::SoB | OrbitFamily::SoD => {
            let a = count_distinct(p, 1);
            let base = a.saturating_sub(1);
            Ok(if is_rather_odd(p) { 1 << (base + 1) } else { 1 << base })
        }
    }
}

/// Degree of the cover of a rather odd so orbit that is induced by the
/// surjection onto (Z/2)^{max(a−1,0)}.
pub fn b3_cover_degree(p: &Partition) -> u64 {
    1 << count_distinct(p, 1).saturating_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoreCase {
    A,
    B1,
    B2,
    B3,
    NotACore,
}

impl fmt::Display for CoreCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoreCase::A => "a",
            CoreCase::B1 => "b-1",
            CoreCase::B2 => "b-2",
            CoreCase::B3 => "b-3",
            CoreCase::NotACore => "not a core",
        })
    }
}

/// Which family of cores `p` belongs to. For so, (b-2) is tested first,
/// then (b-3), then the classical-factor conditions of (b-1).
pub fn core_case(family: OrbitFamily, p: &Partition) -> CoreCase {
    if !satisfies_parity(family, p) {
        return CoreCase::NotACore;
    }
    let d = p.largest();
    match family {
        OrbitFamily::Sl => CoreCase::NotACore,
        OrbitFamily::Sp => {
            let evens_ok = (2..=d).step_by(2).all(|i| {
                let r = p.mult(i);
                r != 0 && r != 2
            });
            if evens_ok {
                CoreCase::A
            } else {
                CoreCase::NotACore
            }
        }
        OrbitFamily::SoB | OrbitFamily::SoD => {
            let odds: Vec<usize> = (1..=d).step_by(2).map(|i| p.mult(i)).collect();
            if odds.iter().all(|&r| r != 0 && r != 2) && odds.iter().any(|&r| r >= 3) {
                return CoreCase::B2;
            }
            if odds.iter().all(|&r| r == 1) {
                return CoreCase::B3;
            }
            if is_rather_odd(p) && b1_gaps_ok(p) {
                return CoreCase::B1;
            }
            CoreCase::NotACore
        }
    }
}

fn b1_gaps_ok(p: &Partition) -> bool {
    let members = p.distinct();
    let gaps_ok = members.windows(2).all(|w| {
        let gap = w[0] - w[1];
        gap < 4 || (gap == 4 && w[0] % 2 == 1 && w[1] % 2 == 1)
    });
    gaps_ok && members.last().is_some_and(|&m| m < 4)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionStep {
    pub k: usize,
    pub q: Partition,
    pub kind: InductionKind,
    pub degree: u32,
    pub witness: Option<u32>,
    /// Partition after this step.
    pub result: Partition,
}

/// Folds `induce` over `steps` and checks the end point is `target`.
pub fn check_chain(core: &OrbitId, steps: &[(usize, Partition)], target: &OrbitId) -> Result<Vec<InductionStep>> {
    if core.family != target.family {
        return Err(Error::ChainMismatch {
            step: 0,
            detail: format!(
                "core family {} differs from target family {}",
                core.family, target.family
            ),
        });
    }
    let family = core.family;
    let mut current = core.partition.clone();
    let mut out = Vec::with_capacity(steps.len());
    for (idx, (k, q)) in steps.iter().enumerate() {
        let next = induce(family, &current, *k, q).map_err(|e| Error::ChainMismatch {
            step: idx,
            detail: e.to_string(),
        })?;
        let c = classify_induction(family, &current, &next, *k).map_err(|e| Error::ChainMismatch {
            step: idx,
            detail: e.to_string(),
        })?;
        out.push(InductionStep {
            k: *k,
            q: q.clone(),
            kind: c.kind,
            degree: c.kind.degree(),
            witness: c.witness,
            result: next.clone(),
        });
        current = next;
    }
    if current != target.partition {
        return Err(Error::ChainMismatch {
            step: steps.len().saturating_sub(1),
            detail: format!("chain ends at {current}, target is {}", target.partition),
        });
    }
    Ok(out)
}

/// Exhaustive reference implementations.
pub mod oracle {
    use super::{satisfies_parity, OrbitFamily, Partition};

    /// All partitions of `n`, in decreasing lexicographic order.
    pub fn partitions(n: usize) -> Vec<Partition> {
        fn go(rest: usize, max: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition::new(cur.clone()));
                return;
            }
            for x in (1..=max.min(rest)).rev() {
                cur.push(x as u32);
                go(rest - x, x, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// Dominance maximum of the valid partitions below `p`. Panics if the
    /// maximum is not unique.
    pub fn brute_force_collapse(family: OrbitFamily, p: &Partition) -> Partition {
        let below: Vec<Partition> = partitions(p.sum())
            .into_iter()
            .filter(|c| p.dominates(c) && satisfies_parity(family, c))
            .collect();
        let top: Vec<&Partition> = below.iter().filter(|c| below.iter().all(|o| c.dominates(o))).collect();
        assert_eq!(top.len(), 1, "no unique dominance maximum below {p}");
        top[0].clone()
    }
}
