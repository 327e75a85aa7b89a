//! Marked Dynkin diagrams whose vertices carry root labels.
//!
//! A `LeviContext` fixes the data shared by every parabolic with the same
//! Levi part: the root system, the base marks, and the Levi root set Φ_I.
//! A `LabeledParabolic` is one element of 𝒮(L): a base of Φ (the labels),
//! the vertices whose labels leave Φ_I, and a height vector that is
//! positive on every label.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{clear_denominators, DualBasis, Rational};
use crate::rootsys::{build_root_system, subsystem_roots, AlgebraFamily, Family, RootSystem, RootVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSpec {
    pub family: AlgebraFamily,
    pub half_blocks: Vec<usize>,
    pub middle: usize,
}

impl FlagSpec {
    /// Marks at the partial sums of the half blocks.
    pub fn mark_positions(&self) -> Vec<usize> {
        self.half_blocks
            .iter()
            .scan(0, |acc, b| {
                *acc += b;
                Some(*acc)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(pos) = self.half_blocks.iter().position(|&b| b == 0) {
            return Err(Error::InvalidBlock(format!("block {} is empty", pos + 1)));
        }
        let sum: usize = self.half_blocks.iter().sum();
        let fam = self.family;
        let (got, expected) = match fam.family {
            Family::A => (sum + self.middle, fam.natural_dim()),
            _ => (2 * sum + self.middle, fam.natural_dim()),
        };
        if got != expected {
            return Err(Error::DimensionMismatch { expected, got });
        }
        match fam.family {
            Family::A if self.middle == 0 => Err(Error::InvalidBlock("type A flag needs a nonempty last block".into())),
            Family::D if self.middle < 4 => Err(Error::VeryEvenAmbiguity { middle: self.middle }),
            _ => Ok(()),
        }
    }
}

/// Ordered marked vertices of the base diagram; the residues of their simple
/// roots are the coordinates on 𝔨.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KBasis {
    pub marked_indices: Vec<usize>,
}

impl KBasis {
    pub fn dim(&self) -> usize {
        self.marked_indices.len()
    }
}

#[derive(Debug)]
pub struct LeviContext {
    sys: Arc<RootSystem>,
    kbasis: KBasis,
    phi_i: HashSet<RootVector>,
    unmarked_count: usize,
}

impl LeviContext {
    pub fn new(sys: Arc<RootSystem>, marks: &BTreeSet<usize>) -> Result<Arc<Self>> {
        let n = sys.rank();
        if let Some(&bad) = marks.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::PreconditionViolated(format!("vertex {bad} outside 1..={n}")));
        }
        let unmarked: Vec<RootVector> = (1..=n)
            .filter(|v| !marks.contains(v))
            .map(|v| sys.simple_root(v).clone())
            .collect();
        let phi_i = subsystem_roots(&unmarked).into_iter().collect();
        Ok(Arc::new(LeviContext {
            kbasis: KBasis {
                marked_indices: marks.iter().copied().collect(),
            },
            phi_i,
            unmarked_count: unmarked.len(),
            sys,
        }))
    }

    pub fn sys(&self) -> &RootSystem {
        &self.sys
    }

    pub fn kbasis(&self) -> &KBasis {
        &self.kbasis
    }

    pub fn is_levi_root(&self, v: &RootVector) -> bool {
        self.phi_i.contains(v)
    }

    /// Φ_I in sorted order.
    pub fn levi_roots(&self) -> BTreeSet<RootVector> {
        self.phi_i.iter().cloned().collect()
    }

    /// Coefficients of `v` modulo span(Φ_I) in the residues of the base
    /// marked simple roots.
    pub fn k_reduce(&self, v: &RootVector) -> Result<Vec<Rational>> {
        let c = self.sys.simple_coefficients(v)?;
        Ok(self.kbasis.marked_indices.iter().map(|&i| c[i - 1]).collect())
    }

    /// `k_reduce` for vectors of the root lattice.
    pub fn k_reduce_integral(&self, v: &RootVector) -> Result<Vec<i64>> {
        self.k_reduce(v)?
            .into_iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer())
                } else {
                    Err(Error::NotInSpan)
                }
            })
            .collect()
    }

    /// Vertices whose labels are not Levi roots.
    pub fn marks_of(&self, labels: &[RootVector]) -> Result<BTreeSet<usize>> {
        let marks: BTreeSet<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| !self.phi_i.contains(*l))
            .map(|(i, _)| i + 1)
            .collect();
        let unmarked = labels.len() - marks.len();
        // Unmarked labels are independent Levi roots; having rank(Φ_I) of
        // them means they span Φ_I, and being part of a base they are a base
        // of it.
        if unmarked != self.unmarked_count {
            return Err(Error::LeviMismatch(format!(
                "{unmarked} labels lie in the Levi, expected {}",
                self.unmarked_count
            )));
        }
        Ok(marks)
    }
}

#[derive(Debug, Clone)]
pub struct LabeledParabolic {
    ctx: Arc<LeviContext>,
    labels: Vec<RootVector>,
    marks: BTreeSet<usize>,
    height: RootVector,
}

impl LabeledParabolic {
    /// Simple roots as labels, with the context's base marks.
    pub fn base(ctx: Arc<LeviContext>) -> Self {
        let sys = ctx.sys();
        let dual = DualBasis::new(sys.simple_roots().iter().map(|r| r.0.clone()).collect())
            .expect("simple roots are independent");
        // Sum of the dual vectors pairs to 1 with every simple root.
        let dual_sum: Vec<Rational> = (0..sys.dim())
            .map(|c| (0..dual.len()).map(|i| dual.dual_vector(i)[c]).sum())
            .collect();
        let height = RootVector(clear_denominators(&dual_sum));
        LabeledParabolic {
            labels: sys.simple_roots().to_vec(),
            marks: ctx.kbasis.marked_indices.iter().copied().collect(),
            height,
            ctx,
        }
    }

    /// A new labeling of the same Levi part. `height` must be positive on
    /// every label.
    pub fn from_parts(ctx: Arc<LeviContext>, labels: Vec<RootVector>, height: RootVector) -> Result<Self> {
        if labels.len() != ctx.sys().rank() {
            return Err(Error::DimensionMismatch {
                expected: ctx.sys().rank(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|l| l.dot(&height) <= 0) {
            return Err(Error::NotABase("height is not positive on the labels".into()));
        }
        let marks = ctx.marks_of(&labels)?;
        Ok(LabeledParabolic {
            ctx,
            labels,
            marks,
            height,
        })
    }

    pub fn ctx(&self) -> &Arc<LeviContext> {
        &self.ctx
    }

    pub fn sys(&self) -> &RootSystem {
        self.ctx.sys()
    }

    pub fn labels(&self) -> &[RootVector] {
        &self.labels
    }

    /// Label at 1-based vertex `v`.
    pub fn label(&self, v: usize) -> &RootVector {
        &self.labels[v - 1]
    }

    pub fn marks(&self) -> &BTreeSet<usize> {
        &self.marks
    }

    pub fn height(&self) -> &RootVector {
        &self.height
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marks.contains(&v)
    }

    /// Vertices joined to `v` in the Dynkin graph of the labels.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let lv = &self.labels[v - 1];
        (1..=self.labels.len()).filter(move |&u| u != v && self.labels[u - 1].dot(lv) != 0)
    }

    /// Positive roots for this parabolic.
    pub fn is_positive(&self, r: &RootVector) -> bool {
        r.dot(&self.height) > 0
    }

    /// The closed subsystem generated by the unmarked labels.
    pub fn levi_roots(&self) -> BTreeSet<RootVector> {
        let unmarked: Vec<RootVector> = (1..=self.labels.len())
            .filter(|v| !self.marks.contains(v))
            .map(|v| self.labels[v - 1].clone())
            .collect();
        subsystem_roots(&unmarked)
    }

    /// Integer coefficients of each label in the standard simple roots.
    pub fn label_coefficients(&self, v: usize) -> Vec<i64> {
        self.sys()
            .simple_integer_coefficients(&self.labels[v - 1])
            .expect("labels are roots")
    }

    /// One line per vertex: index, mark flag, label in simple roots.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in 1..=self.labels.len() {
            let flag = if self.is_marked(v) { '*' } else { 'o' };
            let _ = writeln!(
                out,
                "{v:>3}  [{flag}]  {}",
                format_combination(&self.label_coefficients(v))
            );
        }
        out
    }
}

/// `a1 + 2a10 - a3` style rendering of an integer coefficient vector.
pub fn format_combination(coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        if mag != 1 {
            let _ = write!(out, "{mag}");
        }
        let _ = write!(out, "a{}", i + 1);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Base parabolic of a flag.
pub fn from_flag(f: &FlagSpec) -> Result<LabeledParabolic> {
    f.validate()?;
    let sys = Arc::new(build_root_system(f.family)?);
    let marks: BTreeSet<usize> = f.mark_positions().into_iter().collect();
    let ctx = LeviContext::new(sys, &marks)?;
    Ok(LabeledParabolic::base(ctx))
}

/// Base parabolic with an explicit mark set.
pub fn from_marks(fam: AlgebraFamily, marks: &[usize]) -> Result<LabeledParabolic> {
    let sys = Arc::new(build_root_system(fam)?);
    let marks: BTreeSet<usize> = marks.iter().copied().collect();
    let ctx = LeviContext::new(sys, &marks)?;
    Ok(LabeledParabolic::base(ctx))
}
