//! Classical root systems in standard integer coordinates.
//!
//! Roots of A_n live in the sum-zero hyperplane of Z^{n+1}; roots of B_n,
//! C_n, D_n live in Z^n. Every coroot of these realizations is integral,
//! so all Weyl group elements are integer (signed permutation) matrices and
//! no rational arithmetic is needed outside of base changes.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, DualBasis, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// Cartan type of a classical simple Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraFamily {
    pub family: Family,
    pub rank: usize,
}

impl AlgebraFamily {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let min = if family == Family::D { 2 } else { 1 };
        if rank < min {
            return Err(Error::InvalidRank {
                family: family.letter(),
                rank,
            });
        }
        Ok(AlgebraFamily { family, rank })
    }

    /// Dimension of the coordinate space holding the roots.
    pub fn coord_dim(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            _ => self.rank,
        }
    }

    /// Dimension of the natural representation.
    pub fn natural_dim(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            Family::B => 2 * self.rank + 1,
            Family::C | Family::D => 2 * self.rank,
        }
    }
}

impl fmt::Display for AlgebraFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// A vector in the standard coordinate space. Used both for roots and for
/// arbitrary integral weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVector(pub Vec<i64>);

impl RootVector {
    pub fn zero(dim: usize) -> Self {
        RootVector(vec![0; dim])
    }

    pub fn basis(dim: usize, i: usize, scale: i64) -> Self {
        let mut v = vec![0; dim];
        v[i] = scale;
        RootVector(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn norm2(&self) -> i64 {
        dot(&self.0, &self.0)
    }

    pub fn dot(&self, other: &RootVector) -> i64 {
        dot(&self.0, &other.0)
    }

    /// `2α/(α,α)`; integral for every root of the standard realizations.
    pub fn coroot(&self) -> RootVector {
        let n = self.norm2();
        assert!(n > 0, "coroot of the zero vector");
        RootVector(
            self.0
                .iter()
                .map(|&x| {
                    assert_eq!((2 * x) % n, 0, "non-integral coroot");
                    2 * x / n
                })
                .collect(),
        )
    }

    /// The Cartan integer `<self, α^∨>`.
    pub fn pairing(&self, alpha: &RootVector) -> i64 {
        2 * self.dot(alpha) / alpha.norm2()
    }

    pub fn reflect(&self, alpha: &RootVector) -> RootVector {
        let c = self.pairing(alpha);
        RootVector(self.0.iter().zip(&alpha.0).map(|(x, a)| x - c * a).collect())
    }

    pub fn neg(&self) -> RootVector {
        RootVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn scale(&self, k: i64) -> RootVector {
        RootVector(self.0.iter().map(|x| k * x).collect())
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    family: AlgebraFamily,
    simple: Vec<RootVector>,
    roots: Vec<RootVector>,
    root_set: HashSet<RootVector>,
    simple_dual: DualBasis,
}

/// Simple roots in Bourbaki order together with the full root set.
pub fn build_root_system(fam: AlgebraFamily) -> Result<RootSystem> {
    let fam = AlgebraFamily::new(fam.family, fam.rank)?;
    let n = fam.rank;
    let dim = fam.coord_dim();
    let e = |i: usize, s: i64| RootVector::basis(dim, i, s);
    let mut simple: Vec<RootVector> = Vec::with_capacity(n);
    let mut roots: BTreeSet<RootVector> = BTreeSet::new();

    // e_i - e_j for the chain part, shared by every family.
    let chain_len = match fam.family {
        Family::A => n,
        _ => n - 1,
    };
    for i in 0..chain_len {
        simple.push(e(i, 1).add(&e(i + 1, -1)));
    }
    match fam.family {
        Family::A => {}
        Family::B => simple.push(e(n - 1, 1)),
        Family::C => simple.push(e(n - 1, 2)),
        Family::D => simple.push(e(n - 2, 1).add(&e(n - 1, 1))),
    }

    let m = dim;
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            roots.insert(e(i, 1).add(&e(j, -1)));
            if fam.family != Family::A && i < j {
                roots.insert(e(i, 1).add(&e(j, 1)));
                roots.insert(e(i, -1).add(&e(j, -1)));
            }
        }
        match fam.family {
            Family::B => {
                roots.insert(e(i, 1));
                roots.insert(e(i, -1));
            }
            Family::C => {
                roots.insert(e(i, 2));
                roots.insert(e(i, -2));
            }
            _ => {}
        }
    }
    let roots: Vec<RootVector> = roots.into_iter().collect();
    let root_set = roots.iter().cloned().collect();
    let simple_dual = DualBasis::new(simple.iter().map(|r| r.0.clone()).collect())?;
    Ok(RootSystem {
        family: fam,
        simple,
        roots,
        root_set,
        simple_dual,
    })
}

impl RootSystem {
    pub fn family(&self) -> AlgebraFamily {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.family.rank
    }

    pub fn dim(&self) -> usize {
        self.family.coord_dim()
    }

    /// Simple roots, index 0 is the Bourbaki vertex 1.
    pub fn simple_roots(&self) -> &[RootVector] {
        &self.simple
    }

    /// Simple root at 1-based vertex `v`.
    pub fn simple_root(&self, v: usize) -> &RootVector {
        &self.simple[v - 1]
    }

    /// All roots, sorted lexicographically by coordinates.
    pub fn roots(&self) -> &[RootVector] {
        &self.roots
    }

    pub fn is_root(&self, v: &RootVector) -> bool {
        self.root_set.contains(v)
    }

    /// Coefficients of `v` in the simple roots.
    pub fn simple_coefficients(&self, v: &RootVector) -> Result<Vec<Rational>> {
        if v.0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.0.len(),
            });
        }
        self.simple_dual.coefficients(&v.0)
    }

    /// Integer coefficients in the simple roots; errors if `v` is not in the
    /// root lattice.
    pub fn simple_integer_coefficients(&self, v: &RootVector) -> Result<Vec<i64>> {
        self.simple_coefficients(v)?
            .into_iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::NotInSpan)
                }
            })
            .collect()
    }

    /// Positive with respect to the standard simple roots.
    pub fn is_positive(&self, v: &RootVector) -> bool {
        self.simple_coefficients(v)
            .map(|c| c.iter().any(|x| *x > Rational::from_integer(0)))
            .unwrap_or(false)
    }

    /// Vector with the given integer coefficients on the simple roots.
    pub fn combination(&self, coeffs: &[i64]) -> RootVector {
        let mut v = RootVector::zero(self.dim());
        for (c, a) in coeffs.iter().zip(&self.simple) {
            v = v.add(&a.scale(*c));
        }
        v
    }
}

/// An isometry of the coordinate space stored as an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthogonalMap {
    dim: usize,
    m: Vec<i64>,
}

impl OrthogonalMap {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1;
        }
        OrthogonalMap { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.dim + j]
    }

    pub fn apply(&self, v: &RootVector) -> RootVector {
        let d = self.dim;
        RootVector((0..d).map(|i| dot(&self.m[i * d..(i + 1) * d], &v.0)).collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OrthogonalMap) -> OrthogonalMap {
        let d = self.dim;
        let mut m = vec![0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    m[i * d + j] += a * other.m[k * d + j];
                }
            }
        }
        OrthogonalMap { dim: d, m }
    }

    /// Right multiplication by the reflection in `alpha`.
    fn then_reflect(&mut self, alpha: &RootVector) {
        let d = self.dim;
        let img = self.apply(alpha);
        let cor = alpha.coroot();
        for i in 0..d {
            for c in 0..d {
                self.m[i * d + c] -= cor.0[c] * img.0[i];
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == OrthogonalMap::identity(self.dim)
    }

    /// `Mᵀ M = 1`.
    pub fn is_orthogonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| {
                let s: i64 = (0..d).map(|k| self.m[k * d + i] * self.m[k * d + j]).sum();
                s == i64::from(i == j)
            })
        })
    }

    /// Maps every root of `sys` to a root of `sys`.
    pub fn permutes_roots(&self, sys: &RootSystem) -> bool {
        sys.roots().iter().all(|r| sys.is_root(&self.apply(r)))
    }
}

fn check_base(sys: &RootSystem, base: &[RootVector]) -> Result<()> {
    for b in base {
        if !sys.is_root(b) {
            return Err(Error::NotABase(format!("{b} is not a root")));
        }
    }
    let vecs: Vec<Vec<i64>> = base.iter().map(|b| b.0.clone()).collect();
    if linalg::rank(&vecs) != base.len() {
        return Err(Error::NotABase("roots are linearly dependent".into()));
    }
    for (i, a) in base.iter().enumerate() {
        for b in &base[i + 1..] {
            if a.dot(b) > 0 {
                return Err(Error::NotABase(format!("{a} and {b} form an acute angle")));
            }
        }
    }
    Ok(())
}

/// The longest element of the reflection group generated by `base`, along
/// with the greedy reduced word (indices into `base`) that produced it.
///
/// Greedy: starting from the identity, while some base root `α` still has
/// `w(α)` positive, replace `w` by `w·s_α`. The coefficient vectors of
/// `w(α_k)` in the base are tracked directly, so positivity is a sign test.
pub fn longest_element_word(sys: &RootSystem, base: &[RootVector]) -> Result<(OrthogonalMap, Vec<usize>)> {
    check_base(sys, base)?;
    let r = base.len();
    let cartan: Vec<Vec<i64>> = (0..r)
        .map(|k| (0..r).map(|j| base[k].pairing(&base[j])).collect())
        .collect();
    let mut images: Vec<Vec<i64>> = (0..r).map(|k| (0..r).map(|j| i64::from(j == k)).collect()).collect();
    let mut word = Vec::new();
    let cap = sys.roots().len();
    while let Some(j) = (0..r).find(|&j| images[j].iter().sum::<i64>() > 0) {
        let pivot = images[j].clone();
        for k in 0..r {
            let c = cartan[k][j];
            if c != 0 {
                for (x, p) in images[k].iter_mut().zip(&pivot) {
                    *x -= c * p;
                }
            }
        }
        word.push(j);
        if word.len() > cap {
            return Err(Error::NotABase("greedy longest element did not terminate".into()));
        }
    }
    let mut m = OrthogonalMap::identity(sys.dim());
    for &j in &word {
        m.then_reflect(&base[j]);
    }
    Ok((m, word))
}

/// `w₀` of the subsystem with base `base`: an involution sending the
/// positive roots of the subsystem to the negative ones and fixing the
/// orthogonal complement of its span.
pub fn longest_element(sys: &RootSystem, base: &[RootVector]) -> Result<OrthogonalMap> {
    longest_element_word(sys, base).map(|(m, _)| m)
}

pub fn express_in_base(v: &RootVector, base: &[RootVector]) -> Result<Vec<Rational>> {
    let vecs: Vec<Vec<i64>> = base.iter().map(|b| b.0.clone()).collect();
    linalg::solve_in_span(&vecs, &v.0)
}

/// All roots of the subsystem generated by `base`: the orbit of the base
/// under its own reflections.
pub fn subsystem_roots(base: &[RootVector]) -> BTreeSet<RootVector> {
    let mut seen: BTreeSet<RootVector> = base.iter().cloned().collect();
    let mut queue: Vec<RootVector> = base.to_vec();
    while let Some(g) = queue.pop() {
        for a in base {
            let h = g.reflect(a);
            if seen.insert(h.clone()) {
                queue.push(h);
            }
        }
    }
    seen
}
