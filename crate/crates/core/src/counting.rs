//! Walls, the map ρ̄ on W′, W_X, and the two terminalization counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{from_flag, FlagSpec, LabeledParabolic};
use crate::error::{Error, Result};
use crate::orbits::{
    b3_cover_degree, check_chain, classify_induction, core_case, gl_merge, induce, pi1_order, validate_orbit, CoreCase,
    InductionKind, InductionStep, OrbitFamily, OrbitId, Partition,
};
use crate::rootsys::{AlgebraFamily, Family, RootVector};
use crate::twist::{
    class_count, conjugate_actions, enumerate_chambers, generate_w_prime, twist_component, ChamberGraph,
    EnumerateOptions, KMatrix, MatrixGroup, DEFAULT_MAX_GROUP, DEFAULT_MAX_NODES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CoverKind {
    #[default]
    Universal,
    B3Special,
}

impl fmt::Display for CoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverKind::Universal => "universal",
            CoverKind::B3Special => "b3-special",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_nodes: usize,
    pub max_group: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_nodes: DEFAULT_MAX_NODES,
            max_group: DEFAULT_MAX_GROUP,
        }
    }
}

/// One terminalization problem: a cover of `target` induced from a core
/// orbit on the middle factor and orbits on the gl blocks of the flag.
///
/// For type A the blocks are `half_blocks` followed by a last block of size
/// `middle`, and `middle_core` is the gl orbit carried by that last block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setup {
    pub algebra: AlgebraFamily,
    pub target: Partition,
    pub half_blocks: Vec<usize>,
    pub middle_core: Partition,
    /// One orbit per half block; `None` means zero orbits throughout.
    pub gl_orbits: Option<Vec<Partition>>,
    pub cover: CoverKind,
    pub budgets: Budgets,
}

impl Setup {
    pub fn orbit_family(&self) -> OrbitFamily {
        OrbitFamily::of(self.algebra.family)
    }

    pub fn middle(&self) -> usize {
        self.middle_core.sum()
    }

    pub fn flag(&self) -> FlagSpec {
        FlagSpec {
            family: self.algebra,
            half_blocks: self.half_blocks.clone(),
            middle: self.middle(),
        }
    }

    /// Orbit on half block `j` (0-based, outermost first).
    pub fn gl_orbit(&self, j: usize) -> Partition {
        match &self.gl_orbits {
            Some(v) => v[j].clone(),
            None => Partition::ones(self.half_blocks[j]),
        }
    }

    pub fn target_orbit(&self) -> OrbitId {
        OrbitId {
            family: self.orbit_family(),
            dim: self.algebra.natural_dim(),
            partition: self.target.clone(),
        }
    }

    pub fn core_orbit(&self) -> OrbitId {
        OrbitId::new(self.orbit_family(), self.middle_core.clone())
    }

    /// Induction steps from the core outward: innermost block first.
    pub fn chain_steps(&self) -> Vec<(usize, Partition)> {
        (0..self.half_blocks.len())
            .rev()
            .map(|j| (self.half_blocks[j], self.gl_orbit(j)))
            .collect()
    }
}

/// Checked setup with its induction chain and automorphism orders.
#[derive(Debug, Clone)]
pub struct ValidatedSetup {
    pub setup: Setup,
    pub base: LabeledParabolic,
    pub chain: Vec<InductionStep>,
    pub aut_x: u64,
    pub aut_core: u64,
    pub pi1_target: Option<u64>,
    pub core_case: CoreCase,
}

/// Where a setup failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetupError {
    pub field: &'static str,
    pub error: Error,
}

impl fmt::Display for SetupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.error)
    }
}

impl std::error::Error for SetupError {}

fn at(field: &'static str) -> impl Fn(Error) -> SetupError {
    move |error| SetupError { field, error }
}

pub fn validate_setup(setup: &Setup) -> std::result::Result<ValidatedSetup, SetupError> {
    AlgebraFamily::new(setup.algebra.family, setup.algebra.rank).map_err(at("algebra"))?;
    let of = setup.orbit_family();
    let target = setup.target_orbit();
    validate_orbit(&target).map_err(at("orbit"))?;
    if let Some(v) = &setup.gl_orbits {
        if v.len() != setup.half_blocks.len() {
            return Err(SetupError {
                field: "setup.gl_orbits",
                error: Error::InvalidBlock(format!("{} orbits for {} blocks", v.len(), setup.half_blocks.len())),
            });
        }
        for (q, &b) in v.iter().zip(&setup.half_blocks) {
            if q.sum() != b {
                return Err(SetupError {
                    field: "setup.gl_orbits",
                    error: Error::InvalidBlock(format!("{q} does not partition {b}")),
                });
            }
        }
        // W′ permutes blocks of equal size, so the Levi orbit is W′-stable
        // only if such blocks carry the same orbit.
        for (i, (qi, &bi)) in v.iter().zip(&setup.half_blocks).enumerate() {
            for (qj, &bj) in v.iter().zip(&setup.half_blocks).skip(i + 1) {
                if bi == bj && qi != qj {
                    return Err(SetupError {
                        field: "setup.gl_orbits",
                        error: Error::PreconditionViolated(format!(
                            "blocks of size {bi} carry different orbits {qi} and {qj}"
                        )),
                    });
                }
            }
        }
    }
    let core = setup.core_orbit();
    if of != OrbitFamily::Sl {
        validate_orbit(&core).map_err(at("setup.middle_core"))?;
    }
    let base = from_flag(&setup.flag()).map_err(at("setup.half_blocks"))?;
    let chain = check_chain(&core, &setup.chain_steps(), &target).map_err(at("setup"))?;
    let type_two = chain.iter().filter(|s| s.kind == InductionKind::TypeII).count() as u32;

    let cc = core_case(of, &setup.middle_core);
    let (aut_x, aut_core, pi1_target) = match (of, setup.cover) {
        (OrbitFamily::Sl, CoverKind::Universal) => (1, 1, None),
        (OrbitFamily::Sl, CoverKind::B3Special) | (OrbitFamily::Sp, CoverKind::B3Special) => {
            return Err(SetupError {
                field: "setup.cover",
                error: Error::PreconditionViolated("b3-special covers exist only for so orbits".into()),
            })
        }
        (_, CoverKind::Universal) => {
            let pt = pi1_order(&target).map_err(at("orbit"))?;
            let pc = pi1_order(&core).map_err(at("setup.middle_core"))?;
            if pt != pc << type_two {
                return Err(SetupError {
                    field: "setup.cover",
                    error: Error::OrderMismatch {
                        what: "universal cover degree against core cover and type II steps",
                        expected: pc << type_two,
                        actual: pt,
                    },
                });
            }
            (pt, pc, Some(pt))
        }
        (_, CoverKind::B3Special) => {
            if cc != CoreCase::B3 {
                return Err(SetupError {
                    field: "setup.cover",
                    error: Error::PreconditionViolated(format!("core {} is not a (b-3) core", setup.middle_core)),
                });
            }
            let pt = pi1_order(&target).map_err(at("orbit"))?;
            let ac = b3_cover_degree(&setup.middle_core);
            (ac << type_two, ac, Some(pt))
        }
    };
    Ok(ValidatedSetup {
        setup: setup.clone(),
        base,
        chain,
        aut_x,
        aut_core,
        pi1_target,
        core_case: cc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MergeKind {
    GlGl,
    GlClassical,
}

impl fmt::Display for MergeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MergeKind::GlGl => "gl-gl",
            MergeKind::GlClassical => "gl-classical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallData {
    pub node: usize,
    pub vertex: usize,
    pub merge_kind: MergeKind,
    /// Size of the gl block absorbed by the classical factor.
    pub k_t: Option<usize>,
    /// Orbit on the merged block (gl-gl) or on the absorbed block.
    pub gl_orbit: Partition,
    /// Type of the induction into the classical factor (gl-classical only).
    pub kind: Option<InductionKind>,
    pub witness: Option<u32>,
}

/// Element of (Z/2)^m as a bit mask; bit `j` is the factor of the `j`-th
/// distinct special part of the target partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct RhoValue(pub u64);

impl RhoValue {
    pub const ZERO: RhoValue = RhoValue(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for RhoValue {
    type Output = RhoValue;

    // Addition in (Z/2)^m is bitwise exclusive or.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, other: RhoValue) -> RhoValue {
        RhoValue(self.0 ^ other.0)
    }
}

impl fmt::Display for RhoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("0");
        }
        let bits: Vec<String> = (0..64)
            .filter(|b| self.0 >> b & 1 == 1)
            .map(|b| format!("e{b}"))
            .collect();
        f.write_str(&bits.join("+"))
    }
}

/// Reads the gl blocks of a node and maps them to the base blocks.
pub struct WallReader<'a> {
    setup: &'a Setup,
    /// Levi root → base half block index (0-based).
    block_of_root: HashMap<RootVector, usize>,
}

impl<'a> WallReader<'a> {
    pub fn new(v: &'a ValidatedSetup) -> Self {
        let base = &v.base;
        let sys = base.sys();
        let marks: Vec<usize> = base.marks().iter().copied().collect();
        let mut block_of_root = HashMap::new();
        let mut prev = 0;
        for (j, &m) in marks.iter().enumerate() {
            let simple: Vec<RootVector> = (prev + 1..m).map(|u| sys.simple_root(u).clone()).collect();
            for r in crate::rootsys::subsystem_roots(&simple) {
                block_of_root.insert(r, j);
            }
            prev = m;
        }
        WallReader {
            setup: &v.setup,
            block_of_root,
        }
    }

    /// Blocks of `node` from vertex 1 inward: (size, orbit).
    pub fn blocks(&self, node: &LabeledParabolic) -> Result<Vec<(usize, Partition)>> {
        let mut prev = 0;
        let mut out = Vec::new();
        for &m in node.marks() {
            let size = m - prev;
            let orbit = if size == 1 {
                Partition::ones(1)
            } else {
                let j = self.block_of_root.get(node.label(prev + 1)).copied().ok_or_else(|| {
                    Error::UnsupportedMerge(format!("block ending at vertex {m} matches no base block"))
                })?;
                let q = self.setup.gl_orbit(j);
                if q.sum() != size {
                    return Err(Error::UnsupportedMerge(format!(
                        "block ending at vertex {m} has size {size} but base block {} has size {}",
                        j + 1,
                        q.sum()
                    )));
                }
                q
            };
            out.push((size, orbit));
            prev = m;
        }
        Ok(out)
    }

    pub fn wall_of_twist(&self, graph: &ChamberGraph, node: usize, beta: usize) -> Result<WallData> {
        let p = &graph.nodes[node].parabolic;
        let comp = twist_component(p, beta)?;
        let n = p.sys().rank();
        let classical = self.setup.algebra.family != Family::A && comp.contains(&n);
        let marks: Vec<usize> = p.marks().iter().copied().collect();
        let t = marks.iter().position(|&m| m == beta).ok_or(Error::NotMarked(beta))?;
        let blocks = self.blocks(p)?;
        if classical {
            if t + 1 != marks.len() {
                return Err(Error::UnsupportedMerge(format!(
                    "vertex {beta} reaches the classical factor but is not the innermost mark"
                )));
            }
            let (k, q) = blocks[t].clone();
            let core = &self.setup.middle_core;
            let of = self.setup.orbit_family();
            let pbar = induce(of, core, k, &q)?;
            let c = classify_induction(of, core, &pbar, k)?;
            Ok(WallData {
                node,
                vertex: beta,
                merge_kind: MergeKind::GlClassical,
                k_t: Some(k),
                gl_orbit: q,
                kind: Some(c.kind),
                witness: c.witness,
            })
        } else {
            let merged = match (blocks.get(t), blocks.get(t + 1)) {
                (Some((_, a)), Some((_, b))) => gl_merge(a, b),
                (Some((_, a)), None) if self.setup.algebra.family == Family::A => gl_merge(a, &self.setup.middle_core),
                _ => {
                    return Err(Error::UnsupportedMerge(format!(
                        "vertex {beta} joins no pair of gl blocks"
                    )))
                }
            };
            Ok(WallData {
                node,
                vertex: beta,
                merge_kind: MergeKind::GlGl,
                k_t: None,
                gl_orbit: merged,
                kind: None,
                witness: None,
            })
        }
    }

    /// ρ̄ of the wall. Type II walls carry the pair of parts equal to the
    /// witness through the remaining outer blocks by position; the value
    /// they reach in the target picks the factor.
    pub fn rho_bar(&self, graph: &ChamberGraph, wall: &WallData) -> Result<RhoValue> {
        if wall.merge_kind == MergeKind::GlGl || self.setup.algebra.family == Family::A {
            return Ok(RhoValue::ZERO);
        }
        if wall.kind != Some(InductionKind::TypeII) {
            return Ok(RhoValue::ZERO);
        }
        let i = wall.witness.expect("type II walls carry a witness");
        let of = self.setup.orbit_family();
        let k = wall.k_t.expect("gl-classical walls carry k_t");
        let mut current = induce(of, &self.setup.middle_core, k, &wall.gl_orbit)?;
        let positions: Vec<usize> = current
            .parts()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == i)
            .map(|(pos, _)| pos)
            .collect();
        let blocks = self.blocks(&graph.nodes[wall.node].parabolic)?;
        let t = blocks.len() - 1;
        for (size, q) in blocks[..t].iter().rev() {
            current = induce(of, &current, *size, q)?;
        }
        if current != self.setup.target {
            return Err(Error::ChainMismatch {
                step: t,
                detail: format!("wall chain ends at {current}, target is {}", self.setup.target),
            });
        }
        let values: BTreeSet<u32> = positions.iter().map(|&p| current.parts()[p]).collect();
        let [value] = values.into_iter().collect::<Vec<_>>()[..] else {
            return Err(Error::UnsupportedMerge(format!(
                "witness pair of vertex {} splits during transport",
                wall.vertex
            )));
        };
        let factors = rho_factors(of, &self.setup.target);
        let idx = factors.iter().position(|&f| f == value).ok_or_else(|| {
            Error::UnsupportedMerge(format!(
                "transported member {value} is not a special part of the target"
            ))
        })?;
        Ok(RhoValue(1 << idx))
    }
}

/// Distinct special parts of the target (sp: even, so: odd), decreasing.
pub fn rho_factors(family: OrbitFamily, target: &Partition) -> Vec<u32> {
    let parity = match family {
        OrbitFamily::Sp => 0,
        OrbitFamily::SoB | OrbitFamily::SoD => 1,
        OrbitFamily::Sl => return Vec::new(),
    };
    target.distinct().into_iter().filter(|x| x % 2 == parity).collect()
}

/// |W_X| = |W′|·autCore/autX.
pub fn w_x_order(w_prime: u64, aut_x: u64, aut_core: u64) -> Result<u64> {
    let num = w_prime * aut_core;
    if aut_x == 0 || !num.is_multiple_of(aut_x) {
        return Err(Error::NonIntegralOrder(format!("{w_prime}·{aut_core}/{aut_x}")));
    }
    Ok(num / aut_x)
}

pub fn count_by_classes(n: u64, aut_x: u64, aut_core: u64) -> Result<u64> {
    let num = n * aut_x;
    if aut_core == 0 || !num.is_multiple_of(aut_core) {
        return Err(Error::NonIntegralCount(format!("{n}·{aut_x}/{aut_core}")));
    }
    Ok(num / aut_core)
}

pub fn count_by_chambers(chambers: u64, w_x: u64) -> Result<u64> {
    if w_x == 0 || !chambers.is_multiple_of(w_x) {
        return Err(Error::DivisibilityViolation {
            context: "chamber count by |W_X|",
            numerator: chambers,
            denominator: w_x,
        });
    }
    Ok(chambers / w_x)
}

/// ρ̄ on every element of Ŵ, extended along the tracked words. Checks that
/// `ρ̄(g·s) = ρ̄(g) + ρ̄(s)` for every element `g` and generator `s`, which
/// covers every relation met during closure.
pub fn extend_rho(group: &MatrixGroup, gen_rho: &[RhoValue]) -> Result<Vec<RhoValue>> {
    let values: Vec<RhoValue> = group
        .words
        .iter()
        .map(|w| w.iter().fold(RhoValue::ZERO, |acc, &s| acc + gen_rho[s]))
        .collect();
    for (g, m) in group.elements.iter().enumerate() {
        for (s, gen) in group.generators.iter().enumerate() {
            let h = group.position(&m.mul(gen)).expect("group is closed");
            if values[h] != values[g] + gen_rho[s] {
                return Err(Error::HomomorphismViolation(format!(
                    "element {g} times generator {s} gives {} but ρ̄ predicts {}",
                    values[h],
                    values[g] + gen_rho[s]
                )));
            }
        }
    }
    Ok(values)
}

/// Kernel of ρ̄, checked against the expected image and kernel orders.
pub fn w_x_subgroup(
    group: &MatrixGroup,
    gen_rho: &[RhoValue],
    expected_image: u64,
    expected_order: u64,
) -> Result<MatrixGroup> {
    let values = extend_rho(group, gen_rho)?;
    let image: BTreeSet<RhoValue> = values.iter().copied().collect();
    if image.len() as u64 != expected_image {
        return Err(Error::SurjectivityFailure {
            expected: expected_image,
            actual: image.len() as u64,
        });
    }
    let kernel: Vec<KMatrix> = group
        .elements
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.is_zero())
        .map(|(m, _)| m.clone())
        .collect();
    if kernel.len() as u64 != expected_order {
        return Err(Error::OrderMismatch {
            what: "W_X",
            expected: expected_order,
            actual: kernel.len() as u64,
        });
    }
    let dim = group.elements[0].dim();
    let sub = MatrixGroup::generate(dim, kernel, kernel_cap(group))?;
    Ok(sub)
}

fn kernel_cap(group: &MatrixGroup) -> usize {
    group.order() + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupProfile {
    pub order: u64,
    pub reflections: u64,
    pub element_orders: Vec<usize>,
}

impl GroupProfile {
    pub fn of(g: &MatrixGroup) -> Self {
        GroupProfile {
            order: g.order() as u64,
            reflections: g.reflection_count() as u64,
            element_orders: g.element_orders().into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Mismatch in a non-binding comparison.
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub expected: i64,
    pub actual: i64,
    pub status: CheckStatus,
}

impl CrossCheck {
    fn binding(name: &str, expected: u64, actual: u64) -> Self {
        CrossCheck {
            name: name.into(),
            expected: expected as i64,
            actual: actual as i64,
            status: if expected == actual {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
        }
    }

    fn advisory(name: &str, expected: u64, actual: u64) -> Self {
        CrossCheck {
            name: name.into(),
            expected: expected as i64,
            actual: actual as i64,
            status: if expected == actual {
                CheckStatus::Pass
            } else {
                CheckStatus::Advisory
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub index: usize,
    /// `T` followed by the twist vertices of the shortest path to a wall
    /// realizing the generator, e.g. `T9+13`.
    pub name: String,
    pub matrix: Vec<Vec<i64>>,
    pub rho: RhoValue,
    /// A wall realizing this generator.
    pub wall: WallData,
    /// Number of edges carrying this matrix.
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRecord {
    pub wall: WallData,
    /// `None` when the twist moves the Levi and is not an element of W′.
    pub rho: Option<RhoValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub chambers: u64,
    pub w_prime_order: u64,
    pub classes: u64,
    pub pi1_target: u64,
    pub aut_x: u64,
    pub aut_core: u64,
    pub w_x_order: u64,
    pub count_by_classes: u64,
    pub count_by_chambers: u64,
    pub core_case: CoreCase,
    pub w_x_profile: GroupProfile,
    pub rho_factors: Vec<u32>,
    pub chain: Vec<InductionStep>,
    pub generators: Vec<GeneratorRecord>,
    pub base_walls: Vec<WallRecord>,
    pub checks: Vec<CrossCheck>,
}

impl AnalysisReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnalyzeOptions {
    pub threads: Option<usize>,
}

/// Everything the pipeline computes, for callers that need more than the
/// report.
pub struct Analysis {
    pub validated: ValidatedSetup,
    pub graph: ChamberGraph,
    pub w_prime: MatrixGroup,
    pub generator_rho: Vec<RhoValue>,
    pub w_x: MatrixGroup,
    pub report: AnalysisReport,
}

pub fn analyze(setup: &Setup) -> Result<AnalysisReport> {
    analyze_full(setup, AnalyzeOptions::default()).map(|a| a.report)
}

pub fn analyze_full(setup: &Setup, opts: AnalyzeOptions) -> Result<Analysis> {
    let v = validate_setup(setup).map_err(|e| e.error)?;
    let graph = enumerate_chambers(
        &v.base,
        EnumerateOptions {
            max_nodes: setup.budgets.max_nodes,
            threads: opts.threads,
        },
    )?;
    let w_prime = generate_w_prime(&graph, setup.budgets.max_group)?;
    let chambers = graph.count() as u64;
    let wp = w_prime.order() as u64;
    let classes = class_count(graph.count(), w_prime.order())? as u64;

    let reader = WallReader::new(&v);
    let mut gen_rho: Vec<Option<RhoValue>> = vec![None; w_prime.generators.len()];
    let mut gen_wall: Vec<Option<WallData>> = vec![None; w_prime.generators.len()];
    let mut gen_edges = vec![0usize; w_prime.generators.len()];
    let mut gen_path: Vec<Option<Vec<usize>>> = vec![None; w_prime.generators.len()];
    for e in &graph.edges {
        let Some(m) = &e.matrix else { continue };
        let s = w_prime.generator_index(m).expect("edge matrices are generators");
        let wall = reader.wall_of_twist(&graph, e.from, e.vertex)?;
        let rho = reader.rho_bar(&graph, &wall)?;
        gen_edges[s] += 1;
        let mut path: Vec<usize> = graph.nodes[e.from].word.iter().map(|&(_, b)| b).collect();
        path.push(e.vertex);
        let shorter = gen_path[s]
            .as_ref()
            .is_none_or(|old| (path.len(), &path) < (old.len(), old));
        match gen_rho[s] {
            None => {
                gen_rho[s] = Some(rho);
            }
            Some(r) if r != rho => {
                return Err(Error::HomomorphismViolation(format!(
                    "generator {s} has ρ̄ = {r} at node {} vertex {} but {rho} at node {} vertex {}",
                    gen_wall[s].as_ref().map_or(0, |w| w.node),
                    gen_wall[s].as_ref().map_or(0, |w| w.vertex),
                    e.from,
                    e.vertex
                )));
            }
            Some(_) => {}
        }
        if shorter {
            gen_path[s] = Some(path);
            gen_wall[s] = Some(wall);
        }
    }
    let gen_rho: Vec<RhoValue> = gen_rho
        .into_iter()
        .map(|r| r.expect("every generator has an edge"))
        .collect();

    let expected_image = v.aut_x / v.aut_core;
    let wx_order = w_x_order(wp, v.aut_x, v.aut_core)?;
    let values = extend_rho(&w_prime, &gen_rho)?;
    let image: BTreeSet<RhoValue> = values.iter().copied().collect();
    let kernel: Vec<KMatrix> = w_prime
        .elements
        .iter()
        .zip(&values)
        .filter(|(_, r)| r.is_zero())
        .map(|(m, _)| m.clone())
        .collect();
    let w_x = MatrixGroup::generate(w_prime.elements[0].dim(), kernel.clone(), w_prime.order() + 1)?;

    let by_classes = count_by_classes(classes, v.aut_x, v.aut_core)?;
    let by_chambers = count_by_chambers(chambers, kernel.len() as u64)?;

    let conj = conjugate_actions(&graph);
    let same_group = conj.len() == w_prime.order() && conj.iter().all(|m| w_prime.contains(m));
    let mut checks = vec![
        CrossCheck::binding("count_by_classes = count_by_chambers", by_classes, by_chambers),
        CrossCheck::binding("|image ρ̄| = autX/autCore", expected_image, image.len() as u64),
        CrossCheck::binding("|W_X| = |W′|·autCore/autX", wx_order, kernel.len() as u64),
        CrossCheck::binding("W_X closed", kernel.len() as u64, w_x.order() as u64),
        CrossCheck::binding("♯𝒮(L) mod |W′|", 0, chambers % wp),
        CrossCheck::binding("Ŵ = actions of base-conjugate chambers", 1, u64::from(same_group)),
    ];
    checks.push(CrossCheck::advisory(
        "N = distinct mark sets",
        classes,
        graph.mark_shape_count() as u64,
    ));

    let generators = gen_rho
        .iter()
        .enumerate()
        .map(|(s, &rho)| GeneratorRecord {
            index: s,
            name: generator_name(gen_path[s].as_deref().expect("every generator has an edge")),
            matrix: w_prime.generators[s].rows(),
            rho,
            wall: gen_wall[s].clone().expect("every generator has an edge"),
            edges: gen_edges[s],
        })
        .collect();
    let base_walls = graph
        .edges_from(0)
        .map(|e| {
            let wall = reader.wall_of_twist(&graph, 0, e.vertex)?;
            let rho = match &e.matrix {
                Some(_) => Some(reader.rho_bar(&graph, &wall)?),
                None => None,
            };
            Ok(WallRecord { wall, rho })
        })
        .collect::<Result<Vec<_>>>()?;

    let report = AnalysisReport {
        chambers,
        w_prime_order: wp,
        classes,
        pi1_target: v.pi1_target.unwrap_or(1),
        aut_x: v.aut_x,
        aut_core: v.aut_core,
        w_x_order: wx_order,
        count_by_classes: by_classes,
        count_by_chambers: by_chambers,
        core_case: v.core_case,
        w_x_profile: GroupProfile::of(&w_x),
        rho_factors: rho_factors(setup.orbit_family(), &setup.target),
        chain: v.chain.clone(),
        generators,
        base_walls,
        checks,
    };
    Ok(Analysis {
        validated: v,
        graph,
        w_prime,
        generator_rho: gen_rho,
        w_x,
        report,
    })
}

pub fn generator_name(path: &[usize]) -> String {
    let parts: Vec<String> = path.iter().map(|v| v.to_string()).collect();
    format!("T{}", parts.join("+"))
}

/// Generator ρ̄ values keyed by matrix, for callers comparing across runs.
pub fn rho_by_matrix(a: &Analysis) -> BTreeMap<KMatrix, RhoValue> {
    a.w_prime
        .generators
        .iter()
        .cloned()
        .zip(a.generator_rho.iter().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn order_formulas() {
        assert_eq!(w_x_order(8, 4, 1).unwrap(), 2);
        assert_eq!(w_x_order(96, 4, 2).unwrap(), 48);
        assert_eq!(w_x_order(1, 1, 1).unwrap(), 1);
        assert!(matches!(w_x_order(3, 2, 1), Err(Error::NonIntegralOrder(_))));
        assert_eq!(count_by_classes(6, 4, 1).unwrap(), 24);
        assert_eq!(count_by_classes(4, 4, 2).unwrap(), 8);
        assert_eq!(count_by_classes(1, 1, 1).unwrap(), 1);
        assert!(matches!(count_by_classes(1, 1, 2), Err(Error::NonIntegralCount(_))));
        assert_eq!(count_by_chambers(48, 2).unwrap(), 24);
        assert_eq!(count_by_chambers(384, 48).unwrap(), 8);
        assert_eq!(count_by_chambers(2, 2).unwrap(), 1);
        assert!(matches!(
            count_by_chambers(5, 2),
            Err(Error::DivisibilityViolation { .. })
        ));
    }

    #[test]
    fn trivial_setup_counts_one() {
        let setup = Setup {
            algebra: AlgebraFamily::new(Family::C, 2).unwrap(),
            target: p(&[2, 2]),
            half_blocks: vec![],
            middle_core: p(&[2, 2]),
            gl_orbits: None,
            cover: CoverKind::Universal,
            budgets: Budgets::default(),
        };
        let r = analyze(&setup).unwrap();
        assert_eq!(
            (
                r.chambers,
                r.w_prime_order,
                r.classes,
                r.w_x_order,
                r.count_by_classes,
                r.count_by_chambers
            ),
            (1, 1, 1, 1, 1, 1)
        );
        assert!(r.all_checks_pass());
    }

    #[test]
    fn rho_values_add_in_z2() {
        let a = RhoValue(0b01);
        let b = RhoValue(0b10);
        assert_eq!(a + b, RhoValue(0b11));
        assert!((a + a).is_zero());
        assert_eq!(RhoValue(0b101).to_string(), "e0+e2");
    }

    #[test]
    fn setup_validation_errors() {
        let mut s = Setup {
            algebra: AlgebraFamily::new(Family::C, 10).unwrap(),
            target: p(&[6, 6, 4, 4]),
            half_blocks: vec![4, 1, 3],
            middle_core: p(&[1, 1, 1, 1]),
            gl_orbits: None,
            cover: CoverKind::Universal,
            budgets: Budgets::default(),
        };
        assert!(validate_setup(&s).is_ok());
        s.target = p(&[6, 6, 4, 3, 1]);
        assert_eq!(validate_setup(&s).unwrap_err().field, "orbit");
        s.target = p(&[6, 6, 4, 2, 1, 1]);
        assert_eq!(validate_setup(&s).unwrap_err().field, "setup");
        s.target = p(&[6, 6, 4, 4]);
        s.cover = CoverKind::B3Special;
        assert_eq!(validate_setup(&s).unwrap_err().field, "setup.cover");
    }

    #[test]
    fn rho_factor_lists() {
        assert_eq!(rho_factors(OrbitFamily::Sp, &p(&[6, 6, 4, 4])), vec![6, 4]);
        assert_eq!(
            rho_factors(OrbitFamily::SoD, &p(&[11, 11, 11, 3, 3, 1])),
            vec![11, 3, 1]
        );
        assert!(rho_factors(OrbitFamily::Sl, &p(&[2, 1])).is_empty());
    }
}
