//! Twists of labeled parabolics, the chamber graph on 𝒮(L), and the matrix
//! group they generate on 𝔨.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::LabeledParabolic;
use crate::error::{Error, Result};
use crate::linalg::{self, Rational};
use crate::rootsys::{longest_element, OrthogonalMap, RootVector};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;
pub const DEFAULT_MAX_GROUP: usize = 1_000_000;

/// Square integer matrix on 𝔨-coordinates, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl KMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        KMatrix { dim, entries }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "KMatrix must be square");
        KMatrix {
            dim,
            entries: rows.concat(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.dim.max(1))
            .take(self.dim)
            .map(<[i64]>::to_vec)
            .collect()
    }

    pub fn mul(&self, other: &KMatrix) -> KMatrix {
        let d = self.dim;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        KMatrix { dim: d, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == KMatrix::identity(self.dim)
    }

    pub fn transpose(&self) -> KMatrix {
        let d = self.dim;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        KMatrix { dim: d, entries }
    }

    /// `M² = 1` and `M − 1` has rank one.
    pub fn is_reflection(&self) -> bool {
        if !self.mul(self).is_identity() {
            return false;
        }
        let d = self.dim;
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j) - i64::from(i == j)).collect())
            .collect();
        linalg::rank(&rows) == 1
    }

    /// Multiplicative order, or `None` past `cap`.
    pub fn order(&self, cap: usize) -> Option<usize> {
        let mut m = self.clone();
        for k in 1..=cap {
            if m.is_identity() {
                return Some(k);
            }
            m = m.mul(self);
        }
        None
    }

    /// `P⁻¹ M P` for an integer `P` with integer inverse `p_inv`.
    pub fn change_basis(&self, p: &KMatrix, p_inv: &KMatrix) -> KMatrix {
        p_inv.mul(self).mul(p)
    }
}

impl fmt::Display for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{} ]", cells.join(""))?;
        }
        Ok(())
    }
}

/// Connected component of `beta` in the graph on unmarked vertices plus `beta`.
pub fn twist_component(node: &LabeledParabolic, beta: usize) -> Result<Vec<usize>> {
    if !node.is_marked(beta) {
        return Err(Error::NotMarked(beta));
    }
    let mut seen = BTreeSet::from([beta]);
    let mut stack = vec![beta];
    while let Some(v) = stack.pop() {
        for u in node.neighbors(v) {
            if !node.is_marked(u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// The label map of the twist at `beta`: `w₀` of the component.
pub fn twist_map(node: &LabeledParabolic, beta: usize) -> Result<OrthogonalMap> {
    let comp = twist_component(node, beta)?;
    let base: Vec<RootVector> = comp.iter().map(|&v| node.label(v).clone()).collect();
    longest_element(node.sys(), &base)
}

/// Twist at the marked vertex `beta`, returning the new node and the map.
pub fn twist_with_map(node: &LabeledParabolic, beta: usize) -> Result<(LabeledParabolic, OrthogonalMap)> {
    let t = twist_map(node, beta)?;
    let labels: Vec<RootVector> = node.labels().iter().map(|l| t.apply(l)).collect();
    let height = t.apply(node.height());
    let next = LabeledParabolic::from_parts(node.ctx().clone(), labels, height)?;
    Ok((next, t))
}

pub fn twist_at(node: &LabeledParabolic, beta: usize) -> Result<LabeledParabolic> {
    twist_with_map(node, beta).map(|(n, _)| n)
}

/// True if `t` maps Φ_I onto itself.
pub fn preserves_levi(node: &LabeledParabolic, t: &OrthogonalMap) -> bool {
    let ctx = node.ctx();
    let sys = ctx.sys();
    (1..=sys.rank())
        .filter(|v| !ctx.kbasis().marked_indices.contains(v))
        .all(|v| ctx.is_levi_root(&t.apply(sys.simple_root(v))))
}

/// Row `j` is the 𝔨-reduction of `t(α_{i_j})` over the base marked simple
/// roots. Only meaningful when `t` preserves Φ_I.
pub fn k_matrix_of_map(node: &LabeledParabolic, t: &OrthogonalMap) -> Result<KMatrix> {
    let ctx = node.ctx();
    let rows = ctx
        .kbasis()
        .marked_indices
        .iter()
        .map(|&i| ctx.k_reduce_integral(&t.apply(ctx.sys().simple_root(i))))
        .collect::<Result<Vec<_>>>()?;
    Ok(KMatrix::from_rows(&rows))
}

/// Action of the twist at `beta` on 𝔨. Twists whose label map moves Φ_I
/// (the marked vertex changes position) are not elements of W′ and yield
/// `LeviNotPreserved`.
pub fn k_action(node: &LabeledParabolic, beta: usize) -> Result<KMatrix> {
    let t = twist_map(node, beta)?;
    if !preserves_levi(node, &t) {
        return Err(Error::LeviNotPreserved(beta));
    }
    k_matrix_of_map(node, &t)
}

/// Roots positive for `node` outside Φ_I, sorted.
pub fn nilradical_roots(node: &LabeledParabolic) -> Vec<RootVector> {
    let ctx = node.ctx();
    ctx.sys()
        .roots()
        .iter()
        .filter(|r| node.is_positive(r) && !ctx.is_levi_root(r))
        .cloned()
        .collect()
}

/// Coefficients of `r` in the labels of `node`.
pub fn label_coefficients(node: &LabeledParabolic, r: &RootVector) -> Result<Vec<Rational>> {
    let base: Vec<Vec<i64>> = node.labels().iter().map(|l| l.0.clone()).collect();
    linalg::solve_in_span(&base, &r.0)
}

#[derive(Debug, Clone)]
pub struct ChamberNode {
    pub parabolic: LabeledParabolic,
    pub key: Vec<RootVector>,
    /// Weyl element carrying the base labels to this node's labels.
    pub transport: OrthogonalMap,
    /// Action of `transport` on 𝔨, present iff it preserves Φ_I, i.e. iff
    /// the node is W′-conjugate to the base.
    pub acc: Option<KMatrix>,
    /// `(node, vertex)` moves from the root node.
    pub word: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberEdge {
    pub from: usize,
    pub vertex: usize,
    pub to: usize,
    /// Present iff the twist preserves Φ_I.
    pub matrix: Option<KMatrix>,
}

#[derive(Debug, Clone)]
pub struct ChamberGraph {
    pub nodes: Vec<ChamberNode>,
    pub edges: Vec<ChamberEdge>,
    index: HashMap<Vec<RootVector>, usize>,
}

impl ChamberGraph {
    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn find(&self, key: &[RootVector]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn edges_from(&self, node: usize) -> impl Iterator<Item = &ChamberEdge> {
        self.edges.iter().filter(move |e| e.from == node)
    }

    /// Number of distinct mark sets among the nodes.
    pub fn mark_shape_count(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.parabolic.marks().clone())
            .collect::<BTreeSet<_>>()
            .len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub max_nodes: usize,
    /// Worker threads for expanding each BFS level; `None` or 1 runs inline.
    pub threads: Option<usize>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            max_nodes: DEFAULT_MAX_NODES,
            threads: None,
        }
    }
}

struct Step {
    beta: usize,
    next: LabeledParabolic,
    key: Vec<RootVector>,
    map: OrthogonalMap,
    matrix: Option<KMatrix>,
}

fn expand(node: &LabeledParabolic) -> Result<Vec<Step>> {
    node.marks()
        .iter()
        .map(|&beta| {
            let (next, map) = twist_with_map(node, beta)?;
            let matrix = if preserves_levi(node, &map) {
                Some(k_matrix_of_map(node, &map)?)
            } else {
                None
            };
            let key = nilradical_roots(&next);
            Ok(Step {
                beta,
                next,
                key,
                map,
                matrix,
            })
        })
        .collect()
}

/// BFS closure of `base` under twists at every marked vertex.
///
/// Levels are expanded (optionally in parallel) and then inserted in node
/// order, so the graph does not depend on the thread count.
pub fn enumerate_chambers(base: &LabeledParabolic, opts: EnumerateOptions) -> Result<ChamberGraph> {
    let d = base.ctx().kbasis().dim();
    let key = nilradical_roots(base);
    let mut graph = ChamberGraph {
        nodes: vec![ChamberNode {
            parabolic: base.clone(),
            key: key.clone(),
            transport: OrthogonalMap::identity(base.sys().dim()),
            acc: Some(KMatrix::identity(d)),
            word: Vec::new(),
        }],
        edges: Vec::new(),
        index: HashMap::from([(key, 0)]),
    };
    let pool = match opts.threads {
        Some(k) if k > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::PreconditionViolated(e.to_string()))?,
        ),
        _ => None,
    };
    let mut frontier: Vec<usize> = vec![0];
    while !frontier.is_empty() {
        let expansions: Vec<Result<Vec<Step>>> = match &pool {
            Some(pool) => pool.install(|| {
                frontier
                    .par_iter()
                    .map(|&i| expand(&graph.nodes[i].parabolic))
                    .collect()
            }),
            None => frontier.iter().map(|&i| expand(&graph.nodes[i].parabolic)).collect(),
        };
        let mut next_frontier = Vec::new();
        for (&from, exp) in frontier.iter().zip(expansions) {
            for step in exp? {
                let to = match graph.index.get(&step.key) {
                    Some(&to) => to,
                    None => {
                        if graph.nodes.len() >= opts.max_nodes {
                            return Err(Error::BudgetExceeded {
                                what: "chamber nodes",
                                limit: opts.max_nodes,
                            });
                        }
                        let parent = &graph.nodes[from];
                        let mut word = parent.word.clone();
                        word.push((from, step.beta));
                        let transport = step.map.compose(&parent.transport);
                        let acc = if preserves_levi(base, &transport) {
                            Some(k_matrix_of_map(base, &transport)?)
                        } else {
                            None
                        };
                        let id = graph.nodes.len();
                        graph.nodes.push(ChamberNode {
                            parabolic: step.next,
                            key: step.key.clone(),
                            transport,
                            acc,
                            word,
                        });
                        graph.index.insert(step.key, id);
                        next_frontier.push(id);
                        id
                    }
                };
                graph.edges.push(ChamberEdge {
                    from,
                    vertex: step.beta,
                    to,
                    matrix: step.matrix,
                });
            }
        }
        frontier = next_frontier;
    }
    Ok(graph)
}

/// A finite matrix group with a generator word for each element.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    pub generators: Vec<KMatrix>,
    pub elements: Vec<KMatrix>,
    /// Generator indices whose left-to-right product is the element.
    pub words: Vec<Vec<usize>>,
    index: HashMap<KMatrix, usize>,
}

impl MatrixGroup {
    /// Closure of `generators` under right multiplication.
    pub fn generate(dim: usize, generators: Vec<KMatrix>, max_elements: usize) -> Result<Self> {
        let id = KMatrix::identity(dim);
        let mut g = MatrixGroup {
            generators,
            elements: vec![id.clone()],
            words: vec![Vec::new()],
            index: HashMap::from([(id, 0)]),
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for s in 0..g.generators.len() {
                let prod = g.elements[e].mul(&g.generators[s]);
                if g.index.contains_key(&prod) {
                    continue;
                }
                if g.elements.len() >= max_elements {
                    return Err(Error::BudgetExceeded {
                        what: "group elements",
                        limit: max_elements,
                    });
                }
                let mut word = g.words[e].clone();
                word.push(s);
                g.index.insert(prod.clone(), g.elements.len());
                g.elements.push(prod);
                g.words.push(word);
                queue.push_back(g.elements.len() - 1);
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, m: &KMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &KMatrix) -> bool {
        self.index.contains_key(m)
    }

    /// Index of the generator equal to `m`, if any.
    pub fn generator_index(&self, m: &KMatrix) -> Option<usize> {
        self.generators.iter().position(|g| g == m)
    }

    pub fn reflection_count(&self) -> usize {
        self.elements.iter().filter(|m| m.is_reflection()).count()
    }

    /// Sorted set of element orders.
    pub fn element_orders(&self) -> BTreeSet<usize> {
        self.elements
            .iter()
            .map(|m| m.order(self.order()).expect("finite group element"))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.generators.iter().all(|s| self.contains(&a.mul(s))))
    }
}

/// Ŵ: the group generated by every distinct edge matrix, in first-seen order.
pub fn generate_w_prime(graph: &ChamberGraph, max_elements: usize) -> Result<MatrixGroup> {
    let dim = graph.nodes[0].parabolic.ctx().kbasis().dim();
    let mut gens: Vec<KMatrix> = Vec::new();
    for m in graph.edges.iter().filter_map(|e| e.matrix.as_ref()) {
        if !gens.contains(m) {
            gens.push(m.clone());
        }
    }
    MatrixGroup::generate(dim, gens, max_elements)
}

/// 𝔨-actions of the transports of nodes W′-conjugate to the base. W′ acts
/// simply transitively on these nodes, so this is W′ itself.
pub fn conjugate_actions(graph: &ChamberGraph) -> BTreeSet<KMatrix> {
    graph.nodes.iter().filter_map(|n| n.acc.clone()).collect()
}

/// N = ♯𝒮(L) / |Ŵ|.
pub fn class_count(chambers: usize, group_order: usize) -> Result<usize> {
    if group_order == 0 || !chambers.is_multiple_of(group_order) {
        return Err(Error::DivisibilityViolation {
            context: "chamber count by group order",
            numerator: chambers as u64,
            denominator: group_order as u64,
        });
    }
    Ok(chambers / group_order)
}
