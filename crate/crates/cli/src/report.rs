//! Machine and text renderings of command results.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use nilterm_core::counting::{AnalysisReport, CheckStatus, CrossCheck, GroupProfile};
use nilterm_core::twist::KMatrix;

use crate::problem::ProblemSpec;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRow {
    pub k: usize,
    pub q: Vec<u32>,
    pub kind: String,
    pub degree: u32,
    pub witness: Option<u32>,
    pub result: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRow {
    pub name: String,
    pub matrix: Vec<Vec<i64>>,
    pub rho: u64,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRow {
    pub beta: usize,
    pub merge_kind: String,
    pub k_t: Option<usize>,
    pub kind: Option<String>,
    /// Absent when the twist moves the Levi factor.
    pub rho: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub problem: ProblemSpec,
    pub counts: BTreeMap<String, u64>,
    pub core_case: String,
    pub rho_factors: Vec<u32>,
    pub chain: Vec<ChainRow>,
    pub w_x: GroupProfile,
    pub generators: Vec<GeneratorRow>,
    pub walls: Vec<WallRow>,
    pub checks: Vec<CrossCheck>,
}

impl ReportDocument {
    pub fn new(problem: &ProblemSpec, r: &AnalysisReport) -> Self {
        let counts = [
            ("chambers", r.chambers),
            ("w_prime_order", r.w_prime_order),
            ("classes", r.classes),
            ("pi1_target", r.pi1_target),
            ("aut_x", r.aut_x),
            ("aut_core", r.aut_core),
            ("w_x_order", r.w_x_order),
            ("count_by_classes", r.count_by_classes),
            ("count_by_chambers", r.count_by_chambers),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        ReportDocument {
            tool_version: TOOL_VERSION.to_string(),
            problem: problem.clone(),
            counts,
            core_case: r.core_case.to_string(),
            rho_factors: r.rho_factors.clone(),
            chain: r
                .chain
                .iter()
                .map(|s| ChainRow {
                    k: s.k,
                    q: s.q.parts().to_vec(),
                    kind: s.kind.to_string(),
                    degree: s.degree,
                    witness: s.witness,
                    result: s.result.parts().to_vec(),
                })
                .collect(),
            w_x: r.w_x_profile.clone(),
            generators: r
                .generators
                .iter()
                .map(|g| GeneratorRow {
                    name: g.name.clone(),
                    matrix: g.matrix.clone(),
                    rho: g.rho.0,
                    edges: g.edges,
                })
                .collect(),
            walls: r
                .base_walls
                .iter()
                .map(|w| WallRow {
                    beta: w.wall.vertex,
                    merge_kind: w.wall.merge_kind.to_string(),
                    k_t: w.wall.k_t,
                    kind: w.wall.kind.map(|k| k.to_string()),
                    rho: w.rho.map(|r| r.0),
                })
                .collect(),
            checks: r.checks.clone(),
        }
    }

    /// The terminalization count, when both routes agree.
    pub fn headline(&self) -> Option<u64> {
        let a = self.counts["count_by_classes"];
        (a == self.counts["count_by_chambers"]).then_some(a)
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.problem;
        let _ = writeln!(
            out,
            "{}{}  orbit {:?}  blocks {:?}  core {:?}  cover {}",
            p.algebra.family, p.algebra.rank, p.orbit, p.setup.half_blocks, p.setup.middle_core, p.setup.cover
        );
        match self.headline() {
            Some(n) => {
                let _ = writeln!(out, "terminalizations: {n}");
            }
            None => {
                let _ = writeln!(out, "terminalizations: routes disagree");
            }
        }
        out.push_str("\ncounts\n");
        for (k, v) in &self.counts {
            let _ = writeln!(out, "  {k:<18} {v}");
        }
        let _ = writeln!(out, "  core case          {}", self.core_case);
        out.push_str("\ninduction chain\n");
        for s in &self.chain {
            let w = s.witness.map_or(String::new(), |i| format!("  witness {i}"));
            let _ = writeln!(out, "  k={} q={:?} -> {:?}  type {}{w}", s.k, s.q, s.result, s.kind);
        }
        let _ = writeln!(
            out,
            "\nW_X: order {}, {} reflections, element orders {:?}",
            self.w_x.order, self.w_x.reflections, self.w_x.element_orders
        );
        let _ = writeln!(out, "rho factors (special parts): {:?}", self.rho_factors);
        out.push_str("\nwalls of the base chamber\n");
        for w in &self.walls {
            let kind = w.kind.as_deref().unwrap_or("-");
            let k = w.k_t.map_or("-".to_string(), |k| k.to_string());
            let rho = w.rho.map_or("moves Levi".to_string(), |r| format!("{r:#b}"));
            let _ = writeln!(
                out,
                "  beta={:<3} {:<12} k={k:<3} type {kind:<3} rho {rho}",
                w.beta, w.merge_kind
            );
        }
        out.push_str("\ngenerators\n");
        for g in &self.generators {
            let _ = writeln!(out, "  {} rho {:#b} ({} edges)", g.name, g.rho, g.edges);
            out.push_str(&indent(&KMatrix::from_rows(&g.matrix).to_string(), 4));
        }
        out.push_str("\nchecks\n");
        out.push_str(&checks_text(&self.checks));
        out
    }
}

pub fn checks_text(checks: &[CrossCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Advisory => "advisory",
        };
        let _ = writeln!(
            out,
            "  [{status}] {}: expected {}, actual {}",
            c.name, c.expected, c.actual
        );
    }
    out
}

pub fn indent(s: &str, n: usize) -> String {
    let pad = " ".repeat(n);
    s.lines().map(|l| format!("{pad}{l}\n")).collect()
}
