//! Problem files, commands and reports for the `nilterm` binary.

pub mod problem;
pub mod report;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use nilterm_core::counting::{analyze_full, generator_name, Analysis, AnalyzeOptions, GroupProfile};
use nilterm_core::diagram::{format_combination, LabeledParabolic};
use nilterm_core::orbits::{oracle, x_collapse, OrbitFamily, Partition};
use nilterm_core::rootsys::Family;
use nilterm_core::twist::{enumerate_chambers, generate_w_prime, k_action, twist_at, EnumerateOptions, KMatrix};

pub use problem::{emit_problem, parse_problem, ProblemSpec};
pub use report::ReportDocument;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Core(#[from] nilterm_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub format: Format,
    pub max_nodes: Option<usize>,
    pub threads: Option<usize>,
}

/// Rendered command output and whether every check held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub ok: bool,
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
            s.push('\n');
            s
        }
        Format::Text => text(value),
    }
}

fn apply_overrides(spec: &ProblemSpec, opts: &RunOptions) -> ProblemSpec {
    let mut spec = spec.clone();
    if let Some(n) = opts.max_nodes {
        spec.budgets.max_nodes = n;
    }
    spec
}

pub fn load_problem(path: &str) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_problem(&text)
}

pub fn analyze_problem(spec: &ProblemSpec, opts: &RunOptions) -> Result<(ReportDocument, Analysis), CliError> {
    let spec = apply_overrides(spec, opts);
    let setup = spec.to_setup()?;
    let analysis = analyze_full(&setup, AnalyzeOptions { threads: opts.threads })?;
    Ok((ReportDocument::new(&spec, &analysis.report), analysis))
}

pub fn run_analyze(spec: &ProblemSpec, opts: &RunOptions) -> Result<Output, CliError> {
    let (doc, _) = analyze_problem(spec, opts)?;
    Ok(Output {
        text: render(opts.format, &doc, ReportDocument::to_text),
        ok: !doc.failed(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDump {
    pub index: usize,
    pub marks: Vec<usize>,
    /// Twist vertices leading from the base chamber.
    pub path: Vec<usize>,
    pub key: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDump {
    pub from: usize,
    pub vertex: usize,
    pub to: usize,
    pub matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationDump {
    pub chambers: usize,
    pub nodes: Vec<NodeDump>,
    pub edges: Vec<EdgeDump>,
}

impl EnumerationDump {
    fn to_text(&self) -> String {
        let mut out = format!("chambers: {}\n\nnodes\n", self.chambers);
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "  {:>5}  marks {:?}  path {:?}  nilradical {} roots",
                n.index,
                n.marks,
                n.path,
                n.key.len()
            );
        }
        out.push_str("\nedges\n");
        for e in &self.edges {
            let m = match &e.matrix {
                Some(rows) => format!("{rows:?}"),
                None => "moves Levi".to_string(),
            };
            let _ = writeln!(out, "  {:>5} --{}--> {:<5} {m}", e.from, e.vertex, e.to);
        }
        out
    }
}

fn base_of(spec: &ProblemSpec) -> Result<LabeledParabolic, CliError> {
    Ok(spec.validate()?.base)
}

pub fn run_enumerate(spec: &ProblemSpec, opts: &RunOptions) -> Result<Output, CliError> {
    let spec = apply_overrides(spec, opts);
    let base = base_of(&spec)?;
    let graph = enumerate_chambers(
        &base,
        EnumerateOptions {
            max_nodes: spec.budgets.max_nodes,
            threads: opts.threads,
        },
    )?;
    let dump = EnumerationDump {
        chambers: graph.count(),
        nodes: graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| NodeDump {
                index: i,
                marks: n.parabolic.marks().iter().copied().collect(),
                path: n.word.iter().map(|&(_, b)| b).collect(),
                key: n.key.iter().map(|r| r.coords().to_vec()).collect(),
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| EdgeDump {
                from: e.from,
                vertex: e.vertex,
                to: e.to,
                matrix: e.matrix.as_ref().map(KMatrix::rows),
            })
            .collect(),
    };
    Ok(Output {
        text: render(opts.format, &dump, EnumerationDump::to_text),
        ok: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Vertex twisted at to reach this diagram; absent for the base.
    pub vertex: Option<usize>,
    pub marks: Vec<usize>,
    /// Labels as combinations of simple roots, vertex by vertex.
    pub labels: Vec<Vec<i64>>,
    /// Action on the center of the Levi, when the twist preserves it.
    pub k_action: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDump {
    pub steps: Vec<TraceStep>,
}

impl TraceDump {
    fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            match s.vertex {
                None => out.push_str("base\n"),
                Some(v) => {
                    let _ = writeln!(out, "\ntwist at {v}");
                    match &s.k_action {
                        Some(rows) => out.push_str(&report::indent(&KMatrix::from_rows(rows).to_string(), 2)),
                        None => out.push_str("  (Levi moves; no action on the center)\n"),
                    }
                }
            }
            for (i, l) in s.labels.iter().enumerate() {
                let v = i + 1;
                let flag = if s.marks.contains(&v) { '*' } else { 'o' };
                let _ = writeln!(out, "{v:>3}  [{flag}]  {}", format_combination(l));
            }
        }
        out
    }
}

fn trace_step(p: &LabeledParabolic, vertex: Option<usize>, k: Option<KMatrix>) -> TraceStep {
    TraceStep {
        vertex,
        marks: p.marks().iter().copied().collect(),
        labels: (1..=p.labels().len()).map(|v| p.label_coefficients(v)).collect(),
        k_action: k.map(|m| m.rows()),
    }
}

pub fn run_twist_trace(spec: &ProblemSpec, at: &[usize], opts: &RunOptions) -> Result<Output, CliError> {
    let mut current = base_of(spec)?;
    let mut steps = vec![trace_step(&current, None, None)];
    for &v in at {
        let k = match k_action(&current, v) {
            Ok(m) => Some(m),
            Err(nilterm_core::Error::LeviNotPreserved(_)) => None,
            Err(e) => return Err(e.into()),
        };
        current = twist_at(&current, v)?;
        steps.push(trace_step(&current, Some(v), k));
    }
    let dump = TraceDump { steps };
    Ok(Output {
        text: render(opts.format, &dump, TraceDump::to_text),
        ok: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WPrimeDump {
    pub group: GroupProfile,
    pub generators: Vec<NamedMatrix>,
}

impl WPrimeDump {
    fn to_text(&self) -> String {
        let mut out = format!(
            "order {}\nreflections {}\nelement orders {:?}\n\ngenerators (rows are images of the marked dual basis)\n",
            self.group.order, self.group.reflections, self.group.element_orders
        );
        for g in &self.generators {
            let _ = writeln!(out, "  {}", g.name);
            out.push_str(&report::indent(&KMatrix::from_rows(&g.matrix).to_string(), 4));
        }
        out
    }
}

pub fn run_wprime(spec: &ProblemSpec, opts: &RunOptions) -> Result<Output, CliError> {
    let spec = apply_overrides(spec, opts);
    let base = base_of(&spec)?;
    let graph = enumerate_chambers(
        &base,
        EnumerateOptions {
            max_nodes: spec.budgets.max_nodes,
            threads: opts.threads,
        },
    )?;
    let group = generate_w_prime(&graph, spec.budgets.max_group)?;
    let mut best: Vec<Option<Vec<usize>>> = vec![None; group.generators.len()];
    for e in &graph.edges {
        let Some(m) = &e.matrix else { continue };
        let s = group.generator_index(m).expect("edge matrices are generators");
        let mut path: Vec<usize> = graph.nodes[e.from].word.iter().map(|&(_, b)| b).collect();
        path.push(e.vertex);
        if best[s]
            .as_ref()
            .is_none_or(|old| (path.len(), &path) < (old.len(), old))
        {
            best[s] = Some(path);
        }
    }
    let dump = WPrimeDump {
        group: GroupProfile::of(&group),
        generators: group
            .generators
            .iter()
            .zip(&best)
            .map(|(m, p)| NamedMatrix {
                name: generator_name(p.as_deref().expect("every generator has an edge")),
                matrix: m.rows(),
            })
            .collect(),
    };
    Ok(Output {
        text: render(opts.format, &dump, WPrimeDump::to_text),
        ok: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub partition: Vec<u32>,
    pub greedy: Vec<u32>,
    pub oracle: Vec<u32>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDump {
    pub family: String,
    pub n: usize,
    pub rows: Vec<OracleRow>,
    pub disagreements: usize,
}

impl OracleDump {
    fn to_text(&self) -> String {
        let mut out = format!("collapse oracle, family {}, n = {}\n", self.family, self.n);
        for r in &self.rows {
            let mark = if r.agree { "" } else { "  MISMATCH" };
            let _ = writeln!(
                out,
                "  {:<24} greedy {:<24} oracle {}{mark}",
                Partition::new(r.partition.clone()).to_string(),
                Partition::new(r.greedy.clone()).to_string(),
                Partition::new(r.oracle.clone())
            );
        }
        let _ = writeln!(
            out,
            "{} partitions, {} disagreements",
            self.rows.len(),
            self.disagreements
        );
        out
    }
}

pub fn run_oracle_collapse(family: Family, n: usize, opts: &RunOptions) -> Result<Output, CliError> {
    let of = OrbitFamily::of(family);
    let parity_ok = match of {
        OrbitFamily::Sp | OrbitFamily::SoD => n.is_multiple_of(2),
        OrbitFamily::SoB => n % 2 == 1,
        OrbitFamily::Sl => true,
    };
    if !parity_ok {
        return Err(CliError::Usage(format!("no {of} orbits in dimension {n}")));
    }
    let rows: Vec<OracleRow> = oracle::partitions(n)
        .into_iter()
        .map(|p| {
            let greedy = x_collapse(of, &p);
            let best = oracle::brute_force_collapse(of, &p);
            OracleRow {
                partition: p.parts().to_vec(),
                agree: greedy == best,
                greedy: greedy.parts().to_vec(),
                oracle: best.parts().to_vec(),
            }
        })
        .collect();
    let disagreements = rows.iter().filter(|r| !r.agree).count();
    let dump = OracleDump {
        family: family.to_string(),
        n,
        rows,
        disagreements,
    };
    Ok(Output {
        text: render(opts.format, &dump, OracleDump::to_text),
        ok: disagreements == 0,
    })
}
