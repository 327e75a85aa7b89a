//! End-to-end acceptance criteria. Prints one line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilterm_cli::{analyze_problem, load_problem, ProblemSpec, RunOptions};
use nilterm_core::counting::{
    analyze_full, extend_rho, validate_setup, AnalyzeOptions, Budgets, CoverKind, Setup, WallReader,
};
use nilterm_core::diagram::{from_marks, LabeledParabolic};
use nilterm_core::orbits::{
    check_chain, core_case, oracle, satisfies_parity, x_collapse, CoreCase, InductionKind, OrbitFamily, OrbitId,
    Partition,
};
use nilterm_core::rootsys::{
    build_root_system, express_in_base, longest_element_word, subsystem_roots, AlgebraFamily, Family, RootVector,
};
use nilterm_core::twist::{class_count, generate_w_prime, twist_at, KMatrix};
use nilterm_core::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn problem(name: &str) -> ProblemSpec {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "problems", name].iter().collect();
    load_problem(path.to_str().unwrap()).unwrap()
}

fn p(v: &[u32]) -> Partition {
    Partition::new(v.to_vec())
}

fn headline(spec: &ProblemSpec) -> Result<(Vec<u64>, nilterm_core::counting::Analysis), String> {
    let (doc, a) = analyze_problem(spec, &RunOptions::default()).map_err(|e| e.to_string())?;
    let keys = [
        "chambers",
        "w_prime_order",
        "classes",
        "pi1_target",
        "aut_x",
        "aut_core",
        "w_x_order",
        "count_by_classes",
        "count_by_chambers",
    ];
    ensure(!doc.failed(), || format!("failed checks: {:?}", doc.checks))?;
    Ok((keys.iter().map(|k| doc.counts[*k]).collect(), a))
}

fn sp20_end_to_end() -> Outcome {
    let (v, a) = headline(&problem("sp20.toml"))?;
    ensure(v == [48, 8, 6, 4, 4, 1, 2, 24, 24], || format!("report {v:?}"))?;
    ensure(a.w_prime.elements.iter().all(|m| m.mul(m).is_identity()), || {
        "an element of W′ is not an involution".into()
    })?;
    Ok("chambers 48, |W′| 8 (all involutions), N 6, |π₁| 4, |W_X| 2, count 24 by both routes".into())
}

/// Basis (α*3, α*6, α*9, α*9 − α*13); the change of basis is its own inverse.
fn modified_basis(m: &KMatrix) -> KMatrix {
    let p = KMatrix::from_rows(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, -1]]);
    m.change_basis(&p, &p)
}

fn so40_end_to_end() -> Outcome {
    let (v, a) = headline(&problem("so40.toml"))?;
    ensure(v == [384, 96, 4, 4, 4, 2, 48, 8, 8], || format!("report {v:?}"))?;
    let rows = |r: [[i64; 4]; 4]| KMatrix::from_rows(&r.map(|x| x.to_vec()));
    let printed = [
        ("T3", rows([[-1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])),
        ("T6", rows([[1, 1, 0, 0], [0, -1, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]])),
        ("T9+13", rows([[1, 0, 0, 0], [0, 1, 2, 0], [0, 0, -1, 0], [0, 0, 0, 1]])),
        ("T13", rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])),
    ];
    for (name, expected) in printed {
        let g = a
            .report
            .generators
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| format!("no generator named {name}"))?;
        let got = modified_basis(&KMatrix::from_rows(&g.matrix));
        ensure(got == expected, || format!("{name} is\n{got}"))?;
    }
    Ok("chambers 384, |W′| 96, N 4, |W_X| 48, count 8; T3, T6, T9+13, T13 match entry for entry".into())
}

/// Ambient realization of a twist picture: picture vertex `i` (α_0 … α_{last})
/// sits at ambient vertex `i + 1`.
struct Picture {
    name: String,
    algebra: AlgebraFamily,
    marks: Vec<usize>,
    beta: usize,
    /// Expected labels by ambient vertex, as coefficients over α_0 … α_{last}.
    labels: Vec<Vec<i64>>,
    expected_marks: Vec<usize>,
}

fn coeffs(len: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; len];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

fn range(lo: usize, hi: usize, c: i64) -> Vec<(usize, i64)> {
    (lo..=hi).map(|i| (i, c)).collect()
}

fn pictures(n: usize, k: usize) -> Vec<Picture> {
    let mut out = Vec::new();
    let chain_rev = |len: usize| -> Vec<Vec<i64>> { (1..=n).map(|j| coeffs(len, &[(n + 1 - j, -1)])).collect() };
    let in_place = |len: usize, upto: usize| -> Vec<Vec<i64>> { (1..=upto).map(|j| coeffs(len, &[(j, -1)])).collect() };

    // Type A chain α_0 … α_{n+1}, outer ends and α_k marked.
    {
        let len = n + 2;
        let mut labels = vec![coeffs(len, &[&[(0, 1)][..], &range(1, n, 1)].concat())];
        labels.extend(chain_rev(len));
        labels.push(coeffs(len, &[&[(n + 1, 1)][..], &range(1, n, 1)].concat()));
        out.push(Picture {
            name: format!("(i) A{}", n + 2),
            algebra: AlgebraFamily::new(Family::A, n + 2).unwrap(),
            marks: vec![1, k + 1, n + 2],
            beta: k + 1,
            labels,
            expected_marks: vec![1, n + 2 - k, n + 2],
        });
    }
    // D fork with α_{n+1} marked.
    {
        let len = n + 2;
        let mut labels = vec![coeffs(len, &[&[(0, 1)][..], &range(1, n, 1)].concat())];
        labels.extend(chain_rev(len));
        labels.push(coeffs(
            len,
            &[&[(1, 1), (n, 1), (n + 1, 1)][..], &range(2, n - 1, 2)].concat(),
        ));
        out.push(Picture {
            name: format!("(ii) D{}", n + 2),
            algebra: AlgebraFamily::new(Family::D, n + 2).unwrap(),
            marks: vec![1, k + 1, n + 2],
            beta: k + 1,
            labels,
            expected_marks: vec![1, n + 2 - k, n + 2],
        });
    }
    // Chain ending in a double bond after α_n.
    for (fam, c, tag) in [(Family::B, 1, "iii"), (Family::C, 2, "iv")] {
        let len = n + 2;
        let mut labels = vec![coeffs(len, &[&[(0, 1)][..], &range(1, n, 1)].concat())];
        labels.extend(chain_rev(len));
        labels.push(coeffs(len, &[&[(n + 1, 1)][..], &range(1, n, c)].concat()));
        out.push(Picture {
            name: format!("({tag}) {}{}", fam.letter(), n + 2),
            algebra: AlgebraFamily::new(fam, n + 2).unwrap(),
            marks: vec![1, k + 1, n + 2],
            beta: k + 1,
            labels,
            expected_marks: vec![1, n + 2 - k, n + 2],
        });
    }
    // Component of type B_n / C_n ending the diagram.
    {
        let len = n + 1;
        let mut labels = vec![coeffs(len, &[&[(0, 1)][..], &range(1, n, 2)].concat())];
        labels.extend(in_place(len, n));
        out.push(Picture {
            name: format!("(v) B{}", n + 1),
            algebra: AlgebraFamily::new(Family::B, n + 1).unwrap(),
            marks: vec![1, k + 1],
            beta: k + 1,
            labels,
            expected_marks: vec![1, k + 1],
        });
        let mut labels = vec![coeffs(len, &[&[(0, 1), (n, 1)][..], &range(1, n - 1, 2)].concat())];
        labels.extend(in_place(len, n));
        out.push(Picture {
            name: format!("(vi) C{}", n + 1),
            algebra: AlgebraFamily::new(Family::C, n + 1).unwrap(),
            marks: vec![1, k + 1],
            beta: k + 1,
            labels,
            expected_marks: vec![1, k + 1],
        });
    }
    // Component of type D_n ending the diagram.
    {
        let len = n + 1;
        let first = coeffs(len, &[&[(0, 1), (n - 1, 1), (n, 1)][..], &range(1, n - 2, 2)].concat());
        let mut labels = vec![first];
        if n % 2 == 1 {
            labels.extend(in_place(len, n - 2));
            labels.push(coeffs(len, &[(n, -1)]));
            labels.push(coeffs(len, &[(n - 1, -1)]));
            let (marks, expected) = if k == n - 1 {
                (vec![1, n], vec![1, n + 1])
            } else {
                (vec![1, k + 1], vec![1, k + 1])
            };
            out.push(Picture {
                name: format!("(vii) D{} k={k}", n + 1),
                algebra: AlgebraFamily::new(Family::D, n + 1).unwrap(),
                beta: marks[1],
                marks,
                labels,
                expected_marks: expected,
            });
        } else {
            labels.extend(in_place(len, n));
            out.push(Picture {
                name: format!("(viii) D{}", n + 1),
                algebra: AlgebraFamily::new(Family::D, n + 1).unwrap(),
                marks: vec![1, k + 1],
                beta: k + 1,
                labels,
                expected_marks: vec![1, k + 1],
            });
        }
    }
    out
}

fn check_picture(pic: &Picture) -> Result<(), String> {
    let base = from_marks(pic.algebra, &pic.marks).map_err(|e| e.to_string())?;
    let q = twist_at(&base, pic.beta).map_err(|e| e.to_string())?;
    let len = pic.labels[0].len();
    for (i, want) in pic.labels.iter().enumerate() {
        let got = q.label_coefficients(i + 1);
        // Coordinates past the picture's last vertex must vanish.
        ensure(got[len..].iter().all(|&c| c == 0) && got[..len] == want[..], || {
            format!("{}: vertex {} has {:?}, expected {:?}", pic.name, i + 1, got, want)
        })?;
    }
    let marks: Vec<usize> = q.marks().iter().copied().collect();
    ensure(marks == pic.expected_marks, || {
        format!("{}: marks {:?}, expected {:?}", pic.name, marks, pic.expected_marks)
    })
}

fn twist_pictures() -> Outcome {
    let mut checked = 0;
    for (n, k) in [(4, 2), (5, 3)] {
        for pic in pictures(n, k) {
            check_picture(&pic)?;
            checked += 1;
        }
    }
    // The D_n-component pictures need n odd with k ≤ n − 2 or k = n − 1,
    // and n even respectively.
    for (n, k) in [(5, 4), (6, 3)] {
        for pic in pictures(n, k)
            .into_iter()
            .filter(|p| p.name.starts_with("(vii)") || p.name.starts_with("(viii)"))
        {
            check_picture(&pic)?;
            checked += 1;
        }
    }
    Ok(format!("{checked} twisted diagrams match the printed labels and marks"))
}

fn induction_chain() -> Outcome {
    let core = OrbitId::new(OrbitFamily::Sp, p(&[1, 1, 1, 1]));
    let target = OrbitId::new(OrbitFamily::Sp, p(&[6, 6, 4, 4]));
    let steps = [(3, p(&[1, 1, 1])), (1, p(&[1])), (4, p(&[1, 1, 1, 1]))];
    let chain = check_chain(&core, &steps, &target).map_err(|e| e.to_string())?;
    let results: Vec<Partition> = chain.iter().map(|s| s.result.clone()).collect();
    let kinds: Vec<InductionKind> = chain.iter().map(|s| s.kind).collect();
    ensure(
        results == [p(&[3, 3, 2, 2]), p(&[4, 4, 2, 2]), p(&[6, 6, 4, 4])],
        || format!("chain {results:?}"),
    )?;
    ensure(
        kinds == [InductionKind::TypeII, InductionKind::TypeII, InductionKind::TypeI],
        || format!("types {kinds:?}"),
    )?;
    Ok("[1⁴] → [3²,2²] → [4²,2²] → [6²,4²] with types II, II, I".into())
}

fn collapse_oracle() -> Outcome {
    let mut cases = 0;
    for n in 1..=16 {
        for fam in [OrbitFamily::SoB, OrbitFamily::Sp, OrbitFamily::SoD] {
            let ok_dim = match fam {
                OrbitFamily::SoB => n % 2 == 1,
                _ => n % 2 == 0,
            };
            if !ok_dim {
                continue;
            }
            for part in oracle::partitions(n) {
                let greedy = x_collapse(fam, &part);
                let best = oracle::brute_force_collapse(fam, &part);
                ensure(greedy == best, || {
                    format!("{fam} {part}: greedy {greedy}, oracle {best}")
                })?;
                ensure(satisfies_parity(fam, &greedy), || {
                    format!("{fam} {part}: {greedy} breaks parity")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} partitions, greedy = dominance maximum throughout"))
}

fn random_subsystems(rng: &mut ChaCha8Rng, count: usize) -> Result<usize, String> {
    let mut done = 0;
    while done < count {
        let fam = *[Family::A, Family::B, Family::C, Family::D].choose(rng).unwrap();
        let rank = rng.gen_range(if fam == Family::D { 4 } else { 2 }..=8);
        let sys = build_root_system(AlgebraFamily::new(fam, rank).unwrap()).map_err(|e| e.to_string())?;
        let mut chosen: Vec<RootVector> = sys
            .simple_roots()
            .iter()
            .filter(|_| rng.gen_bool(0.6))
            .cloned()
            .collect();
        if chosen.is_empty() {
            continue;
        }
        // Conjugate by a random Weyl element.
        for _ in 0..rng.gen_range(0..12) {
            let s = sys.simple_roots().choose(rng).unwrap().clone();
            for r in chosen.iter_mut() {
                *r = r.reflect(&s);
            }
        }
        let (w0, word) = longest_element_word(&sys, &chosen).map_err(|e| e.to_string())?;
        ensure(w0.compose(&w0).is_identity(), || {
            format!("w₀ not an involution on {chosen:?}")
        })?;
        let roots = subsystem_roots(&chosen);
        let positive: Vec<&RootVector> = roots
            .iter()
            .filter(|r| express_in_base(r, &chosen).unwrap().iter().all(|c| *c.numer() >= 0))
            .collect();
        ensure(word.len() == positive.len(), || {
            format!("word length {} vs {} positive roots", word.len(), positive.len())
        })?;
        for r in &positive {
            let img = w0.apply(r);
            let c = express_in_base(&img, &chosen).map_err(|e| e.to_string())?;
            ensure(c.iter().all(|x| *x.numer() <= 0), || format!("w₀ keeps {r:?} positive"))?;
        }
        for r in sys.roots() {
            if chosen.iter().all(|b| b.dot(r) == 0) {
                ensure(&w0.apply(r) == r, || format!("w₀ moves orthogonal root {r:?}"))?;
            }
        }
        done += 1;
    }
    Ok(done)
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let subsystems = random_subsystems(&mut rng, 200)?;
    let mut edges = 0;
    for name in ["sp20.toml", "so40.toml"] {
        let spec = problem(name);
        let setup = spec.to_setup().map_err(|e| e.to_string())?;
        let a = analyze_full(&setup, AnalyzeOptions::default()).map_err(|e| e.to_string())?;
        let g = &a.graph;
        for e in &g.edges {
            let back = twist_at(
                &g.nodes[e.to].parabolic,
                back_vertex(&g.nodes[e.to].parabolic, &g.nodes[e.from].parabolic, e.vertex)?,
            )
            .map_err(|e| e.to_string())?;
            let key = nilterm_core::twist::nilradical_roots(&back);
            ensure(key == g.nodes[e.from].key, || {
                format!("{name}: edge {e:?} is not undone")
            })?;
            if let Some(m) = &e.matrix {
                ensure(m.is_reflection(), || {
                    format!("{name}: edge matrix is not a reflection\n{m}")
                })?;
            }
            edges += 1;
        }
        let w = generate_w_prime(g, setup.budgets.max_group).map_err(|e| e.to_string())?;
        class_count(g.count(), w.order()).map_err(|e| e.to_string())?;
        extend_rho(&w, &a.generator_rho).map_err(|e| e.to_string())?;
        let image: BTreeSet<_> = extend_rho(&w, &a.generator_rho).unwrap().into_iter().collect();
        let v = &a.validated;
        ensure(image.len() as u64 == v.aut_x / v.aut_core, || {
            format!(
                "{name}: |image ρ̄| = {} but autX/autCore = {}",
                image.len(),
                v.aut_x / v.aut_core
            )
        })?;
    }
    Ok(format!(
        "{subsystems} random subsystems; {edges} edges undone by their back twist, all edge matrices integral reflections; divisibility, ρ̄ homomorphism and |image ρ̄| hold"
    ))
}

/// The vertex of `to` whose twist undoes the twist of `from` at `beta`: the
/// marked vertex of `to` carrying the negative of `from`'s label at `beta`.
fn back_vertex(to: &LabeledParabolic, from: &LabeledParabolic, beta: usize) -> Result<usize, String> {
    let target = from.label(beta).neg();
    let hits: Vec<usize> = to.marks().iter().copied().filter(|&v| to.label(v) == &target).collect();
    match hits[..] {
        [v] => Ok(v),
        _ => Err(format!("no unique back vertex for twist at {beta}")),
    }
}

fn distinct_type_two_walls() -> Outcome {
    let setup = problem("sp20.toml").to_setup().map_err(|e| e.to_string())?;
    let a = analyze_full(&setup, AnalyzeOptions::default()).map_err(|e| e.to_string())?;
    let reader = WallReader::new(&a.validated);
    let node = |marks: [usize; 3]| {
        a.graph
            .nodes
            .iter()
            .position(|n| n.parabolic.marks().iter().copied().eq(marks))
            .ok_or_else(|| format!("no chamber with marks {marks:?}"))
    };
    // Erasing mark 8 leaves the flags (4,1,10,1,4) and (4,3,6,3,4).
    let first = reader
        .wall_of_twist(&a.graph, node([4, 5, 8])?, 8)
        .map_err(|e| e.to_string())?;
    let second = reader
        .wall_of_twist(&a.graph, node([4, 7, 8])?, 8)
        .map_err(|e| e.to_string())?;
    let r1 = reader.rho_bar(&a.graph, &first).map_err(|e| e.to_string())?;
    let r2 = reader.rho_bar(&a.graph, &second).map_err(|e| e.to_string())?;
    ensure(!r1.is_zero() && !r2.is_zero() && r1 != r2, || {
        format!("ρ̄ values {r1} and {r2}")
    })?;
    Ok(format!("walls (4,1,10,1,4) and (4,3,6,3,4) give ρ̄ = {r1} and {r2}"))
}

fn compositions(total: usize, max_parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(rest: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if left == 0 {
            return;
        }
        for b in 1..=rest {
            cur.push(b);
            go(rest - b, left - 1, cur, out);
            cur.pop();
        }
    }
    go(total, max_parts, &mut Vec::new(), &mut out);
    out
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    let all = oracle::partitions(n);
    all.choose(rng).unwrap().clone()
}

/// One setup per (core, blocks) with zero gl orbits, plus seeded random gl
/// orbits; invalid setups (target not an sp orbit of the right cover
/// degree) are skipped.
fn consistency_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut accepted = 0;
    let mut skipped = 0;
    let mut type_two = 0;
    let mut skip_reasons = std::collections::BTreeMap::new();
    for m in 0..=4usize {
        let cores: Vec<Partition> = oracle::partitions(2 * m)
            .into_iter()
            .filter(|c| satisfies_parity(OrbitFamily::Sp, c) && core_case(OrbitFamily::Sp, c) == CoreCase::A)
            .collect();
        for core in cores {
            for s in 1..=(8 - m) {
                for blocks in compositions(s, 3) {
                    for variant in 0..2 {
                        let gl_orbits = if variant == 0 {
                            None
                        } else if blocks.iter().any(|&b| b > 1) {
                            Some(
                                blocks
                                    .iter()
                                    .map(|&b| random_partition(&mut rng, b))
                                    .collect::<Vec<_>>(),
                            )
                        } else {
                            continue;
                        };
                        let mut setup = Setup {
                            algebra: AlgebraFamily::new(Family::C, s + m).unwrap(),
                            target: Partition::default(),
                            half_blocks: blocks.clone(),
                            middle_core: core.clone(),
                            gl_orbits,
                            cover: CoverKind::Universal,
                            budgets: Budgets::default(),
                        };
                        let steps = setup.chain_steps();
                        let Ok(target) = fold_chain(&core, &steps) else {
                            *skip_reasons.entry("chain").or_insert(0usize) += 1;
                            skipped += 1;
                            continue;
                        };
                        setup.target = target;
                        let v = match validate_setup(&setup) {
                            Ok(v) => v,
                            Err(e) => {
                                *skip_reasons.entry(e.field).or_insert(0usize) += 1;
                                skipped += 1;
                                continue;
                            }
                        };
                        type_two += v.chain.iter().filter(|s| s.kind == InductionKind::TypeII).count();
                        let a = analyze_full(&setup, AnalyzeOptions::default()).map_err(|e| {
                            format!(
                                "C{} core {core} blocks {blocks:?} orbits {:?}: {e}",
                                s + m,
                                setup.gl_orbits
                            )
                        })?;
                        let r = &a.report;
                        ensure(r.count_by_classes == r.count_by_chambers, || {
                            format!(
                                "C{} core {core} blocks {blocks:?}: class route {} vs chamber route {}",
                                s + m,
                                r.count_by_classes,
                                r.count_by_chambers
                            )
                        })?;
                        accepted += 1;
                    }
                }
            }
        }
    }
    ensure(accepted >= 100, || format!("only {accepted} setups accepted"))?;
    Ok(format!(
        "{accepted} sp setups (rank ≤ 8, {type_two} type II steps) agree on both counts; {skipped} invalid setups skipped {skip_reasons:?}"
    ))
}

fn fold_chain(core: &Partition, steps: &[(usize, Partition)]) -> Result<Partition, Error> {
    let mut cur = core.clone();
    for (k, q) in steps {
        cur = nilterm_core::orbits::induce(OrbitFamily::Sp, &cur, *k, q)?;
    }
    Ok(cur)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("sp(20) end to end", sp20_end_to_end),
        ("so(40) end to end", so40_end_to_end),
        ("twist pictures", twist_pictures),
        ("induction chain", induction_chain),
        ("collapse oracle", collapse_oracle),
        ("property suite", property_suite),
        ("distinct type II walls", distinct_type_two_walls),
        ("consistency sweep", consistency_sweep),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
