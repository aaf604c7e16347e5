//! Acceptance suite. Run with `cargo test --release --test acceptance`.
//!
//! Each criterion prints one line: its number, PASS or FAIL, the measured
//! quantities against their pinned bounds, and the elapsed time against the
//! time budget. The process exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use andreev::angles::{check_conditions, check_with, feasible, AndreevConstraints, AngleAssignment};
use andreev::complex::*;
use andreev::minkowski::{
    build_prism, extract_combinatorics, same_cell_structure, vertex_determinant, vertex_determinant_product,
    MVec,
};
use andreev::realize::*;
use andreev::scalar::ratio;
use andreev::whitehead::{apply_move, random_simple, reduce_to_dn, EpisodeCase};

use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const GRAM_TOL: f64 = 1e-10;
const ANGLE_TOL: f64 = 1e-9;
const UNIQUE_TOL: f64 = 1e-8;
const GLUE_TOL: f64 = 1e-8;
const COSEQN_TOL: f64 = 1e-12;
const EVENT_DET: f64 = 1e-7;
const BALL_SEP: f64 = 1e-3;

fn c1_axioms() -> Outcome {
    let mut cs = vec![tetrahedron(), cube()];
    cs.extend((5..=10).map(prism));
    cs.extend([dodecahedron(), truncated_tetrahedron(), alternately_truncated_cube()]);
    for c in &cs {
        let json = c.to_json();
        let rebuilt = AbstractPolyhedron::build(json.vertex_count, json.faces).map_err(|e| e.to_string())?;
        let (n, e, v) = (rebuilt.face_count(), rebuilt.edge_count(), rebuilt.vertex_count());
        ensure!(e == 3 * (n - 2), "{:?}: E = {e}, N = {n}", c.name());
        ensure!(n + v == e + 2, "{:?}: Euler", c.name());
    }
    Ok(format!("{} complexes, E = 3(N-2) exact", cs.len()))
}

fn c2_circuit_oracle() -> Outcome {
    let mut checked = 0;
    for c in corpus().into_iter().filter(|c| c.face_count() <= 14) {
        for k in [3, 4] {
            let fast: std::collections::BTreeSet<Vec<usize>> =
                c.prismatic_circuits(k).iter().map(|x| canonical_cycle(&x.dual_nodes)).collect();
            let brute = brute_prismatic(&c, k);
            ensure!(fast == brute, "{:?} k={k}: {} vs {} circuits", c.name(), fast.len(), brute.len());
            checked += brute.len();
        }
    }
    Ok(format!("{checked} circuits agree with brute force"))
}

fn c3_four_circuits() -> Outcome {
    let mut cycles = 0;
    for seed in 0..100u64 {
        let n = 8 + (seed as usize % 7);
        let d = random_simple(n, seed, 4 * n);
        let c = d.to_primal().map_err(|e| e.to_string())?;
        ensure!(separating_3cycles(&d).is_empty(), "seed {seed}: not simple");
        for cy in simple_cycles(&d, 4) {
            if distinct_endpoints(&crossed_edges(&c, &cy)) {
                continue;
            }
            let (l, r) = sides(&d, &cy);
            ensure!(l.min(r) == 2, "seed {seed}: cycle {cy:?} splits {l}/{r}");
            cycles += 1;
        }
    }
    Ok(format!("{cycles} non-prismatic 4-cycles, each separates 2 vertices"))
}

fn c4_feasibility() -> Outcome {
    let atc = feasible(&alternately_truncated_cube());
    ensure!(!atc.nonempty && atc.max_slack <= ratio(0, 1), "alternately truncated cube: {}", atc.max_slack);
    let mut simple = 0;
    for c in corpus().into_iter().filter(|c| c.is_simple()) {
        let f = feasible(&c);
        ensure!(f.nonempty, "{:?} reported empty", c.name());
        let w = f.witness.ok_or("no witness")?;
        ensure!(check_conditions(&c, &w).map_err(|e| e.to_string())?.member, "{:?}: witness fails", c.name());
        simple += 1;
    }
    let two_fifths = AngleAssignment::uniform(30, ratio(2, 5));
    ensure!(check_conditions(&dodecahedron(), &two_fifths).unwrap().member, "dodecahedron at 2/5");
    Ok(format!("empty with slack {}; {simple} simple complexes feasible", atc.max_slack))
}

/// Random assignment in units of π, biased toward the right angle.
fn random_angles(rng: &mut ChaCha8Rng, edges: usize) -> AngleAssignment {
    AngleAssignment::new(
        (0..edges)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    ratio(1, 2)
                } else {
                    ratio(rng.gen_range(1..30), 60)
                }
            })
            .collect(),
    )
}

fn c5_condition_five() -> Outcome {
    let mut pool: Vec<AbstractPolyhedron> = corpus()
        .into_iter()
        .filter(|c| c.face_count() > 4 && isomorphic(c, &prism(5)).is_none())
        .collect();
    pool.extend((0..20u64).map(|s| random_simple(8 + s as usize % 5, s, 30).to_primal().unwrap()));
    pool.retain(|c| !c.quadrilateral_contexts().is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = 0;
    let mut tries = 0;
    while cases < 500 {
        tries += 1;
        ensure!(tries < 2_000_000, "only {cases} admissible samples");
        let c = &pool[rng.gen_range(0..pool.len())];
        let k = AndreevConstraints::new(c);
        let a = random_angles(&mut rng, c.edge_count());
        let r = check_with(&k, &a, false).unwrap();
        if !(1..=4).all(|i| r.holds(i)) {
            continue;
        }
        ensure!(r.holds(5), "{:?}: (5) fails at {:?}", c.name(), a.values());
        cases += 1;
    }
    // Control: on the triangular prism (5) is independent.
    let p = prism(5);
    let control = AngleAssignment::new(
        p.edges()
            .iter()
            .map(|e| if e.faces[1] < 3 { ratio(1, 4) } else { ratio(1, 2) })
            .collect(),
    );
    let r = check_conditions(&p, &control).unwrap();
    ensure!((1..=4).all(|i| r.holds(i)) && !r.holds(5), "prism control");
    Ok(format!("{cases} cases from {tries} draws; prism control violates (5) alone"))
}

fn verify_steps(d: &DualComplex) -> Result<(usize, usize), String> {
    let t = reduce_to_dn(d).map_err(|e| e.to_string())?;
    let mut cur = t.start.clone();
    let mut stages = vec![cur.clone()];
    for mv in &t.moves {
        cur = apply_move(&cur, mv).map_err(|e| e.to_string())?;
        ensure!(separating_3cycles(&cur).is_empty(), "intermediate complex has a prismatic 3-circuit");
        stages.push(cur.clone());
    }
    ensure!(cur == t.end, "replayed end differs");
    ensure!(
        isomorphic_duals(&cur, &split_prism_dual(d.node_count())).is_some(),
        "end is not the split prism"
    );
    for ep in &t.episodes {
        let before = stages[ep.moves.start].degree(t.v_inf);
        let after = stages[ep.moves.end].degree(t.v_inf);
        // The closing transfers rearrange the last two interior nodes only.
        let growth = if ep.case == EpisodeCase::Finish { 0 } else { 1 };
        ensure!(after == before + growth, "polygon {before} -> {after} in a {:?} episode", ep.case);
    }
    Ok((t.moves.len(), t.episodes.len()))
}

fn c6_dodecahedron_reduction() -> Outcome {
    let (moves, episodes) = verify_steps(&dodecahedron().dual())?;
    Ok(format!("{moves} moves, {episodes} episodes, ends at D_12"))
}

fn c7_random_reduction() -> Outcome {
    let mut moves = 0;
    for seed in 0..100u64 {
        let n = 8 + (seed as usize % 7);
        let (m, _) = verify_steps(&random_simple(n, 1000 + seed, 4 * n)).map_err(|e| format!("seed {seed}: {e}"))?;
        moves += m;
    }
    Ok(format!("100 complexes, {moves} moves, all stages simple"))
}

fn c8_coseqn() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let [a, b, c] = [0; 3].map(|_| rng.gen_range(1e-3..PI / 2.0));
        worst = worst.max((vertex_determinant(a, b, c) - vertex_determinant_product(a, b, c)).abs());
    }
    ensure!(worst < COSEQN_TOL, "forms differ by {worst:e}");
    let mut boundary: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.gen_range(0.0..PI / 2.0);
        let b = rng.gen_range((PI / 2.0 - a)..PI / 2.0);
        boundary = boundary.max(vertex_determinant(a, b, PI - a - b).abs());
    }
    ensure!(boundary < COSEQN_TOL, "boundary |D| = {boundary:e}");
    Ok(format!("max form gap {worst:.1e}, boundary |D| {boundary:.1e} < {COSEQN_TOL:e}"))
}

fn c9_explicit_prism() -> Outcome {
    let r = build_prism(5, PI / 4.0, 0.01).map_err(|e| e.to_string())?;
    let c = r.complex();
    let got = r.achieved_angles();
    let mut lateral: f64 = 0.0;
    for (e, edge) in c.edges().iter().enumerate() {
        let sides = edge.faces.iter().all(|&f| c.faces()[f].len() == 4);
        if sides {
            lateral = lateral.max((got[e] - PI / 4.0).abs());
        } else {
            ensure!(got[e] > 0.0 && got[e] < PI / 2.0, "cap angle {}", got[e]);
        }
    }
    ensure!(lateral < ANGLE_TOL, "lateral deviation {lateral:e}");
    let ext = extract_combinatorics(r.normals(), 1e-9).map_err(|e| e.to_string())?;
    ensure!(isomorphic(&ext.complex, &prism(5)).is_some(), "extraction is not Pr_5");
    Ok(format!("lateral deviation {lateral:.1e}, extraction = Pr_5"))
}

fn c10_split_prism() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    for n in 8..=12 {
        let s = build_split_prism(n, &cfg).map_err(|e| format!("N={n}: {e}"))?;
        worst = worst.max(s.merged_defect);
        ensure!(s.merged_defect < GLUE_TOL, "N={n}: merged defect {:e}", s.merged_defect);
        let ext = extract_combinatorics(s.realization.normals(), cfg.classify_tol).map_err(|e| e.to_string())?;
        ensure!(isomorphic(&ext.complex, &split_prism(n)).is_some(), "N={n}: not D_N");
    }
    Ok(format!("N=8..12, merged defect {worst:.1e} < {GLUE_TOL:e}"))
}

fn residual_cases() -> Vec<(&'static str, AbstractPolyhedron, AngleAssignment)> {
    let d = dodecahedron();
    let p = prism(5);
    let pa = AngleAssignment::new(
        p.edges()
            .iter()
            .map(|e| if e.faces[1] < 3 { ratio(1, 4) } else { ratio(49, 100) })
            .collect(),
    );
    vec![
        ("dodecahedron 2pi/5", d.clone(), AngleAssignment::uniform(30, ratio(2, 5))),
        ("dodecahedron pi/2", d, AngleAssignment::uniform(30, ratio(1, 2))),
        ("Pr_5 pi/4 49pi/100", p, pa),
    ]
}

fn c11_residuals() -> Outcome {
    let mut parts = Vec::new();
    for (name, c, a) in residual_cases() {
        let r = realize(&c, &a, &SolverConfig::default()).map_err(|e| format!("{name}: {e}"))?;
        let (res, dev) = (r.gram_residual(), r.angle_deviation());
        ensure!(res < GRAM_TOL && dev < ANGLE_TOL, "{name}: residual {res:e}, deviation {dev:e}");
        ensure!(r.margin() > 0.0, "{name}: margin {}", r.margin());
        parts.push(format!("{name} res {res:.1e} dev {dev:.1e}"));
    }
    Ok(parts.join("; "))
}

fn perturbed(normals: &[MVec<f64>], seed: u64, size: f64) -> Vec<MVec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    normals
        .iter()
        .map(|v| {
            let mut w = *v;
            for x in w.x.iter_mut() {
                *x += rng.gen_range(-size..size);
            }
            w
        })
        .collect()
}

fn c12_uniqueness() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    for (name, c, a) in residual_cases() {
        let r = realize(&c, &a, &cfg).map_err(|e| format!("{name}: {e}"))?;
        let target = a.radians();
        let s1 = newton_solve(&c, &target, &perturbed(r.normals(), 12, 1e-2), &cfg).map_err(|e| format!("{name}: {e}"))?;
        let s2 = newton_solve(&c, &target, &perturbed(r.normals(), 1212, 1e-2), &cfg).map_err(|e| format!("{name}: {e}"))?;
        let gap = edge_length_gap(&s1.edge_lengths(), &s2.edge_lengths());
        ensure!(gap < UNIQUE_TOL, "{name}: edge lengths differ by {gap:e}");
        worst = worst.max(gap);
    }
    Ok(format!("sorted edge lengths agree to {worst:.1e} < {UNIQUE_TOL:e}"))
}

fn c13_replay() -> Outcome {
    let cfg = SolverConfig::default();
    let c = dodecahedron();
    let mut report = PipelineReport::default();
    let mut failures = Vec::new();
    let mut stages = 0;
    let (r, duals) = replay_trace(&c, &cfg, &mut report, |i, stage| {
        stages += 1;
        match extract_combinatorics(stage.normals(), cfg.classify_tol) {
            Ok(ext) if same_cell_structure(&ext.complex, stage.complex()) => {}
            Ok(_) => failures.push(format!("stage {i}: other cell structure")),
            Err(e) => failures.push(format!("stage {i}: {e}")),
        }
    })
    .map_err(|e| e.to_string())?;
    ensure!(failures.is_empty(), "{}", failures.join(", "));
    ensure!(stages == duals.len(), "visited {stages} of {} stages", duals.len());
    let end = continue_path(&r, &AngleAssignment::uniform(30, ratio(2, 5)), &cfg).map_err(|e| e.to_string())?;
    ensure!(end.gram_residual() < GRAM_TOL, "final residual {:e}", end.gram_residual());
    Ok(format!("{stages} stages extract correctly, final residual {:.1e}", end.gram_residual()))
}

fn c14_glue() -> Outcome {
    let cfg = SolverConfig::default();
    let c = twin_truncated_cubes();
    let plan = decompose(&c).map_err(|e| e.to_string())?;
    ensure!(plan.circuits.len() == 1 && plan.pieces.len() == 2, "plan {:?}", plan.circuits);
    let [f, g, h] = plan.circuits[0];
    let mut a = AngleAssignment::uniform(c.edge_count(), ratio(2, 5));
    let crossing = [
        (c.edge_between_faces(f, g).unwrap(), ratio(1, 4)),
        (c.edge_between_faces(g, h).unwrap(), ratio(3, 10)),
        (c.edge_between_faces(h, f).unwrap(), ratio(7, 20)),
    ];
    for (e, r) in &crossing {
        a.set(*e, r.clone());
    }
    ensure!(check_conditions(&c, &a).unwrap().member, "fixture angles infeasible");
    let mut pieces = Vec::new();
    for k in 0..2 {
        let pc = plan.pieces[k].dual.to_primal().map_err(|e| e.to_string())?;
        ensure!(isomorphic(&pc, &prism(5)).is_none(), "piece {k} is a triangular prism");
        pieces.push(realize(&pc, &plan.piece_angles(k, &c, &a), &cfg).map_err(|e| format!("piece {k}: {e}"))?);
    }
    let glued = glue(&pieces, &plan, &c, &a).map_err(|e| e.to_string())?;
    let r = &glued.realization;
    ensure!(r.normals().len() == c.face_count(), "triangle planes kept");
    ensure!(glued.coplanarity_defect < GLUE_TOL, "coplanarity {:e}", glued.coplanarity_defect);
    let got = r.achieved_angles();
    let across = crossing
        .iter()
        .fold(0.0f64, |m, (e, _)| m.max((got[*e] - a.radians()[*e]).abs()));
    ensure!(across < GLUE_TOL, "angles across the circuit off by {across:e}");
    let dev = r.angle_deviation();
    ensure!(dev < GLUE_TOL, "angle deviation {dev:e}");
    let ext = extract_combinatorics(r.normals(), cfg.classify_tol).map_err(|e| e.to_string())?;
    ensure!(same_cell_structure(&ext.complex, &c), "glued cells differ from C");
    let (_, rep) = realize_with_report(&c, &a, &cfg).map_err(|e| e.to_string())?;
    ensure!(rep.path == "compound", "route {}", rep.path);
    Ok(format!(
        "coplanarity {:.1e}, across-circuit {across:.1e}, deviation {dev:.1e} < {GLUE_TOL:e}",
        glued.coplanarity_defect
    ))
}

fn c15_degeneration() -> Outcome {
    let cfg = SolverConfig::default();
    let c = dodecahedron();
    let start = realize(&c, &AngleAssignment::uniform(30, ratio(2, 5)), &cfg).map_err(|e| e.to_string())?;
    let v = 5;
    let mut a = AngleAssignment::uniform(30, ratio(2, 5));
    for e in c.vertex_edges(v) {
        a.set(e, ratio(1, 3));
    }
    let info = match continue_path(&start, &a, &cfg) {
        Err(RealizeError::EventDetected(info)) => info,
        Err(e) => return Err(format!("unexpected error: {e}")),
        Ok(_) => return Err("no event".into()),
    };
    ensure!(info.vertex == v, "event at vertex {}", info.vertex);
    ensure!(info.det.abs() < EVENT_DET, "determinant {:e}", info.det);
    let pts: Vec<[f64; 3]> = info.realization.vertex_points().iter().map(|p| p.to_ball()).collect();
    let mut sep = f64::INFINITY;
    for i in (0..pts.len()).filter(|&i| i != v) {
        for j in (i + 1..pts.len()).filter(|&j| j != v) {
            let d = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt();
            sep = sep.min(d);
        }
    }
    ensure!(sep > BALL_SEP, "vertices {sep:e} apart");
    Ok(format!(
        "event at t = {:.8}, det {:.6e} < {EVENT_DET:e}, separation {sep:.3} > {BALL_SEP:e}",
        info.t, info.det
    ))
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 15] = [
        (1, "combinatorial axioms", 1, c1_axioms),
        (2, "circuit oracle", 30, c2_circuit_oracle),
        (3, "non-prismatic 4-cycles", 60, c3_four_circuits),
        (4, "feasibility", 10, c4_feasibility),
        (5, "condition (5) redundancy", 60, c5_condition_five),
        (6, "dodecahedron reduction", 5, c6_dodecahedron_reduction),
        (7, "random reductions", 300, c7_random_reduction),
        (8, "vertex determinant identity", 5, c8_coseqn),
        (9, "explicit prism", 1, c9_explicit_prism),
        (10, "split prism", 5, c10_split_prism),
        (11, "realization residuals", 120, c11_residuals),
        (12, "uniqueness", 240, c12_uniqueness),
        (13, "Whitehead replay", 600, c13_replay),
        (14, "truncation and gluing", 600, c14_glue),
        (15, "degeneration", 120, c15_degeneration),
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|s| s.parse().ok());
    let mut failed = 0;
    for (k, name, budget, run) in criteria {
        if only.is_some_and(|o| o != k) {
            continue;
        }
        let t = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let el = t.elapsed();
        let over = el > Duration::from_secs(budget);
        let (verdict, detail) = match (&out, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over time budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {k:>2} {verdict} {name}: {detail} [{:.2}s / {budget}s]", el.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
