//! Acceptance criteria, one test per criterion.
//!
//! Every test writes a single `[acceptance N] PASS|FAIL ...` line to stderr,
//! bypassing the test harness capture so the verdicts show up in a plain
//! `cargo test --test acceptance` run. Tolerances are pinned below.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torus_elliptic::equation::{
    check_hypotheses, EquationSpec, Preset, VectorFieldSpec, DEFAULT_HYPOTHESIS_TOL,
};
use torus_elliptic::linearization::charpoly_eigs;
use torus_elliptic::solver::{continuity_solve, trace_csv, uniqueness_probe, SolveOptions};
use torus_elliptic::spectral::io::Encoding;
use torus_elliptic::spectral::{ScalarField, TorusGrid};
use torus_elliptic::verify::random::{random_symbol, BandLimited};
use torus_elliptic::verify::{det_trial, fd_linearization_compare, identity_check, manufacture};

const SEED: u64 = 42;

const TRIVIAL_SUP: f64 = 1e-10;
const TRIVIAL_TIME: Duration = Duration::from_secs(1);
const ROUNDTRIP_SUP: f64 = 1e-6;
const ROUNDTRIP_TIME: Duration = Duration::from_secs(60);
const LEMMA21_SLACK: f64 = -1e-9;
const HKT_SUP: f64 = 1e-5;
const HKT_TIME: Duration = Duration::from_secs(600);
const EIGEN_REL: f64 = 1e-10;
const EIGEN_DRAWS: usize = 10_000;
const FD_STEP: f64 = 1e-4;
const FD_REL: f64 = 1e-7;
const FD_RATIO: (f64, f64) = (3.5, 4.5);
const FD_PAIRS: usize = 100;
const IDENTITY_SUP: f64 = 1e-8;
const IDENTITY_FIELDS: usize = 50;
const IDENTITY_REFINEMENT_DROP: f64 = 1e2;
const DET_REL: f64 = 1e-9;
const DET_INSTANCES: usize = 1_000;
const UNIQUENESS_STARTS: usize = 5;
const UNIQUENESS_SUP: f64 = 1e-6;
const TRANSLATION_SUP: f64 = 1e-7;

/// Timed and solver-heavy criteria run one at a time.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy() -> std::sync::MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance {id:>2}] {verdict} {detail}");
    assert!(pass, "criterion {id} failed: {detail}");
}

fn manufactured(spec: &EquationSpec, amplitude: f64, seed: u64) -> (ScalarField, ScalarField) {
    let grid = spec.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u_star = BandLimited::for_grid(grid, &mut rng)
        .scaled(amplitude)
        .sample(grid)
        .unwrap();
    let f = manufacture(&u_star, spec).unwrap();
    (u_star, f)
}

fn standard_32() -> EquationSpec {
    EquationSpec::standard(&TorusGrid::cube(3, 32).unwrap()).unwrap()
}

fn single_threaded<T: Send>(work: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(work)
}

#[test]
fn criterion_01_trivial_solve() {
    let _lock = heavy();
    let mut worst_sup: f64 = 0.0;
    let mut worst_time = Duration::ZERO;
    let mut all_converged = true;
    let cases = [
        (Preset::Custom, TorusGrid::cube(3, 16).unwrap()),
        (Preset::KodairaThurston, TorusGrid::cube(3, 16).unwrap()),
        (Preset::Hkt, TorusGrid::cube(5, 16).unwrap()),
    ];
    for (preset, grid) in cases {
        let spec = match preset {
            Preset::Custom => EquationSpec::standard(&grid).unwrap(),
            p => EquationSpec::from_preset(&grid, p).unwrap(),
        };
        let start = Instant::now();
        let report =
            continuity_solve(&ScalarField::zeros(&grid), &spec, &SolveOptions::default()).unwrap();
        let elapsed = start.elapsed();
        if grid.dim() == 3 {
            worst_time = worst_time.max(elapsed);
        }
        all_converged &= report.converged();
        worst_sup = worst_sup.max(report.u.sup_norm());
    }
    let pass = all_converged && worst_sup <= TRIVIAL_SUP && worst_time < TRIVIAL_TIME;
    verdict(
        1,
        pass,
        &format!(
            "trivial solve: sup|u| = {worst_sup:e} (<= {TRIVIAL_SUP:e}), slowest 16^3 run {:.3}s (< {}s), standard/KT/HKT converged = {all_converged}",
            worst_time.as_secs_f64(),
            TRIVIAL_TIME.as_secs()
        ),
    );
}

#[test]
fn criterion_02_manufactured_round_trip() {
    let _lock = heavy();
    let spec = standard_32();
    let (u_star, f) = manufactured(&spec, 0.1, SEED);
    let start = Instant::now();
    let report = single_threaded(|| continuity_solve(&f, &spec, &SolveOptions::default()).unwrap());
    let elapsed = start.elapsed();
    let error = report.u.sup_distance(&u_star).unwrap();
    let reached_end = report
        .trace
        .iter()
        .rev()
        .find(|e| e.accepted)
        .is_some_and(|e| e.t == 1.0);
    let pass =
        report.converged() && reached_end && error <= ROUNDTRIP_SUP && elapsed < ROUNDTRIP_TIME;
    verdict(
        2,
        pass,
        &format!(
            "round trip 32^3, I = {{3}}: sup error {error:e} (<= {ROUNDTRIP_SUP:e}), converged = {}, {} steps, {:.1}s single-threaded (< {}s)",
            report.converged(),
            report.trace.len(),
            elapsed.as_secs_f64(),
            ROUNDTRIP_TIME.as_secs()
        ),
    );
}

#[test]
fn criterion_03_kodaira_thurston() {
    let _lock = heavy();
    let spec = EquationSpec::kodaira_thurston(&TorusGrid::cube(3, 32).unwrap()).unwrap();
    let (u_star, f) = manufactured(&spec, 0.1, SEED);
    let report = continuity_solve(&f, &spec, &SolveOptions::default()).unwrap();
    let error = report.u.sup_distance(&u_star).unwrap();
    let m = &report.monitor;
    let monitors = m.min_a > 0.0
        && m.min_b > 0.0
        && m.min_lemma21_slack >= LEMMA21_SLACK
        && m.min_lambda_minus > 0.0;
    let pass = report.converged() && error <= ROUNDTRIP_SUP && monitors;
    verdict(
        3,
        pass,
        &format!(
            "Kodaira-Thurston 32^3: sup error {error:e} (<= {ROUNDTRIP_SUP:e}), min A {:.4}, min B {:.4}, slack {:e} (>= {LEMMA21_SLACK:e}), min lambda_- {:.4}",
            m.min_a, m.min_b, m.min_lemma21_slack, m.min_lambda_minus
        ),
    );
}

#[test]
fn criterion_04_hkt() {
    let _lock = heavy();
    let spec = EquationSpec::hkt(&TorusGrid::cube(5, 12).unwrap()).unwrap();
    let (u_star, f) = manufactured(&spec, 0.05, SEED);
    let start = Instant::now();
    let report = continuity_solve(&f, &spec, &SolveOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let error = report.u.sup_distance(&u_star).unwrap();
    let pass = report.converged() && error <= HKT_SUP && elapsed < HKT_TIME;
    verdict(
        4,
        pass,
        &format!(
            "HKT 12^5: sup error {error:e} (<= {HKT_SUP:e}), converged = {}, {:.1}s (< {}s)",
            report.converged(),
            elapsed.as_secs_f64(),
            HKT_TIME.as_secs()
        ),
    );
}

#[test]
fn criterion_05_closed_form_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut ordering_ok = true;
    for _ in 0..EIGEN_DRAWS {
        let n = rng.random_range(3..=8);
        let p = random_symbol(n, 1, &mut rng).unwrap();
        let closed = charpoly_eigs(p.a, p.b, &p.coupling).unwrap();
        ordering_ok &= closed.lambda_minus <= p.a && p.a <= closed.lambda_plus;
        let mut direct: Vec<f64> = SymmetricEigen::new(p.to_dense())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        direct.sort_by(f64::total_cmp);
        for (c, d) in closed.all().iter().zip(&direct) {
            worst = worst.max((c - d).abs() / d.abs());
        }
    }
    verdict(
        5,
        worst <= EIGEN_REL && ordering_ok,
        &format!(
            "closed-form spectrum, {EIGEN_DRAWS} draws n in 3..=8: worst relative error {worst:e} (<= {EIGEN_REL:e}), lambda_- <= A <= lambda_+ in every draw = {ordering_ok}"
        ),
    );
}

#[test]
fn criterion_06_linearization_consistency() {
    // Non-constant drift on both fields; admissibility is not needed here.
    let grid = TorusGrid::cube(3, 16).unwrap();
    let x = VectorFieldSpec::parse(&["0.2*cos(x2)", "0.1*sin(x1 + x3)", "0.3*cos(x1)"]).unwrap();
    let y = VectorFieldSpec::parse(&["0", "0.2*sin(x3)", "0.1"]).unwrap();
    let spec = EquationSpec::new(&grid, &[2], x, y).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_error: f64 = 0.0;
    let mut ratios = Vec::with_capacity(FD_PAIRS);
    for _ in 0..FD_PAIRS {
        let u = BandLimited::for_grid(&grid, &mut rng)
            .scaled(0.1)
            .sample(&grid)
            .unwrap();
        let v = BandLimited::for_grid(&grid, &mut rng)
            .sample(&grid)
            .unwrap();
        let e1 = fd_linearization_compare(&u, &v, &spec, FD_STEP)
            .unwrap()
            .relative()
            .unwrap();
        let e2 = fd_linearization_compare(&u, &v, &spec, 0.5 * FD_STEP)
            .unwrap()
            .relative()
            .unwrap();
        worst_error = worst_error.max(e1);
        ratios.push(e1 / e2);
    }
    ratios.sort_by(f64::total_cmp);
    let in_range = ratios
        .iter()
        .filter(|r| (FD_RATIO.0..=FD_RATIO.1).contains(*r))
        .count();
    let pass = worst_error <= FD_REL && in_range == FD_PAIRS;
    verdict(
        6,
        pass,
        &format!(
            "central differences, {FD_PAIRS} pairs: worst relative error {worst_error:e} at h = {FD_STEP:e} (<= {FD_REL:e}); halving ratio in [{}, {}] for {in_range}/{FD_PAIRS} pairs (median {:.3}, range {:.3e}..{:.3e})",
            FD_RATIO.0,
            FD_RATIO.1,
            ratios[FD_PAIRS / 2],
            ratios[0],
            ratios[FD_PAIRS - 1]
        ),
    );
}

#[test]
fn criterion_07_transport_identities() {
    let _lock = heavy();
    let coarse = TorusGrid::cube(3, 32).unwrap();
    let fine = TorusGrid::cube(3, 64).unwrap();
    let constant_specs = [
        EquationSpec::kodaira_thurston(&coarse).unwrap(),
        EquationSpec::new(
            &coarse,
            &[2],
            VectorFieldSpec::constant(&[0.3, -0.2, 0.1]),
            VectorFieldSpec::constant(&[0.0, 0.0, 0.4]),
        )
        .unwrap(),
    ];
    // Non-constant candidates enter only if the hypothesis checker accepts them.
    let candidates = [
        ["0.3*sin(x2)", "-0.3*sin(x1)", "0"],
        ["0.2*cos(x1)", "0.2*cos(x2)", "0"],
        ["sin(x2)", "0", "0"],
    ];
    let mut specs: Vec<EquationSpec> = constant_specs.to_vec();
    let mut accepted = 0;
    for c in candidates {
        let spec = EquationSpec::new(
            &coarse,
            &[2],
            VectorFieldSpec::parse(&c).unwrap(),
            VectorFieldSpec::zero(3),
        )
        .unwrap();
        if check_hypotheses(&spec, DEFAULT_HYPOTHESIS_TOL).all_pass() {
            accepted += 1;
            specs.push(spec);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_coarse: f64 = 0.0;
    let mut worst_drop = f64::INFINITY;
    for trial in 0..IDENTITY_FIELDS {
        let spec = &specs[trial % specs.len()];
        let field = BandLimited::for_grid(&coarse, &mut rng).scaled(0.1);
        let r = identity_check(&field.sample(&coarse).unwrap(), spec).unwrap();
        let r_coarse = r.x_transport.max(r.y_transport);
        worst_coarse = worst_coarse.max(r_coarse);
        if trial < 10 {
            let spec_fine = spec.on_grid(&fine).unwrap();
            let r = identity_check(&field.sample(&fine).unwrap(), &spec_fine).unwrap();
            let r_fine = r.x_transport.max(r.y_transport);
            worst_drop = worst_drop.min(r_coarse / r_fine.max(f64::MIN_POSITIVE));
        }
    }
    let pass = worst_coarse <= IDENTITY_SUP && worst_drop >= IDENTITY_REFINEMENT_DROP;
    verdict(
        7,
        pass,
        &format!(
            "identities, {IDENTITY_FIELDS} fields at 32^3 over {} specs ({accepted}/{} non-constant candidates admissible): worst residual {worst_coarse:e} (<= {IDENTITY_SUP:e}); smallest 32^3 -> 64^3 drop {worst_drop:.3e} (>= {IDENTITY_REFINEMENT_DROP:e})",
            specs.len(),
            candidates.len()
        ),
    );
}

#[test]
fn criterion_08_block_determinants() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shapes: Vec<(usize, usize)> = (3..=8)
        .flat_map(|n| (1..=4usize).filter(move |&k| k < n).map(move |k| (n, k)))
        .collect();
    let mut proved_worst: f64 = 0.0;
    for trial in 0..DET_INSTANCES {
        let (n, k) = shapes[trial % shapes.len()];
        let p = random_symbol(n, k, &mut rng).unwrap();
        for i in 1..=k.min(2) {
            proved_worst = proved_worst.max(det_trial(&p, i).unwrap().rel_error);
        }
    }

    let mut full_worst: f64 = 0.0;
    let mut full_fail = 0;
    let mut dump = String::new();
    for _ in 0..DET_INSTANCES {
        let p = random_symbol(6, 3, &mut rng).unwrap();
        let t = det_trial(&p, 3).unwrap();
        if t.rel_error > DET_REL {
            full_fail += 1;
        }
        if t.rel_error > full_worst {
            full_worst = t.rel_error;
            dump = format!(
                "A={:.6} B={:.6} C={:?} direct={:.6} formula={:.6}",
                p.a, p.b, p.coupling, t.direct, t.conjecture
            );
        }
    }

    // Levels i >= 3 outside (6, 3): recorded, not gated.
    let mut open_disagree = 0;
    let mut open_total = 0;
    for (n, k) in [(7, 3), (7, 4), (8, 3), (8, 4)] {
        for _ in 0..100 {
            let p = random_symbol(n, k, &mut rng).unwrap();
            for i in 3..=k {
                open_total += 1;
                if det_trial(&p, i).unwrap().rel_error > DET_REL {
                    open_disagree += 1;
                }
            }
        }
    }

    let pass = proved_worst <= DET_REL && full_fail == 0;
    let mut detail = format!(
        "block minors: levels 1-2 worst relative error {proved_worst:e} over {DET_INSTANCES} instances (<= {DET_REL:e}); (6,3) full determinant fails in {full_fail}/{DET_INSTANCES} (worst {full_worst:.3e}); open levels disagree in {open_disagree}/{open_total} (not gated)"
    );
    if full_fail > 0 {
        detail.push_str(&format!("; worst (6,3) counterexample {dump}"));
    }
    verdict(8, pass, &detail);
}

#[test]
fn criterion_09_uniqueness_probe() {
    let _lock = heavy();
    let spec = standard_32();
    let (_, f) = manufactured(&spec, 0.1, SEED);
    let probe =
        uniqueness_probe(&f, &spec, &SolveOptions::default(), UNIQUENESS_STARTS, SEED).unwrap();
    let pass = probe.conclusive() && probe.max_distance <= UNIQUENESS_SUP;
    verdict(
        9,
        pass,
        &format!(
            "uniqueness, {UNIQUENESS_STARTS} perturbed runs on the round-trip datum: all converged = {}, max pairwise sup distance {:e} (<= {UNIQUENESS_SUP:e})",
            probe.conclusive(),
            probe.max_distance
        ),
    );
}

fn constant_drift_spec(grid: &TorusGrid) -> EquationSpec {
    EquationSpec::new(
        grid,
        &[2],
        VectorFieldSpec::constant(&[0.3, -0.2, 0.1]),
        VectorFieldSpec::constant(&[0.0, 0.0, 0.4]),
    )
    .unwrap()
}

#[test]
fn criterion_10_translation_equivariance() {
    let _lock = heavy();
    let grid = TorusGrid::cube(3, 16).unwrap();
    let spec = constant_drift_spec(&grid);
    let (_, f) = manufactured(&spec, 0.1, SEED);
    // With X·Y ≠ 0 the manufactured datum is not normalized; solve it as is.
    let opts = SolveOptions {
        normalize: false,
        ..SolveOptions::default()
    };
    let shift = [3, -5, 7];
    let base = continuity_solve(&f, &spec, &opts).unwrap();
    let moved = continuity_solve(&f.translate(&shift).unwrap(), &spec, &opts).unwrap();
    let gap = moved
        .u
        .sup_distance(&base.u.translate(&shift).unwrap())
        .unwrap();
    let pass = base.converged() && moved.converged() && gap <= TRANSLATION_SUP;
    verdict(
        10,
        pass,
        &format!("translation by {shift:?} on 16^3 with constant X, Y: sup gap {gap:e} (<= {TRANSLATION_SUP:e})"),
    );
}

#[test]
fn criterion_11_binary_trace_determinism() {
    let _lock = heavy();
    let grid = TorusGrid::cube(3, 16).unwrap();
    let spec = constant_drift_spec(&grid);
    let (_, f) = manufactured(&spec, 0.1, SEED);
    let opts = SolveOptions {
        normalize: false,
        ..SolveOptions::default()
    };
    let first = trace_csv(
        &continuity_solve(&f, &spec, &opts).unwrap(),
        Encoding::Binary,
    );
    let second = trace_csv(
        &continuity_solve(&f, &spec, &opts).unwrap(),
        Encoding::Binary,
    );

    // The same through the command line, writing files.
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("spec.cfg");
    std::fs::write(
        &config,
        "n = 3\nsizes = 16\nI = 3\nX = 0.3, -0.2, 0.1\nY = 0, 0, 0.4\n",
    )
    .unwrap();
    let mut cli_traces = Vec::new();
    for run in 0..2 {
        let trace = dir.path().join(format!("trace{run}.csv"));
        let code = torus_elliptic::cli::run([
            "torus-elliptic",
            "--format",
            "binary",
            "--seed",
            "7",
            "solve",
            "--spec",
            config.to_str().unwrap(),
            "--f",
            "0.2*cos(x1)*cos(x3) + 0.1*sin(x2 - x3)",
            "--trace",
            trace.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        cli_traces.push(std::fs::read(&trace).unwrap());
    }
    let pass = first == second && cli_traces[0] == cli_traces[1] && !first.contains("wall");
    verdict(
        11,
        pass,
        &format!(
            "binary traces identical across reruns: library {} ({} bytes), CLI {} ({} bytes)",
            first == second,
            first.len(),
            cli_traces[0] == cli_traces[1],
            cli_traces[0].len()
        ),
    );
}
