use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::SpecConfig;
use crate::equation::{
    check_hypotheses, normalize_f, EquationSpec, DEFAULT_HYPOTHESIS_TOL, LEMMA21_SLACK_TOL,
};
use crate::expr::Expr;
use crate::linearization::certify_ellipticity;
use crate::solver::{continuity_solve, summary_line, trace_csv, SolveOptions};
use crate::spectral::io::{read_field, write_field, Encoding};
use crate::spectral::{ScalarField, TorusGrid};
use crate::verify::random::BandLimited;
use crate::verify::{
    det_check, fd_linearization_compare, identity_check, lemma21_sweep, manufacture, DetTrial,
    DET_REL_TOL,
};

use super::{
    CertifyArgs, Cli, CliError, Command, DatumArgs, DetCheckArgs, FdArgs, ManufactureArgs,
    SolveArgs, SpecArgs, TrialArgs, VerifyCheck,
};

type Outcome = std::result::Result<(), CliError>;

/// Roundoff bound for `(A + B)² − 4AB ≥ 0`.
const AM_GM_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-8;
const FD_REL_TOL: f64 = 1e-7;
/// Accepted `e(h) / e(h/2)` for a second-order difference.
const FD_RATIO_RANGE: (f64, f64) = (3.5, 4.5);
const NORMALIZATION_TOL: f64 = 1e-12;
const ROUNDTRIP_TOL: f64 = 1e-6;

pub(super) fn dispatch(cli: &Cli) -> Outcome {
    let encoding = Encoding::from(cli.format);
    match &cli.command {
        Command::Solve(args) => solve(args, encoding),
        Command::Certify(args) => certify(args, cli.seed, encoding),
        Command::CheckHypotheses(args) => hypotheses(args),
        Command::Manufacture(args) => manufacture_cmd(args, cli.seed, encoding),
        Command::Verify(args) => match &args.check {
            VerifyCheck::Identities(t) => verify_identities(t, cli.seed, encoding),
            VerifyCheck::Lemma21(t) => verify_lemma21(t, cli.seed, encoding),
            VerifyCheck::Fd(t) => verify_fd(t, cli.seed, encoding),
            VerifyCheck::Normalization(t) => verify_normalization(t, cli.seed, encoding),
            VerifyCheck::Roundtrip(t) => verify_roundtrip(t, cli.seed, encoding),
        },
        Command::DetCheck(args) => det_check_cmd(args, cli.seed, encoding),
    }
}

fn load_spec(args: &SpecArgs) -> std::result::Result<EquationSpec, CliError> {
    let config = SpecConfig::read(&args.spec).map_err(CliError::at(&args.spec))?;
    config.build().map_err(CliError::at(&args.spec))
}

fn load_field(path: &Path, grid: &TorusGrid) -> std::result::Result<ScalarField, CliError> {
    let field = read_field(path).map_err(CliError::at(path))?;
    grid.ensure_same(field.grid()).map_err(CliError::at(path))?;
    Ok(field)
}

fn load_datum(args: &DatumArgs, grid: &TorusGrid) -> std::result::Result<ScalarField, CliError> {
    match (&args.f_expr, &args.f_file) {
        (Some(text), _) => {
            let expr = Expr::parse(text, grid.dim()).map_err(|source| CliError::Located {
                path: "--f".into(),
                source,
            })?;
            Ok(ScalarField::from_fn(grid, |x| expr.eval(x)))
        }
        (None, Some(path)) => load_field(path, grid),
        (None, None) => unreachable!("clap requires one datum source"),
    }
}

fn float(value: f64, encoding: Encoding) -> String {
    match encoding {
        Encoding::Csv => format!("{value:e}"),
        Encoding::Binary => format!("0x{:016x}", value.to_bits()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::at(path)(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn finish(all_pass: bool) -> Outcome {
    if all_pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn random_field(
    grid: &TorusGrid,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<ScalarField, CliError> {
    Ok(BandLimited::for_grid(grid, rng)
        .scaled(amplitude)
        .sample(grid)?)
}

fn solve(args: &SolveArgs, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let f = load_datum(&args.datum, spec.grid())?;
    let opts = SolveOptions {
        newton_tol: args.newton_tol,
        max_newton: args.max_newton,
        krylov_rtol: args.krylov_rtol,
        initial_dt: args.initial_dt,
        min_dt: args.min_dt,
        normalize: !args.no_normalize,
        allow_unverified: args.allow_unverified,
        ..SolveOptions::default()
    };
    let report = continuity_solve(&f, &spec, &opts)?;
    if let Some(path) = &args.out {
        write_field(path, &report.u, encoding).map_err(CliError::at(path))?;
    }
    if let Some(path) = &args.trace {
        emit(Some(path), &trace_csv(&report, encoding))?;
    }
    for flag in &report.monitor.flags {
        println!("RESULT solve monitor FAIL {flag}");
    }
    println!("RESULT solve {}", summary_line(&report));
    finish(report.converged() && report.monitor.passes())
}

fn certify(args: &CertifyArgs, seed: u64, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let u = load_field(&args.u, spec.grid())?;
    let mut f = load_datum(&args.datum, spec.grid())?;
    if !args.no_normalize {
        f = normalize_f(&f)?;
    }
    if args.shift != 0.0 {
        f = f.map(|v| v + args.shift);
    }
    let cert = certify_ellipticity(&u, &f, &spec, seed)?;
    let mut csv = String::from("point,A,B,lambda_minus,margin\n");
    for s in &cert.samples {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            s.point,
            float(s.a, encoding),
            float(s.b, encoding),
            float(s.lambda_minus, encoding),
            float(s.margin, encoding)
        );
    }
    emit(args.out.as_deref(), &csv)?;
    let margin_ok = cert.quadratic_form_margin >= -1e-12;
    println!(
        "RESULT certify {} min_lambda_minus={:e} worst_point={} quadratic_form_margin={:e}",
        verdict(cert.is_valid() && margin_ok),
        cert.min_lambda_minus,
        cert.worst_point,
        cert.quadratic_form_margin
    );
    finish(cert.is_valid() && margin_ok)
}

fn hypotheses(args: &SpecArgs) -> Outcome {
    let spec = load_spec(args)?;
    let report = check_hypotheses(&spec, DEFAULT_HYPOTHESIS_TOL);
    println!(
        "RESULT check-hypotheses H1 {} worst_variation={:e}",
        verdict(report.h1_pass),
        report.h1_worst_variation
    );
    println!(
        "RESULT check-hypotheses H2 {} worst_eigenvalue={:e}",
        verdict(report.h2_pass),
        report.h2_worst_eigenvalue
    );
    println!(
        "RESULT check-hypotheses H3 {} worst_residual={:e}",
        verdict(report.h3_pass),
        report.h3_worst_residual
    );
    for m in &report.messages {
        eprintln!("{m}");
    }
    finish(report.all_pass())
}

fn manufacture_cmd(args: &ManufactureArgs, seed: u64, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let u = match &args.u {
        Some(path) => load_field(path, spec.grid())?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_field(spec.grid(), args.amplitude, &mut rng)?
        }
    };
    let f = manufacture(&u, &spec)?;
    write_field(&args.out, &f, encoding).map_err(CliError::at(&args.out))?;
    if let Some(path) = &args.u_out {
        write_field(path, &u, encoding).map_err(CliError::at(path))?;
    }
    let defect = (crate::spectral::mean(&f.map(f64::exp)) - 1.0).abs();
    println!(
        "RESULT manufacture sup_u={:e} sup_f={:e} normalization_defect={:e}",
        u.sup_norm(),
        f.sup_norm(),
        defect
    );
    Ok(())
}

fn verify_identities(args: &TrialArgs, seed: u64, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("trial,x_transport,y_transport\n");
    let mut worst: f64 = 0.0;
    for trial in 0..args.trials {
        let u = random_field(spec.grid(), args.amplitude, &mut rng)?;
        let r = identity_check(&u, &spec)?;
        worst = worst.max(r.x_transport).max(r.y_transport);
        let _ = writeln!(
            csv,
            "{trial},{},{}",
            float(r.x_transport, encoding),
            float(r.y_transport, encoding)
        );
    }
    emit(args.out.as_deref(), &csv)?;
    let pass = worst <= IDENTITY_TOL;
    println!(
        "RESULT verify identities {} worst={worst:e} threshold={IDENTITY_TOL:e} trials={}",
        verdict(pass),
        args.trials
    );
    finish(pass)
}

fn verify_lemma21(args: &TrialArgs, seed: u64, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let sweep = lemma21_sweep(&spec, args.trials, seed)?;
    let mut csv = String::from("trial,amplitude,slack,am_gm_gap\n");
    for (i, t) in sweep.trials.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{},{},{}",
            float(t.amplitude, encoding),
            float(t.slack, encoding),
            float(t.am_gm_gap, encoding)
        );
    }
    emit(args.out.as_deref(), &csv)?;
    let slack_ok = sweep.worst_slack >= -LEMMA21_SLACK_TOL;
    let gap_ok = sweep.worst_am_gm_gap >= -AM_GM_TOL;
    println!(
        "RESULT verify lemma21 slack {} worst={:e} threshold={:e}",
        verdict(slack_ok),
        sweep.worst_slack,
        -LEMMA21_SLACK_TOL
    );
    println!(
        "RESULT verify lemma21 am_gm {} worst={:e} threshold={:e} rejected={}",
        verdict(gap_ok),
        sweep.worst_am_gm_gap,
        -AM_GM_TOL,
        sweep.rejected
    );
    finish(slack_ok && gap_ok)
}

fn verify_fd(args: &FdArgs, seed: u64, encoding: Encoding) -> Outcome {
    let t = &args.trials;
    let spec = load_spec(&t.spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("trial,h,rel_error,rel_error_half,ratio\n");
    let mut worst: f64 = 0.0;
    let mut ratios_ok = true;
    for trial in 0..t.trials {
        let u = random_field(spec.grid(), t.amplitude, &mut rng)?;
        let v = random_field(spec.grid(), 1.0, &mut rng)?;
        let full = fd_linearization_compare(&u, &v, &spec, args.h)?;
        let half = fd_linearization_compare(&u, &v, &spec, 0.5 * args.h)?;
        let (Some(e1), Some(e2)) = (full.relative(), half.relative()) else {
            return Err(crate::error::Error::Precondition(format!(
                "trial {trial}: linearization vanishes in direction v"
            ))
            .into());
        };
        let ratio = e1 / e2;
        worst = worst.max(e1);
        ratios_ok &= (FD_RATIO_RANGE.0..=FD_RATIO_RANGE.1).contains(&ratio);
        let _ = writeln!(
            csv,
            "{trial},{},{},{},{}",
            float(args.h, encoding),
            float(e1, encoding),
            float(e2, encoding),
            float(ratio, encoding)
        );
    }
    emit(t.out.as_deref(), &csv)?;
    let error_ok = worst <= FD_REL_TOL;
    println!(
        "RESULT verify fd error {} worst={worst:e} threshold={FD_REL_TOL:e}",
        verdict(error_ok)
    );
    println!(
        "RESULT verify fd ratio {} range=[{}, {}]",
        verdict(ratios_ok),
        FD_RATIO_RANGE.0,
        FD_RATIO_RANGE.1
    );
    finish(error_ok && ratios_ok)
}

fn verify_normalization(args: &TrialArgs, seed: u64, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("trial,defect\n");
    let mut worst: f64 = 0.0;
    for trial in 0..args.trials {
        let u = random_field(spec.grid(), args.amplitude, &mut rng)?;
        let f = manufacture(&u, &spec)?;
        let defect = (crate::spectral::mean(&f.map(f64::exp)) - 1.0).abs();
        worst = worst.max(defect);
        let _ = writeln!(csv, "{trial},{}", float(defect, encoding));
    }
    emit(args.out.as_deref(), &csv)?;
    let pass = worst <= NORMALIZATION_TOL;
    println!(
        "RESULT verify normalization {} worst={worst:e} threshold={NORMALIZATION_TOL:e}",
        verdict(pass)
    );
    finish(pass)
}

fn verify_roundtrip(args: &TrialArgs, seed: u64, encoding: Encoding) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("trial,sup_error,residual,converged\n");
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let opts = SolveOptions {
        normalize: false,
        ..SolveOptions::default()
    };
    for trial in 0..args.trials {
        let u_star = random_field(spec.grid(), args.amplitude, &mut rng)?;
        let f = manufacture(&u_star, &spec)?;
        let report = continuity_solve(&f, &spec, &opts)?;
        let error = report.u.sup_distance(&u_star)?;
        worst = worst.max(error);
        pass &= report.converged() && error <= ROUNDTRIP_TOL;
        let _ = writeln!(
            csv,
            "{trial},{},{},{}",
            float(error, encoding),
            float(report.residual_norm, encoding),
            u8::from(report.converged())
        );
    }
    emit(args.out.as_deref(), &csv)?;
    println!(
        "RESULT verify roundtrip {} worst={worst:e} threshold={ROUNDTRIP_TOL:e}",
        verdict(pass)
    );
    finish(pass)
}

fn dump(t: &DetTrial) -> String {
    let c: Vec<String> = t.symbol.coupling.iter().map(|v| format!("{v:e}")).collect();
    format!(
        "n={} k={} i={} A={:e} B={:e} C=[{}] direct={:e} conjecture={:e}",
        t.n,
        t.k,
        t.i,
        t.symbol.a,
        t.symbol.b,
        c.join(" "),
        t.direct,
        t.conjecture
    )
}

fn det_check_cmd(args: &DetCheckArgs, seed: u64, encoding: Encoding) -> Outcome {
    let levels: Vec<usize> = if args.levels.is_empty() {
        (1..=args.k).collect()
    } else {
        args.levels.clone()
    };
    let trials = det_check(args.n, args.k, &levels, args.trials, seed)?;
    let mut csv = String::from("n,k,i,direct,conjecture,rel_error\n");
    for t in &trials {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            t.n,
            t.k,
            t.i,
            float(t.direct, encoding),
            float(t.conjecture, encoding),
            float(t.rel_error, encoding)
        );
    }
    emit(args.out.as_deref(), &csv)?;
    let mut all_pass = true;
    for &i in &levels {
        let at_level: Vec<&DetTrial> = trials.iter().filter(|t| t.i == i).collect();
        let Some(first) = at_level.first() else {
            continue;
        };
        let worst = at_level
            .iter()
            .copied()
            .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
            .expect("non-empty");
        let failures = at_level.iter().filter(|t| !t.agrees()).count();
        if first.is_gated() {
            all_pass &= failures == 0;
            println!(
                "RESULT det-check level={i} {} worst_rel_error={:e} threshold={DET_REL_TOL:e} disagreements={failures}/{}",
                verdict(failures == 0),
                worst.rel_error,
                at_level.len()
            );
        } else {
            println!(
                "RESULT det-check level={i} evidence worst_rel_error={:e} disagreements={failures}/{}",
                worst.rel_error,
                at_level.len()
            );
        }
        if failures > 0 {
            println!("RESULT det-check counterexample {}", dump(worst));
        }
    }
    finish(all_pass)
}
