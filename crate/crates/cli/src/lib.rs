//! Subcommand front end wiring all the experiments. Exit codes are the
//! contract automation relies on: 0 = success / within tolerance,
//! 1 = tolerance failure, 2 = usage or validation error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use newform_signs::characters::{character_from_exponents, DirichletCharacter};
use newform_signs::equidist::{
    self, empirical_density_primes, empirical_density_tp2, fixed_prime_density, fixed_prime_scan,
    ks_statistic, oscillation_certificate, rational_case_prediction, CmCase, CmMeasure,
    ConjecturePart, FixedAngle, HalfPlaneQuery, OscillationVerdict, SatoTate, UniformMeasure,
};
use newform_signs::hecke::{AngleMode, NewformData};
use newform_signs::io::{self, ExperimentReport};
use newform_signs::phase::{ExactPhase, Phi};
use newform_signs::qseries::{eta_product_expand, series_to_newform, EtaProductSpec};
use newform_signs::shimura::ShimuraFamily;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(name = "newform-signs", version, about = "Coefficient families of newforms and sign-equidistribution experiments", max_term_width = 100)]
struct Cli {
    /// Cap the worker thread count; results are identical for every value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an eta product and write its newform coefficient file.
    ExpandEta(ExpandEtaArgs),
    /// Extract prime angles from a coefficient file.
    Angles(AnglesArgs),
    /// Kolmogorov-Smirnov test of normalized coefficients against a
    /// reference measure.
    StTest(StTestArgs),
    /// Empirical half-plane sign density over primes, with the exact
    /// predicted target.
    SignDensity(SignDensityArgs),
    /// Sign statistics of a(p^nu) for a fixed prime as nu grows.
    FixedPrime(FixedPrimeArgs),
    /// Checks on a half-integral coefficient family driven by a lift.
    Shimura(ShimuraArgs),
    /// Print exact predicted densities.
    Predict(PredictArgs),
    /// Oscillation certificate: sign changes of a coefficient sequence.
    Oscillate(OscillateArgs),
    /// Sign-ratio experiment on ingested half-integral data.
    Conjecture(ConjectureArgs),
    /// Validate a coefficient file.
    Validate(ValidateArgs),
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let dispatch = || match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_USAGE
        }
    };
    match cli.threads {
        None => dispatch(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build();
            match pool {
                Ok(pool) => pool.install(dispatch),
                Err(err) => {
                    eprintln!("error: {err}");
                    EXIT_USAGE
                }
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::ExpandEta(args) => expand_eta(args),
        Command::Angles(args) => angles(args),
        Command::StTest(args) => st_test(args),
        Command::SignDensity(args) => sign_density(args),
        Command::FixedPrime(args) => fixed_prime(args),
        Command::Shimura(args) => shimura_cmd(args),
        Command::Predict(args) => predict(args),
        Command::Oscillate(args) => oscillate(args),
        Command::Conjecture(args) => conjecture(args),
        Command::Validate(args) => validate(args),
    }
}

// ---------------------------------------------------------------------------
// shared argument parsing
// ---------------------------------------------------------------------------

fn parse_phi(s: &str) -> Result<Phi, String> {
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let a: i64 = a.trim().parse().map_err(|_| format!("bad phi {s:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad phi {s:?}"))?;
    Phi::rational(a, b).map_err(|e| format!("bad phi {s:?}: {e}"))
}

fn parse_turns(s: &str) -> Result<(u64, u64), String> {
    let (n, m) = s
        .split_once('/')
        .ok_or_else(|| format!("expected n/m, got {s:?}"))?;
    let n: u64 = n.trim().parse().map_err(|_| format!("bad fraction {s:?}"))?;
    let m: u64 = m.trim().parse().map_err(|_| format!("bad fraction {s:?}"))?;
    Ok((n, m))
}

/// "trivial", "N" for the trivial character mod N, or "N:e1,e2,..." for
/// exponents against the canonical generator basis.
fn parse_character(s: &str) -> Result<DirichletCharacter, String> {
    if s.trim() == "trivial" {
        return Ok(DirichletCharacter::trivial(1));
    }
    let (modulus, exps) = match s.split_once(':') {
        None => (s.trim(), Vec::new()),
        Some((m, rest)) => {
            let exps: Result<Vec<i64>, _> = rest
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<i64>())
                .collect();
            (m.trim(), exps.map_err(|_| format!("bad character {s:?}"))?)
        }
    };
    let modulus: u64 = modulus
        .parse()
        .map_err(|_| format!("bad character modulus in {s:?}"))?;
    if exps.is_empty() {
        Ok(DirichletCharacter::trivial(modulus))
    } else {
        character_from_exponents(modulus, &exps).map_err(|e| e.to_string())
    }
}

fn load_form(path: &std::path::Path) -> Result<NewformData> {
    io::load_newform(path).with_context(|| format!("loading form {}", path.display()))
}

fn angle_mode(direct: bool) -> AngleMode {
    if direct {
        AngleMode::EpsDirect
    } else {
        AngleMode::SqrtOfEps
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn finish_report(
    mut report: ExperimentReport,
    started: Instant,
    path: &Option<PathBuf>,
) -> Result<()> {
    report.runtime_ms = started.elapsed().as_millis() as u64;
    if let Some(path) = path {
        report.save(path).context("writing report")?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

/// The known eta-product forms, with the correct level and nebentypus.
fn known_form(name: &str) -> Option<(&'static str, u32, u64, DirichletCharacter)> {
    match name {
        "delta" => Some(("1:24", 12, 1, DirichletCharacter::trivial(1))),
        "eta4-6" => Some((
            "4:6",
            3,
            16,
            character_from_exponents(16, &[1, 0]).expect("valid"),
        )),
        "eta1-11" => Some(("1:2,11:2", 2, 11, DirichletCharacter::trivial(11))),
        "eta4-8" => Some(("4:2,8:2", 2, 32, DirichletCharacter::trivial(32))),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// expand-eta
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ExpandEtaArgs {
    /// Eta product as "m1:e1,m2:e2", e.g. "1:24".
    #[arg(long, conflicts_with = "known")]
    spec: Option<String>,
    /// One of the shipped forms: delta, eta4-6, eta1-11, eta4-8 (sets the
    /// spec, weight, level and character).
    #[arg(long)]
    known: Option<String>,
    /// Number of coefficients a(n), n <= terms.
    #[arg(long)]
    terms: usize,
    /// Level metadata for the output file (default: lcm of the multipliers;
    /// override when the true level differs).
    #[arg(long)]
    level: Option<u64>,
    /// Nebentypus as "N" (trivial) or "N:e1,e2".
    #[arg(long, value_parser = parse_character)]
    character: Option<DirichletCharacter>,
    #[arg(long)]
    out: PathBuf,
}

fn expand_eta(args: ExpandEtaArgs) -> Result<i32> {
    let started = Instant::now();
    let (spec_text, weight, level, character) = match (&args.known, &args.spec) {
        (Some(name), _) => {
            let (spec, k, level, chi) = known_form(name)
                .ok_or_else(|| anyhow!("unknown form {name:?}; see --help"))?;
            (spec.to_string(), k, level, chi)
        }
        (None, Some(spec_text)) => {
            let spec = EtaProductSpec::parse(spec_text)?;
            let twice = spec.weight_twice();
            if twice % 2 != 0 {
                bail!("eta product {spec_text:?} has half-integral weight {twice}/2; newform files need integral weight");
            }
            let level = args.level.unwrap_or_else(|| {
                spec.factors().iter().fold(1u64, |acc, &(m, _)| lcm(acc, m))
            });
            let character = args
                .character
                .clone()
                .unwrap_or_else(|| DirichletCharacter::trivial(level));
            (spec_text.clone(), (twice / 2) as u32, level, character)
        }
        (None, None) => bail!("one of --spec or --known is required"),
    };
    let level = args.level.unwrap_or(level);
    let character = args.character.unwrap_or(character);
    let spec = EtaProductSpec::parse(&spec_text)?;
    let series = eta_product_expand(&spec, args.terms)?;
    let form = series_to_newform(&series, weight, level, character)?;
    let source = format!("expand-eta --spec {spec_text} --terms {}", args.terms);
    io::save_newform(&form, &source, &args.out)?;
    println!(
        "wrote {} ({} primes <= {}, weight {}, level {}) in {:?}",
        args.out.display(),
        form.primes().count(),
        args.terms,
        weight,
        level,
        started.elapsed()
    );
    Ok(EXIT_PASS)
}

// ---------------------------------------------------------------------------
// angles
// ---------------------------------------------------------------------------

#[derive(Args)]
struct AnglesArgs {
    #[arg(long)]
    form: PathBuf,
    #[arg(long)]
    xmax: u64,
    /// Use zeta = eps(p) directly instead of the square-root convention.
    #[arg(long)]
    direct: bool,
    /// Write a CSV table p,theta,cos_theta,boundary.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn angles(args: AnglesArgs) -> Result<i32> {
    let started = Instant::now();
    let form = load_form(&args.form)?;
    let mode = angle_mode(args.direct);
    let mut rows = Vec::new();
    let mut boundary_count = 0u64;
    for p in newform_signs::primes::primes_up_to(args.xmax) {
        if form.prime_coeff(p).is_none() {
            bail!("form data does not cover prime {p}; regenerate with more terms");
        }
        match form.extract_angle(p, mode) {
            Ok(a) => {
                boundary_count += a.boundary as u64;
                rows.push(a);
            }
            Err(newform_signs::hecke::HeckeError::LevelPrime(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(path) = &args.csv {
        let mut text = String::from("p,theta,cos_theta,boundary\n");
        for a in &rows {
            text.push_str(&format!(
                "{},{},{},{}\n",
                a.p,
                io::fmt_sig12(a.theta),
                io::fmt_sig12(a.cos_theta),
                a.boundary
            ));
        }
        std::fs::write(path, text)?;
    }
    println!(
        "extracted {} angles up to {} ({} boundary-flagged)",
        rows.len(),
        args.xmax,
        boundary_count
    );
    let mut report = ExperimentReport::new("angles");
    report
        .input("form", args.form.display())
        .input("xmax", args.xmax)
        .input("mode", if args.direct { "direct" } else { "sqrt" })
        .count("angles", rows.len() as u64)
        .count("boundary", boundary_count);
    finish_report(report, started, &args.report)?;
    Ok(EXIT_PASS)
}

// ---------------------------------------------------------------------------
// st-test
// ---------------------------------------------------------------------------

#[derive(Args)]
struct StTestArgs {
    #[arg(long)]
    form: PathBuf,
    #[arg(long)]
    xmax: u64,
    /// st (semicircle), cm (atom-aware), or uniform-angle (angles of
    /// nonvanishing coefficients against uniform on [0, pi]).
    #[arg(long, default_value = "st")]
    measure: String,
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    #[arg(long)]
    direct: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn st_test(args: StTestArgs) -> Result<i32> {
    let started = Instant::now();
    let form = load_form(&args.form)?;
    let mode = angle_mode(args.direct);
    let mut values = Vec::new();
    let mut nonzero_angles = Vec::new();
    let mut zero_count = 0u64;
    for p in newform_signs::primes::primes_up_to(args.xmax) {
        if form.prime_coeff(p).is_none() {
            bail!("form data does not cover prime {p}");
        }
        match form.extract_angle(p, mode) {
            Ok(a) => {
                values.push(a.cos_theta);
                if form
                    .prime_coeff(p)
                    .expect("checked")
                    .is_zero_with_scale(newform_signs::FLOAT_TOL * form.deligne_scale(p))
                {
                    zero_count += 1;
                } else {
                    nonzero_angles.push(a.theta);
                }
            }
            Err(newform_signs::hecke::HeckeError::LevelPrime(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let (ks, sample_size) = match args.measure.as_str() {
        "st" => (ks_statistic(&values, &SatoTate)?, values.len()),
        "cm" => (ks_statistic(&values, &CmMeasure)?, values.len()),
        "uniform-angle" => (
            ks_statistic(
                &nonzero_angles,
                &UniformMeasure {
                    lo: 0.0,
                    hi: std::f64::consts::PI,
                },
            )?,
            nonzero_angles.len(),
        ),
        other => bail!("unknown measure {other:?} (expected st, cm or uniform-angle)"),
    };
    let pass = ks <= args.tol;
    println!(
        "KS = {} against {} on {} samples (tol {}): {}",
        io::fmt_sig12(ks),
        args.measure,
        sample_size,
        args.tol,
        if pass { "pass" } else { "FAIL" }
    );
    let mut report = ExperimentReport::new("st-test");
    report
        .input("form", args.form.display())
        .input("xmax", args.xmax)
        .input("measure", &args.measure)
        .input("mode", if args.direct { "direct" } else { "sqrt" })
        .input("tol", args.tol)
        .count("samples", sample_size as u64)
        .count("zero_coefficients", zero_count)
        .ks_value("ks", ks)
        .verdict("within_tolerance", pass);
    finish_report(report, started, &args.report)?;
    Ok(if pass { EXIT_PASS } else { EXIT_TOLERANCE })
}

// ---------------------------------------------------------------------------
// sign-density
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SignDensityArgs {
    /// Coefficient file (the lift file in --family mode).
    #[arg(long)]
    form: PathBuf,
    #[arg(long, default_value_t = 1)]
    nu: u32,
    /// Half-plane direction as a fraction of pi, e.g. 0/1 or 1/4.
    #[arg(long, value_parser = parse_phi, default_value = "0/1")]
    phi: Phi,
    #[arg(long)]
    xmax: u64,
    /// Attach and gate against the exact predicted densities (odd nu only).
    #[arg(long)]
    predict: bool,
    /// The form has complex multiplication (affects the prediction).
    #[arg(long)]
    cm: bool,
    /// Scan the half-integral family a(t p^2) instead of a(p^nu); the form
    /// file is the lift.
    #[arg(long)]
    family: bool,
    #[arg(long, short = 't', default_value_t = 1)]
    t: u64,
    #[arg(long, short = 'k')]
    k: Option<u32>,
    #[arg(long, default_value_t = 4)]
    half_level: u64,
    /// CM case label for the family prediction: non-cm, cm-other,
    /// cm-trivial or cm-f.
    #[arg(long, default_value = "non-cm")]
    case: String,
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    #[arg(long)]
    direct: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn sign_density(args: SignDensityArgs) -> Result<i32> {
    let started = Instant::now();
    let form = load_form(&args.form)?;
    let est = if args.family {
        let k = args.k.unwrap_or_else(|| form.weight() / 2);
        let epsilon = DirichletCharacter::trivial(args.half_level);
        let fam = ShimuraFamily::new(args.t, k, args.half_level, epsilon, form)?;
        let mut est = empirical_density_tp2(&fam, &args.phi, args.xmax)?;
        if args.predict {
            let case = CmCase::parse(&args.case)
                .ok_or_else(|| anyhow!("unknown case {:?}", args.case))?;
            match equidist::predicted_density_thm3_order(fam.epsilon().order(), &args.phi, case) {
                Ok(p) => est = est.with_predicted(p),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_USAGE);
                }
            }
        }
        est
    } else {
        let prediction = if args.predict {
            match equidist::predicted_density_thm1(form.character(), args.nu, &args.phi, args.cm) {
                Ok(p) => Some(p),
                Err(e) => {
                    // even nu (or a free-real phi) has no exact predictor
                    eprintln!("error: {e}");
                    return Ok(EXIT_USAGE);
                }
            }
        } else {
            None
        };
        let query = HalfPlaneQuery {
            phi: args.phi,
            nu: args.nu,
        };
        let mut est = empirical_density_primes(&form, &query, args.xmax, angle_mode(args.direct))?;
        if let Some(p) = prediction {
            est = est.with_predicted(p);
        }
        est
    };
    println!(
        "primes <= {}: pos {} neg {} zero {} boundary-excluded {} (total {})",
        args.xmax,
        est.count_pos,
        est.count_neg,
        est.count_zero,
        est.count_boundary_excluded,
        est.total
    );
    let mut code = EXIT_PASS;
    if let Some(p) = &est.predicted {
        println!(
            "predicted densities: pos {} neg {} nonzero {}",
            io::ratio_string(&p.pos),
            io::ratio_string(&p.neg),
            io::ratio_string(&p.nonzero)
        );
        let target = ratio_f64(&p.pos);
        let diff = (est.ratio_pos() - target).abs();
        let pass = diff <= args.tol;
        println!(
            "empirical pos-ratio {} vs predicted {} (|diff| = {:.6}, tol {}): {}",
            io::fmt_sig12(est.ratio_pos()),
            io::ratio_string(&p.pos),
            diff,
            args.tol,
            if pass { "pass" } else { "FAIL" }
        );
        if !pass {
            code = EXIT_TOLERANCE;
        }
    }
    let mut report = ExperimentReport::new("sign-density");
    report
        .input("form", args.form.display())
        .input("nu", args.nu)
        .input("phi", phi_string(&args.phi))
        .input("xmax", args.xmax)
        .input("cm", args.cm)
        .input("family", args.family)
        .input("tol", args.tol)
        .input("mode", if args.direct { "direct" } else { "sqrt" });
    if args.family {
        report
            .input("t", args.t)
            .input("half_level", args.half_level)
            .input("case", &args.case);
        if let Some(k) = args.k {
            report.input("k", k);
        }
    }
    report.density("density", &est);
    finish_report(report, started, &args.report)?;
    Ok(code)
}

fn ratio_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn phi_string(phi: &Phi) -> String {
    match phi {
        Phi::RationalPi(r) => format!("{}/{} pi", r.numer(), r.denom()),
        Phi::Real(x) => format!("{x} rad"),
    }
}

// ---------------------------------------------------------------------------
// fixed-prime
// ---------------------------------------------------------------------------

#[derive(Args)]
struct FixedPrimeArgs {
    /// Coefficient file (omit when running a synthetic rational angle).
    #[arg(long)]
    form: Option<PathBuf>,
    #[arg(long, short = 'p')]
    p: Option<u64>,
    #[arg(long, value_parser = parse_phi, default_value = "0/1")]
    phi: Phi,
    #[arg(long)]
    nu_max: u64,
    /// Synthetic rational angle theta/2pi = n/m in (0, 1/2).
    #[arg(long, value_parser = parse_turns)]
    synthetic_theta: Option<(u64, u64)>,
    /// Character order for the synthetic run.
    #[arg(long, default_value_t = 1)]
    r_eps: u64,
    /// Class index 1 <= j <= r_eps for the synthetic run.
    #[arg(long, default_value_t = 1)]
    j: u64,
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn fixed_prime(args: FixedPrimeArgs) -> Result<i32> {
    let started = Instant::now();
    let mut report = ExperimentReport::new("fixed-prime");
    report
        .input("phi", phi_string(&args.phi))
        .input("nu_max", args.nu_max)
        .input("tol", args.tol);
    let (est, target, exact_target) = match args.synthetic_theta {
        Some((n, m)) => {
            let prediction = rational_case_prediction(n, m, args.r_eps, args.j, &args.phi)?;
            let zeta = if args.r_eps.is_multiple_of(2) {
                ExactPhase::new(args.j as i64, 2 * args.r_eps as i64)
            } else {
                ExactPhase::new(args.j as i64, args.r_eps as i64)
            };
            let est = fixed_prime_scan(
                &FixedAngle::RationalTurns { num: n, den: m },
                &zeta,
                &args.phi,
                args.nu_max,
            );
            report
                .input("theta_turns", format!("{n}/{m}"))
                .input("r_eps", args.r_eps)
                .input("j", args.j)
                .predicted_ratio("period_pos", &prediction.pos)
                .predicted_ratio("period_neg", &prediction.neg);
            let exact = args.nu_max.is_multiple_of(prediction.period);
            (est, prediction.pos_among_nonzero(), exact)
        }
        None => {
            let form_path = args
                .form
                .as_ref()
                .ok_or_else(|| anyhow!("--form is required unless --synthetic-theta is given"))?;
            let p = args.p.ok_or_else(|| anyhow!("--p is required"))?;
            let form = load_form(form_path)?;
            report.input("form", form_path.display()).input("p", p);
            let est = fixed_prime_density(&form, p, &args.phi, args.nu_max, AngleMode::SqrtOfEps)?;
            (est, Some(Ratio::new(1, 2)), false)
        }
    };
    report.density("scan", &est);
    let code = match (est.pos_among_nonzero(), target) {
        (Some(emp), Some(target)) => {
            let target_f = ratio_f64(&target);
            let pass = if exact_target {
                // whole-period horizon: the ratio must be exactly the
                // enumeration
                Ratio::new(est.count_pos as i64, est.nonzero() as i64) == target
            } else {
                (emp - target_f).abs() <= args.tol
            };
            println!(
                "pos-among-nonzero {} vs target {} over nu <= {}: {}",
                io::fmt_sig12(emp),
                io::ratio_string(&target),
                args.nu_max,
                if pass { "pass" } else { "FAIL" }
            );
            report.verdict("within_tolerance", pass);
            if pass {
                EXIT_PASS
            } else {
                EXIT_TOLERANCE
            }
        }
        _ => {
            println!("trivial slice: no nonzero terms up to nu_max = {}", args.nu_max);
            report.verdict("trivial", true);
            EXIT_PASS
        }
    };
    finish_report(report, started, &args.report)?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// shimura
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ShimuraArgs {
    /// Coefficient file of the integral-weight lift.
    #[arg(long)]
    lift: PathBuf,
    #[arg(long, short = 't')]
    t: u64,
    #[arg(long, short = 'k')]
    k: u32,
    /// Level N of the half-integral side (divisible by 4).
    #[arg(long)]
    half_level: u64,
    /// Family character (default: trivial mod N).
    #[arg(long, value_parser = parse_character)]
    character: Option<DirichletCharacter>,
    /// all | identities | gf | forward | ab
    #[arg(long, default_value = "all")]
    check: String,
    /// Prime-power bound for the identities check.
    #[arg(long, default_value_t = 10_000)]
    bound: u64,
    /// Primes for the generating-function check.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5, 7, 11, 13])]
    gf_primes: Vec<u64>,
    #[arg(long, default_value_t = 12)]
    terms: u32,
    /// Half-integral data file for the forward check (default: the
    /// synthesized family itself, a round trip).
    #[arg(long)]
    half_data: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    nmax: u64,
    /// Prime for the ab check.
    #[arg(long, short = 'p')]
    p: Option<u64>,
    /// Write the synthesized table n -> a(t n^2), n <= nmax, as a
    /// half-integral coefficient file.
    #[arg(long)]
    emit_half: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn shimura_cmd(args: ShimuraArgs) -> Result<i32> {
    let started = Instant::now();
    let lift = load_form(&args.lift)?;
    let epsilon = args
        .character
        .clone()
        .unwrap_or_else(|| DirichletCharacter::trivial(args.half_level));
    let fam = ShimuraFamily::new(args.t, args.k, args.half_level, epsilon, lift)?;
    let mut report = ExperimentReport::new("shimura");
    report
        .input("lift", args.lift.display())
        .input("t", args.t)
        .input("k", args.k)
        .input("half_level", args.half_level)
        .input("check", &args.check)
        .input("bound", args.bound)
        .input("terms", args.terms)
        .input("nmax", args.nmax);
    let mut all_pass = true;

    let run_identities = matches!(args.check.as_str(), "all" | "identities");
    let run_gf = matches!(args.check.as_str(), "all" | "gf");
    let run_forward = matches!(args.check.as_str(), "all" | "forward");
    let run_ab = matches!(args.check.as_str(), "ab");
    if !(run_identities || run_gf || run_forward || run_ab) {
        bail!("unknown check {:?}", args.check);
    }

    if run_identities {
        let mut mismatches = 0u64;
        let mut checked = 0u64;
        for p in newform_signs::primes::primes_up_to(args.bound) {
            let mut nu = 1u32;
            let mut ppow = p;
            while ppow <= args.bound {
                let a = fam.family_prime_power(p, nu)?;
                let b = fam.family_coeff(ppow)?;
                let agree = match (a.exact(), b.exact()) {
                    (Some(x), Some(y)) => x == y,
                    _ => (a.approx() - b.approx()).norm() <= 1e-9 * (1.0 + b.approx().norm()),
                };
                checked += 1;
                if !agree {
                    mismatches += 1;
                }
                nu += 1;
                ppow = match ppow.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        let pass = mismatches == 0;
        all_pass &= pass;
        println!(
            "identities: {} prime powers <= {} checked, {} mismatches: {}",
            checked,
            args.bound,
            mismatches,
            if pass { "pass" } else { "FAIL" }
        );
        report.count("identities.checked", checked);
        report.count("identities.mismatches", mismatches);
    }
    if run_gf {
        for &p in &args.gf_primes {
            let r = fam.generating_function_check(p, args.terms)?;
            let pass = r.passed();
            all_pass &= pass;
            println!(
                "generating function at p = {p}, {} terms (exact: {}): {}",
                args.terms,
                r.exact,
                if pass { "pass" } else { "FAIL" }
            );
            report.verdict(&format!("gf.p{p}"), pass);
        }
    }
    if run_forward {
        let data = match &args.half_data {
            Some(path) => io::load_half_integral(path)?.1,
            None => fam.synthesize_half_data(args.nmax)?,
        };
        let r = fam.forward_shimura_check(&data, args.nmax)?;
        let pass = r.passed();
        all_pass &= pass;
        println!(
            "forward relation for n <= {}: {} checked, {} missing, {} mismatches, max discrepancy {}: {}",
            args.nmax,
            r.checked,
            r.missing.len(),
            r.mismatches.len(),
            io::fmt_sig12(r.max_abs_diff),
            if pass { "pass" } else { "FAIL" }
        );
        report.count("forward.checked", r.checked);
        report.count("forward.missing", r.missing.len() as u64);
        report.count("forward.mismatches", r.mismatches.len() as u64);
    }
    if let Some(path) = &args.emit_half {
        let data = fam.synthesize_half_data(args.nmax)?;
        let source = format!(
            "shimura --lift {} --t {} --k {} --half-level {}",
            args.lift.display(),
            args.t,
            args.k,
            args.half_level
        );
        io::save_half_integral(args.k, args.half_level, fam.epsilon(), &data, &source, path)?;
        println!("half-integral table written to {}", path.display());
    }
    if run_ab {
        let p = args.p.ok_or_else(|| anyhow!("--p is required for the ab check"))?;
        let ab = fam.normalized_ab(p)?;
        println!(
            "p = {p}: B = {}, A = {}, zeta = phase {}/{}",
            io::fmt_sig12(ab.b),
            io::fmt_sig12(ab.a),
            ab.zeta.num(),
            ab.zeta.den()
        );
        report.ratio("ab.b", ab.b);
        report.ratio("ab.a", ab.a);
    }
    report.verdict("all_pass", all_pass);
    finish_report(report, started, &args.report)?;
    Ok(if all_pass { EXIT_PASS } else { EXIT_TOLERANCE })
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

#[derive(Args)]
struct PredictArgs {
    /// Which predictor: 1 (prime families a(p^nu)) or 3 (a(t p^2)).
    #[arg(long)]
    thm: u32,
    /// Character order r_eps (the predictors depend on the character only
    /// through its order).
    #[arg(long, default_value_t = 1)]
    reps: u64,
    /// Full character spec "N:e1,e2"; overrides --reps.
    #[arg(long, value_parser = parse_character)]
    character: Option<DirichletCharacter>,
    #[arg(long)]
    nu: Option<u32>,
    #[arg(long, value_parser = parse_phi, default_value = "0/1")]
    phi: Phi,
    /// CM form (changes the prime-family prediction).
    #[arg(long)]
    cm: bool,
    /// CM case for the family predictor: non-cm, cm-other, cm-trivial
    /// or cm-f.
    #[arg(long, default_value = "non-cm")]
    case: String,
}

fn predict(args: PredictArgs) -> Result<i32> {
    let r = args
        .character
        .as_ref()
        .map(|c| c.order())
        .unwrap_or(args.reps);
    let density = match args.thm {
        1 => {
            let nu = args.nu.ok_or_else(|| anyhow!("--nu is required for --thm 1"))?;
            equidist::predicted_density_thm1_order(r, nu, &args.phi, args.cm)?
        }
        3 => {
            let case = CmCase::parse(&args.case)
                .ok_or_else(|| anyhow!("unknown case {:?}", args.case))?;
            equidist::predicted_density_thm3_order(r, &args.phi, case)?
        }
        other => bail!("unknown predictor {other}; expected 1 or 3"),
    };
    println!(
        "{} {} {}",
        io::ratio_string(&density.pos),
        io::ratio_string(&density.neg),
        io::ratio_string(&density.nonzero)
    );
    Ok(EXIT_PASS)
}

// ---------------------------------------------------------------------------
// oscillate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct OscillateArgs {
    /// Coefficient file (the lift file in family mode).
    #[arg(long)]
    form: PathBuf,
    #[arg(long, value_parser = parse_phi, default_value = "0/1")]
    phi: Phi,
    /// How many terms to scan.
    #[arg(long)]
    horizon: usize,
    /// Scan the family a(t p^{2 nu}) for fixed p instead of prime-indexed
    /// a(p).
    #[arg(long)]
    family: bool,
    /// Scan a(p^nu) for this fixed prime (integral-weight side).
    #[arg(long, conflicts_with = "family")]
    fixed_p: Option<u64>,
    #[arg(long, short = 'p')]
    p: Option<u64>,
    #[arg(long, short = 't', default_value_t = 1)]
    t: u64,
    #[arg(long, short = 'k')]
    k: Option<u32>,
    #[arg(long, default_value_t = 4)]
    half_level: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn oscillate(args: OscillateArgs) -> Result<i32> {
    let started = Instant::now();
    let form = load_form(&args.form)?;
    let mut report = ExperimentReport::new("oscillate");
    report
        .input("form", args.form.display())
        .input("phi", phi_string(&args.phi))
        .input("horizon", args.horizon)
        .input("family", args.family);
    let cert = if args.family {
        let p = args.p.ok_or_else(|| anyhow!("--p is required with --family"))?;
        let k = args
            .k
            .unwrap_or_else(|| form.weight() / 2);
        let epsilon = DirichletCharacter::trivial(args.half_level);
        let fam = ShimuraFamily::new(args.t, k, args.half_level, epsilon, form)?;
        report
            .input("p", p)
            .input("t", args.t)
            .input("k", k)
            .input("half_level", args.half_level);
        let values: Result<Vec<_>> = (1..=args.horizon as u64)
            .map(|nu| Ok((nu, fam.family_prime_power(p, nu as u32)?)))
            .collect();
        oscillation_certificate(values?, &args.phi, args.horizon)
    } else if let Some(p) = args.fixed_p {
        report.input("fixed_p", p);
        let values: Result<Vec<_>> = (1..=args.horizon as u64)
            .map(|nu| Ok((nu, form.hecke_power(p, nu as u32)?)))
            .collect();
        oscillation_certificate(values?, &args.phi, args.horizon)
    } else {
        let seq: Vec<_> = form
            .primes()
            .take(args.horizon)
            .map(|p| (p, form.prime_coeff(p).expect("listed").clone()))
            .collect();
        oscillation_certificate(seq, &args.phi, args.horizon)
    };
    let verdict = match cert.verdict {
        OscillationVerdict::OscillatingEvidence => "oscillating-evidence",
        OscillationVerdict::Trivial => "trivial",
        OscillationVerdict::Inconclusive => "inconclusive",
    };
    println!(
        "{} sign changes in {} terms ({} nonzero): {}",
        cert.changes.len(),
        cert.total,
        cert.nonzero_count,
        verdict
    );
    if !cert.changes.is_empty() {
        let shown: Vec<String> = cert.changes.iter().take(12).map(|i| i.to_string()).collect();
        println!("first change indices: {}", shown.join(", "));
    }
    report
        .count("changes", cert.changes.len() as u64)
        .count("nonzero", cert.nonzero_count)
        .count("total", cert.total)
        .verdict("verdict", verdict);
    finish_report(report, started, &args.report)?;
    Ok(match cert.verdict {
        OscillationVerdict::Inconclusive => EXIT_TOLERANCE,
        _ => EXIT_PASS,
    })
}

// ---------------------------------------------------------------------------
// conjecture
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ConjectureArgs {
    /// Half-integral coefficient file (indices n with values a(n)).
    #[arg(long)]
    half_data: PathBuf,
    #[arg(long, value_parser = parse_phi, default_value = "0/1")]
    phi: Phi,
    #[arg(long)]
    xmax: u64,
    /// real | imaginary
    #[arg(long, default_value = "real")]
    part: String,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn conjecture(args: ConjectureArgs) -> Result<i32> {
    let started = Instant::now();
    let (_, data) = io::load_half_integral(&args.half_data)?;
    let part = match args.part.as_str() {
        "real" => ConjecturePart::Real,
        "imaginary" | "imag" => ConjecturePart::Imaginary,
        other => bail!("unknown part {other:?}"),
    };
    let est = equidist::conjecture_ratio(&data, &args.phi, args.xmax, part)?;
    match est.pos_among_nonzero() {
        Some(ratio) => println!(
            "{} part: pos-among-nonzero {} over {} entries (conjectured limit 1/2)",
            args.part,
            io::fmt_sig12(ratio),
            est.total
        ),
        None => println!("{} part: trivial (all {} entries on the line)", args.part, est.total),
    }
    let mut report = ExperimentReport::new("conjecture");
    report
        .input("half_data", args.half_data.display())
        .input("phi", phi_string(&args.phi))
        .input("xmax", args.xmax)
        .input("part", &args.part)
        .density("ratio", &est);
    finish_report(report, started, &args.report)?;
    Ok(EXIT_PASS)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    form: PathBuf,
}

fn validate(args: ValidateArgs) -> Result<i32> {
    match io::load_newform(&args.form) {
        Ok(form) => {
            println!(
                "valid: weight {}, level {}, character order {}, {} primes up to {}",
                form.weight(),
                form.level(),
                form.character().order(),
                form.primes().count(),
                form.max_prime().unwrap_or(0)
            );
            Ok(EXIT_PASS)
        }
        Err(err) => {
            eprintln!("invalid: {err}");
            Ok(EXIT_USAGE)
        }
    }
}
