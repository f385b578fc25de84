//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 2 for invalid input, 3 when a numerical check fails.

use crate::error::{Error, Result};
use crate::experiments::{self, ScenarioReport};
use crate::opuc::{
    log_moments_quad, szego_recurse, z_quad, BernsteinSzegoMeasure, QuadConfig, TrigWeight,
};
use crate::polyring::{bezout_tolerance, decompose, parse_poly, ComplexPoly};
use crate::seqkit::{
    apply_shift_poly, dyadic_horizons, lp_diagnose, SequenceSpec, VerblunskySequence,
};
use crate::sums::{
    boundary_reconcile, family_bounds, identity_check_interior, moment_rows, moments_sum,
    term_table, z_partial_sums, z_sum,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "szego",
    version,
    about = "Higher-order Szegő sum rules for Verblunsky coefficients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args, Serialize)]
struct Output {
    /// Output format (default depends on the command)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write results here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeqArgs {
    /// Sequence spec: inline JSON or a file path
    #[arg(long = "seq")]
    seq: String,
    /// Keep only the first N coefficients
    #[arg(long)]
    truncate: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Szegő recursion: φ_n and φ_n^* coefficients
    Recurse {
        #[command(flatten)]
        seq: SeqArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Bernstein–Szegő weight 1/|φ_n|² on a uniform grid
    Weight {
        #[command(flatten)]
        seq: SeqArgs,
        /// Number of grid points on [0, 2π)
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Log-moments w_0..w_3 from the term sums, optionally checked by quadrature
    Moments {
        #[command(flatten)]
        seq: SeqArgs,
        /// Also compute the moments by quadrature at this tolerance
        #[arg(long)]
        quad_tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Z from the finite sum, with optional partial sums
    Zsum {
        #[command(flatten)]
        seq: SeqArgs,
        /// Comma-separated horizons for partial sums
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Z by quadrature against a trigonometric weight
    Zquad {
        #[command(flatten)]
        seq: SeqArgs,
        /// Weight as `theta=..,m=..;...`
        #[arg(long, default_value = "theta=0,m=2;theta=pi,m=1")]
        weight: String,
        #[arg(long, default_value_t = 1e-11)]
        quad_tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Per-k table of the L, E, G, H, F, I, J families and the summand
    Terms {
        #[command(flatten)]
        seq: SeqArgs,
        /// Horizons at which to report partial ℓ¹ norms and the |L_k| bound
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Randomized check of the interior summand identity
    IdentityCheck {
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Select the boundary convention matching the quadrature value
    Reconcile {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 1e-11)]
        quad_tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Split the sequence along coprime polynomials
    Decompose {
        #[command(flatten)]
        seq: SeqArgs,
        /// Polynomial, repeatable: `(z-1)^2`, `root:theta=pi,m=1`, ...
        #[arg(long = "poly", required = true)]
        polys: Vec<String>,
        /// One exponent per polynomial for ℓᵖ diagnostics of the components
        #[arg(long = "p", value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        horizons: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// ℓᵖ partial norms and divergence verdict of P(S)α
    Lp {
        #[command(flatten)]
        seq: SeqArgs,
        /// Apply P(S) first
        #[arg(long = "poly")]
        poly: Option<String>,
        #[arg(long = "p")]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        horizons: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Counterexample scenario
    Corollary {
        #[arg(long, value_delimiter = ',')]
        horizons: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Random cross-validation of sums against quadrature
    Sweep {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 0.8)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

/// Result of one command, ready to be rendered.
struct Rendered {
    config: Value,
    result: Value,
    csv: Option<String>,
    text: String,
    /// Set when a numerical check failed; output is still written.
    failure: Option<Error>,
}

impl Rendered {
    fn new(config: Value, result: Value, text: String) -> Self {
        Self {
            config,
            result,
            csv: None,
            text,
            failure: None,
        }
    }
}

fn load_sequence(args: &SeqArgs) -> Result<VerblunskySequence> {
    let mut spec = SequenceSpec::load(&args.seq)?;
    if let Some(n) = args.truncate {
        spec = spec.with_horizon(n.min(spec.horizon()));
    }
    VerblunskySequence::from_spec(&spec)
}

fn parse_polys(texts: &[String]) -> Result<Vec<ComplexPoly>> {
    texts
        .iter()
        .enumerate()
        .map(|(j, t)| {
            parse_poly(t).map_err(|e| Error::Parse(format!("--poly #{} `{t}`: {e}", j + 1)))
        })
        .collect()
}

fn default_horizons(len: usize, given: &[usize]) -> Vec<usize> {
    if given.is_empty() {
        dyadic_horizons(len, 15)
    } else {
        given.to_vec()
    }
}

fn scenario(config: Value, report: ScenarioReport) -> Rendered {
    let text = report.summary();
    let failure = (!report.passed()).then(|| report.clone().ensure_passed().unwrap_err());
    let mut r = Rendered::new(
        config,
        serde_json::to_value(&report).unwrap_or(Value::Null),
        text,
    );
    r.failure = failure;
    r
}

fn execute(cmd: &Command) -> Result<(Rendered, Format, Option<PathBuf>)> {
    let (rendered, out) = match cmd {
        Command::Recurse { seq, out } => {
            let alpha = load_sequence(seq)?;
            let pair = szego_recurse(&alpha, alpha.len())?;
            let config = json!({ "subcommand": "recurse", "sequence": alpha.spec() });
            let text = format!(
                "phi_{n}(z) = {}\nphi_{n}^*(z) = {}\n",
                pair.phi,
                pair.phi_star,
                n = pair.n
            );
            let mut r = Rendered::new(config, serde_json::to_value(&pair)?, text);
            let mut csv = String::from("j,phi_re,phi_im,phi_star_re,phi_star_im\n");
            for j in 0..=pair.n {
                let (a, b) = (pair.phi.coeff(j), pair.phi_star.coeff(j));
                csv += &format!("{j},{},{},{},{}\n", a.re, a.im, b.re, b.im);
            }
            r.csv = Some(csv);
            (r, out)
        }
        Command::Weight { seq, grid, out } => {
            let alpha = load_sequence(seq)?;
            if *grid == 0 {
                return Err(Error::InvalidArgument("--grid must be positive".into()));
            }
            let m = BernsteinSzegoMeasure::full(&alpha)?;
            let points: Vec<(f64, f64)> = (0..*grid)
                .map(|j| {
                    let t = std::f64::consts::TAU * j as f64 / *grid as f64;
                    (t, m.weight(t))
                })
                .collect();
            let config = json!({ "subcommand": "weight", "sequence": alpha.spec(), "grid": grid });
            let mut csv = String::from("theta,weight\n");
            let mut text = String::new();
            for (t, w) in &points {
                csv += &format!("{t},{w}\n");
                text += &format!("{t:>10.6} {w:.12e}\n");
            }
            let mut r = Rendered::new(
                config,
                json!(points
                    .iter()
                    .map(|(t, w)| json!({ "theta": t, "weight": w }))
                    .collect::<Vec<_>>()),
                text,
            );
            r.csv = Some(csv);
            (r, out)
        }
        Command::Moments { seq, quad_tol, out } => {
            let alpha = load_sequence(seq)?;
            let sums = moments_sum(&alpha);
            let arr = sums.as_array();
            let mut result = json!({ "sum": sums });
            let mut text = String::new();
            for (m, w) in arr.iter().enumerate() {
                text += &format!("w{m} = {} {:+}i\n", w.re, w.im);
            }
            if let Some(tol) = quad_tol {
                let meas = BernsteinSzegoMeasure::full(&alpha)?;
                let quad: [num_complex::Complex64; 4] =
                    log_moments_quad(&meas, &QuadConfig::with_tol(*tol))?;
                let diff = quad
                    .iter()
                    .zip(&arr)
                    .map(|(q, s)| (q - s).norm())
                    .fold(0.0, f64::max);
                result["quad"] = json!(quad);
                result["max_difference"] = json!(diff);
                text += &format!("quadrature max difference {diff:e}\n");
            }
            let config =
                json!({ "subcommand": "moments", "sequence": alpha.spec(), "quad_tol": quad_tol });
            let mut r = Rendered::new(config, result, text);
            let mut csv = String::from("k,w0_re,w0_im,w1_re,w1_im,w2_re,w2_im,w3_re,w3_im\n");
            for (k, row) in moment_rows(&alpha).iter().enumerate() {
                csv += &k.to_string();
                for w in row {
                    csv += &format!(",{},{}", w.re, w.im);
                }
                csv.push('\n');
            }
            r.csv = Some(csv);
            (r, out)
        }
        Command::Zsum {
            seq,
            checkpoints,
            out,
        } => {
            let alpha = load_sequence(seq)?;
            let z = z_sum(&alpha);
            let partial = z_partial_sums(&alpha, checkpoints);
            let config = json!({ "subcommand": "zsum", "sequence": alpha.spec(), "checkpoints": checkpoints });
            let mut text = format!("{z}\n");
            let mut csv = String::from("n,z\n");
            for (n, v) in &partial {
                text += &format!("N = {n}: {v}\n");
                csv += &format!("{n},{v}\n");
            }
            let mut r = Rendered::new(config, json!({ "z": z, "partial": partial }), text);
            r.csv = Some(csv);
            (r, out)
        }
        Command::Zquad {
            seq,
            weight,
            quad_tol,
            out,
        } => {
            let alpha = load_sequence(seq)?;
            let w = TrigWeight::parse(weight)?;
            let m = BernsteinSzegoMeasure::full(&alpha)?;
            let z = z_quad(&m, &w, &QuadConfig::with_tol(*quad_tol))?;
            let config = json!({
                "subcommand": "zquad", "sequence": alpha.spec(), "weight": w.factors, "quad_tol": quad_tol,
            });
            (
                Rendered::new(config, json!({ "z": z }), format!("{z}\n")),
                out,
            )
        }
        Command::Terms {
            seq,
            checkpoints,
            out,
        } => {
            let alpha = load_sequence(seq)?;
            let table = term_table(&alpha);
            let mut csv = Vec::new();
            table.write_csv(&mut csv)?;
            let mut result = json!({ "table": table });
            let mut text = format!("{} rows\n", table.rows.len());
            if !checkpoints.is_empty() {
                let bounds = family_bounds(&alpha, checkpoints);
                text += &format!(
                    "|L_k| <= (8/9)|alpha_k|^6: {} checked, violations at {:?}\n",
                    bounds.l_bound_checked, bounds.l_bound_violations
                );
                result["bounds"] = serde_json::to_value(bounds)?;
            }
            let config = json!({ "subcommand": "terms", "sequence": alpha.spec(), "checkpoints": checkpoints });
            let mut r = Rendered::new(config, result, text);
            r.csv = Some(String::from_utf8_lossy(&csv).into_owned());
            (r, out)
        }
        Command::IdentityCheck {
            draws,
            radius,
            seed,
            out,
        } => {
            let check = identity_check_interior(*draws, *radius, *seed)?;
            let config = json!({ "subcommand": "identity-check", "draws": draws, "radius": radius, "seed": seed });
            let text = format!(
                "max residual {:e} (absolute {:e}) over {} draws\n",
                check.max_rel_residual, check.max_abs_residual, check.draws
            );
            let mut r = Rendered::new(config, serde_json::to_value(&check)?, text);
            if check.max_rel_residual > experiments::IDENTITY_TOL {
                r.failure = Some(Error::ScenarioFailure {
                    scenario: "identity-check".into(),
                    details: format!(
                        "residual {:e} exceeds {:e}",
                        check.max_rel_residual,
                        experiments::IDENTITY_TOL
                    ),
                });
            }
            (r, out)
        }
        Command::Reconcile { seq, quad_tol, out } => {
            let alpha = load_sequence(seq)?;
            let report = boundary_reconcile(&alpha, &QuadConfig::with_tol(*quad_tol))?;
            let config = json!({ "subcommand": "reconcile", "sequence": alpha.spec(), "quad_tol": quad_tol });
            let text = format!(
                "z_quad = {}\nz_sum = {}\nselected {:?}\n",
                report.z_quad, report.z_sum, report.selected
            );
            (
                Rendered::new(config, serde_json::to_value(&report)?, text),
                out,
            )
        }
        Command::Decompose {
            seq,
            polys,
            p,
            horizons,
            out,
        } => {
            let alpha = load_sequence(seq)?;
            let parsed = parse_polys(polys)?;
            let mut d = decompose(alpha.values(), &parsed)?;
            if !p.is_empty() {
                let h = default_horizons(alpha.len(), horizons);
                d.diagnose(p, &h)?;
            }
            let config = json!({
                "subcommand": "decompose", "sequence": alpha.spec(), "polys": polys,
                "parsed": parsed, "p": p, "horizons": horizons,
            });
            let mut text = String::new();
            for (j, u) in d.cofactors.iter().enumerate() {
                text += &format!("U_{} = {}\n", j + 1, u);
            }
            text += &format!(
                "bezout residual {:e}\nreconstruction residual {:e}\n",
                d.bezout_residual, d.reconstruction_residual
            );
            let mut r = Rendered::new(config, serde_json::to_value(&d)?, text);
            let tol = bezout_tolerance(&parsed);
            if d.bezout_residual > tol {
                r.failure = Some(Error::ScenarioFailure {
                    scenario: "decompose".into(),
                    details: format!("bezout residual {:e} exceeds {tol:e}", d.bezout_residual),
                });
            }
            let mut csv = String::from("k");
            for j in 1..=d.components.len() {
                csv += &format!(",beta{j}_re,beta{j}_im");
            }
            csv.push('\n');
            for k in 0..alpha.len() {
                csv += &k.to_string();
                for c in &d.components {
                    csv += &format!(",{},{}", c[k].re, c[k].im);
                }
                csv.push('\n');
            }
            r.csv = Some(csv);
            (r, out)
        }
        Command::Lp {
            seq,
            poly,
            p,
            horizons,
            out,
        } => {
            let alpha = load_sequence(seq)?;
            let x = match poly {
                Some(t) => {
                    apply_shift_poly(&parse_polys(std::slice::from_ref(t))?[0], alpha.values())?
                }
                None => alpha.values().to_vec(),
            };
            let h = default_horizons(x.len(), horizons);
            let d = lp_diagnose(&x, *p, &h)?;
            let config = json!({
                "subcommand": "lp", "sequence": alpha.spec(), "poly": poly, "p": p, "horizons": h,
            });
            let mut text = format!("verdict {:?}\n", d.verdict);
            let mut csv = String::from("n,norm_p\n");
            for (n, v) in &d.partial_norms {
                text += &format!("N = {n}: {v}\n");
                csv += &format!("{n},{v}\n");
            }
            let mut r = Rendered::new(config, serde_json::to_value(&d)?, text);
            r.csv = Some(csv);
            (r, out)
        }
        Command::Corollary { horizons, out } => {
            let h = if horizons.is_empty() {
                experiments::corollary_horizons(1_000_000)
            } else {
                horizons.clone()
            };
            let report = experiments::run_corollary(&h)?;
            (
                scenario(json!({ "subcommand": "corollary", "horizons": h }), report),
                out,
            )
        }
        Command::Sweep {
            count,
            max_len,
            radius,
            seed,
            out,
        } => {
            let report = experiments::run_oracle_sweep(*count, *max_len, *radius, *seed)?;
            let config = json!({
                "subcommand": "sweep", "count": count, "max_len": max_len, "radius": radius, "seed": seed,
            });
            (scenario(config, report), out)
        }
    };
    let format = out.format.unwrap_or(match cmd {
        Command::Weight { .. } | Command::Terms { .. } => Format::Csv,
        _ => Format::Json,
    });
    let mut rendered = rendered;
    if let Value::Object(map) = &mut rendered.config {
        map.insert("format".into(), json!(format));
        map.insert("out".into(), json!(out.out));
        map.insert("version".into(), json!(experiments::VERSION));
    }
    Ok((rendered, format, out.out.clone()))
}

fn render(r: &Rendered, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&json!({ "config": r.config, "result": r.result }))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let body = r.csv.as_deref().ok_or_else(|| {
                Error::InvalidArgument(
                    "this command has no CSV output; use --format json or text".into(),
                )
            })?;
            format!("# config: {}\n{body}", serde_json::to_string(&r.config)?)
        }
        Format::Text => format!(
            "# config: {}\n{}",
            serde_json::to_string(&r.config)?,
            r.text
        ),
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli.command).and_then(|(r, format, out)| {
        emit(&render(&r, format)?, out.as_ref())?;
        Ok(r.failure)
    });
    match result {
        Ok(None) => 0,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
