//! Command-line front end: signature enumeration, stabilizer reports,
//! class tables, cover construction, and lifted-representation
//! verification with machine-readable output.
//!
//! Exit codes: 0 success, 2 usage/validation error, 3 classifier oracle
//! mismatch, 4 cover construction failure, 5 verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use ramlift::bs::AffineMap;
use ramlift::classify::{cross_check, enumerate_classes, ClassifyError, OrientationClass};
use ramlift::cover::{build_cover, cover_from_json, cover_to_json, BasePoint, CoverError};
use ramlift::lift::{verify_rep, LiftedRep, VerificationReport, VerifyOptions};
use ramlift::sig::{
    enumerate_canonical, parse_signature_literal, stabilizer_report, DihedralElement, Group,
};
use serde::Serialize;
use std::io::Write as _;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_CONSTRUCTION: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(name = "ramlift", version, about = "certified ramified covers and lifted BS(1,n) actions")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Seed controlling sampled verification grids (determinism knob)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    C,
    D,
}

#[derive(Subcommand)]
enum Command {
    /// List canonical signature vectors (orbit minima)
    Enumerate {
        #[arg(long)]
        d: usize,
        #[arg(long = "max-s")]
        max_s: u32,
        #[arg(long, value_enum, default_value_t = GroupArg::D)]
        group: GroupArg,
    },
    /// Stabilizer subgroups and Delta data for one signature
    Stabilizer {
        /// Signature literal: s-labels then o-labels, comma-separated
        #[arg(long)]
        sig: String,
    },
    /// Conjugacy-class table of lifted representations
    Classify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        #[arg(long = "max-s")]
        max_s: u32,
        /// Enumerate the orientation-preserving set instead of the full set
        #[arg(long)]
        orientation_preserving: bool,
        /// Run the brute-force oracle and compare counts
        #[arg(long)]
        oracle: bool,
        /// Emit orientation-preserving homs without the conjugacy quotient
        #[arg(long)]
        no_quotient_plus: bool,
    },
    /// Construct and certify a rational ramified cover
    BuildCover {
        #[arg(long)]
        sig: String,
        /// Base point: 0 or inf
        #[arg(long, default_value = "inf")]
        base: String,
    },
    /// Verify a lifted representation end to end
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long, conflicts_with = "cover")]
        sig: Option<String>,
        /// Load a cover JSON file instead of building one
        #[arg(long)]
        cover: Option<std::path::PathBuf>,
        /// Fiber action of a, as rot or rot:f (f = flip)
        #[arg(long = "zeta-a", default_value = "0")]
        zeta_a: String,
        /// Fiber action of b, as rot or rot:f
        #[arg(long = "zeta-b", default_value = "0")]
        zeta_b: String,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long = "rotation-iters", default_value_t = 100_000)]
        rotation_iters: usize,
        #[arg(long = "tol-relation", default_value_t = 1e-8)]
        tol_relation: f64,
        #[arg(long = "tol-square", default_value_t = 1e-9)]
        tol_square: f64,
        #[arg(long = "tol-fiber", default_value_t = 1e-6)]
        tol_fiber: f64,
        #[arg(long = "tol-sigma", default_value_t = 1e-6)]
        tol_sigma: f64,
        #[arg(long = "tol-rotation", default_value_t = 1e-3)]
        tol_rotation: f64,
        #[arg(long = "tol-schwarzian", default_value_t = 1e-4)]
        tol_schwarzian: f64,
    },
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn emit(cli_out: &Option<std::path::PathBuf>, text: &str) -> Result<(), std::io::Error> {
    match cli_out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut so = std::io::stdout();
            so.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                so.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

/// Self-describing header carried in every JSON report.
#[derive(Serialize)]
struct Header {
    tool: &'static str,
    precision_bits: u32,
    seed: u64,
}

fn header(seed: u64) -> Header {
    Header {
        tool: "ramlift",
        precision_bits: 53,
        seed,
    }
}

fn parse_zeta(text: &str, d: usize) -> Result<DihedralElement, String> {
    let (rot_s, flip) = match text.split_once(':') {
        Some((r, "f")) => (r, true),
        Some((_, other)) => return Err(format!("bad flip tag {other:?}, expected f")),
        None => (text, false),
    };
    let rot: i64 = rot_s
        .trim()
        .parse()
        .map_err(|_| format!("bad rotation {rot_s:?}"))?;
    if rot >= d as i64 {
        return Err(format!("rotation {rot} out of range for d={d}"));
    }
    Ok(DihedralElement::new(d, rot, flip))
}

fn main() -> ExitCode {
    // only double precision is supported; refuse other requests rather
    // than silently computing at the wrong precision
    if let Ok(bits) = std::env::var("RAMLIFT_PRECISION_BITS") {
        if bits.trim() != "53" {
            return fail(
                EXIT_USAGE,
                &format!("RAMLIFT_PRECISION_BITS={bits} unsupported (only 53)"),
            );
        }
    }
    let cli = Cli::parse();
    let seed = cli.seed;
    let out = cli.out.clone();
    let format = cli.format;

    let result: Result<String, (u8, String)> = match &cli.command {
        Command::Enumerate { d, max_s, group } => run_enumerate(*d, *max_s, *group, format, seed),
        Command::Stabilizer { sig } => run_stabilizer(sig, format, seed),
        Command::Classify {
            n,
            d,
            max_s,
            orientation_preserving,
            oracle,
            no_quotient_plus,
        } => run_classify(
            *n,
            *d,
            *max_s,
            *orientation_preserving,
            *oracle,
            *no_quotient_plus,
            format,
            seed,
        ),
        Command::BuildCover { sig, base } => run_build_cover(sig, base),
        Command::Verify {
            n,
            sig,
            cover,
            zeta_a,
            zeta_b,
            grid,
            rotation_iters,
            tol_relation,
            tol_square,
            tol_fiber,
            tol_sigma,
            tol_rotation,
            tol_schwarzian,
        } => run_verify(VerifyArgs {
            n: *n,
            sig: sig.clone(),
            cover: cover.clone(),
            zeta_a: zeta_a.clone(),
            zeta_b: zeta_b.clone(),
            grid: *grid,
            rotation_iters: *rotation_iters,
            tol_relation: *tol_relation,
            tol_square: *tol_square,
            tol_fiber: *tol_fiber,
            tol_sigma: *tol_sigma,
            tol_rotation: *tol_rotation,
            tol_schwarzian: *tol_schwarzian,
            seed,
        }),
    };

    match result {
        Ok(text) => match emit(&out, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(EXIT_USAGE, &format!("cannot write output: {e}")),
        },
        Err((code, msg)) => fail(code, &msg),
    }
}

fn run_enumerate(
    d: usize,
    max_s: u32,
    group: GroupArg,
    format: Format,
    seed: u64,
) -> Result<String, (u8, String)> {
    if d == 0 {
        return Err((EXIT_USAGE, "d must be >= 1".into()));
    }
    if max_s == 0 {
        return Err((EXIT_USAGE, "max-s must be >= 1".into()));
    }
    let g = match group {
        GroupArg::C => Group::C,
        GroupArg::D => Group::D,
    };
    let sigs = enumerate_canonical(d, max_s, g);
    Ok(match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                header: Header,
                count: usize,
                signatures: Vec<ramlift::sig::SignatureVector>,
            }
            serde_json::to_string_pretty(&Out {
                header: header(seed),
                count: sigs.len(),
                signatures: sigs,
            })
            .expect("serialize")
        }
        Format::Csv => {
            let mut s = String::from("signature\n");
            for sig in &sigs {
                s.push_str(&format!("\"{sig}\"\n"));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} canonical signatures:\n", sigs.len());
            for sig in &sigs {
                s.push_str(&format!("  {sig}\n"));
            }
            s
        }
    })
}

fn run_stabilizer(sig: &str, format: Format, seed: u64) -> Result<String, (u8, String)> {
    let s = parse_signature_literal(sig).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let report = stabilizer_report(&s);
    Ok(match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                header: Header,
                report: ramlift::sig::StabilizerReport,
            }
            serde_json::to_string_pretty(&Out {
                header: header(seed),
                report,
            })
            .expect("serialize")
        }
        _ => format!("{report:#?}\n"),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_classify(
    n: u32,
    d: usize,
    max_s: u32,
    orientation_preserving: bool,
    oracle: bool,
    no_quotient_plus: bool,
    format: Format,
    seed: u64,
) -> Result<String, (u8, String)> {
    if n < 2 {
        return Err((EXIT_USAGE, "n must be >= 2".into()));
    }
    if d == 0 || max_s == 0 {
        return Err((EXIT_USAGE, "d and max-s must be >= 1".into()));
    }
    let oc = if orientation_preserving {
        OrientationClass::OrientationPreserving
    } else {
        OrientationClass::Full
    };
    let classes = enumerate_classes(n, d, max_s, oc, !no_quotient_plus);
    let oracle_counts = if oracle {
        match cross_check(n, d, max_s, oc) {
            Ok(counts) => Some(counts),
            Err(e @ ClassifyError::MismatchDetected { .. }) => {
                return Err((EXIT_ORACLE, e.to_string()))
            }
            Err(e) => return Err((EXIT_USAGE, e.to_string())),
        }
    } else {
        None
    };
    Ok(match format {
        Format::Json => {
            let mut lines = String::new();
            #[derive(Serialize)]
            struct Head<'a> {
                header: &'a Header,
                n: u32,
                d: usize,
                max_s: u32,
                count: usize,
                oracle: Option<(usize, usize)>,
            }
            let h = header(seed);
            lines.push_str(
                &serde_json::to_string(&Head {
                    header: &h,
                    n,
                    d,
                    max_s,
                    count: classes.len(),
                    oracle: oracle_counts,
                })
                .expect("serialize"),
            );
            lines.push('\n');
            for c in &classes {
                lines.push_str(&serde_json::to_string(c).expect("serialize"));
                lines.push('\n');
            }
            lines
        }
        Format::Csv => {
            let plus = enumerate_classes(n, d, max_s, OrientationClass::OrientationPreserving, true);
            let full = enumerate_classes(n, d, max_s, OrientationClass::Full, true);
            format!(
                "n,d,max_s,classes_full,classes_plus\n{n},{d},{max_s},{},{}\n",
                full.len(),
                plus.len()
            )
        }
        Format::Text => {
            let mut s = format!("{} classes (n={n}, d={d}, max_s={max_s}):\n", classes.len());
            for c in &classes {
                s.push_str(&format!(
                    "  {}  zeta_a={:?} zeta_b={:?}\n",
                    c.signature, c.zeta_a, c.zeta_b
                ));
            }
            if let Some((a, b)) = oracle_counts {
                s.push_str(&format!("oracle: {a} == {b}\n"));
            }
            s
        }
    })
}

fn run_build_cover(sig: &str, base: &str) -> Result<String, (u8, String)> {
    let s = parse_signature_literal(sig).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let bp = BasePoint::parse(base).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    match build_cover(&s, bp) {
        Ok(cover) => Ok(cover_to_json(&cover)),
        Err(e @ CoverError::ConstructionFailed { .. }) => Err((EXIT_CONSTRUCTION, e.to_string())),
        Err(e) => Err((EXIT_USAGE, e.to_string())),
    }
}

struct VerifyArgs {
    n: u32,
    sig: Option<String>,
    cover: Option<std::path::PathBuf>,
    zeta_a: String,
    zeta_b: String,
    grid: usize,
    rotation_iters: usize,
    tol_relation: f64,
    tol_square: f64,
    tol_fiber: f64,
    tol_sigma: f64,
    tol_rotation: f64,
    tol_schwarzian: f64,
    seed: u64,
}

#[derive(Serialize)]
struct VerifyOut {
    header: Header,
    n: u32,
    signature: String,
    zeta_a: String,
    zeta_b: String,
    tolerances: Tolerances,
    report: VerificationReport,
    checks: Vec<CheckLine>,
    pass: bool,
}

#[derive(Serialize)]
struct Tolerances {
    relation: f64,
    square: f64,
    fiber: f64,
    sigma: f64,
    rotation: f64,
    schwarzian: f64,
}

#[derive(Serialize)]
struct CheckLine {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn run_verify(args: VerifyArgs) -> Result<String, (u8, String)> {
    if args.n < 2 {
        return Err((EXIT_USAGE, "n must be >= 2".into()));
    }
    if args.grid < 16 {
        return Err((EXIT_USAGE, "grid must be >= 16".into()));
    }
    let cover = match (&args.sig, &args.cover) {
        (Some(sig), None) => {
            let s = parse_signature_literal(sig).map_err(|e| (EXIT_USAGE, e.to_string()))?;
            match build_cover(&s, BasePoint::Infinity) {
                Ok(c) => c,
                Err(e @ CoverError::ConstructionFailed { .. }) => {
                    return Err((EXIT_CONSTRUCTION, e.to_string()))
                }
                Err(e) => return Err((EXIT_USAGE, e.to_string())),
            }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (EXIT_USAGE, format!("cannot read cover file: {e}")))?;
            cover_from_json(&text).map_err(|e| (EXIT_USAGE, e.to_string()))?
        }
        _ => return Err((EXIT_USAGE, "exactly one of --sig / --cover required".into())),
    };
    let d = cover.degree();
    let za = parse_zeta(&args.zeta_a, d).map_err(|e| (EXIT_USAGE, e))?;
    let zb = parse_zeta(&args.zeta_b, d).map_err(|e| (EXIT_USAGE, e))?;

    // admissibility first: a named failure, not a panic
    let a_map = AffineMap::new_exact(
        ramlift::ratfunc::rat(i64::from(args.n), 1),
        ramlift::ratfunc::rat(0, 1),
    );
    let b_map = AffineMap::new_exact(ramlift::ratfunc::rat(1, 1), ramlift::ratfunc::rat(1, 1));
    if !ramlift::lift::admissible(&za, &cover, &a_map) {
        return Err((EXIT_VERIFY, "admissibility: zeta_a is not admissible for a".into()));
    }
    if !ramlift::lift::admissible(&zb, &cover, &b_map) {
        return Err((EXIT_VERIFY, "admissibility: zeta_b is not admissible for b".into()));
    }
    let rep = LiftedRep::new(args.n, cover, za.clone(), zb.clone())
        .map_err(|e| (EXIT_VERIFY, format!("admissibility: {e}")))?;
    let opts = VerifyOptions {
        grid_size: args.grid,
        rotation_iters: args.rotation_iters,
    };
    let report = verify_rep(&rep, &opts).map_err(|e| (EXIT_VERIFY, e.to_string()))?;

    let fiber_worst = report
        .fiber_derivatives
        .iter()
        .map(|f| (f.expected - f.got).abs())
        .fold(0.0f64, f64::max);
    let sigma_diff = (report.sigma.closed_form - report.sigma.numeric).abs();
    let rot_comb: f64 = {
        let parts: Vec<&str> = report.rotation.comb.split('/').collect();
        let num: f64 = parts[0].parse().unwrap_or(0.0);
        let den: f64 = parts[1].parse().unwrap_or(1.0);
        num / den
    };
    let rot_diff = {
        let raw = (rot_comb - report.rotation.numeric).abs();
        raw.min((1.0 - raw).abs())
    };
    let checks = vec![
        CheckLine {
            name: "relation_residual",
            value: report.relation_residual,
            tolerance: args.tol_relation,
            pass: report.relation_residual < args.tol_relation,
        },
        CheckLine {
            name: "square_residual",
            value: report.square_residual,
            tolerance: args.tol_square,
            pass: report.square_residual < args.tol_square,
        },
        CheckLine {
            name: "fiber_derivatives",
            value: fiber_worst,
            tolerance: args.tol_fiber,
            pass: fiber_worst < args.tol_fiber,
        },
        CheckLine {
            name: "sigma",
            value: sigma_diff,
            tolerance: args.tol_sigma,
            pass: sigma_diff < args.tol_sigma,
        },
        CheckLine {
            name: "rotation",
            value: rot_diff,
            tolerance: args.tol_rotation,
            pass: rot_diff < args.tol_rotation,
        },
        CheckLine {
            name: "schwarzian",
            value: report.schwarzian_max,
            tolerance: args.tol_schwarzian,
            pass: report.schwarzian_max < args.tol_schwarzian,
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    let out = VerifyOut {
        header: header(args.seed),
        n: args.n,
        signature: rep.lift_a().signature().to_string(),
        zeta_a: format!("{za:?}"),
        zeta_b: format!("{zb:?}"),
        tolerances: Tolerances {
            relation: args.tol_relation,
            square: args.tol_square,
            fiber: args.tol_fiber,
            sigma: args.tol_sigma,
            rotation: args.tol_rotation,
            schwarzian: args.tol_schwarzian,
        },
        report,
        checks,
        pass,
    };
    let text = serde_json::to_string_pretty(&out).expect("serialize");
    if !pass {
        let first = out.checks.iter().find(|c| !c.pass).expect("failed check");
        return Err((
            EXIT_VERIFY,
            format!("{}: {} exceeds {}\n{}", first.name, first.value, first.tolerance, text),
        ));
    }
    Ok(text)
}
