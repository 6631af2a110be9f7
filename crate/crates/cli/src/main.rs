//! pwdyn: file-based command-line front end for the interval-dynamics
//! library.
//!
//! Every command that writes output files also writes a run manifest next to
//! the first output (`<stem>.manifest.json`); `pwdyn rerun <manifest>`
//! re-executes the recorded command and reproduces the outputs byte for
//! byte. All stochastic commands take an explicit `--seed`; there is no
//! wall-clock entropy anywhere.
//!
//! Exit codes: 0 success, 2 domain error (invalid parameters, validation
//! violations, hypothesis failures), 3 file I/O or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pwdyn::lateral::{lateral_orbit, rotation_number, LateralState};
use pwdyn::mapfile::{load_map, save_map, MapfileError};
use pwdyn::{
    classification_report, construct_ewi, first_return_map, flatten_unimodal, lorenz_rescale,
    make_logistic, make_lorenz, pit_surgery, sample_omega, LorenzParams, PiecewiseMap,
    SamplingParams, Side, SurgeryRecord,
};

#[derive(Parser, Debug)]
#[command(name = "pwdyn", version, about = "Piecewise interval dynamics toolbox")]
struct Cli {
    /// Worker threads (default: the PWDYN_THREADS variable, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Emit a built-in family member as a map spec file.
    Zoo(ZooArgs),
    /// Check tiling, range, orientation, and Schwarzian sign on a grid.
    Validate(ValidateArgs),
    /// Iterate a plain or side-tagged orbit to CSV.
    Orbit(OrbitArgs),
    /// Sample omega-limit covers for seeded uniform starts (JSON).
    Omega(OmegaArgs),
    /// Enumerate monotone branches of the first-return map to CSV.
    Returnmap(ReturnmapArgs),
    /// Derive a locally rescaled map (pit, flatten, lorenz-rescale).
    Surgery(SurgeryArgs),
    /// Sample, cluster, and classify attractors (JSON report).
    Classify(ClassifyArgs),
    /// Rotation number of the gap dynamics around a discontinuity.
    Rotation(RotationArgs),
    /// Re-execute a recorded run manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Debug)]
struct ZooArgs {
    #[command(subcommand)]
    family: ZooFamily,
}

#[derive(Subcommand, Debug)]
enum ZooFamily {
    /// λx(1−x) with the turning point 1/2.
    Logistic {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Contracting Lorenz map with discontinuity c and exponents > 1.
    Lorenz {
        #[arg(long)]
        c: f64,
        #[arg(long, value_name = "RHO_L")]
        rho_l: f64,
        #[arg(long, value_name = "RHO_R")]
        rho_r: f64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        v: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Three-branch map with gap dynamics tuned away from low rationals.
    Ewi {
        #[arg(long)]
        c: f64,
        #[arg(long, value_name = "RHO_L")]
        rho_l: f64,
        #[arg(long, value_name = "RHO_R")]
        rho_r: f64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        v: f64,
        /// Preferred rotation number; the search picks the closest candidate.
        #[arg(long)]
        rotation_target: Option<f64>,
        #[arg(long, default_value_t = 200)]
        search_budget: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ValidateArgs {
    spec: PathBuf,
    /// Interior sample points per branch.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Write the full validation report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    spec: PathBuf,
    /// Plain orbit start (mutually exclusive with --lateral).
    #[arg(long, conflicts_with = "lateral")]
    x0: Option<f64>,
    /// Side-tagged start, e.g. 0.5- or 0.25+.
    #[arg(long, value_parser = parse_lateral)]
    lateral: Option<(f64, Side)>,
    /// Number of steps.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OmegaArgs {
    spec: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 10_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 100_000)]
    tail: usize,
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReturnmapArgs {
    spec: PathBuf,
    /// Left endpoint of the base interval.
    #[arg(long)]
    a: f64,
    /// Right endpoint of the base interval.
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 15)]
    max_time: usize,
    /// Tolerance for declaring a branch image onto (a,b).
    #[arg(long, default_value_t = pwdyn::returns::TOL_ONTO)]
    tol_onto: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SurgeryArgs {
    spec: PathBuf,
    #[command(subcommand)]
    op: SurgeryOp,
}

#[derive(Subcommand, Debug)]
enum SurgeryOp {
    /// Contract toward q on an interval: g = q + σ(f−q), σ = (2 sup|f′|)⁻¹.
    Pit {
        /// Modified interval as lo,hi.
        #[arg(long, value_parser = parse_interval)]
        interval: (f64, f64),
        #[arg(long)]
        q: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stretch a unimodal peak to reach 1 over the preimage of (p̂, 1].
    Flatten {
        /// A periodic point; the stretch factor comes from its orbit.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stretch both sides of a Lorenz discontinuity onto (f(a),1) and (0,f(b)).
    LorenzRescale {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    spec: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 10_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 100_000)]
    tail: usize,
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    #[arg(long, default_value_t = 5e-3)]
    hausdorff_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RotationArgs {
    spec: PathBuf,
    #[arg(long)]
    n: usize,
    /// Discontinuity to rotate around (default: the single exceptional point).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RerunArgs {
    manifest: PathBuf,
}

fn parse_lateral(s: &str) -> Result<(f64, Side), String> {
    if s.len() < 2 {
        return Err("expected <coord><+|->, e.g. 0.5-".into());
    }
    let (num, tag) = s.split_at(s.len() - 1);
    let side = match tag {
        "+" => Side::Plus,
        "-" => Side::Minus,
        _ => return Err(format!("side tag must be + or -, got {tag:?}")),
    };
    let coord: f64 = num
        .parse()
        .map_err(|e| format!("bad coordinate {num:?}: {e}"))?;
    Ok((coord, side))
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| "expected lo,hi".to_string())?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad lo {a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad hi {b:?}: {e}"))?;
    Ok((lo, hi))
}

/// A failed command, carrying its exit code class.
#[derive(Debug)]
enum Failure {
    /// Invalid parameters, violated hypotheses, failed validation: exit 2.
    Domain(String),
    /// Unreadable, unwritable, or unparsable files: exit 3.
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 2,
            Failure::Io(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Io(m) => m,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn io_fail(e: impl std::fmt::Display) -> Failure {
    Failure::Io(e.to_string())
}

type CmdResult = Result<(), Failure>;

fn load(path: &Path) -> Result<PiecewiseMap, Failure> {
    load_map(path).map_err(|e| match e {
        MapfileError::Io { .. } | MapfileError::Parse { .. } => io_fail(e),
        other => domain(other),
    })
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| io_fail(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| io_fail(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

/// Record of one run: the normalized argument vector reproduces it exactly.
#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    tool: String,
    version: String,
    /// Arguments after the binary name; `pwdyn rerun` replays them.
    command: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn manifest_path(first_output: &Path) -> PathBuf {
    first_output.with_extension("manifest.json")
}

fn write_manifest(
    command: Vec<String>,
    inputs: &[&Path],
    outputs: &[&Path],
    seed: Option<u64>,
) -> CmdResult {
    let manifest = RunManifest {
        tool: "pwdyn".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        seed,
    };
    write_json(&manifest_path(outputs[0]), &manifest)
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Normalized argument vector for the manifest: every semantic flag is
/// explicit, so replays are immune to future default changes.
fn to_argv(cmd: &Cmd) -> Vec<String> {
    let mut v: Vec<String> = Vec::new();
    match cmd {
        Cmd::Zoo(z) => {
            v.push("zoo".into());
            match &z.family {
                ZooFamily::Logistic { lambda, out } => {
                    v.extend(["logistic".into(), "--lambda".into(), fmt_f64(*lambda)]);
                    v.extend(["--out".into(), path_str(out)]);
                }
                ZooFamily::Lorenz {
                    c,
                    rho_l,
                    rho_r,
                    u,
                    v: vv,
                    out,
                } => {
                    v.push("lorenz".into());
                    for (flag, val) in [
                        ("--c", c),
                        ("--rho-l", rho_l),
                        ("--rho-r", rho_r),
                        ("--u", u),
                        ("--v", vv),
                    ] {
                        v.extend([flag.into(), fmt_f64(*val)]);
                    }
                    v.extend(["--out".into(), path_str(out)]);
                }
                ZooFamily::Ewi {
                    c,
                    rho_l,
                    rho_r,
                    u,
                    v: vv,
                    rotation_target,
                    search_budget,
                    out,
                } => {
                    v.push("ewi".into());
                    for (flag, val) in [
                        ("--c", c),
                        ("--rho-l", rho_l),
                        ("--rho-r", rho_r),
                        ("--u", u),
                        ("--v", vv),
                    ] {
                        v.extend([flag.into(), fmt_f64(*val)]);
                    }
                    if let Some(t) = rotation_target {
                        v.extend(["--rotation-target".into(), fmt_f64(*t)]);
                    }
                    v.extend(["--search-budget".into(), search_budget.to_string()]);
                    v.extend(["--out".into(), path_str(out)]);
                }
            }
        }
        Cmd::Validate(a) => {
            v.extend(["validate".into(), path_str(&a.spec)]);
            v.extend(["--grid".into(), a.grid.to_string()]);
            if let Some(r) = &a.report {
                v.extend(["--report".into(), path_str(r)]);
            }
        }
        Cmd::Orbit(a) => {
            v.extend(["orbit".into(), path_str(&a.spec)]);
            if let Some(x0) = a.x0 {
                v.extend(["--x0".into(), fmt_f64(x0)]);
            }
            if let Some((coord, side)) = a.lateral {
                v.extend(["--lateral".into(), format!("{}{}", coord, side.symbol())]);
            }
            v.extend(["--n".into(), a.n.to_string()]);
            v.extend(["--out".into(), path_str(&a.out)]);
        }
        Cmd::Omega(a) => {
            v.extend(["omega".into(), path_str(&a.spec)]);
            v.extend(["--seed".into(), a.seed.to_string()]);
            v.extend(["--samples".into(), a.samples.to_string()]);
            v.extend(["--burn-in".into(), a.burn_in.to_string()]);
            v.extend(["--tail".into(), a.tail.to_string()]);
            v.extend(["--resolution".into(), fmt_f64(a.resolution)]);
            v.extend(["--out".into(), path_str(&a.out)]);
        }
        Cmd::Returnmap(a) => {
            v.extend(["returnmap".into(), path_str(&a.spec)]);
            v.extend(["--a".into(), fmt_f64(a.a)]);
            v.extend(["--b".into(), fmt_f64(a.b)]);
            v.extend(["--max-time".into(), a.max_time.to_string()]);
            v.extend(["--tol-onto".into(), fmt_f64(a.tol_onto)]);
            v.extend(["--out".into(), path_str(&a.out)]);
        }
        Cmd::Surgery(a) => {
            v.extend(["surgery".into(), path_str(&a.spec)]);
            match &a.op {
                SurgeryOp::Pit { interval, q, out } => {
                    v.push("pit".into());
                    v.extend([
                        "--interval".into(),
                        format!("{},{}", interval.0, interval.1),
                    ]);
                    v.extend(["--q".into(), fmt_f64(*q)]);
                    v.extend(["--out".into(), path_str(out)]);
                }
                SurgeryOp::Flatten { p, out } => {
                    v.push("flatten".into());
                    v.extend(["--p".into(), fmt_f64(*p)]);
                    v.extend(["--out".into(), path_str(out)]);
                }
                SurgeryOp::LorenzRescale { a, b, c, out } => {
                    v.push("lorenz-rescale".into());
                    v.extend(["--a".into(), fmt_f64(*a)]);
                    v.extend(["--b".into(), fmt_f64(*b)]);
                    v.extend(["--c".into(), fmt_f64(*c)]);
                    v.extend(["--out".into(), path_str(out)]);
                }
            }
        }
        Cmd::Classify(a) => {
            v.extend(["classify".into(), path_str(&a.spec)]);
            v.extend(["--seed".into(), a.seed.to_string()]);
            v.extend(["--samples".into(), a.samples.to_string()]);
            v.extend(["--burn-in".into(), a.burn_in.to_string()]);
            v.extend(["--tail".into(), a.tail.to_string()]);
            v.extend(["--resolution".into(), fmt_f64(a.resolution)]);
            v.extend(["--hausdorff-tol".into(), fmt_f64(a.hausdorff_tol)]);
            v.extend(["--out".into(), path_str(&a.out)]);
        }
        Cmd::Rotation(a) => {
            v.extend(["rotation".into(), path_str(&a.spec)]);
            v.extend(["--n".into(), a.n.to_string()]);
            if let Some(c) = a.c {
                v.extend(["--c".into(), fmt_f64(c)]);
            }
            if let Some(out) = &a.out {
                v.extend(["--out".into(), path_str(out)]);
            }
        }
        Cmd::Rerun(a) => {
            v.extend(["rerun".into(), path_str(&a.manifest)]);
        }
    }
    v
}

fn cmd_zoo(args: &ZooArgs, argv: Vec<String>) -> CmdResult {
    let (map, out): (PiecewiseMap, &Path) = match &args.family {
        ZooFamily::Logistic { lambda, out } => (make_logistic(*lambda).map_err(domain)?, out),
        ZooFamily::Lorenz {
            c,
            rho_l,
            rho_r,
            u,
            v,
            out,
        } => (
            make_lorenz(LorenzParams {
                c: *c,
                rho_l: *rho_l,
                rho_r: *rho_r,
                u: *u,
                v: *v,
            })
            .map_err(domain)?,
            out,
        ),
        ZooFamily::Ewi {
            c,
            rho_l,
            rho_r,
            u,
            v,
            rotation_target,
            search_budget,
            out,
        } => {
            let base = LorenzParams {
                c: *c,
                rho_l: *rho_l,
                rho_r: *rho_r,
                u: *u,
                v: *v,
            };
            let ewi = construct_ewi(base, *rotation_target, *search_budget).map_err(domain)?;
            println!(
                "ewi: a = {}, rotation ≈ {}, accepted v = {}",
                ewi.a, ewi.rotation_estimate, ewi.params.v
            );
            (ewi.map, out)
        }
    };
    save_map(&map, out).map_err(io_fail)?;
    write_manifest(argv, &[], &[out], None)
}

fn cmd_validate(args: &ValidateArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    let report = map.validate(args.grid);
    if let Some(path) = &args.report {
        write_json(path, &report)?;
        write_manifest(argv, &[&args.spec], &[path], None)?;
    }
    if report.is_clean() {
        println!("{}: clean ({} grid points per branch)", map.name, args.grid);
        Ok(())
    } else {
        Err(domain(format!(
            "{}: {} range, {} orientation, {} nonnegative-Schwarzian, {} critical grid flags",
            map.name,
            report.range_violations,
            report.orientation_violations,
            report.nonnegative_schwarzian,
            report.critical_grid_points
        )))
    }
}

fn cmd_orbit(args: &OrbitArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    let mut csv = String::new();
    match (args.x0, args.lateral) {
        (Some(x0), None) => {
            csv.push_str("step,coord\n");
            let mut x = x0;
            csv.push_str(&format!("0,{x}\n"));
            for step in 1..=args.n {
                match map.eval(x) {
                    Ok(y) => {
                        x = y;
                        csv.push_str(&format!("{step},{x}\n"));
                    }
                    Err(_) => break,
                }
            }
        }
        (None, Some((coord, side))) => {
            let start = LateralState::new(coord, side).map_err(domain)?;
            let orbit = lateral_orbit(&map, start, args.n);
            csv.push_str("step,coord,side\n");
            for (step, s) in orbit.states.iter().enumerate() {
                csv.push_str(&format!("{step},{},{}\n", s.coord, s.side.symbol()));
            }
        }
        _ => return Err(domain("provide exactly one of --x0 or --lateral")),
    }
    write_text(&args.out, &csv)?;
    write_manifest(argv, &[&args.spec], &[&args.out], None)
}

fn cmd_omega(args: &OmegaArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    let params = SamplingParams {
        samples: args.samples,
        burn_in: args.burn_in,
        tail: args.tail,
        resolution: args.resolution,
        hausdorff_tol: 5e-3,
        seed: args.seed,
    };
    if args.samples < 1 {
        return Err(domain("need at least one sample"));
    }
    let covers = sample_omega(&map, &params);
    write_json(&args.out, &covers)?;
    write_manifest(argv, &[&args.spec], &[&args.out], Some(args.seed))
}

fn cmd_returnmap(args: &ReturnmapArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    let frm =
        first_return_map(&map, (args.a, args.b), args.max_time, args.tol_onto).map_err(domain)?;
    let mut rows: Vec<&pwdyn::ReturnBranch> = frm.branches.iter().collect();
    rows.sort_by(|x, y| x.sub_lo.total_cmp(&y.sub_lo));
    let mut csv = String::from("sub_lo,sub_hi,return_time,image_lo,image_hi,onto\n");
    for b in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            b.sub_lo, b.sub_hi, b.return_time, b.image_lo, b.image_hi, b.onto
        ));
    }
    write_text(&args.out, &csv)?;
    println!(
        "{} branches, {} pending, coverage {:.6}",
        frm.branches.len(),
        frm.pending.len(),
        frm.coverage_measure
    );
    write_manifest(argv, &[&args.spec], &[&args.out], None)
}

/// Sidecar payload: what was done, where, and with which factors.
#[derive(Serialize)]
struct ProvenanceSidecar<'a> {
    kind: &'a pwdyn::SurgeryKind,
    interval: (f64, f64),
    factors: &'a [f64],
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("provenance.json")
}

fn cmd_surgery(args: &SurgeryArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    let (record, out): (SurgeryRecord, &Path) = match &args.op {
        SurgeryOp::Pit { interval, q, out } => {
            (pit_surgery(&map, *interval, *q).map_err(domain)?, out)
        }
        SurgeryOp::Flatten { p, out } => (flatten_unimodal(&map, *p).map_err(domain)?, out),
        SurgeryOp::LorenzRescale { a, b, c, out } => {
            (lorenz_rescale(&map, *a, *b, *c).map_err(domain)?, out)
        }
    };
    save_map(&record.result, out).map_err(io_fail)?;
    let sidecar = sidecar_path(out);
    write_json(
        &sidecar,
        &ProvenanceSidecar {
            kind: &record.kind,
            interval: record.modified_interval,
            factors: &record.scale_factors,
        },
    )?;
    println!(
        "{}: factors {:?} on ({}, {})",
        record.result.name,
        record.scale_factors,
        record.modified_interval.0,
        record.modified_interval.1
    );
    write_manifest(argv, &[&args.spec], &[out, &sidecar], None)
}

fn cmd_classify(args: &ClassifyArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    if args.samples < 1 {
        return Err(domain("need at least one sample"));
    }
    let params = SamplingParams {
        samples: args.samples,
        burn_in: args.burn_in,
        tail: args.tail,
        resolution: args.resolution,
        hausdorff_tol: args.hausdorff_tol,
        seed: args.seed,
    };
    let report = classification_report(&map, &params);
    write_json(&args.out, &report)?;
    write_manifest(argv, &[&args.spec], &[&args.out], Some(args.seed))
}

fn cmd_rotation(args: &RotationArgs, argv: Vec<String>) -> CmdResult {
    let map = load(&args.spec)?;
    let c = match args.c {
        Some(c) => c,
        None => {
            if map.exceptional_set.len() == 1 {
                map.exceptional_set[0]
            } else {
                return Err(domain(format!(
                    "map has {} exceptional points; pick one with --c",
                    map.exceptional_set.len()
                )));
            }
        }
    };
    let rho = rotation_number(&map, c, args.n).map_err(domain)?;
    println!("{rho}");
    if let Some(out) = &args.out {
        write_text(out, &format!("{rho}\n"))?;
        write_manifest(argv, &[&args.spec], &[out], None)?;
    }
    Ok(())
}

fn cmd_rerun(args: &RerunArgs) -> CmdResult {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| io_fail(format!("cannot read {}: {e}", args.manifest.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| io_fail(format!("malformed manifest {}: {e}", args.manifest.display())))?;
    if manifest.command.first().map(String::as_str) == Some("rerun") {
        return Err(domain("refusing to replay a rerun manifest"));
    }
    let mut argv = vec!["pwdyn".to_string()];
    argv.extend(manifest.command.iter().cloned());
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| domain(format!("manifest command does not parse: {e}")))?;
    dispatch(&cli.command)
}

fn dispatch(cmd: &Cmd) -> CmdResult {
    let argv = to_argv(cmd);
    match cmd {
        Cmd::Zoo(a) => cmd_zoo(a, argv),
        Cmd::Validate(a) => cmd_validate(a, argv),
        Cmd::Orbit(a) => cmd_orbit(a, argv),
        Cmd::Omega(a) => cmd_omega(a, argv),
        Cmd::Returnmap(a) => cmd_returnmap(a, argv),
        Cmd::Surgery(a) => cmd_surgery(a, argv),
        Cmd::Classify(a) => cmd_classify(a, argv),
        Cmd::Rotation(a) => cmd_rotation(a, argv),
        Cmd::Rerun(a) => cmd_rerun(a),
    }
}

fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("PWDYN_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || dispatch(&cli.command);
    let result = match thread_count(cli.threads) {
        Some(n) if n >= 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(domain(format!("cannot build a {n}-thread pool: {e}"))),
        },
        _ => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
