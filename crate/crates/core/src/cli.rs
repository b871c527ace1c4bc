//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on argument errors, 2 on numerical failures.
//! Set `ONECOVER_THREADS` to fix the worker count used for trials.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dodeca::{cell_frame, dodeca_params, DodecaConfig};
use crate::error::Error;
use crate::planar::{
    check_cover_lemma2, coverage_multiplicity_histogram, maximize_sector_once_area_from,
    sweep_lattice, LatticeCover, LatticeFamily,
};
use crate::geom::Point2;
use crate::report::{render_report, Format, ReportBody, ReportDocument, ReportMeta, TrialRow};
use crate::sampling::RandomStream;
use crate::volume::{delta3_dc, rejection_volume, run_trials, Estimator, GnPConfig, HullPatchConfig};

/// Environment variable holding the trial worker count.
pub const THREADS_ENV: &str = "ONECOVER_THREADS";

pub const GNP_GRID: [usize; 3] = [80_000, 140_000, 200_000];
pub const HULL_GRID: [usize; 10] = [
    2000, 4000, 6000, 8000, 10_000, 12_000, 14_000, 16_000, 18_000, 20_000,
];
pub const REJECTION_N: u64 = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "onecover", version, about = "Exactly-once coverage density of unit disk and ball covers")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Planar covers by unit disks.
    #[command(subcommand)]
    Planar(PlanarCmd),
    /// The dodecahedral cell of a unit ball.
    #[command(subcommand)]
    Dodeca(DodecaCmd),
}

#[derive(Debug, Subcommand)]
enum PlanarCmd {
    /// Maximize the once-covered sector area.
    SectorMax {
        /// Optimizer start in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        init: f64,
    },
    /// Sampled coverage multiplicities of a lattice cover.
    Density {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Farthest-Voronoi-vertex cover test.
    VerifyCover {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 3)]
        window: u32,
    },
    /// Cover verdict and once-density over a range of spacings.
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long, default_value_t = 10)]
        steps: u32,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct LatticeArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Hex)]
    family: FamilyArg,
    /// Nearest-neighbor spacing; defaults to the thinnest cover of the family.
    #[arg(long)]
    spacing: Option<f64>,
    /// Explicit basis `ux,uy,wx,wy`, overriding family and spacing.
    #[arg(long, value_delimiter = ',')]
    basis: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Hex,
    Square,
}

impl From<FamilyArg> for LatticeFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Hex => LatticeFamily::Hex,
            FamilyArg::Square => LatticeFamily::Square,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConfigArg {
    Paper,
    Regular,
}

impl From<ConfigArg> for DodecaConfig {
    fn from(c: ConfigArg) -> Self {
        match c {
            ConfigArg::Paper => DodecaConfig::Paper,
            ConfigArg::Regular => DodecaConfig::Regular,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum MethodArg {
    Gnp,
    Hull,
    Rejection,
}

#[derive(Debug, Subcommand)]
enum DodecaCmd {
    /// Cell constants a, R, H and alpha1.
    Constants {
        #[arg(long, value_enum, default_value_t = ConfigArg::Paper)]
        config: ConfigArg,
    },
    /// Reference points and tetrahedron volumes.
    Frame {
        #[arg(long, value_enum, default_value_t = ConfigArg::Paper)]
        config: ConfigArg,
    },
    /// Repeated volume estimates of S.
    Volume {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = ConfigArg::Paper)]
        config: ConfigArg,
        /// Point counts (gnp, rejection); repeat or comma-separate for a grid.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Patch sample counts (hull); repeat or comma-separate for a grid.
        #[arg(long, value_delimiter = ',')]
        m: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        tries: usize,
        #[arg(long, default_value_t = GnPConfig::DEFAULT_PROBES)]
        probes: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// alpha2 and delta from a given or estimated vol(S).
    Delta {
        #[arg(long, value_enum, default_value_t = ConfigArg::Paper)]
        config: ConfigArg,
        /// Use this vol(S) instead of estimating it.
        #[arg(long)]
        vol_s: Option<f64>,
        /// Rejection sample count when estimating.
        #[arg(long, default_value_t = REJECTION_N)]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn finite_positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be positive and finite, got {x}")))
    }
}

/// Runs the command line `args` (without the program name) and returns the exit code.
pub fn run_cli<S: AsRef<str>>(args: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = std::iter::once("onecover").chain(args.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    configure_threads(err);
    match dispatch(&cli, err) {
        Ok(doc) => {
            let _ = out.write_all(render_report(&doc, cli.format).as_bytes());
            0
        }
        Err(failure) => report_failure(&failure, err),
    }
}

fn report_failure(failure: &Failure, err: &mut dyn Write) -> i32 {
    match failure {
        Failure::Usage(msg) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            1
        }
        Failure::Numeric(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn configure_threads(err: &mut dyn Write) {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                // a second call in the same process keeps the first pool
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                let _ = writeln!(err, "warning: ignoring {THREADS_ENV}={v}");
            }
        }
    }
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let _ = writeln!(err, "note: no --seed given, using seed 0");
        0
    })
}

fn lattice_of(args: &LatticeArgs) -> Result<(LatticeCover, String), Failure> {
    if let Some(b) = &args.basis {
        if b.len() != 4 {
            return Err(usage("--basis takes exactly four numbers ux,uy,wx,wy"));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(usage("--basis entries must be finite"));
        }
        let cover = LatticeCover::new(Point2::new(b[0], b[1]), Point2::new(b[2], b[3]))
            .map_err(|e| usage(e.to_string()))?;
        return Ok((cover, "basis".into()));
    }
    let family: LatticeFamily = args.family.into();
    let spacing = match args.spacing {
        Some(s) => finite_positive("spacing", s)?,
        None => match family {
            LatticeFamily::Hex => 3f64.sqrt(),
            LatticeFamily::Square => 2f64.sqrt(),
        },
    };
    let name = match family {
        LatticeFamily::Hex => "hex",
        LatticeFamily::Square => "square",
    };
    Ok((LatticeCover::of_family(family, spacing)?, name.into()))
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<ReportDocument, Failure> {
    match &cli.command {
        Command::Planar(cmd) => planar(cmd, err),
        Command::Dodeca(cmd) => dodeca(cmd, err),
    }
}

fn planar(cmd: &PlanarCmd, err: &mut dyn Write) -> Result<ReportDocument, Failure> {
    match cmd {
        PlanarCmd::SectorMax { init } => {
            if !(*init > 0.0 && *init < 1.0) {
                return Err(usage("--init must lie in (0, 1)"));
            }
            let opt = maximize_sector_once_area_from(*init)?;
            Ok(ReportDocument::scalar(
                ReportMeta::new(0, "planar"),
                vec![
                    ("x_star", json!(opt.x_star)),
                    ("f_star", json!(opt.f_star)),
                    ("ratio_star", json!(opt.ratio_star)),
                ],
            ))
        }
        PlanarCmd::Density { lattice, n, seed } => {
            if *n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let (cover, name) = lattice_of(lattice)?;
            let seed = resolve_seed(*seed, err);
            let hist = coverage_multiplicity_histogram(&cover, *n, &RandomStream::new(seed, 0))?;
            let mut result = vec![
                ("samples", json!(hist.samples)),
                ("cell_area", json!(cover.cell_area())),
                ("mean_multiplicity", json!(hist.mean_multiplicity)),
                ("mean_std_error", json!(hist.mean_std_error)),
                ("disk_over_cell", json!(std::f64::consts::PI / cover.cell_area())),
            ];
            let labels: Vec<String> = (0..hist.fractions.len()).map(|k| format!("fraction_{k}")).collect();
            for (label, f) in labels.iter().zip(&hist.fractions) {
                result.push((label.as_str(), json!(f)));
            }
            Ok(ReportDocument::scalar(ReportMeta::new(seed, name), result))
        }
        PlanarCmd::VerifyCover { lattice, window } => {
            if *window < 2 {
                return Err(usage("--window must be at least 2"));
            }
            let (cover, name) = lattice_of(lattice)?;
            let v = check_cover_lemma2(&cover, *window)?;
            Ok(ReportDocument::scalar(
                ReportMeta::new(0, name),
                vec![
                    ("is_cover", json!(v.is_cover)),
                    ("r_max", json!(v.r_max)),
                    ("witness_x", json!(v.witness_vertex.x)),
                    ("witness_y", json!(v.witness_vertex.y)),
                ],
            ))
        }
        PlanarCmd::Sweep {
            family,
            min,
            max,
            steps,
            n,
            seed,
        } => {
            let lo = finite_positive("min", *min)?;
            let hi = finite_positive("max", *max)?;
            if lo >= hi {
                return Err(usage("--min must be below --max"));
            }
            if *steps < 2 {
                return Err(usage("--steps must be at least 2"));
            }
            if *n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let seed = resolve_seed(*seed, err);
            let family: LatticeFamily = (*family).into();
            let rows = sweep_lattice(family, lo, hi, *steps, *n, &RandomStream::new(seed, 0))?;
            let name = match family {
                LatticeFamily::Hex => "hex",
                LatticeFamily::Square => "square",
            };
            Ok(ReportDocument {
                meta: ReportMeta::new(seed, name),
                body: ReportBody::Sweep { rows },
            })
        }
    }
}

fn dodeca(cmd: &DodecaCmd, err: &mut dyn Write) -> Result<ReportDocument, Failure> {
    match cmd {
        DodecaCmd::Constants { config } => {
            let config: DodecaConfig = (*config).into();
            let p = dodeca_params(config);
            Ok(ReportDocument::scalar(
                ReportMeta::new(0, config.name()),
                vec![
                    ("a", json!(p.edge)),
                    ("R", json!(p.face_circumradius)),
                    ("H", json!(p.face_distance)),
                    ("rho", json!(p.circumradius)),
                    ("alpha1", json!(p.alpha1)),
                ],
            ))
        }
        DodecaCmd::Frame { config } => {
            let config: DodecaConfig = (*config).into();
            let f = cell_frame(&dodeca_params(config));
            let mut result = Vec::new();
            let names = ["p0", "p1", "p2", "p3", "p4"];
            let coords: Vec<(String, f64)> = names
                .iter()
                .zip([f.p0, f.p1, f.p2, f.p3, f.p4])
                .flat_map(|(n, p)| {
                    [("x", p.x), ("y", p.y), ("z", p.z)].map(|(c, v)| (format!("{n}_{c}"), v))
                })
                .collect();
            for (k, v) in &coords {
                result.push((k.as_str(), json!(v)));
            }
            result.push(("vol_T", json!(f.vol_t)));
            result.push(("vol_T_prime", json!(f.vol_t_prime)));
            result.push(("vol_big", json!(f.vol_big)));
            Ok(ReportDocument::scalar(ReportMeta::new(0, config.name()), result))
        }
        DodecaCmd::Volume {
            method,
            config,
            n,
            m,
            tries,
            probes,
            seed,
        } => {
            if *tries == 0 {
                return Err(usage("--tries must be at least 1"));
            }
            if *probes == 0 {
                return Err(usage("--probes must be at least 1"));
            }
            let (param_name, grid): (&str, Vec<u64>) = match method {
                MethodArg::Gnp => {
                    if !m.is_empty() {
                        return Err(usage("--m applies to --method hull"));
                    }
                    let grid = if n.is_empty() {
                        GNP_GRID.iter().map(|&v| v as u64).collect()
                    } else {
                        n.clone()
                    };
                    if grid.iter().any(|&v| v < 1000) {
                        return Err(usage("--n must be at least 1000 for gnp"));
                    }
                    ("n", grid)
                }
                MethodArg::Hull => {
                    if !n.is_empty() {
                        return Err(usage("--n does not apply to --method hull"));
                    }
                    let grid = if m.is_empty() {
                        HULL_GRID.iter().map(|&v| v as u64).collect()
                    } else {
                        m.clone()
                    };
                    if grid.contains(&0) {
                        return Err(usage("--m must be at least 1"));
                    }
                    ("m", grid)
                }
                MethodArg::Rejection => {
                    if !m.is_empty() {
                        return Err(usage("--m applies to --method hull"));
                    }
                    let grid = if n.is_empty() { vec![REJECTION_N] } else { n.clone() };
                    if grid.contains(&0) {
                        return Err(usage("--n must be at least 1"));
                    }
                    ("n", grid)
                }
            };
            let usize_of = |v: u64| usize::try_from(v).map_err(|_| usage(format!("{v} too large")));
            let seed = resolve_seed(*seed, err);
            let config: DodecaConfig = (*config).into();
            let frame = cell_frame(&dodeca_params(config));
            let mut rows = Vec::with_capacity(grid.len());
            for &value in &grid {
                let estimator = match method {
                    MethodArg::Gnp => Estimator::Gnp(GnPConfig::with_probes(usize_of(value)?, *probes)?),
                    MethodArg::Hull => Estimator::Hull(HullPatchConfig::new(usize_of(value)?)?),
                    MethodArg::Rejection => Estimator::Rejection { n: value },
                };
                let stats = run_trials(&estimator, &frame, *tries, seed)?;
                rows.push(TrialRow::from_stats(value as f64, &stats));
            }
            Ok(ReportDocument::trials(
                ReportMeta::new(seed, config.name()),
                param_name,
                rows,
            ))
        }
        DodecaCmd::Delta {
            config,
            vol_s,
            n,
            seed,
        } => {
            let config: DodecaConfig = (*config).into();
            let params = dodeca_params(config);
            let frame = cell_frame(&params);
            let (vol, se, seed) = match vol_s {
                Some(v) => {
                    if !(v.is_finite() && *v >= 0.0 && *v <= frame.vol_t) {
                        return Err(usage(format!("--vol-s must lie in [0, {}]", frame.vol_t)));
                    }
                    (*v, 0.0, seed.unwrap_or(0))
                }
                None => {
                    if *n == 0 {
                        return Err(usage("--n must be at least 1"));
                    }
                    let seed = resolve_seed(*seed, err);
                    let r = rejection_volume(&frame, *n, &mut RandomStream::new(seed, 0))?;
                    (r.estimate, r.std_error, seed)
                }
            };
            let d = delta3_dc(&params, vol)?;
            Ok(ReportDocument::scalar(
                ReportMeta::new(seed, config.name()),
                vec![
                    ("vol_S", json!(vol)),
                    ("vol_S_std_error", json!(se)),
                    ("vol_T", json!(frame.vol_t)),
                    ("alpha1", json!(params.alpha1)),
                    ("alpha2", json!(d.alpha2)),
                    ("delta", json!(d.delta)),
                ],
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("planar"));
    }

    #[test]
    fn missing_subcommand_is_usage_error() {
        assert_eq!(run(&[]).0, 1);
        assert_eq!(run(&["dodeca"]).0, 1);
    }

    #[test]
    fn numerical_errors_exit_two() {
        let mut err = Vec::new();
        assert_eq!(report_failure(&Failure::from(Error::ProbeTooSmall), &mut err), 2);
        assert!(String::from_utf8(err).unwrap().contains("probe radius too small"));
        assert_eq!(report_failure(&usage("bad"), &mut Vec::new()), 1);
    }

    #[test]
    fn seed_banner_on_stderr_only() {
        let (code, out, err) = run(&["planar", "density", "--n", "1000", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(err.contains("seed 0"));
        assert!(!out.contains("seed"));
    }
}
