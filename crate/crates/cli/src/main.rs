use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use staircase::circle_map::{orbit, BranchPolicy, MapParams};
use staircase::election::{run, BallotProfile, Method, TieBreak};
use staircase::grid::Grid;
use staircase::invariant::{
    classify_with, empirical_measure, invariant_intervals, pushforward_measure,
};
use staircase::rotation::{plateau_sweep, rotation_number, RotationNumber, RotationOptions};
use staircase::thiele_limit::{solve_limit, write_limit_text};
use staircase::two_party::{
    predicted_pb, predicted_seats, staircase, write_staircase_csv, TwoPartyVotes,
};
use thiserror::Error;

/// Environment variable naming the directory relative `--output` paths resolve against.
const OUT_DIR_ENV: &str = "STAIRCASE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "staircase",
    version,
    about = "Contracting circle maps and sequential election methods"
)]
struct Cli {
    /// Seed for every stochastic choice (random branches, tie lotteries).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate the map and print points and symbols as CSV.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, short, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BranchArg::Lower)]
        branch: BranchArg,
    },
    /// Certified rotation number.
    Rotnum {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        rot: RotArgs,
        #[arg(long)]
        json: bool,
    },
    /// All plateaus with denominator up to `--q-max`, as CSV.
    Plateaus {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 20)]
        q_max: u64,
    },
    /// Two-party Phragmen seat share over a grid of vote shares.
    Staircase {
        /// Grid for the A-only share, `start:stop:step` or a comma list.
        #[arg(long)]
        alpha: Grid,
        #[arg(long)]
        beta: Grid,
        #[command(flatten)]
        rot: RotArgs,
    },
    /// Intervals of the n-th image of [0, 1].
    InvariantSet {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, short, default_value_t = 10)]
        n: usize,
    },
    /// Sample the invariant measure.
    Measure {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum, default_value_t = MeasureKind::Empirical)]
        kind: MeasureKind,
        #[arg(long, short, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
    },
    /// Run a sequential election on a profile file.
    Elect {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        seats: usize,
        #[arg(long, value_enum, default_value_t = TieArg::Lowest)]
        tiebreak: TieArg,
        /// Print the per-seat CSV instead of the winner string.
        #[arg(long)]
        csv: bool,
    },
    /// Predicted Phragmen share of the smaller party for votes A, B and AB.
    TwoParty {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Also print the predicted winner sequence for this many seats.
        #[arg(long)]
        seats: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Limit seat shares of Thiele's method.
    ThieleLimit {
        #[command(flatten)]
        profile: ProfileArgs,
    },
}

#[derive(Args, Debug)]
struct MapArgs {
    /// Slope, 0 < a < 1.
    #[arg(long)]
    a: f64,
    /// Offset, 0 <= b < 1.
    #[arg(long)]
    b: f64,
}

#[derive(Args, Debug)]
struct RotArgs {
    #[arg(long, default_value_t = staircase::rotation::DEFAULT_Q_MAX)]
    q_max: u64,
    #[arg(long, default_value_t = staircase::rotation::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// JSON profile with `parties` and `votes`.
    #[arg(long)]
    profile: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BranchArg {
    Lower,
    Upper,
    Random,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MeasureKind {
    Empirical,
    Pushforward,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Phragmen,
    PhragmenReduced,
    Thiele,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TieArg {
    Lowest,
    Lot,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("invalid value for {option}: {reason}")]
    Invalid {
        option: &'static str,
        reason: String,
    },
    #[error(transparent)]
    Library(#[from] staircase::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid { .. } => 2,
            _ => 1,
        }
    }
}

fn invalid(option: &'static str, reason: impl ToString) -> CliError {
    CliError::Invalid {
        option,
        reason: reason.to_string(),
    }
}

impl MapArgs {
    fn params(&self) -> Result<MapParams, CliError> {
        MapParams::new(self.a, self.b).map_err(|e| match e {
            staircase::Error::InvalidSlope(_) => invalid("--a", e),
            _ => invalid("--b", e),
        })
    }
}

impl RotArgs {
    fn options(&self) -> Result<RotationOptions, CliError> {
        if self.q_max == 0 {
            return Err(invalid("--q-max", "must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("--tol", "must lie in (0, 1)"));
        }
        Ok(RotationOptions {
            q_max: self.q_max,
            tol: self.tol,
        })
    }
}

impl ProfileArgs {
    fn load(&self) -> Result<BallotProfile, CliError> {
        let text = std::fs::read_to_string(&self.profile).map_err(|e| CliError::Io {
            path: self.profile.display().to_string(),
            source: e,
        })?;
        BallotProfile::from_json(&text).map_err(|e| invalid("--profile", e))
    }
}

fn require_positive(option: &'static str, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(invalid(option, "must be at least 1"));
    }
    Ok(())
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn describe_rotation(r: &RotationNumber) -> String {
    match r {
        RotationNumber::Rational {
            ratio,
            position,
            boundary_uncertain,
        } => {
            let flag = if *boundary_uncertain {
                ", boundary uncertain"
            } else {
                ""
            };
            format!(
                "rho = {}/{} (rational, q={}, {position:?}{flag})",
                ratio.p, ratio.q, ratio.q
            )
        }
        RotationNumber::Enclosure {
            enclosure,
            ambiguous,
        } => {
            let flag = if *ambiguous { ", ambiguous" } else { "" };
            format!(
                "rho in [{}, {}] (irrational regime{flag})",
                f(enclosure.lo),
                f(enclosure.hi)
            )
        }
    }
}

fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn header(cli: &Cli) -> String {
    format!(
        "# staircase {} seed={} command={:?}",
        env!("CARGO_PKG_VERSION"),
        cli.seed,
        cli.command
    )
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io {
        path: "output".into(),
        source: e,
    };
    match &cli.command {
        Command::Orbit { map, x0, n, branch } => {
            let p = map.params()?;
            if !(0.0..=1.0).contains(x0) {
                return Err(invalid("--x0", "must lie in [0, 1]"));
            }
            require_positive("--n", *n)?;
            let policy = match branch {
                BranchArg::Lower => BranchPolicy::AlwaysLower,
                BranchArg::Upper => BranchPolicy::AlwaysUpper,
                BranchArg::Random => BranchPolicy::SeededRandom(cli.seed),
            };
            let o = orbit(&p, *x0, *n, policy)?;
            writeln!(out, "i,x,symbol").map_err(io_err)?;
            for (i, x) in o.points.iter().enumerate() {
                let e = o.symbols.get(i).map(|e| e.to_string()).unwrap_or_default();
                writeln!(out, "{i},{},{e}", f(*x)).map_err(io_err)?;
            }
        }
        Command::Rotnum { map, rot, json } => {
            let r = rotation_number(&map.params()?, rot.options()?)?;
            if *json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&r).expect("serializable")
                )
                .map_err(io_err)?;
            } else {
                writeln!(out, "{}", describe_rotation(&r)).map_err(io_err)?;
            }
        }
        Command::Plateaus { a, q_max } => {
            if *q_max == 0 {
                return Err(invalid("--q-max", "must be at least 1"));
            }
            let s = plateau_sweep(*a, *q_max).map_err(|e| invalid("--a", e))?;
            writeln!(out, "p,q,lower,upper,length").map_err(io_err)?;
            for pl in &s.plateaus {
                let (p, q) = (pl.ratio.p, pl.ratio.q);
                writeln!(
                    out,
                    "{p},{q},{},{},{}",
                    f(pl.lower.mid()),
                    f(pl.upper.mid()),
                    f(pl.length)
                )
                .map_err(io_err)?;
            }
            eprintln!(
                "# total_length={} tail_bound={}",
                f(s.total_length),
                f(s.tail_bound)
            );
        }
        Command::Staircase { alpha, beta, rot } => {
            let rows = staircase(alpha.values(), beta.values(), rot.options()?)?;
            write_staircase_csv(&rows, out).map_err(io_err)?;
        }
        Command::InvariantSet { map, n } => {
            let p = map.params()?;
            require_positive("--n", *n)?;
            let u = invariant_intervals(&p, *n)?;
            let c = classify_with(&p, RotationOptions::default())?;
            eprintln!("# class={:?} ambiguous={}", c.class, c.ambiguous);
            writeln!(out, "left,right").map_err(io_err)?;
            for (l, r) in &u.intervals {
                writeln!(out, "{},{}", f(*l), f(*r)).map_err(io_err)?;
            }
        }
        Command::Measure { map, kind, n, x0 } => {
            let p = map.params()?;
            require_positive("--n", *n)?;
            if !(0.0..=1.0).contains(x0) {
                return Err(invalid("--x0", "must lie in [0, 1]"));
            }
            let sample = match kind {
                MeasureKind::Empirical => {
                    empirical_measure(&p, *x0, *n, BranchPolicy::AlwaysLower)?
                }
                MeasureKind::Pushforward => {
                    let rot = rotation_number(&p, RotationOptions::default())?;
                    pushforward_measure(&p, &rot, *n, 1e-15).map_err(|e| invalid("--kind", e))?
                }
            };
            sample.write_csv(&p, out).map_err(io_err)?;
        }
        Command::Elect {
            method,
            profile,
            seats,
            tiebreak,
            csv,
        } => {
            let v = profile.load()?;
            require_positive("--seats", *seats)?;
            let method = match method {
                MethodArg::Phragmen => Method::PhragmenPower,
                MethodArg::PhragmenReduced => Method::PhragmenReduced,
                MethodArg::Thiele => Method::Thiele,
            };
            let tb = match tiebreak {
                TieArg::Lowest => TieBreak::LowestIndex,
                TieArg::Lot => TieBreak::SeededLot(cli.seed),
            };
            let s = run(method, &v, *seats, tb)?;
            if *csv {
                s.write_csv(out).map_err(io_err)?;
            } else {
                writeln!(out, "winners: {}", s.winner_string()).map_err(io_err)?;
                let counts: Vec<String> = s.counts(*seats).iter().map(|c| c.to_string()).collect();
                writeln!(out, "counts: {}", counts.join(" ")).map_err(io_err)?;
                writeln!(out, "ties: {}", s.tie_flags.iter().filter(|&&t| t).count())
                    .map_err(io_err)?;
            }
        }
        Command::TwoParty {
            alpha,
            beta,
            seats,
            json,
        } => {
            let v =
                TwoPartyVotes::from_ab(*alpha, *beta).map_err(|e| invalid("--alpha/--beta", e))?;
            let p = predicted_pb(&v)?;
            let winners = match seats {
                Some(n) => {
                    require_positive("--seats", *n)?;
                    Some(predicted_seats(&v, *n, BranchPolicy::AlwaysLower)?.winner_string())
                }
                None => None,
            };
            if *json {
                let mut doc = serde_json::to_value(p).expect("serializable");
                if let Some(w) = &winners {
                    doc["winners"] = serde_json::Value::from(w.as_str());
                }
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                )
                .map_err(io_err)?;
            } else {
                writeln!(out, "pB in [{}, {}] ({:?})", f(p.pb.lo), f(p.pb.hi), p.case)
                    .map_err(io_err)?;
                if let Some(r) = p.pb_ratio {
                    writeln!(out, "pB = {}/{}", r.p, r.q).map_err(io_err)?;
                }
                if let Some(r) = &p.rho {
                    writeln!(out, "{}", describe_rotation(r)).map_err(io_err)?;
                }
                if let Some(w) = &winners {
                    writeln!(out, "winners: {w}").map_err(io_err)?;
                }
            }
        }
        Command::ThieleLimit { profile } => {
            let v = profile.load()?;
            let r = solve_limit(&v)?;
            write_limit_text(&r, v.parties(), out).map_err(io_err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: invalid value for --jobs: must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .expect("thread pool is configured once");
    }
    eprintln!("{}", header(&cli));
    let result = match &cli.output {
        Some(path) => {
            let path = output_path(path);
            match File::create(&path) {
                Ok(file) => {
                    let mut w = BufWriter::new(file);
                    execute(&cli, &mut w).and_then(|()| {
                        w.flush().map_err(|e| CliError::Io {
                            path: path.display().to_string(),
                            source: e,
                        })
                    })
                }
                Err(e) => Err(CliError::Io {
                    path: path.display().to_string(),
                    source: e,
                }),
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            execute(&cli, &mut w).and_then(|()| {
                w.flush().map_err(|e| CliError::Io {
                    path: "stdout".into(),
                    source: e,
                })
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
