//! `curvlab`: curvature, dead ends and transport on the command line.

mod commands;
mod literal;
mod output;

use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvlab::builtin::{make_free, make_s3, make_zn};
use curvlab::heisenberg::make_heisenberg;
use curvlab::houghton::make_h2;
use curvlab::lamplighter::make_wreath_cyclic;
use curvlab::verify::Tier;
use curvlab::{Mode, DEFAULT_BUDGET};

use commands::TableConfig;
use literal::GroupChoice;
use output::{Format, Sink};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] literal::ParseError),
    #[error(transparent)]
    Core(#[from] curvlab::Error),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

const GROUPS_HELP: &str = "Groups: Zn, Fn, S3, L2, Wn (Z_n wr Z), H2, Heis.

Element literals: (c1,...,cn) for Zn; L2{ -1, 0, 2 ; p=3 } and W3{ 0:1, 1:2 ; p=0 } for lamplighters, \
with builder d(m); H2{ 1:-1, -1:1 ; shift=0 } with builders g(k), h(k,m), u(l,pos|neg); Heis(A,B,C); \
S3 element names e s t st ts sts. Every group also takes generator words such as \"w: a t a t^-1\" \
or \"t^3\", and products of factors joined by '*', e.g. \"d(5)*t^1\".";

#[derive(Parser, Debug)]
#[command(name = "curvlab", version, about = "Comparison curvature, dead ends and transport curvature in finitely generated groups", after_help = GROUPS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Group name
    #[arg(long, short = 'g')]
    group: GroupChoice,
    /// Metric table horizon [default: the command's need, at least 13 for H2 and 10 for Heis]
    #[arg(long)]
    horizon: Option<u32>,
    /// Maximum number of elements a breadth-first search may visit
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Directory for cached metric tables
    #[arg(long, env = "CURVLAB_CACHE_DIR")]
    cache: Option<PathBuf>,
}

impl GroupArgs {
    fn config(&self) -> TableConfig {
        TableConfig {
            budget: self.budget,
            horizon: self.horizon,
            cache: self.cache.clone(),
        }
    }
}

#[derive(Args, Debug)]
struct FormatArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Word length of an element
    #[command(after_help = "CSV columns: group, element, length, source (formula or bfs).")]
    Length {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, short = 'e')]
        element: String,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Comparison curvature kappa_r of an element
    #[command(after_help = "CSV columns (one row per conjugator w): element, radius, mode, base_length, \
comparison_distance, kappa, conjugator, conjugate_length. Rationals are p/q.")]
    Curvature {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, short = 'e')]
        element: String,
        #[arg(long, short = 'r', default_value_t = 1)]
        radius: u32,
        #[arg(long, default_value = "sphere")]
        mode: Mode,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Dead-end report for one element, or `deadend scan` over a ball
    #[command(
        args_conflicts_with_subcommands = true,
        subcommand_negates_reqs = true,
        after_help = "CSV columns: element, length, is_dead_end, depth, witness, pocket_depth, strict_depth. \
depth is the escape distance; >N means no escape within --max-depth."
    )]
    Deadend {
        #[command(subcommand)]
        scan: Option<DeadendCommand>,
        #[command(flatten)]
        group: Option<GroupArgs>,
        #[arg(long, short = 'e', required = true)]
        element: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_depth: u32,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Backtrack elements of a dead end
    #[command(after_help = "CSV columns: dead_end, depth, element, length.")]
    Backtracks {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, short = 'e')]
        element: String,
        #[arg(long, default_value_t = 8)]
        max_depth: u32,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Heisenberg sign census over the sector
    #[command(after_help = "CSV columns (one row per sector element): a, b, c, s, case_t1 .. case_tR, predicted, kappa. \
JSON gives the summary with sign counts and band fractions.")]
    Density {
        /// Length bound of the sector
        #[arg(long, short = 'k', default_value_t = 40)]
        k: u64,
        #[arg(long, short = 'r', default_value_t = 1)]
        radius: u32,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Exact transport between the uniform measures around two points
    #[command(after_help = "CSV columns (cost matrix, one row per pair): i, j, source, target, cost.")]
    Transport {
        #[command(flatten)]
        group: GroupArgs,
        /// Target point y
        #[arg(long, short = 'e')]
        element: String,
        /// Source point x [default: identity]
        #[arg(long)]
        from: Option<String>,
        #[arg(long, short = 'r', default_value_t = 1)]
        radius: u32,
        #[arg(long, default_value = "sphere")]
        mode: Mode,
        /// Most optimal permutations listed
        #[arg(long, default_value_t = curvlab::transport::DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Which transport plans are optimal, over sampled elements
    #[command(after_help = "CSV columns: element, length, sphere_identity_optimal, sphere_optima, \
ball_identity_optimal, ball_optima, ball_optima_truncated, sphere_preserving, decomposes.")]
    Probe {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, short = 'r', default_value_t = 1)]
        radius: u32,
        /// Elements are drawn from this ball
        #[arg(long, default_value_t = 3)]
        sample_radius: u32,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cap: usize,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Run the acceptance criteria
    #[command(after_help = "CSV columns: id, name, passed, detail. Exit status 2 when a criterion fails.")]
    Verify {
        #[arg(long, default_value = "fast")]
        tier: Tier,
        /// Run one criterion only
        #[arg(long)]
        criterion: Option<u32>,
        #[command(flatten)]
        out: FormatArgs,
    },
}

#[derive(Subcommand, Debug)]
enum DeadendCommand {
    /// One JSON object per line for every dead end in the ball
    Scan {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, short = 'r')]
        radius: u32,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
        #[command(flatten)]
        out: FormatArgs,
    },
}

macro_rules! with_group {
    ($choice:expr, $g:ident => $body:expr) => {
        match $choice {
            GroupChoice::Zn(n) => {
                let $g = make_zn(n);
                $body
            }
            GroupChoice::Free(n) => {
                let $g = make_free(n);
                $body
            }
            GroupChoice::S3 => {
                let $g = make_s3();
                $body
            }
            GroupChoice::Wreath(n) => {
                let $g = make_wreath_cyclic(n);
                $body
            }
            GroupChoice::H2 => {
                let $g = make_h2();
                $body
            }
            GroupChoice::Heis => {
                let $g = make_heisenberg();
                $body
            }
        }
    };
}

enum Status {
    Done,
    Failed,
}

fn run(command: Command) -> Result<Status, CliError> {
    let stdout = io::stdout();
    let out = BufWriter::new(stdout.lock());
    let status = match command {
        Command::Length { group, element, out: f } => {
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::length(&g, &group.config(), &element, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Curvature {
            group,
            element,
            radius,
            mode,
            out: f,
        } => {
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::curvature(&g, &group.config(), &element, radius, mode, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Deadend {
            scan: Some(DeadendCommand::Scan {
                group,
                radius,
                max_depth,
                out: f,
            }),
            ..
        } => {
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::deadend_scan(&g, &group.config(), radius, max_depth, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Deadend {
            scan: None,
            group,
            element,
            max_depth,
            out: f,
        } => {
            let (Some(group), Some(element)) = (group, element) else {
                unreachable!("clap requires --group and --element without a subcommand");
            };
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::deadend(&g, &group.config(), &element, max_depth, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Backtracks {
            group,
            element,
            max_depth,
            out: f,
        } => {
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::backtracks(&g, &group.config(), &element, max_depth, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Density { k, radius, out: f } => {
            let mut sink = Sink::new(out, f.format);
            commands::density(k, radius, &mut sink)?;
            sink.flush()?;
            Status::Done
        }
        Command::Transport {
            group,
            element,
            from,
            radius,
            mode,
            cap,
            out: f,
        } => {
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::transport(&g, &group.config(), from.as_deref(), &element, radius, mode, cap, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Probe {
            group,
            radius,
            sample_radius,
            samples,
            seed,
            cap,
            out: f,
        } => {
            let mut sink = Sink::new(out, f.format);
            with_group!(group.group, g => commands::probe(&g, &group.config(), radius, sample_radius, samples, seed, cap, &mut sink))?;
            sink.flush()?;
            Status::Done
        }
        Command::Verify { tier, criterion, out: f } => {
            let mut sink = Sink::new(out, f.format);
            let passed = commands::verify(tier, criterion, &mut sink)?;
            sink.flush()?;
            if passed {
                Status::Done
            } else {
                Status::Failed
            }
        }
    };
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
