use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

use tropdyn_cli::request::{
    run_analysis, run_batch, run_check_limit, run_parse, run_trop, Analysis, RequestArgs,
};
use tropdyn_cli::table::Format;
use tropdyn_cli::Outcome;

/// Exact orbit, confinement, and valuation analyses for rational maps and
/// their max-plus images.
#[derive(Parser)]
#[command(name = "tropdyn", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct MapArg {
    /// Builtin map name (autonomous, ud-autonomous, qp1[-sigmaK],
    /// udp1[-sigmaK]) or path to a map file
    #[arg(long)]
    map: String,
    /// Member of the qp1/udp1 families (0, 1, or 2)
    #[arg(long)]
    sigma: Option<u32>,
}

#[derive(Args)]
struct CommonRun {
    /// Iteration horizon
    #[arg(long)]
    steps: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Md)]
    format: FormatArg,
    /// Initial value `COORD=VALUE` (repeatable)
    #[arg(long)]
    init: Vec<String>,
    /// Parameter value `NAME=VALUE` (repeatable; source or alias name)
    #[arg(long)]
    param: Vec<String>,
    /// Value of the `A` parameter
    #[arg(long = "A")]
    big_a: Option<String>,
    /// Value of the `Q` parameter
    #[arg(long = "Q")]
    big_q: Option<String>,
    /// Initial value of the time coordinate `t`
    #[arg(long = "T0")]
    t0: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Md,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Md => Format::Md,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a map and print its canonical text form
    Parse {
        #[command(flatten)]
        map: MapArg,
    },
    /// Print the max-plus image of a rational map
    Trop {
        #[command(flatten)]
        map: MapArg,
    },
    /// Iterate a map from exact initial values
    Orbit {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        common: CommonRun,
    },
    /// Detect singularity confinement of a rational map through exact limits
    ConfineDiscrete {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        common: CommonRun,
        /// Perturbed coordinate and base point `COORD@VALUE` (`inf` allowed)
        #[arg(long)]
        perturb: Option<String>,
        /// Free coordinate carrying the samples, or `COORD=GRID` to scan a
        /// comma-separated grid for singular candidates
        #[arg(long)]
        free: Option<String>,
        /// Comma-separated sample values of the free coordinate
        #[arg(long)]
        samples: Option<String>,
    },
    /// Detect confinement of a max-plus map via jets, kink sets, or
    /// large-parameter values
    ConfineUltra {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        common: CommonRun,
        /// Perturbed coordinate and base `COORD@VALUE`; `COORD@-inf` tracks
        /// the orbit of a large negative value `-L`
        #[arg(long)]
        perturb: Option<String>,
        /// Coordinate left free: the orbit becomes piecewise-linear in it
        #[arg(long)]
        free: Option<String>,
    },
    /// Compare series valuations of an orbit against the tropical orbit
    Correspond {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        common: CommonRun,
        /// Series lift `COORD=SERIES` (repeatable)
        #[arg(long)]
        lift: Vec<String>,
        /// Truncation window depth below each leading exponent
        #[arg(long)]
        depth: Option<String>,
    },
    /// Check non-differentiability points against root and pole valuations
    Lemma3 {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        common: CommonRun,
        /// Coordinate left free (bare name)
        #[arg(long)]
        free: Option<String>,
    },
    /// Measure the deviation of scaled logarithms from the max-plus image
    CheckLimit {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        common: CommonRun,
        /// Comma-separated scale values (default 1/10,1/100,1/1000)
        #[arg(long)]
        epsilons: Option<String>,
    },
    /// Execute scenario files concurrently, output in declaration order
    Run {
        /// Scenario file paths
        #[arg(required = true)]
        scenarios: Vec<String>,
    },
}

fn build_args(map: MapArg, common: CommonRun) -> RequestArgs {
    let mut args = RequestArgs {
        map: Some(map.map),
        sigma: map.sigma,
        steps: common.steps,
        format: common.format.into(),
        init: common.init,
        param: common.param,
        t0: common.t0,
        ..Default::default()
    };
    if let Some(v) = common.big_a {
        args.param.push(format!("A={v}"));
    }
    if let Some(v) = common.big_q {
        args.param.push(format!("Q={v}"));
    }
    args
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Parse { map } => run_parse(&map.map, map.sigma),
        Cmd::Trop { map } => run_trop(&map.map, map.sigma),
        Cmd::Orbit { map, common } => run_analysis(Analysis::Orbit, &build_args(map, common)),
        Cmd::ConfineDiscrete {
            map,
            common,
            perturb,
            free,
            samples,
        } => {
            let mut args = build_args(map, common);
            args.perturb = perturb;
            args.free = free;
            args.samples = samples;
            run_analysis(Analysis::ConfineDiscrete, &args)
        }
        Cmd::ConfineUltra {
            map,
            common,
            perturb,
            free,
        } => {
            let mut args = build_args(map, common);
            args.perturb = perturb;
            args.free = free;
            run_analysis(Analysis::ConfineUltra, &args)
        }
        Cmd::Correspond {
            map,
            common,
            lift,
            depth,
        } => {
            let mut args = build_args(map, common);
            args.lift = lift;
            args.depth = depth;
            run_analysis(Analysis::Correspond, &args)
        }
        Cmd::Lemma3 { map, common, free } => {
            let mut args = build_args(map, common);
            args.free = free;
            run_analysis(Analysis::Lemma3, &args)
        }
        Cmd::CheckLimit {
            map,
            common,
            epsilons,
        } => {
            let mut args = build_args(map, common);
            args.epsilons = epsilons;
            run_check_limit(&args)
        }
        Cmd::Run { scenarios } => {
            let (out, diag, code) = run_batch(&scenarios);
            print!("{out}");
            eprint!("{diag}");
            return ExitCode::from(code as u8);
        }
    };
    match result {
        Ok(Outcome { out, diag, finding }) => {
            print!("{out}");
            eprint!("{diag}");
            ExitCode::from(u8::from(finding))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
