use std::io::Write;
use std::process::ExitCode;

use berkdyn_cli::{
    cmd_branching, cmd_dendrite, cmd_entropy, cmd_masses, cmd_partition, cmd_point_image, cmd_segment_image,
    cmd_shift_gf, cmd_verify, error_outcome, read_inline, EntropyArgs, Format, Method, Outcome, Result, Session, Which,
    EXIT_ERROR,
};
use clap::{Parser, Subcommand, ValueEnum};

/// Exact dynamics of rational maps on the Berkovich projective line.
#[derive(Parser, Debug)]
#[command(name = "berkdyn", version)]
struct Cli {
    /// Session config (field, map, documents). Defaults to the bundled sextic example.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
    Dot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WhichArg {
    Measure,
    Topological,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Gf,
    Truncate,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Image of a point and the local degree there.
    PointImage {
        /// Point as inline JSON, a file path, or `-` for stdin.
        point: String,
    },
    /// Image of the segment between two points, piece by piece.
    SegmentImage { a: String, b: String },
    /// Check a connected-Julia-set certificate (exit 1 if rejected).
    Verify {
        /// Certificate document; defaults to the one named by the config.
        certificate: Option<String>,
    },
    /// Infinite-branching check at a periodic point.
    Branching {
        point: String,
        #[arg(long)]
        period: Option<u32>,
    },
    /// The Markov partition built from the map.
    Partition,
    /// Masses of the measure of maximal entropy.
    Masses {
        #[arg(long, value_name = "PATH")]
        system: Option<String>,
    },
    /// Measure-theoretic and topological entropy.
    Entropy {
        #[arg(long, value_enum, default_value_t = WhichArg::Both)]
        which: WhichArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Gf)]
        method: MethodArg,
        /// Largest truncation depth for `--method truncate`.
        #[arg(long)]
        depth: Option<u32>,
        /// Base state for the first-return series.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_name = "PATH")]
        system: Option<String>,
    },
    /// The cylinder tree of admissible words up to a depth.
    Dendrite {
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_name = "PATH")]
        system: Option<String>,
    },
    /// First-return generating function at a state.
    ShiftGf {
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_name = "PATH")]
        system: Option<String>,
    },
}

fn run(cli: Cli) -> Result<Outcome> {
    let format = match cli.format {
        Fmt::Json => Format::Json,
        Fmt::Text => Format::Text,
        Fmt::Dot => Format::Dot,
    };
    let s = Session::load(cli.config.as_deref())?;
    match cli.command {
        Command::PointImage { point } => cmd_point_image(&s, &read_inline(&point)?, format),
        Command::SegmentImage { a, b } => cmd_segment_image(&s, &read_inline(&a)?, &read_inline(&b)?, format),
        Command::Verify { certificate } => cmd_verify(&s, certificate.as_deref(), format),
        Command::Branching { point, period } => cmd_branching(&s, &read_inline(&point)?, period, format),
        Command::Partition => cmd_partition(&s, format),
        Command::Masses { system } => cmd_masses(&s, system.as_deref(), format),
        Command::Entropy { which, method, depth, state, system } => {
            let args = EntropyArgs {
                which: match which {
                    WhichArg::Measure => Which::Measure,
                    WhichArg::Topological => Which::Topological,
                    WhichArg::Both => Which::Both,
                },
                method: match method {
                    MethodArg::Gf => Method::Gf,
                    MethodArg::Truncate => Method::Truncate,
                },
                depth,
                system,
                state,
            };
            cmd_entropy(&s, &args, format)
        }
        Command::Dendrite { depth, system } => cmd_dendrite(&s, system.as_deref(), depth, format),
        Command::ShiftGf { state, system } => cmd_shift_gf(&s, system.as_deref(), state.as_deref(), format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(cli));
    let (code, out, err) = match result {
        Ok(Ok(o)) => (o.code, o.stdout, String::new()),
        Ok(Err(e)) => {
            let (code, msg) = error_outcome(&e);
            (code, String::new(), msg)
        }
        Err(_) => (EXIT_ERROR, String::new(), "berkdyn: internal error\n".into()),
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    let _ = std::io::stderr().write_all(err.as_bytes());
    ExitCode::from(code as u8)
}
