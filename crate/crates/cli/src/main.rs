use airy_formal::Rational;
use airy_formal_cli::{run, CliError, Command, Format, JobConfig, OperatorSource, Precision};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "airy", version, about = "Formal invariants of Airy-type operators at infinity")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Reduction order (`p/q` or integer) for `canonical`; branch truncation K otherwise.
    #[arg(long, global = true)]
    order: Option<Rational>,

    /// `double` or `big:<bits>`.
    #[arg(long, global = true, default_value = "double")]
    precision: Precision,

    /// Negligibility threshold for coefficients.
    #[arg(long, global = true)]
    eps: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,

    /// Refuse bidegrees outside the m = qn + r (0 < r < n) reduction.
    #[arg(long, global = true)]
    strict: bool,

    /// JSON operator file (`{"n","m","a","b"}` or an array); may repeat.
    #[arg(long, global = true)]
    file: Vec<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Determining factors Q(z), one per class of branches.
    Factors { operators: Vec<String> },
    /// Formal monodromy exponent and eigenvalue.
    Monodromy { operators: Vec<String> },
    /// Canonical connection and the gauge steps reaching it.
    Canonical { operators: Vec<String> },
    /// Formal equivalence of two operators.
    Equiv { operators: Vec<String> },
    /// Built-in consistency battery.
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (command, texts) = match cli.command {
        Cmd::Factors { operators } => (Command::Factors, operators),
        Cmd::Monodromy { operators } => (Command::Monodromy, operators),
        Cmd::Canonical { operators } => (Command::Canonical, operators),
        Cmd::Equiv { operators } => (Command::Equiv, operators),
        Cmd::Selftest => (Command::Selftest, Vec::new()),
    };
    let mut operators: Vec<OperatorSource> = texts.into_iter().map(OperatorSource::Text).collect();
    operators.extend(cli.file.into_iter().map(OperatorSource::File));
    let cfg = JobConfig {
        command,
        operators,
        order: cli.order,
        precision: cli.precision,
        eps: cli.eps,
        format: match cli.format {
            Fmt::Json => Format::Json,
            Fmt::Text => Format::Text,
        },
        strict: cli.strict,
    };
    match run(&cfg) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::SelftestFailed(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
