use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use monotrack_cli::commands::{self, load_plant};
use monotrack_cli::{Order, Outcome, Result};

/// Monotonic tracking analysis and controller synthesis for SISO LTI plants.
#[derive(Parser)]
#[command(name = "monotrack", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OrderArgs {
    /// Number of closed-loop poles.
    #[arg(long)]
    n: Option<usize>,
    /// Controller order; n = nc + plant order.
    #[arg(long)]
    nc: Option<usize>,
}

impl OrderArgs {
    fn order(&self) -> Order {
        match (self.n, self.nc) {
            (Some(n), _) => Order::N(n),
            (None, Some(nc)) => Order::Nc(nc),
            (None, None) => unreachable!("clap requires one of --n, --nc"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a monotone loop of the given order exists.
    Feasible {
        plant: PathBuf,
        #[command(flatten)]
        order: OrderArgs,
        /// Require every closed-loop pole left of -alpha.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Smallest closed-loop and controller order.
    MinOrder { plant: PathBuf },
    /// Fastest achievable decay rate at the given order.
    Decay {
        plant: PathBuf,
        #[command(flatten)]
        order: OrderArgs,
    },
    /// Synthesize a controller of order nc.
    Synth {
        plant: PathBuf,
        #[arg(long)]
        nc: usize,
        #[arg(long)]
        alpha: Option<f64>,
        /// Controller file to write when every check passes.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the closed-loop step response.
    Respond {
        plant: PathBuf,
        controller: PathBuf,
        #[arg(long)]
        tend: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Write the `t,y` trace here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Feasible {
            plant,
            order,
            alpha,
        } => commands::feasible(&load_plant(plant)?, order.order(), *alpha),
        Cmd::MinOrder { plant } => commands::min_order_cmd(&load_plant(plant)?),
        Cmd::Decay { plant, order } => commands::decay(&load_plant(plant)?, order.order()),
        Cmd::Synth {
            plant,
            nc,
            alpha,
            out,
        } => commands::synth(&load_plant(plant)?, *nc, *alpha, out.as_deref()),
        Cmd::Respond {
            plant,
            controller,
            tend,
            dt,
            csv,
        } => commands::respond(&load_plant(plant)?, controller, *tend, *dt, csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.cmd) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.report.render().as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
