//! Library side of the `hyptype` command: argument types, experiment
//! runners and report rendering.

pub mod args;
pub mod commands;
pub mod counterexample;
pub mod grid;
pub mod report;

use args::{Cli, Command};
use commands::Outcome;

/// Runs one parsed command line inside a pool of `--threads` workers.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    pool.build()?.install(|| match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Audit(a) => commands::audit(a),
        Command::Delta(a) => commands::delta(a),
        Command::Dilatation(a) => commands::dilatation(a),
        Command::Counterexample(a) => commands::counterexample(a),
    })
}

/// Output path of the command, if any.
pub fn out_path(cli: &Cli) -> Option<&std::path::Path> {
    match &cli.command {
        Command::Eval(a) => a.output.out.as_deref(),
        Command::Audit(a) | Command::Delta(a) => a.output.out.as_deref(),
        Command::Dilatation(a) => a.output.out.as_deref(),
        Command::Counterexample(a) => a.output.out.as_deref(),
    }
}
