use clap::Parser;
use permlab::experiments::{run, write_output, Format, Kind, NValue, RawConfig, XValue};
use permlab::{Error, Result};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact and Monte Carlo statistics of random permutations with cycle
/// weights θ_m = m^γ.
///
/// Kinds: hn-check, tv-table, sample, clt-order, closeness, fclt,
/// oracle-dump, table, constants.
#[derive(Debug, Parser)]
#[command(name = "permlab", version)]
struct Cli {
    /// Experiment kind; may instead come from --config.
    kind: Option<String>,

    /// JSON config file with the same keys as the long flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    gamma: Option<f64>,

    /// power (default), uniform, or ewens:<theta>.
    #[arg(long)]
    weights: Option<String>,

    /// An integer, a comma list, or a geometric grid a:b:mult.
    #[arg(long)]
    n: Option<String>,

    #[arg(long, conflicts_with = "b_rule")]
    b: Option<usize>,

    /// b as a function of n, e.g. floor(n^(1/4)).
    #[arg(long)]
    b_rule: Option<String>,

    #[arg(long)]
    samples: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv or json.
    #[arg(long)]
    format: Option<String>,

    /// Omit the generation timestamp so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,

    /// Worker threads (output does not depend on this).
    #[arg(long)]
    workers: Option<usize>,

    /// Comma-separated x grid for fclt (default 1,2).
    #[arg(long)]
    x: Option<String>,

    /// recursive or rejection.
    #[arg(long)]
    method: Option<String>,

    /// Samples per RNG stream.
    #[arg(long)]
    chunk_size: Option<usize>,

    /// For `table`: exact rationals up to this n.
    #[arg(long)]
    exact_upto: Option<usize>,
}

impl Cli {
    fn into_raw(self) -> Result<(Option<PathBuf>, RawConfig)> {
        let kind = self.kind.as_deref().map(str::parse::<Kind>).transpose()?;
        let format = self.format.as_deref().map(str::parse::<Format>).transpose()?;
        Ok((
            self.config,
            RawConfig {
                kind,
                gamma: self.gamma,
                weights: self.weights,
                n: self.n.map(NValue::Text),
                b: self.b,
                b_rule: self.b_rule,
                samples: self.samples,
                seed: self.seed,
                out: self.out,
                format,
                deterministic: self.deterministic.then_some(true),
                workers: self.workers,
                x: self.x.map(XValue::Text),
                method: self.method,
                chunk_size: self.chunk_size,
                exact_upto: self.exact_upto,
            },
        ))
    }
}

fn main_inner(cli: Cli) -> Result<()> {
    let (config, flags) = cli.into_raw()?;
    let raw = match config {
        Some(path) => RawConfig::from_json_file(&path)?.merge(flags),
        None => flags,
    };
    let cfg = raw.validate()?;
    let out = run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
            write_output(&out, &cfg, std::io::BufWriter::new(file))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_output(&out, &cfg, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("permlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
