use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use osp_cli::{emit_matrix, run, ConfigError, RunConfig, RunError, ALL_SUITES, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "osp", version, about = "Checks for the truncated orthosymplectic Fock representation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// TOML run configuration; the reference configuration when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    degree_cap: Option<usize>,
    #[arg(long)]
    m_f: Option<usize>,
    #[arg(long)]
    m_b: Option<usize>,
    /// Output directory; `OSP_OUTPUT_DIR` takes precedence over the file but
    /// not over this flag.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected suites and write reports.
    Run {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated suite names, replacing the config's selection.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
    },
    /// Write the sparse-triplet matrix of one named generator.
    EmitMatrix {
        #[command(flatten)]
        overrides: Overrides,
        /// Generator name, e.g. `central`, `number` or `odd_lin_re_b1f1`.
        #[arg(long, short)]
        generator: String,
        /// Target file; defaults to `<output>/matrices/<generator>.triplets`.
        /// `-` writes to standard output.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// List the available suites.
    ListSuites,
}

fn load(o: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut config = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply_env();
    if let Some(seed) = o.seed {
        config.seed = Some(seed);
    }
    if let Some(d) = o.degree_cap {
        config.truncation.degree_cap = d;
    }
    if let Some(m) = o.m_f {
        config.truncation.m_f = m;
    }
    if let Some(m) = o.m_b {
        config.truncation.m_b = m;
    }
    if let Some(dir) = &o.output {
        config.output.dir = dir.clone();
    }
    Ok(config)
}

fn fail(e: RunError) -> ExitCode {
    println!("{}", e.record());
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListSuites => {
            for s in ALL_SUITES {
                println!("{:<16}{}", s.name(), s.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run { overrides, suites } => {
            let mut config = match load(&overrides) {
                Ok(c) => c,
                Err(e) => return fail(e.into()),
            };
            if let Some(s) = suites {
                config.suites = s;
            }
            match run(&config) {
                Ok(outcome) => {
                    let s = &outcome.summary;
                    for (name, c) in &s.suites {
                        println!("{name:<16}{:>4} passed {:>4} failed", c.passed, c.failed);
                    }
                    for check in &s.failed_checks {
                        println!("FAILED {check}");
                    }
                    println!("config {}  status {}", s.config_hash, s.status);
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::EmitMatrix { overrides, generator, file } => {
            let config = match load(&overrides) {
                Ok(c) => c,
                Err(e) => return fail(e.into()),
            };
            let text = match emit_matrix(&config, &generator) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            let path = file.unwrap_or_else(|| config.output.dir.join("matrices").join(format!("{generator}.triplets")));
            if path.as_os_str() == "-" {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            let written = path
                .parent()
                .map_or(Ok(()), std::fs::create_dir_all)
                .and_then(|_| std::fs::write(&path, text.as_bytes()));
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(source) => {
                    let e = RunError::Io { path, source };
                    println!("{}", e.record());
                    ExitCode::from(EXIT_CONFIG as u8)
                }
            }
        }
    }
}
