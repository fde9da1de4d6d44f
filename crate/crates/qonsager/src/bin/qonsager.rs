use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qonsager::{emit_report, export_spectrum, list_suites, run_suite, Format, RunConfig, Verdict};

#[derive(Parser)]
#[command(
    name = "qonsager",
    version,
    about = "Verify twisted open-chain identities and export spectra"
)]
struct Cli {
    /// Print the available suites and exit.
    #[arg(long)]
    list_suites: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites; exits 0 only if every check passes.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Suite to run (repeatable); replaces the config's list.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Format printed on stdout.
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Diagonalize the Hamiltonian of the configured chain and write a CSV.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &PathBuf, sites: Option<usize>, seed: Option<u64>) -> qonsager::Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(n) = sites {
        cfg.n_sites = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> qonsager::Result<u8> {
    if cli.list_suites {
        for (name, about) in list_suites() {
            println!("{name:<12} {about}");
        }
        return Ok(0);
    }
    match cli.command {
        None => Err(qonsager::Error::Config(
            "no command given (try --help)".into(),
        )),
        Some(Command::Verify {
            config,
            suites,
            sites,
            seed,
            report,
            format,
        }) => {
            let mut cfg = load(&config, sites, seed)?;
            if !suites.is_empty() {
                cfg.suites = suites;
                cfg.validate()?;
            }
            let rep = run_suite(&cfg)?;
            if let Some(path) = report {
                std::fs::write(path, emit_report(&rep, Format::Json))?;
            }
            let fmt = match format {
                OutFormat::Json => Format::Json,
                OutFormat::Text => Format::Text,
            };
            print!("{}", emit_report(&rep, fmt));
            Ok(match rep.verdict {
                Verdict::Pass => 0,
                Verdict::Fail | Verdict::NothingRun => 1,
                Verdict::Error => 2,
            })
        }
        Some(Command::Spectrum {
            config,
            out,
            sites,
            seed,
        }) => {
            let cfg = load(&config, sites, seed)?;
            let (_, sp) = export_spectrum(&cfg)?;
            let mut w = BufWriter::new(File::create(&out)?);
            sp.write_csv(&mut w)?;
            w.flush()?;
            eprintln!(
                "wrote {} eigenvalues to {}",
                sp.eigenvalues.len(),
                out.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
