//! `mifr`: batch front end for the modulation-induced Feshbach resonance toolkit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mifr::atomdata::{load_species, AtomSpecies};

use commands::energy_map::EnergyMapArgs;
use commands::fit::FitArgs;
use commands::floquet::{GapArgs, ResonanceArgs};
use commands::light::BeamArgs;
use commands::scan::ScanArgs;
use commands::scattering::{DressedArgs, LengthArgs};
use config::RunConfig;
use error::{CliError, CliResult, Kind};
use output::{write_json, write_table, Format};

/// Environment variable naming the default species file.
const SPECIES_ENV: &str = "MIFR_SPECIES";

#[derive(Parser)]
#[command(name = "mifr", version, about = "Modulation-induced Feshbach resonance calculator", long_about = None)]
#[command(after_help = "Exit status: 0 ok, 2 usage or invalid input, 3 outside the model's domain, \
4 no numerical convergence, 5 ambiguous peak labels (rows still written).")]
struct Cli {
    /// TOML run configuration; one table per subcommand, flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Species data file [default: $MIFR_SPECIES, then built-in cesium].
    #[arg(long, global = true)]
    species: Option<PathBuf>,
    /// Output file, `-` for stdout [default: stdout]. `scan` writes `<path>.csv` and `<path>.json`.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Table format [default: csv].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fictitious magnetic field of a circularly polarized beam, in mG.
    FictitiousField(BeamArgs),
    /// Photon scattering rate of |F, m_F⟩, in Hz.
    ScatteringRate(BeamArgs),
    /// Recoil heating rate of |F, m_F⟩, in nK/ms.
    HeatingRate(BeamArgs),
    /// Modulation frequencies of the first resonance orders of a state.
    Resonances(ResonanceArgs),
    /// Floquet avoided-crossing gap against the Bessel-weighted coupling.
    FloquetGap(GapArgs),
    /// Two-channel resonant scattering length over a frequency grid.
    ScatteringLength(LengthArgs),
    /// Real and imaginary scattering length of the dressed model.
    Dressed(DressedArgs),
    /// Synthetic loss spectrum.
    Scan(Box<ScanArgs>),
    /// Fano, Landau–Zener or linear-shift fit, reported as JSON.
    Fit(FitArgs),
    /// Labelled energy map from a directory of frequency scans.
    EnergyMap(EnergyMapArgs),
}

const SECTIONS: [&str; 10] = [
    "fictitious-field",
    "scattering-rate",
    "heating-rate",
    "resonances",
    "floquet-gap",
    "scattering-length",
    "dressed",
    "scan",
    "fit",
    "energy-map",
];

fn species(cli_path: Option<PathBuf>, config: &RunConfig) -> CliResult<AtomSpecies> {
    let path = cli_path
        .or_else(|| config.species.clone())
        .or_else(|| std::env::var_os(SPECIES_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    Ok(load_species(path.as_deref())?)
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    config.check_sections(&SECTIONS)?;
    let output = cli.output.or_else(|| config.output.clone());
    let out = output.as_deref().filter(|p| p.as_os_str() != "-");
    let format = cli.format.or(config.format).unwrap_or(Format::Csv);
    match cli.command {
        Command::FictitiousField(a) => {
            let a = config.resolve("fictitious-field", &a)?;
            let rows = commands::light::fictitious(a, &species(cli.species, &config)?)?;
            write_table("fictitious-field", &rows, format, out)
        }
        Command::ScatteringRate(a) => {
            let a = config.resolve("scattering-rate", &a)?;
            let rows = commands::light::rate(a, &species(cli.species, &config)?, false)?;
            write_table("scattering-rate", &rows, format, out)
        }
        Command::HeatingRate(a) => {
            let a = config.resolve("heating-rate", &a)?;
            let rows = commands::light::rate(a, &species(cli.species, &config)?, true)?;
            write_table("heating-rate", &rows, format, out)
        }
        Command::Resonances(a) => {
            let rows = commands::floquet::resonances(config.resolve("resonances", &a)?)?;
            write_table("resonances", &rows, format, out)
        }
        Command::FloquetGap(a) => {
            let rows = commands::floquet::gap(config.resolve("floquet-gap", &a)?)?;
            write_table("floquet-gap", &rows, format, out)
        }
        Command::ScatteringLength(a) => {
            let rows = commands::scattering::length(config.resolve("scattering-length", &a)?)?;
            write_table("scattering-length", &rows, format, out)
        }
        Command::Dressed(a) => {
            let rows = commands::scattering::dressed(config.resolve("dressed", &a)?)?;
            write_table("dressed", &rows, format, out)
        }
        Command::Scan(a) => {
            let mut a: ScanArgs = config.resolve("scan", &*a)?;
            a.seed = a.seed.or(config.seed);
            let spec = commands::scan::run(a)?;
            commands::scan::write(&spec, out, format)
        }
        Command::Fit(a) => {
            let (report, converged) = commands::fit::run(config.resolve("fit", &a)?)?;
            write_json(&report, out)?;
            if converged {
                Ok(())
            } else {
                Err(CliError {
                    kind: Kind::NotConverged,
                    message: "fit did not converge; last iterate reported".into(),
                })
            }
        }
        Command::EnergyMap(a) => {
            let (rows, ambiguous) = commands::energy_map::run(config.resolve("energy-map", &a)?)?;
            write_table("energy-map", &rows, format, out)?;
            if ambiguous == 0 {
                Ok(())
            } else {
                Err(CliError {
                    kind: Kind::Ambiguous,
                    message: format!("{ambiguous} peak(s) match more than one state; see the association column"),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
