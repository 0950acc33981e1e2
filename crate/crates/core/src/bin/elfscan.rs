use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use elfscan::field::{PowerSource, Side};
use elfscan::hazard::{IcnirpUnit, SafetyStandard};
use elfscan::io::{format_models, read_grid, read_models, write_survey, ModelSet};
use elfscan::kmedians::InitStrategy;
use elfscan::pipeline::{analyze, write_report, RunConfig, DEFAULT_FREQUENCY_HZ, DEFAULT_K, DEFAULT_RESTARTS};
use elfscan::plot::render_plots;
use elfscan::sim::{fixtures, synthesize_survey, GridSpec};
use elfscan::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "elfscan", version, about = "Cluster laptop ELF magnetic-field surveys into hazard classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a survey and write the JSON report (stdout unless --out is given).
    Analyze(AnalyzeArgs),
    /// Simulate a survey CSV from wire models.
    Generate(GenerateArgs),
    /// Write the built-in 13-laptop wire-model fixture.
    Fixture {
        /// Wire-model file to write.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Survey CSV; repeat to merge several files.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Number of clusters per cell.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// fixed:<µT>, icnirp-public, icnirp-occupational or tco2.
    #[arg(long, default_value = "fixed:0.3")]
    standard: String,
    /// Field frequency for the ICNIRP standards, Hz.
    #[arg(long, default_value_t = DEFAULT_FREQUENCY_HZ)]
    frequency: f64,
    /// Unit the ICNIRP 5/f and 25/f levels are expressed in.
    #[arg(long, value_enum, default_value_t = UnitArg::Mt)]
    icnirp_unit: UnitArg,
    /// Seeds the first run randomly instead of quantile seeding.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent clustering runs per cell; the lowest objective wins.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Directory for report.json and plots.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots; requires --out.
    #[arg(long, requires = "out")]
    plots: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Mt,
    Ut,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Top,
    Bottom,
    Both,
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// Wire-model file, as written by `elfscan fixture`.
    #[arg(long)]
    models: PathBuf,
    #[arg(long, value_enum, default_value_t = GridArg::Both)]
    grid: GridArg,
    /// Point coordinates overriding the default grid geometry.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// Gaussian noise per field component, µT.
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,
    /// Noise generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Survey CSV to write.
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    error: Error,
}

fn usage(error: Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

fn data(error: Error) -> Failure {
    Failure { code: EXIT_DATA, error }
}

fn run_analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let unit = match args.icnirp_unit {
        UnitArg::Mt => IcnirpUnit::Millitesla,
        UnitArg::Ut => IcnirpUnit::Microtesla,
    };
    let standard = SafetyStandard::parse(&args.standard, args.frequency, unit).map_err(usage)?;
    let config = RunConfig {
        inputs: args.input,
        k: args.k,
        standard,
        init: args.seed.map_or(InitStrategy::QuantileSeed, InitStrategy::SeededRandom),
        restarts: args.restarts,
        out_dir: args.out.clone(),
        plots: args.plots,
        ..RunConfig::default()
    };
    config.validate().map_err(usage)?;
    let report = analyze(&config).map_err(data)?;

    match &args.out {
        Some(dir) => {
            let path = write_report(&report, dir).map_err(data)?;
            eprintln!("wrote {}", path.display());
            if args.plots {
                let plots = render_plots(&report, dir).map_err(data)?;
                for w in &plots.warnings {
                    eprintln!("warning: {w}");
                }
                eprintln!("wrote {} plot(s)", plots.files.len());
            }
        }
        None => print!("{}", report.to_json().map_err(data)?),
    }

    for cell in &report.cells {
        for w in &cell.validation.warnings {
            eprintln!("warning: {}: {w:?}", cell.condition);
        }
        if let Some(e) = &cell.error {
            eprintln!("error: cell {} failed: {e}", cell.condition);
        }
    }
    Ok(if report.failed_cells() > 0 { EXIT_PARTIAL } else { 0 })
}

fn run_generate(args: GenerateArgs) -> Result<u8, Failure> {
    let models: ModelSet = read_models(&args.models).map_err(data)?;
    let sides: &[Side] = match args.grid {
        GridArg::Top => &[Side::TopBody],
        GridArg::Bottom => &[Side::BottomBody],
        GridArg::Both => &Side::ALL,
    };
    let grids: Vec<GridSpec> = match &args.grid_file {
        Some(path) => read_grid(path).map_err(data)?,
        None => Side::ALL.iter().map(|&s| GridSpec::default_for(s)).collect(),
    };

    let mut datasets = Vec::new();
    for &side in sides {
        let grid = grids.iter().find(|g| g.side() == side).ok_or_else(|| {
            usage(Error::InvalidInput(format!("grid file has no {} points", side.short_name())))
        })?;
        for (&power, laptops) in &models {
            datasets.push(synthesize_survey(laptops, grid, power, args.noise_sd, args.seed).map_err(data)?);
        }
    }
    datasets.sort_by_key(|d| d.condition);

    let file = std::fs::File::create(&args.out).map_err(|e| data(Error::io(&args.out, e)))?;
    write_survey(std::io::BufWriter::new(file), &datasets).map_err(data)?;
    let rows: usize = datasets.iter().map(|d| d.len()).sum();
    eprintln!("wrote {rows} rows in {} cell(s) to {}", datasets.len(), args.out.display());
    Ok(0)
}

fn run_fixture(out: PathBuf) -> Result<u8, Failure> {
    let models: ModelSet = PowerSource::ALL
        .iter()
        .map(|&p| (p, fixtures::fixture_laptops(p)))
        .collect();
    std::fs::write(&out, format_models(&models)).map_err(|e| data(Error::io(&out, e)))?;
    eprintln!("wrote {}", out.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Generate(args) => run_generate(args),
        Command::Fixture { out } => run_fixture(out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
