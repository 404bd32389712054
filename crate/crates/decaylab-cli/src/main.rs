//! `decaylab` — batch front-end for the decay-rate laboratory.
//!
//! Subcommands: `gen-data`, `run`, `oracle`, `analyze`, `report`, `campaign`.
//! Exit codes: 0 when no run aborted and every check passed or was
//! premises-unmet; 1 on a check failure or aborted run; 2 on configuration
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use decaylab::analysis::{BoxInfo, TimeSeries};
use decaylab::heat_oracle::{evolve_curve, log_spaced_times, radialize, synthetic_radial_spectrum};
use decaylab::initial_data::{estimate_decay_character, make_decay_character_data, DecaySpec};
use decaylab::models::{RunRecord, RunStatus, SampleRow};
use decaylab::spectral::{read_snapshot, write_snapshot, GridSpec};

use decaylab_cli::campaign::{
    analyze_record, run_campaign, write_json, write_oracle_csv, CampaignReport, RunReportEntry,
    SummaryRow,
};
use decaylab_cli::config::{AnalysisPolicy, CampaignConfig, RunConfig, SCHEMA_VERSION};
use decaylab_cli::plot;

#[derive(Parser)]
#[command(name = "decaylab", version, about = "Sobolev-norm decay laboratory for dissipative PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate initial data with a prescribed decay character.
    GenData(GenDataArgs),
    /// Execute a single simulation run from a JSON config.
    Run(RunArgs),
    /// Evolve the linear diffusion oracle and emit squared-seminorm curves.
    Oracle(OracleArgs),
    /// Fit exponents and evaluate checks for an existing record or oracle CSV.
    Analyze(AnalyzeArgs),
    /// Reassemble the campaign report and plots from an output directory.
    Report(ReportArgs),
    /// Execute a whole campaign of runs.
    Campaign(CampaignArgs),
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, short = 'n')]
    points: usize,
    #[arg(long, short = 'l')]
    length: f64,
    #[arg(long)]
    r_star: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Spectrum support bound in physical wavenumber units.
    #[arg(long)]
    cutoff: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = false)]
    divergence_free: bool,
    /// Component count; defaults to dim for divergence-free data, else 1.
    #[arg(long)]
    components: Option<usize>,
    /// Output snapshot path; a JSON sidecar lands next to it.
    #[arg(long)]
    out: PathBuf,
    /// Also report the estimated decay character of the generated field.
    #[arg(long, default_value_t = false)]
    verify: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Single-run JSON config (same schema as one campaign entry).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, conflicts_with = "field")]
    r_star: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    cutoff: f64,
    /// Radialize this snapshot instead of using a synthetic density.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    /// Highest seminorm order m̂.
    #[arg(long, default_value_t = 3)]
    orders: u32,
    #[arg(long, default_value_t = 1e2)]
    t_first: f64,
    #[arg(long, default_value_t = 1e4)]
    t_last: f64,
    #[arg(long, default_value_t = 30)]
    samples: usize,
    /// Output CSV path (t, squared seminorms ascending m).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// record.json of a simulation or oracle run.
    #[arg(long, conflicts_with = "oracle_csv")]
    record: Option<PathBuf>,
    /// Oracle CSV (t, u_norm_sq_m columns).
    #[arg(long)]
    oracle_csv: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["T0", "T1"])]
    window: Option<Vec<f64>>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Campaign output directory holding <run>/record.json trees.
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the config's global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's exponent tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenData(args) => gen_data(args).map(|_| true),
        Command::Run(args) => run_single(args),
        Command::Oracle(args) => oracle(args).map(|_| true),
        Command::Analyze(args) => analyze(args),
        Command::Report(args) => report(args),
        Command::Campaign(args) => campaign(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn gen_data(args: GenDataArgs) -> Result<()> {
    let grid = GridSpec::new(args.dim, args.points, args.length)?;
    let spec = DecaySpec {
        r_star: args.r_star,
        amplitude: args.amplitude,
        cutoff_radius: args.cutoff,
        randomize_phases: true,
        seed: args.seed,
    };
    let components = args
        .components
        .unwrap_or(if args.divergence_free { args.dim } else { 1 });
    let field = make_decay_character_data(&grid, &spec, components, args.divergence_free)?;

    let file = std::fs::File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    write_snapshot(&field, std::io::BufWriter::new(file))?;
    let sidecar = args.out.with_extension(format!(
        "{}json",
        args.out
            .extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    write_json(
        &sidecar,
        &serde_json::json!({
            "decay_spec": spec,
            "grid": grid,
            "components": components,
            "divergence_free": args.divergence_free,
        }),
    )?;
    println!("wrote {} (+ sidecar {})", args.out.display(), sidecar.display());

    if args.verify {
        let dk = grid.wavenumber_step();
        // prefer deep shells, fall back to whatever the grid resolves
        let window = if spec.cutoff_radius / 4.0 > 9.0 * dk {
            [4.0 * dk, spec.cutoff_radius / 4.0]
        } else {
            [dk, spec.cutoff_radius]
        };
        match estimate_decay_character(&field, window) {
            Ok(estimate) => println!(
                "decay character estimate: {:?} (window [{:.4}, {:.4}])",
                estimate.r_star_hat, window[0], window[1]
            ),
            Err(e) => println!("decay character not estimable on this grid: {e}"),
        }
    }
    Ok(())
}

fn run_single(args: RunArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut run: RunConfig =
        serde_json::from_str(&text).with_context(|| "parsing single-run config")?;
    if let Some(seed) = args.seed {
        run.seed = Some(seed);
    }
    let config = CampaignConfig {
        schema_version: SCHEMA_VERSION,
        global_seed: None,
        jobs: Some(1),
        analysis: AnalysisPolicy {
            tolerance: args.tolerance,
            ..Default::default()
        },
        runs: vec![run],
    };
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    config.validate(&base)?;
    let report = run_campaign(&config, &base, &args.out, 1)?;
    print_summary(&report.summary);
    Ok(report.all_green())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let spectrum = match (&args.field, args.r_star) {
        (Some(path), _) => {
            let file = std::fs::File::open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            radialize(&read_snapshot(std::io::BufReader::new(file))?)?
        }
        (None, Some(r_star)) => {
            synthetic_radial_spectrum(2, r_star, args.amplitude, args.cutoff, 512)?
        }
        (None, None) => bail!("either --r-star or --field is required"),
    };
    let times = log_spaced_times(args.t_first, args.t_last, args.samples);
    let curves = (0..=args.orders)
        .map(|m| evolve_curve(&spectrum, m, args.nu, &times))
        .collect::<decaylab::Result<Vec<_>>>()?;
    write_oracle_csv(&args.out, &curves)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<bool> {
    let (record, box_info) = match (&args.record, &args.oracle_csv) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let record: RunRecord = serde_json::from_str(&text)?;
            let box_info = box_info_from_echo(&record.config);
            (record, box_info)
        }
        (None, Some(path)) => (oracle_csv_to_record(path)?, None),
        (None, None) => bail!("either --record or --oracle-csv is required"),
    };

    let policy = AnalysisPolicy {
        fit_window: args.window.as_ref().map(|w| [w[0], w[1]]),
        ..Default::default()
    };
    let tolerance = args.tolerance.unwrap_or(if box_info.is_some() {
        decaylab::analysis::RUN_TOLERANCE
    } else {
        decaylab::analysis::ORACLE_TOLERANCE
    });

    std::fs::create_dir_all(&args.out)?;
    let mut entry = analyze_record(&record, &policy, tolerance, box_info);
    entry.name = args
        .record
        .as_deref()
        .or(args.oracle_csv.as_deref())
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "analysis".into());
    write_json(&args.out.join("analysis.json"), &entry)?;

    // plots read <out>/<name>/record.json
    std::fs::create_dir_all(args.out.join(&entry.name))?;
    write_json(&args.out.join(&entry.name).join("record.json"), &record)?;
    let report = single_entry_report(entry);
    plot::emit_plots(&report, &args.out)?;
    print_summary(&report.summary);
    Ok(report.all_green())
}

fn report(args: ReportArgs) -> Result<bool> {
    let mut entries: Vec<RunReportEntry> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for dir_entry in std::fs::read_dir(&args.dir)? {
        let path = dir_entry?.path();
        if path.is_dir() && path.join("record.json").exists() {
            names.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    names.sort();
    if names.is_empty() {
        bail!("no <run>/record.json found under {}", args.dir.display());
    }

    for name in names {
        let path = args.dir.join(&name).join("record.json");
        let record: RunRecord = serde_json::from_str(&std::fs::read_to_string(&path)?)
            .with_context(|| format!("parsing {}", path.display()))?;
        let box_info = box_info_from_echo(&record.config);
        let tolerance = args.tolerance.unwrap_or(if box_info.is_some() {
            decaylab::analysis::RUN_TOLERANCE
        } else {
            decaylab::analysis::ORACLE_TOLERANCE
        });
        let mut entry = analyze_record(&record, &AnalysisPolicy::default(), tolerance, box_info);
        entry.name = name;
        entries.push(entry);
    }

    let summary = entries
        .iter()
        .flat_map(|entry| {
            entry.upper_checks.iter().map(|c| SummaryRow {
                run: entry.name.clone(),
                m: c.m,
                fitted_exponent: Some(c.fitted_exponent),
                predicted_exponent: Some(c.predicted_exponent),
                verdict: format!("{:?}", c.verdict).to_lowercase(),
            })
        })
        .collect();
    let report = CampaignReport {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        global_seed: None,
        runs: entries,
        summary,
    };
    write_json(&args.dir.join("campaign_report.json"), &report)?;
    plot::emit_plots(&report, &args.dir)?;
    print_summary(&report.summary);
    Ok(report.all_green())
}

fn campaign(args: CampaignArgs) -> Result<bool> {
    let mut config = CampaignConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.global_seed = Some(seed);
    }
    if let Some(tol) = args.tolerance {
        config.analysis.tolerance = Some(tol);
    }
    let jobs = args
        .jobs
        .or(config.jobs)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let report = run_campaign(&config, &base, &args.out, jobs)?;
    print_summary(&report.summary);
    for run in &report.runs {
        if run.status != "ok" {
            eprintln!(
                "run {} aborted: {}",
                run.name,
                run.abort_reason.as_deref().unwrap_or("unknown")
            );
        }
    }
    Ok(report.all_green())
}

fn single_entry_report(entry: RunReportEntry) -> CampaignReport {
    let summary = entry
        .upper_checks
        .iter()
        .map(|c| SummaryRow {
            run: entry.name.clone(),
            m: c.m,
            fitted_exponent: Some(c.fitted_exponent),
            predicted_exponent: Some(c.predicted_exponent),
            verdict: format!("{:?}", c.verdict).to_lowercase(),
        })
        .collect();
    CampaignReport {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        global_seed: None,
        runs: vec![entry],
        summary,
    }
}

fn print_summary(summary: &[SummaryRow]) {
    println!("run,m,fitted,predicted,verdict");
    for row in summary {
        println!(
            "{},{},{},{},{}",
            row.run,
            row.m,
            row.fitted_exponent.map_or("-".into(), |v| format!("{v:.4}")),
            row.predicted_exponent.map_or("-".into(), |v| format!("{v:.4}")),
            row.verdict
        );
    }
}

fn box_info_from_echo(echo: &serde_json::Value) -> Option<BoxInfo> {
    let config = echo.get("config")?;
    let grid = config.get("grid")?;
    let box_length = grid.get("box_length")?.as_f64()?;
    let nu = config.get("nu")?.as_f64()?;
    let mu = config.get("mu").and_then(|v| v.as_f64());
    Some(BoxInfo {
        box_length,
        nu: mu.map_or(nu, |m| m.max(nu)),
    })
}

fn oracle_csv_to_record(path: &Path) -> Result<RunRecord> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow::anyhow!("empty CSV"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        bail!("oracle CSV must start with a t column followed by u_norm_sq_m columns");
    }
    let m_hat = (cols.len() - 2) as u32;

    let mut samples = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("parsing CSV line {line:?}"))?;
        if nums.len() != cols.len() {
            bail!("CSV row width {} does not match header {}", nums.len(), cols.len());
        }
        samples.push(SampleRow {
            t: nums[0],
            u_norms: nums[1..].iter().map(|v| v.sqrt()).collect(),
            b_norms: None,
            g_ratios: vec![None; m_hat as usize],
            energy_orthogonality: 0.0,
            energy_residual: 0.0,
            leray_residual: None,
            forcing_norms: None,
        });
    }
    // sanity: strictly increasing times
    TimeSeries::from_pairs(&samples.iter().map(|s| (s.t, 1.0)).collect::<Vec<_>>())?;
    Ok(RunRecord {
        model: "oracle".into(),
        m_hat,
        samples,
        warnings: vec![],
        status: RunStatus::Ok,
        config: serde_json::json!({ "model": "oracle", "source": path.display().to_string() }),
        meta: Default::default(),
    })
}
