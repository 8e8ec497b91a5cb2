//! `qbath` command-line interface.
//!
//! Exit codes: 0 success, 1 runtime failure (or failing validation tests),
//! 2 validation harness error, 64 unknown subcommand or bad usage,
//! 65 bad configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qbath::dynamics::{default_sbd_config, PropagateOptions, RedfieldVariant};
use qbath::ecodesign::{reactivity_report, reference_molecules, EcoInputs, EcoNormalization, MoleculeDescriptors, DEFAULT_B_WEIGHTS};
use qbath::environment::{annual_simulation, load_site_database, site_database, AnnualConfig, SiteClimate};
use qbath::illumination::{
    exciton_mixture, load_solar_spectrum, par_fraction, pce_max, pumping_rates, resonance_report, transmitted_par_fraction,
    PVEfficiencyCurve, PumpingModel, SolarSpectrum, TransmissionProfile, DEFAULT_LINE_WIDTH_NM,
};
use qbath::io::{atomic_write, config_hash, header_comment, sha256_hex};
use qbath::metrics::{etr, metric_series, EtrConfig, MetricKind, SeriesOptions, DEFAULT_K_RC_PER_PS};
use qbath::optimizer::{optimize_pareto, reference_balanced_design, select_named_configs, DeConfig, EvalContext, Evaluator};
use qbath::validation::{run_suite_subset, ValidationConfig};
use qbath::{build_fmo_system, BathSpec, DensityMatrix, ExcitonSystem, HierarchyConfig, Method, VERSION};

/// Environment variable naming the default output directory.
const OUTPUT_ENV: &str = "QBATH_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "qbath", version, about = "Open-system exciton dynamics and spectral filter design")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $QBATH_OUTPUT_DIR or ./qbath-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Propagate the reduced density matrix.
    Simulate(SimArgs),
    /// Propagate and emit metric series.
    Metrics {
        #[command(flatten)]
        sim: SimArgs,
        /// Comma-separated metric names (default: all).
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
    },
    /// PCE/ETR Pareto search.
    Optimize {
        /// DE population per scalarization.
        #[arg(long)]
        population: Option<usize>,
        /// DE generations per scalarization.
        #[arg(long)]
        generations: Option<usize>,
        /// Minimum PCE of a feasible design.
        #[arg(long)]
        pce_min: Option<f64>,
        /// Dynamics behind the ETR response table (default redfield).
        #[arg(long)]
        method: Option<Method>,
    },
    /// Year-long soiling and climate simulation.
    Environment {
        /// Site name, or "all" for every site in the database.
        #[arg(long)]
        site: Option<String>,
    },
    /// Reactivity descriptors and eco-design scores.
    Ecodesign {
        /// JSON array of molecule descriptor records.
        #[arg(long)]
        molecules: Option<PathBuf>,
    },
    /// Run the twelve-test validation suite.
    Validate {
        /// Reduced sizes for a smoke run.
        #[arg(long)]
        quick: bool,
        /// Comma-separated test numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        tests: Vec<usize>,
    },
    /// Solar spectrum, filter and resonance summary.
    Spectrum,
}

#[derive(Args, Debug, Clone)]
struct SimArgs {
    /// heom, redfield or sbd (default heom).
    #[arg(long)]
    method: Option<Method>,
    /// Propagation horizon (fs).
    #[arg(long)]
    t_max: Option<f64>,
    /// "site:N" (0-based) or "pumped".
    #[arg(long)]
    initial: Option<String>,
}

fn d_scenario() -> String {
    "default".into()
}
fn d_t_max() -> f64 {
    1000.0
}
fn d_initial() -> String {
    "site:0".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OptimizerSettings {
    population: usize,
    generations: usize,
    pce_min: f64,
    method: Method,
    etr_t_max_fs: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { population: 20, generations: 40, pce_min: qbath::optimizer::DEFAULT_PCE_MIN, method: Method::Redfield, etr_t_max_fs: 1000.0 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EcoSettings {
    homo_reference_ev: Option<f64>,
    pce: Option<f64>,
    lca_score: Option<f64>,
    normalization: Option<EcoNormalization>,
}

/// Scenario file. Every field is optional; file references are resolved
/// relative to the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default = "d_scenario")]
    scenario: String,
    #[serde(default)]
    system: Option<ExcitonSystem>,
    #[serde(default)]
    bath: Option<BathSpec>,
    #[serde(default)]
    hierarchy: HierarchyConfig,
    #[serde(default)]
    method: Option<Method>,
    #[serde(default)]
    redfield_variant: RedfieldVariant,
    #[serde(default = "d_t_max")]
    t_max_fs: f64,
    #[serde(default = "d_initial")]
    initial_state: String,
    #[serde(default)]
    transmission: Option<TransmissionProfile>,
    #[serde(default)]
    solar_spectrum: Option<PathBuf>,
    #[serde(default)]
    pv_curve: Option<PathBuf>,
    #[serde(default)]
    site_database: Option<PathBuf>,
    #[serde(default)]
    site: Option<String>,
    #[serde(default)]
    optimizer: OptimizerSettings,
    #[serde(default)]
    metrics: Vec<MetricKind>,
    #[serde(default)]
    k_rc_per_ps: Option<f64>,
    #[serde(default)]
    molecules: Option<PathBuf>,
    #[serde(default)]
    ecodesign: EcoSettings,
    #[serde(default)]
    validation: Option<ValidationConfig>,
    #[serde(default)]
    seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config uses defaults")
    }
}

enum Failure {
    Config(String),
    Runtime(String),
    Harness(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 65,
            Failure::Runtime(_) => 1,
            Failure::Harness(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Harness(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime(e: qbath::Error) -> Failure {
    match e {
        qbath::Error::InvalidInput(m) => Failure::Config(m),
        e @ qbath::Error::Parse { .. } => Failure::Config(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

/// JSON output with the provenance header as its first field.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    header: &'a str,
    body: &'a T,
}

#[derive(Serialize)]
struct OutputEntry {
    file: String,
    sha256: String,
}

struct Outputs {
    dir: PathBuf,
    header: String,
    files: Vec<OutputEntry>,
}

impl Outputs {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        atomic_write(&path, contents.as_bytes()).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(OutputEntry { file: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(&Envelope { header: &self.header, body: value })
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }
}

struct Ctx {
    cfg: RunConfig,
    base: PathBuf,
    hash: String,
}

impl Ctx {
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn system(&self) -> ExcitonSystem {
        self.cfg.system.clone().unwrap_or_else(build_fmo_system)
    }

    fn bath(&self) -> BathSpec {
        self.cfg.bath.clone().unwrap_or_else(BathSpec::fmo_default)
    }

    fn solar(&self) -> Result<SolarSpectrum, Failure> {
        match &self.cfg.solar_spectrum {
            Some(p) => load_solar_spectrum(&self.resolve(p)).map_err(config_err),
            None => Ok(SolarSpectrum::am15g()),
        }
    }

    fn pv(&self) -> Result<PVEfficiencyCurve, Failure> {
        match &self.cfg.pv_curve {
            Some(p) => {
                let text = std::fs::read_to_string(self.resolve(p)).map_err(config_err)?;
                PVEfficiencyCurve::parse_csv(&text).map_err(config_err)
            }
            None => Ok(PVEfficiencyCurve::default_curve()),
        }
    }

    fn design(&self) -> TransmissionProfile {
        self.cfg.transmission.clone().unwrap_or_else(reference_balanced_design)
    }

    fn etr_cfg(&self, system: &ExcitonSystem, t_max: f64) -> Result<EtrConfig, Failure> {
        EtrConfig::new(self.cfg.k_rc_per_ps.unwrap_or(DEFAULT_K_RC_PER_PS), t_max, system.trap_site()).map_err(config_err)
    }
}

fn load_config(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let (mut cfg, base) = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?;
            let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            (cfg, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.hierarchy.validate().map_err(config_err)?;
    Ok((cfg, base))
}

fn initial_state(spec: &str, system: &ExcitonSystem, solar: &SolarSpectrum) -> Result<(DensityMatrix, String), Failure> {
    if spec == "pumped" {
        let pm = PumpingModel::for_system(system, DEFAULT_LINE_WIDTH_NM).map_err(config_err)?;
        let rates = pumping_rates(solar, system, &pm).map_err(runtime)?;
        return Ok((exciton_mixture(system, &rates).map_err(runtime)?, "pumped_exciton_mixture".into()));
    }
    let site = spec
        .strip_prefix("site:")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Failure::Config(format!("initial state must be 'site:N' or 'pumped', got '{spec}'")))?;
    Ok((DensityMatrix::pure_site(system.n_sites(), site).map_err(config_err)?, format!("pure_site:{site}")))
}

fn simulate(ctx: &Ctx, args: &SimArgs, out: &mut Outputs) -> Result<(qbath::Trajectory, String), Failure> {
    let system = ctx.system();
    let bath = ctx.bath();
    let method = args.method.or(ctx.cfg.method).unwrap_or(Method::Heom);
    let t_max = args.t_max.unwrap_or(ctx.cfg.t_max_fs);
    let spec = args.initial.clone().unwrap_or_else(|| ctx.cfg.initial_state.clone());
    let (rho0, label) = initial_state(&spec, &system, &ctx.solar()?)?;
    let sbd = (method == Method::Sbd).then(|| default_sbd_config(&system, &bath));
    let opts = PropagateOptions {
        redfield_variant: ctx.cfg.redfield_variant,
        seed: Some(ctx.cfg.seed),
        initial_condition: Some(label),
        ..Default::default()
    };
    let mut traj = qbath::dynamics::propagate_with(&system, &bath, &rho0, t_max, &ctx.cfg.hierarchy, method, sbd.as_ref(), &opts)
        .map_err(runtime)?;
    traj.metadata_mut().config_hash = ctx.hash.clone();
    out.write("trajectory.csv", &traj.to_csv())?;
    out.write_json("trajectory_meta.json", traj.metadata())?;
    let r = traj.invariant_report();
    let summary = format!(
        "simulate: {} frames to {} fs with {method}; max trace error {:.2e}, min eigenvalue {:.2e}",
        traj.len(),
        traj.horizon(),
        r.max_trace_error,
        r.min_eigenvalue
    );
    Ok((traj, summary))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let start = Instant::now();
    let (cfg, base) = load_config(&cli.common)?;
    let dir = cli
        .common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qbath-out"));
    let sub = format!("{:?}", cli.command);
    let hash = config_hash(&(&cfg, &sub)).map_err(runtime)?;
    let ctx = Ctx { cfg, base, hash: hash.clone() };
    let mut out = Outputs { dir, header: header_comment(&hash), files: Vec::new() };
    let header = out.header.clone();

    let (name, summary, failing) = match &cli.command {
        Command::Simulate(args) => ("simulate", simulate(&ctx, args, &mut out)?.1, false),
        Command::Metrics { sim, metrics } => {
            let kinds: Vec<MetricKind> = if !metrics.is_empty() {
                metrics.iter().map(|m| m.parse().map_err(runtime)).collect::<Result<_, _>>()?
            } else if !ctx.cfg.metrics.is_empty() {
                ctx.cfg.metrics.clone()
            } else {
                MetricKind::ALL.to_vec()
            };
            let (traj, _) = simulate(&ctx, sim, &mut out)?;
            let system = ctx.system();
            let opts = SeriesOptions { trap_site: Some(system.trap_site()), ..Default::default() };
            for k in &kinds {
                let s = metric_series(&traj, *k, &opts, &system.hamiltonian_complex()).map_err(runtime)?;
                out.write(&format!("metric_{}.csv", k.as_str()), &s.to_csv(&ctx.hash))?;
            }
            let e = etr(&traj, &ctx.etr_cfg(&system, traj.horizon())?).map_err(runtime)?;
            out.write_json("etr.json", &e)?;
            ("metrics", format!("metrics: {} series; ETR absolute {:.4}, normalized {:.4}", kinds.len(), e.absolute, e.normalized), false)
        }
        Command::Optimize { population, generations, pce_min, method } => {
            let o = &ctx.cfg.optimizer;
            let system = ctx.system();
            let mut ec = EvalContext::fmo_default();
            ec.solar = ctx.solar()?;
            ec.pv = ctx.pv()?;
            ec.pumping = PumpingModel::for_system(&system, DEFAULT_LINE_WIDTH_NM).map_err(config_err)?;
            ec.etr = ctx.etr_cfg(&system, o.etr_t_max_fs)?;
            ec.system = system.clone();
            ec.bath = ctx.bath();
            ec.hierarchy = ctx.cfg.hierarchy.clone();
            ec.method = method.unwrap_or(o.method);
            ec.redfield_variant = ctx.cfg.redfield_variant;
            ec.sbd = (ec.method == Method::Sbd).then(|| default_sbd_config(&ec.system, &ec.bath));
            ec.pce_min = pce_min.unwrap_or(o.pce_min);
            let de = DeConfig::new(population.unwrap_or(o.population), generations.unwrap_or(o.generations), ctx.cfg.seed);
            de.validate().map_err(config_err)?;
            let ev = Evaluator::new(ec).map_err(runtime)?;
            let front = optimize_pareto(&ev, &de).map_err(runtime)?;
            let named = select_named_configs(&front).map_err(runtime)?;
            out.write("front.csv", &front.to_csv(&ctx.hash))?;
            out.write_json("front.json", &front)?;
            out.write_json("named_configs.json", &named)?;
            let reference = ev.evaluate(&reference_balanced_design()).map_err(runtime)?;
            out.write_json("reference_design.json", &reference)?;
            (
                "optimize",
                format!(
                    "optimize: {} front members from {} evaluations; balanced PCE {:.4} ETR {:.4}",
                    front.members.len(),
                    front.evaluations,
                    named.balanced.objectives.pce,
                    named.balanced.objectives.etr
                ),
                false,
            )
        }
        Command::Environment { site } => {
            let db: Vec<SiteClimate> = match &ctx.cfg.site_database {
                Some(p) => load_site_database(&std::fs::read_to_string(ctx.resolve(p)).map_err(config_err)?).map_err(config_err)?,
                None => std::iter::once(SiteClimate::default_site()).chain(site_database()).collect(),
            };
            let want = site.clone().or_else(|| ctx.cfg.site.clone()).unwrap_or_else(|| "default".into());
            let sites: Vec<SiteClimate> = if want == "all" {
                db.into_iter().filter(|s| s.name != "default").collect()
            } else {
                db.into_iter().filter(|s| s.name == want).collect()
            };
            if sites.is_empty() {
                return Err(Failure::Config(format!("no site named '{want}'")));
            }
            let mut ec = EvalContext::fmo_default();
            ec.solar = ctx.solar()?;
            ec.pv = ctx.pv()?;
            ec.system = ctx.system();
            ec.bath = ctx.bath();
            ec.pumping = PumpingModel::for_system(&ec.system, DEFAULT_LINE_WIDTH_NM).map_err(config_err)?;
            ec.etr = ctx.etr_cfg(&ec.system, ctx.cfg.optimizer.etr_t_max_fs)?;
            let ev = Evaluator::new(ec).map_err(runtime)?;
            let design = ctx.design();
            let mut combined = format!("{header}\nsite,pce_degradation_pct,etr_degradation_pct");
            for m in 1..=12 {
                combined.push_str(&format!(",rel_etr_month{m:02}"));
            }
            combined.push('\n');
            let mut summaries = BTreeMap::new();
            for s in &sites {
                let ledger = annual_simulation(s, &design, &ev, &AnnualConfig::new(ctx.cfg.seed)).map_err(runtime)?;
                out.write(&format!("ledger_{}.csv", s.name), &ledger.to_csv(&ctx.hash))?;
                combined.push_str(&format!("{},{:.6},{:.6}", s.name, ledger.pce_degradation_pct, ledger.etr_degradation_pct));
                for m in 0..12u32 {
                    let (lo, hi) = (m * 365 / 12, (m + 1) * 365 / 12);
                    let v: Vec<f64> = ledger.rows.iter().filter(|r| r.day >= lo && r.day < hi).filter_map(|r| r.rel_etr).collect();
                    combined.push_str(&format!(",{:.6}", v.iter().sum::<f64>() / v.len().max(1) as f64));
                }
                combined.push('\n');
                let mut l = ledger;
                l.rows.clear();
                summaries.insert(s.name.clone(), l);
            }
            out.write("environment_summary.csv", &combined)?;
            out.write_json("environment_summary.json", &summaries)?;
            let worst = summaries.values().map(|l| l.pce_degradation_pct.max(l.etr_degradation_pct)).fold(f64::MIN, f64::max);
            ("environment", format!("environment: {} site(s); worst annual degradation {:.3}%", sites.len(), worst), false)
        }
        Command::Ecodesign { molecules } => {
            let list: Vec<MoleculeDescriptors> = match molecules.clone().or_else(|| ctx.cfg.molecules.clone()) {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(ctx.resolve(&p)).map_err(config_err)?).map_err(config_err)?,
                None => reference_molecules(),
            };
            let e = &ctx.cfg.ecodesign;
            let inputs = EcoInputs { pce: e.pce, lca_score: e.lca_score, normalization: e.normalization };
            let mut reports = Vec::new();
            let mut text = format!("{header}\n");
            let mut skipped = Vec::new();
            for m in &list {
                match reactivity_report(m, e.homo_reference_ev, DEFAULT_B_WEIGHTS, &inputs) {
                    Ok(r) => {
                        text.push_str(&r.to_table());
                        reports.push(r);
                    }
                    Err(err) => {
                        text.push_str(&format!("molecule: {}\n  skipped: {err}\n", m.name));
                        skipped.push(format!("{}: {err}", m.name));
                    }
                }
            }
            out.write("reactivity.txt", &text)?;
            out.write_json("reactivity.json", &reports)?;
            print!("{}", text.split_once('\n').map(|x| x.1).unwrap_or(""));
            ("ecodesign", format!("ecodesign: {} report(s), {} skipped", reports.len(), skipped.len()), false)
        }
        Command::Validate { quick, tests } => {
            let vc = match (&ctx.cfg.validation, quick) {
                (Some(v), false) => v.clone(),
                (_, true) => ValidationConfig::quick(),
                (None, false) => ValidationConfig::default(),
            };
            let report = run_suite_subset(&vc, tests).map_err(|e| Failure::Harness(e.to_string()))?;
            out.write_json("report.json", &report)?;
            out.write("report.txt", &format!("{header}\n{}", report.to_table()))?;
            print!("{}", report.to_table());
            ("validate", format!("validate: {}/{} passed", report.passed, report.total), !report.all_pass)
        }
        Command::Spectrum => {
            let solar = ctx.solar()?;
            let pv = ctx.pv()?;
            let design = ctx.design();
            let system = ctx.system();
            let filtered = qbath::illumination::filtered_spectrum(&design, &solar);
            let mut csv = format!("{header}\nwavelength_nm,irradiance,transmission,transmitted\n");
            for ((l, j), f) in solar.wavelengths().iter().zip(solar.irradiance()).zip(filtered.irradiance()) {
                let t = if *j > 0.0 { f / j } else { qbath::illumination::transmission_eval(*l, &design) };
                csv.push_str(&format!("{l},{j},{t},{f}\n"));
            }
            out.write("spectrum.csv", &csv)?;
            let pm = PumpingModel::for_system(&system, DEFAULT_LINE_WIDTH_NM).map_err(config_err)?;
            #[derive(Serialize)]
            struct SpectrumSummary {
                integral_w_m2: f64,
                par_fraction: f64,
                transmitted_par_fraction: f64,
                pce: f64,
                pce_max: f64,
                pumping_rates: Vec<f64>,
                resonances: Vec<qbath::illumination::ResonanceEntry>,
            }
            let s = SpectrumSummary {
                integral_w_m2: solar.integral(),
                par_fraction: par_fraction(&solar),
                transmitted_par_fraction: transmitted_par_fraction(&design, &solar),
                pce: qbath::illumination::pce(&design, &solar, &pv).map_err(runtime)?,
                pce_max: pce_max(&solar, &pv).map_err(runtime)?,
                pumping_rates: pumping_rates(&filtered, &system, &pm).map_err(runtime)?,
                resonances: resonance_report(&design, &system, &ctx.bath()),
            };
            out.write_json("spectrum_summary.json", &s)?;
            (
                "spectrum",
                format!("spectrum: {:.2} W/m^2, PAR fraction {:.4}, design PCE {:.4}", s.integral_w_m2, s.par_fraction, s.pce),
                false,
            )
        }
    };

    #[derive(Serialize)]
    struct Manifest<'a> {
        tool: &'a str,
        version: &'a str,
        subcommand: &'a str,
        config_hash: &'a str,
        seed: u64,
        config: &'a RunConfig,
        outputs: &'a [OutputEntry],
        wall_time_s: f64,
    }
    let files = std::mem::take(&mut out.files);
    let manifest = Manifest {
        tool: qbath::io::TOOL_NAME,
        version: VERSION,
        subcommand: name,
        config_hash: &ctx.hash,
        seed: ctx.cfg.seed,
        config: &ctx.cfg,
        outputs: &files,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    out.write_json("manifest.json", &manifest)?;
    if failing {
        return Err(Failure::Runtime(summary));
    }
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("qbath: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
