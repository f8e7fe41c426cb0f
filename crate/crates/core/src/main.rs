use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use forest_rotation::chain::Classification;
use forest_rotation::contour::{emit_isocurves, write_isocurves};
use forest_rotation::current_age::current_harvest_age_with;
use forest_rotation::sweep::{read_cells, run_sweep, Quantity, SweepOptions};
use forest_rotation::validate::{default_sample, oracle_agreement};
use forest_rotation::valuation::land_value;
use forest_rotation::{ChainSolver, GrowthModel, Result, RotationError, RunConfig};

#[derive(Parser)]
#[command(name = "forest-rotation", version, about = "Optimal forest rotations under rising carbon prices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the rotation schedule and NPV.
    Solve {
        #[command(flatten)]
        scenario: Scenario,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Sweep a (pc, rho) grid and write one CSV row per cell.
    Sweep {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, short)]
        output: PathBuf,
        /// first_rotation, land_value or current_age.
        #[arg(long)]
        quantity: Option<String>,
        /// Carbon price axis as `start:stop:step` or a comma list.
        #[arg(long)]
        pc_axis: Option<String>,
        /// Carbon price growth axis as `start:stop:step` or a comma list.
        #[arg(long)]
        rho_axis: Option<String>,
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        #[arg(long)]
        workers: Option<usize>,
        /// Fill the runtime_ms column (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Find the age-class whose optimal rotation ends now.
    CurrentAge {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long)]
        json: bool,
    },
    /// Contour a first-rotation sweep CSV at the given levels.
    Isocurves {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        /// Written to standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Group to contour when the sweep holds several.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Check chain solutions against the oracle on a small scenario sample.
    Validate {
        #[command(flatten)]
        scenario: Scenario,
    },
}

#[derive(Args, Clone, Default)]
struct Scenario {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// coastal or boreal.
    #[arg(long)]
    forest: Option<String>,
    /// Custom growth curve as `k,a,b,alpha`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    growth: Option<Vec<f64>>,
    #[arg(long)]
    pf: Option<f64>,
    #[arg(long)]
    pc: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Regeneration cost per harvest.
    #[arg(long)]
    c: Option<f64>,
    /// Rotations in the truncated chain (conditions = rotations - 1).
    #[arg(long)]
    rotations: Option<usize>,
    #[arg(long)]
    terminal_t: Option<f64>,
    #[arg(long)]
    t_cap: Option<f64>,
}

impl Scenario {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(name) = &self.forest {
            cfg.forest = Some(name.clone());
            cfg.growth = None;
        }
        if let Some(g) = &self.growth {
            if g.len() != 4 {
                return Err(RotationError::Config("--growth takes k,a,b,alpha".into()));
            }
            cfg.growth = Some(GrowthModel::new("custom", g[0], g[1], g[2], g[3])?);
        }
        let e = &mut cfg.econ;
        for (slot, flag) in [
            (&mut e.p_f, self.pf),
            (&mut e.p_c, self.pc),
            (&mut e.rho, self.rho),
            (&mut e.r, self.r),
            (&mut e.beta, self.beta),
            (&mut e.c_regen, self.c),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(n) = self.rotations {
            if n < 2 {
                return Err(RotationError::Config("--rotations must be at least 2".into()));
            }
            cfg.chain.n_equations = n - 1;
        }
        if self.terminal_t.is_some() {
            cfg.chain.terminal_t = self.terminal_t;
        }
        if let Some(t) = self.t_cap {
            cfg.chain.t_cap = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let bad = || RotationError::Config(format!("bad axis {spec:?}; use start:stop:step or a comma list"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if spec.contains(':') {
        let parts: Vec<f64> = spec.split(':').map(num).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
    } else {
        spec.split(',').map(num).collect()
    }
}

fn solve(scenario: &Scenario, json: bool) -> Result<ExitCode> {
    let cfg = scenario.resolve()?;
    let model = cfg.model()?;
    let solver = ChainSolver::new(&model, &cfg.econ, &cfg.chain_config())?;
    let report = solver.solve()?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let d = &report.diagnostics;
        println!("model           {}", model.name);
        println!("classification  {}", report.classification);
        if let Some(s) = &report.schedule {
            let lengths: Vec<String> = s.lengths.iter().map(|t| format!("{t:.4}")).collect();
            println!("rotations       {}", lengths.join(" "));
            println!("first_rotation  {:.4} years", s.first());
            println!("npv             {:.4} USD/ha", report.npv);
            if let Ok(lv) = land_value(&model, &cfg.econ, &report) {
                println!("land_value      {:.4} USD/ha (truncation bound {:.3e})", lv.npv, lv.truncation_bound);
            }
        }
        println!("max_residual    {:.3e}", report.max_residual());
        println!("terminal_T      {:.4} years ({} conditions)", d.terminal_t, d.active_equations);
        println!(
            "oracle          T1 {:.3} npv {:.4} agreement {}",
            d.oracle_t1,
            d.oracle_npv,
            if report.oracle_agreement { "yes" } else { "no" }
        );
        if let Some(note) = &d.note {
            println!("note            {note}");
        }
    }
    Ok(if report.classification == Classification::NoSolution {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    scenario: &Scenario,
    output: &Path,
    quantity: Option<&str>,
    pc_axis: Option<&str>,
    rho_axis: Option<&str>,
    betas: Option<&Vec<f64>>,
    models: Option<&Vec<String>>,
    workers: Option<usize>,
    timing: bool,
) -> Result<ExitCode> {
    let cfg = scenario.resolve()?;
    let mut grid = cfg.grid.clone();
    if let Some(q) = quantity {
        grid.quantity = q.parse::<Quantity>()?;
    }
    if let Some(a) = pc_axis {
        grid.pc_axis = parse_axis(a)?;
    }
    if let Some(a) = rho_axis {
        grid.rho_axis = parse_axis(a)?;
    }
    if let Some(b) = betas {
        grid.betas = b.clone();
    }
    let custom: Vec<GrowthModel> = cfg.growth.iter().cloned().collect();
    grid.models = match (models, &scenario.growth, &scenario.forest, &cfg.growth) {
        (Some(m), ..) => m.clone(),
        (None, Some(_), ..) => vec!["custom".into()],
        (None, None, Some(name), _) => vec![name.clone()],
        (None, None, None, Some(g)) => vec![g.name.clone()],
        (None, None, None, None) => grid.models,
    };
    let options = SweepOptions {
        workers: workers.or(cfg.workers),
        timing,
        custom_models: custom,
        current_age: cfg.current_age,
    };
    let summary = run_sweep(&grid, &cfg.econ, &cfg.chain_config(), output, &options)?;
    println!("{summary}");
    println!("wrote {}", output.display());
    Ok(ExitCode::SUCCESS)
}

fn current_age(scenario: &Scenario, json: bool) -> Result<ExitCode> {
    let cfg = scenario.resolve()?;
    let model = cfg.model()?;
    let solver = ChainSolver::new(&model, &cfg.econ, &cfg.chain_config())?;
    let result = current_harvest_age_with(&solver, &cfg.current_age)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&result)?);
        return Ok(ExitCode::SUCCESS);
    }
    println!("model         {}", model.name);
    println!("status        {}", result.status.as_str());
    match result.tau {
        Some(t) => println!("tau           {t:.3} years"),
        None => println!("tau           -"),
    }
    let fixed: Vec<String> = result.fixed_points.iter().map(|t| format!("{t:.3}")).collect();
    println!("fixed_points  {}", if fixed.is_empty() { "-".into() } else { fixed.join(" ") });
    for (lo, hi) in &result.jumps {
        println!("jump          between {lo:.3} and {hi:.3}");
    }
    if let Some(p) = result.bracket_trace.first() {
        println!("at tau=0      {} (T1 {})", p.classification, p.first_rotation.map_or("-".into(), |t| format!("{t:.3}")));
    }
    Ok(ExitCode::SUCCESS)
}

fn isocurves(
    input: &Path,
    levels: &[f64],
    output: Option<&PathBuf>,
    model: Option<&str>,
    beta: Option<f64>,
) -> Result<ExitCode> {
    let cells = read_cells(std::fs::File::open(input)?)?;
    let selection = match (model, beta) {
        (Some(m), Some(b)) => Some((m, b)),
        (None, None) => None,
        _ => return Err(RotationError::Config("--model and --beta go together".into())),
    };
    let lines = emit_isocurves(&cells, levels, selection)?;
    match output {
        Some(path) => {
            write_isocurves(&lines, std::io::BufWriter::new(std::fs::File::create(path)?))?;
            println!("{} polylines written to {}", lines.len(), path.display());
        }
        None => write_isocurves(&lines, std::io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(scenario: &Scenario) -> Result<ExitCode> {
    let cfg = scenario.resolve()?;
    let report = oracle_agreement(&default_sample(), &cfg.chain_config())?;
    println!("{report}");
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Solve { scenario, json } => solve(scenario, *json),
        Command::Sweep {
            scenario,
            output,
            quantity,
            pc_axis,
            rho_axis,
            betas,
            models,
            workers,
            timing,
        } => sweep(
            scenario,
            output,
            quantity.as_deref(),
            pc_axis.as_deref(),
            rho_axis.as_deref(),
            betas.as_ref(),
            models.as_ref(),
            *workers,
            *timing,
        ),
        Command::CurrentAge { scenario, json } => current_age(scenario, *json),
        Command::Isocurves {
            input,
            levels,
            output,
            model,
            beta,
        } => isocurves(input, levels, output.as_ref(), model.as_deref(), *beta),
        Command::Validate { scenario } => validate(scenario),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RotationError::Numeric(_) | RotationError::Quadrature { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
