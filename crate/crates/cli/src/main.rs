use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use slipflow_cli::cache::{write_json, Cache};
use slipflow_cli::config::{Regime, RunConfig};
use slipflow_cli::pipeline::{self, PointSpec};
use slipflow_cli::{output, report, HarnessError};

#[derive(Parser)]
#[command(name = "slipflow", version, about = "Cell problems, DNS sweeps and slip-law reports")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Run configuration (TOML); the built-in default when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory, overriding the config.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent points.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Repeat the cell problems at twice the resolution
    #[arg(long, global = true)]
    refine_check: bool,
    /// Read DNS results from the cache only.
    #[arg(long, global = true)]
    skip_dns: bool,
    /// Run points whose exponents violate the hypotheses instead of skipping them
    #[arg(long, global = true)]
    allow_out_of_hypothesis: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve both boundary layers and write the constants file.
    Cell,
    /// Run a single DNS point on the configured geometry.
    Dns(DnsArgs),
    /// Full sweep with all analyses and verdicts.
    Sweep,
    /// Text report and gnuplot data from an existing summary.
    Report,
}

#[derive(Args)]
struct DnsArgs {
    #[arg(long, conflicts_with_all = ["delta", "gamma"])]
    eta: Option<f64>,
    #[arg(long, requires = "gamma")]
    delta: Option<f64>,
    #[arg(long, requires = "delta")]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    force: f64,
}

fn load(g: &Global) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(g.config.as_deref())?;
    if let Some(c) = &g.cache {
        cfg.output.cache = c.clone();
    }
    if let Some(o) = &g.out {
        cfg.output.dir = o.clone();
    }
    cfg.flags.refine_check |= g.refine_check;
    cfg.flags.skip_dns |= g.skip_dns;
    cfg.flags.allow_out_of_hypothesis |= g.allow_out_of_hypothesis;
    Ok(cfg)
}

fn cmd_cell(cfg: &RunConfig) -> Result<i32> {
    let (cell, _) = pipeline::run_cell_stage(cfg)?;
    let path = output::write_constants(&cell, &cfg.output.dir)?;
    let c = &cell.constants;
    println!("{:<22} {:>+.10e}", "C1", c.c1);
    println!("{:<22} {:>+.10e}", "C_omega", c.c_omega);
    println!("{:<22} {:>+.10e}", "C11", c.c11);
    println!("{:<22} {:>+.10e}", "C_pi1", c.c_pi1);
    println!("{:<22} {:>+.3e}", "<beta1^1 on S>", c.beta1_trace);
    let d = &cell.dual_identity;
    println!(
        "dual identity          trace {:+.10e}  -energy {:+.10e}  gap {:.1e}",
        d.trace, -d.energy, d.relative
    );
    let rate = |f: Option<slipflow::boundary_layer::DecayFit>| f.map_or("-".into(), |f| format!("{:.4}", f.rate));
    println!(
        "decay rates            above {}  pressure {}  below {}  second layer {}",
        rate(cell.decay.above),
        rate(cell.decay.pressure_above),
        rate(cell.decay.below),
        rate(cell.decay.second_above)
    );
    for r in &cell.radii {
        println!("radius {:<15} C1 {:+.6e}", r.radius, r.c1);
    }
    for t in &cell.truncation {
        match &t.report {
            Some(r) => println!("truncation shifts       height {:?}  rows {:?}", r.shift_height, r.shift_rows),
            None => println!("truncation             {}", t.error.as_deref().unwrap_or("")),
        }
    }
    if let Some(r) = &cell.refine {
        println!("refined at {} cells per period", r.cells_per_period[1]);
        for (k, name) in ["C1", "C_omega", "C11"].iter().enumerate() {
            println!(
                "  {name:<8} {:+.8e} -> {:+.8e}  delta {:+.2e}  extrapolated {:+.8e}",
                r.coarse[k], r.fine[k], r.delta[k], r.extrapolated[k]
            );
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(0)
}

fn cmd_dns(cfg: &RunConfig, a: &DnsArgs) -> Result<i32> {
    let regime = match (a.eta, a.delta, a.gamma) {
        (Some(eta), _, _) => {
            let p = slipflow::scaling::ScalingParams::from_eta(1.0, eta, 0.0);
            Regime { eta: Some(eta), delta: p.delta, gamma: p.gamma }
        }
        (None, Some(delta), Some(gamma)) => Regime { eta: None, delta, gamma },
        _ => return Err(HarnessError::Config("give --eta or both --delta and --gamma".into()).into()),
    };
    let spec = PointSpec::new(cfg.geometry.shape, &regime, a.epsilon, a.force);
    let cache = Cache::new(&cfg.output.cache);
    let gated = !cfg.flags.allow_out_of_hypothesis && !spec.params().validate().all_hold();
    let cells = if cfg.flags.skip_dns || gated {
        None
    } else {
        let g = &cfg.geometry;
        let cell = slipflow::geometry::UnitCell::new(g.shape)?;
        let slab = slipflow::geometry::build_bl_slab(&cell, g.rows_below, g.height_above, g.cells_per_period)?;
        Some(slipflow::boundary_layer::solve_cell_problems(&slab)?)
    };
    let r = pipeline::resolve_point(cfg, &spec, cells.as_ref(), &cache)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(match r.status {
        pipeline::PointStatus::Failed => 1,
        _ => 0,
    })
}

fn cmd_sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<i32> {
    let cache = Cache::new(&cfg.output.cache);
    let summary = pipeline::run_sweep(cfg, &cache, jobs)?;
    write_json(&cache.root().join("last_config.json"), &cfg.resolved())?;
    let files = output::write_sweep(cfg, &summary, &cfg.output.dir)?;
    for v in &summary.criteria {
        println!("[{}] {} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.id, v.name, v.detail);
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    let failed = summary.failed_points();
    if failed > 0 {
        eprintln!("{failed} points failed; their errors are in the summary");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_report(cfg: &RunConfig) -> Result<i32> {
    let (text, files) = report::write_report(&cfg.output.dir)?;
    print!("{text}");
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<i32> {
    let cfg = load(&cli.global)?;
    match &cli.command {
        Command::Cell => cmd_cell(&cfg),
        Command::Dns(a) => cmd_dns(&cfg, a),
        Command::Sweep => cmd_sweep(&cfg, cli.global.jobs),
        Command::Report => cmd_report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<HarnessError>().map_or(1, HarnessError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
