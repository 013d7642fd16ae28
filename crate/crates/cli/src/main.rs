//! `simex`: runs exploration strategies on a maze until each one repeats the
//! shortest path, and prints one results row per strategy.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use simex_core::harness::{emit_table, run_strategies, ExperimentConfig};
use simex_core::{OutputFormat, RunSettings, StrategyConfig};

#[derive(Debug, Parser)]
#[command(name = "simex", version, about)]
struct Cli {
    /// ASCII maze file (`#` wall, `.` free, `S` start, `G` goal).
    #[arg(long)]
    maze: PathBuf,

    /// Initial path file: one line of N/E/S/W letters.
    #[arg(long)]
    path: PathBuf,

    /// Strategy to run: `optimistic`, `trajectory`, `trajectory:<depth>`,
    /// `sweeping` or `all`. Repeatable; defaults to `all`.
    #[arg(long = "strategy")]
    strategies: Vec<String>,

    #[arg(long, default_value_t = 0.95)]
    gamma: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Trajectory depths used by a bare `trajectory` strategy. Repeatable.
    #[arg(long = "depth", default_values_t = [3usize, 6, 12])]
    depths: Vec<usize>,

    /// Simulated trajectories per real step.
    #[arg(long, default_value_t = 10)]
    trajectories: usize,

    /// Smallest value change that still schedules parent backups.
    #[arg(long, default_value_t = 1e-6)]
    min_priority: f64,

    /// Prioritized-sweeping backups per real step.
    #[arg(long, default_value_t = simex_core::SweepQueue::DEFAULT_MAX_UPDATES)]
    sweeps_per_step: usize,

    /// Consecutive shortest-path episodes that count as converged.
    #[arg(long, default_value_t = 2)]
    repeats: usize,

    #[arg(long, default_value_t = OutputFormat::Tsv)]
    format: OutputFormat,

    #[arg(long, default_value_t = 1000)]
    episodes_max: usize,
}

fn parse_strategies(cli: &Cli) -> Result<Vec<StrategyConfig>, String> {
    let names = if cli.strategies.is_empty() {
        vec!["all".to_string()]
    } else {
        cli.strategies.clone()
    };
    let mut out = Vec::new();
    for name in &names {
        match name.as_str() {
            "all" => {
                out.push(StrategyConfig::optimistic_init());
                out.extend(cli.depths.iter().map(|&d| StrategyConfig::trajectory_sampling(d)));
                out.push(StrategyConfig::unexplored_sweeping());
            }
            "optimistic" => out.push(StrategyConfig::optimistic_init()),
            "sweeping" => out.push(StrategyConfig::unexplored_sweeping()),
            "trajectory" => {
                out.extend(cli.depths.iter().map(|&d| StrategyConfig::trajectory_sampling(d)))
            }
            other => {
                let depth = other
                    .strip_prefix("trajectory:")
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| format!("unknown strategy {other:?}"))?;
                out.push(StrategyConfig::trajectory_sampling(depth));
            }
        }
    }
    for s in &mut out {
        s.trajectories_per_step = cli.trajectories;
        s.min_priority = cli.min_priority;
        s.max_updates_per_step = cli.sweeps_per_step;
    }
    Ok(out)
}

fn validate(cli: &Cli) -> Result<(), String> {
    if cli.depths.contains(&0) {
        return Err("--depth must be at least 1".into());
    }
    if cli.trajectories == 0 || cli.sweeps_per_step == 0 || cli.repeats == 0 {
        return Err("--trajectories, --sweeps-per-step and --repeats must be at least 1".into());
    }
    if !(cli.min_priority >= 0.0) {
        return Err("--min-priority must be non-negative".into());
    }
    if !(cli.gamma > 0.0 && cli.gamma < 1.0) {
        return Err("--gamma must lie strictly between 0 and 1".into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if err.use_stderr() => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
        Err(err) => {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    let strategies = match validate(&cli).and_then(|_| parse_strategies(&cli)) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cfg = ExperimentConfig {
        maze_file: cli.maze.clone(),
        path_file: cli.path.clone(),
        strategies,
        settings: RunSettings {
            gamma: cli.gamma,
            seed: cli.seed,
            convergence_repeats: cli.repeats,
            max_episodes: cli.episodes_max,
            step_cap: None,
        },
        output_format: cli.format,
    };
    let (map, path) = match cfg.load() {
        Ok(loaded) => loaded,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    let missing = path.missing_actions(4);
    if !missing.is_empty() {
        eprintln!(
            "warning: initial path never uses actions {:?}; the recent-effect model cannot predict them",
            missing.iter().map(|a| simex_core::env::ACTION_NAMES[a.index()]).collect::<Vec<_>>()
        );
    }
    let rows = match run_strategies(&map, &path, &cfg.strategies, &cfg.settings) {
        Ok(rows) => rows,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    print!("{}", emit_table(&rows, cfg.output_format));
    if rows.iter().all(|(_, m)| m.converged) {
        ExitCode::SUCCESS
    } else {
        for (s, _) in rows.iter().filter(|(_, m)| !m.converged) {
            eprintln!("warning: {s} did not converge within {} episodes", cli.episodes_max);
        }
        ExitCode::from(2)
    }
}
