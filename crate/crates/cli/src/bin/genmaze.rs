//! `simex-genmaze`: seeded maze generation and waypoint-routed initial paths.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use simex_core::mazegen::{generate, route_through, MazeSpec};
use simex_core::GridMap;

#[derive(Debug, Parser)]
#[command(name = "simex-genmaze", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_segment(s: &str) -> Result<((usize, usize), (usize, usize)), String> {
    let (a, b) = s.split_once(':').ok_or("expected R0,C0:R1,C1")?;
    Ok((parse_cell(a)?, parse_cell(b)?))
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or("expected ROW,COL")?;
    Ok((
        r.trim().parse().map_err(|e| format!("row: {e}"))?,
        c.trim().parse().map_err(|e| format!("col: {e}"))?,
    ))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a maze with an exact number of free cells.
    Maze {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        free: usize,
        #[arg(long, value_parser = parse_cell)]
        start: (usize, usize),
        #[arg(long, value_parser = parse_cell)]
        goal: (usize, usize),
        #[arg(long, default_value_t = 3)]
        min_segment: usize,
        #[arg(long, default_value_t = 12)]
        max_segment: usize,
        /// Fixed wall segment `R0,C0:R1,C1`, repeatable.
        #[arg(long = "barrier", value_parser = parse_segment)]
        barriers: Vec<((usize, usize), (usize, usize))>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Route an initial path from start through waypoints to the goal.
    Route {
        #[arg(long)]
        maze: PathBuf,
        /// Waypoint cell, repeatable and visited in order.
        #[arg(long = "via", value_parser = parse_cell)]
        via: Vec<(usize, usize)>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Maze {
            width,
            height,
            free,
            start,
            goal,
            min_segment,
            max_segment,
            barriers,
            seed,
        } => {
            let map = generate(&MazeSpec {
                width,
                height,
                free_cells: free,
                start,
                goal,
                min_segment,
                max_segment,
                barriers,
                seed,
            })?;
            print!("{map}");
            eprintln!("shortest path: {}", map.shortest_path_length());
        }
        Command::Route { maze, via } => {
            let text = std::fs::read_to_string(&maze)
                .with_context(|| format!("reading {}", maze.display()))?;
            let map = GridMap::parse(&text)?;
            let path = route_through(&map, &via)?;
            println!("{path}");
            eprintln!(
                "path length: {} (shortest {}), missing actions: {:?}",
                path.len(),
                map.shortest_path_length(),
                path.missing_actions(4)
            );
        }
    }
    Ok(())
}
