//! `dcov`: batch front-end for multi-robot Dubins coverage planning.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dubins_coverage::dcac::dcac;
use dubins_coverage::dcrc::dcrc;
use dubins_coverage::dcs::{build_dubins_graph, route_cost, solve_route};
use dubins_coverage::fixtures::Scene;
use dubins_coverage::grid::{load_grid, MapMeta};
use dubins_coverage::metrics::PlanReport;
use dubins_coverage::mission::{Algorithm, MissionFile, MissionParameters};
use dubins_coverage::plan::{Decomposition, RoundTripAnchor, SplitOptions, SplitRule};
use dubins_coverage::svg::SvgCanvas;
use dubins_coverage::{OccupancyGrid, PlanConfig, Solver, Tour};

#[derive(Parser)]
#[command(
    name = "dcov",
    version,
    about = "Coverage tours for teams of Dubins vehicles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a map into cells and, optionally, passes.
    Decompose(DecomposeArgs),
    /// Plan tours for a robot team and write a mission file.
    Plan(PlanArgs),
    /// Recompute costs and metrics for an existing mission file.
    Stats(StatsArgs),
    /// Write one of the built-in synthetic maps as PGM plus metadata.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct MapArgs {
    /// Occupancy map (P2/P5 graymap or ASCII `.`/`#`).
    #[arg(long)]
    map: PathBuf,
    /// Metadata JSON with resolution_m, depot and optional free_threshold.
    #[arg(long)]
    meta: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Sensor footprint in meters; required with --passes.
    #[arg(long)]
    footprint: Option<f64>,
    /// Also emit passes and pass-graph edges.
    #[arg(long)]
    passes: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write an SVG overlay.
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Dcrc,
    Dcac,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitRuleArg {
    Cumulative,
    PerTour,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Number of robots.
    #[arg(long, value_parser = robot_count)]
    robots: usize,
    /// Minimum turning radius in meters.
    #[arg(long)]
    radius: f64,
    /// Sensor footprint in meters.
    #[arg(long)]
    footprint: f64,
    #[arg(long, value_enum, default_value = "dcrc")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "heuristic")]
    solver: SolverArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write plan.svg.
    #[arg(long)]
    svg: bool,
    /// Measure the split round trips from the depot instead of the first pass.
    #[arg(long)]
    line4_depot: bool,
    /// How DCRC compares a tour's running cost with its threshold.
    #[arg(long, value_enum, default_value = "cumulative")]
    split_rule: SplitRuleArg,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    mission: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    /// open-square, island-blob or lake.
    #[arg(long)]
    name: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn robot_count(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("at least one robot is required".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(args) => decompose(args),
        Command::Plan(args) => plan(args),
        Command::Stats(args) => stats(args),
        Command::Fixture(args) => fixture(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("dcov: {}", format!("{err:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn load_map(args: &MapArgs) -> Result<OccupancyGrid> {
    let meta_text = fs::read_to_string(&args.meta)
        .with_context(|| format!("cannot read {}", args.meta.display()))?;
    let meta = MapMeta::from_json(&meta_text)
        .with_context(|| format!("bad metadata in {}", args.meta.display()))?;
    let file =
        fs::File::open(&args.map).with_context(|| format!("cannot read {}", args.map.display()))?;
    load_grid(std::io::BufReader::new(file), &meta)
        .with_context(|| format!("bad map {}", args.map.display()))
}

fn write(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, text.as_bytes())
}

fn decompose(args: DecomposeArgs) -> Result<()> {
    let grid = load_map(&args.map)?;
    let cells = dubins_coverage::decompose::bcd(&grid);
    let cells_json: Vec<Value> = cells
        .iter()
        .map(|c| {
            let columns: Vec<Value> = (c.col_start..c.col_end())
                .map(|col| json!({"col": col, "floor": c.floor(col), "ceiling": c.ceiling(col)}))
                .collect();
            json!({
                "id": c.id,
                "x_range": [c.x_min(), c.x_max()],
                "columns": columns,
                "neighbors": c.neighbors,
            })
        })
        .collect();
    write_json(&args.out, "cells.json", &json!({ "cells": cells_json }))?;

    let mut canvas = SvgCanvas::new(&grid);
    canvas.map().cells(&cells);
    if args.passes {
        let Some(footprint) = args.footprint else {
            bail!("--passes requires --footprint");
        };
        let d = Decomposition::new(&grid, footprint)?;
        write_json(
            &args.out,
            "passes.json",
            &json!({ "passes": d.passes, "edges": d.graph.edges() }),
        )?;
        canvas.passes(&d.passes);
    }
    if args.svg {
        canvas.depot(grid.depot());
        write(&args.out, "decompose.svg", canvas.finish().as_bytes())?;
    }
    Ok(())
}

fn plan(args: PlanArgs) -> Result<()> {
    let grid = load_map(&args.map)?;
    let k = args.robots;
    let solver = match args.solver {
        SolverArg::Exact => Solver::Exact,
        SolverArg::Heuristic => Solver::Heuristic,
    };
    let split = SplitOptions {
        anchor: if args.line4_depot {
            RoundTripAnchor::Depot
        } else {
            RoundTripAnchor::FirstVertex
        },
        rule: match args.split_rule {
            SplitRuleArg::Cumulative => SplitRule::Cumulative,
            SplitRuleArg::PerTour => SplitRule::PerTour,
        },
    };
    let mut config = PlanConfig::new(args.radius, args.footprint);
    config.solver = solver;
    config.seed = args.seed;
    config.split = split;

    let (algorithm, decomposition, tours, single): (_, _, Vec<Tour>, f64) = match args.algorithm {
        AlgorithmArg::Dcrc => {
            let p = dcrc(k, &grid, &config)?;
            (Algorithm::Dcrc, p.decomposition, p.tours, p.route_cost)
        }
        AlgorithmArg::Dcac => {
            let p = dcac(k, &grid, &config)?;
            let graph = build_dubins_graph(&p.decomposition.passes, config.radius)?;
            let route = solve_route(&graph, solver, config.seed)?;
            let single = route_cost(&route, grid.depot())?;
            (Algorithm::Dcac, p.decomposition, p.tours, single)
        }
    };

    let parameters = MissionParameters {
        robots: k,
        radius: args.radius,
        footprint: args.footprint,
        seed: args.seed,
        algorithm,
        solver,
        line4_depot: args.line4_depot,
        split_rule: split.rule,
    };
    let mission = MissionFile::new(parameters, grid.depot(), &tours);
    mission.validate()?;
    let mut text = mission.to_json()?;
    text.push('\n');
    write(&args.out, "mission.json", text.as_bytes())?;

    let report = PlanReport::new(&tours, k, single, &grid, args.footprint)?;
    write_json(&args.out, "report.json", &report)?;

    if args.svg {
        let mut canvas = SvgCanvas::new(&grid);
        canvas
            .map()
            .cells(&decomposition.cells)
            .passes(&decomposition.passes)
            .mission(&mission)
            .depot(grid.depot());
        write(&args.out, "plan.svg", canvas.finish().as_bytes())?;
    }
    println!(
        "{algorithm}: {} tours, max cost {:.3} m, utilization {:.3}, coverage {:.4}",
        tours.len(),
        report.max_cost,
        report.utilization,
        report.coverage_fraction
    );
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let text = fs::read_to_string(&args.mission)
        .with_context(|| format!("cannot read {}", args.mission.display()))?;
    let mission = MissionFile::from_json(&text)
        .with_context(|| format!("bad mission {}", args.mission.display()))?;
    mission.validate()?;
    let stored: Vec<f64> = mission.robots.iter().map(|r| r.cost).collect();
    let recomputed = mission.recompute_costs();
    let max_deviation = stored
        .iter()
        .zip(&recomputed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let k = mission.parameters.robots;
    let used = mission
        .robots
        .iter()
        .filter(|r| !r.passes.is_empty())
        .count();
    let report = json!({
        "algorithm": mission.parameters.algorithm,
        "robots": k,
        "tour_costs": stored,
        "recomputed_costs": recomputed,
        "max_cost_deviation": max_deviation,
        "max_cost": recomputed.iter().copied().fold(0.0, f64::max),
        "total_cost": recomputed.iter().sum::<f64>(),
        "utilization": if k == 0 { 0.0 } else { used as f64 / k as f64 },
        "flown_lengths": mission.robots.iter().map(|r| r.flown_length()).collect::<Vec<_>>(),
    });
    let mut out = serde_json::to_string_pretty(&report)?;
    out.push('\n');
    match args.out {
        Some(path) => {
            fs::write(&path, out).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn fixture(args: FixtureArgs) -> Result<()> {
    let Some(scene) = Scene::from_name(&args.name) else {
        bail!(
            "unknown fixture {:?}; expected open-square, island-blob or lake",
            args.name
        );
    };
    let grid = scene.grid();
    let mut pgm = format!("P5\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    pgm.extend(
        grid.cells()
            .iter()
            .map(|&free| if free { 255u8 } else { 0 }),
    );
    write(&args.out, &format!("{}.pgm", scene.name()), &pgm)?;
    let d = grid.depot();
    write_json(
        &args.out,
        &format!("{}.json", scene.name()),
        &json!({"resolution_m": grid.resolution(), "depot": [d.x, d.y], "free_threshold": 128}),
    )
}
