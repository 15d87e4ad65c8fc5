//! `flowca` subcommands. Every failure exits with status 1.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{error::ErrorKind, Parser, Subcommand};
use flowca_core::stats::check_sweep_args;
use flowca_core::{compute_stats, log_fit, run, SimConfig};

use crate::bench::bench;
use crate::io::{parse_config, read_history, write_history};
use crate::render::{density_image, heightfield_csv, ImageSpec};
use crate::sweep::{par_sweep_capacity, parse_points_csv, sweep_csv};

#[derive(Debug, Parser)]
#[command(name = "flowca", version, about = "Cellular-automaton fluid flow past obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a config and write history, final image, heightfield and stats.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write frame_NNNNN.ppm every K steps.
        #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
        image_every: Option<u64>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render one frame of a stored history as a pixmap.
    Render {
        #[arg(long)]
        history: PathBuf,
        #[arg(long, value_name = "K")]
        frame: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_name = "S", value_parser = clap::value_parser!(u32).range(1..))]
        saturation: Option<u32>,
    },
    /// Fit y = a·ln x + b to a CSV of x,y points.
    Fit {
        #[arg(long)]
        points: PathBuf,
    },
    /// Mean max_mol over seeds for each capacity d.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "d-list", value_delimiter = ',', required = true, num_args = 1..)]
        d_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time repeated single-threaded runs.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        repeat: u64,
    },
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    run_args(std::env::args_os())
}

pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            out,
            image_every,
            seed,
        } => cmd_run(&config, &out, image_every, seed),
        Command::Render {
            history,
            frame,
            out,
            saturation,
        } => cmd_render(&history, frame, &out, saturation),
        Command::Fit { points } => cmd_fit(&points),
        Command::Sweep {
            config,
            d_list,
            seeds,
            out,
        } => cmd_sweep(&config, &d_list, &seeds, &out),
        Command::Bench { config, repeat } => cmd_bench(&config, repeat as usize),
    }
}

fn load_config(path: &Path) -> Result<SimConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).map_err(|errs| {
        let lines: Vec<String> = errs
            .0
            .iter()
            .map(|d| format!("{}:{}: {}", path.display(), d.line, d.issue))
            .collect();
        anyhow::anyhow!("invalid config\n{}", lines.join("\n"))
    })
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_run(config: &Path, out: &Path, image_every: Option<u64>, seed: Option<u64>) -> Result<()> {
    let mut config = load_config(config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let history = run(&config)?;
    let stats = compute_stats(&history);

    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    write(&out.join("history.txt"), write_history(&history))?;
    let last = history.final_frame();
    write(
        &out.join("final.ppm"),
        density_image(last, history.mask(), ImageSpec::default()),
    )?;
    write(&out.join("final.csv"), heightfield_csv(last, history.mask()))?;
    write(
        &out.join("stats.txt"),
        format!(
            "max_mol = {}\ninjected = {}\nexited = {}\nsteps = {}\n",
            stats.max_mol, stats.total_injected, stats.total_exited, config.steps
        ),
    )?;
    if let Some(every) = image_every {
        for k in (every as usize..=config.steps).step_by(every as usize) {
            write(
                &out.join(format!("frame_{k:05}.ppm")),
                density_image(&history.frames()[k], history.mask(), ImageSpec::default()),
            )?;
        }
    }
    println!(
        "{} steps, max_mol = {}, injected = {}, exited = {}",
        config.steps, stats.max_mol, stats.total_injected, stats.total_exited
    );
    Ok(())
}

fn cmd_render(history: &Path, frame: usize, out: &Path, saturation: Option<u32>) -> Result<()> {
    let text = fs::read_to_string(history)
        .with_context(|| format!("cannot read history {}", history.display()))?;
    let stored = read_history(&text).with_context(|| format!("in {}", history.display()))?;
    let Some(grid) = stored.frames.get(frame) else {
        bail!(
            "frame {frame} out of range: history has {} frames",
            stored.frames.len()
        );
    };
    let spec = saturation.map(ImageSpec::fixed).unwrap_or_default();
    write(out, density_image(grid, &stored.mask, spec))
}

fn cmd_fit(points: &Path) -> Result<()> {
    let text = fs::read_to_string(points)
        .with_context(|| format!("cannot read points {}", points.display()))?;
    let pts = parse_points_csv(&text)?;
    let fit = log_fit(&pts)?;
    println!("a={:.6} b={:.6} r2={:.6}", fit.a, fit.b, fit.r_squared);
    Ok(())
}

fn cmd_sweep(config: &Path, d_list: &[u32], seeds: &[u64], out: &Path) -> Result<()> {
    check_sweep_args(d_list, seeds)?;
    let base = load_config(config)?;
    let table = par_sweep_capacity(&base, d_list, seeds)?;
    write(out, sweep_csv(&table))
}

fn cmd_bench(config: &Path, repeat: usize) -> Result<()> {
    let config = load_config(config)?;
    let report = bench(&config, repeat)?;
    for (i, s) in report.samples.iter().enumerate() {
        println!(
            "sample {}: {:.3} s, {:.4e} cell-steps/s, {:.4e} molecule-moves/s",
            i + 1,
            s.elapsed.as_secs_f64(),
            s.cell_steps_per_sec(),
            s.moves_per_sec()
        );
    }
    println!(
        "median: {:.4e} cell-steps/s, {:.4e} molecule-moves/s",
        report.median_cell_steps_per_sec(),
        report.median_moves_per_sec()
    );
    Ok(())
}
