//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
//! line each, and exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p flowca --test acceptance`.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::HashSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use flowca::io::{parse_config, parse_frame_csv, read_history, write_history};
use flowca::render::{density_image, heightfield_csv, ImageSpec};
use flowca::sweep::par_sweep_capacity;
use flowca_core::stats::spearman_rho;
use flowca_core::*;
use oracle::{oracle_step, to_dense, to_grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn recipe(name: &str) -> SimConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

/// Random inflow subset and up to four obstacle rectangles clear of the inflow cells.
fn random_config(rng: &mut ChaCha20Rng, rows: usize, cols: usize, steps: usize) -> SimConfig {
    let density = rng.gen_range(0.05..1.0);
    let mut inflow: Vec<usize> = (1..=cols).filter(|_| rng.gen_bool(density)).collect();
    if inflow.is_empty() {
        inflow.push(rng.gen_range(1..=cols));
    }
    let mut obstacles = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let r1 = rng.gen_range(1..=rows);
        let r2 = rng.gen_range(r1..=rows.min(r1 + 3));
        let c1 = rng.gen_range(1..=cols);
        let c2 = rng.gen_range(c1..=cols.min(c1 + cols / 2));
        let rect = Rect::new(r1, c1, r2, c2);
        if !inflow.iter().any(|&c| rect.contains(1, c)) {
            obstacles.push(rect);
        }
    }
    SimConfig {
        rows,
        cols,
        steps,
        capacity: rng.gen_range(1..=6),
        seed: rng.gen(),
        inflow: InflowPattern::new(inflow).unwrap(),
        obstacles,
    }
}

fn grid3(cells: &[(usize, usize, u32)]) -> GridState {
    let mut g = GridState::empty(3, 3);
    for &(r, c, n) in cells {
        g.set(r, c, n);
    }
    g
}

fn ac1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = |inflow, obstacles: Vec<Rect>| SimConfig {
        rows: 3,
        cols: 3,
        steps: 1,
        capacity: 1,
        seed: 0,
        inflow,
        obstacles,
    };
    let traces: [(SimConfig, GridState, Vec<i8>, GridState); 4] = [
        (cfg(InflowPattern::single(2), vec![]), grid3(&[]), vec![], grid3(&[(1, 2, 1)])),
        (cfg(InflowPattern::single(2), vec![]), grid3(&[(1, 2, 1)]), vec![0], grid3(&[(2, 2, 1), (1, 2, 1)])),
        (cfg(InflowPattern::none(), vec![Rect::new(2, 2, 2, 2)]), grid3(&[(1, 2, 1)]), vec![0], grid3(&[(1, 2, 1)])),
        (cfg(InflowPattern::none(), vec![]), grid3(&[(1, 2, 2)]), vec![0, 0], grid3(&[(2, 2, 1), (1, 2, 1)])),
    ];
    for (k, (c, old, script, want)) in traces.into_iter().enumerate() {
        let (got, _) = step(&old, &c.obstacle_mask(), &c, &mut ScriptedSource::new(script))
            .map_err(|e| format!("hand trace {}: {e}", k + 1))?;
        ensure(got == want, || format!("hand trace {} mismatch: {got:?}", k + 1))?;
    }

    let mut rng = ChaCha20Rng::seed_from_u64(0xAC01);
    let mut frames = 0;
    for case in 0..50 {
        let cfg = random_config(&mut rng, 5, 5, 10);
        let mask = cfg.obstacle_mask();
        let mut pick_rng = ChaCha20Rng::seed_from_u64(rng.gen());
        let mut pick = |opts: &[i8]| opts[pick_rng.gen_range(0..opts.len())];
        let mut dense = to_dense(&GridState::empty(5, 5), &mask);
        let mut grid = GridState::empty(5, 5);
        for k in 1..=10 {
            let mut script = Vec::new();
            dense = oracle_step(&dense, i64::from(cfg.capacity), cfg.inflow.columns(), &mut pick, &mut script);
            let mut src = ScriptedSource::new(script);
            let (next, _) = step(&grid, &mask, &cfg, &mut src).map_err(|e| format!("case {case}: {e}"))?;
            ensure(src.remaining() == 0, || format!("case {case} step {k}: unused offsets"))?;
            ensure(next == to_grid(&dense), || format!("case {case} step {k}: frame differs from oracle"))?;
            grid = next;
            frames += 1;
        }
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("4 hand traces, 50 configs x 10 steps = {frames} frames identical"))
}

#[derive(Default)]
struct CapacityAudit {
    capacity: u32,
    advances: u64,
    bad_advances: u64,
    carried_cells: HashSet<(usize, usize)>,
}

impl StepObserver for CapacityAudit {
    fn on_advance(&mut self, _row: usize, _col: usize, count_before: u32) {
        self.advances += 1;
        if count_before >= self.capacity {
            self.bad_advances += 1;
        }
    }

    fn on_carry(&mut self, row: usize, col: usize) {
        self.carried_cells.insert((row, col));
    }
}

/// Runs shared by criteria 2, 4 and 8.
fn suite_configs() -> Vec<SimConfig> {
    let mut rng = ChaCha20Rng::seed_from_u64(0xAC02);
    (0..20)
        .map(|_| {
            let (rows, cols) = (rng.gen_range(1..=50), rng.gen_range(1..=50));
            random_config(&mut rng, rows, cols, 100)
        })
        .collect()
}

fn ac2_conservation(configs: &[SimConfig]) -> Outcome {
    let start = Instant::now();
    let mut steps = 0;
    for (n, cfg) in configs.iter().enumerate() {
        let h = run(cfg).map_err(|e| format!("config {n}: {e}"))?;
        for (k, l) in h.ledgers().iter().enumerate() {
            let (before, after) = (h.frames()[k].total(), h.frames()[k + 1].total());
            ensure(after == before + l.injected - l.exited, || {
                format!("config {n} step {k}: {before} + {} - {} != {after}", l.injected, l.exited)
            })?;
            steps += 1;
        }
        for (k, f) in h.frames().iter().enumerate() {
            let on_obstacle = f.counts().iter().zip(h.mask().blocked()).any(|(&c, &b)| b && c != 0);
            ensure(!on_obstacle, || format!("config {n} frame {k}: molecule on obstacle"))?;
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("20 configs, {steps} steps conserve mass exactly; counts unsigned, obstacles empty"))
}

fn ac3_determinism() -> Outcome {
    let start = Instant::now();
    let cfg = recipe("fig1.conf");
    let a = write_history(&run(&cfg).map_err(|e| e.to_string())?);
    let b = write_history(&run(&cfg).map_err(|e| e.to_string())?);
    ensure(a == b, || "same seed produced different history files".into())?;
    let other = SimConfig { seed: cfg.seed + 1, ..cfg };
    let c = write_history(&run(&other).map_err(|e| e.to_string())?);
    ensure(a != c, || "different seeds produced identical history files".into())?;
    within(start.elapsed(), 5.0)?;
    Ok(format!("{} bytes identical across reruns; seed change alters output", a.len()))
}

fn ac4_capacity_discipline(configs: &[SimConfig]) -> Outcome {
    let (mut advances, mut over_capacity_cells) = (0u64, 0u64);
    for (n, cfg) in configs.iter().enumerate() {
        let mask = cfg.obstacle_mask();
        let mut source = SeededSource::new(cfg.seed);
        let mut grid = GridState::empty(cfg.rows, cfg.cols);
        for k in 0..cfg.steps {
            let mut audit = CapacityAudit {
                capacity: cfg.capacity,
                ..Default::default()
            };
            let (next, _) = step_observed(&grid, &mask, cfg, &mut source, &mut audit).map_err(|e| e.to_string())?;
            ensure(audit.bad_advances == 0, || {
                format!("config {n} step {k}: {} advances into cells at capacity", audit.bad_advances)
            })?;
            advances += audit.advances;
            for i in 1..=cfg.rows {
                for j in 1..=cfg.cols {
                    if next.get(i, j) > cfg.capacity {
                        over_capacity_cells += 1;
                        ensure(audit.carried_cells.contains(&(i, j)), || {
                            format!("config {n} step {k}: ({i},{j}) exceeds d without a sideways placement")
                        })?;
                    }
                }
            }
            grid = next;
        }
        let reference = run(cfg).map_err(|e| e.to_string())?;
        ensure(&grid == reference.final_frame(), || format!("config {n}: instrumented run diverged"))?;
    }
    Ok(format!(
        "{advances} advances all below d; {over_capacity_cells} over-capacity cells each had a sideways placement"
    ))
}

fn ac5_fig1_thickening() -> Outcome {
    let start = Instant::now();
    let base = recipe("fig1.conf");
    let rect = base.obstacles[0];
    let mut ratios = Vec::new();
    for seed in 1..=5 {
        let h = run(&SimConfig { seed, ..base.clone() }).map_err(|e| e.to_string())?;
        let f = h.final_frame();
        let band_row = rect.r1 - 1;
        let band = (rect.c1..=rect.c2).map(|j| f64::from(f.get(band_row, j))).sum::<f64>()
            / (rect.c2 - rect.c1 + 1) as f64;
        let front = front_row(f).unwrap_or(1);
        let free: usize = (1..=front)
            .map(|i| h.mask().row(i).iter().filter(|b| !**b).count())
            .sum();
        let baseline = f.total() as f64 / free as f64;
        ratios.push(band / baseline);
    }
    let passing = ratios.iter().filter(|&&r| r >= 2.0).count();
    within(start.elapsed(), 5.0)?;
    let detail = format!(
        "band/baseline ratios {:?}; {passing}/5 seeds >= 2",
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    ensure(passing >= 4, || detail.clone())?;
    Ok(detail)
}

fn sweep_summary(base: &SimConfig) -> Result<(Vec<f64>, f64, LogFit), String> {
    let d: Vec<u32> = (1..=8).collect();
    let table = par_sweep_capacity(base, &d, &[1, 2, 3, 4, 5]).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = table.iter().map(|r| f64::from(r.d)).collect();
    let ys: Vec<f64> = table.iter().map(|r| r.mean_max_mol).collect();
    let rho = spearman_rho(&xs, &ys).unwrap_or(f64::NAN);
    let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    let fit = log_fit(&pts).map_err(|e| e.to_string())?;
    Ok((ys, rho, fit))
}

fn ac6_fig6_trend() -> Outcome {
    let start = Instant::now();
    let base = recipe("fig6.conf");
    let (ys, rho, fit) = sweep_summary(&base)?;
    within(start.elapsed(), 60.0)?;
    let detail = format!(
        "mean max_mol {ys:?}, spearman {rho:.3} (need >= 0.9), log-fit r2 {:.3} (need >= 0.8)",
        fit.r_squared
    );
    ensure(rho >= 0.9 && fit.r_squared >= 0.8, || detail.clone())?;
    Ok(detail)
}

fn ac7_log_fit() -> Outcome {
    let e = std::f64::consts::E;
    let fit = log_fit(&[(1.0, 1.0), (e, 3.0), (e * e, 5.0)]).map_err(|e| e.to_string())?;
    ensure(
        (fit.a - 2.0).abs() < 1e-9 && (fit.b - 1.0).abs() < 1e-9 && (fit.r_squared - 1.0).abs() < 1e-9,
        || format!("exact recovery failed: {fit:?}"),
    )?;

    let mut rng = ChaCha20Rng::seed_from_u64(0xAC07);
    let pts: Vec<(f64, f64)> = (1..=20)
        .map(|i| {
            let x = f64::from(i);
            (x, 4.2 * x.ln() + 1.5 + rng.gen_range(-1.0..1.0))
        })
        .collect();
    let fit = log_fit(&pts).map_err(|e| e.to_string())?;
    // Normal equations on raw sums, Cramer's rule.
    let n = pts.len() as f64;
    let (su, suu, sy, suy) = pts.iter().fold((0.0, 0.0, 0.0, 0.0), |(a, b, c, d), &(x, y)| {
        let u = x.ln();
        (a + u, b + u * u, c + y, d + u * y)
    });
    let det = n * suu - su * su;
    let (a, b) = ((n * suy - su * sy) / det, (suu * sy - su * suy) / det);
    let (da, db) = ((fit.a - a).abs(), (fit.b - b).abs());
    ensure(da < 1e-9 && db < 1e-9, || format!("oracle disagreement: |da|={da:e} |db|={db:e}"))?;
    Ok(format!("exact recovery within 1e-9; noisy fit vs normal equations |da|={da:.1e} |db|={db:.1e}"))
}

fn ac8_round_trips(configs: &[SimConfig]) -> Outcome {
    let fig1 = recipe("fig1.conf");
    let mut runs: Vec<SimConfig> = configs.to_vec();
    runs.extend((1..=5).map(|seed| SimConfig { seed, ..fig1.clone() }));
    for (n, cfg) in runs.iter().enumerate() {
        let h = run(cfg).map_err(|e| e.to_string())?;
        let text = write_history(&h);
        let stored = read_history(&text).map_err(|e| format!("run {n}: {e}"))?;
        ensure(stored.frames == h.frames() && &stored.mask == h.mask(), || format!("run {n}: frames differ"))?;
        ensure(stored.to_text() == text, || format!("run {n}: re-serialization differs"))?;
        let (frame, mask) = parse_frame_csv(&heightfield_csv(h.final_frame(), h.mask()))
            .map_err(|e| format!("run {n}: {e}"))?;
        ensure(&frame == h.final_frame() && &mask == h.mask(), || format!("run {n}: heightfield differs"))?;
    }

    let mut rng = ChaCha20Rng::seed_from_u64(0xAC08);
    for _ in 0..10 {
        let (rows, cols) = (rng.gen_range(1..=120), rng.gen_range(1..=120));
        let counts = (0..rows * cols).map(|_| rng.gen_range(0..30)).collect();
        let frame = GridState::from_counts(rows, cols, counts).unwrap();
        let img = density_image(&frame, &ObstacleMask::clear(rows, cols), ImageSpec::default());
        let header = format!("P6\n{cols} {rows}\n255\n");
        ensure(header.len() <= 15 && img.starts_with(header.as_bytes()), || format!("bad header for {rows}x{cols}"))?;
        ensure(img.len() == header.len() + 3 * rows * cols, || format!("bad length for {rows}x{cols}"))?;
    }
    Ok(format!("{} histories and heightfields round-trip; 10 pixmap layouts exact", runs.len()))
}

fn ac9_throughput() -> Outcome {
    let cfg = recipe("fig5.conf");
    let start = Instant::now();
    let h = run(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, 5.0)?;
    Ok(format!(
        "200x200, {} steps in {:.2} s ({} molecules at end)",
        cfg.steps,
        elapsed.as_secs_f64(),
        h.final_frame().total()
    ))
}

fn main() -> ExitCode {
    let suite = suite_configs();
    let criteria: Vec<Criterion<'_>> = vec![
        ("AC1 oracle step equivalence", Box::new(ac1_oracle_equivalence)),
        ("AC2 conservation suite", Box::new(|| ac2_conservation(&suite))),
        ("AC3 determinism", Box::new(ac3_determinism)),
        ("AC4 capacity discipline", Box::new(|| ac4_capacity_discipline(&suite))),
        ("AC5 obstacle thickening (20x20)", Box::new(ac5_fig1_thickening)),
        ("AC6 max_mol vs d trend (50x50)", Box::new(ac6_fig6_trend)),
        ("AC7 log_fit exactness", Box::new(ac7_log_fit)),
        ("AC8 format round-trips", Box::new(|| ac8_round_trips(&suite))),
        ("AC9 desk-scale throughput", Box::new(ac9_throughput)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }

    // Not a criterion: the same sweep with a single inflow column, for comparison.
    let single = SimConfig {
        inflow: InflowPattern::single(25),
        ..recipe("fig6.conf")
    };
    if let Ok((ys, rho, fit)) = sweep_summary(&single) {
        println!(
            "note  AC6 with single-column inflow: mean max_mol {ys:?}, spearman {rho:.3}, r2 {:.3}",
            fit.r_squared
        );
    }

    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
