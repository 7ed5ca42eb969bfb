use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use kgh_core::dynamics::{evolve, export_trajectory, hamiltonian_drift, RhsMode, SolverConfig};
use kgh_core::probes::{
    commutator_bound_check, forcing_bound_check, hls_sweep, mean_zero_gaussian, ProbeReport,
};
use kgh_core::propagator::{precise_strichartz_slopes, sharp_wave_exponent, SlopeProbe};
use kgh_core::random::{power_law_pair, seeded_rng};
use kgh_core::report::{write_probe_report, write_rows, ExperimentRow, ProbeRow};
use kgh_core::split::{
    bootstrap_terms, data_norm, derive_exponents, energy_growth_slope, exponent_gate, ledger_at,
    low_frequency_energy, recombination_order, recombine_and_compare, split_data,
    verify_split_bounds, BootstrapConstants,
};
use kgh_core::{CauchyPair, GridSpec};
use serde::Serialize;

use crate::config::{ExperimentConfig, Gate, ProbeSpec};
use crate::CliError;

/// Everything a run produced.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub rows: Vec<ExperimentRow>,
    pub files: Vec<PathBuf>,
    pub gate_failures: Vec<String>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    grid: GridSpec,
    solver: SolverConfig,
    data: CauchyPair,
    out: &'a Path,
}

impl Context<'_> {
    fn row(&self, experiment: &str, j: i32, quantity: &str, value: f64) -> ExperimentRow {
        ExperimentRow {
            experiment: experiment.into(),
            gamma: self.grid.gamma(),
            s: self.config.split.s,
            j,
            dt: self.solver.dt(),
            horizon: self.solver.horizon(),
            quantity: quantity.into(),
            value,
            seed: self.config.seed,
        }
    }

    fn csv<R: Serialize>(
        &self,
        name: &str,
        rows: &[R],
        files: &mut Vec<PathBuf>,
    ) -> Result<(), CliError> {
        let path = self.out.join(name);
        write_rows(BufWriter::new(File::create(&path)?), rows)?;
        files.push(path);
        Ok(())
    }

    fn report(
        &self,
        name: &str,
        report: &ProbeReport,
        files: &mut Vec<PathBuf>,
    ) -> Result<(), CliError> {
        let path = self.out.join(name);
        write_probe_report(BufWriter::new(File::create(&path)?), report)?;
        files.push(path);
        Ok(())
    }
}

/// Validates the configuration against the core invariants.
pub fn prepare(config: &ExperimentConfig) -> Result<(GridSpec, SolverConfig), CliError> {
    let g = &config.grid;
    let grid = GridSpec::new(g.n, g.box_length, g.gamma)?;
    let solver = SolverConfig::new(config.solver.dt, config.solver.horizon)?
        .with_sample_every(config.solver.sample_every)?;
    let s = config.split.s;
    if !(s > 0.0 && s <= 1.0) {
        return Err(CliError::Config(format!("split.s = {s} is outside (0, 1]")));
    }
    if config.split.levels.to_vec().is_empty() {
        return Err(CliError::Config("split.J is empty".into()));
    }
    if config.split.levels.to_vec().iter().any(|&j| j < 0) {
        return Err(CliError::Config("split.J must be nonnegative".into()));
    }
    if !(config.data.norm > 0.0) {
        return Err(CliError::Config("data.norm must be positive".into()));
    }
    Ok((grid, solver))
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let (grid, solver) = prepare(config)?;
    std::fs::create_dir_all(&config.output)?;
    let data = power_law_pair(
        grid,
        config.split.s,
        config.data.delta,
        config.data.norm,
        &mut seeded_rng(config.seed),
    );
    let ctx = Context {
        config,
        grid,
        solver,
        data,
        out: &config.output,
    };
    let mut outcome = RunOutcome::default();
    for probe in &config.probes {
        log::info!("running {probe:?}");
        run_probe(&ctx, probe, &mut outcome)?;
    }
    if !outcome.rows.is_empty() {
        ctx.csv("experiments.csv", &outcome.rows, &mut outcome.files)?;
    }
    outcome.gate_failures = check_gates(&config.gates, &outcome.rows);
    Ok(outcome)
}

fn run_probe(ctx: &Context, probe: &ProbeSpec, outcome: &mut RunOutcome) -> Result<(), CliError> {
    let levels = ctx.config.split.levels.to_vec();
    let s = ctx.config.split.s;
    let gamma = ctx.grid.gamma();
    let files = &mut outcome.files;
    let rows = &mut outcome.rows;
    match probe {
        ProbeSpec::Recombine { order } => {
            #[derive(Serialize)]
            struct Line {
                #[serde(rename = "J")]
                j: i32,
                t: f64,
                h1: f64,
                l2: f64,
            }
            let mut lines = Vec::new();
            for &j in &levels {
                let rep = recombine_and_compare(&ctx.data, j, &ctx.solver)?;
                for ((t, h1), l2) in rep.times.iter().zip(&rep.h1).zip(&rep.l2) {
                    lines.push(Line {
                        j,
                        t: *t,
                        h1: *h1,
                        l2: *l2,
                    });
                }
                rows.push(ctx.row("recombine", j, "max_h1", rep.max_h1()));
                rows.push(ctx.row("recombine", j, "max_l2", rep.max_l2()));
                if *order {
                    let c =
                        recombination_order(&ctx.data, j, ctx.solver.dt(), ctx.solver.horizon())?;
                    rows.push(ctx.row("recombine", j, "order", c.order));
                    rows.push(ctx.row(
                        "recombine",
                        j,
                        "same_step_discrepancy",
                        c.same_step_discrepancy,
                    ));
                }
            }
            ctx.csv("recombine.csv", &lines, files)?;
        }
        ProbeSpec::Exponents => {
            let e = derive_exponents(gamma)?;
            println!("{:<14} {:>10}", "exponent", "value");
            for (name, v) in [
                ("gamma", e.gamma),
                ("s0", e.s0),
                ("theta", e.theta),
                ("alpha", e.alpha),
                ("beta", e.beta),
                ("s_threshold", e.s_threshold),
                ("scaling", e.scaling),
                ("conformal", e.conformal),
            ] {
                println!("{name:<14} {v:>10.6}");
                rows.push(ctx.row("exponents", 0, name, v));
            }
            ctx.csv("exponents.csv", &[e], files)?;
        }
        ProbeSpec::StrichartzSlope {
            j,
            h,
            r,
            trials,
            horizon,
            steps,
        } => {
            let mut sp = SlopeProbe::new(ctx.grid, *j, h.clone(), *trials, ctx.config.seed);
            if let Some(t) = horizon {
                sp.horizon = *t;
            }
            if let Some(n) = steps {
                sp.steps = *n;
            }
            let (fits, samples) = precise_strichartz_slopes(&sp, r)?;
            let lines: Vec<ProbeRow> = samples
                .iter()
                .map(|x| ProbeRow {
                    probe: "precise_strichartz".into(),
                    j: *j,
                    q: sharp_wave_exponent(x.r),
                    r: x.r,
                    theta: 0.0,
                    h: x.h,
                    horizon: sp.horizon,
                    dt: sp.horizon / sp.steps as f64,
                    seed: x.seed,
                    value: x.value,
                })
                .collect();
            ctx.csv("strichartz_slope.csv", &lines, files)?;
            for (rr, fit) in r.iter().zip(&fits) {
                rows.push(ctx.row("strichartz-slope", *j, &format!("slope_r{rr}"), fit.slope));
                rows.push(ctx.row(
                    "strichartz-slope",
                    *j,
                    &format!("residual_r{rr}"),
                    fit.residual,
                ));
            }
        }
        ProbeSpec::Hls { p, count } => {
            let rep = hls_sweep(ctx.grid, *p, *count, ctx.config.seed)?;
            ctx.report("hls.csv", &rep, files)?;
            summarize(ctx, "hls", &rep, rows);
        }
        ProbeSpec::Commutator { j, r } => {
            let v = mean_zero_gaussian(ctx.grid, ctx.config.seed);
            let u = &ctx.data.position;
            let ratios = j
                .iter()
                .map(|&jj| commutator_bound_check(&v, u, jj, *r, gamma))
                .collect::<kgh_core::Result<Vec<_>>>()?;
            let lines: Vec<ProbeRow> = j
                .iter()
                .zip(&ratios)
                .map(|(&jj, &value)| ProbeRow {
                    probe: "commutator".into(),
                    j: jj,
                    q: f64::NAN,
                    r: *r,
                    theta: f64::NAN,
                    h: f64::NAN,
                    horizon: 0.0,
                    dt: 0.0,
                    seed: ctx.config.seed,
                    value,
                })
                .collect();
            ctx.csv("commutator.csv", &lines, files)?;
            let rep = ProbeReport::new(
                "commutator",
                vec![("gamma".into(), gamma), ("r".into(), *r)],
                ratios,
                vec![ctx.config.seed; j.len()],
            )?;
            ctx.report("commutator_report.csv", &rep, files)?;
            summarize(ctx, "commutator", &rep, rows);
        }
        ProbeSpec::ForcingBounds { r1, r2 } => {
            let norm = data_norm(&ctx.data, s);
            let mut local = Vec::new();
            for &j in &levels {
                let (low, high) = split_data(&ctx.data, j)?;
                let v = evolve(&high, &ctx.solver.with_sample_every(1)?, RhsMode::High)?;
                let u = evolve(
                    &low,
                    &ctx.solver.with_sample_every(1)?,
                    RhsMode::Perturbed(&v),
                )?;
                let rep = forcing_bound_check(&u, &high, j, s, *r1, *r2, norm)?;
                if rep.hypothesis_warning {
                    log::warn!(
                        "J = {j}: energy exceeds the growth hypothesis by {:.2}",
                        rep.hypothesis_ratio
                    );
                }
                for (q, v) in [
                    ("potential_integral", rep.potential_integral),
                    ("mixed_integral", rep.mixed_integral),
                    ("potential_ratio", rep.potential_ratio),
                    ("mixed_ratio", rep.mixed_ratio),
                    ("sup_energy", rep.sup_energy),
                    ("hypothesis_ratio", rep.hypothesis_ratio),
                ] {
                    local.push(ctx.row("forcing-bounds", j, q, v));
                }
            }
            ctx.csv("forcing_bounds.csv", &local, files)?;
            rows.extend(local);
        }
        ProbeSpec::BootstrapTable {
            r1,
            r2,
            levels: top,
            constants,
        } => {
            let k = match constants {
                Some(c) => BootstrapConstants::new(*c, *r1, *r2, gamma)?,
                None => BootstrapConstants::unit(*r1, *r2, gamma)?,
            };
            let gate = exponent_gate(s, gamma, *r1, *r2)?;
            println!(
                "gate margin {:+.6} ({})",
                gate.margin,
                if gate.passes { "passes" } else { "fails" }
            );
            rows.push(ctx.row("bootstrap-table", 0, "gate_margin", gate.margin));
            if !gate.passes {
                return Ok(());
            }
            #[derive(Serialize)]
            struct Line {
                #[serde(rename = "J")]
                j: i32,
                time: f64,
                t1: f64,
                t2: f64,
                t3: f64,
                t4: f64,
                t5: f64,
            }
            let norm = data_norm(&ctx.data, s);
            let mut lines = Vec::new();
            for j in 1..=*top {
                let t = bootstrap_terms(j as f64, s, gamma, &k, norm)?;
                let time = t.iter().cloned().fold(f64::INFINITY, f64::min);
                rows.push(ctx.row("bootstrap-table", j, "time", time));
                lines.push(Line {
                    j,
                    time,
                    t1: t[0],
                    t2: t[1],
                    t3: t[2],
                    t4: t[3],
                    t5: t[4],
                });
            }
            ctx.csv("bootstrap.csv", &lines, files)?;
        }
        ProbeSpec::SplitBounds { sigma } => {
            let s0 = derive_exponents(gamma)?.s0;
            let sigma = sigma.unwrap_or(s0);
            let ledgers = levels
                .iter()
                .map(|&j| ledger_at(&ctx.data, j, s, &[sigma, 1.0]))
                .collect::<kgh_core::Result<Vec<_>>>()?;
            let rep = verify_split_bounds(&ledgers, sigma)?;
            let mut local = Vec::new();
            for r in &rep.rows {
                local.push(ctx.row("split-bounds", r.j, "rho_high", r.rho_high));
                local.push(ctx.row("split-bounds", r.j, "rho_low", r.rho_low));
            }
            local.push(ctx.row("split-bounds", -1, "rho_high_spread", rep.rho_high_spread));
            local.push(ctx.row("split-bounds", -1, "rho_low_spread", rep.rho_low_spread));
            ctx.csv("split_bounds.csv", &local, files)?;
            rows.extend(local);
        }
        ProbeSpec::EnergyGrowth => {
            let energy_rows = levels
                .iter()
                .map(|&j| low_frequency_energy(&ctx.data, j, s, &ctx.solver))
                .collect::<kgh_core::Result<Vec<_>>>()?;
            let mut local = Vec::new();
            for r in &energy_rows {
                local.push(ctx.row("energy-growth", r.j, "sup_energy", r.sup_energy));
                local.push(ctx.row("energy-growth", r.j, "ratio", r.ratio));
            }
            if energy_rows.len() >= 2 {
                let fit = energy_growth_slope(&energy_rows)?;
                local.push(ctx.row("energy-growth", -1, "slope", fit.slope));
            }
            ctx.csv("energy_growth.csv", &local, files)?;
            rows.extend(local);
        }
        ProbeSpec::Trajectory { snapshots } => {
            let traj = evolve(&ctx.data, &ctx.solver, RhsMode::Full)?;
            rows.push(ctx.row(
                "trajectory",
                -1,
                "hamiltonian_drift",
                hamiltonian_drift(&traj),
            ));
            if *snapshots {
                let dir = ctx.out.join("trajectory");
                std::fs::create_dir_all(&dir)?;
                export_trajectory(&traj, &dir)?;
                files.push(dir);
            }
        }
    }
    Ok(())
}

fn summarize(ctx: &Context, name: &str, rep: &ProbeReport, rows: &mut Vec<ExperimentRow>) {
    rows.push(ctx.row(name, -1, "max", rep.max));
    rows.push(ctx.row(name, -1, "min", rep.min));
    rows.push(ctx.row(name, -1, "maxmin_ratio", rep.maxmin_ratio));
}

/// Messages for every violated gate; a gate with no matching measurement fails.
pub fn check_gates(gates: &[Gate], rows: &[ExperimentRow]) -> Vec<String> {
    let mut failures = Vec::new();
    for g in gates {
        let hits: Vec<&ExperimentRow> = rows
            .iter()
            .filter(|r| format!("{}.{}", r.experiment, r.quantity) == g.quantity)
            .collect();
        if hits.is_empty() {
            failures.push(format!("{}: nothing measured", g.quantity));
        }
        for r in hits {
            let low = g.min.is_some_and(|m| !(r.value >= m));
            let high = g.max.is_some_and(|m| !(r.value <= m));
            if low || high {
                failures.push(format!(
                    "{} (J = {}): {} outside [{}, {}]",
                    g.quantity,
                    r.j,
                    r.value,
                    g.min.map_or("-inf".into(), |m| m.to_string()),
                    g.max.map_or("inf".into(), |m| m.to_string()),
                ));
            }
        }
    }
    failures
}
