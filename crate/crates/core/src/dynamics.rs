//! Hartree nonlinearity, Strang time stepping, energy functionals and the
//! Picard fixed-point solver.
//!
//! The equation is `φ_tt − Δφ + φ + 𝓘(φ²)φ = 0` with 𝓘 the Riesz potential of
//! order `3 − γ`. Products are formed on the grid and projected onto the 2/3
//! cube, so the discrete system is Hamiltonian for
//! `H = E + ¼⟨𝓘P(φ²), P(φ²)⟩`.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::error::{invalid, KghError, Result};
use crate::propagator::{duhamel_series, free_flow_spectra, Scheme, Trajectory};
use crate::spectral::snapshot::{write_snapshot, FieldKind};
use crate::spectral::{riesz_spectrum, sobolev_norm, CauchyPair, GridSpec, RealField, Spectrum};

/// Step size, horizon and output stride of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    dt: f64,
    horizon: f64,
    dealias: bool,
    sample_every: usize,
}

impl SolverConfig {
    /// `horizon / dt` must be an integer to 1e−9.
    pub fn new(dt: f64, horizon: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("{dt} must be positive")));
        }
        if !(horizon >= dt && horizon.is_finite()) {
            return Err(invalid(
                "T",
                format!("horizon {horizon} is shorter than dt = {dt}"),
            ));
        }
        let ratio = horizon / dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(invalid("T", format!("T / dt = {ratio} is not an integer")));
        }
        Ok(Self {
            dt,
            horizon,
            dealias: true,
            sample_every: 1,
        })
    }

    /// Keep every `k`-th step; `k` must divide the step count.
    pub fn with_sample_every(mut self, k: usize) -> Result<Self> {
        if k == 0 || !self.steps().is_multiple_of(k) {
            return Err(invalid(
                "sample_every",
                format!("{k} does not divide {} steps", self.steps()),
            ));
        }
        self.sample_every = k;
        Ok(self)
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn sample_every(&self) -> usize {
        self.sample_every
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

fn project(s: &mut Spectrum, dealias: bool) {
    if dealias {
        s.dealias();
    }
}

fn product_spectrum(a: &[f64], b: &[f64], grid: GridSpec, dealias: bool) -> Spectrum {
    let values = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut s = RealField::from_raw(grid, values).spectrum().clone();
    project(&mut s, dealias);
    s
}

/// `P[𝓘P(φ²)·φ]` from the spectrum of φ.
pub(crate) fn hartree_spectrum(phi: &Spectrum, dealias: bool) -> Spectrum {
    let grid = *phi.grid();
    let mut p = phi.clone();
    project(&mut p, dealias);
    let x = p.to_values();
    let sq = product_spectrum(&x, &x, grid, dealias);
    let pot = riesz_spectrum(&sq, grid.gamma()).to_values();
    product_spectrum(&pot, &x, grid, dealias)
}

/// Hartree term `𝓘(φ²)φ` with 2/3-rule truncation before each product.
pub fn hartree_nonlinearity(phi: &RealField) -> RealField {
    hartree_spectrum(phi.spectrum(), true).to_field()
}

fn perturbed_spectrum(u: &Spectrum, v: &Spectrum, dealias: bool) -> Spectrum {
    let grid = *u.grid();
    let gamma = grid.gamma();
    let (mut u, mut v) = (u.clone(), v.clone());
    project(&mut u, dealias);
    project(&mut v, dealias);
    let (x, y) = (u.to_values(), v.to_values());
    let a = riesz_spectrum(&product_spectrum(&x, &x, grid, dealias), gamma).to_values();
    let b = riesz_spectrum(&product_spectrum(&x, &y, grid, dealias), gamma).to_values();
    let c = riesz_spectrum(&product_spectrum(&y, &y, grid, dealias), gamma).to_values();
    // 𝓘(u²)u + 2𝓘(uv)u + 𝓘(v²)u + 𝓘(u²)v + 2𝓘(uv)v
    let values: Vec<f64> = (0..grid.len())
        .map(|i| (a[i] + 2.0 * b[i] + c[i]) * x[i] + (a[i] + 2.0 * b[i]) * y[i])
        .collect();
    let mut s = RealField::from_raw(grid, values).spectrum().clone();
    project(&mut s, dealias);
    s
}

/// The five interaction terms acting on the low part `u` in the presence of `v`.
pub fn perturbed_nonlinearity(u: &RealField, v: &RealField) -> Result<RealField> {
    u.check_same_grid(v)?;
    Ok(perturbed_spectrum(u.spectrum(), v.spectrum(), true).to_field())
}

/// Right-hand side used by [`evolve`].
#[derive(Debug, Clone, Copy)]
pub enum RhsMode<'a> {
    /// The full equation for φ.
    Full,
    /// The same equation posed for the high-frequency part v.
    High,
    /// The low-frequency equation driven by a precomputed high part.
    Perturbed(&'a Trajectory),
}

fn check_finite(s: &Spectrum, step: usize, what: &str) -> Result<()> {
    if s.coeffs()
        .iter()
        .all(|c| c.re.is_finite() && c.im.is_finite())
    {
        Ok(())
    } else {
        Err(KghError::SolverAbort {
            step,
            reason: format!("non-finite {what}"),
        })
    }
}

/// Strang kick-drift-kick integration with the exact linear flow.
///
/// Consecutive half kicks are merged, so each step costs one evaluation of the
/// nonlinearity.
pub fn evolve(data: &CauchyPair, config: &SolverConfig, mode: RhsMode<'_>) -> Result<Trajectory> {
    let grid = *data.grid();
    let dealias = config.dealias();
    let dt = config.dt();
    let t0 = data.time;
    if let RhsMode::Perturbed(v) = mode {
        if !v.grid().same_geometry(&grid) {
            return Err(KghError::GridMismatch);
        }
        if v.start() > t0 + 1e-12 || v.start() + v.horizon() < t0 + config.horizon() - 1e-9 {
            return Err(invalid(
                "v",
                "high-frequency trajectory does not cover [0, T]",
            ));
        }
    }
    let forcing = |pos: &Spectrum, t: f64| -> Result<Spectrum> {
        Ok(match mode {
            RhsMode::Full | RhsMode::High => hartree_spectrum(pos, dealias),
            RhsMode::Perturbed(v) => {
                let vt = v.position_at(t)?;
                perturbed_spectrum(pos, vt.spectrum(), dealias)
            }
        })
    };

    let mut pos = data.position.spectrum().clone();
    let mut vel = data.velocity.spectrum().clone();
    let stride = config.sample_every();
    let mut samples = Vec::with_capacity(config.steps() / stride + 1);
    samples.push(data.clone());
    let mut kick = forcing(&pos, t0)?;
    for step in 1..=config.steps() {
        vel.axpy(-0.5 * dt, &kick);
        free_flow_spectra(&mut pos, &mut vel, dt);
        let t = t0 + step as f64 * dt;
        kick = forcing(&pos, t)?;
        check_finite(&kick, step, "nonlinearity")?;
        vel.axpy(-0.5 * dt, &kick);
        check_finite(&pos, step, "position")?;
        check_finite(&vel, step, "velocity")?;
        if step % stride == 0 {
            // no cached spectra: stored samples dominate memory on large grids
            samples.push(CauchyPair {
                position: RealField::from_raw(grid, pos.to_values()),
                velocity: RealField::from_raw(grid, vel.to_values()),
                time: t,
            });
        }
    }
    Trajectory::new(samples, dt * stride as f64, Scheme::Strang)
}

/// `½‖φ‖²_{H¹} + ½‖φ_t‖²_{L²}`.
pub fn energy(pair: &CauchyPair) -> f64 {
    0.5 * sobolev_norm(&pair.position, 1.0).powi(2)
        + 0.5 * sobolev_norm(&pair.velocity, 0.0).powi(2)
}

/// `¼⟨𝓘P(φ²), P(φ²)⟩`, nonnegative since the Riesz symbol is.
pub fn quartic_term(phi: &RealField) -> f64 {
    let grid = *phi.grid();
    let mut p = phi.spectrum().clone();
    p.dealias();
    let x = p.to_values();
    let sq = product_spectrum(&x, &x, grid, true);
    let gamma = grid.gamma();
    0.25 * sq.weighted_norm_sq(|k| crate::spectral::riesz_symbol(k, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub time: f64,
    pub energy: f64,
    pub hamiltonian: f64,
    pub quartic: f64,
}

/// Energy, quartic term and their sum at the pair's time, using the grid's γ.
pub fn hamiltonian(pair: &CauchyPair) -> EnergyReport {
    let e = energy(pair);
    let q = quartic_term(&pair.position);
    EnergyReport {
        time: pair.time,
        energy: e,
        hamiltonian: e + q,
        quartic: q,
    }
}

/// Largest `|H(t) − H(0)|` along a trajectory.
pub fn hamiltonian_drift(traj: &Trajectory) -> f64 {
    let h0 = hamiltonian(&traj.samples()[0]).hamiltonian;
    traj.samples()
        .iter()
        .map(|s| (hamiltonian(s).hamiltonian - h0).abs())
        .fold(0.0, f64::max)
}

/// Result of [`picard_solve`].
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    /// `sup_t ‖v_{k+1} − v_k‖_{L²}` per iterate.
    pub distances: Vec<f64>,
    /// Ratios of consecutive distances.
    pub factors: Vec<f64>,
    pub iterations: usize,
    /// `sup_t ‖v‖_{H^{s₀}}` of the limit.
    pub monitored_norm: f64,
    pub epsilon: f64,
}

impl PicardOutcome {
    pub fn within_bound(&self) -> bool {
        self.monitored_norm <= 2.0 * self.epsilon
    }
}

/// Absolute tolerance on `sup_t ‖v_{k+1} − v_k‖_{L²}`.
pub const PICARD_TOLERANCE: f64 = 1e-10;

/// Fixed-point iteration `v ↦ K̇(t)v₀ + K(t)v₁ − ∫₀ᵗ K(t−τ)𝓘(v²)v dτ`.
///
/// Smallness is measured as `sup_t ‖·‖_{H^{s₀}}` of the free evolution, with
/// `s₀ = γ/6`. Three consecutive contraction factors ≥ 1 signal divergence.
pub fn picard_solve(
    data: &CauchyPair,
    config: &SolverConfig,
    epsilon: f64,
    max_iter: usize,
) -> Result<PicardOutcome> {
    if max_iter == 0 {
        return Err(invalid("max_iter", "need at least one iterate"));
    }
    let grid = *data.grid();
    let s0 = grid.gamma() / 6.0;
    let dt = config.dt();
    let steps = config.steps();
    let dealias = config.dealias();

    let mut free_pos = Vec::with_capacity(steps + 1);
    let mut free_vel = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let mut p = data.position.spectrum().clone();
        let mut v = data.velocity.spectrum().clone();
        free_flow_spectra(&mut p, &mut v, k as f64 * dt);
        free_pos.push(p);
        free_vel.push(v);
    }
    let sup_norm = |series: &[Spectrum], s: f64| {
        series
            .iter()
            .map(|p| crate::spectral::sobolev_norm_spectrum(p, s))
            .fold(0.0, f64::max)
    };
    let free_size = sup_norm(&free_pos, s0);
    if free_size > epsilon {
        return Err(invalid(
            "epsilon",
            format!("free part has sup_t H^s0 norm {free_size:.3e} > epsilon = {epsilon:.3e}"),
        ));
    }

    let mut current = free_pos.clone();
    let mut current_vel = free_vel.clone();
    let mut distances = Vec::new();
    let mut factors = Vec::new();
    let mut above_one = 0;
    for iter in 1..=max_iter {
        let forcing: Vec<Spectrum> = current
            .iter()
            .map(|p| hartree_spectrum(p, dealias))
            .collect();
        let duh = duhamel_series(&forcing, dt);
        let next: Vec<Spectrum> = free_pos
            .iter()
            .zip(&duh)
            .map(|(f, (d, _))| {
                let mut s = f.clone();
                s.axpy(-1.0, d);
                s
            })
            .collect();
        let next_vel: Vec<Spectrum> = free_vel
            .iter()
            .zip(&duh)
            .map(|(f, (_, d))| {
                let mut s = f.clone();
                s.axpy(-1.0, d);
                s
            })
            .collect();
        let dist = next
            .iter()
            .zip(&current)
            .map(|(a, b)| {
                let mut d = a.clone();
                d.axpy(-1.0, b);
                d.weighted_norm_sq(|_| 1.0).sqrt()
            })
            .fold(0.0, f64::max);
        if !dist.is_finite() {
            return Err(KghError::Divergence {
                iterations: iter,
                factors,
            });
        }
        if let Some(&prev) = distances.last() {
            let f: f64 = if prev > 0.0 { dist / prev } else { 0.0 };
            factors.push(f);
            above_one = if f >= 1.0 { above_one + 1 } else { 0 };
        }
        distances.push(dist);
        current = next;
        current_vel = next_vel;
        log::debug!("picard iterate {iter}: distance {dist:.3e}");
        if above_one >= 3 {
            return Err(KghError::Divergence {
                iterations: iter,
                factors,
            });
        }
        if dist < PICARD_TOLERANCE {
            break;
        }
    }
    let iterations = distances.len();
    let monitored_norm = sup_norm(&current, s0);
    if monitored_norm > 2.0 * epsilon {
        log::warn!("picard limit norm {monitored_norm:.3e} exceeds 2 epsilon");
    }
    let samples = current
        .iter()
        .zip(&current_vel)
        .enumerate()
        .map(|(k, (p, v))| CauchyPair {
            position: p.to_field(),
            velocity: v.to_field(),
            time: data.time + k as f64 * dt,
        })
        .collect();
    Ok(PicardOutcome {
        trajectory: Trajectory::new(samples, dt, Scheme::Picard)?,
        distances,
        factors,
        iterations,
        monitored_norm,
        epsilon,
    })
}

#[derive(Debug, Serialize)]
struct IndexRow {
    step: usize,
    t: f64,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "H")]
    hamiltonian: f64,
    quartic: f64,
}

/// Writes `position_NNNNN.kgh`, `velocity_NNNNN.kgh` per sample and `index.csv`.
pub fn export_trajectory(traj: &Trajectory, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut index = csv::Writer::from_path(dir.join("index.csv"))?;
    for (step, s) in traj.samples().iter().enumerate() {
        for (field, kind, name) in [
            (&s.position, FieldKind::Position, "position"),
            (&s.velocity, FieldKind::Velocity, "velocity"),
        ] {
            let file = File::create(dir.join(format!("{name}_{step:05}.kgh")))?;
            write_snapshot(BufWriter::new(file), field, s.time, kind)?;
        }
        let e = hamiltonian(s);
        index.serialize(IndexRow {
            step,
            t: s.time,
            energy: e.energy,
            hamiltonian: e.hamiltonian,
            quartic: e.quartic,
        })?;
    }
    index.flush()?;
    Ok(())
}
