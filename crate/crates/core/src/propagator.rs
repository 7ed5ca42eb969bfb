//! Exact free Klein-Gordon flow, the Duhamel integral, space-time norms and
//! Strichartz probes.
//!
//! With `ω(ξ) = (1+|ξ|²)^{1/2}` the free flow acts mode by mode:
//! `φ̂(t) = cos(tω) φ̂₀ + sin(tω)/ω φ̂₁`, `φ̂_t(t) = −ω sin(tω) φ̂₀ + cos(tω) φ̂₁`.

use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{invalid, KghError, Result};
use crate::lp::{BallWindow, BesovParams, DyadicBank};
use crate::random::{gaussian_field, ProbeRng};
use crate::spectral::{
    lebesgue_norm_unchecked, sobolev_norm, CauchyPair, Complex64, GridSpec, RealField, Spectrum,
};

/// `ω(|ξ|) = (1+|ξ|²)^{1/2}`.
pub fn dispersion(norm: f64) -> f64 {
    (1.0 + norm * norm).sqrt()
}

/// Exponent triple `(q, r, θ)` satisfying the wave-Schrödinger interpolated
/// admissibility condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleTriple {
    q: f64,
    r: f64,
    theta: f64,
}

/// `q, r ≥ 2`, `θ ∈ [0,1]`, `(q,r,θ) ≠ (2,∞,0)` and `1/q + (2+θ)/(2r) ≤ (2+θ)/4`.
pub fn validate_admissible(q: f64, r: f64, theta: f64) -> bool {
    if q.is_nan() || r.is_nan() || theta.is_nan() {
        return false;
    }
    if q < 2.0 || r < 2.0 || !(0.0..=1.0).contains(&theta) {
        return false;
    }
    if q == 2.0 && r.is_infinite() && theta == 0.0 {
        return false;
    }
    1.0 / q + (2.0 + theta) / (2.0 * r) <= (2.0 + theta) / 4.0
}

impl AdmissibleTriple {
    pub fn new(q: f64, r: f64, theta: f64) -> Result<Self> {
        if !validate_admissible(q, r, theta) {
            return Err(invalid(
                "triple",
                format!("(q, r, θ) = ({q}, {r}, {theta}) is not admissible"),
            ));
        }
        Ok(Self { q, r, theta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Regularity σ of the Besov-valued component at resolution level μ.
    pub fn sigma(&self, mu: f64) -> f64 {
        1.0 / self.q - (3.0 + self.theta) * (0.5 - 1.0 / self.r) + mu
    }

    /// Frequency scaling exponent `(3+θ)/2 − (3+θ)/r − 1/q` of the homogeneous estimate.
    pub fn scaling_exponent(&self) -> f64 {
        (3.0 + self.theta) / 2.0 - (3.0 + self.theta) / self.r - 1.0 / self.q
    }
}

/// How a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    FreeFlow,
    Strang,
    Picard,
}

/// Time-ordered states at uniform spacing starting from the first sample's time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: GridSpec,
    dt: f64,
    samples: Vec<CauchyPair>,
    scheme: Scheme,
}

impl Trajectory {
    pub fn new(samples: Vec<CauchyPair>, dt: f64, scheme: Scheme) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| invalid("samples", "trajectory is empty"))?;
        if !(dt > 0.0) {
            return Err(invalid(
                "dt",
                format!("sample spacing {dt} must be positive"),
            ));
        }
        let grid = *first.grid();
        let t0 = first.time;
        for (k, s) in samples.iter().enumerate() {
            if !s.grid().same_geometry(&grid) {
                return Err(KghError::GridMismatch);
            }
            let expect = t0 + k as f64 * dt;
            if (s.time - expect).abs() > 1e-12 * expect.abs().max(1.0) {
                return Err(invalid(
                    "samples",
                    format!(
                        "sample {k} at t = {} is off the uniform grid ({expect})",
                        s.time
                    ),
                ));
            }
        }
        Ok(Self {
            grid,
            dt,
            samples,
            scheme,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn samples(&self) -> &[CauchyPair] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.samples[0].time
    }

    /// Length of the covered interval.
    pub fn horizon(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    pub fn terminal(&self) -> &CauchyPair {
        self.samples.last().expect("non-empty")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn positions(&self) -> impl Iterator<Item = &RealField> {
        self.samples.iter().map(|s| &s.position)
    }

    /// Linearly interpolated position at time `t`.
    pub fn position_at(&self, t: f64) -> Result<RealField> {
        let x = (t - self.start()) / self.dt;
        let last = (self.samples.len() - 1) as f64;
        if !(x >= -1e-9 && x <= last + 1e-9) {
            return Err(KghError::OutOfRange {
                index: x.round() as i64,
                reason: format!("t = {t} is outside the sampled window"),
            });
        }
        let k = (x.floor().max(0.0) as usize).min(self.samples.len() - 1);
        let w = x - k as f64;
        if w.abs() < 1e-9 || k + 1 == self.samples.len() {
            return Ok(self.samples[k].position.clone());
        }
        let a = &self.samples[k].position;
        let b = &self.samples[k + 1].position;
        a.zip_map(b, |p, q| (1.0 - w) * p + w * q)
    }

    /// Pointwise difference of two trajectories sampled at the same times.
    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.len() != other.len() || (self.dt - other.dt).abs() > 1e-12 {
            return Err(invalid("trajectory", "samplings differ"));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(samples, self.dt, self.scheme)
    }
}

/// Applies the free flow over `t` to a pair of spectra in place.
pub(crate) fn free_flow_spectra(pos: &mut Spectrum, vel: &mut Spectrum, t: f64) {
    let modes = pos.grid().modes();
    for ((p, v), &k) in pos
        .coeffs_mut()
        .iter_mut()
        .zip(vel.coeffs_mut().iter_mut())
        .zip(&modes.norm)
    {
        if *p == Complex64::default() && *v == Complex64::default() {
            continue;
        }
        let w = dispersion(k);
        let (s, c) = (t * w).sin_cos();
        let (p0, v0) = (*p, *v);
        *p = p0 * c + v0 * (s / w);
        *v = v0 * c - p0 * (w * s);
    }
}

/// Exact free evolution of `data` by `t`.
pub fn free_flow(data: &CauchyPair, t: f64) -> CauchyPair {
    let mut p = data.position.spectrum().clone();
    let mut v = data.velocity.spectrum().clone();
    free_flow_spectra(&mut p, &mut v, t);
    CauchyPair {
        position: p.to_field(),
        velocity: v.to_field(),
        time: data.time + t,
    }
}

/// Free trajectory sampled at `t_k = k·horizon/steps`, `k = 0..=steps`.
pub fn free_trajectory(data: &CauchyPair, horizon: f64, steps: usize) -> Result<Trajectory> {
    if steps == 0 || !(horizon > 0.0) {
        return Err(invalid(
            "steps",
            "need a positive horizon and at least one step",
        ));
    }
    let dt = horizon / steps as f64;
    let samples = (0..=steps)
        .map(|k| free_flow(data, k as f64 * dt))
        .collect();
    Trajectory::new(samples, dt, Scheme::FreeFlow)
}

/// Per-mode energy density `|φ̂_t|² + ω²|φ̂|²`, in flat-index order.
pub fn mode_energies(data: &CauchyPair) -> Vec<f64> {
    let p = data.position.spectrum();
    let v = data.velocity.spectrum();
    let modes = p.grid().modes();
    p.coeffs()
        .iter()
        .zip(v.coeffs())
        .zip(&modes.norm)
        .map(|((a, b), &k)| b.norm_sqr() + (1.0 + k * k) * a.norm_sqr())
        .collect()
}

fn trapezoid_weight(k: usize, m: usize) -> f64 {
    if m == 0 {
        0.0
    } else if k == 0 || k == m {
        0.5
    } else {
        1.0
    }
}

/// `∫₀^{t} K(t−τ) f(τ) dτ` by the composite trapezoid rule.
///
/// `forcing[k]` is `f(k·dt)`; `t` must be a sample time.
pub fn duhamel(forcing: &[RealField], dt: f64, t: f64) -> Result<RealField> {
    let first = forcing
        .first()
        .ok_or_else(|| invalid("forcing", "no samples"))?;
    let m_real = t / dt;
    let m = m_real.round();
    if !(m >= 0.0) || (m_real - m).abs() > 1e-9 {
        return Err(invalid(
            "t",
            format!("t = {t} is not a multiple of dt = {dt}"),
        ));
    }
    let m = m as usize;
    if m >= forcing.len() {
        return Err(KghError::OutOfRange {
            index: m as i64,
            reason: format!("t = {t} is beyond the forcing horizon"),
        });
    }
    let grid = *first.grid();
    let modes = grid.modes();
    let mut acc = vec![Complex64::default(); grid.len()];
    for (k, f) in forcing.iter().enumerate().take(m + 1) {
        f.check_same_grid(first)?;
        let w = trapezoid_weight(k, m) * dt;
        if w == 0.0 {
            continue;
        }
        let lag = (m - k) as f64 * dt;
        for ((a, c), &n) in acc.iter_mut().zip(f.spectrum().coeffs()).zip(&modes.norm) {
            let om = dispersion(n);
            *a += c * (w * (lag * om).sin() / om);
        }
    }
    Ok(Spectrum::from_coeffs(grid, acc)?.to_field())
}

/// Running Duhamel integral `D(t_m) = ∫₀^{t_m} K(t_m−τ) f̂(τ) dτ` and its time
/// derivative, for every sample `m`, in spectral form.
///
/// Uses `sin((t−τ)ω) = sin tω cos τω − cos tω sin τω` so the whole series
/// costs one pass over the forcing.
pub(crate) fn duhamel_series(forcing: &[Spectrum], dt: f64) -> Vec<(Spectrum, Spectrum)> {
    let Some(first) = forcing.first() else {
        return Vec::new();
    };
    let grid = *first.grid();
    let modes = grid.modes();
    let len = grid.len();
    let mut c_sum = vec![Complex64::default(); len];
    let mut s_sum = vec![Complex64::default(); len];
    let mut out = Vec::with_capacity(forcing.len());
    for (m, f) in forcing.iter().enumerate() {
        let tau = m as f64 * dt;
        // trapezoid: the new endpoint enters with half weight, and is promoted to
        // its final weight on the next step
        let mut pos = vec![Complex64::default(); len];
        let mut vel = vec![Complex64::default(); len];
        for i in 0..len {
            let om = dispersion(modes.norm[i]);
            let (s, c) = (tau * om).sin_cos();
            let contrib = f.coeffs()[i] * (0.5 * dt);
            if m > 0 {
                let w = if m == 1 { 0.5 } else { 1.0 };
                let prev = forcing[m - 1].coeffs()[i] * (w * dt);
                let (sp, cp) = (((m - 1) as f64 * dt) * om).sin_cos();
                c_sum[i] += prev * cp;
                s_sum[i] += prev * sp;
            }
            let cc = c_sum[i] + contrib * c;
            let ss = s_sum[i] + contrib * s;
            // D = (sin tω·C − cos tω·S)/ω,  D_t = cos tω·C + sin tω·S
            pos[i] = (cc * s - ss * c) / om;
            vel[i] = cc * c + ss * s;
        }
        out.push((
            Spectrum::from_coeffs(grid, pos).expect("finite"),
            Spectrum::from_coeffs(grid, vel).expect("finite"),
        ));
    }
    out
}

/// Mixed norm `‖φ‖_{L^q_t L^r_x}` with its quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeNormRecord {
    pub q: f64,
    pub r: f64,
    pub value: f64,
    pub dt: f64,
    pub horizon: f64,
}

/// Trapezoid-in-time norm of per-sample values; `q = ∞` takes the max.
pub(crate) fn time_norm(values: &[f64], dt: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(*v));
    }
    let m = values.len() - 1;
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(k, v)| trapezoid_weight(k, m) * v.powf(q))
        .sum();
    (sum * dt).powf(1.0 / q)
}

fn check_exponents(q: f64, r: f64) -> Result<()> {
    for (name, v) in [("q", q), ("r", r)] {
        if v.is_nan() || v < 1.0 {
            return Err(invalid(name, format!("{v} is below 1")));
        }
    }
    Ok(())
}

/// `‖φ‖_{L^q([0,T]; L^r)}` of the position component.
pub fn spacetime_norm(traj: &Trajectory, q: f64, r: f64) -> Result<SpaceTimeNormRecord> {
    let fields: Vec<&RealField> = traj.positions().collect();
    spacetime_norm_fields(&fields, traj.dt(), q, r)
}

/// Same as [`spacetime_norm`] for a bare field series.
pub fn spacetime_norm_fields(
    fields: &[&RealField],
    dt: f64,
    q: f64,
    r: f64,
) -> Result<SpaceTimeNormRecord> {
    check_exponents(q, r)?;
    if fields.is_empty() {
        return Err(invalid("trajectory", "no samples"));
    }
    let norms: Vec<f64> = fields
        .iter()
        .map(|f| lebesgue_norm_unchecked(f, r))
        .collect();
    Ok(SpaceTimeNormRecord {
        q,
        r,
        value: time_norm(&norms, dt, q),
        dt,
        horizon: (fields.len() - 1) as f64 * dt,
    })
}

/// Finite approximation of the resolution-space norm at level μ:
/// `sup_t ‖φ‖_{H^μ}` plus the largest `‖φ‖_{L^q(B^σ_{r,2})}` over the triples.
pub fn resolution_norm(traj: &Trajectory, mu: f64, triples: &[AdmissibleTriple]) -> Result<f64> {
    let fields: Vec<&RealField> = traj.positions().collect();
    resolution_norm_fields(&fields, traj.dt(), mu, triples)
}

pub fn resolution_norm_fields(
    fields: &[&RealField],
    dt: f64,
    mu: f64,
    triples: &[AdmissibleTriple],
) -> Result<f64> {
    if fields.is_empty() {
        return Err(invalid("trajectory", "no samples"));
    }
    let energy = fields
        .iter()
        .map(|f| sobolev_norm(f, mu))
        .fold(0.0, f64::max);
    if triples.is_empty() {
        return Ok(energy);
    }
    let bank = DyadicBank::new(*fields[0].grid())?;
    let mut best: f64 = 0.0;
    for t in triples {
        let params = BesovParams::inhomogeneous(t.sigma(mu), t.r(), 2.0)?;
        let norms = fields
            .iter()
            .map(|f| bank.besov_norm(f, &params))
            .collect::<Result<Vec<_>>>()?;
        best = best.max(time_norm(&norms, dt, t.q()));
    }
    Ok(energy + best)
}

/// Homogeneous Strichartz ratio for the block-j part of `data` under the free flow.
///
/// `‖Δ_j u‖_{L^q L^r} / (2^{j((3+θ)/2−(3+θ)/r−1/q)} (‖Δ_j u₀‖₂ + 2^{−j}‖Δ_j u₁‖₂))`
/// with time samples `k·horizon/steps`.
pub fn strichartz_ratio(
    data: &CauchyPair,
    j: i32,
    triple: &AdmissibleTriple,
    horizon: f64,
    steps: usize,
) -> Result<f64> {
    let bank = DyadicBank::new(*data.grid())?;
    let local = CauchyPair::new(
        bank.block(&data.position, j)?,
        bank.block(&data.velocity, j)?,
        0.0,
    )?;
    let scale = (j as f64).exp2();
    let denom = scale.powf(triple.scaling_exponent())
        * (lebesgue_norm_unchecked(&local.position, 2.0)
            + lebesgue_norm_unchecked(&local.velocity, 2.0) / scale);
    if denom == 0.0 {
        return Err(KghError::UndefinedRatio(format!(
            "block {j} of the data is empty"
        )));
    }
    let norms = free_norm_samples(&local, horizon, steps, &[triple.r()])?;
    Ok(time_norm(&norms[0], horizon / steps as f64, triple.q()) / denom)
}

/// `‖u(t_k)‖_{L^r}` for each requested `r` without storing the trajectory.
fn free_norm_samples(
    data: &CauchyPair,
    horizon: f64,
    steps: usize,
    rs: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if steps == 0 || !(horizon > 0.0) {
        return Err(invalid(
            "steps",
            "need a positive horizon and at least one step",
        ));
    }
    let dt = horizon / steps as f64;
    let p0 = data.position.spectrum();
    let v0 = data.velocity.spectrum();
    let grid = *data.grid();
    let mut out = vec![Vec::with_capacity(steps + 1); rs.len()];
    for k in 0..=steps {
        let mut p = p0.clone();
        let mut v = v0.clone();
        free_flow_spectra(&mut p, &mut v, k as f64 * dt);
        let field = RealField::from_raw(grid, p.to_values());
        for (slot, &r) in out.iter_mut().zip(rs) {
            slot.push(lebesgue_norm_unchecked(&field, r));
        }
    }
    Ok(out)
}

/// Least-squares fit of `y = a + slope·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(invalid("points", "need at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("points", "abscissae coincide"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        points: points.to_vec(),
    })
}

/// Setup of the ball-localized Strichartz slope probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProbe {
    pub grid: GridSpec,
    pub j: i32,
    pub h_list: Vec<f64>,
    /// Ball center; it is snapped to the nearest lattice wavevector.
    pub center: [f64; 3],
    pub horizon: f64,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl SlopeProbe {
    /// Center on the first axis at `|ξ| = 2^{j−2}`, horizon `L/4`.
    pub fn new(grid: GridSpec, j: i32, h_list: Vec<f64>, trials: usize, seed: u64) -> Self {
        let horizon = grid.box_length() / 4.0;
        Self {
            grid,
            j,
            h_list,
            center: [(j as f64 - 2.0).exp2(), 0.0, 0.0],
            horizon,
            steps: 32,
            trials,
            seed,
        }
    }

    fn snapped_center(&self) -> [f64; 3] {
        let u = self.grid.wavenumber_unit();
        self.center.map(|c| (c / u).round() * u)
    }
}

/// Strichartz exponent sharp for the wave endpoint: `1/q = 1/2 − 1/r`.
pub fn sharp_wave_exponent(r: f64) -> f64 {
    let inv = 0.5 - 1.0 / r;
    if inv <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

/// Measured normalized norms for one `(r, h)` cell, one entry per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeSample {
    pub r: f64,
    pub h: f64,
    pub trial: usize,
    pub seed: u64,
    pub value: f64,
}

/// Runs the ball-localized probe for each `r` and fits `log(norm)` against `log(h)`.
///
/// Data are complex Gaussian on the symmetric ball pair, evolved freely; the
/// `L^q_t L^r_x` norm with `q` sharp for the wave endpoint is normalized by
/// `2^{j(3/2−3/r−1/q)}(‖u₀‖₂ + 2^{−j}‖u₁‖₂)`. Log-norms are averaged over
/// trials before the fit.
pub fn precise_strichartz_slopes(
    probe: &SlopeProbe,
    rs: &[f64],
) -> Result<(Vec<SlopeFit>, Vec<SlopeSample>)> {
    if probe.h_list.len() < 3 {
        return Err(invalid("h_list", "need at least three h values"));
    }
    if probe.trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    if probe.horizon > probe.grid.box_length() / 4.0 + 1e-12 {
        return Err(invalid("horizon", "must not exceed L/4"));
    }
    for &r in rs {
        if !(r >= 2.0) {
            return Err(invalid("r", format!("{r} is below 2")));
        }
    }
    let center = probe.snapped_center();
    let windows = probe
        .h_list
        .iter()
        .map(|&h| BallWindow::new(center, probe.j, h))
        .collect::<Result<Vec<_>>>()?;
    for w in &windows {
        if w.norm() + w.radius() > probe.grid.dealiased_radius() {
            return Err(invalid("h_list", "ball leaves the dealiased band"));
        }
    }
    let cells: Vec<(usize, usize)> = (0..windows.len())
        .flat_map(|i| (0..probe.trials).map(move |t| (i, t)))
        .collect();
    let scale = (probe.j as f64).exp2();
    let dt = probe.horizon / probe.steps as f64;
    let results = cells
        .par_iter()
        .map(|&(i, trial)| -> Result<Vec<SlopeSample>> {
            let w = windows[i];
            let seed = probe.seed.wrapping_add(trial as u64);
            let mut rng = ProbeRng::seed_from_u64(seed);
            let grid = probe.grid;
            let p = gaussian_field(grid, &mut rng, |v| w.contains_symmetric(&v.xi));
            let v = gaussian_field(grid, &mut rng, |v| w.contains_symmetric(&v.xi));
            let data_norm =
                lebesgue_norm_unchecked(&p, 2.0) + lebesgue_norm_unchecked(&v, 2.0) / scale;
            if data_norm == 0.0 {
                return Err(KghError::UndefinedRatio(format!(
                    "ball of radius {} holds no lattice modes",
                    w.radius()
                )));
            }
            let data = CauchyPair::new(p, v, 0.0)?;
            let norms = free_norm_samples(&data, probe.horizon, probe.steps, rs)?;
            Ok(rs
                .iter()
                .zip(&norms)
                .map(|(&r, series)| {
                    let q = sharp_wave_exponent(r);
                    let gain = scale.powf(1.5 - 3.0 / r - 1.0 / q);
                    SlopeSample {
                        r,
                        h: w.h(),
                        trial,
                        seed,
                        value: time_norm(series, dt, q) / (gain * data_norm),
                    }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<SlopeSample> = results.into_iter().flatten().collect();
    let fits = rs
        .iter()
        .map(|&r| {
            let points: Vec<(f64, f64)> = probe
                .h_list
                .iter()
                .map(|&h| {
                    let logs: Vec<f64> = samples
                        .iter()
                        .filter(|s| s.r == r && s.h == h)
                        .map(|s| s.value.ln())
                        .collect();
                    (h.ln(), logs.iter().sum::<f64>() / logs.len() as f64)
                })
                .collect();
            fit_slope(&points)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((fits, samples))
}

/// Single-`r` convenience wrapper around [`precise_strichartz_slopes`].
pub fn precise_strichartz_slope(probe: &SlopeProbe, r: f64) -> Result<SlopeFit> {
    let (mut fits, _) = precise_strichartz_slopes(probe, &[r])?;
    Ok(fits.remove(0))
}
