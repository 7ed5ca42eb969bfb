//! Frequency splitting of rough data, the norm ledger of the split, the
//! exponent gate with its bootstrap time, and end-to-end recombination runs.
//!
//! Data `φ` of regularity `s` is cut at level `J` into a smooth low part
//! `u = S_J φ` and a small high part `v = (I − S_J) φ`. The high part is
//! evolved by the full equation, the low part by the perturbed equation, and
//! `u + v` is compared with the direct evolution of `φ`.

use serde::Serialize;

use crate::dynamics::{energy, evolve, RhsMode, SolverConfig};
use crate::error::{invalid, KghError, Result};
use crate::lp::DyadicBank;
use crate::propagator::{fit_slope, SlopeFit, Trajectory};
use crate::spectral::{check_gamma, sobolev_norm, sobolev_norm_pair, CauchyPair};

/// Exponents attached to one value of γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSet {
    pub gamma: f64,
    /// Small-data regularity `γ/6`.
    pub s0: f64,
    /// Interpolation parameter `6/γ − 2`.
    pub theta: f64,
    /// `(2γ − 4)/3`.
    pub alpha: f64,
    /// `(γ − 1)/3`.
    pub beta: f64,
    /// Regularity threshold `γ/4` for global existence.
    pub s_threshold: f64,
    /// Scaling-critical regularity `γ/2 − 1`, which the construction does not reach.
    pub scaling: f64,
    /// Conformal regularity `γ/4 − 1/4`, also not reached.
    pub conformal: f64,
}

pub fn derive_exponents(gamma: f64) -> Result<ExponentSet> {
    check_gamma(gamma)?;
    Ok(ExponentSet {
        gamma,
        s0: gamma / 6.0,
        theta: 6.0 / gamma - 2.0,
        alpha: (2.0 * gamma - 4.0) / 3.0,
        beta: (gamma - 1.0) / 3.0,
        s_threshold: gamma / 4.0,
        scaling: gamma / 2.0 - 1.0,
        conformal: gamma / 4.0 - 0.25,
    })
}

impl ExponentSet {
    /// The regularities at which the split parts are measured: `s₀, α, β, s, 1`.
    pub fn ledger_sigmas(&self, s: f64) -> Vec<f64> {
        vec![self.s0, self.alpha, self.beta, s, 1.0]
    }
}

/// `(S_J φ, (I − S_J) φ)` for both components. `J` may be `j_max + 1`.
pub fn split_data(data: &CauchyPair, j: i32) -> Result<(CauchyPair, CauchyPair)> {
    if j < 0 {
        return Err(KghError::OutOfRange {
            index: j as i64,
            reason: "split level must be nonnegative".into(),
        });
    }
    let bank = DyadicBank::new(*data.grid())?;
    let low = CauchyPair::new(
        bank.low_pass(&data.position, j)?,
        bank.low_pass(&data.velocity, j)?,
        data.time,
    )?;
    let high = CauchyPair::new(
        bank.high_pass(&data.position, j)?,
        bank.high_pass(&data.velocity, j)?,
        data.time,
    )?;
    Ok((low, high))
}

/// `‖φ₀‖_{H^σ} + ‖φ₁‖_{H^{σ−1}}`.
pub fn data_norm(pair: &CauchyPair, sigma: f64) -> f64 {
    let (a, b) = sobolev_norm_pair(pair, sigma);
    a + b
}

/// Norms of one split of one data pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NormLedger {
    pub j: i32,
    pub s: f64,
    /// Norm of the whole data at regularity `s`.
    pub total: f64,
    /// `(σ, norm of the high part at σ)`.
    pub high: Vec<(f64, f64)>,
    /// `(σ, norm of the low part at σ)`.
    pub low: Vec<(f64, f64)>,
}

impl NormLedger {
    fn lookup(entries: &[(f64, f64)], sigma: f64) -> Result<f64> {
        entries
            .iter()
            .find(|(s, _)| (s - sigma).abs() < 1e-12)
            .map(|&(_, v)| v)
            .ok_or_else(|| invalid("sigma", format!("{sigma} is not in the ledger")))
    }

    pub fn high_norm(&self, sigma: f64) -> Result<f64> {
        Self::lookup(&self.high, sigma)
    }

    pub fn low_norm(&self, sigma: f64) -> Result<f64> {
        Self::lookup(&self.low, sigma)
    }
}

pub fn norm_ledger(
    data: &CauchyPair,
    low: &CauchyPair,
    high: &CauchyPair,
    j: i32,
    s: f64,
    sigmas: &[f64],
) -> NormLedger {
    NormLedger {
        j,
        s,
        total: data_norm(data, s),
        high: sigmas.iter().map(|&g| (g, data_norm(high, g))).collect(),
        low: sigmas.iter().map(|&g| (g, data_norm(low, g))).collect(),
    }
}

/// Splits at `j` and fills the ledger.
pub fn ledger_at(data: &CauchyPair, j: i32, s: f64, sigmas: &[f64]) -> Result<NormLedger> {
    let (low, high) = split_data(data, j)?;
    Ok(norm_ledger(data, &low, &high, j, s, sigmas))
}

/// Measured constants of the split bounds at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitBoundRow {
    pub j: i32,
    /// High-part norm at σ over `2^{J(σ−s)}` times the total.
    pub rho_high: f64,
    /// Low-part `H¹` norm over `2^{J(1−s)}` times the total.
    pub rho_low: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitBoundReport {
    pub sigma: f64,
    pub rows: Vec<SplitBoundRow>,
    pub rho_high_spread: f64,
    pub rho_low_spread: f64,
    /// False when σ > s, where no bound is claimed for the high part.
    pub high_bound_applies: bool,
}

fn spread(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::MIN, f64::max);
    let min = values.fold(f64::MAX, f64::min);
    max / min
}

pub fn verify_split_bounds(ledgers: &[NormLedger], sigma: f64) -> Result<SplitBoundReport> {
    let first = ledgers
        .first()
        .ok_or_else(|| invalid("ledgers", "no levels supplied"))?;
    let s = first.s;
    if sigma > s {
        log::info!("sigma = {sigma} exceeds s = {s}; the high-part ratio is reported only");
    }
    let rows = ledgers
        .iter()
        .map(|l| {
            if l.total == 0.0 {
                return Err(KghError::UndefinedRatio("data norm is zero".into()));
            }
            let scale = (l.j as f64).exp2();
            Ok(SplitBoundRow {
                j: l.j,
                rho_high: l.high_norm(sigma)? / (scale.powf(sigma - s) * l.total),
                rho_low: l.low_norm(1.0)? / (scale.powf(1.0 - s) * l.total),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitBoundReport {
        sigma,
        rho_high_spread: spread(rows.iter().map(|r| r.rho_high)),
        rho_low_spread: spread(rows.iter().map(|r| r.rho_low)),
        rows,
        high_bound_applies: sigma <= s,
    })
}

/// Sup of the energy of the low-frequency solution against the growth bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBoundRow {
    pub j: i32,
    /// `sup_{t ≤ T} E(u)(t)`.
    pub sup_energy: f64,
    /// `sup_energy / (2^{2J(1−s)} (𝓔² + 𝓔⁴))`.
    pub ratio: f64,
}

pub fn energy_bound(u: &Trajectory, j: i32, s: f64, data_norm: f64) -> EnergyBoundRow {
    let sup_energy = u.samples().iter().map(energy).fold(0.0, f64::max);
    let bound = (2.0 * j as f64 * (1.0 - s)).exp2() * (data_norm.powi(2) + data_norm.powi(4));
    EnergyBoundRow {
        j,
        sup_energy,
        ratio: if bound > 0.0 { sup_energy / bound } else { 0.0 },
    }
}

/// Least-squares slope of `log₂ sup_energy` against `J`.
pub fn energy_growth_slope(rows: &[EnergyBoundRow]) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.j as f64, r.sup_energy.log2()))
        .collect();
    if points.iter().any(|p| !p.1.is_finite()) {
        return Err(KghError::UndefinedRatio("zero energy in the sweep".into()));
    }
    fit_slope(&points)
}

/// Splits at `j`, evolves both parts over the configured horizon and returns
/// the low-frequency trajectory with its energy row.
pub fn low_frequency_energy(
    data: &CauchyPair,
    j: i32,
    s: f64,
    config: &SolverConfig,
) -> Result<EnergyBoundRow> {
    let (low, high) = split_data(data, j)?;
    let v = evolve(&high, &config.with_sample_every(1)?, RhsMode::High)?;
    let u = evolve(&low, config, RhsMode::Perturbed(&v))?;
    Ok(energy_bound(&u, j, s, data_norm(data, s)))
}

/// Outcome of the regularity condition of the bootstrap argument.
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub s: f64,
    /// `β, α/4 + s₀/2 + 1/4, 1/2, γ/2 − 3/4 + 1/(2r₁), γ/2 − 3/4 + 1/(2r₂)`.
    pub terms: [f64; 5],
    pub max: f64,
    pub margin: f64,
    pub passes: bool,
}

pub const GATE_TERM_NAMES: [&str; 5] = [
    "beta",
    "alpha/4 + s0/2 + 1/4",
    "1/2",
    "gamma/2 - 3/4 + 1/(2 r1)",
    "gamma/2 - 3/4 + 1/(2 r2)",
];

impl GateReport {
    /// Index of the largest term.
    pub fn binding_term(&self) -> usize {
        self.terms.iter().enumerate().fold(
            0,
            |best, (i, &t)| if t > self.terms[best] { i } else { best },
        )
    }
}

pub(crate) fn check_r_ranges(gamma: f64, r1: f64, r2: f64) -> Result<()> {
    let lo = 2f64.max(1.0 / (3.0 - gamma));
    let hi = 2.0 / (3.0 - gamma);
    if !(r1 > lo && r1 < hi) {
        return Err(invalid("r1", format!("{r1} is outside ({lo}, {hi})")));
    }
    let r2_lo = 4.0 / (gamma - 2.0);
    // tolerate the rounding in 4/(γ−2) so the endpoint itself is accepted
    if !(r2 >= r2_lo * (1.0 - 1e-12) && r2.is_finite()) {
        return Err(invalid("r2", format!("{r2} is outside [{r2_lo}, ∞)")));
    }
    Ok(())
}

pub fn exponent_gate(s: f64, gamma: f64, r1: f64, r2: f64) -> Result<GateReport> {
    let e = derive_exponents(gamma)?;
    check_r_ranges(gamma, r1, r2)?;
    let terms = [
        e.beta,
        e.alpha / 4.0 + e.s0 / 2.0 + 0.25,
        0.5,
        gamma / 2.0 - 0.75 + 1.0 / (2.0 * r1),
        gamma / 2.0 - 0.75 + 1.0 / (2.0 * r2),
    ];
    let max = terms.iter().cloned().fold(f64::MIN, f64::max);
    Ok(GateReport {
        s,
        terms,
        max,
        margin: s - max,
        passes: s > max,
    })
}

/// Implicit constants of the bootstrap estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConstants {
    pub c: [f64; 5],
    pub r1: f64,
    pub r2: f64,
}

impl BootstrapConstants {
    pub fn new(c: [f64; 5], r1: f64, r2: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if c.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(invalid("C", "constants must be positive"));
        }
        check_r_ranges(gamma, r1, r2)?;
        Ok(Self { c, r1, r2 })
    }

    pub fn unit(r1: f64, r2: f64, gamma: f64) -> Result<Self> {
        Self::new([1.0; 5], r1, r2, gamma)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            c: self.c.map(|x| x * factor),
            ..*self
        }
    }
}

/// The five candidate lifetimes at level `J`; the bootstrap time is their minimum.
pub fn bootstrap_terms(
    j: f64,
    s: f64,
    gamma: f64,
    k: &BootstrapConstants,
    data_norm: f64,
) -> Result<[f64; 5]> {
    let gate = exponent_gate(s, gamma, k.r1, k.r2)?;
    if !gate.passes {
        let i = gate.binding_term();
        return Err(KghError::GateFailed(format!(
            "s = {s} does not exceed {} = {:.6}",
            GATE_TERM_NAMES[i], gate.terms[i]
        )));
    }
    let e = derive_exponents(gamma)?;
    let (r1, r2) = (k.r1, k.r2);
    let e2 = data_norm.powi(2);
    let e4 = data_norm.powi(4);
    let p = |x: f64| x.exp2();
    Ok([
        (p(2.0 * j * (s - e.beta)) / (5.0 * k.c[0] * e2)).powf(3.0 / (4.0 - gamma)),
        (p(4.0 * j * (s - e.alpha / 4.0 - e.s0 / 2.0 - 0.25)) / (5.0 * k.c[1] * e4))
            .powf(3.0 / (5.0 - gamma)),
        (p(2.0 * j * (s - gate.terms[3])) / (5.0 * k.c[2] * e2)).powf(2.0 * r1 / (r1 + 2.0)),
        p(2.0 * j * (s - 0.5)) / (5.0 * k.c[3] * e2),
        (p(2.0 * j * (s - gate.terms[4])) / (5.0 * k.c[4] * e2)).powf(2.0 * r2 / (r2 + 2.0)),
    ])
}

/// Lower bound `T̃_J` on the lifetime of the low-frequency solution.
pub fn bootstrap_time(
    j: f64,
    s: f64,
    gamma: f64,
    k: &BootstrapConstants,
    data_norm: f64,
) -> Result<f64> {
    if !(data_norm > 0.0) {
        return Err(invalid("data_norm", "must be positive"));
    }
    let terms = bootstrap_terms(j, s, gamma, k, data_norm)?;
    Ok(terms.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Same-step comparison of the split pipeline against the direct solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RecombinationReport {
    pub times: Vec<f64>,
    /// `‖(u+v)(t) − φ(t)‖_{H¹}`.
    pub h1: Vec<f64>,
    /// `‖(u+v)(t) − φ(t)‖_{L²}`.
    pub l2: Vec<f64>,
}

impl RecombinationReport {
    pub fn max_h1(&self) -> f64 {
        self.h1.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_l2(&self) -> f64 {
        self.l2.iter().cloned().fold(0.0, f64::max)
    }
}

/// Runs the split pipeline and returns `u + v`.
pub fn recombined_trajectory(
    data: &CauchyPair,
    j: i32,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let (low, high) = split_data(data, j)?;
    // the low equation reads v at every step
    let v = evolve(&high, &config.with_sample_every(1)?, RhsMode::High)?;
    let u = evolve(&low, config, RhsMode::Perturbed(&v))?;
    let stride = config.sample_every();
    let samples = u
        .samples()
        .iter()
        .zip(v.samples().iter().step_by(stride))
        .map(|(a, b)| a.add(b))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(samples, u.dt(), u.scheme())
}

pub fn recombine_and_compare(
    data: &CauchyPair,
    j: i32,
    config: &SolverConfig,
) -> Result<RecombinationReport> {
    let sum = recombined_trajectory(data, j, config)?;
    let direct = evolve(data, config, RhsMode::Full)?;
    let diff = sum.sub(&direct)?;
    Ok(RecombinationReport {
        times: diff.times(),
        h1: diff.positions().map(|p| sobolev_norm(p, 1.0)).collect(),
        l2: diff.positions().map(|p| sobolev_norm(p, 0.0)).collect(),
    })
}

/// Step-halving convergence of the recombined solution at the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOrder {
    pub dts: [f64; 3],
    /// `‖w_{Δt} − w_{Δt/2}‖_{H¹}` and `‖w_{Δt/2} − w_{Δt/4}‖_{H¹}`.
    pub differences: [f64; 2],
    pub order: f64,
    /// Largest same-step discrepancy from the direct solve over the three runs.
    pub same_step_discrepancy: f64,
}

/// Richardson triple on `(u+v)(T)` at `Δt, Δt/2, Δt/4`.
pub fn recombination_order(
    data: &CauchyPair,
    j: i32,
    dt: f64,
    horizon: f64,
) -> Result<ConvergenceOrder> {
    let dts = [dt, dt / 2.0, dt / 4.0];
    let mut terminals = Vec::with_capacity(3);
    let mut discrepancy: f64 = 0.0;
    for &h in &dts {
        let config =
            SolverConfig::new(h, horizon)?.with_sample_every((horizon / h).round() as usize)?;
        let report = recombine_and_compare(data, j, &config)?;
        discrepancy = discrepancy.max(report.max_h1());
        terminals.push(
            recombined_trajectory(data, j, &config)?
                .terminal()
                .position
                .clone(),
        );
    }
    let d1 = sobolev_norm(&terminals[0].sub(&terminals[1])?, 1.0);
    let d2 = sobolev_norm(&terminals[1].sub(&terminals[2])?, 1.0);
    if d2 == 0.0 {
        return Err(KghError::UndefinedRatio(
            "no change under step halving".into(),
        ));
    }
    Ok(ConvergenceOrder {
        dts,
        differences: [d1, d2],
        order: (d1 / d2).log2(),
        same_step_discrepancy: discrepancy,
    })
}
