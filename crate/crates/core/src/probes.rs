//! Numerical probes of the inequalities behind the well-posedness argument:
//! Hardy-Littlewood-Sobolev, the trilinear Duhamel estimate, local bounds on
//! the five interaction terms, the dispersive space-time bounds for the
//! low-frequency energy, and the commutator with its bilinear symbol.
//!
//! Every probe returns measured ratios; constants are never asserted here.

use rand::SeedableRng;
use rayon::prelude::*;

use crate::dynamics::{energy, hartree_spectrum};
use crate::error::{invalid, KghError, Result};
use crate::lp::DyadicBank;
use crate::propagator::{
    duhamel_series, free_flow, resolution_norm_fields, time_norm, AdmissibleTriple, Trajectory,
};
use crate::random::{gaussian_field, ProbeRng};
use crate::spectral::{
    check_gamma, gradient_norm, lebesgue_norm_unchecked, riesz_spectrum, sobolev_norm, CauchyPair,
    GridSpec, RealField, Spectrum, Wavevector,
};
use crate::split::check_r_ranges;

/// Measured ratios of one probe sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub probe: String,
    pub params: Vec<(String, f64)>,
    pub ratios: Vec<f64>,
    pub seeds: Vec<u64>,
    pub max: f64,
    pub min: f64,
    pub maxmin_ratio: f64,
}

impl ProbeReport {
    pub fn new(
        probe: impl Into<String>,
        params: Vec<(String, f64)>,
        ratios: Vec<f64>,
        seeds: Vec<u64>,
    ) -> Result<Self> {
        if ratios.is_empty() || ratios.len() != seeds.len() {
            return Err(invalid(
                "ratios",
                "need one seed per ratio and at least one ratio",
            ));
        }
        if ratios.iter().any(|r| !(*r >= 0.0)) {
            return Err(invalid("ratios", "ratios must be nonnegative"));
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        Ok(Self {
            probe: probe.into(),
            params,
            ratios,
            seeds,
            max,
            min,
            maxmin_ratio: max / min,
        })
    }

    pub fn all_finite(&self) -> bool {
        self.ratios.iter().all(|r| r.is_finite())
    }
}

/// Target exponent of the HLS inequality: `1/q = 1/p − (3−γ)/3`.
pub fn hls_exponent(p: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let inv = 1.0 / p - (3.0 - gamma) / 3.0;
    if !(p > 1.0) || !(inv > 0.0) {
        return Err(invalid(
            "p",
            format!("p = {p} gives no finite q > p at γ = {gamma}"),
        ));
    }
    Ok(1.0 / inv)
}

/// `‖𝓘f‖_q / ‖f‖_p`.
pub fn hls_ratio(f: &RealField, p: f64, gamma: f64) -> Result<f64> {
    let q = hls_exponent(p, gamma)?;
    let denom = lebesgue_norm_unchecked(f, p);
    if denom == 0.0 {
        return Err(KghError::UndefinedRatio("zero input".into()));
    }
    let frac = crate::spectral::riesz_mean_fraction(f);
    if frac > 1e-10 {
        log::warn!("hls_ratio: input mean is {frac:.3e} of its L2 norm");
    }
    let pot = riesz_spectrum(f.spectrum(), gamma).to_field();
    Ok(lebesgue_norm_unchecked(&pot, q) / denom)
}

/// Mean-zero complex-Gaussian field on every nonzero mode.
pub fn mean_zero_gaussian(grid: GridSpec, seed: u64) -> RealField {
    gaussian_field(
        grid,
        &mut ProbeRng::seed_from_u64(seed),
        |w: &Wavevector| w.k != [0, 0, 0],
    )
}

/// HLS ratios over `count` mean-zero Gaussians with seeds `seed, seed+1, …`.
pub fn hls_sweep(grid: GridSpec, p: f64, count: usize, seed: u64) -> Result<ProbeReport> {
    let gamma = grid.gamma();
    let q = hls_exponent(p, gamma)?;
    let seeds: Vec<u64> = (0..count as u64).map(|i| seed.wrapping_add(i)).collect();
    let ratios = seeds
        .par_iter()
        .map(|&s| hls_ratio(&mean_zero_gaussian(grid, s), p, gamma))
        .collect::<Result<Vec<_>>>()?;
    ProbeReport::new(
        "hls",
        vec![("gamma".into(), gamma), ("p".into(), p), ("q".into(), q)],
        ratios,
        seeds,
    )
}

/// `B(v,v,v)(t) = −∫₀ᵗ K(t−τ) 𝓘(v²)v dτ` along a sampled trajectory.
pub fn trilinear_duhamel(v: &Trajectory) -> Vec<RealField> {
    let forcing: Vec<Spectrum> = v
        .positions()
        .map(|p| hartree_spectrum(p.spectrum(), true))
        .collect();
    duhamel_series(&forcing, v.dt())
        .into_iter()
        .map(|(d, _)| d.to_field().scale(-1.0))
        .collect()
}

/// `‖B(v,v,v)‖_{X^μ} / (‖v‖_{X^μ} ‖v‖²_{X^{s₀}})` with the finite resolution norms.
///
/// `v` is the free evolution of `v_data` sampled at `k·horizon/steps`.
pub fn trilinear_ratio(
    v_data: &CauchyPair,
    mu: f64,
    triples: &[AdmissibleTriple],
    horizon: f64,
    steps: usize,
) -> Result<f64> {
    let s0 = v_data.grid().gamma() / 6.0;
    let v = crate::propagator::free_trajectory(v_data, horizon, steps)?;
    let dt = v.dt();
    let vf: Vec<&RealField> = v.positions().collect();
    let b = trilinear_duhamel(&v);
    let bf: Vec<&RealField> = b.iter().collect();
    let den = resolution_norm_fields(&vf, dt, mu, triples)?
        * resolution_norm_fields(&vf, dt, s0, triples)?.powi(2);
    if den == 0.0 {
        return Err(KghError::UndefinedRatio("zero data".into()));
    }
    Ok(resolution_norm_fields(&bf, dt, mu, triples)? / den)
}

/// One term of the local interaction estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTerm {
    pub name: &'static str,
    /// `‖term‖_{L¹_T L²}`.
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when the right-hand side vanishes.
    pub ratio: Option<f64>,
}

/// `P[𝓘P(ab)·c]` on the grid.
fn interaction(a: &RealField, b: &RealField, c: &RealField) -> RealField {
    let grid = *a.grid();
    let mut prod = RealField::from_raw(
        grid,
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x * y)
            .collect(),
    )
    .spectrum()
    .clone();
    prod.dealias();
    let pot = riesz_spectrum(&prod, grid.gamma()).to_values();
    let mut out = RealField::from_raw(
        grid,
        pot.iter().zip(c.values()).map(|(x, y)| x * y).collect(),
    )
    .spectrum()
    .clone();
    out.dealias();
    out.to_field()
}

pub const LOCAL_TERM_NAMES: [&str; 5] = ["I(u2)u", "I(uv)u", "I(v2)u", "I(u2)v", "I(uv)v"];

/// Measured constants of the five local interaction bounds on `[0, T]`.
///
/// Right-hand sides: `T‖u‖³`, `T^{(5−γ)/3}‖u‖²‖v‖_α`, `T^{(4−γ)/3}‖u‖‖v‖²_β`,
/// `T^{(5−γ)/3}‖u‖²‖v‖_α`, `T^{(4−γ)/3}‖u‖‖v‖²_β`, where `‖u‖ = sup_t ‖u‖_{H¹}`
/// and `‖v‖_σ = sup_t ‖v‖_{H^σ}` stand in for the resolution norms.
pub fn local_nonlinear_ratios(u: &Trajectory, v: &Trajectory) -> Result<[LocalTerm; 5]> {
    if u.len() != v.len() || (u.dt() - v.dt()).abs() > 1e-12 {
        return Err(invalid("trajectory", "u and v must share one sampling"));
    }
    if !u.grid().same_geometry(v.grid()) {
        return Err(KghError::GridMismatch);
    }
    let gamma = u.grid().gamma();
    let alpha = (2.0 * gamma - 4.0) / 3.0;
    let beta = (gamma - 1.0) / 3.0;
    let t = u.horizon();
    let dt = u.dt();
    let mut lhs_series: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(u.len())).collect();
    for (a, b) in u.positions().zip(v.positions()) {
        let terms = [
            interaction(a, a, a),
            interaction(a, b, a),
            interaction(b, b, a),
            interaction(a, a, b),
            interaction(a, b, b),
        ];
        for (slot, f) in lhs_series.iter_mut().zip(&terms) {
            slot.push(lebesgue_norm_unchecked(f, 2.0));
        }
    }
    let sup = |tr: &Trajectory, s: f64| {
        tr.positions()
            .map(|p| sobolev_norm(p, s))
            .fold(0.0, f64::max)
    };
    let nu = sup(u, 1.0);
    let va = sup(v, alpha);
    let vb = sup(v, beta);
    let rhs = [
        t * nu.powi(3),
        t.powf((5.0 - gamma) / 3.0) * nu * nu * va,
        t.powf((4.0 - gamma) / 3.0) * nu * vb * vb,
        t.powf((5.0 - gamma) / 3.0) * nu * nu * va,
        t.powf((4.0 - gamma) / 3.0) * nu * vb * vb,
    ];
    let mut out = [LocalTerm {
        name: "",
        lhs: 0.0,
        rhs: 0.0,
        ratio: None,
    }; 5];
    for i in 0..5 {
        let lhs = time_norm(&lhs_series[i], dt, 1.0);
        out[i] = LocalTerm {
            name: LOCAL_TERM_NAMES[i],
            lhs,
            rhs: rhs[i],
            ratio: (rhs[i] > 0.0).then(|| lhs / rhs[i]),
        };
    }
    Ok(out)
}

/// The commutator of the Riesz potential with a low-frequency multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorResidual {
    /// `𝓘(Δ_j v · S_{j−1}u) − 𝓘(Δ_j v) · S_{j−1}u`.
    pub field: RealField,
    pub norm: f64,
    /// `‖𝓘(Δ_j v · S_{j−1}u)‖₂ + ‖𝓘(Δ_j v) · S_{j−1}u‖₂`, the size without cancellation.
    pub proxy: f64,
}

pub fn commutator_residual(
    v: &RealField,
    u: &RealField,
    j: i32,
    gamma: f64,
) -> Result<CommutatorResidual> {
    check_gamma(gamma)?;
    v.check_same_grid(u)?;
    if j < 2 {
        return Err(invalid("j", format!("{j} < 2 leaves S_(j-1) trivial")));
    }
    let bank = DyadicBank::new(*v.grid())?;
    let block = bank.block(v, j)?;
    let low = bank.low_pass(u, j - 1)?;
    let first = riesz_spectrum(block.mul(&low)?.spectrum(), gamma).to_field();
    let second = riesz_spectrum(block.spectrum(), gamma)
        .to_field()
        .mul(&low)?;
    let field = first.sub(&second)?;
    Ok(CommutatorResidual {
        norm: lebesgue_norm_unchecked(&field, 2.0),
        proxy: lebesgue_norm_unchecked(&first, 2.0) + lebesgue_norm_unchecked(&second, 2.0),
        field,
    })
}

/// `‖residual‖₂ / (2^{j(γ−4+3/r)} ‖Δ_j v‖_r ‖∇u‖₂)`.
pub fn commutator_bound_check(
    v: &RealField,
    u: &RealField,
    j: i32,
    r: f64,
    gamma: f64,
) -> Result<f64> {
    if !(r > 2.0 && r.is_finite()) {
        return Err(invalid("r", format!("{r} is outside (2, ∞)")));
    }
    let res = commutator_residual(v, u, j, gamma)?;
    let bank = DyadicBank::new(*v.grid())?;
    let block = bank.block(v, j)?;
    let denom = (j as f64 * (gamma - 4.0 + 3.0 / r)).exp2()
        * lebesgue_norm_unchecked(&block, r)
        * gradient_norm(u);
    if denom == 0.0 {
        return Err(KghError::UndefinedRatio("commutator bound vanishes".into()));
    }
    Ok(res.norm / denom)
}

/// Value of the bilinear symbol and its size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub vector: [f64; 3],
    pub magnitude: f64,
}

/// `m(ξ₁, ξ₂) = (ξ₁+λξ₂)|ξ₁+λξ₂|^{γ−5}|ξ₁|^{4−γ}` in the regime
/// `|ξ₁| ≥ 2^{j−1}`, `|ξ₂| ≤ 2^{j−2}`, `λ ∈ [0,1]`.
pub fn coifman_meyer_symbol(
    xi1: [f64; 3],
    xi2: [f64; 3],
    lambda: f64,
    gamma: f64,
    j: i32,
) -> Result<SymbolValue> {
    check_gamma(gamma)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("{lambda} is outside [0, 1]")));
    }
    let n1 = norm3(&xi1);
    let n2 = norm3(&xi2);
    let scale = (j as f64).exp2();
    if n1 < scale / 2.0 || n2 > scale / 4.0 {
        return Err(invalid(
            "xi",
            format!("|ξ1| = {n1}, |ξ2| = {n2} outside the regime for j = {j}"),
        ));
    }
    let w = [
        xi1[0] + lambda * xi2[0],
        xi1[1] + lambda * xi2[1],
        xi1[2] + lambda * xi2[2],
    ];
    let nw = norm3(&w);
    let factor = nw.powf(gamma - 5.0) * n1.powf(4.0 - gamma);
    let vector = w.map(|c| c * factor);
    Ok(SymbolValue {
        vector,
        // |w|^{γ−4}|ξ₁|^{4−γ} in closed form; it equals 1 when λξ₂ = 0
        magnitude: if lambda == 0.0 || n2 == 0.0 {
            1.0
        } else {
            (nw / n1).powf(gamma - 4.0)
        },
    })
}

fn norm3(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Range of `|m|` over a deterministic sample of the regime at level `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolCertificate {
    pub min: f64,
    pub max: f64,
    /// Guaranteed band `[(3/2)^{γ−4}, 2^{4−γ}]` from `|ξ₁+λξ₂| ∈ [|ξ₁|/2, 3|ξ₁|/2]`.
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

impl SymbolCertificate {
    pub fn holds(&self) -> bool {
        self.min >= self.lower && self.max <= self.upper
    }
}

pub fn coifman_meyer_certificate(gamma: f64, j: i32, per_axis: usize) -> Result<SymbolCertificate> {
    check_gamma(gamma)?;
    if per_axis < 2 {
        return Err(invalid("per_axis", "need at least two samples per axis"));
    }
    let scale = (j as f64).exp2();
    let mut min = f64::MAX;
    let mut max: f64 = 0.0;
    let mut count = 0;
    let steps = per_axis;
    for a in 0..steps {
        // |ξ₁| from 2^{j−1} to 2^{j+1}
        let r1 = scale / 2.0 * (1.0 + 3.0 * a as f64 / (steps - 1) as f64);
        for b in 0..steps {
            let r2 = scale / 4.0 * b as f64 / (steps - 1) as f64;
            for c in 0..steps {
                let angle = std::f64::consts::PI * c as f64 / (steps - 1) as f64;
                for d in 0..steps {
                    let lambda = d as f64 / (steps - 1) as f64;
                    let xi1 = [r1, 0.0, 0.0];
                    let xi2 = [r2 * angle.cos(), r2 * angle.sin(), 0.0];
                    let m = coifman_meyer_symbol(xi1, xi2, lambda, gamma, j)?.magnitude;
                    min = min.min(m);
                    max = max.max(m);
                    count += 1;
                }
            }
        }
    }
    Ok(SymbolCertificate {
        min,
        max,
        lower: 1.5f64.powf(gamma - 4.0),
        upper: 2f64.powf(4.0 - gamma),
        samples: count,
    })
}

/// Dispersive space-time integrals against the low-frequency energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingBoundReport {
    /// `|∫₀ᵀ∫ 𝓘(u²) v_F u_t|`.
    pub potential_integral: f64,
    /// `|∫₀ᵀ∫ 𝓘(u v_F) u u_t|`.
    pub mixed_integral: f64,
    pub potential_rhs: f64,
    pub mixed_rhs: f64,
    pub potential_ratio: f64,
    pub mixed_ratio: f64,
    /// `sup_t E(u)`.
    pub sup_energy: f64,
    /// `sup_energy / (2^{2J(1−s)}(𝓔² + 𝓔⁴))`.
    pub hypothesis_ratio: f64,
    /// Set when the hypothesis ratio exceeds 10.
    pub hypothesis_warning: bool,
}

/// Measures the two space-time integrals with `v_F` the free evolution of
/// `v_data` and divides by
/// `(T^{1/2+1/r₁}2^{−2J[s−c(r₁)]} + T^{1/2+1/r₂}2^{−2J[s−c(r₂)]} + T 2^{−2J(s−1/2)}) E_T(u) 𝓔²`
/// and `T^{1/2+1/r₂}2^{−2J[s−c(r₂)]} E_T(u) 𝓔²`, with `c(r) = γ/2 − 3/4 + 1/(2r)`.
#[allow(clippy::too_many_arguments)]
pub fn forcing_bound_check(
    u: &Trajectory,
    v_data: &CauchyPair,
    j: i32,
    s: f64,
    r1: f64,
    r2: f64,
    data_norm: f64,
) -> Result<ForcingBoundReport> {
    let grid = *u.grid();
    let gamma = grid.gamma();
    check_r_ranges(gamma, r1, r2)?;
    if !v_data.grid().same_geometry(&grid) {
        return Err(KghError::GridMismatch);
    }
    let dt = u.dt();
    let t = u.horizon();
    let cell = grid.cell_volume();
    let mut pot = Vec::with_capacity(u.len());
    let mut mix = Vec::with_capacity(u.len());
    for sample in u.samples() {
        let vf = free_flow(v_data, sample.time - v_data.time).position;
        let (uu, ut) = (&sample.position, &sample.velocity);
        let a = interaction(uu, uu, &vf);
        let b = interaction(uu, &vf, uu);
        let dot = |f: &RealField| {
            f.values()
                .iter()
                .zip(ut.values())
                .map(|(x, y)| x * y)
                .sum::<f64>()
                * cell
        };
        pot.push(dot(&a));
        mix.push(dot(&b));
    }
    let integrate = |series: &[f64]| {
        let m = series.len() - 1;
        series
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 || k == m { 0.5 * v } else { *v })
            .sum::<f64>()
            * dt
    };
    let potential_integral = integrate(&pot).abs();
    let mixed_integral = integrate(&mix).abs();
    let sup_energy = u.samples().iter().map(energy).fold(0.0, f64::max);
    let c = |r: f64| gamma / 2.0 - 0.75 + 1.0 / (2.0 * r);
    let jf = j as f64;
    let e2 = data_norm * data_norm;
    let term = |r: f64| t.powf(0.5 + 1.0 / r) * (-2.0 * jf * (s - c(r))).exp2();
    let potential_rhs =
        (term(r1) + term(r2) + t * (-2.0 * jf * (s - 0.5)).exp2()) * sup_energy * e2;
    let mixed_rhs = term(r2) * sup_energy * e2;
    let hypothesis = (2.0 * jf * (1.0 - s)).exp2() * (e2 + e2 * e2);
    let hypothesis_ratio = if hypothesis > 0.0 {
        sup_energy / hypothesis
    } else {
        0.0
    };
    if hypothesis_ratio > 10.0 {
        log::warn!("forcing bounds: E_T(u) is {hypothesis_ratio:.2} times the growth bound");
    }
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(ForcingBoundReport {
        potential_integral,
        mixed_integral,
        potential_rhs,
        mixed_rhs,
        potential_ratio: ratio(potential_integral, potential_rhs),
        mixed_ratio: ratio(mixed_integral, mixed_rhs),
        sup_energy,
        hypothesis_ratio,
        hypothesis_warning: hypothesis_ratio > 10.0,
    })
}
