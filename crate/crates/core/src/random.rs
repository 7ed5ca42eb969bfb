//! Seeded synthetic data: Hermitian random spectra, power-law rough data and
//! periodized Gaussian bumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{CauchyPair, Complex64, GridSpec, RealField, Spectrum, Wavevector};

pub type ProbeRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ProbeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How each retained coefficient is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    /// Complex Gaussian with `E|c|² = amplitude²`.
    Gaussian,
    /// Fixed modulus, uniform phase.
    RandomPhase,
}

/// Draws a Hermitian spectrum; `amplitude(ξ)` of zero drops the mode.
///
/// Modes are visited in flat-index order, so the result is a pure function of
/// the rng state.
pub fn hermitian_spectrum(
    grid: GridSpec,
    kind: Coefficients,
    rng: &mut impl Rng,
    amplitude: impl Fn(&Wavevector) -> f64,
) -> Spectrum {
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for idx in 0..grid.len() {
        let w = grid.wavevector(idx);
        let partner = grid.index_of([-w.k[0], -w.k[1], -w.k[2]]);
        if partner < idx {
            continue;
        }
        let a = amplitude(&w);
        let c = match kind {
            Coefficients::Gaussian => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                if partner == idx {
                    Complex64::new(a * re, 0.0)
                } else {
                    Complex64::new(re, im) * (a / std::f64::consts::SQRT_2)
                }
            }
            Coefficients::RandomPhase => {
                let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                if partner == idx {
                    Complex64::new(a * theta.cos().signum(), 0.0)
                } else {
                    Complex64::from_polar(a, theta)
                }
            }
        };
        if a == 0.0 {
            continue;
        }
        coeffs[idx] = c;
        coeffs[partner] = c.conj();
    }
    Spectrum::from_coeffs(grid, coeffs).expect("finite amplitudes")
}

/// Random-phase spectrum with `|f̂(ξ)| = (1+|ξ|²)^{-(s+3/2+δ)/2}` inside the
/// dealiased cube, i.e. data of regularity exactly `s` up to the band edge.
pub fn power_law_spectrum(grid: GridSpec, s: f64, delta: f64, rng: &mut impl Rng) -> Spectrum {
    let cut = grid.dealias_index();
    hermitian_spectrum(grid, Coefficients::RandomPhase, rng, |w| {
        if w.k.iter().all(|k| k.abs() <= cut) {
            (1.0 + w.norm_sq()).powf(-(s + 1.5 + delta) / 2.0)
        } else {
            0.0
        }
    })
}

/// Rough Cauchy data in `H^s × H^{s−1}` scaled to the requested `𝓔_s`.
pub fn power_law_pair(
    grid: GridSpec,
    s: f64,
    delta: f64,
    target_norm: f64,
    rng: &mut impl Rng,
) -> CauchyPair {
    let p = power_law_spectrum(grid, s, delta, rng).to_field();
    let v = power_law_spectrum(grid, s - 1.0, delta, rng).to_field();
    let pair = CauchyPair::new(p, v, 0.0).expect("same grid");
    let (a, b) = crate::spectral::sobolev_norm_pair(&pair, s);
    pair.scale(target_norm / (a + b))
}

/// Complex Gaussian coefficients on the modes selected by `support`.
pub fn gaussian_field(
    grid: GridSpec,
    rng: &mut impl Rng,
    support: impl Fn(&Wavevector) -> bool,
) -> RealField {
    hermitian_spectrum(grid, Coefficients::Gaussian, rng, |w| {
        if support(w) {
            1.0
        } else {
            0.0
        }
    })
    .to_field()
}

/// Periodized Gaussian `A exp(−|x−c|²/(2σ²))` summed over the 27 nearest images.
pub fn gaussian_bump(grid: GridSpec, center: [f64; 3], width: f64, amplitude: f64) -> RealField {
    let l = grid.box_length();
    RealField::from_fn(grid, |x| {
        let mut sum = 0.0;
        for i in -1..=1 {
            for j in -1..=1 {
                for k in -1..=1 {
                    let d = [
                        x[0] - center[0] + i as f64 * l,
                        x[1] - center[1] + j as f64 * l,
                        x[2] - center[2] + k as f64 * l,
                    ];
                    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                    sum += (-r2 / (2.0 * width * width)).exp();
                }
            }
        }
        amplitude * sum
    })
    .expect("finite gaussian")
}

/// Gaussian bump centred in the box, projected onto the dealiased cube.
pub fn centered_bump(grid: GridSpec, width: f64, amplitude: f64) -> RealField {
    let c = grid.box_length() / 2.0;
    let mut s = gaussian_bump(grid, [c, c, c], width, amplitude)
        .spectrum()
        .clone();
    s.dealias();
    s.to_field()
}
