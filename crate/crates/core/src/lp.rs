//! Littlewood-Paley dyadic filter bank.
//!
//! The low cutoff χ is a radial smooth step equal to 1 on `|ξ| ≤ 3/4` and 0 on
//! `|ξ| ≥ 4/3`; the annulus cutoff is `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in
//! `3/4 ≤ |ξ| ≤ 8/3`. Then `S_j = χ(2^{−j}·)` and `Δ_j = S_{j+1} − S_j`
//! telescope, so `χ + Σ_{j≥0} φ(2^{−j}·) = 1` holds to round-off.

use crate::error::{invalid, KghError, Result};
use crate::spectral::{lebesgue_norm_unchecked, GridSpec, RealField, Spectrum};

const CHI_INNER: f64 = 0.75;
const CHI_OUTER: f64 = 4.0 / 3.0;

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Radial low cutoff χ(|ξ|).
pub fn chi(r: f64) -> f64 {
    smooth_step((CHI_OUTER - r) / (CHI_OUTER - CHI_INNER))
}

/// Radial annulus cutoff φ(|ξ|).
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Symbol of Δ_j at radius `r`; zero for `j ≤ −2`.
pub fn block_symbol(j: i32, r: f64) -> f64 {
    match j {
        j if j <= -2 => 0.0,
        -1 => chi(r),
        j => phi(r * (-(j as f64)).exp2()),
    }
}

/// Symbol of the homogeneous block Δ̇_j = φ(2^{−j}·) for any integer j.
pub fn homogeneous_block_symbol(j: i32, r: f64) -> f64 {
    phi(r * (-(j as f64)).exp2())
}

/// Symbol of S_j = Σ_{j'≤j−1} Δ_{j'}.
pub fn low_pass_symbol(j: i32, r: f64) -> f64 {
    if j <= -1 {
        0.0
    } else {
        chi(r * (-(j as f64)).exp2())
    }
}

/// Max over grid wavevectors with `|ξ|` inside the dealiased band of
/// `|χ(ξ) + Σ_{j≥0} φ(2^{−j}ξ) − 1|`, the sum running until it is exhausted.
pub fn partition_of_unity_residual(grid: &GridSpec) -> f64 {
    let band = grid.dealiased_radius();
    let modes = grid.modes();
    modes
        .norm
        .iter()
        .filter(|&&r| r <= band)
        .map(|&r| {
            let mut sum = chi(r);
            let mut j = 0;
            while CHI_INNER * (j as f64).exp2() <= r {
                sum += phi(r * (-(j as f64)).exp2());
                j += 1;
            }
            (sum - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Dyadic blocks resolvable on one grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicBank {
    grid: GridSpec,
    j_max: i32,
}

impl DyadicBank {
    /// Every block up to `j_max` has support inside the dealiased band.
    pub fn new(grid: GridSpec) -> Result<Self> {
        let j_max = (grid.dealiased_radius() * 3.0 / 8.0).log2() + 1e-9;
        let j_max = j_max.floor() as i32;
        if j_max < 2 {
            return Err(KghError::InvalidGrid(format!(
                "grid resolves blocks only up to j = {j_max}; at least 2 is needed"
            )));
        }
        Ok(Self { grid, j_max })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Last index needed for the blocks to tile every grid wavevector.
    pub fn j_cover(&self) -> i32 {
        let rmax = self.grid.nyquist() * 3f64.sqrt();
        let mut j = 0;
        while CHI_INNER * ((j + 1) as f64).exp2() <= rmax {
            j += 1;
        }
        j
    }

    /// Lowest homogeneous block that can touch a nonzero lattice mode.
    pub fn j_lowest(&self) -> i32 {
        (self.grid.wavenumber_unit() * 3.0 / 8.0).log2().floor() as i32
    }

    fn check_block(&self, j: i32) -> Result<()> {
        if j > self.j_max {
            return Err(KghError::OutOfRange {
                index: j as i64,
                reason: format!("block exceeds j_max = {}", self.j_max),
            });
        }
        Ok(())
    }

    fn check_grid(&self, f: &RealField) -> Result<()> {
        if f.grid().n() == self.grid.n() && f.grid().box_length() == self.grid.box_length() {
            Ok(())
        } else {
            Err(KghError::GridMismatch)
        }
    }

    /// Δ_j f.
    pub fn block(&self, f: &RealField, j: i32) -> Result<RealField> {
        self.check_grid(f)?;
        self.check_block(j)?;
        Ok(self.block_spectrum(f.spectrum(), j).to_field())
    }

    /// Δ_j on a spectrum; no range check.
    pub(crate) fn block_spectrum(&self, s: &Spectrum, j: i32) -> Spectrum {
        let mut out = s.clone();
        out.scale_radial(|r| block_symbol(j, r));
        out
    }

    pub(crate) fn low_pass_spectrum(&self, s: &Spectrum, j: i32) -> Spectrum {
        let mut out = s.clone();
        out.scale_radial(|r| low_pass_symbol(j, r));
        out
    }

    /// S_j f. Only blocks up to `j − 1` are involved, so `j ≤ j_max + 1` is accepted.
    pub fn low_pass(&self, f: &RealField, j: i32) -> Result<RealField> {
        self.check_grid(f)?;
        self.check_block(j - 1)?;
        Ok(self.low_pass_spectrum(f.spectrum(), j).to_field())
    }

    /// (I − S_j) f.
    pub fn high_pass(&self, f: &RealField, j: i32) -> Result<RealField> {
        self.check_grid(f)?;
        self.check_block(j - 1)?;
        let mut s = f.spectrum().clone();
        s.scale_radial(|r| 1.0 - low_pass_symbol(j, r));
        Ok(s.to_field())
    }

    /// Inhomogeneous or homogeneous Besov norm of `f`.
    pub fn besov_norm(&self, f: &RealField, params: &BesovParams) -> Result<f64> {
        self.check_grid(f)?;
        let spec = f.spectrum();
        let block_norm = |mut s: Spectrum, m: &dyn Fn(f64) -> f64| -> f64 {
            s.scale_radial(m);
            let field = RealField::from_raw(*f.grid(), s.to_values());
            lebesgue_norm_unchecked(&field, params.p)
        };
        let (lo, hi) = if params.homogeneous {
            (self.j_lowest(), self.j_cover())
        } else {
            (0, self.j_cover())
        };
        let terms: Vec<f64> = (lo..=hi)
            .map(|j| {
                let norm = if params.homogeneous {
                    block_norm(spec.clone(), &|r| homogeneous_block_symbol(j, r))
                } else {
                    block_norm(spec.clone(), &|r| block_symbol(j, r))
                };
                (j as f64 * params.s).exp2() * norm
            })
            .collect();
        let dyadic = if params.q.is_infinite() {
            terms.iter().fold(0.0, |m: f64, &t| m.max(t))
        } else {
            terms
                .iter()
                .map(|t| t.powf(params.q))
                .sum::<f64>()
                .powf(1.0 / params.q)
        };
        if params.homogeneous {
            Ok(dyadic)
        } else {
            Ok(dyadic + block_norm(spec.clone(), &|r| low_pass_symbol(0, r)))
        }
    }

    /// Symmetric sharp projection onto `B(c, h 2^j) ∪ B(−c, h 2^j)`.
    pub fn ball_localize(&self, f: &RealField, w: &BallWindow) -> Result<RealField> {
        self.check_grid(f)?;
        if w.norm() + w.radius() > self.grid.dealiased_radius() {
            return Err(invalid(
                "ball",
                format!(
                    "ball |c| + r = {} exceeds the dealiased band {}",
                    w.norm() + w.radius(),
                    self.grid.dealiased_radius()
                ),
            ));
        }
        let grid = self.grid;
        let mut s = f.spectrum().clone();
        for (idx, c) in s.coeffs_mut().iter_mut().enumerate() {
            if !w.contains_symmetric(&grid.wavevector(idx).xi) {
                *c = Default::default();
            }
        }
        Ok(s.to_field())
    }

    /// `‖Δ_j f‖_q / (2^{3j(1/p−1/q)} ‖Δ_j f‖_p)`.
    pub fn bernstein_ratio(&self, f: &RealField, j: i32, p: f64, q: f64) -> Result<f64> {
        if !(p >= 1.0 && q >= p) {
            return Err(invalid(
                "q",
                format!("need 1 ≤ p ≤ q, got p = {p}, q = {q}"),
            ));
        }
        let b = self.block(f, j)?;
        let np = lebesgue_norm_unchecked(&b, p);
        if np == 0.0 {
            return Err(KghError::UndefinedRatio(format!("block {j} is empty")));
        }
        let nq = lebesgue_norm_unchecked(&b, q);
        let gain = (3.0 * j as f64 * (1.0 / p - 1.0 / q)).exp2();
        Ok(nq / (gain * np))
    }
}

/// Besov exponents; `p` or `q` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub homogeneous: bool,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: f64, homogeneous: bool) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if v.is_nan() || v < 1.0 {
                return Err(invalid(name, format!("{v} is below 1")));
            }
        }
        Ok(Self {
            s,
            p,
            q,
            homogeneous,
        })
    }

    pub fn inhomogeneous(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(s, p, q, false)
    }
}

/// Frequency ball `B(center, h 2^j)` with `|center| ∈ [2^{j−2}, 2^{j+2}]`, `h < 1/8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallWindow {
    center: [f64; 3],
    j: i32,
    h: f64,
}

impl BallWindow {
    pub fn new(center: [f64; 3], j: i32, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 0.125) {
            return Err(invalid("h", format!("{h} is outside (0, 1/8)")));
        }
        let c = center.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = (j as f64).exp2();
        if !(c >= scale / 4.0 && c <= scale * 4.0) {
            return Err(invalid(
                "center",
                format!("|center| = {c} is outside [2^(j-2), 2^(j+2)] for j = {j}"),
            ));
        }
        Ok(Self { center, j, h })
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn j(&self) -> i32 {
        self.j
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn radius(&self) -> f64 {
        self.h * (self.j as f64).exp2()
    }

    pub fn norm(&self) -> f64 {
        self.center.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn contains(&self, xi: &[f64; 3]) -> bool {
        let d2: f64 = xi
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        d2 <= self.radius() * self.radius()
    }

    pub fn contains_symmetric(&self, xi: &[f64; 3]) -> bool {
        self.contains(xi) || self.contains(&[-xi[0], -xi[1], -xi[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_field, seeded_rng};
    use crate::spectral::{lebesgue_norm, Wavevector};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid(n: usize, l: f64) -> GridSpec {
        GridSpec::new(n, l, 2.5).unwrap()
    }

    #[test]
    fn profile_supports() {
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(phi(0.75), 0.0);
        assert_eq!(phi(8.0 / 3.0), 0.0);
        assert_eq!(phi(3.0), 0.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert_eq!(chi(0.5), 1.0);
        for i in 0..400 {
            let r = i as f64 * 0.01;
            assert!(phi(r) >= 0.0 && chi(r) >= 0.0 && chi(r) <= 1.0);
        }
    }

    #[test]
    fn blocks_two_apart_are_disjoint() {
        for i in 0..4000 {
            let r = i as f64 * 0.01;
            for j in 0..5 {
                assert_eq!(
                    block_symbol(j, r) * block_symbol(j + 2, r),
                    0.0,
                    "r={r} j={j}"
                );
            }
            assert_eq!(block_symbol(-1, r) * block_symbol(1, r), 0.0);
        }
    }

    #[test]
    fn bank_range() {
        let b = DyadicBank::new(grid(32, 2.0 * PI)).unwrap();
        assert_eq!(b.j_max(), 2);
        assert!(DyadicBank::new(grid(16, 2.0 * PI)).is_err());
        assert_eq!(DyadicBank::new(grid(128, PI / 2.0)).unwrap().j_max(), 6);
        // every block up to j_max fits under the dealiased band
        let g = grid(64, 2.0 * PI);
        let b = DyadicBank::new(g).unwrap();
        assert!(8.0 / 3.0 * (b.j_max() as f64).exp2() <= g.dealiased_radius() + 1e-12);
    }

    #[test]
    fn partition_residual_small() {
        for n in [16, 32] {
            assert!(partition_of_unity_residual(&grid(n, 2.0 * PI)) <= 1e-12);
        }
    }

    #[test]
    fn far_mode_is_outside_block() {
        // ξ = 64 k on this grid, so k = 8 sits at 2^9 = 2^{j+10} for j = -1
        let g = grid(32, 2.0 * PI / 64.0);
        let bank = DyadicBank::new(g).unwrap();
        let f = RealField::from_fn(g, |x| (64.0 * 8.0 * x[0]).cos()).unwrap();
        assert!(bank.block(&f, -1).unwrap().max_abs() < 1e-13);
        assert!(bank.block(&f, bank.j_max() + 1).is_err());
    }

    #[test]
    fn mode_on_dyadic_sphere_splits_between_neighbours() {
        let g = grid(32, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        for j in 0..=2 {
            let k = (j as f64).exp2();
            let f = RealField::from_fn(g, |x| (k * x[1]).cos()).unwrap();
            let sum = bank
                .block(&f, j)
                .unwrap()
                .add(&bank.block(&f, j - 1).unwrap())
                .unwrap();
            assert!(sum.sub(&f).unwrap().max_abs() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn blocks_sum_to_band_limited_field() {
        let g = grid(32, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        let limit = 0.75 * ((bank.j_max() + 1) as f64).exp2();
        let f = gaussian_field(g, &mut seeded_rng(7), |w: &Wavevector| w.norm() < limit);
        let mut acc = RealField::zeros(g);
        for j in -1..=bank.j_max() {
            acc = acc.add(&bank.block(&f, j).unwrap()).unwrap();
        }
        assert!(acc.sub(&f).unwrap().max_abs() < 1e-12 * f.max_abs().max(1.0));
        assert!(bank.block(&f, -2).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn low_pass_properties() {
        let g = grid(64, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        let f = gaussian_field(g, &mut seeded_rng(8), |w: &Wavevector| w.norm() <= 3.0);
        let j = 4; // f lives in |ξ| ≤ 2^{J-2}
        assert!(bank.low_pass(&f, j).unwrap().sub(&f).unwrap().max_abs() < 1e-12);
        assert!(bank.high_pass(&f, j).unwrap().max_abs() < 1e-12);
        assert_eq!(bank.low_pass(&f, -1).unwrap().max_abs(), 0.0);

        let r = gaussian_field(g, &mut seeded_rng(9), |_| true);
        for j in 0..bank.j_max() {
            let diff = bank
                .low_pass(&r, j + 1)
                .unwrap()
                .sub(&bank.low_pass(&r, j).unwrap())
                .unwrap();
            let blk = bank.block(&r, j).unwrap();
            assert!(diff.sub(&blk).unwrap().max_abs() < 1e-12, "j={j}");
        }
        assert!(bank.low_pass(&r, bank.j_max() + 2).is_err());
    }

    #[test]
    fn almost_orthogonality_and_bounded_overlap() {
        let g = grid(64, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        let f = gaussian_field(g, &mut seeded_rng(10), |_| true);
        let h = gaussian_field(g, &mut seeded_rng(11), |_| true);
        let scale = lebesgue_norm(&f, 2.0).unwrap() * lebesgue_norm(&h, 2.0).unwrap();
        for j in -1..=bank.j_max() {
            for jp in -1..=bank.j_max() {
                if (j - jp).abs() >= 2 {
                    let ip = bank
                        .block(&f, j)
                        .unwrap()
                        .inner(&bank.block(&h, jp).unwrap())
                        .unwrap();
                    assert!(ip.abs() <= 1e-12 * scale, "j={j} j'={jp} ip={ip}");
                }
            }
        }
        let limit = 0.75 * ((bank.j_max() + 1) as f64).exp2();
        let f = gaussian_field(g, &mut seeded_rng(12), |w: &Wavevector| w.norm() < limit);
        let total = lebesgue_norm(&f, 2.0).unwrap().powi(2);
        let blocks: f64 = (-1..=bank.j_max())
            .map(|j| {
                lebesgue_norm(&bank.block(&f, j).unwrap(), 2.0)
                    .unwrap()
                    .powi(2)
            })
            .sum();
        assert!(blocks <= total && total <= 2.0 * blocks);
    }

    #[test]
    fn besov_zero_and_single_mode() {
        let g = grid(64, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        let p = BesovParams::inhomogeneous(0.7, 2.0, 2.0).unwrap();
        assert_eq!(bank.besov_norm(&RealField::zeros(g), &p).unwrap(), 0.0);

        for j0 in 1..=4 {
            let k = (j0 as f64).exp2();
            let f = RealField::from_fn(g, |x| (k * x[2]).sin()).unwrap();
            let l2 = lebesgue_norm(&f, 2.0).unwrap();
            let got = bank.besov_norm(&f, &p).unwrap();
            // oracle: the mode sits exactly where φ(2^{-j0}·) and φ(2^{1-j0}·) overlap
            let a = phi(1.0);
            let b = phi(2.0);
            let oracle = ((2f64.powf(j0 as f64 * 0.7) * a).powi(2)
                + (2f64.powf((j0 - 1) as f64 * 0.7) * b).powi(2))
            .sqrt()
                * l2;
            assert_relative_eq!(got, oracle, max_relative = 1e-10);
            let lo = 2f64.powf((j0 - 1) as f64 * 0.7) * l2;
            let hi = 2.0 * 2f64.powf((j0 + 1) as f64 * 0.7) * l2;
            assert!(got >= lo / 2.0 && got <= hi, "j0={j0}");
        }
    }

    #[test]
    fn besov_vs_l2_and_homogeneous() {
        let g = grid(32, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        let f = gaussian_field(g, &mut seeded_rng(13), |w: &Wavevector| w.norm() < 9.0);
        let l2 = lebesgue_norm(&f, 2.0).unwrap();
        let b0 = bank
            .besov_norm(&f, &BesovParams::inhomogeneous(0.0, 2.0, 2.0).unwrap())
            .unwrap();
        assert!(b0 <= 2.0 * l2 && l2 <= 2.0 * b0);

        let s = 0.6;
        let inh = bank
            .besov_norm(&f, &BesovParams::new(s, 2.0, 2.0, false).unwrap())
            .unwrap();
        let hom = bank
            .besov_norm(&f, &BesovParams::new(s, 2.0, 2.0, true).unwrap())
            .unwrap();
        let approx = l2 + hom;
        assert!(
            inh <= 2.0 * approx && approx <= 2.0 * inh,
            "inh={inh} approx={approx}"
        );
        let sup = bank
            .besov_norm(&f, &BesovParams::new(s, 2.0, f64::INFINITY, false).unwrap())
            .unwrap();
        assert!(sup <= inh);
        assert!(BesovParams::new(0.0, 0.5, 2.0, false).is_err());
    }

    #[test]
    fn ball_window_validation_and_projection() {
        let g = grid(64, 4.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        assert!(BallWindow::new([8.0, 0.0, 0.0], 5, 0.125).is_err());
        assert!(BallWindow::new([2.0, 0.0, 0.0], 5, 0.05).is_err());
        let w = BallWindow::new([8.0, 0.0, 0.0], 5, 1.0 / 16.0).unwrap();
        assert_eq!(w.radius(), 2.0);

        let f = gaussian_field(g, &mut seeded_rng(14), |_| true);
        let once = bank.ball_localize(&f, &w).unwrap();
        let twice = bank.ball_localize(&once, &w).unwrap();
        assert!(twice.sub(&once).unwrap().max_abs() < 1e-12);
        for (idx, c) in once.spectrum().coeffs().iter().enumerate() {
            if !w.contains_symmetric(&g.wavevector(idx).xi) {
                assert!(c.norm() < 1e-13);
            }
        }
        let inside = gaussian_field(g, &mut seeded_rng(15), |v: &Wavevector| {
            w.contains_symmetric(&v.xi)
        });
        let kept = bank.ball_localize(&inside, &w).unwrap();
        assert!(kept.sub(&inside).unwrap().max_abs() < 1e-12);

        let far = BallWindow::new([0.0, 0.0, 8.0], 5, 1.0 / 16.0).unwrap();
        assert!(bank.ball_localize(&once, &far).unwrap().max_abs() < 1e-13);

        let outside = BallWindow::new([10.0, 0.0, 0.0], 5, 0.1).unwrap();
        assert!(bank.ball_localize(&f, &outside).is_err());
    }

    #[test]
    fn bernstein_ratios() {
        let g = grid(64, 2.0 * PI);
        let bank = DyadicBank::new(g).unwrap();
        let f = gaussian_field(g, &mut seeded_rng(16), |_| true);
        assert_relative_eq!(
            bank.bernstein_ratio(&f, 2, 3.0, 3.0).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(bank.bernstein_ratio(&f, 2, 4.0, 2.0).is_err());
        let low = gaussian_field(g, &mut seeded_rng(17), |w: &Wavevector| w.norm() < 1.0);
        assert!(matches!(
            bank.bernstein_ratio(&low, 3, 2.0, f64::INFINITY),
            Err(KghError::UndefinedRatio(_))
        ));

        // cosine at |ξ| = 3·2^{j−1}: Δ_j f = φ(3/2) f, and ‖cos‖_∞/‖cos‖_2 = (2/L³)^{1/2}
        let j = 3;
        let k = 1.5 * (j as f64).exp2();
        let c = RealField::from_fn(g, |x| (k * x[0]).cos()).unwrap();
        let got = bank.bernstein_ratio(&c, j, 2.0, f64::INFINITY).unwrap();
        let oracle = (2.0 / (2.0 * PI).powi(3)).sqrt() / (1.5 * j as f64).exp2();
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
    }

    #[test]
    fn bernstein_is_saturated_uniformly_by_a_point_mass() {
        // Δ_j δ = 2^{3j} ψ_j(2^j x) with ψ_j fixed, so the ratio is scale invariant
        let g = grid(128, PI / 2.0);
        let bank = DyadicBank::new(g).unwrap();
        let mut values = vec![0.0; g.len()];
        values[0] = 1.0;
        let f = RealField::new(g, values).unwrap();
        let ratios: Vec<f64> = (2..=bank.j_max())
            .map(|j| bank.bernstein_ratio(&f, j, 2.0, f64::INFINITY).unwrap())
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.5, "{ratios:?}");
    }
}
