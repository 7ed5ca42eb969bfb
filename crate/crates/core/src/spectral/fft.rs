//! Cached 3-D complex FFT built from rustfft 1-D plans.
//!
//! Layout is row-major with x fastest: `idx = ix + n * (iy + n * iz)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

/// Plan for side length `n`, shared across threads.
pub(crate) fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

#[derive(Clone, Copy)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

impl Fft3 {
    /// Unnormalized in-place transform along all three axes.
    pub(crate) fn process(&self, data: &mut [Complex64], direction: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let fft = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut lines = vec![Complex64::default(); data.len()];

        // x: rows are already contiguous
        fft.process_with_scratch(data, &mut scratch);

        // y: gather lines ordered (iz, ix, iy)
        for iz in 0..n {
            for ix in 0..n {
                let base = (iz * n + ix) * n;
                for iy in 0..n {
                    lines[base + iy] = data[ix + n * (iy + n * iz)];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for iz in 0..n {
            for ix in 0..n {
                let base = (iz * n + ix) * n;
                for iy in 0..n {
                    data[ix + n * (iy + n * iz)] = lines[base + iy];
                }
            }
        }

        // z: gather lines ordered (iy, ix, iz)
        for iy in 0..n {
            for ix in 0..n {
                let base = (iy * n + ix) * n;
                for iz in 0..n {
                    lines[base + iz] = data[ix + n * (iy + n * iz)];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for iy in 0..n {
            for ix in 0..n {
                let base = (iy * n + ix) * n;
                for iz in 0..n {
                    data[ix + n * (iy + n * iz)] = lines[base + iz];
                }
            }
        }
    }
}
