//! In-place N-dimensional FFTs built from cached 1-D plans.
//!
//! Forward transforms are unnormalized; the inverse applies the 1/nᴺ factor,
//! so `inverse_nd(forward_nd(u)) == u` up to roundoff.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

struct PlanPair {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

static PLANS: Lazy<Mutex<HashMap<usize, Arc<PlanPair>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plans_for(n: usize) -> Arc<PlanPair> {
    let mut cache = PLANS.lock().expect("FFT plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

pub(crate) fn forward_nd(grid: &GridSpec, data: &mut [Complex64]) {
    transform_nd(grid, data, false);
}

pub(crate) fn inverse_nd(grid: &GridSpec, data: &mut [Complex64]) {
    transform_nd(grid, data, true);
    let scale = 1.0 / grid.total_points() as f64;
    for z in data.iter_mut() {
        *z *= scale;
    }
}

fn transform_nd(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_axis();
    debug_assert_eq!(data.len(), grid.total_points());
    let pair = plans_for(n);
    let plan = if inverse { &pair.inv } else { &pair.fwd };
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); n];

    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        if stride == 1 {
            // Last axis: lines are contiguous.
            for chunk in data.chunks_exact_mut(n) {
                plan.process_with_scratch(chunk, &mut scratch);
            }
        } else {
            let block = stride * n;
            for base_hi in (0..data.len()).step_by(block) {
                for lo in 0..stride {
                    let base = base_hi + lo;
                    for (l, v) in line.iter_mut().enumerate() {
                        *v = data[base + l * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (l, v) in line.iter().enumerate() {
                        data[base + l * stride] = *v;
                    }
                }
            }
        }
    }
}
