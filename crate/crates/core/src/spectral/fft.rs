//! Cached 2-D complex FFTs on row-major buffers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let forward = direction == FftDirection::Forward;
    let mut cache = CACHE.get_or_init(Default::default).lock().expect("fft plan cache poisoned");
    cache
        .entry((n, forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Unnormalized in-place 2-D transform of an `n1 × n2` row-major buffer.
fn transform(data: &mut [Complex64], n1: usize, n2: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n1 * n2);
    plan(n2, direction).process(data);
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, &mut t, n1, n2);
    plan(n1, direction).process(&mut t);
    transpose(&t, data, n2, n1);
}

/// `X[k] = Σ_x x[n] e^{-2πi k·n/N}`.
pub(crate) fn forward(data: &mut [Complex64], n1: usize, n2: usize) {
    transform(data, n1, n2, FftDirection::Forward);
}

/// `x[n] = Σ_k X[k] e^{+2πi k·n/N}` (no 1/N factor).
pub(crate) fn backward(data: &mut [Complex64], n1: usize, n2: usize) {
    transform(data, n1, n2, FftDirection::Inverse);
}
