//! Internal FFT helpers built on `rustfft`, plus the process-wide thread
//! pool honoring the `QOCT_THREADS` cap.
//!
//! Every transform here is unnormalized forward / 1/N inverse, matching
//! the brute-force DFT oracles in [`crate::analyze`] that validate them.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::OnceLock;

/// Rayon pool capped by `QOCT_THREADS` (>= 1). Work scheduled on it writes
/// to disjoint slices only, so outputs do not depend on the thread count.
pub(crate) fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("QOCT_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or_else(num_cpus);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build thread pool")
    })
}

fn num_cpus() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// In-place forward FFT (unnormalized).
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// In-place inverse FFT with 1/N normalization.
pub(crate) fn ifft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward FFT of a real row, returning the complex spectrum.
pub(crate) fn fft_real(row: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf);
    buf
}

/// 2D forward FFT of a row-major `rows x cols` matrix: FFT along each row,
/// then along each column. Rows are processed in parallel on [`pool`];
/// each row/column transform is independent, so the result is
/// bit-identical for any thread count.
pub(crate) fn fft2_in_place(data: &mut [Complex64], rows: usize, cols: usize) {
    assert_eq!(data.len(), rows * cols);
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(cols);
    pool().install(|| {
        use rayon::prelude::*;
        data.par_chunks_exact_mut(cols).for_each(|row| {
            row_fft.process(row);
        });
    });

    // Columns via transpose, FFT rows, transpose back.
    let mut t = transpose(data, rows, cols);
    let col_fft = planner.plan_fft_forward(rows);
    pool().install(|| {
        use rayon::prelude::*;
        t.par_chunks_exact_mut(rows).for_each(|col| {
            col_fft.process(col);
        });
    });
    let back = transpose(&t, cols, rows);
    data.copy_from_slice(&back);
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}
