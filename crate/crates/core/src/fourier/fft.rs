//! Dense-grid synthesis and analysis on `n^d` periodic grids.
//!
//! Convention: `u(x_l) = sum_j c(j) exp(i j . x_l)` with `x_l = 2 pi l / n`,
//! so a pointwise product on the grid is a plain convolution of coefficients.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::lattice::BoxShape;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// In-place d-dimensional transform of a row-major `n^dim` array (unnormalized).
pub fn transform_nd(data: &mut [Complex64], n: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // last axis is contiguous
    fft.process_with_scratch(data, &mut scratch);
    if dim == 1 {
        return;
    }
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim - 1 {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

fn grid_index(point: &[i64], n: usize) -> usize {
    let n_i = n as i64;
    point
        .iter()
        .fold(0usize, |acc, &c| acc * n + c.rem_euclid(n_i) as usize)
}

/// Grid values of the trigonometric polynomial with coefficients `coeffs` on `shape`.
pub fn synthesize(coeffs: &[Complex64], shape: &BoxShape, n: usize) -> Vec<Complex64> {
    assert!(n > 2 * shape.extent, "grid too small for extent");
    let mut grid = vec![Complex64::default(); n.pow(shape.dim as u32)];
    let mut p = vec![0i64; shape.dim];
    for (idx, c) in coeffs.iter().enumerate() {
        if *c != Complex64::default() {
            shape.point_into(idx, &mut p);
            grid[grid_index(&p, n)] = *c;
        }
    }
    transform_nd(&mut grid, n, shape.dim, FftDirection::Inverse);
    grid
}

/// Fourier coefficients on `shape` of grid values (the discrete interpolant).
pub fn analyze(mut grid: Vec<Complex64>, n: usize, shape: &BoxShape) -> Vec<Complex64> {
    assert!(n > 2 * shape.extent, "grid too small for extent");
    let dim = shape.dim;
    transform_nd(&mut grid, n, dim, FftDirection::Forward);
    let scale = 1.0 / (n.pow(dim as u32) as f64);
    let mut out = vec![Complex64::default(); shape.len()];
    let mut p = vec![0i64; dim];
    for (idx, c) in out.iter_mut().enumerate() {
        shape.point_into(idx, &mut p);
        *c = grid[grid_index(&p, n)] * scale;
    }
    out
}
