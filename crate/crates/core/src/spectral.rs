//! FFT helpers on the periodic lattice.
//!
//! Plans are cached per thread, so the helpers can be called from rayon
//! workers without synchronization.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::Grid1D;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT in place: `c_m = sum_j psi_j exp(-2 pi i j m / n)`.
pub fn forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// Inverse DFT in place, including the `1/n` factor.
pub fn inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Multiplies the Fourier coefficients of `buf` by `multiplier(p_m)`, where
/// `p_m` is the lattice momentum of FFT bin `m`.
pub fn apply_momentum_multiplier<F>(grid: &Grid1D, buf: &mut [Complex64], multiplier: F)
where
    F: Fn(f64) -> Complex64,
{
    forward(buf);
    for (m, c) in buf.iter_mut().enumerate() {
        *c *= multiplier(grid.momentum_of_bin(m));
    }
    inverse(buf);
}

/// Spectral first derivative. The Nyquist bin is dropped so that real input
/// gives real output.
pub fn derivative(grid: &Grid1D, amps: &[Complex64]) -> Vec<Complex64> {
    let mut buf = amps.to_vec();
    let nyquist = grid.n() / 2;
    forward(&mut buf);
    for (m, c) in buf.iter_mut().enumerate() {
        *c *= if m == nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, grid.momentum_of_bin(m))
        };
    }
    inverse(&mut buf);
    buf
}

/// Spectral Laplacian (second derivative).
pub fn laplacian(grid: &Grid1D, amps: &[Complex64]) -> Vec<Complex64> {
    let mut buf = amps.to_vec();
    apply_momentum_multiplier(grid, &mut buf, |p| Complex64::new(-p * p, 0.0));
    buf
}
