//! Periodic lattices and the discretized one- and two-particle Hilbert spaces.
//!
//! Units are natural (hbar = m = 1). Samples sit at cell midpoints
//! `x_i = x_min + (i + 1/2) dx`, and all inner products are Riemann sums
//! `dx * sum`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

/// Uniform periodic lattice on `[x_min, x_max)` with `n` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    x_min: f64,
    x_max: f64,
}

impl Grid1D {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidN(n));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidDomain { x_min, x_max });
        }
        Ok(Self { n, x_min, x_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Left edge of cell `i`.
    pub fn cell_edge(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Momentum spacing `2 pi / (n dx)`.
    pub fn dp(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length()
    }

    /// Integer wavenumber index `k in [-n/2, n/2)` of FFT bin `m`.
    #[inline]
    pub fn k_of_bin(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// FFT bin holding wavenumber index `k`.
    pub fn bin_of_k(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn momentum_of_bin(&self, m: usize) -> f64 {
        self.k_of_bin(m) as f64 * self.dp()
    }

    /// Lattice momenta in natural (ascending) order, `p_k` for
    /// `k = -n/2, ..., n/2 - 1`.
    pub fn momenta(&self) -> Vec<f64> {
        let half = (self.n / 2) as i64;
        (-half..half).map(|k| k as f64 * self.dp()).collect()
    }

    /// Whether `x` lies on a cell boundary (to within `1e-9 dx`).
    pub fn is_cell_boundary(&self, x: f64) -> bool {
        let s = (x - self.x_min) / self.dx();
        (s - s.round()).abs() < 1e-9
    }
}

/// Access to the raw amplitude buffer of a wavefunction.
pub trait Amplitudes {
    fn amps(&self) -> &[Complex64];
    fn amps_mut(&mut self) -> &mut [Complex64];
    /// Riemann measure of one lattice cell.
    fn cell_measure(&self) -> f64;

    fn norm_sqr(&self) -> f64 {
        self.cell_measure() * self.amps().iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// One-particle wavefunction sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFn {
    grid: Grid1D,
    amps: Vec<Complex64>,
}

impl Amplitudes for WaveFn {
    fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    fn cell_measure(&self) -> f64 {
        self.grid.dx()
    }
}

impl WaveFn {
    pub fn new(grid: Grid1D, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: grid.n(),
                got: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "wavefunction amplitudes must be finite".into(),
            ));
        }
        Ok(Self { grid, amps })
    }

    /// Used internally where finiteness is already guaranteed.
    pub(crate) fn from_vec(grid: Grid1D, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), grid.n());
        Self { grid, amps }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            amps: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Samples `f` at the cell midpoints.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid1D, f: F) -> Self {
        let amps = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self { grid, amps }
    }

    /// Unit-norm Gaussian `exp(-(x-c)^2 / (2 sigma^2) + i k0 x)`.
    pub fn gaussian(grid: Grid1D, center: f64, sigma: f64, k0: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gaussian width must be positive, got {sigma}"
            )));
        }
        let psi = Self::from_fn(grid, |x| {
            let u = (x - center) / sigma;
            Complex64::from_polar((-0.5 * u * u).exp(), k0 * x)
        });
        psi.normalize()
    }

    /// Unit-norm plane wave `exp(i p_k x) / sqrt(L)` for lattice index `k`.
    pub fn plane_wave(grid: Grid1D, k: i64) -> Self {
        let p = k as f64 * grid.dp();
        let amp = 1.0 / grid.length().sqrt();
        Self::from_fn(grid, |x| Complex64::from_polar(amp, p * x))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn check_same_grid(&self, other: &WaveFn) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let nrm = self.norm();
        if nrm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / nrm, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &WaveFn) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &WaveFn) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with<F>(&self, other: &WaveFn, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &WaveFn) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Pointwise multiplication by a real function of position.
    pub fn multiply_by<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            amps: self
                .amps
                .iter()
                .enumerate()
                .map(|(i, a)| a * f(self.grid.x(i)))
                .collect(),
        }
    }

    /// Unnormalized DFT coefficients in FFT bin order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.amps.clone();
        spectral::forward(&mut buf);
        buf
    }

    /// Momentum-space probability mass per FFT bin, `dx/n |c_m|^2`; sums to
    /// the squared norm (Parseval).
    pub fn momentum_masses(&self) -> Vec<f64> {
        let w = self.grid.dx() / self.grid.n() as f64;
        self.spectrum().iter().map(|c| w * c.norm_sqr()).collect()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Position mean `dx sum x_i rho_i / ||psi||^2`.
    pub fn position_mean(&self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroState);
        }
        let dx = self.grid.dx();
        Ok(dx
            * self
                .amps
                .iter()
                .enumerate()
                .map(|(i, a)| self.grid.x(i) * a.norm_sqr())
                .sum::<f64>()
            / n2)
    }
}

/// `dx sum conj(phi_i) psi_i`.
pub fn inner_product(phi: &WaveFn, psi: &WaveFn) -> Result<Complex64> {
    phi.check_same_grid(psi)?;
    Ok(raw_inner(&phi.amps, &psi.amps) * phi.grid.dx())
}

pub(crate) fn raw_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(psi: &WaveFn) -> f64 {
    psi.norm()
}

pub fn normalize(psi: &WaveFn) -> Result<WaveFn> {
    psi.normalize()
}

/// Probability density and current of a one-particle state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurrent {
    pub rho: Vec<f64>,
    pub j: Vec<f64>,
}

/// `rho = |psi|^2`, `J = Im(conj(psi) d/dx psi)` with a spectral derivative.
pub fn density_current(psi: &WaveFn) -> DensityCurrent {
    let dpsi = spectral::derivative(&psi.grid, &psi.amps);
    let rho = psi.densities();
    let j = psi
        .amps
        .iter()
        .zip(&dpsi)
        .map(|(a, d)| (a.conj() * d).im)
        .collect();
    DensityCurrent { rho, j }
}

/// Two-particle wavefunction; `amps[i * n2 + j]` samples `Psi(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFn2 {
    grid1: Grid1D,
    grid2: Grid1D,
    amps: Vec<Complex64>,
}

impl Amplitudes for WaveFn2 {
    fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    fn cell_measure(&self) -> f64 {
        self.grid1.dx() * self.grid2.dx()
    }
}

impl WaveFn2 {
    pub fn new(grid1: Grid1D, grid2: Grid1D, amps: Vec<Complex64>) -> Result<Self> {
        let expected = grid1.n() * grid2.n();
        if amps.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "wavefunction amplitudes must be finite".into(),
            ));
        }
        Ok(Self { grid1, grid2, amps })
    }

    pub(crate) fn from_vec(grid1: Grid1D, grid2: Grid1D, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), grid1.n() * grid2.n());
        Self { grid1, grid2, amps }
    }

    pub fn zeros(grid1: Grid1D, grid2: Grid1D) -> Self {
        Self::from_vec(grid1, grid2, vec![Complex64::new(0.0, 0.0); grid1.n() * grid2.n()])
    }

    pub fn grid1(&self) -> &Grid1D {
        &self.grid1
    }

    pub fn grid2(&self) -> &Grid1D {
        &self.grid2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.amps[i * self.grid2.n() + j]
    }

    pub fn add(&self, other: &WaveFn2) -> Result<Self> {
        if self.grid1 != other.grid1 || self.grid2 != other.grid2 {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_vec(
            self.grid1,
            self.grid2,
            self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn distance(&self, other: &WaveFn2) -> Result<f64> {
        if self.grid1 != other.grid1 || self.grid2 != other.grid2 {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.cell_measure()).sqrt())
    }

    /// Slice at fixed second-particle index `j` (a first-particle wavefunction).
    pub fn column(&self, j: usize) -> WaveFn {
        let n2 = self.grid2.n();
        let amps = (0..self.grid1.n()).map(|i| self.amps[i * n2 + j]).collect();
        WaveFn::from_vec(self.grid1, amps)
    }

    /// Slice at fixed first-particle index `i`.
    pub fn row(&self, i: usize) -> WaveFn {
        let n2 = self.grid2.n();
        WaveFn::from_vec(self.grid2, self.amps[i * n2..(i + 1) * n2].to_vec())
    }

    /// Applies `f` to every first-particle slice (fixed second coordinate).
    pub fn map_axis1<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&WaveFn) -> Result<WaveFn> + Sync,
    {
        use rayon::prelude::*;
        let n1 = self.grid1.n();
        let n2 = self.grid2.n();
        let cols = (0..n2)
            .into_par_iter()
            .map(|j| f(&self.column(j)))
            .collect::<Result<Vec<_>>>()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for (j, col) in cols.iter().enumerate() {
            if col.grid != self.grid1 {
                return Err(Error::GridMismatch);
            }
            for (i, a) in col.amps.iter().enumerate() {
                amps[i * n2 + j] = *a;
            }
        }
        Ok(Self::from_vec(self.grid1, self.grid2, amps))
    }

    /// Applies `f` to every second-particle slice (fixed first coordinate).
    pub fn map_axis2<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&WaveFn) -> Result<WaveFn> + Sync,
    {
        use rayon::prelude::*;
        let n2 = self.grid2.n();
        let rows = (0..self.grid1.n())
            .into_par_iter()
            .map(|i| f(&self.row(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut amps = Vec::with_capacity(self.amps.len());
        for row in rows {
            if row.grid != self.grid2 || row.amps.len() != n2 {
                return Err(Error::GridMismatch);
            }
            amps.extend(row.amps);
        }
        Ok(Self::from_vec(self.grid1, self.grid2, amps))
    }
}

/// `(phi ⊗ psi)_{ij} = phi_i psi_j`.
pub fn tensor_product(phi: &WaveFn, psi: &WaveFn) -> WaveFn2 {
    let mut amps = Vec::with_capacity(phi.amps.len() * psi.amps.len());
    for a in &phi.amps {
        amps.extend(psi.amps.iter().map(|b| a * b));
    }
    WaveFn2::from_vec(phi.grid, psi.grid, amps)
}

/// `||(E ⊗ 1) Psi||^2 / ||Psi||^2`, with `E` applied to each first-particle
/// slice.
pub fn partial_statistic<F>(psi: &WaveFn2, effect: F) -> Result<f64>
where
    F: Fn(&WaveFn) -> Result<WaveFn> + Sync,
{
    let total = psi.norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroState);
    }
    let hit = psi.map_axis1(effect)?;
    Ok(hit.norm_sqr() / total)
}
