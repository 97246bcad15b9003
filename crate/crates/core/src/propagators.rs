//! Linear Schrödinger dynamics: exact free evolution, Strang split-step
//! evolution under time-windowed potentials, and spectral projections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Amplitudes, Grid1D, WaveFn};
use crate::interval::IntervalSet;
use crate::spectral;

/// Spatial shape of an external potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialShape {
    Zero,
    /// `omega^2 (x - center)^2 / 2`
    Harmonic { omega: f64, center: f64 },
    /// `height * exp(-(x - center)^2 / (2 width^2))`
    Gaussian { height: f64, width: f64, center: f64 },
    /// `height` on `[a, b)`, zero elsewhere.
    Barrier { height: f64, a: f64, b: f64 },
}

/// A potential shape switched on for `t_on <= t < t_off`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Potential {
    #[serde(flatten)]
    pub shape: PotentialShape,
    pub t_on: f64,
    pub t_off: f64,
}

impl Potential {
    pub fn new(shape: PotentialShape, t_on: f64, t_off: f64) -> Result<Self> {
        if t_on.is_nan() || t_off.is_nan() || t_on > t_off {
            return Err(Error::InvalidPotential(format!(
                "time window [{t_on}, {t_off}) is empty or reversed"
            )));
        }
        match shape {
            PotentialShape::Gaussian { width, .. } if !(width > 0.0) => {
                return Err(Error::InvalidPotential(format!(
                    "gaussian width must be positive, got {width}"
                )))
            }
            PotentialShape::Barrier { a, b, .. } if !(a < b) => {
                return Err(Error::InvalidPotential(format!(
                    "barrier needs a < b, got [{a}, {b})"
                )))
            }
            _ => {}
        }
        Ok(Self { shape, t_on, t_off })
    }

    /// Shape active at all times.
    pub fn always(shape: PotentialShape) -> Result<Self> {
        Self::new(shape, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn zero() -> Self {
        Self {
            shape: PotentialShape::Zero,
            t_on: f64::NEG_INFINITY,
            t_off: f64::INFINITY,
        }
    }

    /// True when the potential vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self.shape {
            PotentialShape::Zero => true,
            PotentialShape::Harmonic { omega, .. } => omega == 0.0,
            PotentialShape::Gaussian { height, .. } | PotentialShape::Barrier { height, .. } => {
                height == 0.0
            }
        }
    }

    pub fn is_active(&self, t: f64) -> bool {
        self.t_on <= t && t < self.t_off
    }

    /// True when the potential is zero for every time in `[t0, t1]`.
    fn vanishes_on(&self, t0: f64, t1: f64) -> bool {
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        self.is_zero() || hi < self.t_on || lo >= self.t_off
    }

    pub fn shape_value(&self, x: f64) -> f64 {
        match self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::Harmonic { omega, center } => 0.5 * omega * omega * (x - center).powi(2),
            PotentialShape::Gaussian {
                height,
                width,
                center,
            } => {
                let u = (x - center) / width;
                height * (-0.5 * u * u).exp()
            }
            PotentialShape::Barrier { height, a, b } => {
                if a <= x && x < b {
                    height
                } else {
                    0.0
                }
            }
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        if self.is_active(t) {
            self.shape_value(x)
        } else {
            0.0
        }
    }
}

impl Default for Potential {
    fn default() -> Self {
        Self::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    StrangSplit,
    ExactFree,
}

/// Time stepping for an evolution from `t_start` to `t_final`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_start: f64,
    pub t_final: f64,
}

impl StepConfig {
    pub fn new(dt: f64, scheme: Scheme, t_final: f64) -> Result<Self> {
        Self::between(dt, scheme, 0.0, t_final)
    }

    pub fn between(dt: f64, scheme: Scheme, t_start: f64, t_final: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(format!("dt must be positive, got {dt}")));
        }
        if !(t_start.is_finite() && t_final.is_finite()) || t_start < 0.0 || t_final < t_start {
            return Err(Error::InvalidStep(format!(
                "need 0 <= t_start <= t_final, got [{t_start}, {t_final}]"
            )));
        }
        let span = t_final - t_start;
        if span != 0.0 && dt > span {
            return Err(Error::InvalidStep(format!(
                "dt = {dt} exceeds the evolution span {span}"
            )));
        }
        Ok(Self {
            dt,
            scheme,
            t_start,
            t_final,
        })
    }

    pub fn strang(dt: f64, t_final: f64) -> Result<Self> {
        Self::new(dt, Scheme::StrangSplit, t_final)
    }
}

/// `exp(-i p^2 t / 2)` on every Fourier coefficient. Exact on the lattice.
pub fn free_evolve(psi: &WaveFn, t: f64) -> WaveFn {
    if t == 0.0 {
        return psi.clone();
    }
    let grid = *psi.grid();
    let mut buf = psi.amps().to_vec();
    spectral::apply_momentum_multiplier(&grid, &mut buf, |p| Complex64::from_polar(1.0, -0.5 * p * p * t));
    WaveFn::from_vec(grid, buf)
}

/// Strang splitting `e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2}` with the
/// potential sampled at each step's midpoint time.
pub fn split_step_evolve(psi: &WaveFn, potential: &Potential, cfg: &StepConfig) -> Result<WaveFn> {
    match cfg.scheme {
        Scheme::ExactFree => {
            if !potential.vanishes_on(cfg.t_start, cfg.t_final) {
                return Err(Error::InvalidStep(
                    "exact-free scheme requires a vanishing potential".into(),
                ));
            }
            Ok(free_evolve(psi, cfg.t_final - cfg.t_start))
        }
        Scheme::StrangSplit => Ok(linear_evolve(psi, potential, cfg.t_start, cfg.t_final, cfg.dt)),
    }
}

/// Linear evolution from `t_from` to `t_to` (either direction). Spans on
/// which the potential vanishes are propagated exactly.
pub fn linear_evolve(psi: &WaveFn, potential: &Potential, t_from: f64, t_to: f64, dt: f64) -> WaveFn {
    let span = t_to - t_from;
    if span == 0.0 {
        return psi.clone();
    }
    if potential.vanishes_on(t_from, t_to) {
        return free_evolve(psi, span);
    }
    let steps = (span.abs() / dt).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let grid = *psi.grid();
    let xs = grid.xs();
    let kinetic: Vec<Complex64> = (0..grid.n())
        .map(|m| {
            let p = grid.momentum_of_bin(m);
            Complex64::from_polar(1.0, -0.5 * p * p * h)
        })
        .collect();
    let mut buf = psi.amps().to_vec();
    // the shape is fixed in time, so the half kick only depends on the window
    let half_kick: Vec<Complex64> = xs
        .iter()
        .map(|x| Complex64::from_polar(1.0, -0.5 * potential.shape_value(*x) * h))
        .collect();
    for s in 0..steps {
        let t_mid = t_from + (s as f64 + 0.5) * h;
        let active = potential.is_active(t_mid) && !potential.is_zero();
        if active {
            for (a, k) in buf.iter_mut().zip(&half_kick) {
                *a *= k;
            }
        }
        spectral::forward(&mut buf);
        for (a, k) in buf.iter_mut().zip(&kinetic) {
            *a *= k;
        }
        spectral::inverse(&mut buf);
        if active {
            for (a, k) in buf.iter_mut().zip(&half_kick) {
                *a *= k;
            }
        }
    }
    WaveFn::from_vec(grid, buf)
}

/// Zeroes all Fourier coefficients whose lattice momentum lies outside `set`.
pub fn momentum_projection(psi: &WaveFn, set: &IntervalSet) -> WaveFn {
    if set.is_full() {
        return psi.clone();
    }
    let grid = *psi.grid();
    if set.is_empty() {
        return WaveFn::zeros(grid);
    }
    let mut buf = psi.amps().to_vec();
    spectral::forward(&mut buf);
    for (m, c) in buf.iter_mut().enumerate() {
        if !set.contains(grid.momentum_of_bin(m)) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    spectral::inverse(&mut buf);
    WaveFn::from_vec(grid, buf)
}

/// Pointwise multiplication by the indicator of `set` at the sample points.
pub fn position_projection(psi: &WaveFn, set: &IntervalSet) -> WaveFn {
    if set.is_full() {
        return psi.clone();
    }
    let grid = *psi.grid();
    let amps = psi
        .amps()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if set.contains(grid.x(i)) {
                *a
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    WaveFn::from_vec(grid, amps)
}

/// Momentum-space mass of `psi` inside `set`, read off the lattice spectrum.
pub fn momentum_mass(psi: &WaveFn, set: &IntervalSet) -> f64 {
    let grid: Grid1D = *psi.grid();
    psi.momentum_masses()
        .iter()
        .enumerate()
        .filter(|(m, _)| set.contains(grid.momentum_of_bin(*m)))
        .map(|(_, w)| w)
        .sum()
}
