use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeParam};
use crate::grid::{inner_product, Amplitudes, Grid1D, WaveFn};

/// Two-plateau pair `Phi_± = 1` on `(-1, 0)`, `±e^{±a}` on `(0, 1)`, zero
/// elsewhere, with `a = pi / (4 D)`.
#[derive(Debug, Clone)]
pub struct PlateauPair {
    pub a: f64,
    pub plus: WaveFn,
    pub minus: WaveFn,
}

impl PlateauPair {
    /// Requires `-1, 0, 1` to lie inside the domain on cell boundaries.
    pub fn new(grid: Grid1D, d: f64) -> Result<Self> {
        for x in [-1.0, 0.0, 1.0] {
            if !(grid.x_min() < x && x < grid.x_max()) || !grid.is_cell_boundary(x) {
                return Err(Error::GridMisalignment(format!(
                    "{x} is not a cell boundary of [{}, {}] with n = {}",
                    grid.x_min(),
                    grid.x_max(),
                    grid.n()
                )));
            }
        }
        Self::sampled(grid, d)
    }

    /// Point samples on any grid; quadrature is then only first order.
    pub fn sampled(grid: Grid1D, d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("D must be positive, got {d}")));
        }
        let a = std::f64::consts::PI / (4.0 * d);
        let plateau = |s: f64| {
            move |x: f64| {
                let v = if (-1.0..0.0).contains(&x) {
                    1.0
                } else if (0.0..1.0).contains(&x) {
                    s * (s * a).exp()
                } else {
                    0.0
                };
                Complex64::new(v, 0.0)
            }
        };
        Ok(Self {
            a,
            plus: WaveFn::from_fn(grid, plateau(1.0)),
            minus: WaveFn::from_fn(grid, plateau(-1.0)),
        })
    }
}

/// `sqrt(2 / (1 + cosh(pi / (2 D))))`.
pub fn analytic_overlap(d: f64) -> f64 {
    (2.0 / (1.0 + (std::f64::consts::PI / (2.0 * d)).cosh())).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapReport {
    pub d: f64,
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub numeric: f64,
    pub analytic: f64,
    pub gap: f64,
    /// `|<Phi_- | Phi_+>|`
    pub pre_gauge_overlap: f64,
    pub norm_sqr_plus: f64,
    pub norm_sqr_minus: f64,
}

fn measure(pair: &PlateauPair, d: f64) -> Result<OverlapReport> {
    let g = GaugeParam::new(d);
    let grid = *pair.plus.grid();
    let np = pair.plus.norm();
    let nm = pair.minus.norm();
    let gauged = inner_product(&apply_gauge(&pair.minus, &g), &apply_gauge(&pair.plus, &g))?;
    let numeric = gauged.norm() / (np * nm);
    let analytic = analytic_overlap(d);
    Ok(OverlapReport {
        d,
        n: grid.n(),
        x_min: grid.x_min(),
        x_max: grid.x_max(),
        numeric,
        analytic,
        gap: (numeric - analytic).abs(),
        pre_gauge_overlap: inner_product(&pair.minus, &pair.plus)?.norm(),
        norm_sqr_plus: np * np,
        norm_sqr_minus: nm * nm,
    })
}

/// Normalized gauged overlap `|<N_D Phi_- | N_D Phi_+>| / (||Phi_-|| ||Phi_+||)`
/// on an aligned grid.
pub fn overlap_experiment(d: f64, grid: Grid1D) -> Result<OverlapReport> {
    measure(&PlateauPair::new(grid, d)?, d)
}

/// Gap to the analytic value on grids of length 4.5 with a sample point at
/// `x = 0`, so `[0, 1)` always holds one more sample than `[-1, 0)`.
pub fn overlap_convergence(d: f64, ns: &[usize]) -> Result<Vec<OverlapReport>> {
    ns.iter()
        .map(|&n| {
            let dx = 4.5 / n as f64;
            let x_min = -(n as f64 / 2.0 + 0.5) * dx;
            let grid = Grid1D::new(n, x_min, x_min + 4.5)?;
            measure(&PlateauPair::sampled(grid, d)?, d)
        })
        .collect()
}
