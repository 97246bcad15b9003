//! Scripted numerical experiments. Each takes plain parameters and returns a
//! serializable report.

mod conservation;
mod ftl;
mod logic;
mod mixture;
mod momentum;
mod overlap;

pub use conservation::{conservation_experiment, ConservationReport};
pub use ftl::{
    ftl_experiment, lab_test_family, FtlConfig, FtlReport, FtlRun, FtlSetup, LabTest, OverlapMatrix,
};
pub use logic::{
    intertwiner_identities, logic_isomorphism_check, IntertwinerReport, LogicReport,
};
pub use mixture::{
    gaussian_pair_ensembles, mixture_experiment, threshold_probes, Ensemble, MixtureReport,
};
pub use momentum::{momentum_convergence, MomentumConvergenceReport};
pub use overlap::{
    analytic_overlap, overlap_convergence, overlap_experiment, PlateauPair, OverlapReport,
};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{Grid1D, WaveFn};
use crate::interval::Interval;

/// Fraction of the squared norm that defines an essential support.
pub const ESSENTIAL_MASS: f64 = 0.9999;

/// Shortest index window `[lo, hi)` of grid cells holding at least
/// `ESSENTIAL_MASS` of the squared norm, cut symmetrically in mass from both
/// tails. `None` for the zero vector.
pub fn essential_support(psi: &WaveFn) -> Option<Interval> {
    let grid = psi.grid();
    let dens = psi.densities();
    let total: f64 = dens.iter().sum();
    if total == 0.0 {
        return None;
    }
    let tail = 0.5 * (1.0 - ESSENTIAL_MASS) * total;
    let mut acc = 0.0;
    let mut lo = 0;
    for (i, r) in dens.iter().enumerate() {
        if acc + r > tail {
            lo = i;
            break;
        }
        acc += r;
    }
    acc = 0.0;
    let mut hi = dens.len();
    for (i, r) in dens.iter().enumerate().rev() {
        if acc + r > tail {
            hi = i + 1;
            break;
        }
        acc += r;
    }
    Some(Interval {
        a: grid.cell_edge(lo),
        b: grid.cell_edge(hi),
    })
}

/// Random smooth state: one to three complex-weighted Gaussians kept well
/// inside the domain.
pub fn random_gaussian_state(grid: Grid1D, rng: &mut ChaCha8Rng) -> WaveFn {
    let span = grid.length();
    let mid = 0.5 * (grid.x_min() + grid.x_max());
    let terms = rng.gen_range(1..=3);
    let mut psi = WaveFn::zeros(grid);
    for _ in 0..terms {
        let sigma = span * rng.gen_range(0.02..0.06);
        let center = mid + span * rng.gen_range(-0.2..0.2);
        let k0 = rng.gen_range(-2.0..2.0) / sigma;
        let w = Complex64::from_polar(rng.gen_range(0.3..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let g = WaveFn::gaussian(grid, center, sigma, k0).expect("sigma is positive");
        psi = psi.add(&g.scaled(w)).expect("same grid");
    }
    psi
}

/// Random interval `[a, b)` inside `[lo, hi)`.
pub(crate) fn random_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Interval {
    loop {
        let a = rng.gen_range(lo..hi);
        let b = rng.gen_range(lo..hi);
        if let Ok(iv) = Interval::new(a.min(b), a.max(b)) {
            return iv;
        }
    }
}
