use serde::Serialize;

use crate::dynamics::evolve_dg_between;
use crate::error::{Error, Result};
use crate::grid::{inner_product, Amplitudes, Grid1D, WaveFn};
use crate::interval::IntervalSet;
use crate::propagators::{position_projection, Potential};

/// Classical mixture `{lambda_nu, Psi_nu}`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, WaveFn)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, WaveFn)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("empty ensemble".into()));
        }
        let mut sum = 0.0;
        for (w, psi) in &members {
            if !(*w >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            if psi.norm_sqr() == 0.0 {
                return Err(Error::ZeroState);
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {sum}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, WaveFn)] {
        &self.members
    }

    /// `sum_nu lambda_nu ||P Psi_nu||^2 / ||Psi_nu||^2` for a position projection.
    pub fn position_statistic(&self, set: &IntervalSet) -> f64 {
        self.members
            .iter()
            .map(|(w, psi)| w * position_projection(psi, set).norm_sqr() / psi.norm_sqr())
            .sum()
    }

    /// Evolves every member under the nonlinear flow.
    pub fn evolve(&self, d: f64, v: &Potential, t: f64, dt: f64) -> Self {
        Self {
            members: self
                .members
                .iter()
                .map(|(w, psi)| (*w, evolve_dg_between(psi, d, v, 0.0, t, dt)))
                .collect(),
        }
    }
}

/// Ensembles `A = {1/2, psi1; 1/2, psi2}` and
/// `B = {1/2, (psi1 + psi2)/sqrt 2; 1/2, (psi1 - psi2)/sqrt 2}` from
/// Gram-Schmidt orthonormalized Gaussians at `c1`, `c2` with width `sigma`.
pub fn gaussian_pair_ensembles(grid: Grid1D, c1: f64, c2: f64, sigma: f64) -> Result<(Ensemble, Ensemble)> {
    let psi1 = WaveFn::gaussian(grid, c1, sigma, 0.0)?;
    let raw = WaveFn::gaussian(grid, c2, sigma, 0.0)?;
    let psi2 = raw.sub(&psi1.scaled(inner_product(&psi1, &raw)?))?.normalize()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = psi1.add(&psi2)?.scaled(h.into());
    let minus = psi1.sub(&psi2)?.scaled(h.into());
    Ok((
        Ensemble::new(vec![(0.5, psi1), (0.5, psi2)])?,
        Ensemble::new(vec![(0.5, plus), (0.5, minus)])?,
    ))
}

/// Half-lines `[-inf, theta_k)` at `count` evenly spaced thresholds in `[lo, hi]`.
pub fn threshold_probes(lo: f64, hi: f64, count: usize) -> Result<Vec<IntervalSet>> {
    if count < 2 || !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "need at least two thresholds on a proper range, got {count} on [{lo}, {hi}]"
        )));
    }
    (0..count)
        .map(|k| {
            let theta = lo + (hi - lo) * k as f64 / (count - 1) as f64;
            IntervalSet::interval(f64::NEG_INFINITY, theta)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureReport {
    pub d: f64,
    pub times: Vec<f64>,
    /// `delta(t)`: max over probes of the difference of ensemble statistics.
    pub deltas: Vec<f64>,
    /// Per time, per probe: statistic of ensemble A.
    pub stats_a: Vec<Vec<f64>>,
    pub stats_b: Vec<Vec<f64>>,
    pub initial_delta: f64,
}

pub fn mixture_experiment(
    a: &Ensemble,
    b: &Ensemble,
    d: f64,
    v: &Potential,
    times: &[f64],
    probes: &[IntervalSet],
    dt: f64,
) -> Result<MixtureReport> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("no probes".into()));
    }
    let stats = |e: &Ensemble| probes.iter().map(|p| e.position_statistic(p)).collect::<Vec<_>>();
    let delta = |sa: &[f64], sb: &[f64]| sa.iter().zip(sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let initial_delta = delta(&stats(a), &stats(b));
    let mut rep = MixtureReport {
        d,
        times: times.to_vec(),
        deltas: Vec::with_capacity(times.len()),
        stats_a: Vec::with_capacity(times.len()),
        stats_b: Vec::with_capacity(times.len()),
        initial_delta,
    };
    for &t in times {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative time {t}")));
        }
        let sa = stats(&a.evolve(d, v, t, dt));
        let sb = stats(&b.evolve(d, v, t, dt));
        rep.deltas.push(delta(&sa, &sb));
        rep.stats_a.push(sa);
        rep.stats_b.push(sb);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Ensemble, Ensemble, Vec<IntervalSet>) {
        let g = Grid1D::new(1024, -16.0, 16.0).unwrap();
        let (a, b) = gaussian_pair_ensembles(g, -1.0, 1.0, 1.0).unwrap();
        (a, b, threshold_probes(-3.0, 3.0, 16).unwrap())
    }

    #[test]
    fn ensemble_validation() {
        let g = Grid1D::new(64, -4.0, 4.0).unwrap();
        let psi = WaveFn::gaussian(g, 0.0, 1.0, 0.0).unwrap();
        assert!(Ensemble::new(vec![(0.5, psi.clone())]).is_err());
        assert!(Ensemble::new(vec![(1.5, psi.clone()), (-0.5, psi.clone())]).is_err());
        assert_eq!(Ensemble::new(vec![(1.0, WaveFn::zeros(g))]).unwrap_err(), Error::ZeroState);
        assert!(Ensemble::new(vec![(1.0, psi)]).is_ok());
        assert!(threshold_probes(1.0, 0.0, 16).is_err());
    }

    #[test]
    fn linear_dynamics_keeps_mixtures_consistent() {
        let (a, b, probes) = setup();
        let r = mixture_experiment(&a, &b, 0.0, &Potential::zero(), &[0.0, 0.25, 0.5, 1.0, 2.0], &probes, 1e-3).unwrap();
        assert!(r.initial_delta < 1e-10);
        assert!(r.deltas.iter().all(|d| *d < 1e-10), "{:?}", r.deltas);
    }

    #[test]
    fn nonlinear_dynamics_separates_equivalent_mixtures() {
        let (a, b, probes) = setup();
        let r = mixture_experiment(&a, &b, 1.0, &Potential::zero(), &[0.0, 0.5], &probes, 1e-3).unwrap();
        assert!(r.deltas[0] < 1e-10);
        // oracle run on this grid: delta(0.5) = 0.034377
        assert!(r.deltas[1] > 0.01, "{:?}", r.deltas);
        assert!((r.deltas[1] - 0.034_377).abs() < 1e-5, "{:?}", r.deltas);
    }
}
