use serde::Serialize;

use crate::dynamics::evolve_dg_free;
use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeParam};
use crate::gpvm::{EffectFamily, Gpvm};
use crate::grid::{Amplitudes, WaveFn};
use crate::interval::{Interval, IntervalSet};
use crate::propagators::{free_evolve, position_projection};

/// Mass fraction in the outer sixteenth of the domain (each side) above which
/// a time is flagged as boundary dominated.
const BOUNDARY_MASS: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct MomentumConvergenceReport {
    pub d: f64,
    pub set: Interval,
    pub times: Vec<f64>,
    /// `||beta_{-t} chi_{tB}(x) beta_t psi - E^{p_D}_B psi|| / ||psi||`
    pub errors: Vec<f64>,
    /// Relative squared norm of `beta_t psi` near the domain edges.
    pub edge_mass: Vec<f64>,
    pub boundary_dominated: Vec<bool>,
    pub strictly_decreasing: bool,
    pub final_over_first: f64,
    /// `ln(e_{k+1}/e_k) / ln(t_{k+1}/t_k)` for consecutive times.
    pub decay_exponents: Vec<f64>,
    /// max over times of
    /// `||beta_{D,-t} chi beta_{D,t}(N_D psi) - N_D(U_{-t} chi U_t psi)|| / ||psi||`.
    pub conjugation_identity_residual: f64,
}

/// Position-scaling limit of the gauged momentum effect under free dynamics.
pub fn momentum_convergence(d: f64, set: Interval, psi: &WaveFn, times: &[f64]) -> Result<MomentumConvergenceReport> {
    let grid = *psi.grid();
    let nrm = psi.norm();
    if nrm == 0.0 {
        return Err(Error::ZeroState);
    }
    if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) || times[0] <= 0.0 {
        return Err(Error::InvalidParameter("times must be positive and increasing".into()));
    }
    let target_set = IntervalSet::from(set);
    let target = Gpvm::momentum(d).effect(&target_set, psi);
    let g = GaugeParam::new(d);
    let gauged = apply_gauge(psi, &g);
    let edge = grid.length() / 16.0;

    let mut rep = MomentumConvergenceReport {
        d,
        set,
        times: times.to_vec(),
        errors: Vec::new(),
        edge_mass: Vec::new(),
        boundary_dominated: Vec::new(),
        strictly_decreasing: true,
        final_over_first: f64::NAN,
        decay_exponents: Vec::new(),
        conjugation_identity_residual: 0.0,
    };
    for &t in times {
        let scaled = set.scaled(t)?;
        for end in [scaled.a, scaled.b] {
            if end.is_finite() && !(grid.x_min() <= end && end <= grid.x_max()) {
                return Err(Error::DomainOverflow(format!(
                    "scaled set edge {end} at t = {t} lies outside [{}, {}]",
                    grid.x_min(),
                    grid.x_max()
                )));
            }
        }
        let scaled = IntervalSet::from(scaled);
        let forward = evolve_dg_free(psi, d, t);
        let tails = IntervalSet::from_pairs(&[
            (f64::NEG_INFINITY, grid.x_min() + edge),
            (grid.x_max() - edge, f64::INFINITY),
        ])?;
        let edge_mass = position_projection(&forward, &tails).norm_sqr() / (nrm * nrm);
        let back = evolve_dg_free(&position_projection(&forward, &scaled), d, -t);
        rep.errors.push(back.distance(&target)? / nrm);
        rep.edge_mass.push(edge_mass);
        rep.boundary_dominated.push(edge_mass > BOUNDARY_MASS);

        let lhs = evolve_dg_free(
            &position_projection(&evolve_dg_free(&gauged, d, t), &scaled),
            d,
            -t,
        );
        let rhs = apply_gauge(
            &free_evolve(&position_projection(&free_evolve(psi, t), &scaled), -t),
            &g,
        );
        rep.conjugation_identity_residual = rep.conjugation_identity_residual.max(lhs.distance(&rhs)? / nrm);
    }
    rep.strictly_decreasing = rep.errors.windows(2).all(|w| w[1] < w[0]);
    rep.final_over_first = rep.errors[rep.errors.len() - 1] / rep.errors[0];
    rep.decay_exponents = rep
        .errors
        .windows(2)
        .zip(times.windows(2))
        .map(|(e, t)| (e[1] / e[0]).ln() / (t[1] / t[0]).ln())
        .collect();
    Ok(rep)
}
