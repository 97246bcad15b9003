use serde::Serialize;

use crate::dynamics::evolve_dg_free;
use crate::error::Result;
use crate::gpvm::{conservation_residual, measure_prob, Gpvm};
use crate::grid::WaveFn;
use crate::interval::IntervalSet;

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub d: f64,
    pub set: IntervalSet,
    pub times: Vec<f64>,
    pub residual_pd: Vec<f64>,
    pub residual_p0: Vec<f64>,
    /// `mu(p_D, B)` along `beta_{D,t} psi`.
    pub prob_pd: Vec<f64>,
    pub prob_p0: Vec<f64>,
    /// max - min of `prob_pd`.
    pub prob_pd_spread: f64,
    /// max - min of `prob_p0`.
    pub prob_p0_drift: f64,
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Tabulates conservation of `p_D` against `p_0` under free nonlinear dynamics.
pub fn conservation_experiment(d: f64, psi: &WaveFn, set: &IntervalSet, times: &[f64]) -> Result<ConservationReport> {
    let pd = Gpvm::momentum(d);
    let p0 = Gpvm::momentum(0.0);
    let mut rep = ConservationReport {
        d,
        set: set.clone(),
        times: times.to_vec(),
        residual_pd: Vec::new(),
        residual_p0: Vec::new(),
        prob_pd: Vec::new(),
        prob_p0: Vec::new(),
        prob_pd_spread: 0.0,
        prob_p0_drift: 0.0,
    };
    for &t in times {
        rep.residual_pd.push(conservation_residual(&pd, set, psi, d, t)?);
        rep.residual_p0.push(conservation_residual(&p0, set, psi, d, t)?);
        let state = evolve_dg_free(psi, d, t);
        rep.prob_pd.push(measure_prob(&pd, set, &state)?);
        rep.prob_p0.push(measure_prob(&p0, set, &state)?);
    }
    rep.prob_pd_spread = spread(&rep.prob_pd);
    rep.prob_p0_drift = spread(&rep.prob_p0);
    Ok(rep)
}
