//! Generalized projection-valued measures built from position and momentum.
//!
//! For gauge parameter `D` the effect of a Borel set `B` is
//! `E_B = N_D ∘ chi_B(A) ∘ N_{-D}`. For position `A = x`, `N_D` commutes with
//! the indicator and `E_B` is the ordinary multiplication operator. For
//! momentum `A = p` the effects are nonlinear for `D != 0`.
//!
//! `mu_psi(B) = ||E_B psi||^2 / ||psi||^2`. Lüders collapse after a positive
//! test maps `psi` to `E_B psi`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_dg_between, evolve_dg_free};
use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeParam};
use crate::grid::{inner_product, Amplitudes, Grid1D, WaveFn};
use crate::interval::{Interval, IntervalSet, Partition};
use crate::propagators::{momentum_projection, position_projection, Potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Position,
    Momentum,
}

/// The `D`-conjugated spectral measure of position or momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gpvm {
    pub base: Base,
    pub d: f64,
}

/// Anything that assigns a (possibly nonlinear) effect to an interval set.
pub trait EffectFamily {
    fn effect(&self, set: &IntervalSet, psi: &WaveFn) -> WaveFn;
}

impl Gpvm {
    pub fn position(d: f64) -> Self {
        Self {
            base: Base::Position,
            d,
        }
    }

    pub fn momentum(d: f64) -> Self {
        Self {
            base: Base::Momentum,
            d,
        }
    }

    /// `chi_B(A)`, the linear spectral projection of the base operator.
    pub fn spectral_projection(&self, set: &IntervalSet, psi: &WaveFn) -> WaveFn {
        match self.base {
            Base::Position => position_projection(psi, set),
            Base::Momentum => momentum_projection(psi, set),
        }
    }
}

impl EffectFamily for Gpvm {
    fn effect(&self, set: &IntervalSet, psi: &WaveFn) -> WaveFn {
        match self.base {
            Base::Position => position_projection(psi, set),
            Base::Momentum => {
                let g = GaugeParam::new(self.d);
                let inner = momentum_projection(&apply_gauge(psi, &g.inverse()), set);
                apply_gauge(&inner, &g)
            }
        }
    }
}

/// Negative control `N_D ∘ chi_B(p)`: the gauge is applied after the
/// projection but never undone first, which breaks the composition law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnconjugatedMomentum {
    pub d: f64,
}

impl EffectFamily for UnconjugatedMomentum {
    fn effect(&self, set: &IntervalSet, psi: &WaveFn) -> WaveFn {
        apply_gauge(&momentum_projection(psi, set), &GaugeParam::new(self.d))
    }
}

/// `E_B(psi)`, which is also the state after a positive test.
pub fn apply_effect(a: &Gpvm, set: &IntervalSet, psi: &WaveFn) -> WaveFn {
    a.effect(set, psi)
}

fn nonzero_norm_sqr(psi: &WaveFn) -> Result<f64> {
    let n2 = psi.norm_sqr();
    if n2 == 0.0 {
        Err(Error::ZeroState)
    } else {
        Ok(n2)
    }
}

/// `mu_psi(B) = ||E_B psi||^2 / ||psi||^2`.
pub fn measure_prob<E: EffectFamily>(a: &E, set: &IntervalSet, psi: &WaveFn) -> Result<f64> {
    let total = nonzero_norm_sqr(psi)?;
    Ok(a.effect(set, psi).norm_sqr() / total)
}

/// Partition of the base-operator spectrum into lattice cells.
///
/// For momentum the cells are `[p_k - dp/2, p_k + dp/2)`, centred on the
/// lattice momenta. For position they are the grid cells. Midpoint sums over
/// these cells are exact lattice expectations.
pub fn lattice_partition(grid: &Grid1D, base: Base) -> Partition {
    let edges: Vec<f64> = match base {
        Base::Momentum => {
            let dp = grid.dp();
            let ks: Vec<i64> = (0..grid.n()).map(|m| grid.k_of_bin(m)).collect();
            let lo = *ks.iter().min().expect("grid is non-empty");
            let hi = *ks.iter().max().expect("grid is non-empty");
            (lo..=hi + 1).map(|k| (k as f64 - 0.5) * dp).collect()
        }
        Base::Position => (0..=grid.n()).map(|i| grid.cell_edge(i)).collect(),
    };
    Partition::from_edges(&edges).expect("lattice edges are increasing")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityMeasureReport {
    pub partition: Vec<Interval>,
    pub probs: Vec<f64>,
    pub total: f64,
}

pub fn probability_report<E: EffectFamily>(
    a: &E,
    partition: &Partition,
    psi: &WaveFn,
) -> Result<ProbabilityMeasureReport> {
    let probs = partition
        .cells()
        .iter()
        .map(|cell| measure_prob(a, &IntervalSet::from(*cell), psi))
        .collect::<Result<Vec<_>>>()?;
    let total = probs.iter().sum();
    Ok(ProbabilityMeasureReport {
        partition: partition.cells().to_vec(),
        probs,
        total,
    })
}

/// `sum_k mid(B_k) mu(B_k)`. Cells with infinite ends must carry no mass.
pub fn expectation(a: &Gpvm, psi: &WaveFn, partition: &Partition) -> Result<f64> {
    let total = nonzero_norm_sqr(psi)?;
    let masses = spectral_masses(a, psi);
    let grid = *psi.grid();
    let mut acc = 0.0;
    for cell in partition.cells() {
        let mass: f64 = masses
            .iter()
            .enumerate()
            .filter(|(idx, _)| cell.contains(spectral_point(a.base, &grid, *idx)))
            .map(|(_, m)| m)
            .sum();
        if mass == 0.0 {
            continue;
        }
        let mid = cell.midpoint().ok_or_else(|| {
            Error::BadPartition(format!("unbounded cell [{}, {}) carries mass", cell.a, cell.b))
        })?;
        acc += mid * mass / total;
    }
    Ok(acc)
}

/// Per-lattice-point masses of `chi_{point}(A) N_{-D} psi`; position index
/// `i` or FFT bin `m`.
fn spectral_masses(a: &Gpvm, psi: &WaveFn) -> Vec<f64> {
    match a.base {
        Base::Position => {
            let dx = psi.grid().dx();
            psi.amps().iter().map(|v| dx * v.norm_sqr()).collect()
        }
        Base::Momentum => apply_gauge(psi, &GaugeParam::new(-a.d)).momentum_masses(),
    }
}

fn spectral_point(base: Base, grid: &Grid1D, idx: usize) -> f64 {
    match base {
        Base::Position => grid.x(idx),
        Base::Momentum => grid.momentum_of_bin(idx),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequentialProb {
    /// `||E2 beta_{t2,t1} E1 beta_{t1} psi||^2 / ||psi||^2`
    pub joint: f64,
    /// Probability of the first test.
    pub first: f64,
    /// Probability of the second test given a positive first one (0 if the
    /// first test cannot succeed).
    pub conditional: f64,
}

/// Positive outcome for a test of `(a1, B1)` at `t1` followed by `(a2, B2)` at
/// `t2`, under the nonlinear dynamics with potential `v`.
#[allow(clippy::too_many_arguments)]
pub fn sequential_prob(
    a1: &Gpvm,
    b1: &IntervalSet,
    t1: f64,
    a2: &Gpvm,
    b2: &IntervalSet,
    t2: f64,
    psi: &WaveFn,
    d: f64,
    v: &Potential,
    dt: f64,
) -> Result<SequentialProb> {
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::InvalidParameter(format!(
            "sequential tests need 0 <= t1 <= t2, got t1={t1}, t2={t2}"
        )));
    }
    let total = nonzero_norm_sqr(psi)?;
    let at_t1 = evolve_dg_between(psi, d, v, 0.0, t1, dt);
    let collapsed = a1.effect(b1, &at_t1);
    let first = collapsed.norm_sqr() / total;
    let at_t2 = evolve_dg_between(&collapsed, d, v, t1, t2, dt);
    let second = a2.effect(b2, &at_t2);
    let joint = second.norm_sqr() / total;
    let conditional = if first > 0.0 { joint / first } else { 0.0 };
    Ok(SequentialProb {
        joint,
        first,
        conditional,
    })
}

/// Settings for [`check_gpvm_axioms`].
#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub partition: Partition,
    pub random_pairs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomResiduals {
    /// max |mu(union) - sum mu(cells)| over random unions of consecutive
    /// cells, and |1 - sum over all cells| if the partition covers the lattice.
    pub additivity: f64,
    /// max ||E_{B1} E_{B2} psi - E_{B1 ∩ B2} psi|| / ||psi||.
    pub composition: f64,
    /// max ||E_B psi - psi|| / ||psi|| over sets with mu(B) = 1.
    pub certainty: f64,
    /// How many certainty sets were checked.
    pub certainty_sets: usize,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.additivity.max(self.composition).max(self.certainty)
    }
}

/// Threshold below which a lattice cell counts as carrying no mass when
/// building support sets for the certainty axiom.
const NULL_CELL_MASS: f64 = 1e-28;

/// Random contiguous run of partition cells as an interval set.
fn random_run(rng: &mut ChaCha8Rng, cells: &[Interval]) -> IntervalSet {
    let i = rng.gen_range(0..cells.len());
    let j = rng.gen_range(i..cells.len());
    IntervalSet::from_intervals(cells[i..=j].to_vec())
}

/// Checks finite additivity, the composition law `E_{B1} E_{B2} = E_{B1 ∩ B2}`,
/// and `mu(B) = 1 => E_B psi = psi` on the given samples.
pub fn check_gpvm_axioms<E: EffectFamily>(
    a: &E,
    samples: &[WaveFn],
    check: &AxiomCheck,
) -> Result<AxiomResiduals> {
    let cells = check.partition.cells();
    if cells.is_empty() {
        return Err(Error::BadPartition("empty partition".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let mut out = AxiomResiduals {
        additivity: 0.0,
        composition: 0.0,
        certainty: 0.0,
        certainty_sets: 0,
    };
    for psi in samples {
        let nrm = nonzero_norm_sqr(psi)?.sqrt();
        let cell_probs = cells
            .iter()
            .map(|c| measure_prob(a, &IntervalSet::from(*c), psi))
            .collect::<Result<Vec<_>>>()?;

        for _ in 0..check.random_pairs {
            let i = rng.gen_range(0..cells.len());
            let j = rng.gen_range(i..cells.len());
            let union = IntervalSet::from_intervals(cells[i..=j].to_vec());
            let summed: f64 = cell_probs[i..=j].iter().sum();
            let direct = measure_prob(a, &union, psi)?;
            out.additivity = out.additivity.max((direct - summed).abs());

            let b1 = random_run(&mut rng, cells);
            let b2 = random_run(&mut rng, cells);
            let composed = a.effect(&b1, &a.effect(&b2, psi));
            let joint = a.effect(&b1.intersection(&b2), psi);
            out.composition = out.composition.max(composed.distance(&joint)? / nrm);
        }
        let total_prob = measure_prob(a, &check.partition.union(), psi)?;
        let summed_all: f64 = cell_probs.iter().sum();
        out.additivity = out.additivity.max((total_prob - summed_all).abs());

        let support = IntervalSet::from_intervals(
            cells
                .iter()
                .zip(&cell_probs)
                .filter(|(_, &p)| p * nrm * nrm > NULL_CELL_MASS)
                .map(|(c, _)| *c)
                .collect(),
        );
        for set in [IntervalSet::full(), support] {
            // mu(B) = 1 is judged on the complement to avoid cancellation
            if measure_prob(a, &set.complement(), psi)? < 1e-24 {
                let res = a.effect(&set, psi).distance(psi)? / nrm;
                out.certainty = out.certainty.max(res);
                out.certainty_sets += 1;
            }
        }
    }
    Ok(out)
}

/// `||E_B(beta_{D,t} psi) - beta_{D,t}(E_B psi)|| / ||psi||` for free dynamics.
pub fn conservation_residual(a: &Gpvm, set: &IntervalSet, psi: &WaveFn, d: f64, t: f64) -> Result<f64> {
    let nrm = nonzero_norm_sqr(psi)?.sqrt();
    let lhs = a.effect(set, &evolve_dg_free(psi, d, t));
    let rhs = evolve_dg_free(&a.effect(set, psi), d, t);
    Ok(lhs.distance(&rhs)? / nrm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditivityProbe {
    /// `| ||E_{B1 ∪ B2} psi||^2 - ||E_{B1} psi||^2 - ||E_{B2} psi||^2 | / ||psi||^2`
    pub norm_additivity_gap: f64,
    /// `||E_{B1 ∪ B2} psi - E_{B1} psi - E_{B2} psi|| / ||psi||`
    pub vector_additivity_gap: f64,
    /// `<E_{B1} psi | E_{B2} psi> / ||psi||^2`
    pub cross_overlap: Complex64,
}

pub fn vector_additivity_probe<E: EffectFamily>(
    a: &E,
    b1: &IntervalSet,
    b2: &IntervalSet,
    psi: &WaveFn,
) -> Result<AdditivityProbe> {
    if !b1.is_disjoint(b2) {
        return Err(Error::OverlappingIntervals);
    }
    let total = nonzero_norm_sqr(psi)?;
    let e1 = a.effect(b1, psi);
    let e2 = a.effect(b2, psi);
    let e12 = a.effect(&b1.union(b2), psi);
    let norm_gap = (e12.norm_sqr() - e1.norm_sqr() - e2.norm_sqr()).abs() / total;
    let vector_gap = e12.sub(&e1)?.sub(&e2)?.norm() / total.sqrt();
    let cross = inner_product(&e1, &e2)? / total;
    Ok(AdditivityProbe {
        norm_additivity_gap: norm_gap,
        vector_additivity_gap: vector_gap,
        cross_overlap: cross,
    })
}
