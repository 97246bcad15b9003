use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::evolve_dg_free;
use crate::error::Result;
use crate::gauge::{apply_gauge, GaugeParam};
use crate::gpvm::{expectation, lattice_partition, measure_prob, Base, EffectFamily, Gpvm};
use crate::grid::{tensor_product, Amplitudes, Grid1D};
use crate::interval::IntervalSet;
use crate::propagators::{momentum_projection, position_projection};

use super::{random_gaussian_state, random_interval};

#[derive(Debug, Clone, Serialize)]
pub struct IntertwinerReport {
    pub d: f64,
    pub states: usize,
    /// max `||N_{-D} N_D psi - psi|| / ||psi||`
    pub inverse: f64,
    /// max `| ||N_D psi|| - ||psi|| | / ||psi||`
    pub norm_preservation: f64,
    /// max `||N_D(phi ⊗ psi) - N_D phi ⊗ N_D psi||`, normalized
    pub separability: f64,
    /// max `||N_D(c1 f1 + c2 f2) - c1 N_D f1 - c2 N_D f2||` for disjoint
    /// supports and unimodular `c`, normalized
    pub pseudo_linearity: f64,
}

impl IntertwinerReport {
    pub fn max(&self) -> f64 {
        self.inverse
            .max(self.norm_preservation)
            .max(self.separability)
            .max(self.pseudo_linearity)
    }
}

fn unimodular(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Inverse, isometry, separability and pseudo-linearity of `N_D` on random
/// states.
pub fn intertwiner_identities(grid: Grid1D, d: f64, states: usize, seed: u64) -> Result<IntertwinerReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = GaugeParam::new(d);
    let small = Grid1D::new(64, grid.x_min(), grid.x_max())?;
    let mid = 0.5 * (grid.x_min() + grid.x_max());
    let left = IntervalSet::interval(f64::NEG_INFINITY, mid)?;
    let right = left.complement();
    let mut rep = IntertwinerReport {
        d,
        states,
        inverse: 0.0,
        norm_preservation: 0.0,
        separability: 0.0,
        pseudo_linearity: 0.0,
    };
    for _ in 0..states {
        let psi = random_gaussian_state(grid, &mut rng);
        let nrm = psi.norm();
        let gauged = apply_gauge(&psi, &g);
        rep.inverse = rep.inverse.max(apply_gauge(&gauged, &g.inverse()).distance(&psi)? / nrm);
        rep.norm_preservation = rep.norm_preservation.max((gauged.norm() - nrm).abs() / nrm);

        let a = random_gaussian_state(small, &mut rng);
        let b = random_gaussian_state(small, &mut rng);
        let joint = apply_gauge(&tensor_product(&a, &b), &g);
        let split = tensor_product(&apply_gauge(&a, &g), &apply_gauge(&b, &g));
        rep.separability = rep.separability.max(joint.distance(&split)? / (a.norm() * b.norm()));

        let f1 = position_projection(&random_gaussian_state(grid, &mut rng), &left);
        let f2 = position_projection(&random_gaussian_state(grid, &mut rng), &right);
        let (c1, c2) = (unimodular(&mut rng), unimodular(&mut rng));
        let lhs = apply_gauge(&f1.scaled(c1).add(&f2.scaled(c2))?, &g);
        let rhs = apply_gauge(&f1, &g).scaled(c1).add(&apply_gauge(&f2, &g).scaled(c2))?;
        let scale = (f1.norm_sqr() + f2.norm_sqr()).sqrt();
        rep.pseudo_linearity = rep.pseudo_linearity.max(lhs.distance(&rhs)? / scale);
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct LogicReport {
    pub d: f64,
    pub states: usize,
    pub projections: usize,
    /// max `|omega_{N_D psi}(gamma(P)) - omega_psi(P)|`
    pub statistics_transport: f64,
    /// max `|E_{N_D psi}(A_D) - E_psi(A)|` for position and momentum
    pub expectation_equality: f64,
    /// max `|omega(gamma(not P)) - (1 - omega(gamma(P)))|`
    pub complement: f64,
    /// max violation of `omega(gamma(P1)) <= omega(gamma(P2))` and of
    /// `gamma(P1) gamma(P2) = gamma(P1)` for `B1 ⊂ B2`
    pub order: f64,
    /// max `| ||beta_{-t} E beta_t psi||^2 - ||E beta_t psi||^2 | / ||psi||^2`
    pub heisenberg_transport: f64,
    /// min over states of max over momentum projections of
    /// `|omega_{N_D psi}(P) - omega_psi(P)|`, with `P` left unconjugated.
    /// The projections are the random ones plus a half-line one standard
    /// deviation above the state's mean momentum.
    pub negative_control: f64,
    pub transport_time: f64,
}

impl LogicReport {
    pub fn max_residual(&self) -> f64 {
        self.statistics_transport
            .max(self.expectation_equality)
            .max(self.complement)
            .max(self.order)
            .max(self.heisenberg_transport)
    }
}

/// Momentum range holding essentially all of a random Gaussian state.
fn momentum_band(grid: Grid1D) -> f64 {
    let sigma_min = 0.02 * grid.length();
    (2.0 + 4.0) / sigma_min
}

/// Checks that `gamma(P) = N_D ∘ P ∘ N_{-D}` carries the linear statistics of
/// `psi` to those of `N_D psi`, on random Gaussian states and random position
/// and momentum intervals.
pub fn logic_isomorphism_check(
    grid: Grid1D,
    d: f64,
    states: usize,
    projections: usize,
    transport_time: f64,
    seed: u64,
) -> Result<LogicReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = GaugeParam::new(d);
    let (x_lo, x_hi) = (grid.x_min(), grid.x_max());
    let p_band = momentum_band(grid);
    let x_part = lattice_partition(&grid, Base::Position);
    let p_part = lattice_partition(&grid, Base::Momentum);
    let mut rep = LogicReport {
        d,
        states,
        projections,
        statistics_transport: 0.0,
        expectation_equality: 0.0,
        complement: 0.0,
        order: 0.0,
        heisenberg_transport: 0.0,
        negative_control: f64::INFINITY,
        transport_time,
    };
    for _ in 0..states {
        let psi = random_gaussian_state(grid, &mut rng);
        let nrm2 = psi.norm_sqr();
        let gauged = apply_gauge(&psi, &g);
        let evolved = evolve_dg_free(&gauged, d, transport_time);

        for (base, part) in [(Base::Position, &x_part), (Base::Momentum, &p_part)] {
            let lin = expectation(&Gpvm { base, d: 0.0 }, &psi, part)?;
            let non = expectation(&Gpvm { base, d }, &gauged, part)?;
            rep.expectation_equality = rep.expectation_equality.max((lin - non).abs());
        }

        let mut control: f64 = 0.0;
        for k in 0..projections {
            let (base, lo, hi) = if k % 2 == 0 {
                (Base::Position, x_lo, x_hi)
            } else {
                // keep momentum intervals where the random states live
                (Base::Momentum, -p_band, p_band)
            };
            let linear = Gpvm { base, d: 0.0 };
            let gamma = Gpvm { base, d };
            let outer = random_interval(&mut rng, lo, hi);
            let inner = random_interval(&mut rng, outer.a, outer.b);
            let b = IntervalSet::from(outer);
            let b_inner = IntervalSet::from(inner);

            let w_lin = measure_prob(&linear, &b, &psi)?;
            let w_gamma = measure_prob(&gamma, &b, &gauged)?;
            rep.statistics_transport = rep.statistics_transport.max((w_lin - w_gamma).abs());

            let w_not = measure_prob(&gamma, &b.complement(), &gauged)?;
            rep.complement = rep.complement.max((w_not - (1.0 - w_gamma)).abs());

            let w_inner = measure_prob(&gamma, &b_inner, &gauged)?;
            let composed = gamma.effect(&b_inner, &gamma.effect(&b, &gauged));
            let direct = gamma.effect(&b_inner, &gauged);
            rep.order = rep
                .order
                .max((w_inner - w_gamma).max(0.0))
                .max(composed.distance(&direct)? / nrm2.sqrt());

            let hit = gamma.effect(&b, &evolved);
            let transported = evolve_dg_free(&hit, d, -transport_time);
            rep.heisenberg_transport = rep
                .heisenberg_transport
                .max((transported.norm_sqr() - hit.norm_sqr()).abs() / nrm2);

            if base == Base::Momentum {
                let raw = momentum_projection(&gauged, &b).norm_sqr() / nrm2;
                control = control.max((raw - w_lin).abs());
            }
        }
        // a half-line one standard deviation above the mean momentum of psi
        let masses = psi.momentum_masses();
        let mean: f64 = masses.iter().enumerate().map(|(m, w)| grid.momentum_of_bin(m) * w).sum::<f64>() / nrm2;
        let var: f64 = masses
            .iter()
            .enumerate()
            .map(|(m, w)| (grid.momentum_of_bin(m) - mean).powi(2) * w)
            .sum::<f64>()
            / nrm2;
        let tail = IntervalSet::interval(mean + var.sqrt(), f64::INFINITY)?;
        let raw = momentum_projection(&gauged, &tail).norm_sqr() / nrm2;
        let lin = momentum_projection(&psi, &tail).norm_sqr() / nrm2;
        control = control.max((raw - lin).abs());
        rep.negative_control = rep.negative_control.min(control);
    }
    Ok(rep)
}
