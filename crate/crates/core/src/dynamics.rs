//! Doebner-Goldin dynamics `beta_{D,t} = N_D ∘ beta_{0,t} ∘ N_{-D}`, plus a
//! direct integrator of the nonlinear equation used as an independent check.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeParam};
use crate::grid::{raw_inner, Amplitudes, Grid1D, WaveFn, WaveFn2};
use crate::propagators::{free_evolve, linear_evolve, split_step_evolve, Potential, StepConfig};
use crate::spectral;

/// Coefficients of the nonlinear functional
/// `D (c1 div J / rho + c2 lap rho / rho + c3 J^2 / rho^2 + c4 J grad rho / rho^2 + c5 (grad rho)^2 / rho^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DgCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

impl DgCoefficients {
    /// The family linearized by `N_D`: `(1, -D, 0, -1, D/2)`.
    pub fn linearizable(d: f64) -> Self {
        Self {
            c1: 1.0,
            c2: -d,
            c3: 0.0,
            c4: -1.0,
            c5: 0.5 * d,
        }
    }

    /// Whether the coefficients belong to the gauge-linearizable family for `d`.
    pub fn is_linearizable(&self, d: f64) -> bool {
        let tol = 1e-14 * (1.0 + d.abs());
        (self.c1 - 1.0).abs() <= tol
            && (self.c4 + 1.0).abs() <= tol
            && self.c3.abs() <= tol
            && (self.c2 + 2.0 * self.c5).abs() <= tol
            && (self.c2 + d).abs() <= tol
    }
}

/// Nonlinear evolution by conjugation of the linear one.
pub fn evolve_dg(psi: &WaveFn, d: f64, potential: &Potential, cfg: &StepConfig) -> Result<WaveFn> {
    let g = GaugeParam::new(d);
    let linear = split_step_evolve(&apply_gauge(psi, &g.inverse()), potential, cfg)?;
    Ok(apply_gauge(&linear, &g))
}

/// Nonlinear evolution from `t_from` to `t_to`, either direction.
pub fn evolve_dg_between(
    psi: &WaveFn,
    d: f64,
    potential: &Potential,
    t_from: f64,
    t_to: f64,
    dt: f64,
) -> WaveFn {
    let g = GaugeParam::new(d);
    let linear = linear_evolve(&apply_gauge(psi, &g.inverse()), potential, t_from, t_to, dt);
    apply_gauge(&linear, &g)
}

/// Free (`V = 0`) nonlinear evolution by `t`, exact on the lattice.
pub fn evolve_dg_free(psi: &WaveFn, d: f64, t: f64) -> WaveFn {
    let g = GaugeParam::new(d);
    apply_gauge(&free_evolve(&apply_gauge(psi, &g.inverse()), t), &g)
}

/// Two-particle evolution `N_D ∘ (U1 ⊗ U2) ∘ N_{-D}` with `N_D` acting on the
/// joint density.
pub fn evolve_dg_two_particle(
    psi: &WaveFn2,
    d: f64,
    v1: &Potential,
    v2: &Potential,
    cfg: &StepConfig,
) -> Result<WaveFn2> {
    let g = GaugeParam::new(d);
    let start = apply_gauge(psi, &g.inverse());
    let evolved = start
        .map_axis1(|col| split_step_evolve(col, v1, cfg))?
        .map_axis2(|row| split_step_evolve(row, v2, cfg))?;
    Ok(apply_gauge(&evolved, &g))
}

/// Minimum-to-maximum density ratio below which the direct integrator
/// refuses to continue.
pub const NODE_RATIO: f64 = 1e-8;

fn density_ratio(amps: &[Complex64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for a in amps {
        let r = a.norm_sqr();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// Right-hand side `-i H(psi)` of the nonlinear equation.
fn dg_rhs(
    grid: &Grid1D,
    amps: &[Complex64],
    coeffs: &DgCoefficients,
    d: f64,
    potential: &Potential,
    t: f64,
) -> Vec<Complex64> {
    let grad = spectral::derivative(grid, amps);
    let lap = spectral::laplacian(grid, amps);
    let i = Complex64::new(0.0, 1.0);
    amps.iter()
        .zip(&grad)
        .zip(&lap)
        .enumerate()
        .map(|(idx, ((&psi, &dpsi), &ddpsi))| {
            let rho = psi.norm_sqr();
            let cross = psi.conj() * dpsi;
            let grad_rho = 2.0 * cross.re;
            let current = cross.im;
            let lap_rho = 2.0 * (psi.conj() * ddpsi).re + 2.0 * dpsi.norm_sqr();
            let div_j = (psi.conj() * ddpsi).im;
            let lap_ratio = lap_rho / rho;
            let real_part = d
                * (coeffs.c1 * div_j / rho
                    + coeffs.c2 * lap_ratio
                    + coeffs.c3 * current * current / (rho * rho)
                    + coeffs.c4 * current * grad_rho / (rho * rho)
                    + coeffs.c5 * grad_rho * grad_rho / (rho * rho));
            let v = potential.value(grid.x(idx), t);
            let h = -0.5 * ddpsi + (v + real_part) * psi + i * (0.5 * d * lap_ratio) * psi;
            -i * h
        })
        .collect()
}

/// Classical RK4 integration of the nonlinear equation with spectral spatial
/// derivatives. Requires a node-free state throughout.
pub fn evolve_dg_direct(
    psi: &WaveFn,
    coeffs: &DgCoefficients,
    d: f64,
    potential: &Potential,
    cfg: &StepConfig,
) -> Result<WaveFn> {
    let grid = *psi.grid();
    let mut state = psi.amps().to_vec();
    let ratio = density_ratio(&state);
    if ratio < NODE_RATIO {
        return Err(Error::NodeDetected {
            t: cfg.t_start,
            ratio,
        });
    }
    let norm0 = psi.norm_sqr();
    let span = cfg.t_final - cfg.t_start;
    if span == 0.0 {
        return Ok(psi.clone());
    }
    let steps = (span / cfg.dt).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let axpy = |base: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        base.iter().zip(k).map(|(b, k)| b + k * s).collect()
    };
    for step in 0..steps {
        let t = cfg.t_start + step as f64 * h;
        let k1 = dg_rhs(&grid, &state, coeffs, d, potential, t);
        let s2 = axpy(&state, &k1, 0.5 * h);
        let k2 = dg_rhs(&grid, &s2, coeffs, d, potential, t + 0.5 * h);
        let s3 = axpy(&state, &k2, 0.5 * h);
        let k3 = dg_rhs(&grid, &s3, coeffs, d, potential, t + 0.5 * h);
        let s4 = axpy(&state, &k3, h);
        let k4 = dg_rhs(&grid, &s4, coeffs, d, potential, t + h);
        for (idx, s) in state.iter_mut().enumerate() {
            *s += (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]) * (h / 6.0);
        }
        let t_next = t + h;
        let norm = grid.dx() * state.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let drift = ((norm - norm0) / norm0).abs();
        if !drift.is_finite() || drift > 0.01 {
            return Err(Error::BlowUp { t: t_next, drift });
        }
        let ratio = density_ratio(&state);
        if ratio < NODE_RATIO {
            return Err(Error::NodeDetected { t: t_next, ratio });
        }
    }
    WaveFn::new(grid, state)
}

/// Comparison of the generator of the nonlinear flow with the conjugated
/// linear Hamiltonian, for `V = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamiltonianGap {
    /// `|| H_D(psi) - N_D(H_0(N_{-D} psi)) ||`
    pub gap_vector_norm: f64,
    /// `| <psi | H_D psi> - <N_{-D} psi | H_0 N_{-D} psi> |`
    pub gap_expectation: f64,
    /// `|| H_D(psi) ||`
    pub generator_norm: f64,
    /// `|| H_0 N_{-D}(psi) ||`
    pub conjugated_norm: f64,
    /// Difference between the step-`delta` and step-`2 delta` central
    /// differences, as a check on the finite-difference error.
    pub richardson_residual: f64,
}

/// Central-difference step for [`hamiltonian_conjugation_gap`].
pub const GENERATOR_STEP: f64 = 1e-5;

/// `H_D(psi) = i d/dt beta_{D,t}(psi)` at `t = 0`, by Richardson-extrapolated
/// central differences of the conjugated flow.
fn nonlinear_generator(psi: &WaveFn, d: f64, delta: f64) -> Result<(WaveFn, f64)> {
    let central = |h: f64| -> Result<WaveFn> {
        let fwd = evolve_dg_free(psi, d, h);
        let bwd = evolve_dg_free(psi, d, -h);
        Ok(fwd.sub(&bwd)?.scaled(Complex64::new(0.0, 1.0 / (2.0 * h))))
    };
    let fine = central(delta)?;
    let coarse = central(2.0 * delta)?;
    let residual = fine.distance(&coarse)?;
    let extrapolated = fine
        .scaled(Complex64::new(4.0 / 3.0, 0.0))
        .sub(&coarse.scaled(Complex64::new(1.0 / 3.0, 0.0)))?;
    Ok((extrapolated, residual))
}

pub fn hamiltonian_conjugation_gap(psi: &WaveFn, d: f64) -> Result<HamiltonianGap> {
    if psi.amps().iter().any(|a| a.norm_sqr() == 0.0) {
        return Err(Error::NodeDetected { t: 0.0, ratio: 0.0 });
    }
    let g = GaugeParam::new(d);
    let (generator, richardson_residual) = nonlinear_generator(psi, d, GENERATOR_STEP)?;

    let phi = apply_gauge(psi, &g.inverse());
    let grid = *psi.grid();
    let h0_phi = WaveFn::from_vec(
        grid,
        spectral::laplacian(&grid, phi.amps())
            .into_iter()
            .map(|v| -0.5 * v)
            .collect(),
    );
    let conjugated = apply_gauge(&h0_phi, &g);
    let dx = grid.dx();
    let e_nonlinear = raw_inner(psi.amps(), generator.amps()) * dx;
    let e_linear = raw_inner(phi.amps(), h0_phi.amps()) * dx;
    Ok(HamiltonianGap {
        gap_vector_norm: generator.distance(&conjugated)?,
        gap_expectation: (e_nonlinear - e_linear).norm(),
        generator_norm: generator.norm(),
        conjugated_norm: h0_phi.norm(),
        richardson_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::tensor_product;
    use crate::propagators::{PotentialShape, Scheme};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coefficient_family() {
        let k = DgCoefficients::linearizable(0.5);
        assert_eq!((k.c1, k.c2, k.c3, k.c4, k.c5), (1.0, -0.5, 0.0, -1.0, 0.25));
        assert!(k.is_linearizable(0.5));
        assert!(!k.is_linearizable(0.4));
        assert_eq!(k.c2 + 2.0 * k.c5, 0.0);
    }

    #[test]
    fn zero_time_and_zero_d() {
        let g = Grid1D::new(256, -10.0, 10.0).unwrap();
        let psi = WaveFn::gaussian(g, 0.3, 1.0, 0.5).unwrap();
        let cfg0 = StepConfig::strang(1e-3, 0.0).unwrap();
        let v = Potential::always(PotentialShape::Harmonic { omega: 1.0, center: 0.0 }).unwrap();
        assert!(evolve_dg(&psi, 1.0, &v, &cfg0).unwrap().distance(&psi).unwrap() < 1e-13);
        let cfg = StepConfig::strang(1e-3, 0.5).unwrap();
        let lin = split_step_evolve(&psi, &v, &cfg).unwrap();
        assert_eq!(evolve_dg(&psi, 0.0, &v, &cfg).unwrap(), lin);
    }

    #[test]
    fn norm_conserved_and_intertwines() {
        let g = Grid1D::new(256, -10.0, 10.0).unwrap();
        let phi = WaveFn::gaussian(g, 0.3, 1.0, 0.5).unwrap();
        let v = Potential::new(PotentialShape::Gaussian { height: 1.0, width: 1.0, center: 1.0 }, 0.0, 0.3).unwrap();
        let cfg = StepConfig::strang(1e-3, 0.5).unwrap();
        let d = 0.7;
        let gp = GaugeParam::new(d);
        let out = evolve_dg(&apply_gauge(&phi, &gp), d, &v, &cfg).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
        let expected = apply_gauge(&split_step_evolve(&phi, &v, &cfg).unwrap(), &gp);
        assert!(out.distance(&expected).unwrap() < 1e-12);
        // D-reversed conjugation symmetry
        let rev = evolve_dg(&phi, -d, &v, &cfg).unwrap();
        let expected = apply_gauge(&split_step_evolve(&apply_gauge(&phi, &gp), &v, &cfg).unwrap(), &gp.inverse());
        assert!(rev.distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn group_law() {
        let g = Grid1D::new(256, -10.0, 10.0).unwrap();
        let psi = WaveFn::gaussian(g, 0.3, 1.0, 0.5).unwrap();
        let v = Potential::always(PotentialShape::Harmonic { omega: 0.8, center: 0.0 }).unwrap();
        let d = 1.0;
        let two = evolve_dg_between(&evolve_dg_between(&psi, d, &v, 0.0, 0.3, 1e-3), d, &v, 0.3, 0.8, 1e-3);
        let one = evolve_dg_between(&psi, d, &v, 0.0, 0.8, 1e-3);
        assert!(two.distance(&one).unwrap() < 1e-6);
    }

    #[test]
    fn direct_integrator_rejects_nodes() {
        let g = Grid1D::new(128, -4.0, 4.0).unwrap();
        let step = WaveFn::from_fn(g, |x| c(if x.abs() < 1.0 { 1.0 } else { 0.0 }, 0.0));
        let cfg = StepConfig::strang(1e-4, 0.01).unwrap();
        let r = evolve_dg_direct(&step, &DgCoefficients::linearizable(0.5), 0.5, &Potential::zero(), &cfg);
        assert!(matches!(r, Err(Error::NodeDetected { .. })));
    }

    /// Gaussian on a small constant pedestal keeps the density bounded away
    /// from zero on a periodic box.
    fn pedestal_gaussian(g: Grid1D) -> WaveFn {
        WaveFn::from_fn(g, |x| c((-0.5 * x * x).exp() + 1e-2, 0.0)).normalize().unwrap()
    }

    #[test]
    fn direct_integrator_linear_case() {
        let g = Grid1D::new(256, -10.0, 10.0).unwrap();
        let psi = pedestal_gaussian(g);
        let cfg = StepConfig::strang(1e-4, 0.1).unwrap();
        let out = evolve_dg_direct(&psi, &DgCoefficients::linearizable(0.0), 0.0, &Potential::zero(), &cfg).unwrap();
        assert!(out.distance(&free_evolve(&psi, 0.1)).unwrap() < 1e-6);
    }

    #[test]
    fn direct_integrator_matches_conjugation() {
        let g = Grid1D::new(256, -10.0, 10.0).unwrap();
        let psi = pedestal_gaussian(g);
        let d = 0.5;
        let cfg = StepConfig::strang(1e-4, 0.1).unwrap();
        let direct = evolve_dg_direct(&psi, &DgCoefficients::linearizable(d), d, &Potential::zero(), &cfg).unwrap();
        let conj = evolve_dg(&psi, d, &Potential::zero(), &cfg).unwrap();
        let err = direct.distance(&conj).unwrap();
        assert!(err < 1e-4, "err {err}");
    }

    #[test]
    fn two_particle_product_state_factorizes() {
        let g1 = Grid1D::new(64, -8.0, 8.0).unwrap();
        let g2 = Grid1D::new(64, -6.0, 10.0).unwrap();
        let a = WaveFn::gaussian(g1, -1.0, 1.0, 0.5).unwrap();
        let b = WaveFn::gaussian(g2, 2.0, 0.8, -0.3).unwrap();
        let v1 = Potential::always(PotentialShape::Harmonic { omega: 0.5, center: 0.0 }).unwrap();
        let v2 = Potential::new(PotentialShape::Gaussian { height: 2.0, width: 0.5, center: 2.0 }, 0.1, 0.3).unwrap();
        let cfg = StepConfig::strang(1e-2, 0.5).unwrap();
        for d in [0.0, 1.0] {
            let joint = evolve_dg_two_particle(&tensor_product(&a, &b), d, &v1, &v2, &cfg).unwrap();
            let fact = tensor_product(
                &evolve_dg(&a, d, &v1, &cfg).unwrap(),
                &evolve_dg(&b, d, &v2, &cfg).unwrap(),
            );
            assert!(joint.distance(&fact).unwrap() < 1e-10, "d={d}");
            assert!((joint.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_particle_disjoint_sum_expands() {
        // Psi = Phi1 ⊗ P1 + Phi2 ⊗ P2 with disjoint first factors:
        // beta(N_D Psi) = sum_j N_D(U Phi_j) ⊗ N_D(U P_j) while supports stay apart.
        let g1 = Grid1D::new(128, -16.0, 16.0).unwrap();
        let g2 = Grid1D::new(64, -8.0, 8.0).unwrap();
        let phi1 = WaveFn::gaussian(g1, -8.0, 0.7, 0.0).unwrap();
        let phi2 = WaveFn::gaussian(g1, 8.0, 0.7, 0.0).unwrap();
        let p1 = WaveFn::gaussian(g2, -1.0, 1.0, 0.0).unwrap();
        let p2 = WaveFn::gaussian(g2, 1.0, 0.6, 1.0).unwrap();
        let d = 1.0;
        let gp = GaugeParam::new(d);
        let lin = tensor_product(&phi1, &p1).add(&tensor_product(&phi2, &p2)).unwrap();
        let psi0 = apply_gauge(&lin, &gp);
        let cfg = StepConfig::new(1e-2, Scheme::ExactFree, 0.5).unwrap();
        let zero = Potential::zero();
        let joint = evolve_dg_two_particle(&psi0, d, &zero, &zero, &cfg).unwrap();
        let term = |a: &WaveFn, b: &WaveFn| {
            tensor_product(&apply_gauge(&free_evolve(a, 0.5), &gp), &apply_gauge(&free_evolve(b, 0.5), &gp))
        };
        let expanded = term(&phi1, &p1).add(&term(&phi2, &p2)).unwrap();
        assert!(joint.distance(&expanded).unwrap() < 1e-10);
    }

    #[test]
    fn hamiltonian_gap_linear_case() {
        let g = Grid1D::new(512, -12.0, 12.0).unwrap();
        let psi = WaveFn::gaussian(g, 0.0, 1.0, 0.3).unwrap();
        let gap = hamiltonian_conjugation_gap(&psi, 0.0).unwrap();
        assert!(gap.gap_vector_norm < 1e-8, "{gap:?}");
        assert!(gap.gap_expectation < 1e-8);
    }

    #[test]
    fn hamiltonian_gap_gaussian_matches_closed_form() {
        // psi = pi^{-1/4} e^{-x^2/2}: N_{-D} psi = c0 pi^{-1/4} e^{-(1/2 - iD) x^2}
        // with c0 = e^{iD ln(pi)/2}. The generator of the flow is
        // e^{i D ln rho} H0 phi - D^2 (4x^2 - 2) psi, evaluated here in closed form.
        let g = Grid1D::new(1024, -16.0, 16.0).unwrap();
        let psi = WaveFn::gaussian(g, 0.0, 1.0, 0.0).unwrap();
        let d = 0.5;
        let pi = std::f64::consts::PI;
        let a = c(0.5, -d);
        let c0 = Complex64::from_polar(1.0, 0.5 * d * pi.ln());
        let mut gen = Vec::new();
        let mut conj = Vec::new();
        for i in 0..g.n() {
            let x = g.x(i);
            let phi = c0 * pi.powf(-0.25) * (-a * x * x).exp();
            let h0phi = -0.5 * (4.0 * a * a * x * x - 2.0 * a) * phi;
            let psi_x = pi.powf(-0.25) * (-0.5 * x * x).exp();
            let rho = psi_x * psi_x;
            gen.push(Complex64::from_polar(1.0, d * rho.ln()) * h0phi - d * d * (4.0 * x * x - 2.0) * psi_x);
            let r = h0phi.norm_sqr();
            conj.push(if r > 0.0 { h0phi * Complex64::from_polar(1.0, d * r.ln()) } else { c(0.0, 0.0) });
        }
        let expected = WaveFn::new(g, gen).unwrap().distance(&WaveFn::new(g, conj).unwrap()).unwrap();
        let gap = hamiltonian_conjugation_gap(&psi, d).unwrap();
        assert!(gap.gap_expectation < 1e-6, "{gap:?}");
        assert!(gap.gap_vector_norm > 1e-3);
        assert!((gap.gap_vector_norm - expected).abs() < 1e-6, "{gap:?} vs {expected}");
        // |H_D psi|^2 = |H0 phi|^2 + |D^2 (4x^2-2) psi|^2 = 3/4 + 8 D^4
        assert!((gap.generator_norm - (0.75 + 8.0 * d.powi(4)).sqrt()).abs() < 1e-6);
        assert!((gap.conjugated_norm - 0.75f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn hamiltonian_gap_on_exponential_region() {
        // For real psi the flow's generator differs from e^{i D ln rho} H0 N_{-D} psi
        // by -D^2 (lap rho / rho) psi. With psi = sech(x), lap rho / rho = 4 - 6 sech^2,
        // which tends to 4 on the region where psi ≈ 2 e^{-x}.
        let g = Grid1D::new(1024, -20.0, 20.0).unwrap();
        let psi = WaveFn::from_fn(g, |x| c(1.0 / x.cosh(), 0.0));
        let d = 1.0;
        let gap = hamiltonian_conjugation_gap(&psi, d).unwrap();
        assert!(gap.gap_vector_norm > 0.1, "{gap:?}");
        assert!(gap.gap_expectation < 1e-6, "{gap:?}");
        let phi = apply_gauge(&psi, &GaugeParam::new(-d));
        let (gen, _) = nonlinear_generator(&psi, d, GENERATOR_STEP).unwrap();
        let h0 = spectral::laplacian(&g, phi.amps());
        for i in 0..g.n() {
            let x = g.x(i);
            if (3.0..5.0).contains(&x) {
                let rho = psi.amps()[i].norm_sqr();
                let transported = -0.5 * h0[i] * Complex64::from_polar(1.0, d * rho.ln());
                let diff = gen.amps()[i] - transported;
                let sech2 = 1.0 / x.cosh().powi(2);
                let expected = -d * d * (4.0 - 6.0 * sech2) * psi.amps()[i];
                assert!((diff - expected).norm() < 1e-6 * expected.norm(), "x={x}");
            }
        }
    }
}
