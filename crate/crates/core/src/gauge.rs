//! The nonlinear gauge intertwiner
//! `N_D(psi)(x) = exp(i D ln rho(x)) psi(x)` for `psi(x) != 0`, and `0` otherwise.
//!
//! The multiplier is unimodular, so `N_D` preserves the norm, and
//! `N_{-D}` is its inverse.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Amplitudes, WaveFn};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeParam {
    pub d: f64,
    /// Densities at or below this value map to zero. `0.0` zeroes only exact
    /// zeros.
    pub rho_floor: f64,
}

impl GaugeParam {
    pub fn new(d: f64) -> Self {
        Self { d, rho_floor: 0.0 }
    }

    pub fn with_floor(d: f64, rho_floor: f64) -> Result<Self> {
        if !(rho_floor >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_floor must be nonnegative, got {rho_floor}"
            )));
        }
        Ok(Self { d, rho_floor })
    }

    /// The inverse gauge `N_{-D}` (same floor).
    pub fn inverse(&self) -> Self {
        Self {
            d: -self.d,
            rho_floor: self.rho_floor,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.d == 0.0 && self.rho_floor == 0.0
    }

    /// Applies the gauge in place to a raw amplitude buffer.
    pub fn apply_in_place(&self, amps: &mut [Complex64]) {
        if self.is_identity() {
            return;
        }
        for a in amps.iter_mut() {
            let rho = a.norm_sqr();
            *a = if rho > self.rho_floor {
                *a * Complex64::from_polar(1.0, self.d * rho.ln())
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
    }
}

/// `N_D` applied to a one- or two-particle state; the density is the joint one.
pub fn apply_gauge<W: Amplitudes + Clone>(psi: &W, g: &GaugeParam) -> W {
    let mut out = psi.clone();
    g.apply_in_place(out.amps_mut());
    out
}

/// `||N_{-D}(N_D psi) - psi||`.
pub fn gauge_inverse_check(psi: &WaveFn, g: &GaugeParam) -> Result<f64> {
    let round_trip = apply_gauge(&apply_gauge(psi, g), &g.inverse());
    round_trip.distance(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product, tensor_product, Grid1D};
    use crate::interval::IntervalSet;
    use crate::propagators::position_projection;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_smooth(grid: Grid1D, rng: &mut ChaCha8Rng) -> WaveFn {
        let mut psi = WaveFn::zeros(grid);
        for _ in 0..3 {
            let g = WaveFn::gaussian(
                grid,
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.4..1.5),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            psi = psi.add(&g.scaled(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).unwrap();
        }
        psi
    }

    #[test]
    fn zero_d_is_identity() {
        let g = Grid1D::new(128, -8.0, 8.0).unwrap();
        let psi = WaveFn::gaussian(g, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(apply_gauge(&psi, &GaugeParam::new(0.0)), psi);
        assert_eq!(gauge_inverse_check(&psi, &GaugeParam::new(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn constant_modulus_gets_global_phase() {
        let g = Grid1D::new(128, -8.0, 8.0).unwrap();
        let psi = WaveFn::plane_wave(g, 3);
        let out = apply_gauge(&psi, &GaugeParam::new(0.8));
        let ip = inner_product(&out, &psi).unwrap();
        assert!((ip.norm() - psi.norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn plateau_phases() {
        // Phi_+ with D = 1: rho = e^{pi/2} on (0, 1) gives the factor i.
        let g = Grid1D::new(64, -2.0, 2.0).unwrap();
        let a = PI / 4.0;
        let phi = WaveFn::from_fn(g, |x| {
            if (-1.0..0.0).contains(&x) {
                c(1.0, 0.0)
            } else if (0.0..1.0).contains(&x) {
                c(a.exp(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let out = apply_gauge(&phi, &GaugeParam::new(1.0));
        for (i, (o, p)) in out.amps().iter().zip(phi.amps()).enumerate() {
            let x = g.x(i);
            if (-1.0..0.0).contains(&x) {
                assert!((o - p).norm() < 1e-15);
            } else if (0.0..1.0).contains(&x) {
                assert!((o - p * c(0.0, 1.0)).norm() < 1e-14);
            } else {
                assert_eq!(*o, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn inverse_with_exact_zeros() {
        let g = Grid1D::new(64, -2.0, 2.0).unwrap();
        let step = WaveFn::from_fn(g, |x| c(if x.abs() < 1.0 { 1.5 } else { 0.0 }, 0.2 * x));
        assert!(gauge_inverse_check(&step, &GaugeParam::new(1.3)).unwrap() < 1e-12);
    }

    #[test]
    fn floor_zeroes_small_amplitudes() {
        let g = Grid1D::new(32, -1.0, 1.0).unwrap();
        let psi = WaveFn::from_fn(g, |x| c(if x < 0.0 { 1e-5 } else { 1.0 }, 0.0));
        let out = apply_gauge(&psi, &GaugeParam::with_floor(0.5, 1e-8).unwrap());
        assert!(out.amps()[..16].iter().all(|a| *a == c(0.0, 0.0)));
        assert!(out.amps()[16..].iter().all(|a| (a.norm() - 1.0).abs() < 1e-15));
        assert!(GaugeParam::with_floor(1.0, -1.0).is_err());
    }

    #[test]
    fn inverse_norm_separability_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Grid1D::new(128, -8.0, 8.0).unwrap();
        for _ in 0..20 {
            let d = rng.gen_range(-2.0..2.0);
            let gp = GaugeParam::new(d);
            let a = random_smooth(g, &mut rng);
            let b = random_smooth(g, &mut rng);
            assert!(gauge_inverse_check(&a, &gp).unwrap() < 1e-12 * a.norm().max(1.0));
            assert!((apply_gauge(&a, &gp).norm() - a.norm()).abs() < 1e-13 * a.norm());
            let lhs = apply_gauge(&tensor_product(&a, &b), &gp);
            let rhs = tensor_product(&apply_gauge(&a, &gp), &apply_gauge(&b, &gp));
            assert!(lhs.distance(&rhs).unwrap() < 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn pseudo_linear_for_disjoint_supports_and_unimodular_weights() {
        let g = Grid1D::new(128, -8.0, 8.0).unwrap();
        let gp = GaugeParam::new(0.9);
        let left = WaveFn::gaussian(g, -3.0, 0.7, 1.0)
            .unwrap()
            .multiply_by(|x| if x < 0.0 { 1.0 } else { 0.0 });
        let right = WaveFn::gaussian(g, 3.0, 0.4, 0.0)
            .unwrap()
            .multiply_by(|x| if x >= 0.0 { 1.0 } else { 0.0 });
        let c1 = Complex64::from_polar(1.0, 0.3);
        let c2 = Complex64::from_polar(1.0, -2.1);
        let lhs = apply_gauge(&left.scaled(c1).add(&right.scaled(c2)).unwrap(), &gp);
        let rhs = apply_gauge(&left, &gp)
            .scaled(c1)
            .add(&apply_gauge(&right, &gp).scaled(c2))
            .unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn homogeneity_up_to_modulus_phase() {
        // N_D(c psi) = c exp(2 i D ln|c|) N_D(psi)
        let g = Grid1D::new(64, -6.0, 6.0).unwrap();
        let gp = GaugeParam::new(0.6);
        let psi = WaveFn::gaussian(g, 0.2, 1.0, 0.4).unwrap();
        let cst = c(1.5, -0.7);
        let lhs = apply_gauge(&psi.scaled(cst), &gp);
        let factor = cst * Complex64::from_polar(1.0, 2.0 * gp.d * cst.norm().ln());
        let rhs = apply_gauge(&psi, &gp).scaled(factor);
        assert!(lhs.distance(&rhs).unwrap() < 1e-13);
    }

    #[test]
    fn commutes_with_position_indicators_and_keeps_zeros() {
        let g = Grid1D::new(128, -8.0, 8.0).unwrap();
        let gp = GaugeParam::new(1.2);
        let psi = WaveFn::gaussian(g, 0.5, 1.3, -0.8).unwrap();
        let b = IntervalSet::from_pairs(&[(-2.0, -0.5), (1.0, 4.0)]).unwrap();
        let lhs = apply_gauge(&position_projection(&psi, &b), &gp);
        let rhs = position_projection(&apply_gauge(&psi, &gp), &b);
        assert!(lhs.distance(&rhs).unwrap() < 1e-14);
        for (o, i) in lhs.amps().iter().zip(position_projection(&psi, &b).amps()) {
            if *i == c(0.0, 0.0) {
                assert_eq!(*o, c(0.0, 0.0));
            }
        }
    }

    proptest! {
        #[test]
        fn norm_preserved_and_invertible(
            d in -3.0f64..3.0,
            amps in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 32),
        ) {
            let g = Grid1D::new(32, -1.0, 1.0).unwrap();
            let psi = WaveFn::new(g, amps.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap();
            let gp = GaugeParam::new(d);
            let out = apply_gauge(&psi, &gp);
            prop_assert!((out.norm() - psi.norm()).abs() <= 1e-14 * psi.norm().max(1.0));
            prop_assert!(gauge_inverse_check(&psi, &gp).unwrap() <= 1e-12 * psi.norm().max(1.0));
        }
    }
}
