use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::evolve_dg_two_particle;
use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeParam};
use crate::grid::{inner_product, partial_statistic, tensor_product, Amplitudes, Grid1D, WaveFn};
use crate::interval::IntervalSet;
use crate::propagators::{position_projection, split_step_evolve, Potential, PotentialShape, StepConfig};

use super::essential_support;

/// Run parameters for [`ftl_experiment`].
#[derive(Debug, Clone, Serialize)]
pub struct FtlConfig {
    pub d: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(flatten)]
    pub setup: FtlSetup,
}

impl Default for FtlConfig {
    fn default() -> Self {
        Self {
            d: 1.0,
            dt: 1e-3,
            t_final: 1.8,
            setup: FtlSetup::default(),
        }
    }
}

/// Two-particle signaling geometry. Lab packets sit at rest at
/// `±lab_separation/2`. Moon packets start at `L ∓ moon_offset` and move toward
/// each other with momentum `±moon_k`; the pulse is a Gaussian barrier at `L`
/// that is switched on for `[pulse_on, pulse_off)` and splits each moon packet.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FtlSetup {
    pub lab_n: usize,
    pub lab_half_width: f64,
    pub lab_separation: f64,
    pub lab_sigma: f64,
    pub moon_distance: f64,
    pub distance_factor: f64,
    pub moon_n: usize,
    pub moon_half_width: f64,
    pub moon_offset: f64,
    pub moon_sigma: f64,
    pub moon_k: f64,
    pub barrier_height: f64,
    pub barrier_width: f64,
    pub pulse_on: f64,
    pub pulse_off: f64,
}

impl Default for FtlSetup {
    fn default() -> Self {
        Self {
            lab_n: 128,
            lab_half_width: 20.0,
            lab_separation: 20.0,
            lab_sigma: 1.5,
            moon_distance: 100.0,
            distance_factor: 2.0,
            moon_n: 512,
            moon_half_width: 20.0,
            moon_offset: 8.0,
            moon_sigma: 2.0,
            moon_k: 10.0,
            // reflection/transmission ratio close to e^{pi/2} at k = 10
            barrier_height: 63.0,
            barrier_width: 0.15,
            pulse_on: 0.05,
            pulse_off: 1.55,
        }
    }
}

/// `lambda_jk`, flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapMatrix {
    pub shape: [usize; 2],
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl OverlapMatrix {
    pub fn from_vectors(vs: &[WaveFn]) -> Result<Self> {
        let n = vs.len();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for a in vs {
            for b in vs {
                let z = inner_product(a, b)?;
                re.push(z.re);
                im.push(z.im);
            }
        }
        Ok(Self { shape: [n, n], re, im })
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        let idx = j * self.shape[1] + k;
        Complex64::new(self.re[idx], self.im[idx])
    }

    /// `|lambda_jk| / sqrt(lambda_jj lambda_kk)`
    pub fn normalized(&self, j: usize, k: usize) -> f64 {
        self.get(j, k).norm() / (self.get(j, j).re * self.get(k, k).re).sqrt()
    }
}

/// Rank-one lab projection onto a unit vector.
#[derive(Debug, Clone)]
pub struct LabTest {
    pub label: &'static str,
    pub vector: WaveFn,
}

impl LabTest {
    pub fn apply(&self, f: &WaveFn) -> Result<WaveFn> {
        Ok(self.vector.scaled(inner_product(&self.vector, f)?))
    }
}

/// Projections onto `a`, `b`, `(a ± b)/sqrt 2` and `(a ± i b)/sqrt 2` for
/// orthonormal `a`, `b`.
pub fn lab_test_family(a: &WaveFn, b: &WaveFn) -> Result<Vec<LabTest>> {
    let a = a.normalize()?;
    let b = b.normalize()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let combo = |c: Complex64| -> Result<WaveFn> { a.scaled(h.into()).add(&b.scaled(c * h)) };
    Ok(vec![
        LabTest { label: "a", vector: a.clone() },
        LabTest { label: "b", vector: b.clone() },
        LabTest { label: "a+b", vector: combo(Complex64::new(1.0, 0.0))? },
        LabTest { label: "a-b", vector: combo(Complex64::new(-1.0, 0.0))? },
        LabTest { label: "a+ib", vector: combo(Complex64::new(0.0, 1.0))? },
        LabTest { label: "a-ib", vector: combo(Complex64::new(0.0, -1.0))? },
    ])
}

/// One distance, pulse on and off.
#[derive(Debug, Clone, Serialize)]
pub struct FtlRun {
    pub moon_distance: f64,
    pub labels: Vec<&'static str>,
    pub omega_on: Vec<f64>,
    pub omega_off: Vec<f64>,
    /// `omega_on - omega_off` per lab test.
    pub signal: Vec<f64>,
    pub delta: f64,
    pub lambda_on: OverlapMatrix,
    pub lambda_off: OverlapMatrix,
    pub lambda12_normalized_on: f64,
    /// `2 sqrt(R T) |sin(D ln(T/R))|` from the measured splitting of one moon
    /// packet.
    pub lambda12_predicted: f64,
    pub reflection: f64,
    pub transmission: f64,
    /// max over tests of |2D statistic - factorized expansion|, both pulses.
    pub expansion_residual: f64,
    /// max over tests of |pulse-off statistic - diagonal mixture|.
    pub mixture_residual_off: f64,
    pub lab_supports: Vec<[f64; 2]>,
    pub moon_supports_off: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FtlReport {
    pub config: FtlConfig,
    pub runs: Vec<FtlRun>,
    pub delta: f64,
    /// max over tests of the difference of `signal` between the two distances.
    pub distance_invariance: f64,
}

fn support_pair(psi: &WaveFn) -> Result<[f64; 2]> {
    let s = essential_support(psi).ok_or(Error::ZeroState)?;
    Ok([s.a, s.b])
}

fn disjoint(a: [f64; 2], b: [f64; 2]) -> bool {
    a[1] <= b[0] || b[1] <= a[0]
}

fn run_at(cfg: &FtlConfig, distance: f64) -> Result<FtlRun> {
    let d = cfg.d;
    let g = GaugeParam::new(d);
    let lab = Grid1D::new(cfg.setup.lab_n, -cfg.setup.lab_half_width, cfg.setup.lab_half_width)?;
    let moon = Grid1D::new(cfg.setup.moon_n, distance - cfg.setup.moon_half_width, distance + cfg.setup.moon_half_width)?;
    let half = 0.5 * cfg.setup.lab_separation;
    let phi = [
        WaveFn::gaussian(lab, -half, cfg.setup.lab_sigma, 0.0)?,
        WaveFn::gaussian(lab, half, cfg.setup.lab_sigma, 0.0)?,
    ];
    // phases referred to each packet's own centre, so the preparation does
    // not depend on where the moon is
    let packet = |c: f64, k: f64| -> Result<WaveFn> {
        Ok(WaveFn::gaussian(moon, c, cfg.setup.moon_sigma, k)?.scaled(Complex64::from_polar(1.0, -k * c)))
    };
    let hat = [
        packet(distance - cfg.setup.moon_offset, cfg.setup.moon_k)?,
        packet(distance + cfg.setup.moon_offset, -cfg.setup.moon_k)?,
    ];
    let pulse = Potential::new(
        PotentialShape::Gaussian {
            height: cfg.setup.barrier_height,
            width: cfg.setup.barrier_width,
            center: distance,
        },
        cfg.setup.pulse_on,
        cfg.setup.pulse_off,
    )?;
    let none = Potential::zero();
    let step = StepConfig::strang(cfg.dt, cfg.t_final)?;

    // lab side: N_D U_t Phi_j, which must stay essentially disjoint
    let lab_t = phi
        .iter()
        .map(|p| Ok(apply_gauge(&split_step_evolve(p, &none, &step)?, &g)))
        .collect::<Result<Vec<_>>>()?;
    let mut lab_supports = Vec::new();
    for set in [&phi[..], &lab_t[..]] {
        let s0 = support_pair(&set[0])?;
        let s1 = support_pair(&set[1])?;
        if !disjoint(s0, s1) {
            return Err(Error::SupportCollision(format!(
                "lab packets share support: {s0:?} and {s1:?}"
            )));
        }
        lab_supports = vec![s0, s1];
    }
    let family = lab_test_family(&lab_t[0], &lab_t[1])?;

    let start = apply_gauge(
        &tensor_product(&phi[0], &hat[0]).add(&tensor_product(&phi[1], &hat[1]))?,
        &g,
    );

    let mut omega = Vec::new();
    let mut lambdas = Vec::new();
    let mut expansion_residual: f64 = 0.0;
    let mut moon_final = Vec::new();
    for v in [&pulse, &none] {
        let psi_t = evolve_dg_two_particle(&start, d, &none, v, &step)?;
        let stats = family
            .iter()
            .map(|test| partial_statistic(&psi_t, |f| test.apply(f)))
            .collect::<Result<Vec<_>>>()?;
        let m = hat
            .iter()
            .map(|h| Ok(apply_gauge(&split_step_evolve(h, v, &step)?, &g)))
            .collect::<Result<Vec<_>>>()?;
        let lam = OverlapMatrix::from_vectors(&m)?;
        for (test, w) in family.iter().zip(&stats) {
            let hit = lab_t.iter().map(|a| test.apply(a)).collect::<Result<Vec<_>>>()?;
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    num += lam.get(j, k) * inner_product(&hit[j], &hit[k])?;
                    den += lam.get(j, k) * inner_product(&lab_t[j], &lab_t[k])?;
                }
            }
            expansion_residual = expansion_residual.max((num.re / den.re - w).abs());
        }
        omega.push(stats);
        lambdas.push(lam);
        moon_final.push(m);
    }
    let omega_off = omega.pop().expect("two scenarios");
    let omega_on = omega.pop().expect("two scenarios");
    let lambda_off = lambdas.pop().expect("two scenarios");
    let lambda_on = lambdas.pop().expect("two scenarios");
    let moon_off = moon_final.pop().expect("two scenarios");

    let mut mixture_residual_off: f64 = 0.0;
    for (test, w) in family.iter().zip(&omega_off) {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..2 {
            num += lambda_off.get(j, j).re * test.apply(&lab_t[j])?.norm_sqr();
            den += lambda_off.get(j, j).re * lab_t[j].norm_sqr();
        }
        mixture_residual_off = mixture_residual_off.max((num / den - w).abs());
    }

    // splitting of the left moon packet alone, linear dynamics
    let split = split_step_evolve(&hat[0], &pulse, &step)?;
    let right = IntervalSet::interval(distance, f64::INFINITY)?;
    let transmission = position_projection(&split, &right).norm_sqr() / split.norm_sqr();
    let reflection = 1.0 - transmission;
    let lambda12_predicted = if d == 0.0 {
        0.0
    } else {
        2.0 * (reflection * transmission).sqrt() * (d * (transmission / reflection).ln()).sin().abs()
    };

    let signal: Vec<f64> = omega_on.iter().zip(&omega_off).map(|(a, b)| a - b).collect();
    Ok(FtlRun {
        moon_distance: distance,
        labels: family.iter().map(|t| t.label).collect(),
        delta: signal.iter().fold(0.0, |m, s| m.max(s.abs())),
        signal,
        omega_on,
        omega_off,
        lambda12_normalized_on: lambda_on.normalized(0, 1),
        lambda_on,
        lambda_off,
        lambda12_predicted,
        reflection,
        transmission,
        expansion_residual,
        mixture_residual_off,
        lab_supports,
        moon_supports_off: moon_off.iter().map(support_pair).collect::<Result<_>>()?,
    })
}

/// Lab statistics with and without a remote pulse at two moon distances.
pub fn ftl_experiment(cfg: &FtlConfig) -> Result<FtlReport> {
    if !(cfg.setup.distance_factor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance_factor must be positive, got {}",
            cfg.setup.distance_factor
        )));
    }
    let near = run_at(cfg, cfg.setup.moon_distance)?;
    let far = run_at(cfg, cfg.setup.moon_distance * cfg.setup.distance_factor)?;
    let distance_invariance = near
        .signal
        .iter()
        .zip(&far.signal)
        .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    Ok(FtlReport {
        config: cfg.clone(),
        delta: near.delta.max(far.delta),
        distance_invariance,
        runs: vec![near, far],
    })
}
