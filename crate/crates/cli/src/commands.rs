//! One function per subcommand. Each returns the JSON result, CSV artifacts
//! and a one-line summary; writing them out is left to the caller.

use dgsim_core::dump::write_csv;
use dgsim_core::dynamics::{evolve_dg, evolve_dg_direct, hamiltonian_conjugation_gap, DgCoefficients, HamiltonianGap};
use dgsim_core::experiments::{
    conservation_experiment, ftl_experiment, gaussian_pair_ensembles, intertwiner_identities,
    logic_isomorphism_check, mixture_experiment, momentum_convergence, overlap_convergence,
    overlap_experiment, random_gaussian_state, threshold_probes, FtlConfig, PlateauPair,
};
use dgsim_core::gpvm::{
    check_gpvm_axioms, conservation_residual, probability_report, vector_additivity_probe,
    AdditivityProbe, AxiomCheck, AxiomResiduals, Gpvm, UnconjugatedMomentum,
};
use dgsim_core::{split_step_evolve, Amplitudes, Grid1D, IntervalSet, Partition, StepConfig, WaveFn};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Dynamics, RunConfig, TestState};
use crate::error::CliError;

pub struct Outcome {
    pub result: serde_json::Value,
    /// `(file name, contents)`
    pub csv: Vec<(String, String)>,
    pub summary: String,
}

pub type Run = Result<Outcome, CliError>;

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn state_csv(psi: &WaveFn) -> String {
    let mut buf = Vec::new();
    write_csv(psi, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

/// `N (exp(-(x-c)^2 / (2 sigma^2)) + pedestal) e^{i k0 x}`
fn packet(grid: Grid1D, center: f64, sigma: f64, k0: f64, pedestal: f64) -> Result<WaveFn, CliError> {
    let psi = WaveFn::from_fn(grid, |x| {
        let env = (-(x - center).powi(2) / (2.0 * sigma * sigma)).exp() + pedestal;
        Complex64::from_polar(env, k0 * x)
    });
    Ok(psi.normalize()?)
}

#[derive(Serialize)]
struct Crosscheck {
    /// `|| direct - conjugated ||`
    l2_distance: f64,
    direct_norm: f64,
}

#[derive(Serialize)]
struct EvolveResult {
    dynamics: Dynamics,
    t_final: f64,
    norm_initial: f64,
    norm_final: f64,
    mean_x_initial: f64,
    mean_x_final: f64,
    crosscheck: Option<Crosscheck>,
    hamiltonian_gap: Option<HamiltonianGap>,
}

pub fn evolve(cfg: &RunConfig) -> Run {
    let e = &cfg.evolve;
    let grid = cfg.grid()?;
    let potential = cfg.potential.build()?;
    let t_final = cfg.t_final.unwrap_or(0.0);
    let step = StepConfig::strang(cfg.dt, t_final)?;
    let psi = packet(grid, e.center, e.sigma, e.k0, e.pedestal)?;
    let out = match e.dynamics {
        Dynamics::Dg => evolve_dg(&psi, cfg.d, &potential, &step)?,
        Dynamics::Linear => split_step_evolve(&psi, &potential, &step)?,
    };
    let crosscheck = if e.direct_crosscheck {
        let conjugated = match e.dynamics {
            Dynamics::Dg => out.clone(),
            Dynamics::Linear => evolve_dg(&psi, cfg.d, &potential, &step)?,
        };
        let direct = evolve_dg_direct(&psi, &DgCoefficients::linearizable(cfg.d), cfg.d, &potential, &step)?;
        Some(Crosscheck {
            l2_distance: direct.distance(&conjugated)?,
            direct_norm: direct.norm(),
        })
    } else {
        None
    };
    let hamiltonian_gap = if e.hamiltonian_gap {
        Some(hamiltonian_conjugation_gap(&psi, cfg.d)?)
    } else {
        None
    };
    let res = EvolveResult {
        dynamics: e.dynamics,
        t_final,
        norm_initial: psi.norm(),
        norm_final: out.norm(),
        mean_x_initial: psi.position_mean()?,
        mean_x_final: out.position_mean()?,
        crosscheck,
        hamiltonian_gap,
    };
    let mut summary = format!(
        "evolve: D={} t={} norm={} <x>={:e}",
        cfg.d, t_final, res.norm_final, res.mean_x_final
    );
    if let Some(c) = &res.crosscheck {
        summary += &format!(" direct-vs-conjugated={:e}", c.l2_distance);
    }
    if let Some(h) = &res.hamiltonian_gap {
        summary += &format!(" gap_vector={:e} gap_expectation={:e}", h.gap_vector_norm, h.gap_expectation);
    }
    Ok(Outcome {
        result: serde_json::to_value(&res)?,
        csv: vec![("initial.csv".into(), state_csv(&psi)), ("final.csv".into(), state_csv(&out))],
        summary,
    })
}

pub fn overlap(cfg: &RunConfig) -> Run {
    let rep = overlap_experiment(cfg.d, cfg.grid()?)?;
    let conv = overlap_convergence(cfg.d, &cfg.overlap.convergence_ns)?;
    let rows = conv.iter().map(|r| {
        vec![r.n.to_string(), r.numeric.to_string(), r.gap.to_string(), r.pre_gauge_overlap.to_string()]
    });
    let summary = format!(
        "overlap: D={} numeric={} analytic={} gap={:e} pre-gauge={:e}",
        cfg.d, rep.numeric, rep.analytic, rep.gap, rep.pre_gauge_overlap
    );
    Ok(Outcome {
        result: serde_json::json!({ "overlap": rep, "convergence": conv }),
        csv: vec![("convergence.csv".into(), csv_table("n,numeric,gap,pre_gauge_overlap", rows))],
        summary,
    })
}

pub fn ftl(cfg: &RunConfig) -> Run {
    let ftl_cfg = FtlConfig {
        d: cfg.d,
        dt: cfg.dt,
        t_final: cfg.t_final.unwrap_or(FtlConfig::default().t_final),
        setup: cfg.ftl.clone(),
    };
    let rep = ftl_experiment(&ftl_cfg)?;
    let mut rows = Vec::new();
    for run in &rep.runs {
        for (i, label) in run.labels.iter().enumerate() {
            rows.push(vec![
                run.moon_distance.to_string(),
                label.to_string(),
                run.omega_on[i].to_string(),
                run.omega_off[i].to_string(),
                run.signal[i].to_string(),
            ]);
        }
    }
    let mixture = rep.runs.iter().map(|r| r.mixture_residual_off).fold(0.0, f64::max);
    let summary = format!(
        "ftl: D={} delta={:e} distance-invariance={:e} pulse-off mixture residual={:e}",
        cfg.d, rep.delta, rep.distance_invariance, mixture
    );
    Ok(Outcome {
        result: serde_json::to_value(&rep)?,
        csv: vec![("ftl.csv".into(), csv_table("moon_distance,test,omega_on,omega_off,signal", rows))],
        summary,
    })
}

pub fn mixture(cfg: &RunConfig) -> Run {
    let m = &cfg.mixture;
    let (a, b) = gaussian_pair_ensembles(cfg.grid()?, m.centers[0], m.centers[1], m.sigma)?;
    let probes = threshold_probes(m.probe_lo, m.probe_hi, m.probes)?;
    let rep = mixture_experiment(&a, &b, cfg.d, &cfg.potential.build()?, &m.times, &probes, cfg.dt)?;
    let rows = rep.times.iter().zip(&rep.deltas).map(|(t, d)| vec![t.to_string(), d.to_string()]);
    let worst = rep.deltas.iter().copied().fold(0.0, f64::max);
    let summary = format!("mixture: D={} initial delta={:e} max delta={:e}", cfg.d, rep.initial_delta, worst);
    Ok(Outcome {
        result: serde_json::to_value(&rep)?,
        csv: vec![("mixture.csv".into(), csv_table("t,delta", rows))],
        summary,
    })
}

pub fn momentum(cfg: &RunConfig) -> Run {
    let m = &cfg.momentum;
    let psi = packet(cfg.grid()?, m.center, m.sigma, m.k0, 0.0)?;
    let rep = momentum_convergence(cfg.d, m.set, &psi, &m.times)?;
    let identity = momentum_convergence(m.identity_d, m.set, &psi, &m.times)?;
    let rows = rep.times.iter().enumerate().map(|(i, t)| {
        vec![t.to_string(), rep.errors[i].to_string(), rep.edge_mass[i].to_string()]
    });
    let summary = format!(
        "momentum: D={} errors={:?} final/first={} conjugation identity (D={})={:e}",
        cfg.d, rep.errors, rep.final_over_first, m.identity_d, identity.conjugation_identity_residual
    );
    Ok(Outcome {
        result: serde_json::json!({
            "convergence": rep,
            "identity_d": m.identity_d,
            "conjugation_identity_residual": identity.conjugation_identity_residual,
        }),
        csv: vec![("momentum.csv".into(), csv_table("t,error,edge_mass", rows))],
        summary,
    })
}

/// `Phi_+` of the overlap benchmark, normalized; needs `D > 0`.
fn two_plateau(grid: Grid1D, d: f64) -> Result<WaveFn, CliError> {
    Ok(PlateauPair::sampled(grid, d)?.plus.normalize()?)
}

pub fn conservation(cfg: &RunConfig) -> Run {
    let c = &cfg.conservation;
    let grid = cfg.grid()?;
    let psi = match c.state {
        TestState::TwoPlateau => two_plateau(grid, cfg.d)?,
        TestState::Gaussian => packet(grid, c.center, c.sigma, c.k0, 0.0)?,
    };
    let rep = conservation_experiment(cfg.d, &psi, &IntervalSet::from(c.set), &c.times)?;
    let rows = (0..rep.times.len()).map(|i| {
        vec![
            rep.times[i].to_string(),
            rep.residual_pd[i].to_string(),
            rep.residual_p0[i].to_string(),
            rep.prob_pd[i].to_string(),
            rep.prob_p0[i].to_string(),
        ]
    });
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let summary = format!(
        "conservation: D={} max residual p_D={:e} max residual p_0={} p_0 drift={}",
        cfg.d,
        max(&rep.residual_pd),
        max(&rep.residual_p0),
        rep.prob_p0_drift
    );
    Ok(Outcome {
        result: serde_json::to_value(&rep)?,
        csv: vec![(
            "conservation.csv".into(),
            csv_table("t,residual_pd,residual_p0,prob_pd,prob_p0", rows),
        )],
        summary,
    })
}

pub fn logic(cfg: &RunConfig) -> Run {
    let l = &cfg.logic;
    let grid = cfg.grid()?;
    let inter = intertwiner_identities(grid, cfg.d, l.intertwiner_states, cfg.seed)?;
    let rep = logic_isomorphism_check(grid, cfg.d, l.states, l.projections, l.transport_time, cfg.seed)?;
    let rows = [
        ("inverse", inter.inverse),
        ("norm_preservation", inter.norm_preservation),
        ("separability", inter.separability),
        ("pseudo_linearity", inter.pseudo_linearity),
        ("statistics_transport", rep.statistics_transport),
        ("expectation_equality", rep.expectation_equality),
        ("complement", rep.complement),
        ("order", rep.order),
        ("heisenberg_transport", rep.heisenberg_transport),
        ("negative_control", rep.negative_control),
    ]
    .map(|(k, v)| vec![k.to_string(), v.to_string()]);
    let summary = format!(
        "logic: D={} intertwiner max={:e} isomorphism max={:e} negative control={}",
        cfg.d,
        inter.max(),
        rep.max_residual(),
        rep.negative_control
    );
    Ok(Outcome {
        result: serde_json::json!({ "intertwiner": inter, "isomorphism": rep }),
        csv: vec![("residuals.csv".into(), csv_table("check,residual", rows))],
        summary,
    })
}

#[derive(Serialize)]
struct GpvmResult {
    gpvm: Gpvm,
    axioms: AxiomResiduals,
    conservation_residual: f64,
    additivity: AdditivityProbe,
    negative_control: Option<AxiomResiduals>,
}

pub fn gpvm_check(cfg: &RunConfig) -> Run {
    let g = &cfg.gpvm;
    let grid = cfg.grid()?;
    let a = Gpvm { base: g.base, d: cfg.d };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<WaveFn> = (0..g.states).map(|_| random_gaussian_state(grid, &mut rng)).collect();
    let check = AxiomCheck {
        partition: Partition::from_edges(&g.edges)?,
        random_pairs: g.random_pairs,
        seed: cfg.seed,
    };
    let axioms = check_gpvm_axioms(&a, &samples, &check)?;
    let conservation = conservation_residual(
        &a,
        &IntervalSet::from(g.conservation_set),
        &samples[0],
        cfg.d,
        g.conservation_time,
    )?;
    let [b1, b2] = g.additivity_sets.map(IntervalSet::from);
    let additivity = vector_additivity_probe(&a, &b1, &b2, &samples[0])?;
    let negative_control = if g.negative_control {
        Some(check_gpvm_axioms(&UnconjugatedMomentum { d: g.negative_control_d }, &samples, &check)?)
    } else {
        None
    };
    let probs = probability_report(&a, &check.partition, &samples[0])?;
    let rows = probs.partition.iter().zip(&probs.probs).map(|(cell, p)| {
        vec![cell.a.to_string(), cell.b.to_string(), p.to_string()]
    });
    let mut summary = format!(
        "gpvm-check: D={} axiom residual={:e} conservation residual={:e}",
        cfg.d,
        axioms.max(),
        conservation
    );
    if let Some(n) = &negative_control {
        summary += &format!(" negative control composition={:e}", n.composition);
    }
    let res = GpvmResult {
        gpvm: a,
        axioms,
        conservation_residual: conservation,
        additivity,
        negative_control,
    };
    Ok(Outcome {
        result: serde_json::to_value(&res)?,
        csv: vec![("probabilities.csv".into(), csv_table("a,b,probability", rows))],
        summary,
    })
}
