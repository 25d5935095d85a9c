//! Command bodies: each takes prepared inputs, writes CSV/SVG artifacts,
//! and verifies its row-wise inequalities before anything hits disk.

use std::path::Path;

use rayon::prelude::*;

use qres_core::channels::induced_one_norm;
use qres_core::dimer::{
    capacity_closed_form, closed_form_bounds, DimerModel, DimerParams, ObservableCoeffs, Regime,
};
use qres_core::dynamics::{capacity_at, gamma_rate, time_feasibility};
use qres_core::impact::{capacity, hypothesis_test};
use qres_core::quad;
use qres_core::sampling::Sampler;

use crate::config::Prepared;
use crate::output::{fmt_sig, CsvTable};
use crate::CliError;

fn invariant(cond: bool, msg: String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Invariant(msg))
    }
}

/// θ sweep of the one-step capacity: closed form against the spectral value.
pub fn sweep_theta(p: &Prepared, out: &Path, plots: bool) -> Result<(), CliError> {
    let (params, _) = p.dimer.as_ref().ok_or_else(|| {
        CliError::Regime("sweep-theta needs model.kind = \"dimer\"".into())
    })?;
    let coeffs = p.coeffs.ok_or_else(|| {
        CliError::Regime("sweep-theta needs observable.kind = \"coeffs\"".into())
    })?;
    let n = p.run.theta_points.max(2);
    let rows: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / (n - 1) as f64;
            let pk = params.with_theta(theta);
            let model = DimerModel::build(pk).expect("validated parameters");
            let spectral = capacity(&model.step_channel, &p.map, &p.observable)
                .expect("spectral capacity")
                .capacity;
            let closed = capacity_closed_form(&pk, &coeffs);
            (theta, closed, spectral)
        })
        .collect();

    let mut table = CsvTable::new(vec![
        "theta",
        "capacity_closed_form",
        "capacity_spectral",
        "abs_diff",
    ]);
    for (theta, closed, spectral) in rows {
        let diff = (closed - spectral).abs();
        invariant(
            diff < 1e-10,
            format!("closed form and spectral capacity disagree at θ = {theta}: {diff:.3e}"),
        )?;
        table.push(vec![
            fmt_sig(theta),
            fmt_sig(closed),
            fmt_sig(spectral),
            fmt_sig(diff),
        ]);
    }
    let csv = out.join("sweep_theta.csv");
    table.write(&csv)?;
    if plots {
        table.write_svg(
            &out.join("sweep_theta.svg"),
            &["capacity_closed_form", "capacity_spectral"],
        )?;
    }
    println!("wrote {}", csv.display());
    Ok(())
}

/// Which analytic uniform bound applies to the configured parameters.
fn analytic_branch(params: &DimerParams, coeffs: Option<&ObservableCoeffs>) -> Option<&'static str> {
    let coeffs = coeffs?;
    let acceptor_like = coeffs.nu.norm() == 0.0 && coeffs.mu_g == 0.0 && coeffs.mu_d == 0.0;
    if params.detuning == 0.0
        && params.dephasing_rate == 0.0
        && params.decay_donor == params.decay_acceptor
        && acceptor_like
        && params.coupling != 0.0
    {
        Some("resonance")
    } else if params.detuning == 0.0
        && params.decay_donor == params.decay_acceptor
        && !matches!(qres_core::dimer::regime(params), Regime::Critical)
    {
        Some("zero_detuning")
    } else {
        None
    }
}

/// Time series of capacity, rate, integrated rate, and the bound chain.
pub fn dynamics(p: &Prepared, out: &Path, plots: bool) -> Result<(), CliError> {
    let run = &p.run;
    let mut sampler = Sampler::seed_from_u64(run.seed);
    let radius = p.map.resource_radius(run.restarts, &mut sampler).value;
    let c_mg = p.observable.op_norm() * radius;
    let l_max = induced_one_norm(&p.generator.liouville, run.restarts, &mut sampler).value;

    let branch = p
        .dimer
        .as_ref()
        .and_then(|(params, _)| analytic_branch(params, p.coeffs.as_ref()));
    if p.dimer.is_some() && branch.is_none() {
        eprintln!("warning: no analytic uniform bound applies to these parameters; column filled with nan");
    }

    let n = run.grid_points;
    let step = (run.t_end - run.t_start) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| run.t_start + step * i as f64).collect();
    let capacities: Vec<f64> = grid
        .par_iter()
        .map(|&t| capacity_at(&p.generator, &p.map, &p.observable, t).expect("capacity"))
        .collect();
    let gammas: Vec<f64> = grid
        .par_iter()
        .map(|&t| gamma_rate(&p.generator, &p.map, &p.observable, t).expect("rate"))
        .collect();
    let segments: Vec<f64> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            if i == 0 {
                0.0
            } else {
                let integrand =
                    |s: f64| gamma_rate(&p.generator, &p.map, &p.observable, s).expect("rate");
                quad::integrate(&integrand, t - step, t, run.quad_tol).expect("quadrature")
            }
        })
        .collect();
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for s in &segments {
        acc += s;
        cumulative.push(acc);
    }

    let regime_tag = p
        .dimer
        .as_ref()
        .map(|(params, _)| match qres_core::dimer::regime(params) {
            Regime::Underdamped => "underdamped",
            Regime::Critical => "critical",
            Regime::Overdamped => "overdamped",
        })
        .unwrap_or("custom");

    let mut table = CsvTable::new(vec![
        "t",
        "capacity",
        "gamma",
        "variation_integral",
        "uniform_bound",
        "analytic_bound",
        "regime",
    ]);
    for i in 0..n {
        let t = grid[i];
        let uniform = c_mg * l_max * (t - run.t_start);
        let analytic = match (branch, &p.dimer, &p.coeffs) {
            (Some("resonance"), Some((params, _)), Some(coeffs)) => {
                let scale = coeffs.mu_a.abs();
                qres_core::dimer::variation_envelope_resonance(params, run.t_start, t)
                    .map(|v| v * scale)
                    .unwrap_or(f64::NAN)
            }
            (Some("zero_detuning"), Some((params, _)), Some(coeffs)) => {
                qres_core::dimer::variation_envelope_zero_detuning(params, coeffs, run.t_start, t)
                    .unwrap_or(f64::NAN)
            }
            _ => f64::NAN,
        };
        // row-wise bound chain before anything is written
        let exact = (capacities[i] - capacities[0]).abs();
        invariant(
            exact <= cumulative[i] + run.quad_tol + 1e-8,
            format!("variation bound violated at t = {t}: |ΔC| = {exact}, ∫Γ = {}", cumulative[i]),
        )?;
        invariant(
            cumulative[i] <= uniform + 1e-8,
            format!("integrated rate exceeds the uniform bound at t = {t}"),
        )?;
        if analytic.is_finite() {
            invariant(
                cumulative[i] <= analytic + 1e-9,
                format!("integrated rate exceeds the analytic bound at t = {t}"),
            )?;
        }
        table.push(vec![
            fmt_sig(t),
            fmt_sig(capacities[i]),
            fmt_sig(gammas[i]),
            fmt_sig(cumulative[i]),
            fmt_sig(uniform),
            fmt_sig(analytic),
            regime_tag.to_string(),
        ]);
    }
    let csv = out.join("dynamics.csv");
    table.write(&csv)?;
    if plots {
        table.write_svg(
            &out.join("dynamics.svg"),
            &["capacity", "variation_integral", "analytic_bound"],
        )?;
    }
    println!("wrote {}", csv.display());
    Ok(())
}

/// Full bound-chain report with minimal-time and feasibility verdicts.
pub fn bounds(p: &Prepared, out: &Path, plots: bool) -> Result<(), CliError> {
    let run = &p.run;
    let mut sampler = Sampler::seed_from_u64(run.seed);
    let report = time_feasibility(
        &p.generator,
        &p.map,
        &p.observable,
        run.t_start,
        run.t_end,
        run.target,
        run.grid_points,
        run.quad_tol,
        run.restarts,
        &mut sampler,
    )
    .map_err(|e| CliError::Other(e.to_string()))?;

    let mut table = CsvTable::new(vec![
        "t",
        "capacity",
        "gamma",
        "variation_integral",
        "uniform_bound",
    ]);
    for i in 0..report.time_grid.len() {
        table.push(vec![
            fmt_sig(report.time_grid[i]),
            fmt_sig(report.capacity_series[i]),
            fmt_sig(report.gamma_series[i]),
            fmt_sig(report.variation_integral_series[i]),
            fmt_sig(report.uniform_bound_series[i]),
        ]);
    }
    let csv = out.join("bound_report.csv");
    table.write(&csv)?;
    if plots {
        table.write_svg(
            &out.join("bound_report.svg"),
            &["capacity", "variation_integral", "uniform_bound"],
        )?;
    }

    println!("wrote {}", csv.display());
    println!("c_MG            = {}", fmt_sig(report.c_mg));
    println!("L_max estimate  = {}", fmt_sig(report.l_max));
    println!("GKLS rate bound = {}", fmt_sig(report.gkls_rate_bound));
    println!("target ΔC*      = {}", fmt_sig(report.target));
    println!("min time bound  = {}", fmt_sig(report.min_time));
    println!("ceiling         = {}", fmt_sig(report.feasibility_ceiling));
    println!(
        "verdict         = {}",
        if report.feasible { "feasible" } else { "infeasible" }
    );
    if let (Some((params, _)), Some(coeffs)) = (&p.dimer, &p.coeffs) {
        let cf = closed_form_bounds(params, coeffs, run.t_start, run.t_end, run.target);
        if let Some(envelope) = cf.resonance_envelope {
            println!("analytic resonance envelope  = {}", fmt_sig(envelope));
            println!(
                "analytic resonance ceiling   = {}",
                fmt_sig(cf.resonance_ceiling.unwrap_or(f64::NAN))
            );
            match cf.resonance_min_time {
                Some(Some(t)) => println!("analytic resonance min time  = {}", fmt_sig(t)),
                Some(None) => println!("analytic resonance min time  = infeasible (target above ceiling)"),
                None => {}
            }
        }
        if let Some(envelope) = cf.detuning_free_envelope {
            println!("analytic zero-detuning envelope = {}", fmt_sig(envelope));
            if let Some(ceiling) = cf.detuning_free_ceiling {
                println!("analytic zero-detuning ceiling  = {}", fmt_sig(ceiling));
            }
            match cf.detuning_free_min_time {
                Some(Some(t)) => println!("analytic zero-detuning min time = {}", fmt_sig(t)),
                Some(None) => println!("analytic zero-detuning min time = infeasible (target above ceiling)"),
                None => {}
            }
        }
    }
    Ok(())
}

/// Free/resourceful decomposition report plus the compatibility series.
pub fn decompose(p: &Prepared, out: &Path, plots: bool) -> Result<(), CliError> {
    let split = qres_core::decomposition::split_channel(&p.channel, &p.map)
        .map_err(|e| CliError::Other(e.to_string()))?;
    let flags = qres_core::decomposition::cross_block_flags(&p.channel, &p.map)
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    let eq = qres_core::decomposition::capacity_equality_check(&p.channel, &p.map, &p.observable)
        .map_err(|e| CliError::Other(e.to_string()))?;
    invariant(
        (eq.full.capacity - eq.res.capacity).abs() < 1e-10
            && (eq.full.capacity - eq.res_tilde.capacity).abs() < 1e-10,
        "decomposition capacity equality violated".into(),
    )?;

    println!("channel          = {}", p.channel.label);
    println!("‖free‖_F         = {}", fmt_sig(split.free.frobenius_norm()));
    println!("‖res‖_F          = {}", fmt_sig(split.res.frobenius_norm()));
    println!("‖G⊥ΛG‖_F (gen)   = {}", fmt_sig(flags.generating_norm));
    println!("‖GΛG⊥‖_F (act)   = {}", fmt_sig(flags.activating_norm));
    println!("non-generating   = {}", flags.non_generating);
    println!("non-activating   = {}", flags.non_activating);
    println!("covariant        = {}", flags.covariant);
    println!("free part CPTP   = {}", split.free_is_cptp);
    println!("res TP residual  = {}", fmt_sig(split.res_tp_residual));
    println!("C_M(Λ)           = {}", fmt_sig(eq.full.capacity));
    println!("C_M(Λ_res)       = {}", fmt_sig(eq.res.capacity));
    println!("C_M(Λ̃_res)       = {}", fmt_sig(eq.res_tilde.capacity));
    println!("residual maps equal = {} (gap {})", eq.maps_equal, fmt_sig(eq.map_gap));

    let compat = qres_core::decomposition::compatibility_check(
        &p.generator,
        &p.map,
        p.run.t_start,
        p.run.t_end,
    )
    .map_err(|e| CliError::Other(e.to_string()))?;
    let mut table = CsvTable::new(vec!["t", "compatibility_residual", "ode_gap"]);
    for i in 0..compat.times.len() {
        table.push(vec![
            fmt_sig(compat.times[i]),
            fmt_sig(compat.residual_series[i]),
            fmt_sig(compat.ode_gap_series[i]),
        ]);
    }
    let csv = out.join("decompose.csv");
    table.write(&csv)?;
    if plots {
        table.write_svg(&out.join("decompose.svg"), &["compatibility_residual", "ode_gap"])?;
    }
    println!("wrote {}", csv.display());
    println!(
        "generator compatibility = {} (max residual {})",
        if compat.compatible { "compatible" } else { "incompatible" },
        fmt_sig(compat.max_residual)
    );
    Ok(())
}

/// Multi-shot discrimination table over the configured shot counts.
pub fn hypothesis(p: &Prepared, out: &Path, plots: bool) -> Result<(), CliError> {
    let run = &p.run;
    let mut sampler = Sampler::seed_from_u64(run.seed);
    let optimum = capacity(&p.channel, &p.map, &p.observable)
        .map_err(|e| CliError::Other(e.to_string()))?;
    let mut table = CsvTable::new(vec![
        "n",
        "p0",
        "p1",
        "bias",
        "p_succ",
        "hoeffding_bound",
        "empirical_error",
        "statistical_slack",
    ]);
    for &n in &run.shots {
        let rep = hypothesis_test(
            &p.channel,
            &p.map,
            &p.observable,
            &optimum.optimizer,
            n,
            run.trials,
            &mut sampler,
        )
        .map_err(|e| CliError::Other(e.to_string()))?;
        invariant(
            rep.empirical_error <= rep.hoeffding_bound + rep.statistical_slack,
            format!(
                "empirical error {} exceeds the bound chain at n = {n}",
                rep.empirical_error
            ),
        )?;
        table.push(vec![
            n.to_string(),
            fmt_sig(rep.p0),
            fmt_sig(rep.p1),
            fmt_sig(rep.bias),
            fmt_sig(rep.p_succ),
            fmt_sig(rep.hoeffding_bound),
            fmt_sig(rep.empirical_error),
            fmt_sig(rep.statistical_slack),
        ]);
    }
    let csv = out.join("hypothesis.csv");
    table.write(&csv)?;
    if plots {
        table.write_svg(&out.join("hypothesis.svg"), &["hoeffding_bound", "empirical_error"])?;
    }
    println!("wrote {}", csv.display());
    Ok(())
}

/// Run the named invariant suites; nonzero exit on any failure.
pub fn verify(seed: u64, samples: usize) -> Result<(), CliError> {
    let results = qres_core::checks::run_all(seed, samples);
    let mut failed = 0usize;
    for r in &results {
        println!(
            "{} {:<48} worst residual {:>12} (tolerance {:.1e}, seed {}, {} samples)",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            fmt_sig(r.worst_residual),
            r.tolerance,
            r.seed,
            r.samples
        );
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Invariant(format!("{failed} invariant suite(s) failed")));
    }
    println!("all {} suites passed", results.len());
    Ok(())
}
