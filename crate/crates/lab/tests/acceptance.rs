//! Acceptance campaign: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::Instant;

use magdirac_core::cutoff::make_cutoffs;
use magdirac_core::dirac::{alpha_dot, Spinor};
use magdirac_core::params::ConstructionParams;
use magdirac_core::quasimode::Quasimode;
use magdirac_lab::cylinder::CylGrid;
use magdirac_lab::evolve::{
    free_step_periodic, persistence, persistence_box, strang_evolve, Potential, PropagatorSpec,
};
use magdirac_lab::grid::{Grid3, GridSpec2D, SpinorField3D};
use magdirac_lab::landau::{default_mode_index, solve_modes, EigenMode2D};
use magdirac_lab::oracle::oracle_extrapolated;
use magdirac_lab::residual::{residual, Operator};
use magdirac_lab::scaling::{all_checks, halving_check, run_ladder, Check, GridPolicy, LadderOptions, MODE_REFINEMENT};
use magdirac_lab::sweep::exponent_sweep;
use num_complex::Complex64;

type Outcome = Result<(bool, String), String>;

fn reference() -> ConstructionParams {
    ConstructionParams::new(1.5, 0.8, 0.75, 8.0).unwrap()
}

fn report(n: usize, name: &str, limit_s: f64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = match out {
        Ok((ok, d)) => (ok && secs < limit_s, d),
        Err(e) => (false, format!("error: {e}")),
    };
    println!("criterion {n} {} {name}: {detail} [{secs:.1}s, limit {limit_s:.0}s]", if ok { "PASS" } else { "FAIL" });
    ok
}

fn eigensolver(modes: &mut Option<Vec<EigenMode2D>>) -> Outcome {
    let solved =
        solve_modes(GridSpec2D::new(8.0, 96).map_err(|e| e.to_string())?, 6, 1e-8).map_err(|e| e.to_string())?;
    let zero = solved.iter().filter(|m| m.lambda.abs() < 1e-6).count();
    let nonzero: Vec<f64> = solved.iter().map(|m| m.lambda).filter(|l| l.abs() >= 1e-6).collect();
    let smallest = nonzero.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    let oracle = oracle_extrapolated(6.0, [24, 32, 48], 1).map_err(|e| e.to_string())?;
    let rel = (smallest - oracle).abs() / oracle;
    let asym =
        nonzero.iter().map(|l| nonzero.iter().map(|m| (l + m).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let worst = solved.iter().map(|m| m.residual).fold(0.0, f64::max);
    let ok = zero > 0 && rel < 1e-2 && asym < 1e-8 && worst < 1e-8;
    *modes = Some(solved);
    Ok((
        ok,
        format!("{zero} zero modes, smallest |λ| = {smallest:.8} vs oracle {oracle:.6} (rel {rel:.1e}), ± asymmetry {asym:.1e}, max residual {worst:.1e}"),
    ))
}

fn algebra_residual(mode: &EigenMode2D) -> Outcome {
    let params = reference();
    let profile = mode.interpolant(MODE_REFINEMENT).map_err(|e| e.to_string())?;
    let qm = Quasimode::new(params, make_cutoffs(), &profile);
    let grid = CylGrid::reference(&params, 768, 768).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut parts = vec![];
    for t in [0.0, 1.0] {
        let r = residual(&qm, grid, t, Operator::Linear).map_err(|e| e.to_string())?;
        worst = worst.max(r.relative());
        parts.push(format!("t={t}: {:.2e}", r.relative()));
    }
    Ok((worst < 1e-3, format!("relative residual {} at R=8 on 768²", parts.join(", "))))
}

fn summarize(checks: &[Check], names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = vec![];
    for name in names {
        match checks.iter().find(|c| c.name == *name) {
            Some(c) => {
                ok &= c.passed;
                parts.push(format!("{} {} ({})", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn propagator() -> Outcome {
    let g = Grid3::cell_centred([-8.0, -8.0, -2.0], [8.0, 8.0, 14.0], [32; 3]).map_err(|e| e.to_string())?;
    let f = SpinorField3D::sample(g, 0.0, |x| {
        let z = x[2] - 6.0;
        let e = (-(x[0] * x[0] + x[1] * x[1] + z * z) / 2.0).exp();
        [Complex64::new(e, 0.0), Complex64::new(0.0, e * x[1]), Complex64::new(0.0, 0.0), Complex64::new(e * z, 0.0)]
    });
    let pot = Potential::Homogeneous { delta: 1.5 };
    let long = PropagatorSpec { dt: 0.002, steps: 1000, checkpoint_every: 1000, potential: pot };
    let u = strang_evolve(&f, &long).map_err(|e| e.to_string())?.pop().unwrap();
    let drift = (u.l2_norm() / f.l2_norm() - 1.0).abs();
    let run = |steps: usize| -> Result<SpinorField3D, String> {
        let spec = PropagatorSpec { dt: 0.2 / steps as f64, steps, checkpoint_every: steps, potential: pot };
        Ok(strang_evolve(&f, &spec).map_err(|e| e.to_string())?.pop().unwrap())
    };
    let fine = run(128)?;
    let e1 = run(4)?.sub(&fine).map_err(|e| e.to_string())?.l2_norm();
    let e2 = run(8)?.sub(&fine).map_err(|e| e.to_string())?.l2_norm();
    let order = (e1 / e2).log2();
    // Plane wave on a lattice mode: (|ξ| + α·ξ)e is an eigenvector of α·ξ for +|ξ|.
    let pg = Grid3::cell_centred([-16.0; 3], [16.0; 3], [64; 3]).map_err(|e| e.to_string())?;
    let step = std::f64::consts::PI / 16.0;
    let xi = [4.0 * step, -2.0 * step, 3.0 * step];
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let e: Spinor =
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let ae = alpha_dot(xi, &e);
    let w: Spinor = std::array::from_fn(|c| e[c] * norm + ae[c]);
    let pw = SpinorField3D::sample(pg, 0.0, |x| {
        w.map(|c| c * Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]))
    });
    let t = 0.7;
    let out = free_step_periodic(&pw, t);
    let phase = Complex64::from_polar(1.0, t * norm);
    let scale = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut err = 0.0f64;
    for idx in 0..pg.len() {
        let (a, b) = (out.get(idx), pw.get(idx));
        err = err.max((0..4).map(|c| (a[c] - b[c] * phase).norm()).fold(0.0, f64::max) / scale);
    }
    Ok((
        drift < 1e-10 && (order - 2.0).abs() <= 0.2 && err < 1e-6,
        format!("mass drift {drift:.1e} over 1000 steps, order {order:.3}, plane-wave error {err:.1e}"),
    ))
}

fn persistence_run(mode: &EigenMode2D) -> Outcome {
    let params = reference();
    let profile = mode.interpolant(MODE_REFINEMENT).map_err(|e| e.to_string())?;
    let qm = Quasimode::new(params, make_cutoffs(), &profile);
    let grid = persistence_box(&params, [128, 128, 64]).map_err(|e| e.to_string())?;
    let p = persistence(&qm, grid, 8).map_err(|e| e.to_string())?;
    let curve: Vec<String> = p.magnetic.iter().zip(&p.free).map(|(m, f)| format!("{m:.3}/{f:.3}")).collect();
    Ok((p.dominates(), format!("magnetic/free fidelity {} (mass drift {:.1e})", curve.join(" "), p.mass_drift)))
}

fn main() {
    let mut passed = vec![];
    let mut modes = None;
    passed.push(report(1, "eigensolver", 120.0, || eigensolver(&mut modes)));
    let mode = modes.as_ref().and_then(|m: &Vec<EigenMode2D>| default_mode_index(m).map(|i| m[i].clone()));
    let need_mode = || mode.clone().ok_or_else(|| "no eigenmode available".to_string());
    passed.push(report(2, "algebra residual", 300.0, || algebra_residual(&need_mode()?)));

    let mut ladder: Option<Vec<Check>> = None;
    passed.push(report(3, "norm slopes", 3600.0, || {
        let mode = need_mode()?;
        let template = reference();
        let pair = magdirac_core::exponents::admissible(4.0, 4.0).map_err(|e| e.to_string())?;
        let options = LadderOptions { free_control: true, term_diagnostics: false };
        let rs = [8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0];
        let mut rep =
            run_ladder(&template, &rs, pair, GridPolicy::default(), options, &mode).map_err(|e| e.to_string())?;
        rep.convergence =
            Some(halving_check(&template, 16.0, pair, GridPolicy::default(), &mode).map_err(|e| e.to_string())?);
        let checks = all_checks(&rep);
        let valid = rep.valid_rows();
        let (ok, d) = summarize(&checks, &["fR_Hsigma", "fR_L2", "fR_H1", "WR0_Lq", "profile_ratio", "halving"]);
        ladder = Some(checks);
        Ok((ok && valid == 7, format!("{valid}/7 valid rows; {d}")))
    }));
    passed.push(report(4, "blow-up quotients", 3600.0, || {
        let checks = ladder.as_ref().ok_or("no ladder")?;
        Ok(summarize(checks, &["quot_epo25", "quot_epo75_increasing", "mu_certificate", "free_control"]))
    }));
    passed.push(report(5, "propagator", 600.0, propagator));
    passed.push(report(6, "persistence", 1800.0, || persistence_run(&need_mode()?)));
    passed.push(report(7, "exponent calculator", 60.0, || {
        let s = exponent_sweep(10_000, 20_260_101).map_err(|e| e.to_string())?;
        Ok((
            s.passed(),
            format!(
                "{} tuples: {} kappa/mu mismatches, {} window mismatches ({} inside the window){}",
                s.samples,
                s.kappa_mismatches,
                s.window_mismatches,
                s.inside_window,
                s.first_failure.map(|f| format!("; first: {f}")).unwrap_or_default()
            ),
        ))
    }));
    let n = passed.iter().filter(|p| **p).count();
    println!("acceptance: {n}/{} criteria pass", passed.len());
    if n != passed.len() {
        std::process::exit(1);
    }
}
