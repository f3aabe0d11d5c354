//! One function per subcommand. Each returns the files it wrote.

use blockade_core::fit::power_law_fit;
use blockade_core::matel::{interbranch_overlap, s_b_asymptotic, s_b_exact};
use blockade_core::meanfield::{fixed_points, integrate, stability_eigenvalues, MeanFieldParams, MeanFieldState};
use blockade_core::observables::{fit_critical_exponents, ObservablePoint};
use blockade_core::rates::{build_rate_matrix, kolmogorov_cycle_ratio, three_cycle_closed_form, RateMode};
use blockade_core::spectrum::{displacement, eigenvalue};
use blockade_core::steady::{default_window, fit_decay_length, mean_quantum_number, solve_steady_state_with_tol, Distribution};
use blockade_core::toymodel::{dispersion, effective_temperature, generator, geometric_distribution, geometric_mean, stationary_distribution, steady_q, ToyParams};
use blockade_core::{DriveParams, EigenLabel};
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;

use crate::config::{Mode, RunConfig};
use crate::output::{write_table, Cell, Table};
use crate::CliError;

type Files = Result<Vec<PathBuf>, CliError>;

fn rate_mode(cfg: &RunConfig) -> RateMode {
    match cfg.mode {
        Mode::Asymptotic => RateMode::Asymptotic,
        Mode::Exact => match RateMode::exact() {
            RateMode::Exact { overlaps, .. } => RateMode::Exact { interbranch: cfg.interbranch, overlaps },
            other => other,
        },
    }
}

fn tag<T: Serialize>(x: T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

fn solve(cfg: &RunConfig, n_max: usize, p: f64) -> Result<(Distribution, usize), CliError> {
    let m = build_rate_matrix(n_max, p, rate_mode(cfg))?;
    Ok((solve_steady_state_with_tol(&m, cfg.tol)?, m.clamped))
}

pub fn spectrum(cfg: &RunConfig) -> Files {
    let mut t = Table::new("spectrum", &["eps", "n", "s", "eigenvalue", "displacement"]);
    for &eps in &cfg.eps {
        let params = DriveParams::new(eps)?;
        for label in EigenLabel::all_up_to(cfg.n_max as u32) {
            let s = label.branch().sign() as i64;
            t.push(vec![eps.into(), label.n().into(), s.into(), eigenvalue(label, &params).into(), displacement(label, &params).into()]);
        }
    }
    Ok(vec![write_table(cfg, &t)?])
}

pub fn matel_check(cfg: &RunConfig) -> Files {
    let mut slices = Table::new("s_b_slices", &["n_plus_m", "n", "m", "delta", "s_exact", "s_asymptotic", "b_exact", "b_asymptotic"]);
    for &total in &cfg.slices {
        let rows: Vec<Vec<Cell>> = (1..total)
            .into_par_iter()
            .filter(|&n| 2 * n != total)
            .map(|n| {
                let m = total - n;
                let (s, b) = s_b_exact(n, m)?;
                let (sa, ba) = s_b_asymptotic(n, m)?;
                Ok(vec![total.into(), n.into(), m.into(), (m as i64 - n as i64).into(), s.into(), sa.into(), b.into(), ba.into()])
            })
            .collect::<Result<_, blockade_core::Error>>()?;
        slices.rows.extend(rows);
    }

    let mut inter = Table::new("interbranch", &["n", "overlap", "abs_overlap", "sign_matches"]);
    let ns: Vec<u32> = (10..=100).collect();
    let values: Vec<f64> = ns.par_iter().map(|&n| interbranch_overlap(n, 0)).collect::<Result<_, _>>()?;
    for (&n, &a) in ns.iter().zip(&values) {
        let expected = if n % 2 == 1 { 1.0 } else { -1.0 };
        inter.push(vec![n.into(), a.into(), a.abs().into(), (a.signum() == expected).to_string().into()]);
    }
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = values.iter().map(|a| a.abs()).collect();
    let f = power_law_fit(&x, &y)?;
    let mut fit = Table::new("interbranch_fit", &["prefactor", "exponent", "exponent_stderr", "r_squared"]);
    fit.push(vec![f.intercept.exp().into(), f.slope.into(), f.slope_stderr.into(), f.r_squared.into()]);

    Ok(vec![write_table(cfg, &slices)?, write_table(cfg, &inter)?, write_table(cfg, &fit)?])
}

pub fn steady(cfg: &RunConfig) -> Files {
    let runs: Vec<Result<(Distribution, usize), CliError>> = cfg.p.par_iter().map(|&p| solve(cfg, cfg.n_max, p)).collect();
    let mut files = Vec::new();
    let mut sweep = Table::new("sweep", &["p", "nbar", "xi", "residual", "clamped", "solver", "status"]);
    let mut failed = Vec::new();
    for (i, (&p, run)) in cfg.p.iter().zip(runs).enumerate() {
        match run {
            Ok((d, clamped)) => {
                let xi = fit_decay_length(&d, default_window(&d)).ok().map(|f| f.xi);
                sweep.push(vec![p.into(), mean_quantum_number(&d).into(), xi.into(), d.residual.into(), clamped.into(), tag(d.solver).into(), "ok".into()]);
                let mut rho = Table::new(format!("rho_{i:03}"), &["p", "n", "rho"]);
                for (n, &r) in d.rho.iter().enumerate() {
                    rho.push(vec![p.into(), n.into(), r.into()]);
                }
                files.push(write_table(cfg, &rho)?);
            }
            Err(e) => {
                log::error!("p = {p}: {e}");
                sweep.push(vec![p.into(), None.into(), None.into(), None.into(), Cell::S(String::new()), Cell::S(String::new()), e.to_string().into()]);
                failed.push(p);
            }
        }
    }
    files.push(write_table(cfg, &sweep)?);

    if let Some([a, b]) = cfg.cutoff_pair {
        let mut pair = Table::new("cutoff_pair", &["p", "n", "rho_small", "rho_large", "rel_diff"]);
        for &p in &cfg.p {
            let (da, db) = rayon::join(|| solve(cfg, a.min(b), p), || solve(cfg, a.max(b), p));
            let (da, db) = (da?.0, db?.0);
            for n in 0..da.rho.len() {
                let rel = da.rho[n] / db.rho[n] - 1.0;
                pair.push(vec![p.into(), n.into(), da.rho[n].into(), db.rho[n].into(), rel.into()]);
            }
        }
        files.push(write_table(cfg, &pair)?);
    }
    if !failed.is_empty() {
        return Err(CliError::Numerical(format!("steady state failed for p = {failed:?}; see sweep table")));
    }
    Ok(files)
}

pub fn observables(cfg: &RunConfig) -> Files {
    let points: Vec<(ObservablePoint, f64)> = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let params = DriveParams::new(eps)?;
            let (d, _) = solve(cfg, cfg.n_max, params.p)?;
            Ok((ObservablePoint::new(&d, &params)?, d.residual))
        })
        .collect::<Result<_, CliError>>()?;
    let mut t = Table::new(
        "observables",
        &["eps", "gap", "nbar", "n_phot", "a_re", "a_im", "sigma_x", "sigma_y", "sigma_z", "bloch_len_sq", "rho0", "residual"],
    );
    for (pt, res) in &points {
        let o = &pt.obs;
        t.push(vec![
            pt.epsilon.into(),
            pt.gap().into(),
            pt.nbar.into(),
            o.n_phot.into(),
            o.a_mean.re.into(),
            o.a_mean.im.into(),
            o.sigma[0].into(),
            o.sigma[1].into(),
            o.sigma[2].into(),
            o.bloch_len_sq.into(),
            o.rho0.into(),
            (*res).into(),
        ]);
    }
    let mut files = vec![write_table(cfg, &t)?];
    let pts: Vec<ObservablePoint> = points.iter().map(|x| x.0).collect();
    match fit_critical_exponents(&pts) {
        Ok(e) => {
            let mut ex = Table::new("exponents", &["quantity", "exponent", "stderr", "prefactor", "r_squared"]);
            for (name, f) in [("flux", e.flux), ("sigma_z", e.sigma_z), ("bloch_defect", e.bloch_defect), ("width", e.width), ("per_state", e.per_state)] {
                ex.push(vec![name.into(), f.slope.into(), f.slope_stderr.into(), f.intercept.exp().into(), f.r_squared.into()]);
            }
            files.push(write_table(cfg, &ex)?);
        }
        Err(e) => log::warn!("no exponent fit: {e}"),
    }
    Ok(files)
}

pub fn meanfield(cfg: &RunConfig) -> Files {
    let mut t = Table::new(
        "fixed_points",
        &["eps", "ell", "kind", "a1", "a2", "s1", "s2", "s3", "sigma_y", "order_relation_defect", "stability", "expected", "max_re_lambda", "eigen_mismatch"],
    );
    let mut files = Vec::new();
    for &eps in &cfg.eps {
        let prm = MeanFieldParams::new(eps, cfg.kappa, cfg.g)?;
        for fp in fixed_points(eps, cfg.ell, cfg.kappa, cfg.g)? {
            let rep = stability_eigenvalues(&fp, &prm)?;
            let x = fp.state;
            let sy = x.sigma()[1];
            let order = if fp.kind.is_ordered() { Some(x.a1 + cfg.g / (2.0 * cfg.kappa) * sy) } else { None };
            let max_re = rep.numeric.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            t.push(vec![
                eps.into(),
                cfg.ell.into(),
                tag(fp.kind).into(),
                x.a1.into(),
                x.a2.into(),
                x.s1.into(),
                x.s2.into(),
                x.s3.into(),
                sy.into(),
                order.into(),
                tag(rep.stability).into(),
                tag(fp.kind.expected_stability()).into(),
                max_re.into(),
                rep.mismatch.into(),
            ]);
        }
        if let Some(t_final) = cfg.t_final {
            let fp = fixed_points(eps, cfg.ell, cfg.kappa, cfg.g)?[0];
            // small kick off the first fixed point, rescaled to keep the Bloch length
            let mut x0 = MeanFieldState { a1: fp.state.a1 + 1e-3, a2: fp.state.a2, s1: fp.state.s1, s2: fp.state.s2 + 1e-3, s3: fp.state.s3 };
            let k = (fp.state.ell_sq() / x0.ell_sq()).sqrt();
            x0.s1 *= k;
            x0.s2 *= k;
            x0.s3 *= k;
            let traj = integrate(x0, &prm, t_final, cfg.dt)?;
            let stride = (traj.times.len() / 1000).max(1);
            let mut tr = Table::new(format!("trajectory_eps_{eps}"), &["t", "a1", "a2", "s1", "s2", "s3", "ell_sq"]);
            for (i, (&time, s)) in traj.times.iter().zip(&traj.states).enumerate() {
                if i % stride == 0 || i + 1 == traj.times.len() {
                    tr.push(vec![time.into(), s.a1.into(), s.a2.into(), s.s1.into(), s.s2.into(), s.s3.into(), s.ell_sq().into()]);
                }
            }
            files.push(write_table(cfg, &tr)?);
        }
    }
    files.insert(0, write_table(cfg, &t)?);
    Ok(files)
}

pub fn toy(cfg: &RunConfig) -> Files {
    let mut disp = Table::new("dispersion", &["p", "q", "gamma"]);
    let mut qt = Table::new("toy_q", &["p", "q", "two_p", "t_eff", "mean"]);
    let mut rho = Table::new("toy_rho", &["p", "n", "rho", "geometric"]);
    let mut cyc = Table::new("cycles", &["p", "matrix", "cycle", "ratio", "closed_form"]);
    for &p in &cfg.p {
        let q = steady_q(p)?;
        for k in 0..=40 {
            let x = 1.5 * q * k as f64 / 40.0;
            disp.push(vec![p.into(), x.into(), dispersion(x, p).into()]);
        }
        qt.push(vec![p.into(), q.into(), (2.0 * p).into(), effective_temperature(p)?.into(), geometric_mean(p)?.into()]);

        let params = ToyParams::new(p, cfg.n_sites)?;
        let d = stationary_distribution(&params)?;
        let g = geometric_distribution(&params)?;
        for n in 0..cfg.n_sites {
            rho.push(vec![p.into(), n.into(), d.rho[n].into(), g[n].into()]);
        }

        let toy = generator(&ToyParams::new(p, 40)?)?;
        for c in [vec![3usize, 4, 5, 4], vec![10, 11, 12, 13, 12, 11], vec![20, 21, 20, 19]] {
            let r = kolmogorov_cycle_ratio(&toy, &c)?;
            cyc.push(vec![p.into(), "toy".into(), fmt_cycle(&c).into(), r.into(), 1.0.into()]);
        }
        let full = build_rate_matrix(cfg.n_max.max(12), p, RateMode::Asymptotic)?;
        for n in [1usize, 5, 10] {
            let c = [n + 1, n, n - 1];
            let r = kolmogorov_cycle_ratio(&full, &c)?;
            cyc.push(vec![p.into(), "asymptotic".into(), fmt_cycle(&c).into(), r.into(), three_cycle_closed_form(p).into()]);
        }
    }
    Ok(vec![write_table(cfg, &disp)?, write_table(cfg, &qt)?, write_table(cfg, &rho)?, write_table(cfg, &cyc)?])
}

fn fmt_cycle(c: &[usize]) -> String {
    c.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}
