//! Subcommand implementations. Each returns a rendered-ready [`Table`].

use crate::config::{Axis, ExperimentConfig, Point, Scenario};
use crate::table::{axis_value, num, opt, Table};
use crate::CliError;
use dephasing::asymptotics::{
    ff_sq_at_irf, is_superpolynomial, kernel_xi, oom_hf, oom_lf, product_convergence_report, s_p, theta_asymptotic_pv,
    theta_periodic, Branch,
};
use dephasing::bathstat::{reequilibration_decay, DecayBranch};
use dephasing::exec::Exec;
use dephasing::fidelity::{chi_frequency_domain, gate_fidelity};
use dephasing::oracle::converge_cutoff;
use dephasing::pulse::filtering_order;
use dephasing::sweep::resonance_scan;
use dephasing::Error;
use std::f64::consts::PI;

/// Run-time options shared by all subcommands.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub exec: Exec,
    /// Overrides `tolerance.rel`, or `tolerance.oracle` for oracle checks.
    pub tol: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { exec: Exec::Parallel, tol: None }
    }
}

/// Outcome of a subcommand: the table and, for oracle checks, the failure
/// that should set the exit status after the table is written.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Outcome { table, failure: None }
    }
}

fn where_(cfg: &ExperimentConfig, p: &Point) -> String {
    format!("series {:?}, {}={}", p.series, cfg.sweep.axis.name(), p.value)
}

fn lib(cfg: &ExperimentConfig, p: &Point) -> impl Fn(Error) -> CliError {
    let ctx = where_(cfg, p);
    move |e| CliError::from_lib(&ctx, e)
}

fn header(t: &mut Table, cfg: &ExperimentConfig) {
    t.meta("time_unit", cfg.time_unit.clone());
    t.meta("scenario", format!("{:?}", cfg.scenario).to_lowercase());
}

fn quad_tol(cfg: &ExperimentConfig, opts: RunOptions) -> dephasing::quad::Tol {
    let mut t = cfg.tolerance;
    if let Some(x) = opts.tol {
        t.rel = x;
    }
    t.quad()
}

/// One fidelity report per sweep point.
pub fn run_fidelity(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome, CliError> {
    let tol = quad_tol(cfg, opts);
    let points = cfg.points();
    let results = opts.exec.map(&points, |p| -> Result<_, CliError> {
        let err = lib(cfg, p);
        let proto = p.protocol(cfg.scenario).map_err(&err)?;
        let model = p.noise.model().map_err(&err)?;
        let rep = gate_fidelity(&proto, &model, tol).map_err(&err)?;
        Ok((proto.k(), rep))
    });
    let axis = cfg.sweep.axis;
    let mut t = Table::new(
        "fidelity",
        &["series", "index", axis.name(), "k", "chi_c", "theta_last", "cos_product", "fidelity", "infidelity", "rqe"],
    );
    header(&mut t, cfg);
    for (p, r) in points.iter().zip(results) {
        let (k, rep) = r?;
        let cos_product: f64 = rep.thetas.iter().map(|x| x.cos()).product();
        t.push(vec![
            p.series.clone(),
            p.index.to_string(),
            axis_value(p.value, axis.is_integer()),
            k.to_string(),
            num(rep.chi_c),
            opt(rep.thetas.last().copied()),
            num(cos_product),
            num(rep.fidelity),
            num(1.0 - rep.fidelity),
            opt(rep.rqe.map(|r| r.exact)),
        ]);
    }
    Ok(Outcome::ok(t))
}

/// Plateau analysis: `θ^(M)` against its limit, tail prediction and the
/// order-of-magnitude formulas; or a kernel table when sweeping `x`.
pub fn run_asymptote(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome, CliError> {
    if cfg.noise.modes.is_some() {
        return Err(CliError::Validation("noise.modes: asymptote needs a continuous spectral density".into()));
    }
    match cfg.sweep.axis {
        Axis::X => Ok(Outcome::ok(kernel_table(cfg))),
        Axis::M => plateau_table(cfg, opts),
        a => Err(CliError::Validation(format!("sweep.axis: asymptote sweeps m or x, not {}", a.name()))),
    }
}

fn kernel_table(cfg: &ExperimentConfig) -> Table {
    let mut t = Table::new("asymptote-kernel", &["series", "m", "x", "xi", "cot_half"]);
    header(&mut t, cfg);
    for p in cfg.points() {
        let m = p.m().max(1);
        let x = p.value;
        let cot = if (0.5 * x).sin().abs() > 1e-12 { (0.5 * x).cos() / (0.5 * x).sin() } else { f64::NAN };
        t.push(vec![p.series.clone(), m.to_string(), num(x), num(kernel_xi(m, x)), num(cot)]);
    }
    t
}

struct SeriesAsym {
    sp: f64,
    chi: f64,
    theta_inf: f64,
    theta_1: f64,
    report: dephasing::asymptotics::AsymptoticReport,
}

fn plateau_table(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome, CliError> {
    let tol = quad_tol(cfg, opts);
    let points = cfg.points();
    let series = cfg.series_or_default();
    // series-level quantities, from the first point of each series
    let firsts: Vec<&Point> = series.iter().map(|s| points.iter().find(|p| p.series == s.label).expect("nonempty grid")).collect();
    let per_series = opts.exec.map(&firsts, |p| -> Result<SeriesAsym, CliError> {
        let err = lib(cfg, p);
        let gate = p.gate().map_err(&err)?;
        let model = p.noise.model().map_err(&err)?;
        let sp = s_p(&gate, &model).map_err(&err)?;
        let theta_inf = theta_asymptotic_pv(&gate, &model, tol).map_err(|e| match e {
            Error::NotConvergent(_) => CliError::Numeric(format!("{}: plateau does not exist for s_p = {sp}", where_(cfg, p))),
            e => err(e),
        })?;
        Ok(SeriesAsym {
            sp,
            chi: chi_frequency_domain(&gate, &model, tol).map_err(&err)?,
            theta_inf,
            theta_1: theta_periodic(1, &gate, &model, tol).map_err(&err)?,
            report: product_convergence_report(1, &gate, &model, 1, 1.0, tol).map_err(&err)?,
        })
    });
    let per_series: Vec<SeriesAsym> = per_series.into_iter().collect::<Result<_, _>>()?;
    let rows = opts.exec.map(&points, |p| -> Result<f64, CliError> {
        let err = lib(cfg, p);
        theta_periodic(p.value as usize, &p.gate().map_err(&err)?, &p.noise.model().map_err(&err)?, tol).map_err(&err)
    });

    let mut t = Table::new(
        "asymptote",
        &[
            "series",
            "m",
            "theta_m",
            "theta_inf",
            "abs_diff",
            "tail_pred",
            "chi_c",
            "oom_chi",
            "oom_theta_short",
            "oom_theta_long",
            "oom_branch",
            "oom_hf_theta_transient",
            "oom_hf_theta_asymptotic",
            "oom_hf_period_m",
        ],
    );
    header(&mut t, cfg);
    for (s, a) in series.iter().zip(&per_series) {
        t.meta(
            &format!("series.{}", s.label),
            format!(
                "s_p={} superpolynomial={} theta_1={} chi_c={} theta_inf={} hierarchy={}",
                num(a.sp),
                is_superpolynomial(a.sp),
                num(a.theta_1),
                num(a.chi),
                num(a.theta_inf),
                a.theta_1.abs() < a.chi && a.chi < a.theta_inf.abs()
            ),
        );
    }
    for (p, r) in points.iter().zip(rows) {
        let theta = r?;
        let si = series.iter().position(|s| s.label == p.series).expect("series exists");
        let a = &per_series[si];
        let m = p.value as usize;
        let gate = p.gate().map_err(lib(cfg, p))?;
        let tg = gate.duration();
        let n = &p.noise;
        let fo = filtering_order(&gate).map_err(lib(cfg, p))?;
        let lf = (n.delta0 > 0.0)
            .then(|| oom_lf(fo.alpha_p, fo.coeff_sq, n.s.unwrap_or(1.0), n.delta0 * tg * tg, n.gamma0.unwrap_or(1.0) * tg, m));
        let hf = (n.delta1 > 0.0)
            .then(|| {
                let l = (n.omega_bar1 * tg / (2.0 * PI)).round() as usize;
                let det = n.omega_bar1 * tg - 2.0 * PI * l as f64;
                (l >= 1 && det != 0.0).then(|| oom_hf(ff_sq_at_irf(&gate, l), n.delta1 * tg * tg, det, n.gamma1 * tg, m))
            })
            .flatten();
        t.push(vec![
            p.series.clone(),
            m.to_string(),
            num(theta),
            num(a.theta_inf),
            num((a.theta_inf - theta).abs()),
            opt(a.report.single_reset_tail(m.max(1))),
            num(a.chi),
            opt(lf.map(|o| o.chi_hat)),
            opt(lf.map(|o| o.theta_short)),
            opt(lf.map(|o| o.theta_long)),
            lf.map(|o| if o.branch == Branch::Short { "short" } else { "long" }.to_string()).unwrap_or_default(),
            opt(hf.map(|o| o.theta_transient)),
            opt(hf.map(|o| o.theta_asymptotic)),
            opt(hf.map(|o| o.period_m)),
        ]);
    }
    Ok(Outcome::ok(t))
}

/// Matched analytic and brute-force fidelities on a discrete bath.
pub fn run_oracle_check(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome, CliError> {
    if cfg.noise.modes.is_none() {
        return Err(CliError::Validation("noise.modes: oracle-check needs a discrete bath".into()));
    }
    let threshold = opts.tol.unwrap_or(cfg.tolerance.oracle);
    let tol = cfg.tolerance.quad();
    let points = cfg.points();
    let results = opts.exec.map(&points, |p| -> Result<_, CliError> {
        let err = lib(cfg, p);
        let proto = p.protocol(cfg.scenario).map_err(&err)?;
        let model = p.noise.model().map_err(&err)?;
        let fa = gate_fidelity(&proto, &model, tol).map_err(&err)?.fidelity;
        let modes = p.noise.discrete().expect("checked").map_err(&err)?;
        let study = converge_cutoff(&proto, &modes, p.noise.beta, cfg.tolerance.n_start, cfg.tolerance.cutoff);
        Ok((fa, study))
    });
    let axis = cfg.sweep.axis;
    let mut t = Table::new(
        "oracle-check",
        &["series", "index", axis.name(), "f_analytic", "f_oracle", "abs_diff", "n_max", "cutoff_delta", "status"],
    );
    header(&mut t, cfg);
    t.meta("threshold", num(threshold));
    let (mut failed, mut unconverged) = (vec![], vec![]);
    for (p, r) in points.iter().zip(results) {
        let (fa, study) = r?;
        let mut row = vec![p.series.clone(), p.index.to_string(), axis_value(p.value, axis.is_integer()), num(fa)];
        match study {
            Ok(s) => {
                let d = (fa - s.fidelity).abs();
                let status = if !s.converged {
                    unconverged.push(where_(cfg, p));
                    "unconverged"
                } else if d > threshold {
                    failed.push(format!("{}: |dF| = {d:e}", where_(cfg, p)));
                    "fail"
                } else {
                    "pass"
                };
                row.extend([num(s.fidelity), num(d), s.n_max.to_string(), num(s.delta), status.into()]);
            }
            Err(Error::DimensionCap { dim, cap }) => {
                unconverged.push(format!("{}: dimension {dim} exceeds cap {cap}", where_(cfg, p)));
                row.extend([String::new(), String::new(), String::new(), String::new(), "dimension_cap".into()]);
            }
            Err(e) => return Err(CliError::from_lib(&where_(cfg, p), e)),
        }
        t.push(row);
    }
    let failure = if !failed.is_empty() {
        Some(CliError::OracleMismatch(failed.join("; ")))
    } else if !unconverged.is_empty() {
        Some(CliError::Numeric(format!("oracle cutoff not converged: {}", unconverged.join("; "))))
    } else {
        None
    };
    Ok(Outcome { table: t, failure })
}

/// Single-reset phase as the HF peak centre moves across the grid.
pub fn run_resonance_scan(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome, CliError> {
    if cfg.sweep.axis != Axis::OmegaBar1 {
        return Err(CliError::Validation("sweep.axis: resonance-scan sweeps omega_bar1".into()));
    }
    if !matches!(cfg.scenario, Scenario::C1 | Scenario::Custom) {
        return Err(CliError::Validation("scenario: resonance-scan needs a single-reset protocol (c1 or custom)".into()));
    }
    if cfg.noise.modes.is_some() {
        return Err(CliError::Validation("noise.modes: resonance-scan needs a continuous spectral density".into()));
    }
    let tol = quad_tol(cfg, opts);
    let omegas = cfg.sweep.values();
    let mut t = Table::new(
        "resonance-scan",
        &["series", "index", "omega_bar1", "omega_bar1_over_pi", "theta", "abs_theta", "infidelity", "infidelity_t0", "is_argmax"],
    );
    header(&mut t, cfg);
    let points = cfg.points();
    for s in cfg.series_or_default() {
        let p = points.iter().find(|p| p.series == s.label).expect("nonempty grid");
        let err = lib(cfg, p);
        let proto = p.protocol(cfg.scenario).map_err(&err)?;
        if proto.k() > 1 {
            return Err(CliError::Validation("pulse.custom.resets: resonance-scan needs at most one reset".into()));
        }
        let scan = resonance_scan(
            proto.history(),
            proto.gate(),
            p.noise.density(),
            p.noise.beta,
            p.noise.classical,
            &omegas,
            tol,
            opts.exec,
        )
        .map_err(&err)?;
        let best = scan.points[scan.argmax];
        t.meta(
            &format!("argmax.{}", s.label),
            format!("omega_bar1={} omega_bar1_over_pi={} abs_theta={}", num(best.omega_bar1), num(best.omega_bar1 / PI), num(best.theta.abs())),
        );
        for (i, q) in scan.points.iter().enumerate() {
            t.push(vec![
                s.label.clone(),
                i.to_string(),
                num(q.omega_bar1),
                num(q.omega_bar1 / PI),
                num(q.theta),
                num(q.theta.abs()),
                num(q.infidelity),
                num(q.infidelity_t0),
                (i == scan.argmax).to_string(),
            ]);
        }
    }
    Ok(Outcome::ok(t))
}

/// Re-equilibration table of scenario c3 over the `m_idle` grid.
pub fn run_bath_stats(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome, CliError> {
    if cfg.scenario != Scenario::C3 || cfg.sweep.axis != Axis::MIdle {
        return Err(CliError::Validation("scenario: bath-stats needs scenario c3 with an m_idle sweep".into()));
    }
    let tol = quad_tol(cfg, opts);
    let grid: Vec<usize> = cfg.sweep.values().iter().map(|v| *v as usize).collect();
    let series = cfg.series_or_default();
    let points = cfg.points();
    let firsts: Vec<&Point> = series.iter().map(|s| points.iter().find(|p| p.series == s.label).expect("nonempty grid")).collect();
    let tables = opts.exec.map(&firsts, |p| -> Result<_, CliError> {
        let err = lib(cfg, p);
        let c = p.pulse.control.as_ref().expect("validated");
        let i = p.pulse.idle.as_ref().expect("validated");
        let model = p.noise.model().map_err(&err)?;
        reequilibration_decay(
            &c.build().map_err(&err)?,
            c.repetitions.unwrap_or(0),
            &i.build().map_err(&err)?,
            &grid,
            &p.gate().map_err(&err)?,
            &model,
            tol,
        )
        .map_err(&err)
    });
    let mut t = Table::new(
        "bath-stats",
        &["series", "m_idle", "t_idle", "mu_ctrl", "mu_idle", "fidelity", "infidelity", "infidelity_ratio"],
    );
    header(&mut t, cfg);
    let mut rows = vec![];
    for (s, r) in series.iter().zip(tables) {
        let d = r?;
        t.meta(
            &format!("series.{}", s.label),
            format!(
                "branch={} theory_exponent={} fitted_exponent={} fidelity_t0={}",
                if d.branch == DecayBranch::PowerLaw { "power_law" } else { "superpolynomial" },
                opt(d.theory_exponent),
                opt(d.fitted_exponent),
                num(d.fidelity_t0)
            ),
        );
        let e0 = 1.0 - d.fidelity_t0;
        for row in &d.rows {
            rows.push(vec![
                s.label.clone(),
                row.m_idle.to_string(),
                num(row.t_idle),
                num(row.mu_ctrl),
                num(row.mu_idle),
                num(row.fidelity),
                num(1.0 - row.fidelity),
                num((1.0 - row.fidelity) / e0),
            ]);
        }
    }
    for r in rows {
        t.push(r);
    }
    Ok(Outcome::ok(t))
}
