use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use geopoly::asymptotics::{
    exterior_ratio, fubini_limit, interior_compare, interior_grid, nth_root_modulus, ratio_np,
    AsymptoticReport, Sample, Statement,
};
use geopoly::distribution::{
    cdf, cdf_derivative_max_rel_err, compare_stieltjes, kolmogorov_distance, log_potential,
    plot_data, stieltjes_sample_points, DensityModel,
};
use geopoly::hp::{Hp, HpComplex};
use geopoly::poly::{gen_derivative, gen_recurrence, gen_stirling};
use geopoly::roots::{verify_interlace, ZeroEntry, ZeroTower};
use geopoly::weights::{
    compute_weights, even_power_configs, integral_pn_over_x, mixed_pair_configs,
    parity_product_integral, weight_interval_sum,
};
use geopoly::{Error, Result};

use crate::{AsymptKind, DistCheck, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    ToleranceViolation,
    Inconsistent,
}

/// Machine output in both formats plus the exit status.
pub struct Outcome {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub status: Status,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Outcome {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            status: Status::Pass,
            diagnostics: Vec::new(),
        }
    }

    fn flag(&mut self, status: Status, message: String) {
        self.status = self.status.max(status);
        self.diagnostics.push(message);
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionLoss { .. } | Error::QuadratureFailure(_) => 1,
        _ => 2,
    }
}

pub fn gen(n: usize) -> Result<Outcome> {
    let polys = gen_recurrence(n);
    let agree = polys == gen_stirling(n) && polys == gen_derivative(n);
    let exports: Vec<_> = polys.iter().map(|p| p.to_export()).collect();
    let rows = exports
        .iter()
        .map(|e| vec![e.n.to_string(), e.coeffs.join(" ")])
        .collect();
    let mut out = Outcome::new(serde_json::to_value(&exports).unwrap_or_default(), &["n", "coeffs"], rows);
    if !agree {
        out.flag(Status::Inconsistent, "generators disagree".into());
    }
    Ok(out)
}

pub fn zeros(n: usize, config: &RunConfig) -> Result<Outcome> {
    let tower = ZeroTower::build(n, &config.width)?;
    let zs = tower.zeros(n);
    let export = zs.to_export();
    let rows = export
        .zeros
        .iter()
        .map(|z| match z {
            ZeroEntry::Interval { lo, hi } => vec![lo.clone(), hi.clone(), String::new()],
            ZeroEntry::Exact { exact } => vec![String::new(), String::new(), exact.clone()],
        })
        .collect();
    let mut out = Outcome::new(
        serde_json::to_value(&export).unwrap_or_default(),
        &["lo", "hi", "exact"],
        rows,
    );
    if !zs.verify_certificates(tower.poly(n)) {
        out.flag(Status::Inconsistent, format!("certificate check failed for n = {n}"));
    }
    if n >= 1 && !verify_interlace(zs, tower.zeros(n - 1))? {
        out.flag(Status::Inconsistent, format!("zeros of P_{n} and P_{} do not interlace", n - 1));
    }
    Ok(out)
}

fn sorted(ns: &[usize]) -> Vec<usize> {
    let mut v = ns.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn report_outcome(report: &AsymptoticReport, hp: &mut Hp, extra: Value) -> Outcome {
    let rows = report
        .rows(hp)
        .into_iter()
        .map(|r| {
            vec![
                report.statement.name().to_string(),
                r.z_re.to_string(),
                r.z_im.to_string(),
                r.n.to_string(),
                r.computed_re,
                r.computed_im,
                r.predicted_re,
                r.predicted_im,
                format!("{:e}", r.abs_err),
                r.rel_err.map(|v| format!("{v:e}")).unwrap_or_default(),
            ]
        })
        .collect();
    let mut json = report.to_json(hp);
    if let (Value::Object(map), Value::Object(more)) = (&mut json, extra) {
        map.extend(more);
    }
    Outcome::new(
        json,
        &[
            "statement",
            "z_re",
            "z_im",
            "n",
            "computed_re",
            "computed_im",
            "predicted_re",
            "predicted_im",
            "abs_err",
            "rel_err",
        ],
        rows,
    )
}

/// Flags a violation when the error at some point does not shrink as `n` grows.
fn check_monotone(out: &mut Outcome, samples: &[Sample]) {
    let mut start = 0;
    while start < samples.len() {
        let z = samples[start].z;
        let end = samples[start..]
            .iter()
            .position(|s| s.z != z)
            .map_or(samples.len(), |k| start + k);
        let errs: Vec<f64> = samples[start..end].iter().map(|s| s.abs_err).collect();
        if !strictly_decreasing(&errs) {
            out.flag(
                Status::ToleranceViolation,
                format!("error at z = {z} does not decrease with n: {errs:?}"),
            );
        }
        start = end;
    }
}

pub fn asympt(
    kind: AsymptKind,
    zs: &[Complex64],
    ns: &[usize],
    xs: &[BigRational],
    config: &RunConfig,
) -> Result<Outcome> {
    let mut hp = Hp::new(config.precision)?;
    let ns = sorted(ns);
    let n_max = *ns.last().unwrap_or(&0);
    let need_points = matches!(kind, AsymptKind::Exterior | AsymptKind::Ratio | AsymptKind::Nthroot);
    if need_points && zs.is_empty() {
        return Err(Error::InvalidArgument("this statement needs at least one --z".into()));
    }
    let polys = gen_recurrence(n_max);
    let mut samples = Vec::new();
    let mut extra = json!({});
    let statement = match kind {
        AsymptKind::Exterior => {
            for &z in zs {
                for &n in &ns {
                    samples.push(exterior_ratio(&polys[n], z, &mut hp)?);
                }
            }
            Statement::Exterior
        }
        AsymptKind::Ratio => {
            for &z in zs {
                for &n in &ns {
                    if n == 0 {
                        return Err(Error::InvalidArgument("ratio needs n >= 1".into()));
                    }
                    samples.push(ratio_np(&polys[n - 1], &polys[n], z, &mut hp)?);
                }
            }
            Statement::Ratio
        }
        AsymptKind::Nthroot => {
            for &z in zs {
                for &n in &ns {
                    samples.push(nth_root_modulus(&polys[n], z, &mut hp)?);
                }
            }
            Statement::NthRoot
        }
        AsymptKind::Interior => {
            let grid = if xs.is_empty() { interior_grid(50) } else { xs.to_vec() };
            let mut max_dev = Vec::new();
            for &n in &ns {
                let mut worst = 0.0f64;
                for x in &grid {
                    let s = interior_compare(&polys[n], x, &mut hp)?;
                    worst = worst.max(s.abs_err);
                    samples.push(s);
                }
                max_dev.push(worst);
            }
            extra = json!({ "max_deviation": ns.iter().zip(&max_dev).map(|(n, d)| json!({"n": n, "max": d})).collect::<Vec<_>>() });
            let report = AsymptoticReport::new(Statement::Interior, samples);
            let mut out = report_outcome(&report, &mut hp, extra);
            if !strictly_decreasing(&max_dev) {
                out.flag(
                    Status::ToleranceViolation,
                    format!("max grid deviation does not decrease with n: {max_dev:?}"),
                );
            }
            return Ok(out);
        }
        AsymptKind::Fubini => {
            let mut gaps_ok = true;
            for &n in &ns {
                let f = fubini_limit(n, config.tol, &mut hp)?;
                gaps_ok &= f.fubini_gap_ok;
                samples.push(f.sample);
            }
            if !gaps_ok {
                extra = json!({ "fubini_cross_check": false });
            }
            Statement::FubiniLimit
        }
        AsymptKind::Potential => {
            let points = if zs.is_empty() { vec![Complex64::new(1.0, 0.0)] } else { zs.to_vec() };
            let tower = ZeroTower::build(n_max, &config.width)?;
            for &z in &points {
                for &n in &ns {
                    let lp = log_potential(tower.zeros(n), z)?;
                    let computed = HpComplex::real(&hp, hp.from_f64(lp.empirical));
                    let predicted = HpComplex::real(&hp, hp.from_f64(lp.predicted));
                    samples.push(Sample::new(&hp, z, n, computed, predicted, 0.0));
                }
            }
            Statement::LogPotential
        }
    };
    let fubini_bad = extra.get("fubini_cross_check") == Some(&Value::Bool(false));
    let report = AsymptoticReport::new(statement, samples);
    let mut out = report_outcome(&report, &mut hp, extra);
    check_monotone(&mut out, &report.samples);
    if fubini_bad {
        out.flag(
            Status::Inconsistent,
            "partial sums disagree with 2 P_n(1) beyond the tail bound".into(),
        );
    }
    Ok(out)
}

pub fn dist(
    ns: &[usize],
    check: DistCheck,
    zs: &[Complex64],
    points: usize,
    config: &RunConfig,
) -> Result<Outcome> {
    let ns = sorted(ns);
    let model = DensityModel::new(1e6, config.tol)?;
    match check {
        DistCheck::Cdf => {
            let [n] = ns[..] else {
                return Err(Error::InvalidArgument("the cdf check takes a single --n".into()));
            };
            let tower = ZeroTower::build(n, &config.width)?;
            let rows = plot_data(tower.zeros(n), points)?;
            let mass = model.density_mass()?;
            let grid: Vec<f64> = (0..=90).map(|i| -0.95 + 0.01 * i as f64).collect();
            let deriv = cdf_derivative_max_rel_err(&grid, 1e-6)?;
            let symmetry = grid
                .iter()
                .map(|&x| Ok((cdf(x)? + cdf(-1.0 - x)? - 1.0).abs()))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let csv_rows = rows
                .iter()
                .map(|r| {
                    vec![
                        r.x.to_string(),
                        r.rho.to_string(),
                        r.cdf.to_string(),
                        r.f_n.map(|v| v.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            let mass_err = (mass.value.re - 1.0).abs();
            let mut out = Outcome::new(
                json!({
                    "check": "cdf",
                    "n": n,
                    "mass": mass.value.re,
                    "mass_error_bound": mass.error_bound,
                    "derivative_max_rel_err": deriv,
                    "symmetry_max_err": symmetry,
                    "rows": rows,
                }),
                &["x", "rho", "cdf", "F_n"],
                csv_rows,
            );
            if mass_err > config.tol {
                out.flag(Status::ToleranceViolation, format!("density mass off by {mass_err:e}"));
            }
            if deriv > 1e-6 {
                out.flag(Status::ToleranceViolation, format!("cdf derivative off by {deriv:e}"));
            }
            if symmetry > 1e-15 {
                out.flag(Status::Inconsistent, format!("cdf symmetry off by {symmetry:e}"));
            }
            Ok(out)
        }
        DistCheck::Stieltjes => {
            let points = if zs.is_empty() { stieltjes_sample_points() } else { zs.to_vec() };
            let threshold = 100.0 * config.tol;
            let comparisons = points
                .iter()
                .map(|&z| compare_stieltjes(&model, z))
                .collect::<Result<Vec<_>>>()?;
            let rows = comparisons
                .iter()
                .map(|c| {
                    [c.z[0], c.z[1], c.lhs[0], c.lhs[1], c.rhs[0], c.rhs[1], c.err]
                        .iter()
                        .map(|v| format!("{v:e}"))
                        .collect()
                })
                .collect();
            let mut out = Outcome::new(
                serde_json::to_value(&comparisons).unwrap_or_default(),
                &["z_re", "z_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "err"],
                rows,
            );
            for c in &comparisons {
                if c.err > threshold {
                    out.flag(
                        Status::ToleranceViolation,
                        format!("stieltjes mismatch {:e} at z = {:?}", c.err, c.z),
                    );
                }
            }
            Ok(out)
        }
        DistCheck::Kolmogorov => {
            let z = zs.first().copied().unwrap_or(Complex64::new(1.0, 0.0));
            let n_max = *ns.last().unwrap_or(&0);
            let tower = ZeroTower::build(n_max, &config.width)?;
            let mut entries = Vec::new();
            let (mut ds, mut lps) = (Vec::new(), Vec::new());
            for &n in &ns {
                let d = kolmogorov_distance(tower.zeros(n));
                let lp = log_potential(tower.zeros(n), z)?;
                ds.push(d);
                lps.push(lp.error());
                entries.push(json!({
                    "n": n,
                    "kolmogorov": d,
                    "potential_empirical": lp.empirical,
                    "potential_predicted": lp.predicted,
                    "potential_err": lp.error(),
                }));
            }
            let rows = entries
                .iter()
                .map(|e| {
                    ["n", "kolmogorov", "potential_empirical", "potential_predicted", "potential_err"]
                        .iter()
                        .map(|k| e[*k].to_string())
                        .collect()
                })
                .collect();
            let mut out = Outcome::new(
                json!({ "check": "kolmogorov", "z": [z.re, z.im], "rows": entries }),
                &["n", "kolmogorov", "potential_empirical", "potential_predicted", "potential_err"],
                rows,
            );
            if !strictly_decreasing(&ds) {
                out.flag(Status::ToleranceViolation, format!("D_n not decreasing: {ds:?}"));
            }
            if !strictly_decreasing(&lps) {
                out.flag(Status::ToleranceViolation, format!("potential error not decreasing: {lps:?}"));
            }
            Ok(out)
        }
    }
}

fn exact_label(v: &BigRational) -> String {
    if v.is_zero() {
        "0 (exact)".into()
    } else {
        v.to_string()
    }
}

pub fn ortho(n_max: usize, parity: bool) -> Result<Outcome> {
    let polys = gen_recurrence(n_max.max(10));
    let mut nonzero = Vec::new();
    let mut rows = Vec::new();
    let mut pn = Vec::new();
    for n in 2..=n_max {
        let v = integral_pn_over_x(&polys[n])?;
        if !v.is_zero() {
            nonzero.push(format!("integral of P_{n}/x = {v}"));
        }
        rows.push(vec!["pn_over_x".into(), n.to_string(), exact_label(&v)]);
        pn.push(json!({ "n": n, "value": v.to_string(), "exact_zero": v.is_zero() }));
    }
    let mut par = Vec::new();
    if parity {
        let k = n_max.min(10);
        let configs = even_power_configs(k, 3).into_iter().chain(mixed_pair_configs(k));
        for f in configs {
            let r = parity_product_integral(&polys, &f)?;
            let label = f
                .iter()
                .map(|(j, m)| format!("Q{j}^{m}"))
                .collect::<Vec<_>>()
                .join(" ");
            if !r.value.is_zero() {
                nonzero.push(format!("{label} = {}", r.value));
            }
            rows.push(vec!["parity".into(), label.clone(), exact_label(&r.value)]);
            par.push(json!({
                "factors": label,
                "config": r.config,
                "value": r.value.to_string(),
                "exact_zero": r.value.is_zero(),
            }));
        }
    }
    let mut json = json!({ "pn_over_x": pn });
    if parity {
        json["parity"] = Value::Array(par);
    }
    let mut out = Outcome::new(json, &["kind", "label", "value"], rows);
    for m in nonzero {
        out.flag(Status::Inconsistent, format!("claimed-zero integral is nonzero: {m}"));
    }
    Ok(out)
}

pub fn weights(n: usize, interval: Option<(f64, f64)>, config: &RunConfig) -> Result<Outcome> {
    let mut hp = Hp::new(config.precision)?;
    let tower = ZeroTower::build(n, &config.width)?;
    if n < 2 {
        return Err(Error::InvalidArgument("weights need n >= 2".into()));
    }
    let ws = compute_weights(tower.zeros(n), tower.poly(n - 1), tower.poly(n), &hp)?;
    let export = ws.to_export(&mut hp);
    let rows = export
        .weights
        .iter()
        .map(|w| vec![w.x.clone(), w.lambda.clone()])
        .collect();
    let mut json = serde_json::to_value(&export).unwrap_or_default();
    if let Some((a, b)) = interval {
        let iw = weight_interval_sum(&ws, a, b, &hp)?;
        json["interval"] = serde_json::to_value(iw).unwrap_or_default();
    }
    Ok(Outcome::new(json, &["x", "lambda"], rows))
}
