use std::fs;
use std::path::Path;

use critex::exponent::{critical_exponent, lower_envelope};
use critex::fraclap::{fractional_laplacian_radial, pointwise_bound_check, value_at_origin, PowerSum};
use critex::operator::weight_exponent_q;
use critex::sim::{self, SimConfig};
use critex::testfn::{check_aaa_bound, TestFunctionFamily};
use critex::{OperatorSpec, Rational};
use serde_json::{json, Value};

use crate::output::{emit, json_text, read_input, sha256_hex, stamp, CliError, Format};

fn parse_rational(name: &str, text: &str) -> Result<Rational, CliError> {
    text.parse().map_err(|e: critex::Error| CliError::Usage(format!("--{name}: {e}")))
}

fn json_only(format: Format, command: &str) -> Result<(), CliError> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Usage(format!("{command} has no csv output"))),
    }
}

pub fn exponent(input: &Path, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    json_only(format, "exponent")?;
    let (text, hash) = read_input(input)?;
    let spec = OperatorSpec::from_json(&text)?;
    let report = critical_exponent(&spec);
    let mut value = report.to_json_value();
    value["operator"] = serde_json::from_str(&spec.to_json()).expect("canonical operator json");
    emit(&json_text(&stamp(value, &hash)), output)
}

pub fn envelope(input: &Path, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    let (text, hash) = read_input(input)?;
    let spec = OperatorSpec::from_json(&text)?;
    let env = lower_envelope(&spec);
    match format {
        Format::Csv => {
            let mut out = String::from("eta_start,j,slope,intercept\n");
            for p in env.pieces() {
                out.push_str(&format!("{},{},{},{}\n", p.start, p.line.source_j, p.line.slope, p.line.intercept));
            }
            emit(&out, output)
        }
        Format::Json => {
            let line = |l: &critex::exponent::EnvelopeLine| {
                json!({ "j": l.source_j, "slope": l.slope.to_string(), "intercept": l.intercept.to_string() })
            };
            let pieces: Vec<Value> = env
                .pieces()
                .iter()
                .map(|p| {
                    let mut v = line(&p.line);
                    v["eta_start"] = Value::String(p.start.to_string());
                    v
                })
                .collect();
            let lines: Vec<Value> = env.lines().iter().map(line).collect();
            let value = json!({ "pieces": pieces, "lines": lines, "signs": env.signs() });
            emit(&json_text(&stamp(value, &hash)), output)
        }
    }
}

pub fn fraclap_verify(
    n: u32,
    sigma: &str,
    q: &str,
    tol: f64,
    slack: f64,
    format: Format,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let sigma_r = parse_rational("sigma", sigma)?;
    let q_r = parse_rational("q", q)?;
    if !sigma_r.is_positive() {
        return Err(CliError::Usage(format!("--sigma must be positive, got {sigma_r}")));
    }
    let (s, qf) = (sigma_r.to_f64(), q_r.to_f64());
    let closed = value_at_origin(n, s, qf)?;
    let quadrature = fractional_laplacian_radial(&PowerSum::single(qf), n, s, 0.0)?;
    let fit = pointwise_bound_check(n, s, qf)?;
    if format == Format::Csv {
        return emit(&fit.to_csv(), output);
    }
    let rel_error = (quadrature - closed).abs() / closed.abs();
    let value = json!({
        "n": n,
        "sigma": sigma_r.to_string(),
        "q": q_r.to_string(),
        "origin": {
            "closed_form": closed,
            "quadrature": quadrature,
            "rel_error": rel_error,
            "tolerance": tol,
            "ok": rel_error <= tol,
        },
        "decay": {
            "slope": fit.slope,
            "q_sigma": fit.q_sigma,
            "constant": fit.constant,
            "slack": slack,
            "ok": fit.slope <= -fit.q_sigma + slack,
        },
    });
    let key = format!("fraclap-verify n={n} sigma={sigma_r} q={q_r} tol={tol:?} slack={slack:?}");
    emit(&json_text(&stamp(value, &sha256_hex(key.as_bytes()))), output)
}

#[allow(clippy::too_many_arguments)]
pub fn testfn_dump(
    m: u32,
    p: f64,
    eta: &str,
    r: f64,
    samples: usize,
    scaled: bool,
    format: Format,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let eta_r = parse_rational("eta", eta)?;
    let fam = TestFunctionFamily::new(m, p, eta_r.clone(), r)?;
    if format == Format::Csv {
        return emit(&critex::testfn::dump_csv(&fam, samples, scaled)?, output);
    }
    let samples = samples.max(2);
    let end = if scaled { fam.support_end() } else { 1.0 };
    let ts: Vec<f64> = (0..samples).map(|i| end * i as f64 / (samples - 1) as f64).collect();
    let mi = m as i32;
    let mut orders = serde_json::Map::new();
    for k in -mi..=mi {
        let values = ts
            .iter()
            .map(|&t| if scaled { fam.scaled_psi(k, t) } else { fam.psi_derivative(k, t) })
            .collect::<critex::Result<Vec<f64>>>()?;
        orders.insert(k.to_string(), json!(values));
    }
    let bounds = (-mi..=mi)
        .map(|k| check_aaa_bound(&fam, k, samples).map(|b| json!({ "order": k, "c_est": b.c_est, "holds": b.holds })))
        .collect::<critex::Result<Vec<Value>>>()?;
    let value = json!({
        "m": m,
        "p": p,
        "eta": eta_r.to_string(),
        "r": r,
        "scaled": scaled,
        "t": ts,
        "orders": orders,
        "aaa_bounds": bounds,
    });
    let key = format!("testfn-dump m={m} p={p:?} eta={eta_r} r={r:?} samples={samples} scaled={scaled}");
    emit(&json_text(&stamp(value, &sha256_hex(key.as_bytes()))), output)
}

fn load_config(path: &Path) -> Result<(SimConfig, String), CliError> {
    let (text, hash) = read_input(path)?;
    let config: SimConfig = serde_json::from_str(&text).map_err(critex::Error::from)?;
    config.validate()?;
    Ok((config, hash))
}

pub fn simulate(
    config_path: &Path,
    snapshots: Option<&Path>,
    residual: Option<(String, f64)>,
    format: Format,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let (config, hash) = load_config(config_path)?;
    let family = match &residual {
        Some((eta, r)) => {
            let eta = parse_rational("residual-eta", eta)?;
            Some(TestFunctionFamily::new(config.operator.m() as u32, config.p, eta, *r)?)
        }
        None => None,
    };
    log::info!("simulating {} points to t = {}", config.points, config.t_end);
    let mut run = sim::simulate(&config)?;
    if let Some(fam) = &family {
        // integer-only operators have no fractional weight; use q = n + 1
        let q = weight_exponent_q(&config.operator)
            .unwrap_or_else(|_| Rational::from_integer(config.operator.n() as i64 + 1));
        run.weak_residual = Some(sim::weak_residual(&run, &config.operator, fam, &q)?);
    }
    if let Some(dir) = snapshots {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (k, snap) in run.snapshots.iter().enumerate() {
            let path = dir.join(format!("u_{k:05}.bin"));
            let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            snap.u.write_binary(std::io::BufWriter::new(file))?;
        }
    }
    match format {
        Format::Csv => emit(&run.sup_norm_csv(), output),
        Format::Json => {
            let mut value = run.to_json_value();
            value["p"] = json!(config.p);
            value["p_c"] = Value::String(critical_exponent(&config.operator).p_c.to_string());
            emit(&json_text(&stamp(value, &hash)), output)
        }
    }
}

pub fn sweep(config_path: &Path, ps: &[f64], jobs: usize, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    let (config, hash) = load_config(config_path)?;
    if ps.iter().any(|p| !(*p > 1.0) || !p.is_finite()) {
        return Err(CliError::Usage("every --p value must be a finite number above 1".into()));
    }
    let table = sim::sweep_p(&config, ps, jobs)?;
    match format {
        Format::Csv => emit(&table.to_csv(), output),
        Format::Json => {
            let mut value = serde_json::to_value(&table).expect("sweep tables serialize");
            value["monotone"] = Value::Bool(table.is_monotone());
            emit(&json_text(&stamp(value, &hash)), output)
        }
    }
}
