use std::f64::consts::PI;

use modtau::charvar::{
    dual_from_primal, dual_trace_coords, fricke_residual, nu_from_dual, nueqamnut_residuals, trace_coords, DualBranch, MonodromyPoint,
};
use modtau::flow::{connection_ratio, cusp_time, modular_state_check, FlowConfig};
use modtau::modular::{c1_kernel, dnu_dat, kernel_coordinates, saddle_residual, upsilon_full, upsilon_hat, KernelPoint};
use modtau::specfun::{
    barnes_ghat, dedekind_eta, dilog, double_sine_asymp, eta1_const, gauss_2f1, lame, theta1, weierstrass, DoubleSineForm, LameKind,
};
use modtau::trinion::upsilon_dlog_residual;
use modtau::verify::{run_suites, SUITES};
use modtau::{Complex64 as C64, CutSide, Error, HalfPlanePoint, PrecisionContext};
use serde_json::{Map, Value};

use crate::config::{Params, RunConfig};
use crate::report::Report;
use crate::table;
use crate::CliError;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Name of the operation that raised `e`.
pub fn error_op(e: &Error) -> &'static str {
    match e {
        Error::Convergence { op, .. }
        | Error::Pole { op, .. }
        | Error::Degenerate { op, .. }
        | Error::Cut { op, .. }
        | Error::Domain { op, .. } => op,
        Error::Integration { .. } => "integrate",
    }
}

/// Unwraps a numerical result, recording the error in the report.
fn num<T>(r: &mut Report, v: modtau::Result<T>) -> Option<T> {
    match v {
        Ok(x) => Some(x),
        Err(e) => {
            r.fail(error_op(&e), e.to_string());
            None
        }
    }
}

pub struct Outcome {
    pub report: Report,
    /// CSV body for `emit_table`.
    pub table: Option<String>,
}

pub fn execute(cfg: &RunConfig, command: &str, ctx: &PrecisionContext) -> Result<Outcome, CliError> {
    let mut r = Report::new(command);
    let mut p = Params::new(&cfg.params);
    let mut table = None;
    match command {
        "eval" => eval(&mut p, &mut r, ctx)?,
        "map" => map(&mut p, &mut r)?,
        "upsilon" => upsilon(&mut p, &mut r, ctx)?,
        "flow" => flow(&mut p, &mut r, &cfg.flow_config()?, ctx)?,
        "kernel" => kernel(&mut p, &mut r, ctx)?,
        "verify" => verify(&mut p, &mut r, ctx)?,
        "emit_table" => table = Some(table::emit(&mut p, &mut r, ctx)?),
        other => return Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
    r.inputs = p.finish()?;
    r.inputs.insert("precision".into(), precision_json(ctx));
    if command == "flow" {
        r.inputs.insert("flow".into(), flow_json(&cfg.flow_config()?));
    }
    Ok(Outcome { report: r, table })
}

fn precision_json(ctx: &PrecisionContext) -> Value {
    let mut m = Map::new();
    m.insert("tol".into(), ctx.tol.into());
    m.insert("max_terms".into(), ctx.max_terms.into());
    m.insert("fd_step".into(), ctx.fd_step.into());
    let wp = match ctx.working_precision {
        modtau::WorkingPrecision::Double => "double",
        modtau::WorkingPrecision::Extended => "extended",
    };
    m.insert("working_precision".into(), wp.into());
    m.insert("pole_threshold".into(), ctx.pole_threshold.into());
    Value::Object(m)
}

fn flow_json(f: &FlowConfig) -> Value {
    let mut m = Map::new();
    m.insert("t_max".into(), f.t_max.into());
    m.insert("eps".into(), f.eps.into());
    m.insert("rtol".into(), f.rtol.into());
    m.insert("atol".into(), f.atol.into());
    m.insert("pole_threshold".into(), f.pole_threshold.into());
    m.insert("max_steps".into(), f.max_steps.into());
    m.insert("cusp_tol".into(), f.cusp_tol.into());
    Value::Object(m)
}

fn half_plane(p: &mut Params, key: &'static str) -> Result<HalfPlanePoint, CliError> {
    let t = p.complex(key)?;
    HalfPlanePoint::new(t).map_err(|_| CliError::Usage(format!("parameter \"{key}\" must have positive imaginary part")))
}

fn point(p: &mut Params) -> Result<MonodromyPoint, CliError> {
    Ok(MonodromyPoint::new(p.complex("a")?, p.complex("nu")?, p.complex("m")?))
}

fn eval(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<(), CliError> {
    let f = p.string("fn")?;
    let keys: &[&str] = match f {
        "theta1" | "weierstrass" => &["fn", "z", "tau", "deriv"],
        "dedekind_eta" | "eta1" => &["fn", "tau"],
        "lame" => &["fn", "xi", "z", "tau", "kind"],
        "gauss_2f1" => &["fn", "a", "b", "c", "x"],
        "barnes_ghat" => &["fn", "x"],
        "dilog" => &["fn", "z", "side"],
        "double_sine" => &["fn", "x", "form"],
        _ => &["fn"],
    };
    p.allow(keys)?;
    let v = match f {
        "theta1" => {
            let (z, tau, k) = (p.complex("z")?, half_plane(p, "tau")?, p.uint_or("deriv", 0)?);
            theta1(z, tau, k as usize, ctx)
        }
        "dedekind_eta" => dedekind_eta(half_plane(p, "tau")?, ctx),
        "eta1" => eta1_const(half_plane(p, "tau")?, ctx),
        "weierstrass" => {
            let (z, tau, k) = (p.complex("z")?, half_plane(p, "tau")?, p.uint_or("deriv", 0)?);
            weierstrass(z, tau, k as usize, ctx)
        }
        "lame" => {
            let (xi, z, tau) = (p.complex("xi")?, p.complex("z")?, half_plane(p, "tau")?);
            let kind = match p.string_opt("kind")?.unwrap_or("x") {
                "x" => LameKind::X,
                "y" => LameKind::Y,
                k => return Err(CliError::Usage(format!("kind must be x or y, got {k:?}"))),
            };
            lame(xi, z, tau, kind, ctx)
        }
        "gauss_2f1" => {
            let (a, b, c, x) = (p.complex("a")?, p.complex("b")?, p.complex("c")?, p.complex("x")?);
            gauss_2f1(a, b, c, x, ctx)
        }
        "barnes_ghat" => barnes_ghat(p.complex("x")?, ctx),
        "dilog" => {
            let z = p.complex("z")?;
            let side = match p.string_opt("side")? {
                None => None,
                Some("above") => Some(CutSide::Above),
                Some("below") => Some(CutSide::Below),
                Some(s) => return Err(CliError::Usage(format!("side must be above or below, got {s:?}"))),
            };
            dilog(z, side, ctx)
        }
        "double_sine" => {
            let x = p.complex("x")?;
            let form = match p.string_opt("form")?.unwrap_or("ghat") {
                "dilog" => DoubleSineForm::Dilog,
                "ghat" => DoubleSineForm::Ghat,
                "class" => DoubleSineForm::Class,
                s => return Err(CliError::Usage(format!("form must be dilog, ghat or class, got {s:?}"))),
            };
            double_sine_asymp(x, form, ctx)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown fn {other:?} (theta1, dedekind_eta, eta1, weierstrass, lame, gauss_2f1, barnes_ghat, dilog, double_sine)"
            )))
        }
    };
    if let Some(v) = num(r, v) {
        r.output_c("value", v);
    }
    Ok(())
}

fn branch_warning(r: &mut Report, b: DualBranch) {
    if b == DualBranch::Reflected {
        r.warn("dual_from_primal", "principal branch failed; used the reflected representative ã ↦ −ã");
    }
}

fn map(p: &mut Params, r: &mut Report) -> Result<(), CliError> {
    p.allow(&["a", "nu", "m"])?;
    let pt = point(p)?;
    let Some(t) = num(r, trace_coords(&pt)) else { return Ok(()) };
    r.output_c("tr_a", t.a);
    r.output_c("tr_b", t.b);
    r.output_c("tr_ab", t.c);
    r.residual("fricke", fricke_residual(&t, pt.m).norm(), 1e-10);
    let Some((d, branch)) = num(r, dual_from_primal(&pt)) else { return Ok(()) };
    branch_warning(r, branch);
    r.output_c("at", d.at);
    r.output_c("nut", d.nut);
    if let Some(dt) = num(r, dual_trace_coords(&d)) {
        r.residual("dual_traces", dt.distance(&t), 1e-10);
    }
    if let Some((a, nu)) = num(r, nu_from_dual(&d)) {
        r.output_c("a_back", a);
        r.output_c("nu_back", nu);
        if let Some(back) = num(r, trace_coords(&MonodromyPoint::new(a, nu, pt.m))) {
            r.residual("round_trip", back.distance(&t), 1e-9);
        }
    }
    let (r1, r2) = nueqamnut_residuals(pt.a, pt.nu, d.at, d.nut, pt.m);
    r.residual("character_relations", r1.norm().max(r2.norm()), 1e-10);
    Ok(())
}

fn upsilon(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<(), CliError> {
    p.allow(&["a", "nu", "m"])?;
    let pt = point(p)?;
    let Some((d, branch)) = num(r, dual_from_primal(&pt)) else { return Ok(()) };
    branch_warning(r, branch);
    if let Some(u) = num(r, upsilon_full(&pt, ctx)) {
        r.output_c("upsilon_s", u);
    }
    if let Some(u) = num(r, upsilon_hat(pt.a, d.at, d.nut, pt.m, ctx)) {
        r.output_c("upsilon_hat", u);
    }
    r.output_c("at", d.at);
    r.output_c("nut", d.nut);
    if let (Some(t), Some(dt)) = (num(r, trace_coords(&pt)), num(r, dual_trace_coords(&d))) {
        r.residual("dual_traces", dt.distance(&t), 1e-10);
    }
    if let Some(res) = num(r, upsilon_dlog_residual(&pt, ctx)) {
        r.residual("dlog_upsilon", res.iter().map(|x| x.norm()).fold(0.0, f64::max), 1e-6);
    }
    Ok(())
}

fn flow(p: &mut Params, r: &mut Report, cfg: &FlowConfig, ctx: &PrecisionContext) -> Result<(), CliError> {
    p.allow(&["a", "nu", "m", "two_channel"])?;
    let pt = point(p)?;
    let two = p.bool_or("two_channel", false)?;
    if let Some(c) = num(r, connection_ratio(&pt, cfg, ctx)) {
        r.output_c("numeric", c.numeric);
        r.output_c("closed_form", c.closed_form);
        r.output_c("delta_nut", c.delta_nut);
        r.output_c("tau_end", c.end.tau);
        r.output_c("q_end", c.end.q);
        r.output_c("p_end", c.end.p);
        r.output_c("log_tau_end", c.end.log_tau);
        r.output("steps", c.stats.accepted);
        r.residual("connection_ratio", c.residual, 1e-3);
    }
    if two {
        // start high enough that the neglected cusp terms are below 1e-8 on both sides
        let t = num(r, dual_from_primal(&pt)).and_then(|(d, _)| {
            let t1 = num(r, cusp_time(pt.a, pt.m, 1e-8))?;
            let t2 = num(r, cusp_time(d.at, d.m, 1e-8))?;
            Some(t1.max(t2).clamp(cfg.t_max, 20.0))
        });
        if let Some(t) = t {
            let tcfg = FlowConfig { t_max: t, rtol: cfg.rtol.min(1e-12), atol: cfg.atol.min(1e-14), ..*cfg };
            if let Some(s) = num(r, modular_state_check(&pt, &tcfg, ctx)) {
                r.output("two_channel_t_max", t);
                r.residual("two_channel_q", s.q_residual, 1e-4);
                r.residual("two_channel_p", s.p_residual, 1e-4);
            }
        }
    }
    Ok(())
}

fn kernel(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<(), CliError> {
    p.allow(&["a", "at", "m"])?;
    let k = KernelPoint::new(p.complex("a")?, p.complex("at")?, p.complex_or("m", ZERO)?);
    let Some((nu, nut)) = num(r, kernel_coordinates(&k)) else { return Ok(()) };
    r.output_c("nu", nu);
    r.output_c("nut", nut);
    if let Some(d) = num(r, dnu_dat(k.a, k.at, nu, k.m)) {
        r.output_c("dnu_dat", d);
    }
    if let Some(s) = num(r, c1_kernel(&k, ctx)) {
        r.output_c("s", s);
        r.output("s_abs", s.norm());
        if k.m == ZERO {
            let free = 2f64.sqrt() * (-4.0 * PI * C64::i() * k.a * k.at).exp();
            r.residual("free_field_kernel", (s - free).norm(), 1e-12);
        }
    }
    // At m = 0 two of the logarithms sit at x = 0 and the free-field
    // check above replaces the saddle equation.
    if k.m != ZERO {
        if let Some(s) = num(r, saddle_residual(&k, nu, ctx)) {
            r.residual("saddle", s.norm(), 1e-8);
        }
    }
    Ok(())
}

fn verify(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<(), CliError> {
    p.allow(&["seed", "only"])?;
    let seed = p.uint_or("seed", 42)?;
    let names = p.names_opt("only")?.unwrap_or_else(|| SUITES.iter().map(|s| s.to_string()).collect());
    for n in &names {
        if !SUITES.contains(&n.as_str()) {
            return Err(CliError::Usage(format!("unknown suite {n:?} (expected one of {})", SUITES.join(", "))));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let Some(reports) = num(r, run_suites(&refs, seed, ctx)) else { return Ok(()) };
    r.output("seed", seed);
    let mut suites = Map::new();
    for s in &reports {
        let mut m = Map::new();
        m.insert("pass".into(), s.pass().into());
        let (worst, ratio) = s.checks.iter().map(|c| (c.name.as_str(), c.worst / c.tol)).fold(("", 0.0), |acc, x| {
            if x.1 > acc.1 || acc.0.is_empty() {
                x
            } else {
                acc
            }
        });
        m.insert("worst_check".into(), worst.into());
        m.insert("worst_ratio".into(), if ratio.is_finite() { ratio.into() } else { Value::Null });
        m.insert("checks".into(), s.checks.len().into());
        suites.insert(s.suite.clone(), Value::Object(m));
        for c in &s.checks {
            let key = format!("{}.{}", s.suite, c.name);
            r.residual(&key, c.worst, c.tol);
            if let Some(e) = &c.error {
                r.fail(&key, e.clone());
            } else if !c.pass {
                r.fail(&key, format!("only {} samples", c.samples));
            }
        }
    }
    r.output("suites", Value::Object(suites));
    Ok(())
}
