//! CSV grids for plotting. Degenerate points keep their row with a flag.

use std::f64::consts::PI;

use modtau::charvar::{dual_from_primal, MonodromyPoint};
use modtau::modular::{c1_kernel, kernel_coordinates, upsilon_full, upsilon_hat, KernelPoint};
use modtau::{Complex64 as C64, Error, PrecisionContext};

use crate::commands::error_op;
use crate::config::Params;
use crate::report::Report;
use crate::CliError;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn flag(e: &Error) -> &'static str {
    match e {
        Error::Convergence { .. } => "convergence",
        Error::Pole { .. } => "pole",
        Error::Degenerate { .. } => "degenerate",
        Error::Cut { .. } => "cut",
        Error::Domain { .. } => "domain",
        Error::Integration { .. } => "integration",
    }
}

fn count(p: &mut Params, key: &'static str) -> Result<usize, CliError> {
    let n = p.uint_or(key, 20)?;
    if n == 0 || n > 2000 {
        return Err(CliError::Usage(format!("parameter \"{key}\" must be between 1 and 2000")));
    }
    Ok(n as usize)
}

/// Shortest round-trip decimal, with −0 written as 0.
fn num(x: f64) -> String {
    (x + 0.0).to_string()
}

fn cells(z: Option<C64>) -> [String; 2] {
    match z {
        Some(z) => [num(z.re), num(z.im)],
        None => [String::new(), String::new()],
    }
}

struct Rows {
    out: csv::Writer<Vec<u8>>,
    rows: usize,
    flagged: usize,
}

impl Rows {
    fn new(header: &[&str]) -> Self {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        out.write_record(header).expect("in-memory write");
        Self { out, rows: 0, flagged: 0 }
    }

    fn push(&mut self, record: Vec<String>, failed: Option<&Error>, r: &mut Report) {
        self.rows += 1;
        let mut record = record;
        match failed {
            None => record.push("ok".into()),
            Some(e) => {
                self.flagged += 1;
                if self.flagged <= 5 {
                    r.warn(error_op(e), format!("row {}: {e}", self.rows));
                }
                record.push(flag(e).into());
            }
        }
        self.out.write_record(&record).expect("in-memory write");
    }

    fn finish(self, r: &mut Report) -> String {
        r.output("rows", self.rows);
        r.output("flagged", self.flagged);
        if self.flagged > 5 {
            r.warn("emit_table", format!("{} flagged rows in total", self.flagged));
        }
        String::from_utf8(self.out.into_inner().expect("in-memory write")).expect("utf-8")
    }
}

pub fn emit(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<String, CliError> {
    match p.string("kind")? {
        "upsilon_grid" => Ok(upsilon_grid(p, r, ctx)?),
        "kernel_grid" => Ok(kernel_grid(p, r, ctx)?),
        k => Err(CliError::Usage(format!("kind must be upsilon_grid or kernel_grid, got {k:?}"))),
    }
}

fn upsilon_grid(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<String, CliError> {
    p.allow(&["kind", "a_min", "a_max", "n_a", "nu_min", "nu_max", "n_nu", "m"])?;
    let a = linspace(p.real_or("a_min", 0.05)?, p.real_or("a_max", 0.45)?, count(p, "n_a")?);
    let nu = linspace(p.real_or("nu_min", 0.0)?, p.real_or("nu_max", 4.0 * PI)?, count(p, "n_nu")?);
    let m = p.real_or("m", 0.17)?;
    let mut rows = Rows::new(&[
        "a",
        "nu",
        "m",
        "upsilon_re",
        "upsilon_im",
        "upsilon_hat_re",
        "upsilon_hat_im",
        "at_re",
        "at_im",
        "nut_re",
        "nut_im",
        "flag",
    ]);
    for &ai in &a {
        for &ni in &nu {
            let pt = MonodromyPoint::real(ai, ni, m);
            let res = dual_from_primal(&pt).and_then(|(d, _)| {
                let u = upsilon_full(&pt, ctx)?;
                let uh = upsilon_hat(pt.a, d.at, d.nut, pt.m, ctx)?;
                Ok((u, uh, d))
            });
            let mut rec = vec![num(ai), num(ni), num(m)];
            let (vals, err) = match &res {
                Ok((u, uh, d)) => ([Some(*u), Some(*uh), Some(d.at), Some(d.nut)], None),
                Err(e) => ([None; 4], Some(e)),
            };
            for v in vals {
                rec.extend(cells(v));
            }
            rows.push(rec, err, r);
        }
    }
    Ok(rows.finish(r))
}

fn kernel_grid(p: &mut Params, r: &mut Report, ctx: &PrecisionContext) -> Result<String, CliError> {
    p.allow(&["kind", "a_min", "a_max", "n_a", "at_min", "at_max", "n_at", "m"])?;
    let a = linspace(p.real_or("a_min", 0.05)?, p.real_or("a_max", 0.45)?, count(p, "n_a")?);
    let at = linspace(p.real_or("at_min", 0.05)?, p.real_or("at_max", 0.45)?, count(p, "n_at")?);
    let m = p.real_or("m", 0.0)?;
    let mut rows = Rows::new(&["a", "at", "m", "s_re", "s_im", "s_abs", "nu_re", "nu_im", "flag"]);
    let mut modulus_dev: f64 = 0.0;
    for &ai in &a {
        for &ti in &at {
            let k = KernelPoint::new(ai.into(), ti.into(), m.into());
            let res = kernel_coordinates(&k).and_then(|(nu, _)| Ok((c1_kernel(&k, ctx)?, nu)));
            let mut rec = vec![num(ai), num(ti), num(m)];
            match &res {
                Ok((s, nu)) => {
                    rec.extend(cells(Some(*s)));
                    rec.push(num(s.norm()));
                    rec.extend(cells(Some(*nu)));
                    modulus_dev = modulus_dev.max((s.norm() - 2f64.sqrt()).abs());
                }
                Err(_) => {
                    rec.extend(cells(None));
                    rec.push(String::new());
                    rec.extend(cells(None));
                }
            }
            rows.push(rec, res.as_ref().err(), r);
        }
    }
    if m == 0.0 {
        r.residual("free_field_modulus", modulus_dev, 1e-12);
    }
    Ok(rows.finish(r))
}
