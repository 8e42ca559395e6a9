//! Run configuration: one JSON document, with `--set` overrides applied to the
//! raw document before it is typed.

use modtau::flow::FlowConfig;
use modtau::{Complex64 as C64, PrecisionContext, WorkingPrecision};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const COMMANDS: [&str; 7] = ["eval", "map", "upsilon", "flow", "kernel", "verify", "emit_table"];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub precision: PrecisionFields,
    #[serde(default)]
    pub flow: FlowFields,
    pub output_path: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionFields {
    pub tol: Option<f64>,
    pub max_terms: Option<usize>,
    pub fd_step: Option<f64>,
    pub working_precision: Option<String>,
    pub pole_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFields {
    pub t_max: Option<f64>,
    pub eps: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub pole_threshold: Option<f64>,
    pub max_steps: Option<usize>,
    pub cusp_tol: Option<f64>,
}

impl RunConfig {
    /// Parses `doc` (empty means `{}`), applies `key=value` overrides and
    /// types the result. Keys with a dot address a section
    /// (`precision.tol`, `flow.t_max`); bare keys go to `params` unless they
    /// name a top-level field.
    pub fn build(doc: Option<&str>, sets: &[String]) -> Result<Self, CliError> {
        let mut root = match doc {
            Some(s) => serde_json::from_str::<Value>(s).map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?,
            None => Value::Object(Map::new()),
        };
        let obj = root.as_object_mut().ok_or_else(|| CliError::Usage("config must be a JSON object".into()))?;
        for s in sets {
            let (key, raw) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects key=value, got {s:?}")))?;
            let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            match key.split_once('.') {
                Some((section, field)) => {
                    let entry = obj.entry(section).or_insert_with(|| Value::Object(Map::new()));
                    let sec = entry.as_object_mut().ok_or_else(|| CliError::Usage(format!("{section} is not an object")))?;
                    sec.insert(field.to_string(), value);
                }
                None if key == "command" || key == "output_path" => {
                    obj.insert(key.to_string(), value);
                }
                None => {
                    let entry = obj.entry("params").or_insert_with(|| Value::Object(Map::new()));
                    let params = entry.as_object_mut().ok_or_else(|| CliError::Usage("params is not an object".into()))?;
                    params.insert(key.to_string(), value);
                }
            }
        }
        serde_json::from_value(root).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    /// Base context from `MODTAU_PRECISION`, then explicit fields.
    pub fn precision(&self, env: Option<&str>) -> Result<PrecisionContext, CliError> {
        let mut ctx = PrecisionContext::default();
        if let Some(v) = env {
            ctx.working_precision = v.parse::<WorkingPrecision>().map_err(|e| CliError::Usage(format!("MODTAU_PRECISION: {e}")))?;
        }
        let p = &self.precision;
        if let Some(w) = &p.working_precision {
            ctx.working_precision =
                w.parse::<WorkingPrecision>().map_err(|e| CliError::Usage(format!("precision.working_precision: {e}")))?;
        }
        ctx.tol = p.tol.unwrap_or(ctx.tol);
        ctx.max_terms = p.max_terms.unwrap_or(ctx.max_terms);
        ctx.fd_step = p.fd_step.unwrap_or(ctx.fd_step);
        ctx.pole_threshold = p.pole_threshold.unwrap_or(ctx.pole_threshold);
        ctx.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(ctx)
    }

    pub fn flow_config(&self) -> Result<FlowConfig, CliError> {
        let d = FlowConfig::default();
        let f = &self.flow;
        let cfg = FlowConfig {
            t_max: f.t_max.unwrap_or(d.t_max),
            eps: f.eps.unwrap_or(d.eps),
            rtol: f.rtol.unwrap_or(d.rtol),
            atol: f.atol.unwrap_or(d.atol),
            pole_threshold: f.pole_threshold.unwrap_or(d.pole_threshold),
            max_steps: f.max_steps.unwrap_or(d.max_steps),
            cusp_tol: f.cusp_tol.unwrap_or(d.cusp_tol),
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// Typed access to `params` for one command. Every key read is recorded so
/// leftovers can be rejected.
pub struct Params<'a> {
    map: &'a Map<String, Value>,
    seen: Vec<&'static str>,
    echo: Map<String, Value>,
}

impl<'a> Params<'a> {
    pub fn new(map: &'a Map<String, Value>) -> Self {
        Self { map, seen: Vec::new(), echo: Map::new() }
    }

    /// Rejects any key outside `keys` before anything is computed.
    pub fn allow(&self, keys: &[&str]) -> Result<(), CliError> {
        let mut unknown: Vec<&String> = self.map.keys().filter(|k| !keys.contains(&k.as_str())).collect();
        unknown.sort();
        match unknown.first() {
            Some(k) => Err(CliError::Usage(format!("unknown parameter \"{k}\" (expected {})", keys.join(", ")))),
            None => Ok(()),
        }
    }

    fn get(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.push(key);
        self.map.get(key)
    }

    pub fn complex(&mut self, key: &'static str) -> Result<C64, CliError> {
        let v = self.get(key).ok_or_else(|| CliError::Usage(format!("missing required parameter \"{key}\"")))?;
        let z = parse_complex(key, v)?;
        self.echo.insert(key.into(), complex_json(z));
        Ok(z)
    }

    pub fn complex_or(&mut self, key: &'static str, default: C64) -> Result<C64, CliError> {
        let z = match self.get(key) {
            Some(v) => parse_complex(key, v)?,
            None => default,
        };
        self.echo.insert(key.into(), complex_json(z));
        Ok(z)
    }

    pub fn real_or(&mut self, key: &'static str, default: f64) -> Result<f64, CliError> {
        let x = match self.get(key) {
            Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| bad(key, "a finite number"))?,
            None => default,
        };
        self.echo.insert(key.into(), Value::from(x));
        Ok(x)
    }

    pub fn uint_or(&mut self, key: &'static str, default: u64) -> Result<u64, CliError> {
        let x = match self.get(key) {
            Some(v) => v.as_u64().ok_or_else(|| bad(key, "a non-negative integer"))?,
            None => default,
        };
        self.echo.insert(key.into(), Value::from(x));
        Ok(x)
    }

    pub fn bool_or(&mut self, key: &'static str, default: bool) -> Result<bool, CliError> {
        let x = match self.get(key) {
            Some(v) => v.as_bool().ok_or_else(|| bad(key, "true or false"))?,
            None => default,
        };
        self.echo.insert(key.into(), Value::from(x));
        Ok(x)
    }

    pub fn string(&mut self, key: &'static str) -> Result<&'a str, CliError> {
        let v = self.get(key).ok_or_else(|| CliError::Usage(format!("missing required parameter \"{key}\"")))?;
        let s = v.as_str().ok_or_else(|| bad(key, "a string"))?;
        self.echo.insert(key.into(), Value::from(s));
        Ok(s)
    }

    pub fn string_opt(&mut self, key: &'static str) -> Result<Option<&'a str>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let s = v.as_str().ok_or_else(|| bad(key, "a string"))?;
                self.echo.insert(key.into(), Value::from(s));
                Ok(Some(s))
            }
        }
    }

    /// A list of names, given either as an array of strings or as a
    /// comma-separated string.
    pub fn names_opt(&mut self, key: &'static str) -> Result<Option<Vec<String>>, CliError> {
        let names: Vec<String> = match self.get(key) {
            None => return Ok(None),
            Some(Value::String(s)) => s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
            Some(Value::Array(a)) => {
                a.iter().map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad(key, "a list of names"))).collect::<Result<_, _>>()?
            }
            Some(_) => return Err(bad(key, "a name or a list of names")),
        };
        self.echo.insert(key.into(), Value::from(names.clone()));
        Ok(Some(names))
    }

    /// Rejects keys that no accessor asked for and returns the echo of the
    /// resolved inputs.
    pub fn finish(self) -> Result<Map<String, Value>, CliError> {
        let mut unknown: Vec<&String> = self.map.keys().filter(|k| !self.seen.contains(&k.as_str())).collect();
        unknown.sort();
        if let Some(k) = unknown.first() {
            return Err(CliError::Usage(format!("unknown parameter \"{k}\"")));
        }
        Ok(self.echo)
    }
}

fn bad(key: &str, what: &str) -> CliError {
    CliError::Usage(format!("parameter \"{key}\" must be {what}"))
}

/// `[re, im]`, `{"re": .., "im": ..}` or a plain real number.
pub fn parse_complex(key: &str, v: &Value) -> Result<C64, CliError> {
    let z = match v {
        Value::Number(n) => n.as_f64().map(|x| C64::new(x, 0.0)),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Some(C64::new(re, im)),
            _ => None,
        },
        Value::Object(o) if o.len() == 2 => match (o.get("re").and_then(Value::as_f64), o.get("im").and_then(Value::as_f64)) {
            (Some(re), Some(im)) => Some(C64::new(re, im)),
            _ => None,
        },
        _ => None,
    };
    match z {
        Some(z) if z.re.is_finite() && z.im.is_finite() => Ok(z),
        _ => Err(bad(key, "a finite complex number [re, im]")),
    }
}

pub fn complex_json(z: C64) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), Value::from(z.re));
    m.insert("im".into(), Value::from(z.im));
    Value::Object(m)
}
