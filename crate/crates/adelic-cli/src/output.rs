//! Report records and their JSON-lines, CSV and text encodings.

use serde_json::{Map, Number, Value};

use adelic_core::report::format_sig;
use adelic_core::CheckReport;

use crate::config::Format;

/// One output row: `{name, instance, lhs, rhs, slack, pass, seed}`.
///
/// Computations without a comparison carry their main value in both `lhs` and `rhs`.
#[derive(Debug, Clone)]
pub struct Record {
    pub name: String,
    pub instance: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub seed: u64,
}

impl Record {
    /// A computed value with its context.
    pub fn value(name: &str, instance: Value, value: f64, seed: u64) -> Self {
        Record {
            name: name.into(),
            instance,
            lhs: value,
            rhs: value,
            slack: 0.0,
            pass: true,
            seed,
        }
    }

    /// A check report, with the pass flag recomputed when a tolerance override is given.
    pub fn from_report(r: &CheckReport, tol: Option<f64>) -> Self {
        let mut instance = r.instance.clone();
        if let Value::Object(map) = &mut instance {
            map.insert(
                "details".into(),
                serde_json::to_value(&r.details).expect("details serialize"),
            );
        } else {
            instance = serde_json::json!({ "case": instance, "details": r.details });
        }
        let pass = match tol {
            Some(t) => r
                .details
                .iter()
                .filter(|d| d.asserted)
                .all(|d| d.slack >= -t),
            None => r.pass,
        };
        Record {
            name: r.name.clone(),
            instance,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            pass,
            seed: r.seed,
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("instance".into(), round_value(&self.instance));
        m.insert("lhs".into(), number(self.lhs));
        m.insert("rhs".into(), number(self.rhs));
        m.insert("slack".into(), number(self.slack));
        m.insert("pass".into(), Value::Bool(self.pass));
        m.insert("seed".into(), Value::Number(self.seed.into()));
        Value::Object(m)
    }
}

/// `x` rounded to 12 significant digits; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format_sig(x).parse().expect("format_sig yields a float");
    Number::from_f64(r).map_or(Value::Null, Value::Number)
}

/// Rounds every non-integral number inside a JSON value.
pub fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => number(n.as_f64().expect("f64")),
        Value::Array(a) => Value::Array(a.iter().map(round_value).collect()),
        Value::Object(m) => {
            Value::Object(m.iter().map(|(k, x)| (k.clone(), round_value(x))).collect())
        }
        other => other.clone(),
    }
}

fn text_number(x: f64) -> String {
    if x.is_finite() {
        number(x).to_string()
    } else {
        x.to_string()
    }
}

/// Encodes records in the requested format.
pub fn render(records: &[Record], format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            let mut s = String::new();
            for r in records {
                s.push_str(&serde_json::to_string(&r.to_json()).map_err(|e| e.to_string())?);
                s.push('\n');
            }
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "lhs", "rhs", "slack", "pass", "seed", "instance"])
                .map_err(|e| e.to_string())?;
            for r in records {
                let instance =
                    serde_json::to_string(&round_value(&r.instance)).map_err(|e| e.to_string())?;
                w.write_record([
                    r.name.clone(),
                    text_number(r.lhs),
                    text_number(r.rhs),
                    text_number(r.slack),
                    r.pass.to_string(),
                    r.seed.to_string(),
                    instance,
                ])
                .map_err(|e| e.to_string())?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
        }
        Format::Text => {
            let mut s = String::new();
            for r in records {
                let status = if r.pass { "pass" } else { "FAIL" };
                s.push_str(&format!(
                    "{} [{status}] lhs={} rhs={} slack={} seed={}\n",
                    r.name,
                    text_number(r.lhs),
                    text_number(r.rhs),
                    text_number(r.slack),
                    r.seed
                ));
                if let Value::Object(m) = round_value(&r.instance) {
                    for (k, v) in m {
                        s.push_str(&format!("  {k}: {v}\n"));
                    }
                }
            }
            Ok(s)
        }
    }
}
