use std::time::Instant;

use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// Everything a command prints. `violations` decides the exit code.
pub struct Report {
    pub command: Vec<String>,
    pub results: Value,
    pub violations: usize,
    pub started: Instant,
    pub timing: bool,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let mut out = Map::new();
        out.insert("command".into(), json!(self.command.join(" ")));
        out.insert("results".into(), self.results.clone());
        out.insert("violations".into(), json!(self.violations));
        out.insert("passed".into(), json!(self.violations == 0));
        if self.timing {
            out.insert("elapsed_ms".into(), json!(self.started.elapsed().as_millis() as u64));
        }
        Value::Object(out)
    }

    pub fn render(&self, format: Format) -> String {
        let v = self.to_value();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Tsv => {
                let mut lines = Vec::new();
                flatten("", &v, &mut lines);
                lines.into_iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
            }
        }
    }
}

/// One `path<TAB>value` line per leaf, so both renderings carry the same data.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(a) => {
            if a.is_empty() {
                out.push((prefix.to_string(), "[]".into()));
            }
            for (i, v) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_lists_every_leaf() {
        let r = Report {
            command: vec!["density".into()],
            results: json!({"table": [{"n": 2, "ell": "1/4"}], "empty": []}),
            violations: 0,
            started: Instant::now(),
            timing: false,
        };
        let tsv = r.render(Format::Tsv);
        assert_eq!(
            tsv,
            "command\tdensity\npassed\ttrue\nresults.empty\t[]\nresults.table.0.ell\t1/4\nresults.table.0.n\t2\nviolations\t0\n"
        );
        assert!(r.render(Format::Json).contains("\"ell\": \"1/4\""));
    }
}
