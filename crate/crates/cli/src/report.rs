//! Machine-readable report serialization: JSON with lexicographic key order
//! and 17-significant-digit numbers, and RFC-4180-style CSV. Both embed the
//! config hash, seed, and module versions so every artifact is traceable to
//! the exact inputs that produced it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Provenance block shared by every report.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub versions: String,
}

impl Provenance {
    pub fn fields(&self) -> Vec<(&'static str, Json)> {
        vec![
            ("config_sha256", Json::Str(self.config_sha256.clone())),
            ("seed", Json::Int(self.seed as i64)),
            ("versions", Json::Str(self.versions.clone())),
        ]
    }
}

#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<String, Json>),
}

impl Json {
    pub fn obj(fields: impl IntoIterator<Item = (impl Into<String>, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(v) => out.push_str(&fmt_f64(*v)),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            // BTreeMap iterates in key order, which gives the stable
            // lexicographic layout for free.
            Json::Obj(map) => {
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    Json::Str(k.clone()).write(out);
                    out.push(':');
                    v.write(out);
                }
                out.push('}');
            }
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out.push('\n');
        out
    }
}

/// 17 significant digits: enough to round-trip any f64 bit pattern.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "\"nan\"".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    format!("{v:.16e}")
}

/// CSV with a leading provenance comment, a header row, and CRLF endings.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(provenance: &Provenance, header: &[&str]) -> Self {
        let mut text = format!(
            "# config_sha256={} seed={} versions={}\r\n",
            provenance.config_sha256, provenance.seed, provenance.versions
        );
        text.push_str(&header.join(","));
        text.push_str("\r\n");
        Csv { text, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "csv row width mismatch");
        let quoted: Vec<String> = fields
            .iter()
            .map(|f| {
                if f.contains(',') || f.contains('"') || f.contains('\n') {
                    format!("\"{}\"", f.replace('"', "\"\""))
                } else {
                    f.clone()
                }
            })
            .collect();
        self.text.push_str(&quoted.join(","));
        self.text.push_str("\r\n");
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// CSV-safe numeric field (same 17-significant-digit convention as JSON).
pub fn num_field(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_lexicographic() {
        let j = Json::obj([("zeta", Json::Int(1)), ("alpha", Json::Bool(true))]);
        assert_eq!(j.render(), "{\"alpha\":true,\"zeta\":1}\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2e-300, -123456.789, std::f64::consts::PI] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let p = Provenance {
            config_sha256: "ab".into(),
            seed: 3,
            versions: "x/1".into(),
        };
        let mut csv = Csv::new(&p, &["a", "b"]);
        csv.row(&["plain".into(), "with,comma".into()]);
        let text = csv.finish();
        assert!(text.ends_with("plain,\"with,comma\"\r\n"));
        assert!(text.starts_with("# config_sha256=ab seed=3 versions=x/1\r\n"));
    }
}
