//! Deterministic machine-readable writers: every float is printed with
//! 17 significant decimal digits so binary64 values round-trip exactly
//! and repeated runs produce byte-identical artifacts.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// 17-significant-digit decimal rendering of a float (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.16e}")
}

/// Minimal JSON value for the flat artifacts this crate emits. Floats
/// are rendered through [`fmt_f64`] as JSON numbers.
pub enum Json {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Num(x) => out.push_str(&fmt_f64_json(*x)),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Str(s) => {
                let _ = write!(out, "\"{}\"", escape(s));
            }
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    let _ = write!(out, "\"{}\": ", escape(key));
                    value.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

/// JSON numbers cannot be nan/inf; encode those as strings.
fn fmt_f64_json(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        format!("\"{}\"", fmt_f64(x))
    }
}

fn escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' => vec!['\\', '"'],
            '\\' => vec!['\\', '\\'],
            '\n' => vec!['\\', 'n'],
            c => vec![c],
        })
        .collect()
}

pub fn obj(fields: Vec<(&str, Json)>) -> Json {
    Json::Obj(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// CSV writer: header plus rows of 17-digit floats.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// FNV-1a over the canonical parameter string; deterministic across
/// platforms and releases (unlike the std hasher).
pub fn fnv1a_hex(text: &str) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Accumulates one run's parameters and artifacts, then writes the
/// manifest. `wall_time_seconds` varies between runs by nature; the
/// byte-identical guarantee covers the data artifacts, not the manifest.
pub struct RunManifest {
    subcommand: String,
    parameters: Vec<(String, String)>,
    artifacts: Vec<PathBuf>,
    started: Instant,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters: Vec::new(),
            artifacts: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.push((key.to_string(), value.to_string()));
    }

    pub fn write_artifact(&mut self, path: &Path, bytes: &[u8]) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut f = fs::File::create(path)?;
        f.write_all(bytes)?;
        self.artifacts.push(path.to_path_buf());
        Ok(())
    }

    /// Writes `<subcommand>.manifest.json` next to the artifacts.
    pub fn finish(self, dir: &Path) -> std::io::Result<()> {
        let canonical: String = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v};"))
            .collect();
        let manifest = obj(vec![
            ("subcommand", Json::Str(self.subcommand.clone())),
            (
                "parameters",
                Json::Obj(
                    self.parameters
                        .iter()
                        .map(|(k, v)| (k.clone(), Json::Str(v.clone())))
                        .collect(),
                ),
            ),
            (
                "artifact_paths",
                Json::Arr(
                    self.artifacts
                        .iter()
                        .map(|p| Json::Str(p.display().to_string()))
                        .collect(),
                ),
            ),
            (
                "versions",
                obj(vec![
                    ("tool", Json::Str(env!("CARGO_PKG_VERSION").to_string())),
                    ("config_hash", Json::Str(fnv1a_hex(&canonical))),
                ]),
            ),
            (
                "wall_time_seconds",
                Json::Num(self.started.elapsed().as_secs_f64()),
            ),
        ]);
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.manifest.json", self.subcommand));
        fs::write(path, manifest.render() + "\n")
    }
}

/// Field binary format: `[u32 np][u32 ns][f64 spacing_p][f64 spacing_s]`
/// then `np * ns` node values, all little-endian, row-major with the
/// secondary index fastest.
pub fn field_binary(np: usize, ns: usize, sp: f64, ss: f64, values: &[f64]) -> Vec<u8> {
    assert_eq!(values.len(), np * ns);
    let mut bytes = Vec::with_capacity(24 + 8 * values.len());
    bytes.extend_from_slice(&(np as u32).to_le_bytes());
    bytes.extend_from_slice(&(ns as u32).to_le_bytes());
    bytes.extend_from_slice(&sp.to_le_bytes());
    bytes.extend_from_slice(&ss.to_le_bytes());
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}

/// Binary PGM (P5) bitmap: one byte per cell, 255 marks the phase.
pub fn pgm_p5(n: usize, phase: &[bool]) -> Vec<u8> {
    let mut bytes = format!("P5\n{n} {n}\n255\n").into_bytes();
    // Image rows run top to bottom; the grid's y axis runs upward.
    for iy in (0..n).rev() {
        for ix in 0..n {
            bytes.push(if phase[iy * n + ix] { 255 } else { 0 });
        }
    }
    bytes
}
