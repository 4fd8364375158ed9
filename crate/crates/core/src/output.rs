//! File formats: CSV with 17-significant-digit reals, plain-text PPM (P3),
//! flat JSON summaries and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::pendulum::{Attractor, BasinImage};

pub const SCHEMA_VERSION: u32 = 1;

/// `printf("%.17g")`: 17 significant digits, trailing zeros trimmed,
/// exponent form outside `1e-4 ≤ |x| < 1e17`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Write a CSV with a header line and LF line endings.
pub fn write_csv<I, R>(path: &Path, header: &str, rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<str>,
{
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        w.write_all(row.as_ref().as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn palette(a: Attractor) -> [u8; 3] {
    match a {
        Attractor::Magnet(1) => [255, 0, 0],
        Attractor::Magnet(2) => [0, 255, 0],
        Attractor::Magnet(3) => [0, 0, 255],
        _ => [0, 0, 0],
    }
}

/// Plain-text portable pixmap, one pixel per line.
pub fn basin_ppm(image: &BasinImage) -> String {
    let mut out = String::with_capacity(16 + image.cells.len() * 8);
    let _ = write!(out, "P3\n{} {}\n255\n", image.width, image.height);
    for &cell in &image.cells {
        let [r, g, b] = palette(cell);
        let _ = writeln!(out, "{r} {g} {b}");
    }
    out
}

/// Flat JSON object with `schema_version` first.
pub fn flat_json(entries: impl IntoIterator<Item = (String, Value)>) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    for (k, v) in entries {
        map.insert(k, v);
    }
    Value::Object(map)
}

pub fn write_json(path: &Path, value: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Everything needed to rerun a subcommand and reproduce its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub toolkit_version: String,
    pub outputs: Vec<String>,
    pub threads: Option<usize>,
    pub wall_clock_seconds: f64,
}
