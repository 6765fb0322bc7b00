//! Atomic file output and CSV/JSON rendering with a provenance header.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header lines written at the top of every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub manifest_sha256: String,
}

impl Provenance {
    pub fn new(manifest_sha256: &str) -> Self {
        Self { tool: "mcn", version: TOOL_VERSION, manifest_sha256: manifest_sha256.to_string() }
    }

    pub fn header_lines(&self) -> Vec<String> {
        vec![format!("{} {} manifest-sha256 {}", self.tool, self.version, self.manifest_sha256)]
    }
}

/// Writes through a temporary file in the target directory, then renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

/// Shortest round-trip representation; scientific outside [1e-3, 1e6).
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-3..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A CSV table assembled in memory.
#[derive(Clone, Debug)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, prov: &Provenance) -> String {
        let mut out = String::new();
        for line in prov.header_lines() {
            let _ = writeln!(out, "# {line}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8"));
        out
    }
}

/// JSON document `{"provenance": …, "<key>": value}`.
pub fn render_json<T: Serialize>(prov: &Provenance, key: &str, value: &T) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("provenance".into(), serde_json::to_value(prov).expect("serializable provenance"));
    doc.insert(key.into(), serde_json::to_value(value).expect("serializable output"));
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(2.18e-7), "2.18e-7");
        assert_eq!(fmt_f64(175.6), "175.6");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn table_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let s = t.render(&Provenance::new("ab12"));
        assert!(s.starts_with("# mcn "));
        assert!(s.contains("manifest-sha256 ab12"));
        assert!(s.ends_with("a,b\n1,\"x,y\"\n"));
    }
}
