//! Uniformly sampled power traces and their CSV representation.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TraceError;

pub const MIN_SAMPLES: usize = 16;
const DT_REL_TOL: f64 = 1e-9;

/// Run identifiers attached to a trace.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub run_id: String,
    pub n_atoms: Option<f64>,
    pub delta_p: Option<f64>,
    pub shot: Option<usize>,
}

/// Power samples on a uniform time grid. Times in seconds, power in watts.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    t: Vec<f64>,
    p: Vec<f64>,
    dt: f64,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn new(t: Vec<f64>, p: Vec<f64>) -> Result<Self, TraceError> {
        if t.len() != p.len() {
            return Err(TraceError::LengthMismatch { times: t.len(), powers: p.len() });
        }
        if t.len() < MIN_SAMPLES {
            return Err(TraceError::TooShort(t.len()));
        }
        if t.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(TraceError::NonFinite);
        }
        let n = t.len();
        let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
        if !(dt > 0.0) {
            return Err(TraceError::NonUniform { index: 1 });
        }
        for i in 1..n {
            let step = t[i] - t[i - 1];
            if (step - dt).abs() > DT_REL_TOL * dt.max(t[i].abs() * f64::EPSILON / DT_REL_TOL) {
                return Err(TraceError::NonUniform { index: i });
            }
        }
        Ok(Self { t, p, dt, meta: TraceMeta::default() })
    }

    /// Builds the time axis `t0 + i·dt` for the given samples.
    pub fn uniform(t0: f64, dt: f64, p: Vec<f64>) -> Result<Self, TraceError> {
        let t = (0..p.len()).map(|i| t0 + i as f64 * dt).collect();
        Self::new(t, p)
    }

    pub fn with_meta(mut self, meta: TraceMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn power(&self) -> &[f64] {
        &self.p
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Same samples on a time axis shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            t: self.t.iter().map(|t| t + offset).collect(),
            p: self.p.clone(),
            dt: self.dt,
            meta: self.meta.clone(),
        }
    }

    /// Same time axis with every sample multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self { t: self.t.clone(), p: self.p.iter().map(|p| p * k).collect(), dt: self.dt, meta: self.meta.clone() }
    }

    /// Reads `time_s,power_w`, or `time_s,power_v` when `volts_per_watt` is
    /// given. Lines starting with `#` are ignored.
    pub fn from_csv_reader<R: Read>(reader: R, volts_per_watt: Option<f64>) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let t_col = col("time_s").ok_or(TraceError::MissingColumn("time_s"))?;
        let (p_col, scale) = match (col("power_w"), col("power_v"), volts_per_watt) {
            (Some(c), _, _) => (c, 1.0),
            (None, Some(c), Some(vpw)) if vpw > 0.0 && vpw.is_finite() => (c, 1.0 / vpw),
            (None, Some(_), _) => return Err(TraceError::MissingConversion),
            (None, None, _) => return Err(TraceError::MissingColumn("power_w")),
        };
        let (mut t, mut p) = (Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |c: usize| -> Result<f64, TraceError> {
                rec.get(c)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or(TraceError::BadRecord { line: line + 2 })
            };
            t.push(field(t_col)?);
            p.push(field(p_col)? * scale);
        }
        Self::new(t, p)
    }

    pub fn read_csv(path: &Path, volts_per_watt: Option<f64>) -> Result<Self, TraceError> {
        let file = std::fs::File::open(path).map_err(|e| TraceError::Io(path.display().to_string(), e.to_string()))?;
        Self::from_csv_reader(std::io::BufReader::new(file), volts_per_watt)
    }

    /// Writes the `time_s,power_w` format, preceded by `header` lines as
    /// `#` comments.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "time_s,power_w")?;
        for (t, p) in self.t.iter().zip(&self.p) {
            writeln!(out, "{t:e},{p:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(Trace::uniform(0.0, 1.0, vec![0.0; 15]), Err(TraceError::TooShort(15))));
        assert!(Trace::uniform(0.0, 1e-9, vec![0.0; 16]).is_ok());
        let mut t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        t[7] += 1e-3;
        assert!(matches!(Trace::new(t, vec![0.0; 20]), Err(TraceError::NonUniform { .. })));
        assert!(Trace::new(vec![0.0; 20], vec![0.0; 19]).is_err());
        assert!(Trace::uniform(0.0, 1.0, vec![f64::NAN; 20]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p: Vec<f64> = (0..32).map(|i| (i as f64 * 0.3).sin() * 1e-6).collect();
        let tr = Trace::uniform(-1e-7, 1e-9, p).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &["run demo".into()]).unwrap();
        let back = Trace::from_csv_reader(buf.as_slice(), None).unwrap();
        assert_eq!(back.power(), tr.power());
        assert_eq!(back.times(), tr.times());
    }

    #[test]
    fn detector_volts() {
        let mut s = String::from("# scope export\ntime_s,power_v\n");
        for i in 0..16 {
            s.push_str(&format!("{},{}\n", i as f64 * 1e-9, 2.0));
        }
        let tr = Trace::from_csv_reader(s.as_bytes(), Some(4e3)).unwrap();
        assert_eq!(tr.power()[0], 2.0 / 4e3);
        assert!(matches!(Trace::from_csv_reader(s.as_bytes(), None), Err(TraceError::MissingConversion)));
    }
}
