use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::space::{encoded_key, ConfigSpace, Configuration};

pub const LATENCY_COLUMN: &str = "latency_s";
pub const ENERGY_COLUMN: &str = "energy_j";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub config: Configuration,
    pub latency_s: f64,
    pub energy_j: f64,
}

impl TraceRow {
    /// Average power in watts.
    pub fn avg_power(&self) -> f64 {
        self.energy_j / self.latency_s
    }
}

/// Recorded final latency and energy for every candidate of a pool.
#[derive(Debug, Clone)]
pub struct WorkloadTrace {
    space: ConfigSpace,
    rows: Vec<TraceRow>,
    index: HashMap<Vec<u64>, usize>,
}

impl WorkloadTrace {
    pub fn new(space: ConfigSpace, rows: Vec<TraceRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidTrace("no rows".into()));
        }
        let mut index = HashMap::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if !(row.latency_s > 0.0 && row.latency_s.is_finite()) {
                return Err(Error::InvalidTrace(format!("row {i}: latency must be positive")));
            }
            if !(row.energy_j > 0.0 && row.energy_j.is_finite()) {
                return Err(Error::InvalidTrace(format!("row {i}: energy must be positive")));
            }
            let key = encoded_key(&space.encode(&row.config)?);
            if index.insert(key, i).is_some() {
                return Err(Error::InvalidTrace(format!("row {i}: duplicate configuration")));
            }
        }
        Ok(WorkloadTrace { space, rows, index })
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn configs(&self) -> Vec<Configuration> {
        self.rows.iter().map(|r| r.config.clone()).collect()
    }

    pub fn find(&self, config: &Configuration) -> Option<usize> {
        let key = encoded_key(&self.space.encode(config).ok()?);
        self.index.get(&key).copied()
    }

    pub fn median_latency(&self) -> f64 {
        let mut l: Vec<f64> = self.rows.iter().map(|r| r.latency_s).collect();
        l.sort_by(f64::total_cmp);
        let n = l.len();
        if n % 2 == 1 {
            l[n / 2]
        } else {
            0.5 * (l[n / 2 - 1] + l[n / 2])
        }
    }

    pub fn read_from<R: Read>(space: ConfigSpace, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let header = rdr.headers()?.clone();
        let expected: Vec<&str> = space.names().chain([LATENCY_COLUMN, ENERGY_COLUMN]).collect();
        let got: Vec<&str> = header.iter().collect();
        if got != expected {
            return Err(Error::InvalidTrace(format!(
                "header {got:?} does not match space columns {expected:?}"
            )));
        }
        let p = space.dim();
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut values = Vec::with_capacity(p);
            for (spec, field) in space.params().iter().zip(rec.iter()) {
                values.push(spec.parse_value(field)?);
            }
            let num = |i: usize, name: &str| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidTrace(format!("row {line}: bad {name} `{}`", &rec[i])))
            };
            rows.push(TraceRow {
                config: Configuration::new(values),
                latency_s: num(p, LATENCY_COLUMN)?,
                energy_j: num(p + 1, ENERGY_COLUMN)?,
            });
        }
        Self::new(space, rows)
    }

    pub fn load(space: ConfigSpace, path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(space, file).map_err(|e| match e {
            Error::Io { .. } => e,
            other => Error::Parse {
                path: path.to_path_buf(),
                msg: other.to_string(),
            },
        })
    }

    /// Values are written in Rust's shortest round-trip decimal form, so a
    /// save/load cycle reproduces every float bit for bit.
    pub fn write_to<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<&str> = self
            .space
            .names()
            .chain([LATENCY_COLUMN, ENERGY_COLUMN])
            .collect();
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.config.values.iter().map(|v| v.to_string()).collect();
            rec.push(row.latency_s.to_string());
            rec.push(row.energy_j.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<trace>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(file)
    }
}
