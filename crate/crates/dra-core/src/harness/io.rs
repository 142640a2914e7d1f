//! Feature-file ingestion and emission.
//!
//! Dataset CSV format: header `set_hint,class_id,f0,...,f{d-1}`, one sample
//! per row, UTF-8, `.` decimal, comma separator. `set_hint` is an optional
//! grouping hint, ignored by the random-split protocol but preserved on
//! load.

use crate::setcore::SamplePools;
use crate::{Error, Result};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Pools parsed from a feature CSV. `class_labels[i]` is the original file
/// label of pool `i`; pools are indexed by ascending label order.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub d: usize,
    pub class_labels: Vec<u64>,
    pub pools: SamplePools,
    /// One hint per sample, parallel to `pools`.
    pub set_hints: Vec<Vec<String>>,
}

impl LoadedDataset {
    /// Class count.
    pub fn c(&self) -> usize {
        self.pools.len()
    }
}

/// Loads a dataset CSV, validating the header and a uniform feature
/// dimension across rows.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<LoadedDataset> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = header?;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 3 || cols[0] != "set_hint" || cols[1] != "class_id" {
        return Err(Error::Parse {
            line: 1,
            message: "header must be 'set_hint,class_id,f0,...'".into(),
        });
    }
    let d = cols.len() - 2;
    for (i, name) in cols[2..].iter().enumerate() {
        if *name != format!("f{i}") {
            return Err(Error::Parse {
                line: 1,
                message: format!("feature column {} must be named f{i}", i + 2),
            });
        }
    }

    let mut by_class: std::collections::BTreeMap<u64, (Vec<Vec<f64>>, Vec<String>)> =
        std::collections::BTreeMap::new();
    let mut rows = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != d + 2 {
            return Err(Error::InconsistentDimension {
                line: lineno,
                expected: d,
                got: fields.len().saturating_sub(2),
            });
        }
        let class: u64 = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad class id '{}'", fields[1]),
        })?;
        let mut sample = Vec::with_capacity(d);
        for f in &fields[2..] {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature value '{f}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite feature value '{f}'"),
                });
            }
            sample.push(v);
        }
        let entry = by_class.entry(class).or_default();
        entry.0.push(sample);
        entry.1.push(fields[0].to_string());
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no samples".into(),
        });
    }
    let class_labels: Vec<u64> = by_class.keys().copied().collect();
    let mut pools = Vec::with_capacity(by_class.len());
    let mut set_hints = Vec::with_capacity(by_class.len());
    for (_, (samples, hints)) in by_class {
        pools.push(samples);
        set_hints.push(hints);
    }
    Ok(LoadedDataset {
        d,
        class_labels,
        pools,
        set_hints,
    })
}

/// Writes per-class pools as a dataset CSV. Pool index is used as the class
/// id and the hint column is left empty.
pub fn save_dataset(path: impl AsRef<Path>, pools: &SamplePools) -> Result<()> {
    let d = pools
        .iter()
        .flat_map(|p| p.first())
        .map(Vec::len)
        .next()
        .ok_or_else(|| Error::Config("cannot save an empty dataset".into()))?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
    write!(out, "set_hint,class_id")?;
    for i in 0..d {
        write!(out, ",f{i}")?;
    }
    writeln!(out)?;
    for (class, pool) in pools.iter().enumerate() {
        for sample in pool {
            write!(out, ",{class}")?;
            for v in sample {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}
