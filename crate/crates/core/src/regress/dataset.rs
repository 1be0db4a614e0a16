use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::discovery::{FilterKind, GeneratorKind};
use crate::term::Domain;

/// One trajectory's architecture and fitted exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub domain: Domain,
    pub generator: GeneratorKind,
    pub filter: FilterKind,
    pub depth: u32,
    pub batch_size: usize,
    pub seed: u64,
    pub b: f64,
    pub degenerate: bool,
}

/// Optional feature blocks beyond generator, filter, depth and batch size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub domain: bool,
    pub seed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn feature_names(opts: FeatureOptions) -> Vec<String> {
    let mut names: Vec<String> = GeneratorKind::ALL.iter().map(|g| format!("generator={g}")).collect();
    names.extend(FilterKind::ALL.iter().map(|f| format!("filter={f}")));
    names.push("depth".into());
    names.push("batch_size".into());
    if opts.domain {
        names.extend(Domain::ALL.iter().map(|d| format!("domain={d}")));
    }
    if opts.seed {
        names.push("seed".into());
    }
    names
}

fn one_hot<T: PartialEq>(all: &[T], v: &T) -> Vec<f64> {
    all.iter().map(|x| if x == v { 1.0 } else { 0.0 }).collect()
}

impl DatasetRow {
    pub fn features(&self, opts: FeatureOptions) -> Vec<f64> {
        let mut x = one_hot(&GeneratorKind::ALL, &self.generator);
        x.extend(one_hot(&FilterKind::ALL, &self.filter));
        x.push(self.depth as f64);
        x.push(self.batch_size as f64);
        if opts.domain {
            x.extend(one_hot(&Domain::ALL, &self.domain));
        }
        if opts.seed {
            x.push(self.seed as f64);
        }
        x
    }

    pub fn matrix(rows: &[DatasetRow], opts: FeatureOptions) -> (Vec<Vec<f64>>, Vec<f64>) {
        (rows.iter().map(|r| r.features(opts)).collect(), rows.iter().map(|r| r.b).collect())
    }

    pub fn write_csv<W: Write>(rows: &[DatasetRow], w: W) -> Result<(), DatasetError> {
        let mut wr = csv::Writer::from_writer(w);
        for r in rows {
            wr.serialize(r).map_err(|e| DatasetError::Csv { line: 0, message: e.to_string() })?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Vec<DatasetRow>, DatasetError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        rdr.deserialize()
            .map(|row| {
                row.map_err(|e| DatasetError::Csv {
                    line: e.position().map_or(0, |p| p.line()),
                    message: e.to_string(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> DatasetRow {
        DatasetRow {
            domain: Domain::Bool,
            generator: GeneratorKind::Freq,
            filter: FilterKind::Novelty,
            depth: 3,
            batch_size: 60,
            seed: 4,
            b: 0.5,
            degenerate: false,
        }
    }

    #[test]
    fn one_hot_layout() {
        let x = row().features(FeatureOptions::default());
        assert_eq!(x, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 3.0, 60.0]);
        let full = FeatureOptions { domain: true, seed: true };
        let x = row().features(full);
        assert_eq!(x.len(), feature_names(full).len());
        assert_eq!(&x[8..], &[0.0, 1.0, 0.0, 4.0]);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row(), DatasetRow { domain: Domain::List, degenerate: true, ..row() }];
        let mut buf = Vec::new();
        DatasetRow::write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("domain,generator,filter,depth,batch_size,seed,b,degenerate\nbool,freq,novelty,3,60,4,0.5,false\n"));
        assert_eq!(DatasetRow::read_csv(buf.as_slice()).unwrap(), rows);
    }
}
