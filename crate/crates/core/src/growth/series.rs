use std::io::{Read, Write};

use crate::discovery::Trajectory;

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("t and n have different lengths ({t} vs {n})")]
    Length { t: usize, n: usize },
    #[error("t must be positive and strictly increasing (index {0})")]
    TimeAxis(usize),
    #[error("n must be finite and non-negative (index {0})")]
    Value(usize),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cumulative counts `n` observed at times `t`.
///
/// Noisy synthetic and bootstrap series need not be monotone in `n`, so only
/// the time axis and finiteness are enforced.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSeries {
    t: Vec<f64>,
    n: Vec<f64>,
}

impl GrowthSeries {
    pub fn new(t: Vec<f64>, n: Vec<f64>) -> Result<Self, SeriesError> {
        if t.len() != n.len() {
            return Err(SeriesError::Length { t: t.len(), n: n.len() });
        }
        for i in 0..t.len() {
            if !(t[i].is_finite() && t[i] > 0.0) || (i > 0 && t[i] <= t[i - 1]) {
                return Err(SeriesError::TimeAxis(i));
            }
            if !(n[i].is_finite() && n[i] >= 0.0) {
                return Err(SeriesError::Value(i));
            }
        }
        Ok(GrowthSeries { t, n })
    }

    /// `t = 1, 2, ..., len`.
    pub fn from_counts<I: IntoIterator<Item = f64>>(n: I) -> Result<Self, SeriesError> {
        let n: Vec<f64> = n.into_iter().collect();
        let t = (1..=n.len()).map(|i| i as f64).collect();
        Self::new(t, n)
    }

    pub fn from_trajectory(traj: &Trajectory) -> Self {
        Self::from_counts(traj.sizes.iter().map(|&s| s as f64)).expect("epoch counts form a valid series")
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.n.windows(2).all(|w| w[0] <= w[1])
    }

    /// The first `len` points.
    pub fn prefix(&self, len: usize) -> GrowthSeries {
        let len = len.min(self.len());
        GrowthSeries { t: self.t[..len].to_vec(), n: self.n[..len].to_vec() }
    }

    /// Same time axis, new values.
    pub fn with_values(&self, n: Vec<f64>) -> Result<GrowthSeries, SeriesError> {
        Self::new(self.t.clone(), n)
    }

    /// Reads a two-column `t,n` CSV with a header row. Extra columns are ignored.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, SeriesError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let (mut t, mut n) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| SeriesError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |i: usize| -> Result<f64, SeriesError> {
                let s = rec.get(i).ok_or_else(|| SeriesError::Csv { line, message: "expected columns t,n".into() })?;
                s.parse().map_err(|_| SeriesError::Csv { line, message: format!("not a number: `{s}`") })
            };
            t.push(field(0)?);
            n.push(field(1)?);
        }
        Self::new(t, n)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,n")?;
        for (t, n) in self.t.iter().zip(&self.n) {
            writeln!(w, "{t},{n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_time_axis() {
        assert!(GrowthSeries::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(GrowthSeries::new(vec![0.0], vec![1.0]).is_err());
        assert!(GrowthSeries::new(vec![1.0], vec![-1.0]).is_err());
        assert!(GrowthSeries::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = GrowthSeries::new(vec![1.0, 2.0, 3.5], vec![0.0, 4.25, 9.0]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "t,n\n1,0\n2,4.25\n3.5,9\n");
        assert_eq!(GrowthSeries::read_csv(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = GrowthSeries::read_csv("t,n\n1,2\n2,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, SeriesError::Csv { line: 3, .. }), "{err}");
    }
}
