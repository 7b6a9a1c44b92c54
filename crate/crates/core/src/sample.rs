//! Row-major observation matrices and their CSV form.
//!
//! CSV layout: header `t,c1,…,cd`, then one row per time index `t = 1, 2, …`
//! with every value written to 17 significant digits.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    ncols: usize,
    data: Vec<f64>,
    labels: Vec<String>,
}

fn default_labels(ncols: usize) -> Vec<String> {
    (1..=ncols).map(|j| format!("c{j}")).collect()
}

impl SampleMatrix {
    pub fn from_rows(ncols: usize, data: Vec<f64>) -> Result<Self> {
        if ncols == 0 {
            return Err(Error::invalid("sample matrix needs at least one column"));
        }
        if data.len() % ncols != 0 {
            return Err(Error::invalid(format!(
                "{} values do not fill rows of width {ncols}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sample entries must be finite"));
        }
        Ok(SampleMatrix {
            ncols,
            data,
            labels: default_labels(ncols),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn empty(ncols: usize) -> Self {
        SampleMatrix {
            ncols,
            data: Vec::new(),
            labels: default_labels(ncols),
        }
    }

    pub fn nrows(&self) -> usize {
        self.data.len() / self.ncols
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.ncols)
    }

    /// All entries in row-major order.
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn row_maxima(&self) -> Vec<f64> {
        self.rows()
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// Every `step`-th row starting from the first.
    pub fn thinned(&self, step: usize) -> SampleMatrix {
        let step = step.max(1);
        let data = self.rows().step_by(step).flatten().copied().collect();
        SampleMatrix {
            ncols: self.ncols,
            data,
            labels: self.labels.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(self.ncols + 1);
        for (t, row) in self.rows().enumerate() {
            record.clear();
            record.push((t + 1).to_string());
            record.extend(row.iter().map(|v| format!("{v:.16e}")));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0).map(str::trim) != Some("t") || header.len() < 2 {
            return Err(Error::Parse("CSV header must be `t,c1,...,cd`".into()));
        }
        let labels: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let ncols = labels.len();
        let mut data = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            for field in record.iter().skip(1) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: `{field}` is not a number", i + 1)))?;
                data.push(v);
            }
        }
        SampleMatrix::from_rows(ncols, data)?.with_labels(labels)
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        SampleMatrix::read_csv(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let m = SampleMatrix::from_rows(2, vec![0.1, -1.0 / 3.0, 99.49916247955465, 1e-300]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,c1,c2\n1,"));
        assert_eq!(SampleMatrix::read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn csv_errors() {
        assert!(SampleMatrix::read_csv("x,c1\n1,2\n".as_bytes()).is_err());
        assert!(SampleMatrix::read_csv("t,c1\n1,abc\n".as_bytes()).is_err());
        assert!(SampleMatrix::read_csv("t,c1,c2\n1,2\n".as_bytes()).is_err());
        assert!(SampleMatrix::read_csv("t,c1\n1,inf\n".as_bytes()).is_err());
        assert!(SampleMatrix::read_csv("t\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn shape_checks() {
        assert!(SampleMatrix::from_rows(0, vec![]).is_err());
        assert!(SampleMatrix::from_rows(2, vec![1.0]).is_err());
        let m = SampleMatrix::from_rows(2, vec![1.0, 5.0, 3.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.row_maxima(), vec![5.0, 3.0, 0.0]);
        assert_eq!(m.thinned(2).nrows(), 2);
        assert_eq!(m.column(1), vec![5.0, 2.0, 0.0]);
    }
}
