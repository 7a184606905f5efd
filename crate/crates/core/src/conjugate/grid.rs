use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::oracle::FunctionOracle;
use crate::point::linspace;

/// A sampled 1-D function: strictly increasing abscissae with finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::contract(format!(
                "grid has {} abscissae but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::contract("grid function needs at least 2 samples"));
        }
        if xs.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::contract("grid function samples must be finite"));
        }
        if let Some(w) = xs.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::contract(format!(
                "abscissae not strictly increasing at index {}",
                w + 1
            )));
        }
        Ok(GridFunction { xs, values })
    }

    /// Samples a 1-D oracle at `n` evenly spaced points of `[lo, hi]`.
    pub fn sample(oracle: &FunctionOracle, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if oracle.dim() != 1 {
            return Err(Error::UnsupportedDimension(oracle.dim()));
        }
        let xs = linspace(lo, hi, n);
        let values = xs
            .iter()
            .map(|x| oracle.value(&[*x]))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(xs, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes `x,value` CSV. Floats use the shortest round-trip representation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "value"])?;
        for (x, v) in self.xs.iter().zip(&self.values) {
            w.write_record([format!("{x:?}"), format!("{v:?}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::contract(format!(
                "expected header `x,value`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i].trim().parse::<f64>().map_err(|_| {
                    Error::contract(format!("row {}: bad number `{}`", line + 2, &record[i]))
                })
            };
            xs.push(parse(0)?);
            values.push(parse(1)?);
        }
        GridFunction::new(xs, values)
    }
}
