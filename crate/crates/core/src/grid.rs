//! Sampling grids over the two standard charts of the rational curve domain.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Coordinate chart on the domain sphere: `Zero` is the affine chart z,
/// `Infinity` the chart w = 1/z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    Zero,
    Infinity,
}

impl Serialize for Chart {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Chart::Zero => s.serialize_u8(0),
            Chart::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Chart {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u8),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0) => Ok(Chart::Zero),
            Raw::Text(t) if t == "0" => Ok(Chart::Zero),
            Raw::Text(t) if t == "inf" => Ok(Chart::Infinity),
            _ => Err(D::Error::custom("chart must be 0 or \"inf\"")),
        }
    }
}

/// Square sampling grid, applied on each requested chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub samples: usize,
    pub charts: Vec<Chart>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 1.5,
            samples: 41,
            charts: vec![Chart::Zero, Chart::Infinity],
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 9 {
            return Err(Error::BadConfig(format!(
                "grid needs at least 9 samples per side, got {}",
                self.samples
            )));
        }
        if self.half_width <= 0.0 || !self.half_width.is_finite() {
            return Err(Error::BadConfig("grid half-width must be positive".into()));
        }
        if self.charts.is_empty() {
            return Err(Error::BadConfig("grid needs at least one chart".into()));
        }
        Ok(())
    }

    pub fn axis(&self) -> Vec<f64> {
        let n = self.samples;
        let hw = self.half_width;
        (0..n)
            .map(|k| -hw + 2.0 * hw * (k as f64) / ((n - 1) as f64))
            .collect()
    }

    /// All grid points of one chart, row-major.
    pub fn points(&self) -> Vec<Complex64> {
        let axis = self.axis();
        let mut out = Vec::with_capacity(axis.len() * axis.len());
        for y in &axis {
            for x in &axis {
                out.push(Complex64::new(*x, *y));
            }
        }
        out
    }
}
