//! The measure container shared by the measure builders, the oracles and
//! the command line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MeasureKind {
    Ac,
    Discrete,
    Frozen,
}

impl MeasureKind {
    fn tag(self) -> &'static str {
        match self {
            MeasureKind::Ac => "ac",
            MeasureKind::Discrete => "discrete",
            MeasureKind::Frozen => "frozen",
        }
    }
}

/// A sampled spectral measure: density samples for the absolutely
/// continuous part and `(x, mass)` pairs for the point part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub kind: MeasureKind,
    /// `(x, density)` in increasing `x`.
    #[serde(rename = "ac")]
    pub ac_samples: Vec<(f64, f64)>,
    /// `(x, mass)` in increasing `x`.
    pub points: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frozen_band: Option<(f64, f64)>,
    pub provenance: BTreeMap<String, Value>,
    /// Quadrature nodes and weights integrating the continuous part exactly
    /// for smooth integrands, when the density is known in closed form.
    #[serde(skip)]
    pub ac_rule: Option<Vec<(f64, f64)>>,
}

impl SpectralMeasure {
    pub fn new(kind: MeasureKind) -> Self {
        Self {
            kind,
            ac_samples: Vec::new(),
            points: Vec::new(),
            frozen_band: None,
            provenance: BTreeMap::new(),
            ac_rule: None,
        }
    }

    pub fn with_provenance(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.provenance.insert(key.to_string(), value.into());
        self
    }

    /// Check the sign and ordering invariants.
    pub fn validate(&self) -> Result<()> {
        if let Some(&(x, d)) = self.ac_samples.iter().find(|s| !(s.1 >= 0.0)) {
            return Err(Error::InvalidArgument(format!("density {d} at x = {x} is negative")));
        }
        if let Some(&(x, mass)) = self.points.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::NegativeMass { x, mass });
        }
        if self.points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidArgument("point masses are not strictly increasing".into()));
        }
        if let (MeasureKind::Frozen, Some((lo, hi))) = (self.kind, self.frozen_band) {
            if let Some(p) = self.points.iter().find(|p| p.0 >= lo && p.0 <= hi) {
                return Err(Error::InvalidArgument(format!("point mass at {} inside the band", p.0)));
            }
        }
        Ok(())
    }

    /// `int f dmu`, with the continuous part integrated by the exact rule
    /// when present and by Simpson's rule over the samples otherwise.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let ac = match &self.ac_rule {
            Some(rule) => rule.iter().map(|&(x, w)| w * f(x)).sum(),
            None => self.integrate_samples(&f, 1),
        };
        ac + self.points.iter().map(|&(x, m)| m * f(x)).sum::<f64>()
    }

    /// Simpson's rule over every `stride`-th density sample.
    pub fn integrate_samples(&self, f: impl Fn(f64) -> f64, stride: usize) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .ac_samples
            .iter()
            .step_by(stride.max(1))
            .map(|&(x, d)| (x, d * f(x)))
            .collect();
        simpson(&pts)
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn point_mass(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Two-column CSV. Density rows sit under an `x,<kind>_density` header,
    /// point masses under `x,<kind>_mass`; a section is omitted when empty,
    /// except that a measure with neither gets the header of its main part.
    pub fn to_csv(&self) -> String {
        let tag = self.kind.tag();
        let mut out = String::new();
        let want_density = !self.ac_samples.is_empty() || self.kind == MeasureKind::Ac;
        if want_density {
            writeln!(out, "x,{tag}_density").unwrap();
            for &(x, d) in &self.ac_samples {
                writeln!(out, "{x:?},{d:?}").unwrap();
            }
        }
        if !self.points.is_empty() || !want_density {
            writeln!(out, "x,{tag}_mass").unwrap();
            for &(x, m) in &self.points {
                writeln!(out, "{x:?},{m:?}").unwrap();
            }
        }
        out
    }
}

/// Composite Simpson rule for samples on a possibly non-uniform grid; a
/// trailing odd interval is closed with the trapezoid rule.
pub fn simpson(pts: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < pts.len() {
        let (x0, f0) = pts[i];
        let (x1, f1) = pts[i + 1];
        let (x2, f2) = pts[i + 2];
        let (h0, h1) = (x1 - x0, x2 - x1);
        total += (h0 + h1) / 6.0
            * ((2.0 - h1 / h0) * f0 + (h0 + h1).powi(2) / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
        i += 2;
    }
    if i + 1 < pts.len() {
        let (x0, f0) = pts[i];
        let (x1, f1) = pts[i + 1];
        total += 0.5 * (x1 - x0) * (f0 + f1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let pts: Vec<_> = grid(-1.0, 2.0, 6).into_iter().map(|x| (x, x * x * x - x + 1.0)).collect();
        assert_relative_eq!(simpson(&pts), 3.75 - 1.5 + 3.0, max_relative = 1e-14);
        // non-uniform pairs
        let pts: Vec<_> = [0.0, 0.1, 0.5, 0.6, 1.0].iter().map(|&x| (x, x * x)).collect();
        assert_relative_eq!(simpson(&pts), 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn mass_and_csv() {
        let mut m = SpectralMeasure::new(MeasureKind::Frozen);
        m.ac_samples = grid(-1.0, 1.0, 400)
            .into_iter()
            .map(|x| (x, 2.0 / std::f64::consts::PI * (1.0 - x * x).max(0.0).sqrt()))
            .collect();
        m.frozen_band = Some((-1.0, 1.0));
        assert!((m.total_mass() - 1.0).abs() < 1e-3);
        m.points.push((2.0, 0.25));
        m.validate().unwrap();
        let csv = m.to_csv();
        assert!(csv.starts_with("x,frozen_density\n-1.0,0.0\n"));
        assert!(csv.ends_with("x,frozen_mass\n2.0,0.25\n"));

        m.points.push((0.0, 0.1));
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_shape() {
        let mut m = SpectralMeasure::new(MeasureKind::Discrete).with_provenance("tol", 1e-12);
        m.points = vec![(-0.5, 0.75), (1.5, 0.25)];
        let v: Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(v["kind"], "DISCRETE");
        assert_eq!(v["points"][1][0], 1.5);
        assert!(v["ac"].as_array().unwrap().is_empty());
        assert_eq!(v["provenance"]["tol"], 1e-12);
        let empty = SpectralMeasure::new(MeasureKind::Discrete);
        assert_eq!(empty.to_csv(), "x,discrete_mass\n");
    }
}
