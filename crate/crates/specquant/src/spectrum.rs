//! Mixed power spectral distributions and the exact second-order
//! statistics they induce.
//!
//! A [`SpectralModel`] is a normalized power spectral distribution made of
//! point masses (spectral atoms) plus piecewise-constant density segments.
//! Autocorrelations come out in closed form, so covariance and
//! cross-covariance matrices are exact.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Normalization tolerance enforced at construction.
pub const POWER_TOL: f64 = 1e-12;

/// A spectral point mass: frequency in cycles/sample and its power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Frequency in [-1/2, 1/2).
    pub xi: f64,
    /// Power carried by the atom.
    pub power: f64,
}

/// A uniform spectral band `[a, b)` carrying total power `power`;
/// the density is `power / (b - a)` on the band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub power: f64,
}

/// Mixed spectral distribution: atoms plus uniform segments, total power 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

/// Reduce a frequency to [-1/2, 1/2). Atoms are 1-periodic so this
/// loses nothing.
pub fn wrap_frequency(xi: f64) -> f64 {
    let mut f = xi - xi.round();
    if f >= 0.5 {
        f -= 1.0;
    }
    if f < -0.5 {
        f += 1.0;
    }
    f
}

/// Normalized sinc, `sin(pi x) / (pi x)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl SpectralModel {
    /// Build a model, validating all invariants including unit power.
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|a| Atom {
                xi: wrap_frequency(a.xi),
                power: a.power,
            })
            .collect();
        for a in &atoms {
            if a.power < 0.0 || !a.power.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "atom at {} has weight {}",
                    a.xi, a.power
                )));
            }
        }
        for s in &segments {
            if s.power < 0.0 || !s.power.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "segment [{}, {}) has weight {}",
                    s.a, s.b, s.power
                )));
            }
            if !(s.a < s.b) || s.a < -0.5 || s.b > 0.5 {
                return Err(Error::InvalidModel(format!(
                    "segment [{}, {}) is not a subinterval of [-1/2, 1/2)",
                    s.a, s.b
                )));
            }
        }
        let mut xis: Vec<f64> = atoms.iter().map(|a| a.xi).collect();
        xis.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if xis.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel(
                "atom frequencies must be pairwise distinct".into(),
            ));
        }
        let mut ivals: Vec<(f64, f64)> = segments.iter().map(|s| (s.a, s.b)).collect();
        ivals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if ivals.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(Error::InvalidModel("segments must be pairwise disjoint".into()));
        }
        let total: f64 =
            atoms.iter().map(|a| a.power).sum::<f64>() + segments.iter().map(|s| s.power).sum::<f64>();
        if (total - 1.0).abs() > POWER_TOL {
            return Err(Error::InvalidModel(format!(
                "total power {total} is not 1 (tolerance {POWER_TOL:e})"
            )));
        }
        Ok(Self { atoms, segments })
    }

    /// Build a model from weights of arbitrary positive total, rescaling
    /// them to unit power.
    pub fn renormalize(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        let total: f64 =
            atoms.iter().map(|a| a.power).sum::<f64>() + segments.iter().map(|s| s.power).sum::<f64>();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidModel(format!(
                "cannot renormalize total power {total}"
            )));
        }
        let atoms = atoms
            .into_iter()
            .map(|a| Atom {
                xi: a.xi,
                power: a.power / total,
            })
            .collect();
        let segments = segments
            .into_iter()
            .map(|s| Segment {
                a: s.a,
                b: s.b,
                power: s.power / total,
            })
            .collect();
        Self::new(atoms, segments)
    }

    /// White process: one uniform segment spanning the whole band.
    pub fn white() -> Self {
        Self::new(
            vec![],
            vec![Segment {
                a: -0.5,
                b: 0.5,
                power: 1.0,
            }],
        )
        .expect("white model is valid")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Power of the continuous part, `P_c`.
    pub fn continuous_power(&self) -> f64 {
        self.segments.iter().map(|s| s.power).sum()
    }

    /// Power of the discrete part, `1 - P_c`.
    pub fn discrete_power(&self) -> f64 {
        self.atoms.iter().map(|a| a.power).sum()
    }

    /// Serialize to the documented JSON schema.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Parse from the documented JSON schema, re-validating invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpectralModelRaw = serde_json::from_str(text)?;
        Self::new(raw.atoms, raw.segments)
    }
}

#[derive(Deserialize)]
struct SpectralModelRaw {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    segments: Vec<Segment>,
}

/// Autocorrelation at integer lag `m` for the atoms alone (their stored,
/// unnormalized weights). Used by the full autocorrelation and by the
/// genie split in the MMSE module.
pub fn autocorrelation_atoms(atoms: &[Atom], m: i64) -> Complex64 {
    atoms
        .iter()
        .map(|a| Complex64::from_polar(a.power, 2.0 * PI * m as f64 * a.xi))
        .sum()
}

/// Autocorrelation at integer lag `m` for the segments alone.
pub fn autocorrelation_segments(segments: &[Segment], m: i64) -> Complex64 {
    segments
        .iter()
        .map(|s| {
            let width = s.b - s.a;
            let phase = PI * m as f64 * (s.a + s.b);
            Complex64::from_polar(1.0, phase) * (s.power * sinc(m as f64 * width))
        })
        .sum()
}

/// Autocorrelation `r(m)` of the process with spectral distribution
/// `model`, in closed form.
pub fn autocorrelation(model: &SpectralModel, m: i64) -> Complex64 {
    autocorrelation_atoms(model.atoms(), m) + autocorrelation_segments(model.segments(), m)
}

/// Hermitian Toeplitz covariance matrix stored by the autocorrelation
/// sequence `(r(0), ..., r(n-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    first_row: Vec<Complex64>,
}

impl CovarianceMatrix {
    /// Build from an arbitrary autocorrelation sequence.
    pub fn from_first_row(first_row: Vec<Complex64>) -> Self {
        assert!(!first_row.is_empty());
        Self { first_row }
    }

    pub fn dim(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    /// Entry `(p, q) = r(p - q)`; `r(-m) = conj(r(m))`.
    pub fn entry(&self, p: usize, q: usize) -> Complex64 {
        if p >= q {
            self.first_row[p - q]
        } else {
            self.first_row[q - p].conj()
        }
    }

    /// Densify into a full matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |p, q| self.entry(p, q))
    }
}

/// Exact `n x n` covariance of `n` consecutive process samples.
pub fn covariance(model: &SpectralModel, n: usize) -> CovarianceMatrix {
    assert!(n >= 1);
    let row = (0..n as i64).map(|m| autocorrelation(model, m)).collect();
    CovarianceMatrix::from_first_row(row)
}

/// Cross-covariance `E[g h^H]` between a window starting at sample
/// `offset` and the observation window: entry `(p, q) = r(offset + p - q)`.
pub fn cross_covariance(model: &SpectralModel, offset: i64, n: usize) -> DMatrix<Complex64> {
    assert!(offset >= 1);
    DMatrix::from_fn(n, n, |p, q| {
        autocorrelation(model, offset + p as i64 - q as i64)
    })
}
