//! Composition algebra: closure, the CLR transform and its inverse, the
//! Aitchison distance, and compositional centers.
//!
//! A [`Composition`] is a vector of D >= 2 strictly positive parts. Constant
//! sum is NOT required on construction; closure is applied only where an
//! operation's contract needs it (centers). All logarithms are natural logs;
//! the choice is immaterial to cluster assignments (a scalar factor on every
//! coordinate) but is fixed here so golden fixtures reproduce exactly.

use alloc::format;
use alloc::vec::Vec;

use crate::error::CodaError;
use crate::math;

/// Tolerance scale for the CLR zero-sum invariant: |sum| <= ZERO_SUM_TOL * D.
pub const ZERO_SUM_TOL: f64 = 1e-10;

/// Tolerance for the unit-sum invariant of a [`CompositionalCenter`].
pub const UNIT_SUM_TOL: f64 = 1e-12;

/// A vector of D >= 2 strictly positive, finite parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    parts: Vec<f64>,
}

impl Composition {
    /// Validates and wraps a part vector: every part finite and > 0, D >= 2.
    pub fn new(parts: Vec<f64>) -> Result<Self, CodaError> {
        if parts.len() < 2 {
            return Err(CodaError::InvalidComposition(format!(
                "need at least 2 parts, got {}",
                parts.len()
            )));
        }
        for (j, &p) in parts.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(CodaError::InvalidComposition(format!(
                    "part {j} is {p}, must be finite and > 0"
                )));
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[f64] {
        &self.parts
    }

    /// Number of parts D.
    pub fn dim(&self) -> usize {
        self.parts.len()
    }
}

/// The centered log-ratio image of a composition; coordinates sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ClrVector {
    coords: Vec<f64>,
}

impl ClrVector {
    /// Validates the zero-sum invariant (|sum| <= 1e-10 * D) and finiteness.
    pub fn new(coords: Vec<f64>) -> Result<Self, CodaError> {
        if coords.len() < 2 {
            return Err(CodaError::InvalidComposition(format!(
                "CLR vector needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(CodaError::InvalidComposition(
                "CLR coordinate is not finite".into(),
            ));
        }
        let sum: f64 = coords.iter().sum();
        let tol = ZERO_SUM_TOL * coords.len() as f64;
        if sum.abs() > tol {
            return Err(CodaError::InvalidComposition(format!(
                "CLR coordinates sum to {sum}, exceeds tolerance {tol}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Per-part geometric means across observations, closed to unit sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionalCenter {
    parts: Vec<f64>,
}

impl CompositionalCenter {
    /// Validates unit sum (within 1e-12) and positivity.
    pub fn new(parts: Vec<f64>) -> Result<Self, CodaError> {
        if parts.len() < 2 {
            return Err(CodaError::InvalidComposition(format!(
                "center needs at least 2 parts, got {}",
                parts.len()
            )));
        }
        for (j, &p) in parts.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(CodaError::InvalidComposition(format!(
                    "center part {j} is {p}, must be finite and > 0"
                )));
            }
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > UNIT_SUM_TOL {
            return Err(CodaError::InvalidComposition(format!(
                "center parts sum to {sum}, must be 1 within {UNIT_SUM_TOL}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[f64] {
        &self.parts
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }
}

/// Rescales a composition to unit sum. Part ratios are unchanged.
pub fn closure(c: &Composition) -> Composition {
    let sum: f64 = c.parts().iter().sum();
    Composition {
        parts: c.parts().iter().map(|p| p / sum).collect(),
    }
}

/// Centered log-ratio transform: each part's log relative to the log of the
/// geometric mean of all parts of the same observation.
pub fn clr(c: &Composition) -> ClrVector {
    let logs: Vec<f64> = c.parts().iter().map(|&p| math::ln(p)).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    ClrVector {
        coords: logs.iter().map(|l| l - mean).collect(),
    }
}

/// Inverse CLR: exponentiate and close to unit sum.
pub fn clr_inverse(v: &ClrVector) -> Composition {
    let exps: Vec<f64> = v.coords().iter().map(|&c| math::exp(c)).collect();
    let sum: f64 = exps.iter().sum();
    Composition {
        parts: exps.iter().map(|e| e / sum).collect(),
    }
}

/// Aitchison distance: the Euclidean norm of the difference of CLR images.
pub fn aitchison_distance(a: &Composition, b: &Composition) -> Result<f64, CodaError> {
    if a.dim() != b.dim() {
        return Err(CodaError::DimensionMismatch(format!(
            "compositions have {} and {} parts",
            a.dim(),
            b.dim()
        )));
    }
    let ca = clr(a);
    let cb = clr(b);
    let ss: f64 = ca
        .coords()
        .iter()
        .zip(cb.coords())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(math::sqrt(ss))
}

/// Compositional center: per-part geometric means over the collection,
/// normalized to unit sum. The center of a single composition is its closure.
pub fn center(cs: &[Composition]) -> Result<CompositionalCenter, CodaError> {
    let first = cs
        .first()
        .ok_or_else(|| CodaError::EmptyInput("center of an empty collection".into()))?;
    let d = first.dim();
    let n = cs.len() as f64;
    let mut log_means = alloc::vec![0.0f64; d];
    for c in cs {
        if c.dim() != d {
            return Err(CodaError::DimensionMismatch(format!(
                "compositions have {} and {} parts",
                d,
                c.dim()
            )));
        }
        for (acc, &p) in log_means.iter_mut().zip(c.parts()) {
            *acc += math::ln(p);
        }
    }
    // Geometric means via mean of logs; subtracting the max before exp keeps
    // the normalization safe for extreme magnitudes.
    for acc in log_means.iter_mut() {
        *acc /= n;
    }
    let max = log_means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gm: Vec<f64> = log_means.iter().map(|&l| math::exp(l - max)).collect();
    let sum: f64 = gm.iter().sum();
    let mut parts: Vec<f64> = gm.iter().map(|g| g / sum).collect();
    // Float summation can leave |sum-1| slightly above the 1e-12 invariant;
    // one exact renormalization pins it down.
    let s: f64 = parts.iter().sum();
    for p in parts.iter_mut() {
        *p /= s;
    }
    CompositionalCenter::new(parts)
}

/// Table-derived center fixture shared across the crate's tests.
#[cfg(test)]
pub(crate) const CENTER_2021: [f64; 6] = [0.0730, 0.1237, 0.0200, 0.0728, 0.3638, 0.3467];
