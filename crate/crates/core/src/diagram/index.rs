use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The orbit index of a hyperbolic periodic orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum OrbitIndex {
    Minus,
    Zero,
    Plus,
}

impl OrbitIndex {
    pub const ALL: [OrbitIndex; 3] = [OrbitIndex::Minus, OrbitIndex::Zero, OrbitIndex::Plus];

    pub fn value(self) -> i8 {
        match self {
            OrbitIndex::Minus => -1,
            OrbitIndex::Zero => 0,
            OrbitIndex::Plus => 1,
        }
    }

    pub fn from_value(value: i64) -> Option<Self> {
        match value {
            -1 => Some(OrbitIndex::Minus),
            0 => Some(OrbitIndex::Zero),
            1 => Some(OrbitIndex::Plus),
            _ => None,
        }
    }

    pub fn negated(self) -> Self {
        match self {
            OrbitIndex::Minus => OrbitIndex::Plus,
            OrbitIndex::Zero => OrbitIndex::Zero,
            OrbitIndex::Plus => OrbitIndex::Minus,
        }
    }

    /// Rendering color: red for -1, green for 0, blue for +1.
    pub fn color_name(self) -> &'static str {
        match self {
            OrbitIndex::Minus => "red",
            OrbitIndex::Zero => "green",
            OrbitIndex::Plus => "blue",
        }
    }
}

impl fmt::Display for OrbitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitIndex::Minus => f.write_str("-1"),
            OrbitIndex::Zero => f.write_str("0"),
            OrbitIndex::Plus => f.write_str("+1"),
        }
    }
}

impl From<OrbitIndex> for i8 {
    fn from(index: OrbitIndex) -> i8 {
        index.value()
    }
}

impl TryFrom<i8> for OrbitIndex {
    type Error = String;

    fn try_from(value: i8) -> Result<Self, Self::Error> {
        OrbitIndex::from_value(value.into())
            .ok_or_else(|| format!("orbit index must be -1, 0 or 1, got {value}"))
    }
}

pub fn index_sum(indices: impl IntoIterator<Item = OrbitIndex>) -> i64 {
    indices.into_iter().map(|i| i64::from(i.value())).sum()
}

/// Eigenvalues of the differential of the return map along a periodic orbit.
///
/// Complex eigenvalues are given as `(modulus, argument)`, one entry per
/// conjugate pair.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSpec {
    pub reals: Vec<f64>,
    #[serde(default, rename = "complexPairs")]
    pub complex_pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EigenvalueError {
    #[error("real eigenvalue {0} lies on the unit circle; the orbit is at a bifurcation")]
    RealOnUnitCircle(f64),
    #[error("complex pair with modulus 1 (argument {0}); the orbit is at a bifurcation")]
    PairOnUnitCircle(f64),
    #[error("eigenvalue is not a finite number")]
    NotFinite,
    #[error("complex pair modulus {0} is negative")]
    NegativeModulus(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexComputation {
    pub sigma_plus: u32,
    pub sigma_minus: u32,
    pub index: OrbitIndex,
}

/// Orbit index from the eigenvalue counts: 0 when the number of eigenvalues
/// below -1 is odd, otherwise `(-1)^sigma_plus` where `sigma_plus` counts the
/// eigenvalues above 1.
pub fn index_from_eigenvalues(spec: &EigenvalueSpec) -> Result<IndexComputation, EigenvalueError> {
    let mut sigma_plus = 0;
    let mut sigma_minus = 0;
    for &x in &spec.reals {
        if !x.is_finite() {
            return Err(EigenvalueError::NotFinite);
        }
        if x.abs() == 1.0 {
            return Err(EigenvalueError::RealOnUnitCircle(x));
        }
        if x > 1.0 {
            sigma_plus += 1;
        } else if x < -1.0 {
            sigma_minus += 1;
        }
    }
    for &(modulus, argument) in &spec.complex_pairs {
        if !modulus.is_finite() || !argument.is_finite() {
            return Err(EigenvalueError::NotFinite);
        }
        if modulus < 0.0 {
            return Err(EigenvalueError::NegativeModulus(modulus));
        }
        if modulus == 1.0 {
            return Err(EigenvalueError::PairOnUnitCircle(argument));
        }
    }
    let index = if sigma_minus % 2 == 1 {
        OrbitIndex::Zero
    } else if sigma_plus % 2 == 0 {
        OrbitIndex::Plus
    } else {
        OrbitIndex::Minus
    };
    Ok(IndexComputation {
        sigma_plus,
        sigma_minus,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(values: &[f64]) -> EigenvalueSpec {
        EigenvalueSpec {
            reals: values.to_vec(),
            complex_pairs: vec![],
        }
    }

    #[test]
    fn saddle_orbit_has_index_minus_one() {
        let r = index_from_eigenvalues(&reals(&[2.0, 0.5])).unwrap();
        assert_eq!(
            (r.sigma_plus, r.sigma_minus, r.index),
            (1, 0, OrbitIndex::Minus)
        );
    }

    #[test]
    fn contracting_orbit_has_index_plus_one() {
        let r = index_from_eigenvalues(&reals(&[0.3, 0.5])).unwrap();
        assert_eq!(
            (r.sigma_plus, r.sigma_minus, r.index),
            (0, 0, OrbitIndex::Plus)
        );
    }

    #[test]
    fn flip_saddle_has_index_zero() {
        let r = index_from_eigenvalues(&reals(&[-2.0, -0.5])).unwrap();
        assert_eq!(
            (r.sigma_plus, r.sigma_minus, r.index),
            (0, 1, OrbitIndex::Zero)
        );
    }

    #[test]
    fn complex_pairs_do_not_count() {
        let spec = EigenvalueSpec {
            reals: vec![3.0],
            complex_pairs: vec![(4.0, 2.0)],
        };
        let r = index_from_eigenvalues(&spec).unwrap();
        assert_eq!(
            (r.sigma_plus, r.sigma_minus, r.index),
            (1, 0, OrbitIndex::Minus)
        );
    }

    #[test]
    fn unit_modulus_is_rejected() {
        assert_eq!(
            index_from_eigenvalues(&reals(&[1.0, 0.2])),
            Err(EigenvalueError::RealOnUnitCircle(1.0))
        );
        assert_eq!(
            index_from_eigenvalues(&reals(&[-1.0])),
            Err(EigenvalueError::RealOnUnitCircle(-1.0))
        );
        let spec = EigenvalueSpec {
            reals: vec![],
            complex_pairs: vec![(1.0, 0.7)],
        };
        assert_eq!(
            index_from_eigenvalues(&spec),
            Err(EigenvalueError::PairOnUnitCircle(0.7))
        );
    }

    #[test]
    fn index_values_round_trip() {
        for i in OrbitIndex::ALL {
            assert_eq!(OrbitIndex::try_from(i.value()).unwrap(), i);
        }
        assert!(OrbitIndex::try_from(2).is_err());
    }
}
