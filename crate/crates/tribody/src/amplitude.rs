use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex value together with an estimate of its absolute numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    pub value: Complex64,
    pub err: f64,
}

impl ComplexAmplitude {
    pub fn new(value: Complex64, err: f64) -> Self {
        Self { value, err }
    }

    pub fn exact(value: Complex64) -> Self {
        Self { value, err: 0.0 }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    /// Error estimate relative to the magnitude of the value.
    pub fn rel_err(&self) -> f64 {
        let m = self.value.norm();
        if m == 0.0 {
            self.err
        } else {
            self.err / m
        }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            value: self.value * c,
            err: self.err * c.norm(),
        }
    }

    pub fn mul(self, other: Self) -> Self {
        Self {
            value: self.value * other.value,
            err: self.err * other.value.norm() + other.err * self.value.norm(),
        }
    }
}

impl From<Complex64> for ComplexAmplitude {
    fn from(value: Complex64) -> Self {
        Self::exact(value)
    }
}
