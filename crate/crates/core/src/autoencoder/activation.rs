use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::transforms::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn name(&self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
        }
    }

    #[inline]
    pub fn apply(&self, v: f64) -> f64 {
        match self {
            Activation::Tanh => libm::tanh(v),
            Activation::Sigmoid => 1.0 / (1.0 + libm::exp(-v)),
        }
    }

    /// Inverse after clamping into the open range by `eps`.
    #[inline]
    pub fn invert(&self, v: f64, eps: f64) -> f64 {
        match self {
            Activation::Tanh => libm::atanh(v.clamp(-1.0 + eps, 1.0 - eps)),
            Activation::Sigmoid => {
                let p = v.clamp(eps, 1.0 - eps);
                libm::log(p / (1.0 - p))
            }
        }
    }

    /// Derivative expressed through the activation's output `y = φ(u)`.
    #[inline]
    pub fn derivative_from_output(&self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }

    pub fn apply_matrix(&self, m: &Matrix) -> Matrix {
        m.map(|v| self.apply(v))
    }
}

impl core::str::FromStr for Activation {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(crate::Error::invalid(alloc::format!(
                "unknown activation `{other}`"
            ))),
        }
    }
}

/// Elementwise activation or clamped inverse activation.
pub fn activate(
    values: &[f64],
    kind: Activation,
    direction: Direction,
    clamp_eps: f64,
) -> Vec<f64> {
    match direction {
        Direction::Forward => values.iter().map(|&v| kind.apply(v)).collect(),
        Direction::Inverse => values.iter().map(|&v| kind.invert(v, clamp_eps)).collect(),
    }
}
