//! Bipolar node activation functions.
//!
//! Every activation maps the reals into `[-1, 1]`, so any node in a network
//! can be visualized on the same red/black/white scale as the final output.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Sigmoid,
    Gaussian,
    Sine,
}

impl Activation {
    /// Activations that add-node mutations draw from.
    pub const HIDDEN_CHOICES: [Activation; 3] =
        [Activation::Sigmoid, Activation::Gaussian, Activation::Sine];

    pub fn apply(self, z: f64, params: &ActivationParams) -> f64 {
        match self {
            Activation::Identity => z.clamp(-1.0, 1.0),
            Activation::Sigmoid => 2.0 / (1.0 + (-params.sigmoid_gain * z).exp()) - 1.0,
            Activation::Gaussian => {
                let s = params.gaussian_scale * z;
                2.0 * (-(s * s)).exp() - 1.0
            }
            Activation::Sine => (params.sine_frequency * z).sin(),
        }
    }
}

/// Shape constants for the activation functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationParams {
    pub sigmoid_gain: f64,
    pub gaussian_scale: f64,
    pub sine_frequency: f64,
}

impl Default for ActivationParams {
    fn default() -> Self {
        Self {
            sigmoid_gain: 4.9,
            gaussian_scale: 2.5,
            sine_frequency: 2.0,
        }
    }
}

impl ActivationParams {
    /// Period of the sine activation.
    pub fn sine_period(&self) -> f64 {
        std::f64::consts::TAU / self.sine_frequency
    }
}
