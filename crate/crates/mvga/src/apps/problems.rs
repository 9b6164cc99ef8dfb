//! Closed-form test fields used by the shipped examples and the CLI's
//! problem registry. All fields are entire functions of two variables with
//! analytic gradients and Laplacians, so recovered derivatives and
//! manufactured right-hand sides can be checked exactly.

use crate::error::{Error, Result};
use crate::stacked::NodeSet;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum TestField {
    /// sin(x₁x₂)
    SinProduct,
    /// exp(−3(x₁² + x₁x₂ + x₂²))
    GaussianQuadform,
    /// exp(x₁ + x₂/2)
    ExpLinear,
    /// the constant 1
    One,
}

impl TestField {
    pub fn name(self) -> &'static str {
        match self {
            TestField::SinProduct => "sin_product",
            TestField::GaussianQuadform => "gaussian_quadform",
            TestField::ExpLinear => "exp_linear",
            TestField::One => "one",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sin_product" => Ok(TestField::SinProduct),
            "gaussian_quadform" => Ok(TestField::GaussianQuadform),
            "exp_linear" => Ok(TestField::ExpLinear),
            "one" => Ok(TestField::One),
            _ => Err(Error::InvalidInput(format!("unknown test field {s:?}"))),
        }
    }

    pub fn value(self, x: &[f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        match self {
            TestField::SinProduct => (a * b).sin(),
            TestField::GaussianQuadform => (-3.0 * (a * a + a * b + b * b)).exp(),
            TestField::ExpLinear => (a + 0.5 * b).exp(),
            TestField::One => 1.0,
        }
    }

    pub fn gradient(self, x: &[f64]) -> [f64; 2] {
        let (a, b) = (x[0], x[1]);
        match self {
            TestField::SinProduct => {
                let c = (a * b).cos();
                [b * c, a * c]
            }
            TestField::GaussianQuadform => {
                let f = self.value(x);
                [-3.0 * (2.0 * a + b) * f, -3.0 * (a + 2.0 * b) * f]
            }
            TestField::ExpLinear => {
                let u = self.value(x);
                [u, 0.5 * u]
            }
            TestField::One => [0.0, 0.0],
        }
    }

    pub fn laplacian(self, x: &[f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        match self {
            TestField::SinProduct => -(a * a + b * b) * (a * b).sin(),
            TestField::GaussianQuadform => {
                let f = self.value(x);
                let s1 = -3.0 * (2.0 * a + b);
                let s2 = -3.0 * (a + 2.0 * b);
                f * (s1 * s1 + s2 * s2 - 12.0)
            }
            TestField::ExpLinear => 1.25 * self.value(x),
            TestField::One => 0.0,
        }
    }

    pub fn sample_values(self, nodes: &NodeSet<f64>) -> Vec<f64> {
        (0..nodes.len()).map(|j| self.value(nodes.node(j))).collect()
    }

    pub fn sample_gradient(self, nodes: &NodeSet<f64>, axis: usize) -> Vec<f64> {
        (0..nodes.len())
            .map(|j| self.gradient(nodes.node(j))[axis])
            .collect()
    }
}

/// Coefficient field α for the u + αΔu collocation operator.
#[derive(Copy, Clone, PartialEq, Debug)]
pub enum AlphaField {
    Constant(f64),
    /// α(x) = −exp(−‖x‖²)
    NegGaussian,
}

impl AlphaField {
    pub fn name(self) -> String {
        match self {
            AlphaField::Constant(c) => format!("{c}"),
            AlphaField::NegGaussian => "neg_gaussian".to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "neg_gaussian" {
            return Ok(AlphaField::NegGaussian);
        }
        s.parse::<f64>()
            .map(AlphaField::Constant)
            .map_err(|_| Error::InvalidInput(format!("unknown alpha spec {s:?}")))
    }

    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            AlphaField::Constant(c) => c,
            AlphaField::NegGaussian => {
                let norm_sq: f64 = x.iter().map(|v| v * v).sum();
                -(-norm_sq).exp()
            }
        }
    }

    pub fn sample(self, nodes: &NodeSet<f64>) -> Vec<f64> {
        (0..nodes.len()).map(|j| self.value(nodes.node(j))).collect()
    }
}
