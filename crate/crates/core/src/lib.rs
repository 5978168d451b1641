#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod so3;
pub mod wigner;
pub mod lambda_rep;
pub mod spectra;
pub mod wavefunctions;
pub mod verify;

pub type EulerAngles = so3::EulerAngles<f64>;
pub type RotationMatrix = so3::RotationMatrix<f64>;
pub type HaarRule = so3::HaarRule<f64>;
pub type RepMatrix = linalg::RepMatrix<f64>;
pub type ComplexQ = lambda_rep::ComplexQ<f64>;
pub type FourierState = lambda_rep::FourierState<f64>;
pub type MeasureQuadrature = lambda_rep::MeasureQuadrature<f64>;
pub type TopParams = spectra::TopParams<f64>;
pub type EnergyLevel = spectra::EnergyLevel<f64>;
pub type LambdaEigenbasis = spectra::LambdaEigenbasis<f64>;
pub type LameSeries = spectra::LameSeries<f64>;
pub type TMatrix = wavefunctions::TMatrix<f64>;

pub use error::{Error, Result};
pub use spectra::{LameClass, Route};
pub use wigner::WignerIndex;
