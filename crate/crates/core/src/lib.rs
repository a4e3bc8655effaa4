//! Gradient-free neuroevolution of world-model agents.
//!
//! An agent is a visual encoder feeding a recurrent memory, whose hidden state
//! and the latent code drive a linear controller. Whole agents are evolved
//! with NSGA-II over two objectives: accumulated episode reward and an *age*
//! that resets whenever an upstream component (encoder or memory) mutates,
//! giving the controller time to re-adapt before it faces full selection
//! pressure.
//!
//! The numeric core is generic over the scalar type (`f32` or `f64`); the
//! aliases at the crate root name the common instantiations.

pub mod analysis;
pub mod cli;
pub mod envs;
pub mod error;
pub mod genome;
pub mod harness;
pub mod moea;
pub mod nn;
pub mod rng;
pub mod scalar;
pub mod verify;

pub use error::{DipError, Result};
pub use genome::{ArchitectureConfig, Component, Genome, MutationEvent};
pub use moea::{Individual, Population, ProtectionPolicy};
pub use rng::RandomSource;
pub use scalar::Scalar;

/// Double-precision genome, the reference path.
pub type Genome64 = Genome<f64>;
/// Single-precision genome, the fast path.
pub type Genome32 = Genome<f32>;
pub type Individual64 = Individual<f64>;
pub type Individual32 = Individual<f32>;
pub type Population64 = Population<f64>;
pub type Population32 = Population<f32>;
pub type Tensor64 = nn::Tensor<f64>;
pub type Tensor32 = nn::Tensor<f32>;
