//! A small question-to-VQL translator: per-character transformer encoder over
//! the question and schema with n-gram representations injected after every
//! layer, and an LSTM decoder that either generates a VQL word or copies a
//! schema element.

pub mod beam;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod gradcheck;
pub mod input;
pub mod model;
pub mod params;
pub mod synth;
pub mod tape;
pub mod tensor;
pub mod train;
pub mod vocab;

pub use beam::{predict_samples, BeamResult, Candidate};
pub use config::{Combiner, ModelConfig, TrainConfig};
pub use error::NeuralError;
pub use gradcheck::{grad_check, GradReport};
pub use input::{serialize_input, SerializedInput};
pub use model::{DecoderState, Model, StepDistribution};
pub use synth::generate_synthetic_corpus;
pub use tensor::Tensor;
pub use train::{train, train_with, TrainReport};
