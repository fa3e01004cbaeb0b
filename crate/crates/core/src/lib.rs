// `!(x > 0)` rejects NaN alongside non-positive values; index loops walk symmetric matrices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Simplicial-complex inference over collections of multivariate time series.
//!
//! Each vertex is a sampled multivariate path. Truncated path signatures turn
//! vertices and vertex subsets into feature vectors; a LASSO regression of
//! each vertex's signature on the signatures of candidate subsets selects the
//! subsets that explain it, and these form the simplices of the inferred
//! complex. Re-running the inference on random subsets of sampling times gives
//! per-hyperedge inclusion frequencies.
//!
//! The numerical core is generic over the scalar type: path algebra and
//! signatures work with any [`Scalar`] (floats or exact rationals), while
//! regression, inference and simulation need a [`Real`]. The aliases below fix
//! the common choices.

pub mod complex;
pub mod error;
pub mod evalmetrics;
pub mod io;
pub mod lasso;
pub mod rng;
pub mod scalar;
pub mod signature;
pub mod synthgen;
pub mod timeseries;

pub use complex::{
    estimate_probability_tensors, hyper_adjacency, infer_complex, predict_k_link, threshold_complex,
    HyperAdjacencyTensor, InferenceConfig, ProbabilityTensors, Simplex, SimplicialComplex,
};
pub use error::{Error, Result};
pub use lasso::{lasso_fit, Design, LassoConfig, LassoFit, Penalty};
pub use rng::Substream;
pub use scalar::{Real, Scalar};
pub use signature::{path_signature, TruncatedSignature};
pub use synthgen::{ground_truth_adjacency, simulate_dataset, GroundTruth, SynthConfig};
pub use timeseries::{Coherence, MultivariatePath, TimeGrid};

use num_rational::BigRational;

pub type Path = MultivariatePath<f64>;
pub type Grid = TimeGrid<f64>;
pub type Signature = TruncatedSignature<f64>;
pub type Fit = LassoFit<f64>;
pub type Config = InferenceConfig<f64>;
pub type Synth = SynthConfig<f64>;

pub type Path32 = MultivariatePath<f32>;
pub type Signature32 = TruncatedSignature<f32>;

pub type ExactPath = MultivariatePath<BigRational>;
pub type ExactGrid = TimeGrid<BigRational>;
pub type ExactSignature = TruncatedSignature<BigRational>;
