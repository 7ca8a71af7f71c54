//! Active learning with an epistemic/aleatoric split of predictive
//! uncertainty.
//!
//! The crate models binary classification uncertainty as a pair of support
//! degrees — how plausibly the positive and the negative class can each still
//! be supported by some hypothesis that explains the labeled data almost as
//! well as the best one. The degree to which *both* classes remain supported
//! is reducible (epistemic) uncertainty; the degree to which *neither* is
//! supported is irreducible (aleatoric) noise. Querying where the epistemic
//! part is largest tends to spend labeling budget where more data actually
//! helps.
//!
//! Modules:
//! - [`data`]: datasets, CSV loading, min/max normalization, evaluation splits
//! - [`scalar`]: bounded one-dimensional minimization
//! - [`uncertainty`]: support degrees, uncertainty profiles, classic scores
//! - [`parzen`]: Parzen window classifier with exact binomial supports
//! - [`dtree`]: CART-style decision tree reusing the same leaf-count supports
//! - [`logreg`]: regularized logistic regression with constrained refits
//! - [`active`]: the query loop tying learners and strategies together
//! - [`rng`]: named, independently seeded random streams

pub mod active;
pub mod data;
pub mod dtree;
pub mod error;
pub mod logreg;
pub mod parzen;
pub mod rng;
pub mod scalar;
pub mod uncertainty;

pub use active::{
    candidate_subset, fit_model, run_active_learning, select_query, FittedModel, HiddenPool,
    LearnerConfig, LearningCurve, Strategy,
};
pub use data::{accuracy, make_protocol_splits, Dataset, Normalizer, ProtocolSplit};
pub use dtree::{TreeModel, TreeParams};
pub use error::{Error, Result};
pub use logreg::{
    constrained_fit, fit_mle, gradient, loglik, neg_hessian, relative_plausibility, sigmoid,
    AlphaGrid, LogRegModel, LogRegParams,
};
pub use parzen::{determine_width, solve_binomial_support, ParzenModel, SupportTable};
pub use rng::{stream_rng, Stream};
pub use scalar::{brent_minimize, ScalarResult};
pub use uncertainty::{
    entropy_score, least_confidence_score, margin_score, Assessment, SupportDegrees,
    UncertaintyProfile,
};
