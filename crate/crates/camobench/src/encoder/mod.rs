//! Reference implementation of the multi-level token-pruning encoder.
//!
//! The encoder runs two streams of the same pre-norm transformer blocks
//! over a shared embedding, with every weight shared between them:
//!
//! * the **pruned stream** applies early candidate elimination after
//!   configured blocks — search tokens ranked by the attention they
//!   receive from template tokens, the weakest dropped — and its final
//!   output is scattered back to the full token layout with zero fill;
//! * the **full stream** never prunes and contributes one feature level
//!   per block, which a small level-axis MLP compresses to a single
//!   tensor.
//!
//! The output blends the two: `F = (1−γ)·restore(pruned) + γ·MLP(levels)`.
//!
//! Everything runs on an in-crate reverse-mode tape ([`tape`]) in fp64,
//! which keeps the arithmetic reproducible bit for bit and makes every
//! gradient verifiable against central differences ([`gradcheck`]).
//! [`checks`] packages the structural guarantees (token schedule,
//! template survival, blend reductions, determinism) as a named pass/fail
//! suite with output fingerprints.

pub mod blocks;
pub mod checks;
pub mod config;
pub mod fusion;
pub mod gradcheck;
pub mod tape;
pub mod tensor;
pub mod weights;

pub use blocks::{
    block_forward, eliminate_candidates, embed, enter_weights, pad_restore, BlockOutput,
    BlockVars, Elimination, EmbedVars, EncoderVars, FusionVars,
};
pub use checks::{
    encoder_check, gamma_sweep, run_invariant_suite, standard_gamma_grid, tensor_checksum,
    CheckOutcome, EncoderCheckReport, GammaSweepPoint,
};
pub use config::{keep_count, EncoderConfig};
pub use fusion::{level_fusion_mlp, mls_forward, EliminationRecord, MlsOutput, StreamTrace};
pub use gradcheck::{
    check_block_forward, check_level_fusion_mlp, check_linear_map, check_mls_forward,
    finite_difference_check, run_gradient_checks, GradCheckEntry, GradCheckReport,
};
pub use tape::{Gradients, Tape, VarId};
pub use tensor::FeatureTensor;
pub use weights::{BlockWeights, EmbedWeights, EncoderWeights, FusionWeights};

use thiserror::Error;

/// Errors from encoder configuration and checking.
#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("invalid encoder config: {detail}")]
    InvalidConfig { detail: String },
}
