//! The dual-stream forward pass and multi-level fusion.
//!
//! One embedded input `H₀` feeds two streams that share every block
//! weight. The *pruned* stream runs candidate elimination after the
//! configured blocks, ends at `H→`, and is scattered back to the full
//! token layout as `𝔓(H→)` with zeros where tokens were eliminated. The
//! *full* stream never prunes and keeps each block's output `Hᵢ↓` as one
//! feature level. A small MLP applied along the level axis fuses the stack
//! into one matrix, and the final output blends the two:
//!
//! ```text
//! F = (1−γ)·𝔓(H→) + γ·MLP([H₁↓ … H_n↓])
//! ```
//!
//! γ = 0 is the pruned stream alone; γ = 1 is the fused stack alone.

use super::blocks::{
    block_forward, eliminate_candidates, embed, pad_restore, EncoderVars,
};
use super::config::EncoderConfig;
use super::tape::{Tape, VarId};

/// One elimination stage as it happened.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationRecord {
    /// 1-based block index the stage ran after.
    pub after_block: usize,
    /// Rows kept, as positions in the tensor entering the stage.
    pub kept_rows: Vec<usize>,
    /// Original token ids that survived.
    pub kept_ids: Vec<usize>,
    /// Original token ids that were eliminated here.
    pub dropped_ids: Vec<usize>,
}

/// What the pruned stream did, block by block.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamTrace {
    /// Token count after each block (elimination included), length n.
    pub tokens_after_block: Vec<usize>,
    pub eliminations: Vec<EliminationRecord>,
}

impl StreamTrace {
    /// The kept-rows lists, usable as a frozen selection for a replay.
    pub fn selections(&self) -> Vec<Vec<usize>> {
        self.eliminations
            .iter()
            .map(|e| e.kept_rows.clone())
            .collect()
    }
}

/// Everything the forward pass produces.
#[derive(Debug, Clone)]
pub struct MlsOutput {
    /// The blended output `F`, total_tokens × embed_dim.
    pub fused: VarId,
    /// `𝔓(H→)`: the pruned stream restored to full layout.
    pub restored: VarId,
    /// The level-fusion MLP output, total_tokens × embed_dim.
    pub fused_levels: VarId,
    /// Per-block outputs of the full stream, each total_tokens × embed_dim.
    pub level_stack: Vec<VarId>,
    /// Token ids that survived the pruned stream, ascending.
    pub final_token_ids: Vec<usize>,
    pub trace: StreamTrace,
}

/// Fuse a stack of same-shape levels along the level axis: every (token,
/// channel) position contributes an n-vector that the MLP maps to a
/// scalar. ReLU sits between layers; the final layer is linear.
pub fn level_fusion_mlp(
    tape: &mut Tape,
    levels: &[VarId],
    fusion: &super::blocks::FusionVars,
) -> VarId {
    let (rows, cols) = tape.value(levels[0]).dim();
    let mut h = tape.concat_level_columns(levels);
    let last = fusion.layers.len() - 1;
    for (i, (w, b)) in fusion.layers.iter().enumerate() {
        let lin = tape.matmul(h, *w);
        h = tape.add_row(lin, *b);
        if i < last {
            h = tape.relu(h);
        }
    }
    tape.column_to_matrix(h, rows, cols)
}

/// Run the dual-stream forward pass.
///
/// `frozen` replays previously recorded elimination choices (see
/// [`StreamTrace::selections`]) instead of re-deriving them from attention
/// — finite-difference probing needs the selection pinned so a parameter
/// nudge cannot flip a discrete choice.
pub fn mls_forward(
    tape: &mut Tape,
    config: &EncoderConfig,
    vars: &EncoderVars,
    input: VarId,
    frozen: Option<&[Vec<usize>]>,
) -> MlsOutput {
    let total = config.total_tokens();
    let h0 = embed(tape, &vars.embed, input);

    // Pruned stream.
    let mut h = h0;
    let mut token_ids: Vec<usize> = (0..total).collect();
    let mut trace = StreamTrace::default();
    let mut stage = 0usize;
    for block in 1..=config.n_blocks {
        let out = block_forward(tape, h, &vars.blocks[block - 1]);
        h = out.out;
        if config.prune_at.contains(&block) {
            let kept_rows = match frozen {
                Some(stages) => stages
                    .get(stage)
                    .unwrap_or_else(|| {
                        panic!("frozen selection missing stage {stage}")
                    })
                    .clone(),
                None => {
                    eliminate_candidates(
                        tape.value(out.attention),
                        config.template_tokens,
                        config.keep_ratio,
                        &token_ids,
                    )
                    .kept_rows
                }
            };
            let kept_ids: Vec<usize> = kept_rows.iter().map(|r| token_ids[*r]).collect();
            let dropped_ids: Vec<usize> = token_ids
                .iter()
                .copied()
                .filter(|id| !kept_ids.contains(id))
                .collect();
            h = tape.gather_rows(h, kept_rows.clone());
            trace.eliminations.push(EliminationRecord {
                after_block: block,
                kept_rows,
                kept_ids: kept_ids.clone(),
                dropped_ids,
            });
            token_ids = kept_ids;
            stage += 1;
        }
        trace.tokens_after_block.push(token_ids.len());
    }
    let restored = pad_restore(tape, h, &token_ids, total);

    // Full stream: same weights, no elimination, one level per block.
    let mut g = h0;
    let mut level_stack = Vec::with_capacity(config.n_blocks);
    for block in 0..config.n_blocks {
        g = block_forward(tape, g, &vars.blocks[block]).out;
        level_stack.push(g);
    }

    let fused_levels = level_fusion_mlp(tape, &level_stack, &vars.fusion);
    let scaled_restored = tape.scale(restored, 1.0 - config.gamma);
    let scaled_levels = tape.scale(fused_levels, config.gamma);
    let fused = tape.add(scaled_restored, scaled_levels);

    MlsOutput {
        fused,
        restored,
        fused_levels,
        level_stack,
        final_token_ids: token_ids,
        trace,
    }
}
