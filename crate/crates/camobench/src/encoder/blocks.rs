//! The transformer block, input embedding, and candidate elimination.

use ndarray::Array2;

use super::config::keep_count;
use super::tape::{Tape, VarId};
use super::weights::{BlockWeights, EmbedWeights, EncoderWeights, FusionWeights};

/// Tape handles for one block's parameters.
#[derive(Debug, Clone)]
pub struct BlockVars {
    pub ln1_gain: VarId,
    pub ln1_bias: VarId,
    pub wq: VarId,
    pub bq: VarId,
    pub wk: VarId,
    pub bk: VarId,
    pub wv: VarId,
    pub bv: VarId,
    pub wo: VarId,
    pub bo: VarId,
    pub ln2_gain: VarId,
    pub ln2_bias: VarId,
    pub w1: VarId,
    pub b1: VarId,
    pub w2: VarId,
    pub b2: VarId,
}

#[derive(Debug, Clone)]
pub struct EmbedVars {
    pub proj: VarId,
    pub pos: VarId,
}

#[derive(Debug, Clone)]
pub struct FusionVars {
    pub layers: Vec<(VarId, VarId)>,
}

/// Tape handles for every encoder parameter. Enter the weights once and
/// share the handles across streams: shared parameters then accumulate
/// gradients from every use.
#[derive(Debug, Clone)]
pub struct EncoderVars {
    pub embed: EmbedVars,
    pub blocks: Vec<BlockVars>,
    pub fusion: FusionVars,
}

fn enter_block(tape: &mut Tape, w: &BlockWeights) -> BlockVars {
    BlockVars {
        ln1_gain: tape.leaf(w.ln1_gain.clone()),
        ln1_bias: tape.leaf(w.ln1_bias.clone()),
        wq: tape.leaf(w.wq.clone()),
        bq: tape.leaf(w.bq.clone()),
        wk: tape.leaf(w.wk.clone()),
        bk: tape.leaf(w.bk.clone()),
        wv: tape.leaf(w.wv.clone()),
        bv: tape.leaf(w.bv.clone()),
        wo: tape.leaf(w.wo.clone()),
        bo: tape.leaf(w.bo.clone()),
        ln2_gain: tape.leaf(w.ln2_gain.clone()),
        ln2_bias: tape.leaf(w.ln2_bias.clone()),
        w1: tape.leaf(w.w1.clone()),
        b1: tape.leaf(w.b1.clone()),
        w2: tape.leaf(w.w2.clone()),
        b2: tape.leaf(w.b2.clone()),
    }
}

fn enter_embed(tape: &mut Tape, w: &EmbedWeights) -> EmbedVars {
    EmbedVars {
        proj: tape.leaf(w.proj.clone()),
        pos: tape.leaf(w.pos.clone()),
    }
}

fn enter_fusion(tape: &mut Tape, w: &FusionWeights) -> FusionVars {
    FusionVars {
        layers: w
            .layers
            .iter()
            .map(|(m, b)| (tape.leaf(m.clone()), tape.leaf(b.clone())))
            .collect(),
    }
}

/// Put every weight matrix onto the tape as a leaf.
pub fn enter_weights(tape: &mut Tape, w: &EncoderWeights) -> EncoderVars {
    EncoderVars {
        embed: enter_embed(tape, &w.embed),
        blocks: w.blocks.iter().map(|b| enter_block(tape, b)).collect(),
        fusion: enter_fusion(tape, &w.fusion),
    }
}

/// Project raw token features and add the position table:
/// `H₀ = X·proj + pos`.
pub fn embed(tape: &mut Tape, vars: &EmbedVars, input: VarId) -> VarId {
    let projected = tape.matmul(input, vars.proj);
    tape.add(projected, vars.pos)
}

/// A block's output token matrix plus its attention map (softmax rows:
/// queries; columns: keys), which candidate elimination scores against.
#[derive(Debug, Clone, Copy)]
pub struct BlockOutput {
    pub out: VarId,
    pub attention: VarId,
}

/// One pre-norm transformer block with a single attention head:
///
/// ```text
/// x₁ = x + (softmax(QKᵀ/√d)·V)·Wo + bo     Q,K,V from LN₁(x)
/// y  = x₁ + W₂·gelu(W₁·LN₂(x₁) + b₁) + b₂
/// ```
///
/// With all-zero weights both additions vanish and the block is an exact
/// identity — the basis for several invariant checks.
pub fn block_forward(tape: &mut Tape, x: VarId, w: &BlockVars) -> BlockOutput {
    let dim = tape.value(x).ncols();
    let h = tape.layer_norm_rows(x, w.ln1_gain, w.ln1_bias);
    let q_proj = tape.matmul(h, w.wq);
    let q = tape.add_row(q_proj, w.bq);
    let k_proj = tape.matmul(h, w.wk);
    let k = tape.add_row(k_proj, w.bk);
    let v_proj = tape.matmul(h, w.wv);
    let v = tape.add_row(v_proj, w.bv);

    let kt = tape.transpose(k);
    let scores = tape.matmul(q, kt);
    let scaled = tape.scale(scores, 1.0 / (dim as f64).sqrt());
    let attention = tape.softmax_rows(scaled);

    let mixed = tape.matmul(attention, v);
    let projected = tape.matmul(mixed, w.wo);
    let attn_out = tape.add_row(projected, w.bo);
    let x1 = tape.add(x, attn_out);

    let h2 = tape.layer_norm_rows(x1, w.ln2_gain, w.ln2_bias);
    let ffn1 = tape.matmul(h2, w.w1);
    let ffn1b = tape.add_row(ffn1, w.b1);
    let act = tape.gelu(ffn1b);
    let ffn2 = tape.matmul(act, w.w2);
    let ffn2b = tape.add_row(ffn2, w.b2);
    let out = tape.add(x1, ffn2b);

    BlockOutput { out, attention }
}

/// Outcome of one candidate-elimination stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    /// Rows (positions in the current tensor) that survive, ascending.
    /// Always begins with the full template span.
    pub kept_rows: Vec<usize>,
    /// Per-search-token score: mean attention received from the template
    /// queries, indexed relative to the first search row.
    pub scores: Vec<f64>,
}

/// Score search tokens by the mean attention the template pays them and
/// keep the best `ceil(keep_ratio · S)`.
///
/// Ties are broken toward the lower token id, and the surviving rows keep
/// their original relative order. Template tokens always survive.
pub fn eliminate_candidates(
    attention: &Array2<f64>,
    template_len: usize,
    keep_ratio: f64,
    token_ids: &[usize],
) -> Elimination {
    let total = token_ids.len();
    assert_eq!(
        attention.ncols(),
        total,
        "one token id per attention column"
    );
    assert!(
        attention.nrows() >= template_len,
        "attention must include the template query rows"
    );
    assert!(template_len < total, "need at least one search token");
    let search = total - template_len;

    let scores: Vec<f64> = (template_len..total)
        .map(|j| {
            (0..template_len)
                .map(|i| attention[(i, j)])
                .sum::<f64>()
                / template_len as f64
        })
        .collect();

    let keep = keep_count(keep_ratio, search);
    let mut order: Vec<usize> = (0..search).collect();
    order.sort_by(|a, b| {
        scores[*b]
            .total_cmp(&scores[*a])
            .then_with(|| token_ids[template_len + *a].cmp(&token_ids[template_len + *b]))
    });
    let mut kept: Vec<usize> = order[..keep]
        .iter()
        .map(|s| template_len + s)
        .collect();
    kept.sort_unstable();

    let mut kept_rows = Vec::with_capacity(template_len + keep);
    kept_rows.extend(0..template_len);
    kept_rows.extend(kept);
    Elimination { kept_rows, scores }
}

/// Scatter a pruned stream back into the full token layout, zero-filling
/// the positions of eliminated tokens.
pub fn pad_restore(
    tape: &mut Tape,
    x: VarId,
    token_ids: &[usize],
    total_tokens: usize,
) -> VarId {
    tape.scatter_rows(x, token_ids.to_vec(), total_tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::config::EncoderConfig;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_input(tokens: usize, dim: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        crate::encoder::weights::uniform_matrix(&mut rng, tokens, dim)
    }

    #[test]
    fn zero_weights_make_the_block_an_exact_identity() {
        let config = EncoderConfig::default();
        let weights = EncoderWeights::zeros(&config);
        let x = random_input(7, config.embed_dim, 3);
        let mut tape = Tape::new();
        let vx = tape.leaf(x.clone());
        let vars = enter_weights(&mut tape, &weights);
        let out = block_forward(&mut tape, vx, &vars.blocks[0]);
        assert_eq!(tape.value(out.out), &x);
    }

    #[test]
    fn attention_rows_are_distributions() {
        let config = EncoderConfig::default();
        let weights = EncoderWeights::init(&config);
        let x = random_input(9, config.embed_dim, 4);
        let mut tape = Tape::new();
        let vx = tape.leaf(x);
        let vars = enter_weights(&mut tape, &weights);
        let out = block_forward(&mut tape, vx, &vars.blocks[0]);
        let att = tape.value(out.attention);
        assert_eq!(att.dim(), (9, 9));
        for row in att.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn embed_projects_and_adds_positions() {
        let mut config = EncoderConfig::default();
        config.template_tokens = 1;
        config.search_tokens = 2;
        config.input_dim = 2;
        config.embed_dim = 2;
        let weights = EncoderWeights {
            embed: crate::encoder::weights::EmbedWeights {
                proj: array![[1.0, 0.0], [0.0, 2.0]],
                pos: array![[10.0, 10.0], [20.0, 20.0], [30.0, 30.0]],
            },
            ..EncoderWeights::zeros(&config)
        };
        let mut tape = Tape::new();
        let input = tape.leaf(array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]);
        let vars = enter_weights(&mut tape, &weights);
        let h0 = embed(&mut tape, &vars.embed, input);
        assert_eq!(
            tape.value(h0),
            &array![[11.0, 12.0], [22.0, 24.0], [33.0, 36.0]]
        );
    }

    #[test]
    fn elimination_scores_are_template_column_means() {
        // 2 template + 3 search tokens. Rows are queries.
        let attention = array![
            [0.2, 0.2, 0.1, 0.3, 0.2],
            [0.2, 0.2, 0.3, 0.1, 0.2],
            [0.2, 0.2, 0.2, 0.2, 0.2],
            [0.2, 0.2, 0.2, 0.2, 0.2],
            [0.2, 0.2, 0.2, 0.2, 0.2],
        ];
        let e = eliminate_candidates(&attention, 2, 0.7, &[0, 1, 2, 3, 4]);
        assert_eq!(e.scores, vec![0.2, 0.2, 0.2]);
        // ceil(0.7·3) = 3: everything survives.
        assert_eq!(e.kept_rows, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn elimination_keeps_best_scored_tokens_in_order() {
        let attention = array![
            [0.1, 0.1, 0.05, 0.40, 0.35],
            [0.1, 0.1, 0.15, 0.40, 0.25],
        ];
        // Scores: token2 = 0.10, token3 = 0.40, token4 = 0.30.
        let e = eliminate_candidates(&attention, 2, 0.5, &[0, 1, 2, 3, 4]);
        // ceil(0.5·3) = 2 kept: tokens 3 and 4, order preserved.
        assert_eq!(e.kept_rows, vec![0, 1, 3, 4]);
    }

    #[test]
    fn elimination_ties_prefer_lower_token_id() {
        let attention = array![[0.25, 0.25, 0.25, 0.25]];
        // One template token, three search tokens, all scores equal.
        let e = eliminate_candidates(&attention, 1, 0.4, &[0, 5, 6, 7]);
        // ceil(0.4·3) = 2: the two lowest ids win the tie.
        assert_eq!(e.kept_rows, vec![0, 1, 2]);
    }

    #[test]
    fn pad_restore_zero_fills_dropped_positions() {
        let mut tape = Tape::new();
        let pruned = tape.leaf(array![[1.0, 1.0], [2.0, 2.0], [4.0, 4.0]]);
        let restored = pad_restore(&mut tape, pruned, &[0, 1, 3], 5);
        assert_eq!(
            tape.value(restored),
            &array![
                [1.0, 1.0],
                [2.0, 2.0],
                [0.0, 0.0],
                [4.0, 4.0],
                [0.0, 0.0]
            ]
        );
    }
}
