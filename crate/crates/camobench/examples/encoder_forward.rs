//! One forward pass through the dual-stream encoder, step by step.
//!
//! The pruned stream drops weak search tokens after configured blocks;
//! the full stream keeps everything and contributes one feature level per
//! block. The output blends a zero-filled restore of the pruned stream
//! with a level-axis MLP fusion of the full stack. Run with
//! `cargo run --example encoder_forward`.

use camobench::encoder::{
    enter_weights, mls_forward, tensor_checksum, EncoderConfig, EncoderWeights, Tape,
};

fn main() {
    let config = EncoderConfig::default();
    println!(
        "config: {} blocks, {} template + {} search tokens, embed dim {}",
        config.n_blocks, config.template_tokens, config.search_tokens, config.embed_dim
    );
    println!(
        "elimination after blocks {:?}, keep ratio {}, γ = {}\n",
        config.prune_at, config.keep_ratio, config.gamma
    );

    // Weights and input are seeded: the same config reproduces the same
    // numbers on any machine.
    let weights = EncoderWeights::init(&config);
    let input = EncoderWeights::sample_input(&config, config.seed + 1);

    let mut tape = Tape::new();
    let v_input = tape.leaf(input);
    let vars = enter_weights(&mut tape, &weights);
    let out = mls_forward(&mut tape, &config, &vars, v_input, None);

    // The pruned stream's search tokens shrink 12 → 9 → 7 → 5 while the
    // 4 template tokens always survive.
    println!("tokens after each block: {:?}", out.trace.tokens_after_block);
    for e in &out.trace.eliminations {
        println!(
            "  after block {:>2}: kept {:?}, dropped {:?}",
            e.after_block, e.kept_ids, e.dropped_ids
        );
    }
    println!("surviving token ids: {:?}\n", out.final_token_ids);

    // The restored tensor is full-size again, with exact zeros at every
    // eliminated token row.
    let restored = tape.value(out.restored);
    let zero_rows: Vec<usize> = (0..restored.nrows())
        .filter(|r| restored.row(*r).iter().all(|v| *v == 0.0))
        .collect();
    println!("zero-filled rows in the restore: {zero_rows:?}");

    // Fingerprints identify a run exactly; compare them across machines
    // or after refactors to prove nothing drifted.
    println!("level checksums (first three):");
    for (i, &level) in out.level_stack.iter().take(3).enumerate() {
        println!("  block {:>2}: {}", i + 1, tensor_checksum(tape.value(level)));
    }
    println!("fused output checksum: {}", tensor_checksum(tape.value(out.fused)));
    println!("fused shape: {:?}", tape.value(out.fused).dim());
}
