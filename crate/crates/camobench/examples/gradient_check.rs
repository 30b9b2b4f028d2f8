//! Verify the tape's analytic gradients against central differences.
//!
//! Every differentiable piece — a bare linear map, the level-fusion MLP,
//! a full transformer block, and the whole dual-stream forward pass — is
//! probed entry by entry: nudge one parameter, re-run, compare the slope
//! with what backpropagation claimed. The full-encoder probe replays the
//! recorded token selection so a nudge cannot flip a discrete choice.
//! Run with `cargo run --example gradient_check`.

use camobench::encoder::{
    check_block_forward, check_level_fusion_mlp, check_linear_map, check_mls_forward,
};

fn main() {
    let seed = 2024;

    println!("linear map y = xW + b (exact to machine precision):");
    for report in check_linear_map(seed) {
        println!("  {report}");
        assert!(report.passed());
    }

    println!("\nlevel-fusion MLP (ReLU between layers):");
    for report in check_level_fusion_mlp(seed + 1) {
        println!("  {report}");
        assert!(report.passed());
    }

    println!("\ntransformer block (softmax, layer norm, GELU):");
    for report in check_block_forward(seed + 2) {
        println!("  {report}");
        assert!(report.passed());
    }

    println!("\nfull dual-stream encoder (frozen token selection):");
    for report in check_mls_forward(seed + 3) {
        println!("  {report}");
        assert!(report.passed());
    }

    println!("\nall gradients match central differences");
}
