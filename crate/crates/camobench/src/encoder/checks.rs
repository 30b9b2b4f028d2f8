//! Named self-checks and output fingerprints for the encoder.
//!
//! [`run_invariant_suite`] exercises the structural guarantees — token
//! schedule, template survival, restore layout, blend-weight reductions,
//! determinism — each as a pass/fail outcome with a human-readable
//! detail. [`gamma_sweep`] fingerprints the fused output across blend
//! weights, and [`encoder_check`] bundles everything (gradient probes
//! included) into one report. The `encoder-check` subcommand is a thin
//! shell around that report.

use ndarray::Array2;
use serde::Serialize;

use super::blocks::enter_weights;
use super::config::EncoderConfig;
use super::fusion::{mls_forward, MlsOutput};
use super::gradcheck::run_gradient_checks;
use super::tape::Tape;
use super::weights::EncoderWeights;
use super::EncoderError;

/// FNV-1a (64-bit) over the shape and the row-major little-endian bytes
/// of every entry. Stable across platforms for identical fp64 values, so
/// two machines can compare runs by fingerprint alone.
pub fn tensor_checksum(m: &Array2<f64>) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(PRIME);
        }
    };
    eat(&(m.nrows() as u64).to_le_bytes());
    eat(&(m.ncols() as u64).to_le_bytes());
    for v in m.iter() {
        eat(&v.to_le_bytes());
    }
    format!("{hash:016x}")
}

/// One named self-check: what was verified and whether it held.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// What was compared, with numbers — useful when a check fails.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.passed { "ok  " } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Fused-output fingerprint at one blend weight.
#[derive(Debug, Clone, Serialize)]
pub struct GammaSweepPoint {
    pub gamma: f64,
    pub checksum: String,
}

/// Everything `encoder-check` reports: configuration echoes, per-level
/// fingerprints, named invariants, and gradient-probe summaries.
#[derive(Debug, Clone, Serialize)]
pub struct EncoderCheckReport {
    pub config: EncoderConfig,
    /// Search-token count after each block of the pruned stream.
    pub search_token_schedule: Vec<usize>,
    /// Fingerprint of each full-stream level output, block order.
    pub level_checksums: Vec<String>,
    pub fused_checksum: String,
    pub restored_checksum: String,
    pub invariants: Vec<CheckOutcome>,
    pub gradient_checks: Vec<CheckOutcome>,
    pub gamma_sweep: Vec<GammaSweepPoint>,
}

impl EncoderCheckReport {
    pub fn all_passed(&self) -> bool {
        self.invariants.iter().all(|c| c.passed) && self.gradient_checks.iter().all(|c| c.passed)
    }
}

/// Input seed used by the self-checks: derived from the weight seed so a
/// config fully determines the run.
fn input_seed(config: &EncoderConfig) -> u64 {
    config.seed.wrapping_add(1)
}

/// One deterministic forward pass from the config alone.
fn forward_once(config: &EncoderConfig) -> (Tape, MlsOutput) {
    let weights = EncoderWeights::init(config);
    let input = EncoderWeights::sample_input(config, input_seed(config));
    let mut tape = Tape::new();
    let v_input = tape.leaf(input);
    let vars = enter_weights(&mut tape, &weights);
    let out = mls_forward(&mut tape, config, &vars, v_input, None);
    (tape, out)
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Run the named structural checks for `config`.
///
/// Every outcome is independent; a failure in one does not stop the rest.
pub fn run_invariant_suite(config: &EncoderConfig) -> Vec<CheckOutcome> {
    let mut outcomes = Vec::new();
    let (tape, out) = forward_once(config);

    // Token counts after each block must follow the configured schedule.
    let expected: Vec<usize> = config
        .search_token_schedule()
        .iter()
        .map(|s| config.template_tokens + s)
        .collect();
    outcomes.push(CheckOutcome::new(
        "token-schedule",
        out.trace.tokens_after_block == expected,
        format!(
            "observed {:?}, expected {:?}",
            out.trace.tokens_after_block, expected
        ),
    ));

    // Template tokens may never be eliminated, and survivor ids must stay
    // in ascending (original) order at every stage.
    let template_ids: Vec<usize> = (0..config.template_tokens).collect();
    let template_ok = out.trace.eliminations.iter().all(|e| {
        template_ids
            .iter()
            .all(|id| e.kept_ids.contains(id) && !e.dropped_ids.contains(id))
    });
    outcomes.push(CheckOutcome::new(
        "template-survival",
        template_ok,
        format!(
            "{} elimination stages, template ids {:?} kept in all",
            out.trace.eliminations.len(),
            template_ids
        ),
    ));
    let ascending_ok = out
        .trace
        .eliminations
        .iter()
        .all(|e| e.kept_ids.windows(2).all(|w| w[0] < w[1]))
        && out.final_token_ids.windows(2).all(|w| w[0] < w[1]);
    outcomes.push(CheckOutcome::new(
        "ascending-ids",
        ascending_ok,
        format!("final survivor ids {:?}", out.final_token_ids),
    ));

    // The restored tensor must hold the survivors at their original rows
    // and exact zeros everywhere else.
    let restored = tape.value(out.restored);
    // Survivor rows are covered by the blend reductions below; here only
    // the eliminated rows' zero fill matters.
    let mut layout_ok = restored.nrows() == config.total_tokens();
    for row in 0..restored.nrows() {
        if !out.final_token_ids.contains(&row) && restored.row(row).iter().any(|v| *v != 0.0) {
            layout_ok = false;
        }
    }
    outcomes.push(CheckOutcome::new(
        "restore-zero-fill",
        layout_ok,
        format!(
            "{} survivor rows, {} zero-filled",
            out.final_token_ids.len(),
            config.total_tokens() - out.final_token_ids.len()
        ),
    ));

    // Output shape must match the embedded input regardless of pruning.
    let fused = tape.value(out.fused);
    let shape_ok = fused.dim() == (config.total_tokens(), config.embed_dim);
    outcomes.push(CheckOutcome::new(
        "output-shape",
        shape_ok,
        format!(
            "fused is {}×{}, expected {}×{}",
            fused.nrows(),
            fused.ncols(),
            config.total_tokens(),
            config.embed_dim
        ),
    ));

    // γ = 0 must reproduce the restored stream bitwise; γ = 1 the fused
    // levels; γ = 0.5 the exact average (0.5 scaling is lossless in
    // binary floating point).
    let at_gamma = |gamma: f64| {
        let mut c = config.clone();
        c.gamma = gamma;
        let (tape, out) = forward_once(&c);
        (
            tape.value(out.fused).clone(),
            tape.value(out.restored).clone(),
            tape.value(out.fused_levels).clone(),
        )
    };
    let (f0, r0, _) = at_gamma(0.0);
    outcomes.push(CheckOutcome::new(
        "gamma-zero-reduction",
        f0 == r0,
        format!("max |F(0) − restored| = {:.3e}", max_abs_diff(&f0, &r0)),
    ));
    let (f1, _, m1) = at_gamma(1.0);
    outcomes.push(CheckOutcome::new(
        "gamma-one-reduction",
        f1 == m1,
        format!("max |F(1) − fused levels| = {:.3e}", max_abs_diff(&f1, &m1)),
    ));
    let (fh, _, _) = at_gamma(0.5);
    let midpoint = (&f0 + &f1) * 0.5;
    outcomes.push(CheckOutcome::new(
        "gamma-midpoint",
        fh == midpoint,
        format!(
            "max |F(0.5) − ½(F(0)+F(1))| = {:.3e}",
            max_abs_diff(&fh, &midpoint)
        ),
    ));
    // General affinity: F(γ) = F(0) + γ·(F(1) − F(0)) up to rounding.
    let probe_gamma = 0.3;
    let (fp, _, _) = at_gamma(probe_gamma);
    let affine = &f0 + &((&f1 - &f0) * probe_gamma);
    let affine_err = max_abs_diff(&fp, &affine);
    outcomes.push(CheckOutcome::new(
        "gamma-affinity",
        affine_err <= 1e-12,
        format!("max |F({probe_gamma}) − affine interpolant| = {affine_err:.3e}"),
    ));

    // keep_ratio = 1 disables elimination entirely: the restore map is
    // the identity, so the blend degenerates to a plain two-term mix of
    // full-length streams and no token id is ever dropped.
    let mut no_prune = config.clone();
    no_prune.keep_ratio = 1.0;
    let (_, out_np) = forward_once(&no_prune);
    let np_ok = out_np.final_token_ids == (0..config.total_tokens()).collect::<Vec<_>>()
        && out_np.trace.eliminations.iter().all(|e| e.dropped_ids.is_empty());
    outcomes.push(CheckOutcome::new(
        "restore-identity-at-full-keep",
        np_ok,
        format!(
            "keep_ratio 1.0 kept {} of {} tokens",
            out_np.final_token_ids.len(),
            config.total_tokens()
        ),
    ));

    // All-zero weights make every block an identity map, so the pruned
    // stream output equals the (zero) embedding and the fused output is
    // all zeros.
    let zero_w = EncoderWeights::zeros(config);
    let input = EncoderWeights::sample_input(config, input_seed(config));
    let mut ztape = Tape::new();
    let v_input = ztape.leaf(input);
    let zvars = enter_weights(&mut ztape, &zero_w);
    let zout = mls_forward(&mut ztape, config, &zvars, v_input, None);
    let zfused = ztape.value(zout.fused);
    let zeros_ok = zfused.iter().all(|v| *v == 0.0);
    outcomes.push(CheckOutcome::new(
        "zero-weight-identity",
        zeros_ok,
        format!(
            "max |F| under zero weights = {:.3e}",
            zfused.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        ),
    ));

    // Bit-for-bit determinism: a second run from the same config must
    // fingerprint identically.
    let (tape2, out2) = forward_once(config);
    let sum1 = tensor_checksum(tape.value(out.fused));
    let sum2 = tensor_checksum(tape2.value(out2.fused));
    outcomes.push(CheckOutcome::new(
        "determinism",
        sum1 == sum2,
        format!("fused checksums {sum1} / {sum2}"),
    ));

    outcomes
}

/// Fingerprint the fused output at each blend weight, same weights and
/// input throughout. Nondegenerate weights give pairwise-distinct sums.
pub fn gamma_sweep(config: &EncoderConfig, gammas: &[f64]) -> Vec<GammaSweepPoint> {
    gammas
        .iter()
        .map(|&gamma| {
            let mut c = config.clone();
            c.gamma = gamma;
            let (tape, out) = forward_once(&c);
            GammaSweepPoint {
                gamma,
                checksum: tensor_checksum(tape.value(out.fused)),
            }
        })
        .collect()
}

/// The standard sweep grid: γ ∈ {0.1, 0.2, …, 1.0}.
pub fn standard_gamma_grid() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) / 10.0).collect()
}

/// Run the full self-check: structural invariants, gradient probes, and
/// the γ sweep, with output fingerprints for cross-machine comparison.
pub fn encoder_check(config: &EncoderConfig) -> Result<EncoderCheckReport, EncoderError> {
    config.validate()?;
    let (tape, out) = forward_once(config);
    let level_checksums = out
        .level_stack
        .iter()
        .map(|&v| tensor_checksum(tape.value(v)))
        .collect();
    let gradient_checks = run_gradient_checks(config.seed)
        .into_iter()
        .map(|r| {
            CheckOutcome::new(
                &format!("grad.{}", r.parameter),
                r.passed(),
                format!(
                    "max rel err {:.3e} over {} entries (tol {:.0e})",
                    r.max_rel_error, r.checked, r.tolerance
                ),
            )
        })
        .collect();
    Ok(EncoderCheckReport {
        config: config.clone(),
        search_token_schedule: config.search_token_schedule(),
        level_checksums,
        fused_checksum: tensor_checksum(tape.value(out.fused)),
        restored_checksum: tensor_checksum(tape.value(out.restored)),
        invariants: run_invariant_suite(config),
        gradient_checks,
        gamma_sweep: gamma_sweep(config, &standard_gamma_grid()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_separates_values_shapes_and_layouts() {
        let a = Array2::from_shape_vec((2, 2), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Array2::from_shape_vec((2, 2), vec![1.0, 2.0, 3.0, 4.0 + 1e-15]).unwrap();
        let c = Array2::from_shape_vec((1, 4), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(tensor_checksum(&a), tensor_checksum(&a.clone()));
        assert_ne!(tensor_checksum(&a), tensor_checksum(&b));
        assert_ne!(tensor_checksum(&a), tensor_checksum(&c));
        assert_eq!(tensor_checksum(&a).len(), 16);
    }

    #[test]
    fn default_config_passes_every_invariant() {
        for outcome in run_invariant_suite(&EncoderConfig::default()) {
            assert!(outcome.passed, "{outcome}");
        }
    }

    #[test]
    fn single_stage_config_passes_every_invariant() {
        let config = EncoderConfig {
            n_blocks: 4,
            embed_dim: 8,
            input_dim: 6,
            template_tokens: 3,
            search_tokens: 9,
            prune_at: vec![2],
            keep_ratio: 0.5,
            mlp_hidden: vec![2],
            ..EncoderConfig::default()
        };
        config.validate().unwrap();
        for outcome in run_invariant_suite(&config) {
            assert!(outcome.passed, "{outcome}");
        }
    }

    #[test]
    fn sweep_checksums_are_pairwise_distinct() {
        let points = gamma_sweep(&EncoderConfig::default(), &standard_gamma_grid());
        assert_eq!(points.len(), 10);
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                assert_ne!(
                    points[i].checksum, points[j].checksum,
                    "γ={} and γ={} collide",
                    points[i].gamma, points[j].gamma
                );
            }
        }
    }

    #[test]
    fn full_report_passes_and_serializes() {
        let report = encoder_check(&EncoderConfig::default()).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.level_checksums.len(), 12);
        assert_eq!(report.search_token_schedule, vec![12, 12, 12, 9, 9, 9, 7, 7, 7, 5, 5, 5]);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"gamma_sweep\""));
    }

    #[test]
    fn invalid_config_is_rejected_before_any_run() {
        let config = EncoderConfig {
            gamma: 1.5,
            ..EncoderConfig::default()
        };
        assert!(encoder_check(&config).is_err());
    }
}
