//! Encoder hyperparameters.

use serde::{Deserialize, Serialize};

use super::EncoderError;

/// Shape and behavior of the dual-stream encoder.
///
/// The defaults describe a desk-scale model: big enough that every code
/// path (pruning, restoration, fusion) is exercised, small enough that
/// finite-difference checks finish in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    /// Transformer blocks, which is also the number of feature levels
    /// entering the fusion MLP.
    pub n_blocks: usize,
    /// Channels per token.
    pub embed_dim: usize,
    /// Raw feature width of the input tokens before projection.
    pub input_dim: usize,
    /// Leading tokens that describe the target template; never pruned.
    pub template_tokens: usize,
    /// Trailing tokens from the search region; candidates for elimination.
    pub search_tokens: usize,
    /// Fraction of search tokens kept at each elimination stage; the kept
    /// count is `ceil(keep_ratio * current_search_tokens)`.
    pub keep_ratio: f64,
    /// 1-based indices of the blocks after which elimination runs.
    pub prune_at: Vec<usize>,
    /// Blend weight: `(1−γ)·restored_stream + γ·fused_levels`.
    pub gamma: f64,
    /// Hidden widths of the level-fusion MLP. Input width is `n_blocks`,
    /// output width is 1.
    pub mlp_hidden: Vec<usize>,
    /// Seed for weight initialization.
    pub seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            n_blocks: 12,
            embed_dim: 16,
            input_dim: 8,
            template_tokens: 4,
            search_tokens: 12,
            keep_ratio: 0.7,
            prune_at: vec![4, 7, 10],
            gamma: 0.1,
            mlp_hidden: vec![6, 3],
            seed: 7,
        }
    }
}

impl EncoderConfig {
    /// Total tokens entering the encoder.
    pub fn total_tokens(&self) -> usize {
        self.template_tokens + self.search_tokens
    }

    /// Layer widths of the fusion MLP, input to output.
    pub fn mlp_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.mlp_hidden.len() + 2);
        dims.push(self.n_blocks);
        dims.extend_from_slice(&self.mlp_hidden);
        dims.push(1);
        dims
    }

    /// Search-token count after each block (1-based positions 1..=n),
    /// applying each elimination stage in order.
    pub fn search_token_schedule(&self) -> Vec<usize> {
        let mut s = self.search_tokens;
        let mut schedule = Vec::with_capacity(self.n_blocks);
        for block in 1..=self.n_blocks {
            if self.prune_at.contains(&block) {
                s = keep_count(self.keep_ratio, s);
            }
            schedule.push(s);
        }
        schedule
    }

    pub fn validate(&self) -> Result<(), EncoderError> {
        let fail = |detail: String| Err(EncoderError::InvalidConfig { detail });
        if self.n_blocks == 0 {
            return fail("n_blocks must be at least 1".into());
        }
        if self.embed_dim == 0 || self.input_dim == 0 {
            return fail("embed_dim and input_dim must be positive".into());
        }
        if self.template_tokens == 0 || self.search_tokens == 0 {
            return fail("template_tokens and search_tokens must be positive".into());
        }
        if !(self.keep_ratio > 0.0 && self.keep_ratio <= 1.0) {
            return fail(format!(
                "keep_ratio must be in (0, 1], got {}",
                self.keep_ratio
            ));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail(format!("gamma must be in [0, 1], got {}", self.gamma));
        }
        if self.prune_at.windows(2).any(|w| w[0] >= w[1]) {
            return fail("prune_at must be strictly ascending".into());
        }
        if self
            .prune_at
            .iter()
            .any(|p| *p == 0 || *p > self.n_blocks)
        {
            return fail(format!(
                "prune_at entries must be 1-based block indices in 1..={}",
                self.n_blocks
            ));
        }
        if self.mlp_hidden.iter().any(|d| *d == 0) {
            return fail("mlp_hidden widths must be positive".into());
        }
        Ok(())
    }

    /// Apply one `key=value` override (the CLI's `--set`). `prune_at` and
    /// `mlp_hidden` take comma-separated lists.
    pub fn apply_override(&mut self, pair: &str) -> Result<(), EncoderError> {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(EncoderError::InvalidConfig {
                detail: format!("expected key=value, got {pair:?}"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |k: &str, v: &str| EncoderError::InvalidConfig {
            detail: format!("invalid value {v:?} for {k}"),
        };
        match key {
            "n_blocks" => self.n_blocks = value.parse().map_err(|_| bad(key, value))?,
            "embed_dim" => self.embed_dim = value.parse().map_err(|_| bad(key, value))?,
            "input_dim" => self.input_dim = value.parse().map_err(|_| bad(key, value))?,
            "template_tokens" => {
                self.template_tokens = value.parse().map_err(|_| bad(key, value))?
            }
            "search_tokens" => self.search_tokens = value.parse().map_err(|_| bad(key, value))?,
            "keep_ratio" => self.keep_ratio = value.parse().map_err(|_| bad(key, value))?,
            "gamma" => self.gamma = value.parse().map_err(|_| bad(key, value))?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "prune_at" => {
                self.prune_at = parse_list(value).ok_or_else(|| bad(key, value))?;
            }
            "mlp_hidden" => {
                self.mlp_hidden = parse_list(value).ok_or_else(|| bad(key, value))?;
            }
            _ => {
                return Err(EncoderError::InvalidConfig {
                    detail: format!("unknown config key {key:?}"),
                })
            }
        }
        Ok(())
    }
}

fn parse_list(value: &str) -> Option<Vec<usize>> {
    if value.is_empty() {
        return Some(Vec::new());
    }
    value
        .split(',')
        .map(|v| v.trim().parse::<usize>().ok())
        .collect()
}

/// Tokens kept by one elimination stage: `ceil(ratio * searched)`.
pub fn keep_count(keep_ratio: f64, search_tokens: usize) -> usize {
    (keep_ratio * search_tokens as f64).ceil() as usize
}
