//! Encoder parameters and their deterministic initialization.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::EncoderConfig;

/// Initialization scale for projection matrices.
pub const INIT_STD: f64 = 0.02;

/// Parameters of one transformer block. Vectors (biases, norm gains) are
/// stored as 1×C matrices so everything lives in `Array2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockWeights {
    pub ln1_gain: Array2<f64>,
    pub ln1_bias: Array2<f64>,
    pub wq: Array2<f64>,
    pub bq: Array2<f64>,
    pub wk: Array2<f64>,
    pub bk: Array2<f64>,
    pub wv: Array2<f64>,
    pub bv: Array2<f64>,
    pub wo: Array2<f64>,
    pub bo: Array2<f64>,
    pub ln2_gain: Array2<f64>,
    pub ln2_bias: Array2<f64>,
    pub w1: Array2<f64>,
    pub b1: Array2<f64>,
    pub w2: Array2<f64>,
    pub b2: Array2<f64>,
}

/// Input projection and additive position table.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedWeights {
    /// input_dim × embed_dim.
    pub proj: Array2<f64>,
    /// total_tokens × embed_dim, added after projection.
    pub pos: Array2<f64>,
}

/// The level-fusion MLP: a (d_in × d_out, 1 × d_out) pair per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionWeights {
    pub layers: Vec<(Array2<f64>, Array2<f64>)>,
}

/// Every parameter of the encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderWeights {
    pub embed: EmbedWeights,
    pub blocks: Vec<BlockWeights>,
    pub fusion: FusionWeights,
}

/// Truncated normal: `N(0, σ)` resampled while `|v| > 2σ`.
fn trunc_normal(rng: &mut ChaCha8Rng, rows: usize, cols: usize, std: f64) -> Array2<f64> {
    let dist = Normal::new(0.0, std).expect("valid std");
    Array2::from_shape_simple_fn((rows, cols), || loop {
        let v = dist.sample(rng);
        if v.abs() <= 2.0 * std {
            return v;
        }
    })
}

impl BlockWeights {
    fn init(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let hidden = 4 * dim;
        Self {
            ln1_gain: Array2::ones((1, dim)),
            ln1_bias: Array2::zeros((1, dim)),
            wq: trunc_normal(rng, dim, dim, INIT_STD),
            bq: Array2::zeros((1, dim)),
            wk: trunc_normal(rng, dim, dim, INIT_STD),
            bk: Array2::zeros((1, dim)),
            wv: trunc_normal(rng, dim, dim, INIT_STD),
            bv: Array2::zeros((1, dim)),
            wo: trunc_normal(rng, dim, dim, INIT_STD),
            bo: Array2::zeros((1, dim)),
            ln2_gain: Array2::ones((1, dim)),
            ln2_bias: Array2::zeros((1, dim)),
            w1: trunc_normal(rng, dim, hidden, INIT_STD),
            b1: Array2::zeros((1, hidden)),
            w2: trunc_normal(rng, hidden, dim, INIT_STD),
            b2: Array2::zeros((1, dim)),
        }
    }

    /// All-zero projections (norm gains included). Such a block adds
    /// nothing to the residual stream: it is an exact identity.
    fn zeros(dim: usize) -> Self {
        let hidden = 4 * dim;
        Self {
            ln1_gain: Array2::zeros((1, dim)),
            ln1_bias: Array2::zeros((1, dim)),
            wq: Array2::zeros((dim, dim)),
            bq: Array2::zeros((1, dim)),
            wk: Array2::zeros((dim, dim)),
            bk: Array2::zeros((1, dim)),
            wv: Array2::zeros((dim, dim)),
            bv: Array2::zeros((1, dim)),
            wo: Array2::zeros((dim, dim)),
            bo: Array2::zeros((1, dim)),
            ln2_gain: Array2::zeros((1, dim)),
            ln2_bias: Array2::zeros((1, dim)),
            w1: Array2::zeros((dim, hidden)),
            b1: Array2::zeros((1, hidden)),
            w2: Array2::zeros((hidden, dim)),
            b2: Array2::zeros((1, dim)),
        }
    }
}

impl EncoderWeights {
    /// Deterministic initialization from `config.seed`: projections are
    /// truncated-normal (σ = 0.02), biases zero, norm gains one.
    pub fn init(config: &EncoderConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let embed = EmbedWeights {
            proj: trunc_normal(&mut rng, config.input_dim, config.embed_dim, INIT_STD),
            pos: trunc_normal(&mut rng, config.total_tokens(), config.embed_dim, INIT_STD),
        };
        let blocks = (0..config.n_blocks)
            .map(|_| BlockWeights::init(&mut rng, config.embed_dim))
            .collect();
        let dims = config.mlp_dims();
        let layers = dims
            .windows(2)
            .map(|w| {
                (
                    trunc_normal(&mut rng, w[0], w[1], INIT_STD),
                    Array2::zeros((1, w[1])),
                )
            })
            .collect();
        Self {
            embed,
            blocks,
            fusion: FusionWeights { layers },
        }
    }

    /// All-zero parameters; every block becomes an exact identity.
    pub fn zeros(config: &EncoderConfig) -> Self {
        let embed = EmbedWeights {
            proj: Array2::zeros((config.input_dim, config.embed_dim)),
            pos: Array2::zeros((config.total_tokens(), config.embed_dim)),
        };
        let blocks = (0..config.n_blocks)
            .map(|_| BlockWeights::zeros(config.embed_dim))
            .collect();
        let dims = config.mlp_dims();
        let layers = dims
            .windows(2)
            .map(|w| (Array2::zeros((w[0], w[1])), Array2::zeros((1, w[1]))))
            .collect();
        Self {
            embed,
            blocks,
            fusion: FusionWeights { layers },
        }
    }

    /// Deterministic sample input for checks and demos: a total_tokens ×
    /// input_dim matrix drawn from the same truncated normal family,
    /// scaled up to unit-ish magnitude.
    pub fn sample_input(config: &EncoderConfig, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        trunc_normal(
            &mut rng,
            config.total_tokens(),
            config.input_dim,
            INIT_STD,
        )
        .mapv(|v| v * 50.0)
    }
}

/// A uniform random matrix in [-1, 1], for gradient-check probes where a
/// generic (non-tiny) operating point is wanted.
pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-1.0..1.0))
}
