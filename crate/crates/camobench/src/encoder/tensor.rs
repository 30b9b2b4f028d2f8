//! Token features paired with their original positions.

use ndarray::Array2;

/// A block of token features plus the original index of each token.
///
/// Token ids stay attached through candidate elimination, so a pruned
/// stream can always be scattered back into the full-length layout. The
/// ids are strictly ascending: pruning preserves token order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    /// T×C feature matrix.
    pub data: Array2<f64>,
    /// Original position of each row; strictly ascending, length T.
    pub token_ids: Vec<usize>,
}

impl FeatureTensor {
    /// Wrap a feature matrix with identity token ids `0..T`.
    pub fn new(data: Array2<f64>) -> Self {
        let token_ids = (0..data.nrows()).collect();
        Self { data, token_ids }
    }

    /// Wrap a feature matrix with explicit ids. Panics unless the ids are
    /// strictly ascending and match the row count — violating either means
    /// the caller's bookkeeping is broken, not the data.
    pub fn with_ids(data: Array2<f64>, token_ids: Vec<usize>) -> Self {
        assert_eq!(data.nrows(), token_ids.len(), "one id per row");
        assert!(
            token_ids.windows(2).all(|w| w[0] < w[1]),
            "token ids must be strictly ascending"
        );
        Self { data, token_ids }
    }

    pub fn tokens(&self) -> usize {
        self.data.nrows()
    }

    pub fn channels(&self) -> usize {
        self.data.ncols()
    }

    /// Keep the rows at `rows` (ascending positions into this tensor).
    pub fn select(&self, rows: &[usize]) -> Self {
        assert!(rows.windows(2).all(|w| w[0] < w[1]), "rows must ascend");
        let mut data = Array2::zeros((rows.len(), self.channels()));
        let mut token_ids = Vec::with_capacity(rows.len());
        for (i, &r) in rows.iter().enumerate() {
            data.row_mut(i).assign(&self.data.row(r));
            token_ids.push(self.token_ids[r]);
        }
        Self { data, token_ids }
    }
}
