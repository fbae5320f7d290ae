use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Assignment of every point to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub shuffle_seed: u64,
}

impl FoldPlan {
    /// Indices in fold `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&j| self.assignments[j] == fold)
            .collect()
    }

    /// Indices outside fold `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&j| self.assignments[j] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Shuffle the indices with `seed` and deal them into `k` folds; the first
/// `n mod k` folds get one extra point.
///
/// With `stratified`, each class is shuffled separately and dealt in turn,
/// so every fold gets a near-equal share of both classes.
pub fn kfold_plan(labels: &[u8], k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let mut rng = seed::rng(seed);
    let order: Vec<usize> = if stratified {
        let mut order = Vec::with_capacity(n);
        for class in 0..2u8 {
            let mut idx: Vec<usize> = (0..n).filter(|&j| labels[j] == class).collect();
            idx.shuffle(&mut rng);
            order.extend(idx);
        }
        order
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        idx
    };

    let mut assignments = vec![0; n];
    if stratified {
        for (pos, &j) in order.iter().enumerate() {
            assignments[j] = pos % k;
        }
    } else {
        let base = n / k;
        let extra = n % k;
        let mut pos = 0;
        for fold in 0..k {
            let size = base + usize::from(fold < extra);
            for &j in &order[pos..pos + size] {
                assignments[j] = fold;
            }
            pos += size;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        shuffle_seed: seed,
    })
}
