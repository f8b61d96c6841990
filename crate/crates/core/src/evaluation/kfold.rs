use crate::error::{Error, Result};
use crate::rng::SeededRng;

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "k-fold needs 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

fn deal(order: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut folds = vec![Vec::with_capacity(order.len() / k + 1); k];
    for (pos, &i) in order.iter().enumerate() {
        folds[pos % k].push(i);
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    folds
}

/// Seeded shuffle of `0..n` dealt round-robin into `k` folds. Fold sizes
/// differ by at most one; each fold is returned sorted.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    check_k(n, k)?;
    let mut order: Vec<usize> = (0..n).collect();
    SeededRng::new(seed).shuffle(&mut order);
    Ok(deal(&order, k))
}

/// Like [`kfold_indices`] but each class is shuffled separately and the
/// classes are dealt one after another, so every fold receives each class's
/// share to within one sample.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    check_k(labels.len(), k)?;
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut rng = SeededRng::new(seed);
    let mut order = Vec::with_capacity(labels.len());
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut members);
        order.extend(members);
    }
    Ok(deal(&order, k))
}
