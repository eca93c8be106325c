//! Stratified hold-out split and stratified k-fold assignment.

use crate::error::{Error, Result};
use crate::seed;
use rand::seq::SliceRandom;

/// Fraction of rows held out for testing, as a ratio of integers.
pub const TEST_NUMERATOR: usize = 3;
pub const TEST_DENOMINATOR: usize = 10;

fn class_members(labels: &[u8]) -> Result<[Vec<usize>; 2]> {
    let mut members = [Vec::new(), Vec::new()];
    for (i, &y) in labels.iter().enumerate() {
        match y {
            0 | 1 => members[y as usize].push(i),
            other => {
                return Err(Error::Validation(format!("label {other} at row {i} is not 0/1")));
            }
        }
    }
    Ok(members)
}

/// Row indices of a two-way split, each ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified 70/30 split; `ceil(0.3·n)` test rows shared across classes by largest remainder.
pub fn split_70_30(labels: &[u8], seed: u64) -> Result<Split> {
    let members = class_members(labels)?;
    for (class, m) in members.iter().enumerate() {
        if m.len() < 2 {
            return Err(Error::Stratification(format!(
                "class {class} has {} rows; a split needs at least 2",
                m.len()
            )));
        }
    }
    let n = labels.len();
    let n_test = (TEST_NUMERATOR * n).div_ceil(TEST_DENOMINATOR);
    // Largest-remainder allocation of n_test over the two classes.
    let exact: Vec<(usize, usize)> = members
        .iter()
        .map(|m| (n_test * m.len() / n, n_test * m.len() % n))
        .collect();
    let mut alloc = [exact[0].0, exact[1].0];
    let short = n_test - alloc[0] - alloc[1];
    if short > 0 {
        // Ties go to the larger class, then class 0.
        let winner = if exact[1].1 > exact[0].1
            || (exact[1].1 == exact[0].1 && members[1].len() > members[0].len())
        {
            1
        } else {
            0
        };
        alloc[winner] += short;
    }
    for (c, m) in members.iter().enumerate() {
        alloc[c] = alloc[c].clamp(1, m.len() - 1);
    }

    let mut train = Vec::with_capacity(n);
    let mut test = Vec::with_capacity(n_test);
    for (c, m) in members.iter().enumerate() {
        let mut shuffled = m.clone();
        shuffled.shuffle(&mut seed::rng(seed::derive(seed, &[c as u64])));
        test.extend_from_slice(&shuffled[..alloc[c]]);
        train.extend_from_slice(&shuffled[alloc[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Fold index of every row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folds {
    pub n_folds: usize,
    pub assignment: Vec<usize>,
}

impl Folds {
    /// `(training rows, validation rows)` for fold `k`, each ascending.
    pub fn split(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        let (val, train): (Vec<usize>, Vec<usize>) =
            (0..self.assignment.len()).partition(|&i| self.assignment[i] == k);
        (train, val)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffles each class with the seed and deals its rows round-robin over the folds,
/// continuing the deal position from one class to the next.
pub fn stratified_kfold(labels: &[u8], folds: usize, seed: u64) -> Result<Folds> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let members = class_members(labels)?;
    for (class, m) in members.iter().enumerate() {
        if m.len() < folds {
            return Err(Error::Stratification(format!(
                "class {class} has {} rows, fewer than {folds} folds",
                m.len()
            )));
        }
    }
    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for (c, m) in members.iter().enumerate() {
        let mut shuffled = m.clone();
        shuffled.shuffle(&mut seed::rng(seed::derive(seed, &[c as u64])));
        for (i, &row) in shuffled.iter().enumerate() {
            assignment[row] = (offset + i) % folds;
        }
        offset += m.len();
    }
    Ok(Folds {
        n_folds: folds,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(pos: usize, neg: usize) -> Vec<u8> {
        // Interleave so class membership is not contiguous.
        let mut v = vec![1u8; pos];
        v.extend(std::iter::repeat_n(0u8, neg));
        v.shuffle(&mut seed::rng(7));
        v
    }

    #[test]
    fn split_400_gives_280_120() {
        let y = labels(250, 150);
        let s = split_70_30(&y, 42).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (280, 120));
        let test_pos = s.test.iter().filter(|&&i| y[i] == 1).count();
        assert_eq!(test_pos, 75);
        assert_eq!(split_70_30(&y, 42).unwrap(), s);
        assert_ne!(split_70_30(&y, 43).unwrap(), s);
    }

    #[test]
    fn split_needs_two_per_class() {
        let mut y = vec![0u8; 10];
        y[3] = 1;
        assert!(matches!(split_70_30(&y, 42), Err(Error::Stratification(_))));
    }

    #[test]
    fn kfold_100_rows_60_40() {
        let y = labels(60, 40);
        let f = stratified_kfold(&y, 10, 42).unwrap();
        for k in 0..10 {
            let (_, val) = f.split(k);
            let pos = val.iter().filter(|&&i| y[i] == 1).count();
            assert_eq!((pos, val.len() - pos), (6, 4));
        }
        assert_eq!(stratified_kfold(&y, 10, 42).unwrap(), f);
    }

    #[test]
    fn kfold_rejects_small_class() {
        let y = labels(20, 9);
        assert!(matches!(stratified_kfold(&y, 10, 42), Err(Error::Stratification(_))));
    }

    proptest! {
        #[test]
        fn kfold_partitions_and_balances(pos in 10usize..80, neg in 10usize..80, k in 2usize..11, seed in any::<u64>()) {
            let y = labels(pos, neg);
            let f = stratified_kfold(&y, k, seed).unwrap();
            let mut seen = vec![0; y.len()];
            for fold in 0..k {
                let (train, val) = f.split(fold);
                prop_assert_eq!(train.len() + val.len(), y.len());
                for &i in &val {
                    seen[i] += 1;
                }
                let vp = val.iter().filter(|&&i| y[i] == 1).count() as f64;
                let vn = (val.len() as f64) - vp;
                prop_assert!((vp - pos as f64 / k as f64).abs() < 1.0 + 1e-9);
                prop_assert!((vn - neg as f64 / k as f64).abs() < 1.0 + 1e-9);
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }

        #[test]
        fn split_is_a_stratified_partition(pos in 2usize..200, neg in 2usize..200, seed in any::<u64>()) {
            let y = labels(pos, neg);
            let s = split_70_30(&y, seed).unwrap();
            let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
            let tp = s.test.iter().filter(|&&i| y[i] == 1).count() as f64;
            let expected = s.test.len() as f64 * pos as f64 / y.len() as f64;
            prop_assert!((tp - expected).abs() <= 1.0 + 1e-9);
        }
    }
}
