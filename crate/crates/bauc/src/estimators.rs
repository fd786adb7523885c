//! Counting-based reference estimators: the empirical (Mann-Whitney)
//! AUC and stratified k-fold cross-validated AUC.

use crate::classifiers::{predict_scores, train_logreg_l2, LogRegConfig};
use crate::dataset::{ClassLabel, Dataset};
use crate::numerics::RngStream;
use crate::{Error, Result};

/// Stratified fold assignment: `fold_of_sample[i]` is the fold of
/// sample `i`, in `[0, k)`. Every fold holds at least one sample of
/// each class, and within a class the fold sizes differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of_sample: Vec<usize>,
    k: usize,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self, sample: usize) -> usize {
        self.fold_of_sample[sample]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.fold_of_sample
    }

    /// Sample indices inside / outside fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for (i, &fold) in self.fold_of_sample.iter().enumerate() {
            if fold == f {
                inside.push(i);
            } else {
                outside.push(i);
            }
        }
        (inside, outside)
    }
}

/// Empirical AUC of scores against labels (class 2 positive): the
/// Mann-Whitney statistic, fraction of (class-1, class-2) pairs ranked
/// correctly with half credit for ties.
///
/// Computed in O(n log n) from rank sums with midrank tie correction,
/// which equals the O(n²) pairwise definition exactly.
pub fn empirical_auc(scores: &[f64], labels: &[ClassLabel]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n1 = labels.iter().filter(|&&l| l == ClassLabel::Class1).count();
    let n2 = labels.len() - n1;
    if n1 == 0 {
        return Err(Error::MissingClass(1));
    }
    if n2 == 0 {
        return Err(Error::MissingClass(2));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("scores contain NaN".to_string()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("no NaN"));

    // Rank sum of the positive class with midranks over tied groups.
    let mut rank_sum_positive = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share the midrank.
        let midrank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == ClassLabel::Class2 {
                rank_sum_positive += midrank;
            }
        }
        i = j + 1;
    }

    let u2 = rank_sum_positive - (n2 * (n2 + 1)) as f64 / 2.0;
    Ok(u2 / (n1 as f64 * n2 as f64))
}

/// Stratified fold assignment: within each class the sample indices are
/// shuffled by the stream and dealt round-robin over the `k` folds.
pub fn make_folds(labels: &[ClassLabel], k: usize, stream: &mut RngStream) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    let mut fold_of_sample = vec![0usize; labels.len()];
    for label in [ClassLabel::Class1, ClassLabel::Class2] {
        let mut idx: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == label).then_some(i))
            .collect();
        if idx.len() < k {
            return Err(Error::InsufficientSamples(format!(
                "class {} has {} samples, fewer than {k} folds",
                label.as_u8(),
                idx.len()
            )));
        }
        stream.shuffle(&mut idx);
        for (pos, &sample) in idx.iter().enumerate() {
            fold_of_sample[sample] = pos % k;
        }
    }
    Ok(FoldAssignment { fold_of_sample, k })
}

/// K-fold cross-validated AUC with a provided fold assignment: trains
/// on each fold's complement, scores the fold, and averages the per-fold
/// empirical AUCs. A training failure on any fold fails the whole
/// estimate.
pub fn cv_auc_with_folds(
    dataset: &Dataset,
    folds: &FoldAssignment,
    trainer_config: &LogRegConfig,
) -> Result<f64> {
    if folds.assignments().len() != dataset.n_samples() {
        return Err(Error::DimensionMismatch(
            "fold assignment does not cover the dataset".to_string(),
        ));
    }
    let k = folds.k();
    let mut total = 0.0;
    for f in 0..k {
        let (test_idx, train_idx) = folds.split(f);
        let train = dataset.subset(&train_idx)?;
        let test = dataset.subset(&test_idx)?;
        let model = train_logreg_l2(&train, trainer_config).map_err(|e| {
            Error::Configuration(format!("fold {f} training failed: {e}"))
        })?;
        let scores = predict_scores(&model, &test)?;
        total += empirical_auc(&scores, test.labels())?;
    }
    Ok(total / k as f64)
}

/// K-fold cross-validated AUC with folds drawn from the stream.
pub fn cv_auc(
    dataset: &Dataset,
    k: usize,
    trainer_config: &LogRegConfig,
    stream: &mut RngStream,
) -> Result<f64> {
    let folds = make_folds(dataset.labels(), k, stream)?;
    cv_auc_with_folds(dataset, &folds, trainer_config)
}
