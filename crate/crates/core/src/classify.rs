//! LDA classifier and stratified k-fold cross-validation.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_rng;

const CV_DOMAIN: u64 = 0x4356; // "CV"

/// Default shrinkage toward the diagonal of the pooled covariance; keeps the
/// scatter invertible on small datasets and duplicated columns.
pub const DEFAULT_SHRINKAGE: f64 = 1e-4;

/// Linear discriminant model with shared, shrunk within-class covariance.
///
/// Features are z-scored with training statistics before fitting; prediction
/// applies the same transform. Scores are the shared-covariance Gaussian
/// discriminants `x' S^-1 mu_k - mu_k' S^-1 mu_k / 2 + ln prior_k`; ties go
/// to the first class in sorted label order.
#[derive(Debug, Clone)]
pub struct LdaModel {
    classes: Vec<String>,
    scaler_mean: DVector<f64>,
    scaler_scale: DVector<f64>,
    class_means: DMatrix<f64>,
    priors: Vec<f64>,
    covariance: DMatrix<f64>,
    weights: DMatrix<f64>,
    biases: Vec<f64>,
    discriminants: DMatrix<f64>,
}

impl LdaModel {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn feature_width(&self) -> usize {
        self.scaler_mean.len()
    }

    /// Empirical class priors, aligned with [`Self::classes`].
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Shrunk pooled within-class covariance (standardized space).
    pub fn pooled_covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Per-class means (standardized space), one column per class.
    pub fn class_means(&self) -> &DMatrix<f64> {
        &self.class_means
    }

    /// Discriminant directions (columns), at most `classes - 1`, from the
    /// between/within scatter ratio. Unit norm, largest component positive.
    pub fn discriminants(&self) -> &DMatrix<f64> {
        &self.discriminants
    }

    fn standardize(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.feature_width() {
            return Err(Error::FeatureWidthMismatch {
                expected: self.feature_width(),
                got: x.len(),
            });
        }
        Ok(DVector::from_fn(x.len(), |i, _| {
            (x[i] - self.scaler_mean[i]) / self.scaler_scale[i]
        }))
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<&str> {
        let z = self.standardize(x)?;
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for k in 0..self.classes.len() {
            let score = self.weights.column(k).dot(&z) + self.biases[k];
            if score > best_score {
                best_score = score;
                best = k;
            }
        }
        Ok(&self.classes[best])
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<String>> {
        rows.iter()
            .map(|r| self.predict_one(r).map(str::to_string))
            .collect()
    }
}

fn sorted_classes(labels: &[String]) -> Vec<String> {
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    classes
}

/// Fit an LDA model. Requires at least two classes with two samples each.
pub fn lda_fit(rows: &[Vec<f64>], labels: &[String], shrinkage: f64) -> Result<LdaModel> {
    let n = rows.len();
    let classes = sorted_classes(labels);
    if classes.len() < 2 {
        return Err(Error::SingleClass(classes.len()));
    }
    let d = rows.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(Error::InvalidSpec("zero-width feature rows".into()));
    }
    for row in rows {
        if row.len() != d {
            return Err(Error::FeatureWidthMismatch {
                expected: d,
                got: row.len(),
            });
        }
    }
    let y: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l).unwrap())
        .collect();
    let mut counts = vec![0usize; classes.len()];
    for &k in &y {
        counts[k] += 1;
    }
    for (k, &count) in counts.iter().enumerate() {
        if count < 2 {
            return Err(Error::ClassTooSmall {
                label: classes[k].clone(),
                count,
            });
        }
    }

    // z-score with training statistics; constant columns keep scale 1.
    let mut scaler_mean = DVector::zeros(d);
    let mut scaler_scale = DVector::from_element(d, 1.0);
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
        scaler_mean[j] = mean;
        if var > 0.0 {
            scaler_scale[j] = var.sqrt();
        }
    }
    let x = DMatrix::from_fn(n, d, |i, j| (rows[i][j] - scaler_mean[j]) / scaler_scale[j]);

    let c = classes.len();
    let mut class_means = DMatrix::zeros(d, c);
    for (i, &k) in y.iter().enumerate() {
        for j in 0..d {
            class_means[(j, k)] += x[(i, j)];
        }
    }
    for k in 0..c {
        let scale = 1.0 / counts[k] as f64;
        for j in 0..d {
            class_means[(j, k)] *= scale;
        }
    }

    // Pooled within-class covariance, n - C denominator.
    let mut sigma_w = DMatrix::zeros(d, d);
    for (i, &k) in y.iter().enumerate() {
        let dev = DVector::from_fn(d, |j, _| x[(i, j)] - class_means[(j, k)]);
        sigma_w.syger(1.0, &dev, &dev, 1.0);
    }
    sigma_w /= (n - c) as f64;
    // Fill the upper triangle left untouched by the rank-1 updates.
    for i in 0..d {
        for j in (i + 1)..d {
            sigma_w[(i, j)] = sigma_w[(j, i)];
        }
    }

    let mut covariance = &sigma_w * (1.0 - shrinkage);
    let mut max_diag: f64 = 0.0;
    for i in 0..d {
        covariance[(i, i)] += shrinkage * sigma_w[(i, i)];
        max_diag = max_diag.max(covariance[(i, i)]);
    }
    // A column constant within every class has zero pooled variance; give it
    // a floor so the factorization exists (it carries no discriminative
    // information either way).
    let floor = 1e-12 * max_diag.max(1.0);
    for i in 0..d {
        if covariance[(i, i)] < floor {
            covariance[(i, i)] = floor;
        }
    }

    let chol = match nalgebra::Cholesky::new(covariance.clone()) {
        Some(c) => c,
        None => {
            let ridge = 1e-8 * max_diag.max(1.0);
            let mut bumped = covariance.clone();
            for i in 0..d {
                bumped[(i, i)] += ridge;
            }
            covariance = bumped.clone();
            nalgebra::Cholesky::new(bumped)
                .ok_or_else(|| Error::Numeric("pooled covariance is not positive definite".into()))?
        }
    };

    let priors: Vec<f64> = counts.iter().map(|&c0| c0 as f64 / n as f64).collect();
    let mut weights = DMatrix::zeros(d, c);
    let mut biases = vec![0.0; c];
    for k in 0..c {
        let mu = class_means.column(k).into_owned();
        let a = chol.solve(&mu);
        biases[k] = -0.5 * mu.dot(&a) + priors[k].ln();
        weights.set_column(k, &a);
    }

    // Discriminant directions from the generalized eigenproblem
    // S_b w = lambda S_w w via the Cholesky transform.
    let overall = DVector::from_fn(d, |j, _| x.column(j).sum() / n as f64);
    let mut sigma_b = DMatrix::zeros(d, d);
    for k in 0..c {
        let dev = class_means.column(k) - &overall;
        sigma_b.syger(counts[k] as f64, &dev, &dev, 1.0);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            sigma_b[(i, j)] = sigma_b[(j, i)];
        }
    }
    let l = chol.l();
    let a = l
        .solve_lower_triangular(&sigma_b)
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    let m = l
        .solve_lower_triangular(&a.transpose())
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?
        .transpose();
    let m = (&m + m.transpose()) * 0.5;
    let eigen = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eigen.eigenvalues[j].total_cmp(&eigen.eigenvalues[i]));
    let rank = (c - 1).min(d);
    let mut discriminants = DMatrix::zeros(d, rank);
    for (col, &idx) in order.iter().take(rank).enumerate() {
        let u = eigen.eigenvectors.column(idx).into_owned();
        let mut w = l
            .transpose()
            .solve_upper_triangular(&u)
            .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
        let norm = w.norm();
        if norm > 0.0 {
            w /= norm;
        }
        let lead = w.iter().cloned().fold(0.0f64, |acc, v| {
            if v.abs() > acc.abs() {
                v
            } else {
                acc
            }
        });
        if lead < 0.0 {
            w = -w;
        }
        discriminants.set_column(col, &w);
    }

    Ok(LdaModel {
        classes,
        scaler_mean,
        scaler_scale,
        class_means,
        priors,
        covariance,
        weights,
        biases,
        discriminants,
    })
}

/// Cross-validation report: one accuracy per fold (percent), their mean and
/// population standard deviation, and the confusion matrix summed over
/// folds (`confusion[actual][predicted]`, classes sorted).
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub classes: Vec<String>,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
}

/// Stratified (by default) k-fold cross-validation of an LDA classifier.
///
/// Folds are a true partition: every sample is tested exactly once. With
/// stratification, each class's indices are shuffled separately and dealt
/// round-robin so fold class balance matches the dataset's.
pub fn cross_validate(
    rows: &[Vec<f64>],
    labels: &[String],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<CvReport> {
    let n = rows.len();
    if k < 2 {
        return Err(Error::InvalidSpec("need at least 2 folds".into()));
    }
    if n < k {
        return Err(Error::TooFewSamples {
            samples: n,
            folds: k,
        });
    }
    let classes = sorted_classes(labels);

    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0usize;
    if stratified {
        for (ci, class) in classes.iter().enumerate() {
            let mut idxs: Vec<usize> = (0..n).filter(|&i| &labels[i] == class).collect();
            let mut rng = derive_rng(seed, &[CV_DOMAIN, ci as u64]);
            idxs.shuffle(&mut rng);
            for idx in idxs {
                folds[cursor % k].push(idx);
                cursor += 1;
            }
        }
    } else {
        let mut idxs: Vec<usize> = (0..n).collect();
        let mut rng = derive_rng(seed, &[CV_DOMAIN, u64::MAX]);
        idxs.shuffle(&mut rng);
        for idx in idxs {
            folds[cursor % k].push(idx);
            cursor += 1;
        }
    }

    let class_index = |label: &String| classes.binary_search(label).unwrap();
    let fold_results: Vec<(f64, Vec<Vec<usize>>)> = folds
        .par_iter()
        .map(|test_idx| {
            let test_set: std::collections::HashSet<usize> = test_idx.iter().copied().collect();
            let mut train_rows = Vec::with_capacity(n - test_idx.len());
            let mut train_labels = Vec::with_capacity(n - test_idx.len());
            for i in 0..n {
                if !test_set.contains(&i) {
                    train_rows.push(rows[i].clone());
                    train_labels.push(labels[i].clone());
                }
            }
            let model = lda_fit(&train_rows, &train_labels, DEFAULT_SHRINKAGE)?;
            let mut correct = 0usize;
            let mut confusion = vec![vec![0usize; classes.len()]; classes.len()];
            for &i in test_idx {
                let predicted = model.predict_one(&rows[i])?;
                if predicted == labels[i] {
                    correct += 1;
                }
                confusion[class_index(&labels[i])][class_index(&predicted.to_string())] += 1;
            }
            let accuracy = 100.0 * correct as f64 / test_idx.len() as f64;
            Ok((accuracy, confusion))
        })
        .collect::<Result<_>>()?;

    let fold_accuracies: Vec<f64> = fold_results.iter().map(|(a, _)| *a).collect();
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
    let std_accuracy = (fold_accuracies
        .iter()
        .map(|a| (a - mean_accuracy).powi(2))
        .sum::<f64>()
        / k as f64)
        .sqrt();
    let mut confusion = vec![vec![0usize; classes.len()]; classes.len()];
    for (_, fold_conf) in &fold_results {
        for (row_total, row_fold) in confusion.iter_mut().zip(fold_conf) {
            for (cell, &add) in row_total.iter_mut().zip(row_fold) {
                *cell += add;
            }
        }
    }

    Ok(CvReport {
        classes,
        fold_accuracies,
        mean_accuracy,
        std_accuracy,
        confusion,
    })
}

/// One report row: `feature_set,dataset,mean_acc,std_acc,fold_1..fold_k`.
pub fn report_csv_header(k: usize) -> String {
    let folds: Vec<String> = (1..=k).map(|i| format!("fold_{i}")).collect();
    format!("feature_set,dataset,mean_acc,std_acc,{}", folds.join(","))
}

pub fn report_csv_row(feature_set: &str, dataset: &str, report: &CvReport) -> String {
    let folds: Vec<String> = report
        .fold_accuracies
        .iter()
        .map(|a| format!("{a:.4}"))
        .collect();
    format!(
        "{},{},{:.4},{:.4},{}",
        feature_set,
        dataset,
        report.mean_accuracy,
        report.std_accuracy,
        folds.join(",")
    )
}

/// Confusion matrix CSV: `actual` rows, predicted-class columns.
pub fn confusion_csv(report: &CvReport) -> String {
    let mut out = String::from("actual");
    for class in &report.classes {
        out.push(',');
        out.push_str(class);
    }
    out.push('\n');
    for (class, row) in report.classes.iter().zip(&report.confusion) {
        out.push_str(class);
        for count in row {
            out.push(',');
            out.push_str(&count.to_string());
        }
        out.push('\n');
    }
    out
}
