//! Class-imbalance handling: k-means under-sampling of the majority class
//! and stratified cross-validation fold planning.
//!
//! Negatives are clustered in feature space (Lloyd's algorithm with
//! k-means++ seeding) and the most self-similar cluster supplies the kept
//! subset, topped up with the nearest outside points when it is too small.
//! Fold plans are plain id lists so they can be written to JSON and replayed
//! exactly.

use ndarray::{Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Output of [`kmeans`]: per-row cluster index, final centroids, and the
/// inertia (sum of squared distances to assigned centroids) after each
/// Lloyd iteration.
#[derive(Debug, Clone)]
pub struct KMeans {
    pub assignments: Vec<usize>,
    pub centroids: Array2<f64>,
    pub inertia_history: Vec<f64>,
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding. Runs until assignments stop
/// changing or `max_iters` (300 by default via [`kmeans`]) passes. An
/// emptied cluster is reseeded with the point farthest from its centroid.
pub fn kmeans_with(data: &Array2<f64>, k: usize, seed: u64, max_iters: usize) -> Result<KMeans> {
    let n = data.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must be in 1..={n} for {n} points"
        )));
    }
    let d = data.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centroids = Array2::zeros((k, d));
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).assign(&data.row(first));
    let mut dist2: Vec<f64> = (0..n).map(|i| sq_dist(data.row(i), centroids.row(0))).collect();
    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let pick = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d2) in dist2.iter().enumerate() {
                target -= d2;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centroids.row_mut(c).assign(&data.row(pick));
        for i in 0..n {
            dist2[i] = dist2[i].min(sq_dist(data.row(i), centroids.row(c)));
        }
    }

    let mut assignments = vec![0usize; n];
    let mut inertia_history = Vec::new();
    for _ in 0..max_iters {
        // assignment step
        let mut changed = false;
        let mut inertia = 0.0;
        for i in 0..n {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d2 = sq_dist(data.row(i), centroids.row(c));
                if d2 < best_d {
                    best_d = d2;
                    best = c;
                }
            }
            inertia += best_d;
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
        }
        inertia_history.push(inertia);
        if !changed && inertia_history.len() > 1 {
            break;
        }
        // update step
        let mut sums = Array2::zeros((k, d));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = assignments[i];
            counts[c] += 1;
            let mut row = sums.row_mut(c);
            row += &data.row(i);
        }
        for c in 0..k {
            if counts[c] > 0 {
                let mut row = centroids.row_mut(c);
                row.assign(&(&sums.row(c) / counts[c] as f64));
            } else {
                // reseed with the globally worst-fitting point
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(data.row(a), centroids.row(assignments[a]));
                        let db = sq_dist(data.row(b), centroids.row(assignments[b]));
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                centroids.row_mut(c).assign(&data.row(far));
            }
        }
    }
    Ok(KMeans {
        assignments,
        centroids,
        inertia_history,
    })
}

pub fn kmeans(data: &Array2<f64>, k: usize, seed: u64) -> Result<KMeans> {
    kmeans_with(data, k, seed, 300)
}

/// Picks `target` rows of the majority class. The rows are clustered into
/// `k` groups; the cluster with the lowest mean pairwise internal distance
/// is kept (its members ordered by distance to the cluster centroid), and
/// any shortfall is filled with outside rows closest to that centroid.
/// Returns row indices into `data` in selection order.
pub fn undersample(data: &Array2<f64>, target: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = data.nrows();
    if target > n {
        return Err(Error::Data(format!(
            "cannot select {target} rows from {n} majority examples"
        )));
    }
    if target == n {
        return Ok((0..n).collect());
    }
    let k = k.min(n);
    let km = kmeans(data, k, seed)?;

    // mean pairwise squared distance within each cluster; singletons count
    // as perfectly compact
    let mut best_cluster = 0;
    let mut best_score = f64::INFINITY;
    for c in 0..k {
        let members: Vec<usize> = (0..n).filter(|&i| km.assignments[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                total += sq_dist(data.row(i), data.row(j));
                pairs += 1;
            }
        }
        let score = if pairs == 0 { 0.0 } else { total / pairs as f64 };
        if score < best_score {
            best_score = score;
            best_cluster = c;
        }
    }

    let centroid = km.centroids.row(best_cluster);
    let by_centroid_dist = |indices: Vec<usize>| -> Vec<usize> {
        let mut v = indices;
        v.sort_by(|&a, &b| {
            sq_dist(data.row(a), centroid)
                .partial_cmp(&sq_dist(data.row(b), centroid))
                .unwrap()
                .then(a.cmp(&b))
        });
        v
    };
    let inside = by_centroid_dist((0..n).filter(|&i| km.assignments[i] == best_cluster).collect());
    let outside = by_centroid_dist((0..n).filter(|&i| km.assignments[i] != best_cluster).collect());

    let mut selected: Vec<usize> = inside.into_iter().take(target).collect();
    selected.extend(outside.into_iter().take(target - selected.len().min(target)));
    selected.truncate(target);
    Ok(selected)
}

/// One train/test split of a fold plan, as positions into the original
/// example list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// A reproducible stratified cross-validation plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub seed: u64,
    /// ids[i] names the example at position i, for auditing saved plans.
    pub ids: Vec<String>,
    pub folds: Vec<Fold>,
}

/// Stratified k-fold assignment: each class is shuffled with the given seed
/// and dealt round-robin into folds, so per-fold class counts differ by at
/// most one.
pub fn stratified_kfold(
    ids: &[String],
    labels: &[bool],
    n_folds: usize,
    seed: u64,
) -> Result<FoldPlan> {
    if ids.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "ids and labels must have equal length".into(),
        ));
    }
    let n = ids.len();
    if n_folds < 2 || n_folds > n {
        return Err(Error::InvalidArgument(format!(
            "fold count {n_folds} must be in 2..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; n];
    for class in [true, false] {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        for i in (1..members.len()).rev() {
            members.swap(i, rng.gen_range(0..=i));
        }
        for (pos, &i) in members.iter().enumerate() {
            fold_of[i] = pos % n_folds;
        }
    }
    let folds = (0..n_folds)
        .map(|f| Fold {
            train: (0..n).filter(|&i| fold_of[i] != f).collect(),
            test: (0..n).filter(|&i| fold_of[i] == f).collect(),
        })
        .collect();
    Ok(FoldPlan {
        n_folds,
        seed,
        ids: ids.to_vec(),
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn blobs(seed: u64, per_blob: usize) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
        let mut rows = Vec::new();
        for &(cx, cy) in &centers {
            for _ in 0..per_blob {
                rows.push(cx + rng.gen_range(-0.5..0.5));
                rows.push(cy + rng.gen_range(-0.5..0.5));
            }
        }
        Array2::from_shape_vec((3 * per_blob, 2), rows).unwrap()
    }

    #[test]
    fn kmeans_recovers_separated_blobs() {
        let data = blobs(1, 20);
        let km = kmeans(&data, 3, 7).unwrap();
        // all members of a blob share one cluster label
        for b in 0..3 {
            let first = km.assignments[b * 20];
            assert!(km.assignments[b * 20..(b + 1) * 20].iter().all(|&a| a == first));
        }
        let labels: std::collections::BTreeSet<usize> =
            km.assignments.iter().copied().collect();
        assert_eq!(labels.len(), 3);
    }

    #[test]
    fn kmeans_inertia_never_increases() {
        for seed in 0..20 {
            let data = blobs(seed, 15);
            let km = kmeans(&data, 4, seed).unwrap();
            for w in km.inertia_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "inertia rose: {:?}", km.inertia_history);
            }
        }
    }

    #[test]
    fn kmeans_k_equals_n_gives_zero_inertia() {
        let data = arr2(&[[0.0, 0.0], [5.0, 5.0], [9.0, 1.0]]);
        let km = kmeans(&data, 3, 0).unwrap();
        assert!(km.inertia_history.last().unwrap() < &1e-12);
    }

    #[test]
    fn kmeans_rejects_bad_k() {
        let data = arr2(&[[0.0], [1.0]]);
        assert!(kmeans(&data, 0, 0).is_err());
        assert!(kmeans(&data, 3, 0).is_err());
    }

    #[test]
    fn kmeans_is_deterministic() {
        let data = blobs(3, 10);
        let a = kmeans(&data, 3, 11).unwrap();
        let b = kmeans(&data, 3, 11).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.centroids, b.centroids);
    }

    #[test]
    fn undersample_prefers_tight_cluster() {
        // a tight clump of 10 plus a diffuse spray of 30
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rows = Vec::new();
        for _ in 0..10 {
            rows.push(5.0 + rng.gen_range(-0.01..0.01));
            rows.push(5.0 + rng.gen_range(-0.01..0.01));
        }
        for _ in 0..30 {
            rows.push(rng.gen_range(-20.0..20.0));
            rows.push(rng.gen_range(-20.0..20.0));
        }
        let data = Array2::from_shape_vec((40, 2), rows).unwrap();
        let picked = undersample(&data, 8, 5, 0).unwrap();
        assert_eq!(picked.len(), 8);
        assert!(
            picked.iter().all(|&i| i < 10),
            "expected tight-cluster members, got {picked:?}"
        );
    }

    #[test]
    fn undersample_fills_shortfall_from_nearest_outsiders() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rows = Vec::new();
        for _ in 0..6 {
            rows.push(0.0 + rng.gen_range(-0.01..0.01));
            rows.push(0.0 + rng.gen_range(-0.01..0.01));
        }
        for i in 0..14 {
            rows.push(30.0 + i as f64 * 3.0 + rng.gen_range(-0.3..0.3));
            rows.push(rng.gen_range(-0.3..0.3));
        }
        let data = Array2::from_shape_vec((20, 2), rows).unwrap();
        let picked = undersample(&data, 10, 5, 0).unwrap();
        assert_eq!(picked.len(), 10);
        // no duplicates
        let set: std::collections::BTreeSet<usize> = picked.iter().copied().collect();
        assert_eq!(set.len(), 10);
    }

    #[test]
    fn undersample_full_and_overfull() {
        let data = blobs(2, 5);
        assert_eq!(undersample(&data, 15, 5, 0).unwrap().len(), 15);
        assert!(undersample(&data, 16, 5, 0).is_err());
    }

    #[test]
    fn stratified_folds_balance_both_classes() {
        let ids: Vec<String> = (0..32).map(|i| format!("s{i}")).collect();
        let labels: Vec<bool> = (0..32).map(|i| i < 16).collect();
        let plan = stratified_kfold(&ids, &labels, 8, 42).unwrap();
        assert_eq!(plan.folds.len(), 8);
        for fold in &plan.folds {
            assert_eq!(fold.test.len(), 4);
            assert_eq!(fold.train.len(), 28);
            let pos = fold.test.iter().filter(|&&i| labels[i]).count();
            assert_eq!(pos, 2);
            // disjoint and exhaustive
            let mut all: Vec<usize> = fold.train.iter().chain(&fold.test).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..32).collect::<Vec<_>>());
        }
        // every example appears in exactly one test fold
        let mut seen = vec![0usize; 32];
        for fold in &plan.folds {
            for &i in &fold.test {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn fold_plan_json_round_trip() {
        let ids: Vec<String> = (0..10).map(|i| format!("x{i}")).collect();
        let labels: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let plan = stratified_kfold(&ids, &labels, 5, 3).unwrap();
        let json = serde_json::to_string(&plan).unwrap();
        let back: FoldPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(plan, back);
    }

    #[test]
    fn fold_plan_is_seed_sensitive_and_deterministic() {
        let ids: Vec<String> = (0..20).map(|i| format!("x{i}")).collect();
        let labels: Vec<bool> = (0..20).map(|i| i < 10).collect();
        let a = stratified_kfold(&ids, &labels, 4, 1).unwrap();
        let b = stratified_kfold(&ids, &labels, 4, 1).unwrap();
        let c = stratified_kfold(&ids, &labels, 4, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
