use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NetworkError, Point};

const MAX_ITERATIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub centers: Vec<Point>,
    pub assignment: Vec<usize>,
    /// Squared-distance objective after each Lloyd iteration.
    pub history: Vec<f64>,
    pub iterations: usize,
}

/// Sum of unsquared distances from each point to its assigned center.
pub fn kmeans_objective(points: &[Point], centers: &[Point], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &j)| p.dist(&centers[j]))
        .sum()
}

fn nearest(p: &Point, centers: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = p.dist_sq(c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

fn sq_objective(points: &[Point], centers: &[Point], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &j)| p.dist_sq(&centers[j]))
        .sum()
}

/// Lloyd's algorithm with farthest-point seeding.
///
/// The first seed is drawn uniformly with a ChaCha8 generator keyed by
/// `seed`; every further seed is the point farthest from the seeds chosen so
/// far (lowest index on ties).
pub fn kmeans_place(points: &[Point], k: usize, seed: u64) -> Result<KMeansResult, NetworkError> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(NetworkError::InvalidClusterCount { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![points[rng.gen_range(0..n)]];
    let mut min_d: Vec<f64> = points.iter().map(|p| p.dist_sq(&centers[0])).collect();
    while centers.len() < k {
        let (far, _) = min_d
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        let c = points[far];
        centers.push(c);
        for (d, p) in min_d.iter_mut().zip(points) {
            *d = d.min(p.dist_sq(&c));
        }
    }

    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
    let mut history = vec![sq_objective(points, &centers, &assignment)];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (p, &j) in points.iter().zip(&assignment) {
            sums[j].0 += p.x;
            sums[j].1 += p.y;
            sums[j].2 += 1;
        }
        for (j, &(sx, sy, cnt)) in sums.iter().enumerate() {
            if cnt > 0 {
                centers[j] = Point::new(sx / cnt as f64, sy / cnt as f64);
            }
        }
        // an empty cluster keeps its previous center, which never raises the objective
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
        let stable = next == assignment;
        assignment = next;
        history.push(sq_objective(points, &centers, &assignment));
        if stable {
            break;
        }
    }
    Ok(KMeansResult {
        centers,
        assignment,
        history,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_equals_n_recovers_points() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(5.0, 1.0), Point::new(-2.0, 3.0)];
        let res = kmeans_place(&pts, 3, 7).unwrap();
        let mut got = res.centers.clone();
        got.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        let mut want = pts.clone();
        want.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        assert_eq!(got, want);
        assert_eq!(kmeans_objective(&pts, &res.centers, &res.assignment), 0.0);
    }

    #[test]
    fn single_cluster_is_centroid() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 3.0)];
        let res = kmeans_place(&pts, 1, 0).unwrap();
        assert!((res.centers[0].x - 1.0).abs() < 1e-12);
        assert!((res.centers[0].y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_separated_clusters() {
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push(Point::new(i as f64 * 0.1, 0.0));
            pts.push(Point::new(100.0 + i as f64 * 0.1, 50.0));
        }
        let res = kmeans_place(&pts, 2, 3).unwrap();
        let mut xs: Vec<f64> = res.centers.iter().map(|c| c.x).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((xs[0] - 0.2).abs() < 1e-12);
        assert!((xs[1] - 100.2).abs() < 1e-12);
    }

    #[test]
    fn bad_k() {
        let pts = vec![Point::new(0.0, 0.0)];
        assert!(kmeans_place(&pts, 2, 0).is_err());
        assert!(kmeans_place(&pts, 0, 0).is_err());
    }

    #[test]
    fn objective_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let pts: Vec<Point> = (0..40)
                .map(|_| Point::new(rng.gen_range(0.0..30.0), rng.gen_range(0.0..30.0)))
                .collect();
            let res = kmeans_place(&pts, 1 + trial % 7, trial as u64).unwrap();
            for w in res.history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{:?}", res.history);
            }
        }
    }
}
