//! Greedy single-pass clustering of inverted segments.
//!
//! Lines are visited in input order. A line joins the first cluster within
//! `threshold`, measured to the cluster's only line while it has one member
//! and to the cluster center afterwards; otherwise it seeds a new cluster.

use crate::geometry::{closest_point_on_segment, closest_points_segments, Vec3};
use crate::simulation::Measurement;

use super::{circular_segment, invert_segment, InvertedSegment, MeasurementCluster};

/// Distance threshold in inverted space (units of 1/m).
pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone)]
struct LineCluster {
    members: Vec<InvertedSegment>,
    center_sum: Vec3,
    center_count: usize,
}

impl LineCluster {
    fn seed(line: InvertedSegment) -> Self {
        Self {
            members: vec![line],
            center_sum: Vec3::ZERO,
            center_count: 0,
        }
    }

    fn center(&self) -> Option<Vec3> {
        (self.members.len() >= 2).then(|| self.center_sum / self.center_count as f64)
    }

    fn distance(&self, l: &InvertedSegment) -> f64 {
        match self.center() {
            None => {
                let only = &self.members[0];
                let (p, q) = closest_points_segments(&l.a, &l.b, &only.a, &only.b);
                p.distance(&q)
            }
            Some(c) => closest_point_on_segment(&c, &l.a, &l.b).distance(&c),
        }
    }

    fn push(&mut self, l: InvertedSegment) {
        match self.center() {
            None => {
                let only = &self.members[0];
                let (p, q) = closest_points_segments(&l.a, &l.b, &only.a, &only.b);
                self.center_sum = p + q;
                self.center_count = 2;
            }
            Some(c) => {
                self.center_sum += closest_point_on_segment(&c, &l.a, &l.b);
                self.center_count += 1;
            }
        }
        self.members.push(l);
    }
}

#[derive(Debug, Clone)]
pub struct InversionOutcome {
    pub clusters: Vec<MeasurementCluster>,
    /// Number of line-to-cluster distance evaluations performed.
    pub distance_evaluations: usize,
    /// Cluster centers, `None` for single-line clusters.
    pub centers: Vec<Option<Vec3>>,
}

pub fn cluster_by_inversion(ms: &[Measurement], threshold: f64) -> Vec<MeasurementCluster> {
    cluster_by_inversion_counted(ms, threshold).clusters
}

/// Same as [`cluster_by_inversion`], also reporting work done.
///
/// Measurements without a valid inverted segment (`v ≈ w`) become
/// singleton clusters appended after the line clusters.
pub fn cluster_by_inversion_counted(ms: &[Measurement], threshold: f64) -> InversionOutcome {
    let mut clusters: Vec<LineCluster> = Vec::new();
    let mut degenerate = Vec::new();
    let mut distance_evaluations = 0;

    for (i, m) in ms.iter().enumerate() {
        let Ok(line) = circular_segment(m, i).and_then(|cs| invert_segment(&cs)) else {
            degenerate.push(i);
            continue;
        };
        let mut joined = false;
        for c in clusters.iter_mut() {
            distance_evaluations += 1;
            if c.distance(&line) <= threshold {
                c.push(line);
                joined = true;
                break;
            }
        }
        if !joined {
            clusters.push(LineCluster::seed(line));
        }
    }

    let centers = clusters
        .iter()
        .map(LineCluster::center)
        .chain(degenerate.iter().map(|_| None))
        .collect();
    let clusters = clusters
        .into_iter()
        .map(|c| MeasurementCluster::new(c.members.iter().map(|l| l.measurement_ref).collect()))
        .chain(degenerate.into_iter().map(|i| MeasurementCluster::new(vec![i])))
        .collect();
    InversionOutcome {
        clusters,
        distance_evaluations,
        centers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::is_partition;
    use crate::simulation::{apply_errors, generate_measurements, make_cube_room, place_senders, ErrorConfig};

    #[test]
    fn single_measurement_single_cluster() {
        let truth = place_senders(&make_cube_room(2.0).unwrap(), 1, 1).unwrap();
        let ms = generate_measurements(&truth);
        let out = cluster_by_inversion(&ms[..1], DEFAULT_THRESHOLD);
        assert_eq!(out, vec![MeasurementCluster::new(vec![0])]);
        assert!(cluster_by_inversion(&[], DEFAULT_THRESHOLD).is_empty());
    }

    #[test]
    fn zero_error_cube_gives_wall_clusters() {
        for seed in 0..5 {
            let truth = place_senders(&make_cube_room(2.0).unwrap(), 20, seed).unwrap();
            let ms = generate_measurements(&truth);
            let out = cluster_by_inversion_counted(&ms, DEFAULT_THRESHOLD);
            assert_eq!(out.clusters.len(), 6, "seed {seed}");
            for c in &out.clusters {
                assert_eq!(c.len(), 20);
                let wall = ms[c.measurement_indices[0]].true_wall_id;
                assert!(c.measurement_indices.iter().all(|&i| ms[i].true_wall_id == wall));
            }
            // centers sit at the inverted wall normal vectors (1/d)·u with d = 1
            for (c, center) in out.clusters.iter().zip(&out.centers) {
                let wall = &truth.room.walls[ms[c.measurement_indices[0]].true_wall_id.unwrap()];
                assert!((center.unwrap() - *wall.unit_normal).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_threshold_splits_noisy_input() {
        let truth = place_senders(&make_cube_room(2.0).unwrap(), 20, 2).unwrap();
        let ms = apply_errors(&generate_measurements(&truth), &ErrorConfig { rng_seed: 3, ..Default::default() }).unwrap();
        let out = cluster_by_inversion(&ms, 0.0);
        assert!(out.len() >= ms.len() - 6, "{}", out.len());
        assert!(is_partition(&out, ms.len()));
    }

    #[test]
    fn quadratic_work_bound() {
        let truth = place_senders(&make_cube_room(2.0).unwrap(), 20, 9).unwrap();
        let ms = apply_errors(&generate_measurements(&truth), &ErrorConfig { rng_seed: 1, ..Default::default() }).unwrap();
        for t in [0.0, 0.1, 0.3, 1.0] {
            let out = cluster_by_inversion_counted(&ms, t);
            assert!(is_partition(&out.clusters, ms.len()));
            assert!(out.distance_evaluations <= ms.len() * out.clusters.len());
        }
    }
}
