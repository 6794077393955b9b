//! Self-calibration: wall direction and distance for each measurement cluster.
//!
//! The direction comes from the nested cross product of two measurements'
//! bivectors `(v₁×w₁)×(v₂×w₂)`, averaged over a selection of pairs. With the
//! direction `u` known, every measurement yields a sender distance `p` and a
//! wall distance; these are averaged as well.

use std::fmt;

use crate::clustering::MeasurementCluster;
use crate::error::{Error, Result};
use crate::geometry::{UnitVec3, Vec3};
use crate::simulation::Measurement;

/// Degeneracy threshold for nested cross products and denominators.
pub const DEGENERACY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallEstimate {
    pub u: UnitVec3,
    pub distance: f64,
    /// `distance · u`
    pub n: Vec3,
    /// Index of the cluster this estimate was computed from.
    pub source_cluster: usize,
}

impl WallEstimate {
    pub fn new(u: UnitVec3, distance: f64, source_cluster: usize) -> Self {
        Self {
            u,
            distance,
            n: *u * distance,
            source_cluster,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairSelection {
    AllPairs,
    DisjointPairs,
    OverlappingPairs,
}

impl PairSelection {
    pub const ALL: [PairSelection; 3] = [
        PairSelection::AllPairs,
        PairSelection::DisjointPairs,
        PairSelection::OverlappingPairs,
    ];

    /// Index pairs over `k` items: all `C(k,2)`, `(0,1),(2,3),…` or `(0,1),(1,2),…`.
    pub fn pairs(&self, k: usize) -> Vec<(usize, usize)> {
        match self {
            PairSelection::AllPairs => (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect(),
            PairSelection::DisjointPairs => (0..k / 2).map(|i| (2 * i, 2 * i + 1)).collect(),
            PairSelection::OverlappingPairs => (1..k).map(|i| (i - 1, i)).collect(),
        }
    }
}

impl fmt::Display for PairSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairSelection::AllPairs => "all-pairs",
            PairSelection::DisjointPairs => "disjoint-pairs",
            PairSelection::OverlappingPairs => "overlapping-pairs",
        })
    }
}

/// `|x·w₁ − 1| + |x·w₂ − 1|`, the sign-disambiguation score.
fn sign_score(x: &Vec3, w1: &Vec3, w2: &Vec3) -> f64 {
    (x.dot(w1) - 1.0).abs() + (x.dot(w2) - 1.0).abs()
}

/// Wall direction from two reflections off the same wall.
pub fn wall_direction_from_pair(m1: &Measurement, m2: &Measurement) -> Result<UnitVec3> {
    let nested = m1.v.cross(&m1.w).cross(&m2.v.cross(&m2.w));
    if !(nested.norm() > DEGENERACY_EPS) {
        return Err(Error::CoplanarPair);
    }
    let u = nested.normalize()?;
    if sign_score(&u, &m1.w, &m2.w) <= sign_score(&-*u, &m1.w, &m2.w) {
        Ok(u)
    } else {
        Ok(-u)
    }
}

/// Averaged pairwise wall direction over a cluster.
pub fn wall_direction_from_cluster(
    ms: &[Measurement],
    cluster: &MeasurementCluster,
    selection: PairSelection,
) -> Result<UnitVec3> {
    let members = &cluster.measurement_indices;
    if members.len() < 2 {
        return Err(Error::InsufficientMeasurements(members.len()));
    }
    let mut sum = Vec3::ZERO;
    let mut used = 0usize;
    for (i, j) in selection.pairs(members.len()) {
        if let Ok(u) = wall_direction_from_pair(&ms[members[i]], &ms[members[j]]) {
            sum += *u;
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::AllPairsDegenerate);
    }
    sum.normalize().map_err(|_| Error::AllPairsDegenerate)
}

/// Sender distance `p` along `v` given only the wall direction:
/// `p = Δ(w·b)/((v − w)·b)` with `b = (u×v)×u`.
pub fn sender_distance_from_direction(m: &Measurement, u: &UnitVec3) -> Result<f64> {
    let b = u.cross(&m.v).cross(u);
    let denom = (*m.v - *m.w).dot(&b);
    if !(denom.abs() > DEGENERACY_EPS) {
        return Err(Error::DegenerateGeometry("(v − w)·b vanishes"));
    }
    let p = m.delta * m.w.dot(&b) / denom;
    if !(p > 0.0) {
        return Err(Error::NonPositiveDistance(p));
    }
    Ok(p)
}

/// Mean over the cluster of the per-measurement wall distance
/// `((p·v + (p + Δ)·w)/2)·u`.
pub fn wall_distance(ms: &[Measurement], cluster: &MeasurementCluster, u: &UnitVec3) -> Result<f64> {
    let mut sum = 0.0;
    let mut used = 0usize;
    for &i in &cluster.measurement_indices {
        let m = &ms[i];
        let Ok(p) = sender_distance_from_direction(m, u) else { continue };
        let midpoint = (*m.v * p + *m.w * (p + m.delta)) * 0.5;
        sum += midpoint.dot(u);
        used += 1;
    }
    if used == 0 {
        return Err(Error::AllMeasurementsDegenerate);
    }
    let d = sum / used as f64;
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(d)
}

#[derive(Debug)]
pub struct Calibration {
    pub estimates: Vec<WallEstimate>,
    /// Clusters that produced no estimate, with the reason.
    pub dropped: Vec<(usize, Error)>,
}

impl Calibration {
    /// The estimate computed from cluster `cluster`, if any.
    pub fn for_cluster(&self, cluster: usize) -> Option<&WallEstimate> {
        self.estimates.iter().find(|e| e.source_cluster == cluster)
    }
}

pub fn calibrate(ms: &[Measurement], clusters: &[MeasurementCluster], selection: PairSelection) -> Calibration {
    let mut estimates = Vec::new();
    let mut dropped = Vec::new();
    for (id, cluster) in clusters.iter().enumerate() {
        let estimate = wall_direction_from_cluster(ms, cluster, selection)
            .and_then(|u| wall_distance(ms, cluster, &u).map(|d| WallEstimate::new(u, d, id)));
        match estimate {
            Ok(e) => estimates.push(e),
            Err(e) => dropped.push((id, e)),
        }
    }
    Calibration { estimates, dropped }
}

/// Copies each cluster's estimated wall normal vector into the cluster.
pub fn annotate_clusters(clusters: &mut [MeasurementCluster], calibration: &Calibration) {
    for (id, c) in clusters.iter_mut().enumerate() {
        c.wall_normal = calibration.for_cluster(id).map(|e| e.n);
    }
}
