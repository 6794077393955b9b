//! Grouping measurements by reflecting wall.
//!
//! Every measurement `(v, w, Δ)` constrains the wall normal vector `n` to a
//! circular arc through the receiver: for a hypothetical sender distance
//! `p`, the sender is `p·v`, its mirror image is `(p + Δ)·w`, and the wall
//! is their perpendicular bisector plane. Arcs of measurements reflected by
//! the same wall all pass through that wall's `n`.
//!
//! Two algorithms find those intersections: [`inversion`] straightens the
//! arcs into line segments by unit sphere inversion, [`gnomonic`] projects
//! them to great-circle arcs and then to straight lines on tangent planes.

pub mod gnomonic;
pub mod inversion;

pub use gnomonic::{cluster_by_gnomonic, cluster_by_gnomonic_bounded, gnomonic_project, icosahedron_centers, project_to_sphere_latlon, LatLon};
pub use inversion::{cluster_by_inversion, cluster_by_inversion_counted, InversionOutcome, DEFAULT_THRESHOLD};

use crate::error::{Error, Result};
use crate::geometry::{invert_point, Vec3};
use crate::simulation::Measurement;

/// Below this `‖w − v‖` the reflection cannot be told apart from the direct path.
pub const MIN_DIRECTION_GAP: f64 = 1e-9;

/// Locus of wall-normal candidates for one measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularSegment {
    pub measurement_ref: usize,
    /// `n(0) = (Δ/2)·w`.
    pub endpoint_near: Vec3,
    /// `lim n(p) = Δ(w − v)/‖w − v‖²` as `p → ∞`.
    pub endpoint_far: Vec3,
    v: Vec3,
    w: Vec3,
    delta: f64,
}

impl CircularSegment {
    /// Wall normal vector implied by a sender at distance `p` along `v`.
    pub fn point_at(&self, p: f64) -> Vec3 {
        let d = self.w * (p + self.delta) - self.v * p;
        d * ((p * self.delta + self.delta * self.delta / 2.0) / d.norm_squared())
    }
}

/// Image of a [`CircularSegment`] under unit sphere inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertedSegment {
    pub measurement_ref: usize,
    /// `2w/Δ`
    pub a: Vec3,
    /// `(w − v)/Δ`
    pub b: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementCluster {
    /// Sorted ascending.
    pub measurement_indices: Vec<usize>,
    pub wall_normal: Option<Vec3>,
}

impl MeasurementCluster {
    pub fn new(mut measurement_indices: Vec<usize>) -> Self {
        measurement_indices.sort_unstable();
        Self {
            measurement_indices,
            wall_normal: None,
        }
    }

    pub fn len(&self) -> usize {
        self.measurement_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurement_indices.is_empty()
    }
}

pub fn circular_segment(m: &Measurement, measurement_ref: usize) -> Result<CircularSegment> {
    let v = *m.v;
    let w = *m.w;
    let gap = w - v;
    let gap2 = gap.norm_squared();
    if gap2.sqrt() <= MIN_DIRECTION_GAP {
        return Err(Error::DegenerateMeasurement);
    }
    if !(m.delta > 0.0) {
        return Err(Error::DegenerateInput("delta must be positive"));
    }
    Ok(CircularSegment {
        measurement_ref,
        endpoint_near: w * (m.delta / 2.0),
        endpoint_far: gap * (m.delta / gap2),
        v,
        w,
        delta: m.delta,
    })
}

pub fn invert_segment(cs: &CircularSegment) -> Result<InvertedSegment> {
    // reject exactly what invert_point would reject
    invert_point(cs.endpoint_near)?;
    invert_point(cs.endpoint_far)?;
    Ok(InvertedSegment {
        measurement_ref: cs.measurement_ref,
        a: cs.w * (2.0 / cs.delta),
        b: (cs.w - cs.v) / cs.delta,
    })
}

/// Which clustering algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClusteringMethod {
    Inversion,
    Gnomonic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringParams {
    /// Inversion distance threshold.
    pub threshold: f64,
    /// Gnomonic arc truncation; `None` keeps full arcs.
    pub max_range: Option<f64>,
    /// Seed of the random hemisphere rotation.
    pub seed: u64,
}

impl ClusteringMethod {
    pub fn cluster(&self, ms: &[Measurement], params: &ClusteringParams) -> Vec<MeasurementCluster> {
        match self {
            ClusteringMethod::Inversion => cluster_by_inversion(ms, params.threshold),
            ClusteringMethod::Gnomonic => cluster_by_gnomonic_bounded(ms, params.seed, params.max_range),
        }
    }
}

/// Whether `clusters` partitions `0..n` with no loss and no duplicates.
pub fn is_partition(clusters: &[MeasurementCluster], n: usize) -> bool {
    let mut seen = vec![false; n];
    for idx in clusters.iter().flat_map(|c| c.measurement_indices.iter()) {
        match seen.get_mut(*idx) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    clusters.iter().all(|c| !c.is_empty()) && seen.into_iter().all(|s| s)
}

/// Fraction of measurements whose ground-truth wall is the majority wall of
/// their cluster. Measurements without ground truth count as impure.
pub fn purity(clusters: &[MeasurementCluster], ms: &[Measurement]) -> f64 {
    if ms.is_empty() {
        return 1.0;
    }
    let mut pure = 0usize;
    for c in clusters {
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for wall in c.measurement_indices.iter().filter_map(|&i| ms[i].true_wall_id) {
            match counts.iter_mut().find(|(w, _)| *w == wall) {
                Some((_, n)) => *n += 1,
                None => counts.push((wall, 1)),
            }
        }
        pure += counts.iter().map(|(_, n)| *n).max().unwrap_or(0);
    }
    pure as f64 / ms.len() as f64
}
