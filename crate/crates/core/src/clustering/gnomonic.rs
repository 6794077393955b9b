//! Clustering by gnomonic projection.
//!
//! Circular segments are radially projected onto the unit sphere, where
//! they become great-circle arcs. Twelve hemispheres centered on the
//! vertices of a randomly rotated icosahedron cover the sphere; inside each
//! hemisphere the gnomonic projection maps arcs to straight 2D segments.
//! Measurements whose segments intersect in any hemisphere are connected,
//! and the connected components are the clusters.

use std::f64::consts::PI;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{segment_contains_point, segments_intersect_2d, Segment2, UnitVec3, Vec3};
use crate::simulation::Measurement;

use super::{circular_segment, MeasurementCluster};

/// A point strictly inside a hemisphere has `cos c` above this.
pub const HEMISPHERE_EPS: f64 = 1e-9;
/// Recursion limit for splitting arcs that fit in no hemisphere.
const MAX_SPLIT_DEPTH: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

pub fn project_to_sphere_latlon(p: Vec3) -> Result<LatLon> {
    let u = p.normalize()?;
    let lat = u.z.clamp(-1.0, 1.0).asin();
    // `+ 0.0` folds -0.0 so that (-1, -0, 0) maps to lon = π
    let lon = if u.x == 0.0 && u.y == 0.0 { 0.0 } else { (u.y + 0.0).atan2(u.x) };
    Ok(LatLon { lat, lon })
}

fn cos_c(p: LatLon, h: LatLon) -> f64 {
    h.lat.sin() * p.lat.sin() + h.lat.cos() * p.lat.cos() * (p.lon - h.lon).cos()
}

/// Gnomonic coordinates of `point` on the tangent plane at `center`.
pub fn gnomonic_project(point: LatLon, center: LatLon) -> Result<[f64; 2]> {
    let cc = cos_c(point, center);
    if !(cc > HEMISPHERE_EPS) {
        return Err(Error::OutsideHemisphere(cc));
    }
    let dl = point.lon - center.lon;
    let x = point.lat.cos() * dl.sin() / cc;
    let y = (center.lat.cos() * point.lat.sin() - center.lat.sin() * point.lat.cos() * dl.cos()) / cc;
    Ok([x, y])
}

/// Vertices of a regular icosahedron, rotated by a uniformly random rotation.
pub fn icosahedron_centers(seed: u64) -> [UnitVec3; 12] {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut raw = Vec::with_capacity(12);
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            raw.push(Vec3::new(0.0, a, b));
            raw.push(Vec3::new(a, b, 0.0));
            raw.push(Vec3::new(b, 0.0, a));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_quaternion(&mut rng);
    let rotated: Vec<UnitVec3> = raw
        .into_iter()
        .map(|v| rotate_by_quaternion(q, v).normalize().expect("icosahedron vertex is non-zero"))
        .collect();
    rotated.try_into().expect("twelve vertices")
}

// uniform on SO(3), Shoemake's subgroup algorithm
fn random_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    [
        b * (2.0 * PI * u3).cos(),
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
    ]
}

fn rotate_by_quaternion(q: [f64; 4], v: Vec3) -> Vec3 {
    let [w, x, y, z] = q;
    let u = Vec3::new(x, y, z);
    let t = u.cross(&v) * 2.0;
    v + t * w + u.cross(&t)
}

/// A great-circle arc of at most 180°, stored by its endpoints.
#[derive(Debug, Clone, Copy)]
struct Arc {
    measurement: usize,
    a: UnitVec3,
    b: UnitVec3,
}

enum Projected {
    Segment(Segment2),
    Point([f64; 2]),
}

impl Projected {
    fn touches(&self, other: &Projected) -> bool {
        match (self, other) {
            (Projected::Segment(s), Projected::Segment(t)) => segments_intersect_2d(s, t),
            (Projected::Segment(s), Projected::Point(p)) | (Projected::Point(p), Projected::Segment(s)) => {
                segment_contains_point(s, *p)
            }
            (Projected::Point(p), Projected::Point(q)) => p == q,
        }
    }
}

fn inside(h: &UnitVec3, p: &UnitVec3) -> bool {
    h.dot(p) > HEMISPHERE_EPS
}

/// Assigns `arc` to every hemisphere holding both endpoints; arcs held by
/// none are halved until the pieces fit.
fn assign(arc: Arc, centers: &[UnitVec3; 12], depth: u32, out: &mut [Vec<Arc>]) {
    let mut placed = false;
    for (h, bucket) in centers.iter().zip(out.iter_mut()) {
        if inside(h, &arc.a) && inside(h, &arc.b) {
            bucket.push(arc);
            placed = true;
        }
    }
    if placed || depth >= MAX_SPLIT_DEPTH {
        return;
    }
    let Ok(mid) = (*arc.a + *arc.b).normalize() else { return };
    assign(Arc { b: mid, ..arc }, centers, depth + 1, out);
    assign(Arc { a: mid, ..arc }, centers, depth + 1, out);
}

fn project(arc: &Arc, center: LatLon) -> Option<Projected> {
    let pa = gnomonic_project(project_to_sphere_latlon(*arc.a).ok()?, center).ok()?;
    let pb = gnomonic_project(project_to_sphere_latlon(*arc.b).ok()?, center).ok()?;
    Some(match Segment2::new(pa, pb) {
        Ok(s) => Projected::Segment(s),
        Err(_) => Projected::Point(pa),
    })
}

/// Gnomonic clustering over the full arcs, `p ∈ (0, ∞)`.
pub fn cluster_by_gnomonic(ms: &[Measurement], seed: u64) -> Vec<MeasurementCluster> {
    cluster_by_gnomonic_bounded(ms, seed, None)
}

/// Gnomonic clustering with arcs truncated at sender distance `max_range`.
///
/// The far tails of unbounded arcs (senders tens of meters away) cross arcs
/// of other walls, and a single crossing merges two components.
pub fn cluster_by_gnomonic_bounded(ms: &[Measurement], seed: u64, max_range: Option<f64>) -> Vec<MeasurementCluster> {
    let centers = icosahedron_centers(seed);
    let mut buckets: Vec<Vec<Arc>> = vec![Vec::new(); 12];
    for (i, m) in ms.iter().enumerate() {
        let Ok(cs) = circular_segment(m, i) else { continue };
        let far = match max_range {
            Some(p) => cs.point_at(p),
            None => cs.endpoint_far,
        };
        let (Ok(a), Ok(b)) = (cs.endpoint_near.normalize(), far.normalize()) else {
            continue;
        };
        assign(Arc { measurement: i, a, b }, &centers, 0, &mut buckets);
    }

    let mut graph = UnionFind::<usize>::new(ms.len());
    for (h, arcs) in centers.iter().zip(&buckets) {
        let center = project_to_sphere_latlon(**h).expect("unit center");
        let projected: Vec<(usize, Projected)> = arcs
            .iter()
            .filter_map(|arc| project(arc, center).map(|p| (arc.measurement, p)))
            .collect();
        for (k, (i, s)) in projected.iter().enumerate() {
            for (j, t) in &projected[k + 1..] {
                if i != j && s.touches(t) {
                    graph.union(*i, *j);
                }
            }
        }
    }

    components(&mut graph, ms.len())
}

/// Components ordered by their smallest member.
fn components(graph: &mut UnionFind<usize>, n: usize) -> Vec<MeasurementCluster> {
    let mut slot_of_root = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = graph.find_mut(i);
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot_of_root[root]].push(i);
    }
    groups.into_iter().map(MeasurementCluster::new).collect()
}
