//! Sender localization from measurements and calibrated walls.
//!
//! Four single-wall methods compute the distance `p` along the direct
//! signal `v` from one reflection and one wall; Closest Lines Extended
//! combines every reflection of a direct signal. Wall selection decides
//! which of a sender's reflections (and thereby which wall) a single-wall
//! method uses.
//!
//! [`ildars3d_two_measurements`] is the exact closed-form solution for two
//! reflections off one unknown wall. Applied naively to all pairs of
//! measurements it does not scale: every pair that mixes walls yields a
//! spurious wall, which is why the clustering stage exists.

use std::collections::BTreeMap;
use std::fmt;

use crate::calibration::{sender_distance_from_direction, wall_direction_from_pair, Calibration, WallEstimate, DEGENERACY_EPS};
use crate::clustering::MeasurementCluster;
use crate::error::{Error, Result};
use crate::geometry::{closest_point_n_lines, closest_point_two_lines, reflect_direction, Line3, UnitVec3, Vec3};
use crate::simulation::Measurement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalizationMethod {
    MapToNormal,
    ReflectionGeometry,
    WallDirection,
    ClosestLines,
    ClosestLinesExtended,
}

impl LocalizationMethod {
    pub const ALL: [LocalizationMethod; 5] = [
        LocalizationMethod::MapToNormal,
        LocalizationMethod::ReflectionGeometry,
        LocalizationMethod::WallDirection,
        LocalizationMethod::ClosestLines,
        LocalizationMethod::ClosestLinesExtended,
    ];
}

impl fmt::Display for LocalizationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalizationMethod::MapToNormal => "map-to-normal",
            LocalizationMethod::ReflectionGeometry => "reflection-geometry",
            LocalizationMethod::WallDirection => "wall-direction",
            LocalizationMethod::ClosestLines => "closest-lines",
            LocalizationMethod::ClosestLinesExtended => "closest-lines-extended",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WallSelection {
    LargestCluster,
    NarrowestCluster,
    UnweightedAverage,
}

impl WallSelection {
    pub const ALL: [WallSelection; 3] = [
        WallSelection::LargestCluster,
        WallSelection::NarrowestCluster,
        WallSelection::UnweightedAverage,
    ];
}

impl fmt::Display for WallSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WallSelection::LargestCluster => "largest-cluster",
            WallSelection::NarrowestCluster => "narrowest-cluster",
            WallSelection::UnweightedAverage => "unweighted-average",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SenderPosition {
    pub sender_id: usize,
    pub position: Vec3,
    /// Distance along the direct signal.
    pub p: f64,
}

impl SenderPosition {
    fn on_ray(m: &Measurement, p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonPositiveDistance(p));
        }
        Ok(Self {
            sender_id: m.sender_id,
            position: *m.v * p,
            p,
        })
    }
}

/// Map to Normal Vector: `p = ((2n − Δw)·n)/((v + w)·n)`.
pub fn locate_map_to_normal(m: &Measurement, n: Vec3) -> Result<SenderPosition> {
    let denom = (*m.v + *m.w).dot(&n);
    if !(denom.abs() > DEGENERACY_EPS * n.norm()) {
        return Err(Error::DegenerateGeometry("(v + w)·n vanishes"));
    }
    let p = (n * 2.0 - *m.w * m.delta).dot(&n) / denom;
    SenderPosition::on_ray(m, p)
}

/// Reflection Geometry: `p = 2(n·n)(w·b)/((v·n)(w·b) + (v·b)(w·n))`, `b = (u×v)×u`.
pub fn locate_reflection_geometry(m: &Measurement, n: Vec3) -> Result<SenderPosition> {
    let u = n.normalize()?;
    let b = u.cross(&m.v).cross(&u);
    if !(b.norm() > DEGENERACY_EPS) {
        return Err(Error::DegenerateGeometry("direct signal parallel to wall normal"));
    }
    let (vn, wn, vb, wb) = (m.v.dot(&n), m.w.dot(&n), m.v.dot(&b), m.w.dot(&b));
    let denom = vn * wb + vb * wn;
    if !(denom.abs() > DEGENERACY_EPS * n.norm() * b.norm()) {
        return Err(Error::DegenerateGeometry("reflection geometry denominator vanishes"));
    }
    SenderPosition::on_ray(m, 2.0 * n.norm_squared() * wb / denom)
}

/// Wall Direction: uses only the wall's direction, never its distance.
pub fn locate_wall_direction(m: &Measurement, u: UnitVec3) -> Result<SenderPosition> {
    let p = sender_distance_from_direction(m, &u)?;
    SenderPosition::on_ray(m, p)
}

/// Reflected direction `w` mirrored on the wall with normal vector `n`.
pub fn mirrored_reflection(w: UnitVec3, n: Vec3) -> Result<UnitVec3> {
    Ok(reflect_direction(w, n.normalize()?))
}

/// Line from the mirrored receiver `2n` along the mirrored reflection.
fn mirrored_line(m: &Measurement, n: Vec3) -> Result<Line3> {
    Ok(Line3::new(n * 2.0, mirrored_reflection(m.w, n)?))
}

/// Closest Lines: closest point of `λv` and `2n + μwᵐ`.
pub fn locate_closest_lines(m: &Measurement, n: Vec3) -> Result<SenderPosition> {
    let g = Line3::new(Vec3::ZERO, m.v);
    let h = mirrored_line(m, n)?;
    let position = closest_point_two_lines(&g, &h)?;
    let p = position.dot(&m.v);
    if !(p > 0.0) {
        return Err(Error::NonPositiveDistance(p));
    }
    Ok(SenderPosition {
        sender_id: m.sender_id,
        position,
        p,
    })
}

/// Closest Lines Extended: least-squares point of the direct line and one
/// mirrored line per (reflection, wall) pair.
pub fn locate_closest_lines_extended(
    sender_id: usize,
    v: UnitVec3,
    reflections: &[(&Measurement, &WallEstimate)],
) -> Result<SenderPosition> {
    if reflections.is_empty() {
        return Err(Error::NoWalls);
    }
    let mut lines = Vec::with_capacity(reflections.len() + 1);
    lines.push(Line3::new(Vec3::ZERO, v));
    for (m, wall) in reflections {
        lines.push(mirrored_line(m, wall.n)?);
    }
    let position = closest_point_n_lines(&lines)?;
    let p = position.dot(&v);
    if !(p > 0.0) {
        return Err(Error::NonPositiveDistance(p));
    }
    Ok(SenderPosition { sender_id, position, p })
}

/// Any single-wall method.
pub fn locate_single(method: LocalizationMethod, m: &Measurement, wall: &WallEstimate) -> Result<SenderPosition> {
    match method {
        LocalizationMethod::MapToNormal => locate_map_to_normal(m, wall.n),
        LocalizationMethod::ReflectionGeometry => locate_reflection_geometry(m, wall.n),
        LocalizationMethod::WallDirection => locate_wall_direction(m, wall.u),
        LocalizationMethod::ClosestLines => locate_closest_lines(m, wall.n),
        LocalizationMethod::ClosestLinesExtended => {
            locate_closest_lines_extended(m.sender_id, m.v, &[(m, wall)])
        }
    }
}

/// A calibrated cluster as seen by wall selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterWall {
    pub cluster_id: usize,
    pub size: usize,
    /// Mean angle in radians between the cluster's reflections and `n̂`.
    pub narrowness: f64,
    pub estimate: WallEstimate,
}

/// One [`ClusterWall`] per cluster that has a wall estimate, by cluster id.
pub fn cluster_walls(ms: &[Measurement], clusters: &[MeasurementCluster], calibration: &Calibration) -> Vec<ClusterWall> {
    calibration
        .estimates
        .iter()
        .map(|e| {
            let members = &clusters[e.source_cluster].measurement_indices;
            let narrowness =
                members.iter().map(|&i| ms[i].w.angle_to(&e.u)).sum::<f64>() / members.len().max(1) as f64;
            ClusterWall {
                cluster_id: e.source_cluster,
                size: members.len(),
                narrowness,
                estimate: *e,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallChoice<'a> {
    Wall(&'a ClusterWall),
    AllWalls,
}

/// Walls in order of preference; ties go to the lowest cluster id.
pub fn rank_walls<'a>(options: &[&'a ClusterWall], strategy: WallSelection) -> Vec<&'a ClusterWall> {
    let mut ranked = options.to_vec();
    match strategy {
        WallSelection::LargestCluster => {
            ranked.sort_by(|a, b| b.size.cmp(&a.size).then(a.cluster_id.cmp(&b.cluster_id)))
        }
        WallSelection::NarrowestCluster => ranked.sort_by(|a, b| {
            a.narrowness
                .total_cmp(&b.narrowness)
                .then(a.cluster_id.cmp(&b.cluster_id))
        }),
        WallSelection::UnweightedAverage => ranked.sort_by_key(|w| w.cluster_id),
    }
    ranked
}

pub fn select_wall<'a>(options: &[&'a ClusterWall], strategy: WallSelection) -> Result<WallChoice<'a>> {
    if options.is_empty() {
        return Err(Error::NoWalls);
    }
    Ok(match strategy {
        WallSelection::UnweightedAverage => WallChoice::AllWalls,
        _ => WallChoice::Wall(rank_walls(options, strategy)[0]),
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalizationOutcome {
    /// Sorted by sender id.
    pub positions: Vec<SenderPosition>,
    /// Senders present in the input without any surviving estimate.
    pub failed: Vec<usize>,
}

/// Localizes every sender (direct signal) present in `ms`.
///
/// A sender's candidates are its reflections whose cluster has a wall
/// estimate. Largest/Narrowest use the best-ranked candidate, falling back
/// down the ranking when a candidate's geometry is degenerate; Unweighted
/// Average takes the mean over all candidates that succeed. Closest Lines
/// Extended always uses every candidate.
pub fn locate_all(
    ms: &[Measurement],
    clusters: &[MeasurementCluster],
    calibration: &Calibration,
    method: LocalizationMethod,
    selection: WallSelection,
) -> LocalizationOutcome {
    let walls = cluster_walls(ms, clusters, calibration);
    let mut wall_of_measurement: Vec<Option<&ClusterWall>> = vec![None; ms.len()];
    for w in &walls {
        for &i in &clusters[w.cluster_id].measurement_indices {
            wall_of_measurement[i] = Some(w);
        }
    }

    let mut by_sender: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, m) in ms.iter().enumerate() {
        by_sender.entry(m.sender_id).or_default().push(i);
    }

    let mut out = LocalizationOutcome::default();
    for (sender_id, indices) in by_sender {
        let candidates: Vec<(usize, &ClusterWall)> = indices
            .iter()
            .filter_map(|&i| wall_of_measurement[i].map(|w| (i, w)))
            .collect();
        match locate_sender(ms, sender_id, &candidates, method, selection) {
            Some(pos) => out.positions.push(pos),
            None => out.failed.push(sender_id),
        }
    }
    out
}

fn locate_sender(
    ms: &[Measurement],
    sender_id: usize,
    candidates: &[(usize, &ClusterWall)],
    method: LocalizationMethod,
    selection: WallSelection,
) -> Option<SenderPosition> {
    let (&(first, _), _) = candidates.split_first()?;
    let v = ms[first].v;

    if method == LocalizationMethod::ClosestLinesExtended {
        let reflections: Vec<(&Measurement, &WallEstimate)> =
            candidates.iter().map(|&(i, w)| (&ms[i], &w.estimate)).collect();
        return locate_closest_lines_extended(sender_id, v, &reflections).ok();
    }

    match selection {
        WallSelection::UnweightedAverage => {
            let fixes: Vec<SenderPosition> = candidates
                .iter()
                .filter_map(|&(i, w)| locate_single(method, &ms[i], &w.estimate).ok())
                .collect();
            if fixes.is_empty() {
                return None;
            }
            let position = fixes.iter().map(|f| f.position).sum::<Vec3>() / fixes.len() as f64;
            Some(SenderPosition {
                sender_id,
                position,
                p: position.dot(&v),
            })
        }
        _ => {
            let options: Vec<&ClusterWall> = candidates.iter().map(|&(_, w)| w).collect();
            rank_walls(&options, selection).into_iter().find_map(|wall| {
                candidates
                    .iter()
                    .filter(|(_, w)| w.cluster_id == wall.cluster_id)
                    .find_map(|&(i, w)| locate_single(method, &ms[i], &w.estimate).ok())
            })
        }
    }
}

/// Exact two-measurement solution: wall direction from the pair, then each
/// sender by the Wall Direction formula.
pub fn ildars3d_two_measurements(m1: &Measurement, m2: &Measurement) -> Result<(SenderPosition, SenderPosition)> {
    let u = wall_direction_from_pair(m1, m2)?;
    Ok((locate_wall_direction(m1, u)?, locate_wall_direction(m2, u)?))
}
