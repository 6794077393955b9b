//! Ground-truth rooms, sender placement and measurement synthesis, plus the
//! three error models applied to simulated measurements: angular noise on
//! every direction, Gaussian noise on the path-length difference, and
//! misassignment of reflections to a different direct signal.

use std::f64::consts::PI;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{reflect_across_plane, rotate_about_axis, UnitVec3, Vec3};

/// Clearance kept between sampled senders and the walls or the receiver.
pub const SENDER_CLEARANCE: f64 = 0.01;

/// Concentration of the angular error used in the reference setup.
pub const DEFAULT_KAPPA: f64 = 131.312;
/// Standard deviation of the path-length noise, in meters.
pub const DEFAULT_DELTA_SIGMA: f64 = 0.1;
/// Fraction of reflections attached to the wrong direct signal.
pub const DEFAULT_MISASSIGN_RATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    pub id: usize,
    /// Direction from the receiver to the closest point of the wall; the
    /// wall plane is `{x : x·unit_normal = distance}`.
    pub unit_normal: UnitVec3,
    pub distance: f64,
    pub polygon: Vec<Vec3>,
}

impl Wall {
    /// Wall normal vector: the closest point of the wall plane to the origin.
    pub fn normal_vector(&self) -> Vec3 {
        *self.unit_normal * self.distance
    }

    /// Whether `p`, assumed to lie in the wall plane, is inside the polygon
    /// (boundary included).
    pub fn contains(&self, p: &Vec3) -> bool {
        let e1 = self.unit_normal.any_orthogonal();
        let e2 = self.unit_normal.cross(&e1);
        let to2 = |q: &Vec3| (q.dot(&e1), q.dot(&e2));
        let (px, py) = to2(p);
        let pts: Vec<(f64, f64)> = self.polygon.iter().map(to2).collect();
        let n = pts.len();
        let mut inside = false;
        for i in 0..n {
            let (ax, ay) = pts[i];
            let (bx, by) = pts[(i + 1) % n];
            // boundary counts as inside
            let cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
            let scale = (bx - ax).abs() + (by - ay).abs();
            if cross.abs() <= 1e-12 * scale.max(1.0)
                && px >= ax.min(bx) - 1e-12
                && px <= ax.max(bx) + 1e-12
                && py >= ay.min(by) - 1e-12
                && py <= ay.max(by) + 1e-12
            {
                return true;
            }
            if (ay > py) != (by > py) {
                let x_at = ax + (py - ay) * (bx - ax) / (by - ay);
                if px < x_at {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub walls: Vec<Wall>,
    /// Always the origin; every measurement is relative to it.
    pub receiver: Vec3,
}

impl Room {
    /// Whether `p` is inside every wall's half-space with the given margin.
    pub fn contains(&self, p: &Vec3, margin: f64) -> bool {
        self.walls
            .iter()
            .all(|w| p.dot(&w.unit_normal) < w.distance - margin)
    }

    fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for v in self.walls.iter().flat_map(|w| w.polygon.iter()) {
            lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub sender_id: usize,
    /// Direction of the direct signal.
    pub v: UnitVec3,
    /// Direction of the reflected signal.
    pub w: UnitVec3,
    /// Path-length difference in meters (signal speed normalized to 1).
    pub delta: f64,
    /// Ground truth, never read by the algorithms.
    pub true_wall_id: Option<usize>,
    /// Set when the reflection was moved onto another sender's direct signal.
    pub misassigned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorConfig {
    /// Von Mises concentration; `f64::INFINITY` disables angular noise.
    pub kappa: f64,
    pub delta_sigma: f64,
    pub misassign_rate: f64,
    pub rng_seed: u64,
}

impl Default for ErrorConfig {
    fn default() -> Self {
        Self {
            kappa: DEFAULT_KAPPA,
            delta_sigma: DEFAULT_DELTA_SIGMA,
            misassign_rate: DEFAULT_MISASSIGN_RATE,
            rng_seed: 0,
        }
    }
}

impl ErrorConfig {
    pub fn zero_error(rng_seed: u64) -> Self {
        Self {
            kappa: f64::INFINITY,
            delta_sigma: 0.0,
            misassign_rate: 0.0,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidConfig(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if !(self.delta_sigma >= 0.0) || !self.delta_sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "delta sigma must be finite and >= 0, got {}",
                self.delta_sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.misassign_rate) {
            return Err(Error::InvalidConfig(format!(
                "misassign rate must be in [0, 1], got {}",
                self.misassign_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Indexed by sender id.
    pub sender_positions: Vec<Vec3>,
    pub room: Room,
}

impl GroundTruth {
    pub fn sender(&self, id: usize) -> Option<Vec3> {
        self.sender_positions.get(id).copied()
    }
}

/// Axis-aligned cube centered on the receiver.
pub fn make_cube_room(side: f64) -> Result<Room> {
    if !(side > 0.0) || !side.is_finite() {
        return Err(Error::InvalidConfig(format!("room side must be > 0, got {side}")));
    }
    let h = side / 2.0;
    let axes = [UnitVec3::X, -UnitVec3::X, UnitVec3::Y, -UnitVec3::Y, UnitVec3::Z, -UnitVec3::Z];
    let walls = axes
        .iter()
        .enumerate()
        .map(|(id, &n)| {
            let e1 = n.any_orthogonal();
            let e2 = n.cross(&e1);
            let c = *n * h;
            let polygon = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
                .iter()
                .map(|&(a, b)| snap(c + *e1 * (a * h) + e2 * (b * h)))
                .collect();
            Wall {
                id,
                unit_normal: n,
                distance: h,
                polygon,
            }
        })
        .collect();
    Ok(Room {
        walls,
        receiver: Vec3::ZERO,
    })
}

// cube corners are exactly ±h; strip rounding noise from the basis products
fn snap(v: Vec3) -> Vec3 {
    let r = |x: f64| {
        let k = x.round();
        if (x - k).abs() < 1e-12 {
            k
        } else {
            x
        }
    };
    let m = v.max_abs();
    if m == 0.0 {
        return v;
    }
    Vec3::new(r(v.x / m) * m, r(v.y / m) * m, r(v.z / m) * m)
}

/// Uniform sender positions inside the room, away from walls and receiver.
pub fn place_senders(room: &Room, count: usize, seed: u64) -> Result<GroundTruth> {
    if count == 0 {
        return Err(Error::InvalidConfig("sender count must be >= 1".into()));
    }
    let (lo, hi) = room.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sender_positions = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while sender_positions.len() < count {
        attempts += 1;
        if attempts > 1000 * count + 10_000 {
            return Err(Error::InvalidConfig("room interior too small for sender placement".into()));
        }
        let p = Vec3::new(
            rng.random_range(lo.x..hi.x),
            rng.random_range(lo.y..hi.y),
            rng.random_range(lo.z..hi.z),
        );
        if room.contains(&p, SENDER_CLEARANCE) && p.distance(&room.receiver) > SENDER_CLEARANCE {
            sender_positions.push(p);
        }
    }
    Ok(GroundTruth {
        sender_positions,
        room: room.clone(),
    })
}

/// Error-free measurements: one reflection per (sender, wall) whose mirrored
/// path to the receiver pierces the wall polygon.
pub fn generate_measurements(truth: &GroundTruth) -> Vec<Measurement> {
    let mut out = Vec::with_capacity(truth.sender_positions.len() * truth.room.walls.len());
    for (sender_id, &s) in truth.sender_positions.iter().enumerate() {
        let Ok(v) = s.normalize() else { continue };
        for wall in &truth.room.walls {
            let mirrored = reflect_across_plane(s, wall.unit_normal, wall.distance);
            let toward = mirrored.dot(&wall.unit_normal);
            if toward <= wall.distance {
                continue;
            }
            // the straight path from the mirrored sender to the receiver
            // crosses the wall plane at t·mirrored
            let hit = mirrored * (wall.distance / toward);
            if !wall.contains(&hit) {
                continue;
            }
            let Ok(w) = mirrored.normalize() else { continue };
            out.push(Measurement {
                sender_id,
                v,
                w,
                delta: mirrored.norm() - s.norm(),
                true_wall_id: Some(wall.id),
                misassigned: false,
            });
        }
    }
    out
}

/// Von Mises distribution on the circle with mean 0, sampled with the
/// Best–Fisher rejection scheme. Returns angles in `(-π, π]`.
#[derive(Debug, Clone, Copy)]
pub struct VonMises {
    kappa: f64,
    r: f64,
}

impl VonMises {
    /// Above this concentration the wrapped normal `N(0, 1/κ)` is used.
    const NORMAL_LIMIT: f64 = 1e5;

    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidConfig(format!("kappa must be > 0, got {kappa}")));
        }
        let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
        let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
        let r = (1.0 + rho * rho) / (2.0 * rho);
        Ok(Self { kappa, r })
    }
}

impl Distribution<f64> for VonMises {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.kappa.is_infinite() {
            return 0.0;
        }
        if self.kappa > Self::NORMAL_LIMIT {
            let n = Normal::new(0.0, 1.0 / self.kappa.sqrt()).expect("finite sigma");
            return n.sample(rng);
        }
        loop {
            let u1: f64 = rng.random();
            let z = (PI * u1).cos();
            let f = (1.0 + self.r * z) / (self.r + z);
            let c = self.kappa * (self.r - f);
            let u2: f64 = rng.random();
            if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
                let theta = f.clamp(-1.0, 1.0).acos();
                let u3: f64 = rng.random();
                return if u3 > 0.5 { theta } else { -theta };
            }
        }
    }
}

/// Deflects `d` by a von Mises angle about a uniformly random axis orthogonal to it.
pub fn perturb_direction<R: Rng + ?Sized>(d: UnitVec3, kappa: f64, rng: &mut R) -> UnitVec3 {
    let dist = VonMises::new(kappa).expect("kappa validated by caller");
    perturb_with(d, &dist, rng)
}

fn perturb_with<R: Rng + ?Sized>(d: UnitVec3, dist: &VonMises, rng: &mut R) -> UnitVec3 {
    if dist.kappa.is_infinite() {
        return d;
    }
    let theta = dist.sample(rng);
    let phi = rng.random_range(0.0..2.0 * PI);
    let e1 = d.any_orthogonal();
    let e2 = d.cross(&e1);
    let axis = UnitVec3::new_unchecked(*e1 * phi.cos() + e2 * phi.sin());
    rotate_about_axis(d, axis, theta)
}

/// Applies angular noise, path-length noise and reflection misassignment.
///
/// Every direct signal is perturbed once per sender and shared by all of its
/// reflections. Misassignment moves `(w, delta, true_wall_id)` onto the
/// (already perturbed) direct signal of another sender.
pub fn apply_errors(ms: &[Measurement], cfg: &ErrorConfig) -> Result<Vec<Measurement>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let angular = VonMises::new(cfg.kappa)?;
    let noise = Normal::new(0.0, cfg.delta_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;

    // perturbed direct signal per sender, in order of first appearance
    let mut senders: Vec<(usize, UnitVec3)> = Vec::new();
    for m in ms {
        if !senders.iter().any(|(id, _)| *id == m.sender_id) {
            senders.push((m.sender_id, perturb_with(m.v, &angular, &mut rng)));
        }
    }
    let direct = |id: usize| senders.iter().find(|(s, _)| *s == id).map(|(_, v)| *v);

    let mut out: Vec<Measurement> = ms
        .iter()
        .map(|m| {
            let w = perturb_with(m.w, &angular, &mut rng);
            let delta = if cfg.delta_sigma > 0.0 {
                (m.delta + noise.sample(&mut rng)).abs()
            } else {
                m.delta
            };
            Measurement {
                v: direct(m.sender_id).expect("sender recorded above"),
                w,
                delta,
                ..m.clone()
            }
        })
        .collect();

    let k = (cfg.misassign_rate * ms.len() as f64).round() as usize;
    if k > 0 && senders.len() > 1 {
        for i in index::sample(&mut rng, ms.len(), k.min(ms.len())).into_vec() {
            let current = out[i].sender_id;
            let pick = rng.random_range(0..senders.len() - 1);
            let others = senders.iter().filter(|(id, _)| *id != current);
            let (new_id, new_v) = *others.clone().nth(pick).expect("pick in range");
            out[i].sender_id = new_id;
            out[i].v = new_v;
            out[i].misassigned = true;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Room {
        make_cube_room(2.0).unwrap()
    }

    #[test]
    fn cube_room_layout() {
        let room = cube();
        assert_eq!(room.walls.len(), 6);
        assert_eq!(room.receiver, Vec3::ZERO);
        let mut normals: Vec<[f64; 3]> = room.walls.iter().map(|w| w.unit_normal.to_array()).collect();
        normals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in &room.walls {
            assert_eq!(w.distance, 1.0);
            assert_eq!(w.polygon.len(), 4);
            for v in &w.polygon {
                assert_eq!(v.max_abs(), 1.0);
                assert!((v.dot(&w.unit_normal) - w.distance).abs() < 1e-9);
            }
        }
        for axis in [Vec3::X, Vec3::Y, Vec3::Z] {
            assert!(room.walls.iter().any(|w| *w.unit_normal == axis));
            assert!(room.walls.iter().any(|w| *w.unit_normal == -axis));
        }
        let big = make_cube_room(4.0).unwrap();
        assert!(big.walls.iter().all(|w| w.distance == 2.0));
        assert!(make_cube_room(0.0).is_err());
    }

    #[test]
    fn senders_inside_and_deterministic() {
        let room = cube();
        let a = place_senders(&room, 20, 7).unwrap();
        let b = place_senders(&room, 20, 7).unwrap();
        assert_eq!(a.sender_positions.len(), 20);
        assert_eq!(a, b);
        for p in &a.sender_positions {
            assert!(p.max_abs() < 1.0 - SENDER_CLEARANCE);
            assert!(p.norm() > SENDER_CLEARANCE);
        }
        assert_ne!(a, place_senders(&room, 20, 8).unwrap());
        assert!(place_senders(&room, 0, 1).is_err());
    }

    #[test]
    fn collinear_mirror_case() {
        let truth = GroundTruth {
            sender_positions: vec![Vec3::new(0.5, 0.0, 0.0)],
            room: cube(),
        };
        let ms = generate_measurements(&truth);
        assert_eq!(ms.len(), 6);
        let m = ms.iter().find(|m| m.true_wall_id == Some(0)).unwrap();
        assert_eq!(*m.v, Vec3::X);
        assert_eq!(*m.w, Vec3::X);
        assert!((m.delta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_counts_and_delta_definition() {
        let truth = place_senders(&cube(), 20, 3).unwrap();
        let ms = generate_measurements(&truth);
        assert_eq!(ms.len(), 120);
        for m in &ms {
            let s = truth.sender(m.sender_id).unwrap();
            let wall = &truth.room.walls[m.true_wall_id.unwrap()];
            let mirrored = reflect_across_plane(s, wall.unit_normal, wall.distance);
            assert!(m.delta > 0.0);
            assert!((mirrored.norm() - (s.norm() + m.delta)).abs() < 1e-12);
            // wall plane bisects sender and mirrored sender
            let image = *m.w * (s.norm() + m.delta);
            let mid = (s + image) * 0.5;
            assert!((mid.dot(&wall.unit_normal) - wall.distance).abs() < 1e-9);
            let axis = (image - s).normalize().unwrap();
            assert!(axis.angle_to(&wall.unit_normal) < 1e-9);
        }
    }

    #[test]
    fn zero_error_config_is_identity() {
        let truth = place_senders(&cube(), 20, 3).unwrap();
        let ms = generate_measurements(&truth);
        let out = apply_errors(&ms, &ErrorConfig::zero_error(11)).unwrap();
        assert_eq!(out.len(), ms.len());
        for (a, b) in ms.iter().zip(&out) {
            assert!((*a.v - *b.v).norm() < 1e-9);
            assert!((*a.w - *b.w).norm() < 1e-9);
            assert!((a.delta - b.delta).abs() < 1e-9);
            assert_eq!(a.sender_id, b.sender_id);
        }
    }

    #[test]
    fn misassignment_count_and_positive_deltas() {
        let truth = place_senders(&cube(), 20, 5).unwrap();
        let ms = generate_measurements(&truth);
        let cfg = ErrorConfig {
            rng_seed: 99,
            ..ErrorConfig::default()
        };
        let out = apply_errors(&ms, &cfg).unwrap();
        let moved: Vec<_> = ms.iter().zip(&out).filter(|(a, b)| a.sender_id != b.sender_id).collect();
        assert_eq!(moved.len(), 6);
        assert_eq!(out.iter().filter(|m| m.misassigned).count(), 6);
        assert!(out.iter().all(|m| m.delta > 0.0));
        // direct signals are shared per sender
        for m in &out {
            let first = out.iter().find(|o| o.sender_id == m.sender_id).unwrap();
            assert_eq!(m.v, first.v);
        }
        assert_eq!(out, apply_errors(&ms, &cfg).unwrap());
    }

    #[test]
    fn invalid_error_config() {
        let ms: Vec<Measurement> = Vec::new();
        let bad = ErrorConfig {
            kappa: 0.0,
            ..ErrorConfig::default()
        };
        assert!(apply_errors(&ms, &bad).is_err());
        let bad = ErrorConfig {
            misassign_rate: 1.5,
            ..ErrorConfig::default()
        };
        assert!(apply_errors(&ms, &bad).is_err());
    }

    #[test]
    fn perturbation_concentration_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = Vec3::new(0.2, -0.5, 0.8).normalize().unwrap();
        for _ in 0..1000 {
            let p = perturb_direction(d, 1e9, &mut rng);
            assert!(p.angle_to(&d) < 0.01);
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wall_polygon_containment() {
        let room = cube();
        let w = &room.walls[0];
        assert!(w.contains(&Vec3::new(1.0, 0.2, -0.3)));
        assert!(w.contains(&Vec3::new(1.0, 1.0, 0.0)));
        assert!(!w.contains(&Vec3::new(1.0, 1.2, 0.0)));
    }
}
