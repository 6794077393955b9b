//! Line-oriented text formats for audit dumps.
//!
//! | record      | fields                                                  |
//! |-------------|---------------------------------------------------------|
//! | measurement | `sender_id v.x v.y v.z w.x w.y w.z delta [true_wall_id]` |
//! | cluster     | `cluster_id: i,j,...`                                    |
//! | wall        | `cluster_id u.x u.y u.z distance`                        |
//! | position    | `sender_id x y z method selection`                       |
//!
//! The ground-truth wall column is `-` when unknown and carries a `*`
//! suffix for misassigned reflections. Blank lines and `#` comments are
//! skipped by the parsers. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::calibration::WallEstimate;
use crate::clustering::MeasurementCluster;
use crate::error::{Error, Result};
use crate::geometry::{UnitVec3, Vec3};
use crate::localization::{LocalizationMethod, SenderPosition, WallSelection};
use crate::simulation::Measurement;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: FromStr>(line: usize, name: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {name}"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {name}: {raw:?}"),
    })
}

fn unit(line: usize, x: f64, y: f64, z: f64) -> Result<UnitVec3> {
    let v = Vec3::new(x, y, z);
    if (v.norm() - 1.0).abs() < 1e-12 {
        return Ok(UnitVec3::new_unchecked(v));
    }
    UnitVec3::new_normalize(v).map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })
}

pub fn write_measurements(ms: &[Measurement]) -> String {
    let mut out = String::new();
    for m in ms {
        let wall = match m.true_wall_id {
            Some(id) => id.to_string(),
            None => "-".into(),
        };
        let mark = if m.misassigned { "*" } else { "" };
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {} {wall}{mark}",
            m.sender_id, m.v.x, m.v.y, m.v.z, m.w.x, m.w.y, m.w.z, m.delta
        );
    }
    out
}

pub fn parse_measurements(text: &str) -> Result<Vec<Measurement>> {
    content_lines(text)
        .map(|(n, line)| {
            let mut it = line.split_whitespace();
            let sender_id = field(n, "sender_id", it.next())?;
            let mut xs = [0.0; 7];
            for (x, name) in xs.iter_mut().zip(["v.x", "v.y", "v.z", "w.x", "w.y", "w.z", "delta"]) {
                *x = field(n, name, it.next())?;
            }
            let (true_wall_id, misassigned) = match it.next() {
                None => (None, false),
                Some(raw) => {
                    let (id, mark) = raw.strip_suffix('*').map_or((raw, false), |r| (r, true));
                    let id = if id == "-" { None } else { Some(field(n, "true_wall_id", Some(id))?) };
                    (id, mark)
                }
            };
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: n,
                    msg: "trailing fields".into(),
                });
            }
            Ok(Measurement {
                sender_id,
                v: unit(n, xs[0], xs[1], xs[2])?,
                w: unit(n, xs[3], xs[4], xs[5])?,
                delta: xs[6],
                true_wall_id,
                misassigned,
            })
        })
        .collect()
}

pub fn write_clusters(clusters: &[MeasurementCluster]) -> String {
    let mut out = String::new();
    for (id, c) in clusters.iter().enumerate() {
        let members: Vec<String> = c.measurement_indices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{id}: {}", members.join(","));
    }
    out
}

/// Clusters in file order; the leading ids must count up from zero.
pub fn parse_clusters(text: &str) -> Result<Vec<MeasurementCluster>> {
    let mut out = Vec::new();
    for (n, line) in content_lines(text) {
        let (id, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: n,
            msg: "expected `id: members`".into(),
        })?;
        let id: usize = field(n, "cluster_id", Some(id.trim()))?;
        if id != out.len() {
            return Err(Error::Parse {
                line: n,
                msg: format!("expected cluster id {}, got {id}", out.len()),
            });
        }
        let members = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| field(n, "measurement index", Some(s)))
            .collect::<Result<Vec<usize>>>()?;
        out.push(MeasurementCluster::new(members));
    }
    Ok(out)
}

pub fn write_wall_estimates(estimates: &[WallEstimate]) -> String {
    let mut out = String::new();
    for e in estimates {
        let _ = writeln!(out, "{} {} {} {} {}", e.source_cluster, e.u.x, e.u.y, e.u.z, e.distance);
    }
    out
}

pub fn parse_wall_estimates(text: &str) -> Result<Vec<WallEstimate>> {
    content_lines(text)
        .map(|(n, line)| {
            let mut it = line.split_whitespace();
            let id = field(n, "cluster_id", it.next())?;
            let x = field(n, "u.x", it.next())?;
            let y = field(n, "u.y", it.next())?;
            let z = field(n, "u.z", it.next())?;
            let d = field(n, "distance", it.next())?;
            Ok(WallEstimate::new(unit(n, x, y, z)?, d, id))
        })
        .collect()
}

pub fn write_positions(positions: &[SenderPosition], method: LocalizationMethod, selection: WallSelection) -> String {
    let mut out = String::new();
    for p in positions {
        let q = p.position;
        let _ = writeln!(out, "{} {} {} {} {method} {selection}", p.sender_id, q.x, q.y, q.z);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::{apply_errors, generate_measurements, make_cube_room, place_senders, ErrorConfig};

    fn noisy() -> Vec<Measurement> {
        let truth = place_senders(&make_cube_room(2.0).unwrap(), 20, 4).unwrap();
        apply_errors(&generate_measurements(&truth), &ErrorConfig::default()).unwrap()
    }

    #[test]
    fn measurements_round_trip_exactly() {
        let ms = noisy();
        assert!(ms.iter().any(|m| m.misassigned));
        let back = parse_measurements(&write_measurements(&ms)).unwrap();
        assert_eq!(back, ms);
    }

    #[test]
    fn measurement_without_truth_column() {
        let ms = parse_measurements("# header\n\n3 1 0 0 0 1 0 0.5\n").unwrap();
        assert_eq!(ms[0].sender_id, 3);
        assert_eq!(ms[0].true_wall_id, None);
        assert!(!ms[0].misassigned);
        let ms = parse_measurements("3 1 0 0 0 1 0 0.5 -*").unwrap();
        assert!(ms[0].misassigned && ms[0].true_wall_id.is_none());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_measurements("0 1 0 0 0 1 0 0.5 2\n0 1 0 zz 0 1 0 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(parse_measurements("0 0 0 0 0 1 0 0.5").is_err());
        assert!(parse_measurements("0 1 0 0 0 1 0 0.5 1 extra").is_err());
    }

    #[test]
    fn clusters_round_trip() {
        let cs = vec![
            MeasurementCluster::new(vec![4, 0, 2]),
            MeasurementCluster::new(vec![]),
            MeasurementCluster::new(vec![1]),
        ];
        let text = write_clusters(&cs);
        assert_eq!(text, "0: 0,2,4\n1: \n2: 1\n");
        assert_eq!(parse_clusters(&text).unwrap(), cs);
        assert!(parse_clusters("1: 3").is_err());
    }

    #[test]
    fn wall_estimates_round_trip() {
        let es = vec![
            WallEstimate::new(UnitVec3::X, 1.0, 0),
            WallEstimate::new(UnitVec3::new_normalize(Vec3::new(1.0, 2.0, -3.0)).unwrap(), 0.73, 5),
        ];
        assert_eq!(parse_wall_estimates(&write_wall_estimates(&es)).unwrap(), es);
    }

    #[test]
    fn positions_format() {
        let p = SenderPosition {
            sender_id: 7,
            position: Vec3::new(0.5, -0.25, 1.0),
            p: 1.0,
        };
        let text = write_positions(&[p], LocalizationMethod::ClosestLines, WallSelection::NarrowestCluster);
        assert_eq!(text, "7 0.5 -0.25 1 closest-lines narrowest-cluster\n");
    }
}
