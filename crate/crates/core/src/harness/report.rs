use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::combo::{ComboId, TOKENS};
use super::experiment::{OffsetRecord, RunConfig};
use super::stats::{describe, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComboStats {
    pub combo: ComboId,
    /// `None` when every localization of this combination failed.
    pub summary: Option<Summary>,
    pub n_samples: usize,
    pub n_failed: usize,
}

impl ComboStats {
    pub fn get(&self, key: RankKey) -> f64 {
        self.summary.map_or(f64::NAN, |s| match key {
            RankKey::Mean => s.mean,
            RankKey::Median => s.median,
            RankKey::Std => s.std,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RankKey {
    Mean,
    Median,
    Std,
}

impl RankKey {
    pub const ALL: [RankKey; 3] = [RankKey::Mean, RankKey::Median, RankKey::Std];

    pub fn name(self) -> &'static str {
        match self {
            RankKey::Mean => "mean",
            RankKey::Median => "median",
            RankKey::Std => "std",
        }
    }
}

/// Per-combination statistics over successful localizations, in canonical
/// combination order.
pub fn aggregate(records: &[OffsetRecord]) -> Vec<ComboStats> {
    let mut groups: BTreeMap<ComboId, (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let entry = groups.entry(r.combo).or_default();
        match r.offset {
            Some(o) => entry.0.push(o),
            None => entry.1 += 1,
        }
    }
    groups
        .into_iter()
        .map(|(combo, (offsets, n_failed))| ComboStats {
            combo,
            summary: describe(&offsets),
            n_samples: offsets.len(),
            n_failed,
        })
        .collect()
}

/// Ascending by `key`, missing values last, ties in canonical order.
pub fn rank(stats: &[ComboStats], key: RankKey) -> Vec<ComboStats> {
    let mut out = stats.to_vec();
    out.sort_by(|a, b| {
        let (x, y) = (a.get(key), b.get(key));
        x.is_nan()
            .cmp(&y.is_nan())
            .then(x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.combo.cmp(&b.combo))
    });
    out
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub const RANKING_HEADER: &str = "rank,combo,clustering,averaging,selection,localization,mean,median,std,q1,q3,n,failed";

pub fn ranking_csv(ranked: &[ComboStats]) -> String {
    let mut out = String::from(RANKING_HEADER);
    out.push('\n');
    for (i, s) in ranked.iter().enumerate() {
        let [c, a, l, m] = s.combo.letters();
        let (mean, median, std, q1, q3) = s
            .summary
            .map_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN), |x| {
                (x.mean, x.median, x.std, x.q1, x.q3)
            });
        let _ = writeln!(
            out,
            "{},{},{c},{a},{l},{m},{},{},{},{},{},{},{}",
            i + 1,
            s.combo,
            num(mean),
            num(median),
            num(std),
            num(q1),
            num(q3),
            s.n_samples,
            s.n_failed
        );
    }
    out
}

pub fn offsets_csv(records: &[OffsetRecord]) -> String {
    let mut out = String::from("experiment,combo,sender,offset\n");
    for r in records {
        let offset = r.offset.map_or(String::new(), num);
        let _ = writeln!(out, "{},{},{},{offset}", r.experiment_id, r.combo, r.sender_id);
    }
    out
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "experiments": cfg.n_experiments,
        "senders": cfg.n_senders,
        "room_side": cfg.room_side,
        "kappa": finite(cfg.error.kappa),
        "delta_sigma": cfg.error.delta_sigma,
        "misassign_rate": cfg.error.misassign_rate,
        "inversion_threshold": cfg.inversion_threshold,
        "gnomonic_max_range": cfg.gnomonic_max_range,
        "seed": cfg.master_seed,
        "combos": cfg.combos.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn stats_json(s: &ComboStats) -> Value {
    let summary = s.summary.map(|x| {
        json!({
            "mean": x.mean,
            "median": x.median,
            "std": x.std,
            "q1": x.q1,
            "q3": x.q3,
            "iqr": x.iqr(),
            "whisker_low": x.whisker_low(),
            "whisker_high": x.whisker_high(),
        })
    });
    json!({
        "combo": s.combo,
        "stats": summary,
        "n": s.n_samples,
        "failed": s.n_failed,
    })
}

/// Which tokens each combination contains, one 0/1 row per token, columns in
/// ranking order.
fn membership(ranked: &[ComboStats]) -> Value {
    let rows: serde_json::Map<String, Value> = TOKENS
        .iter()
        .map(|t| {
            let row: Vec<u8> = ranked.iter().map(|s| u8::from(s.combo.has_token(*t))).collect();
            (t.to_string(), json!(row))
        })
        .collect();
    json!({
        "columns": ranked.iter().map(|s| s.combo.to_string()).collect::<Vec<_>>(),
        "rows": rows,
    })
}

pub fn summary_json(cfg: &RunConfig, stats: &[ComboStats]) -> Value {
    let mut rankings = serde_json::Map::new();
    let mut matrices = serde_json::Map::new();
    for key in RankKey::ALL {
        let ranked = rank(stats, key);
        rankings.insert(
            key.name().into(),
            json!(ranked.iter().map(|s| s.combo.to_string()).collect::<Vec<_>>()),
        );
        matrices.insert(key.name().into(), membership(&ranked));
    }
    let top5: Vec<Value> = rank(stats, RankKey::Median).iter().take(5).map(stats_json).collect();
    json!({
        "config": config_json(cfg),
        "rankings": rankings,
        "stats": stats.iter().map(stats_json).collect::<Vec<_>>(),
        "membership": matrices,
        "top5_median": top5,
    })
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Writes the three ranking tables, `summary.json` and optionally the raw
/// offsets into `out_dir`, creating it if needed. Returns the statistics.
pub fn rank_and_report(
    cfg: &RunConfig,
    records: &[OffsetRecord],
    out_dir: &Path,
    dump_offsets: bool,
) -> Result<Vec<ComboStats>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let stats = aggregate(records);
    for key in RankKey::ALL {
        let path = out_dir.join(format!("ranking_{}.csv", key.name()));
        write(&path, &ranking_csv(&rank(&stats, key)))?;
    }
    let summary = serde_json::to_string_pretty(&summary_json(cfg, &stats))
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    write(&out_dir.join("summary.json"), &summary)?;
    if dump_offsets {
        write(&out_dir.join("offsets.csv"), &offsets_csv(records))?;
    }
    Ok(stats)
}
