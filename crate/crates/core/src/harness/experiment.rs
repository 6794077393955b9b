use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use crate::calibration::{calibrate, Calibration, PairSelection};
use crate::clustering::{ClusteringMethod, ClusteringParams, MeasurementCluster, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::localization::locate_all;
use crate::simulation::{apply_errors, generate_measurements, make_cube_room, place_senders, ErrorConfig, GroundTruth, Measurement};

use super::combo::{enumerate_combos, ComboId};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_experiments: usize,
    pub n_senders: usize,
    /// Side of the cube room in meters.
    pub room_side: f64,
    /// Error model; its `rng_seed` is replaced per experiment.
    pub error: ErrorConfig,
    pub inversion_threshold: f64,
    /// Sender range bounding gnomonic arcs, `None` for unbounded arcs.
    pub gnomonic_max_range: Option<f64>,
    pub master_seed: u64,
    pub combos: Vec<ComboId>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let room_side = 2.0;
        Self {
            n_experiments: 500,
            n_senders: 20,
            room_side,
            error: ErrorConfig::default(),
            inversion_threshold: DEFAULT_THRESHOLD,
            gnomonic_max_range: Some(default_max_range(room_side)),
            master_seed: 0,
            combos: enumerate_combos(None),
        }
    }
}

/// Default gnomonic arc bound: the cube's space diagonal.
pub fn default_max_range(room_side: f64) -> f64 {
    room_side * 3f64.sqrt()
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.error.validate()?;
        if self.n_senders == 0 {
            return Err(Error::InvalidConfig("at least one sender is required".into()));
        }
        if !(self.room_side > 0.0) || !self.room_side.is_finite() {
            return Err(Error::InvalidConfig(format!("room side must be > 0, got {}", self.room_side)));
        }
        if !(self.inversion_threshold >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold must be >= 0, got {}",
                self.inversion_threshold
            )));
        }
        if let Some(r) = self.gnomonic_max_range {
            if !(r > 0.0) {
                return Err(Error::InvalidConfig(format!("max range must be > 0, got {r}")));
            }
        }
        if self.combos.is_empty() {
            return Err(Error::InvalidConfig("no combinations selected".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeds of one experiment, all derived from `master_seed` and the id:
/// `base = splitmix64(master ^ splitmix64(id))`, then
/// `splitmix64(base ^ k)` for k = 1 (senders), 2 (errors), 3 (hemispheres).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentSeeds {
    pub placement: u64,
    pub errors: u64,
    pub hemispheres: u64,
}

impl ExperimentSeeds {
    pub fn derive(master_seed: u64, experiment_id: u64) -> Self {
        let base = splitmix64(master_seed ^ splitmix64(experiment_id));
        Self {
            placement: splitmix64(base ^ 1),
            errors: splitmix64(base ^ 2),
            hemispheres: splitmix64(base ^ 3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetRecord {
    pub experiment_id: u64,
    pub combo: ComboId,
    pub sender_id: usize,
    /// Euclidean distance to the true sender; `None` if localization failed.
    pub offset: Option<f64>,
}

impl OffsetRecord {
    pub fn failed(&self) -> bool {
        self.offset.is_none()
    }
}

/// Everything one experiment produced, for audits and tests.
#[derive(Debug)]
pub struct ExperimentRun {
    pub experiment_id: u64,
    pub truth: GroundTruth,
    pub measurements: Vec<Measurement>,
    pub clusterings: BTreeMap<ClusteringMethod, Vec<MeasurementCluster>>,
    pub calibrations: BTreeMap<(ClusteringMethod, PairSelection), Calibration>,
    pub records: Vec<OffsetRecord>,
    /// Content hash of the measurement set each combination consumed.
    pub input_hashes: Vec<(ComboId, u64)>,
}

pub fn measurement_hash(ms: &[Measurement]) -> u64 {
    let mut h = DefaultHasher::new();
    for m in ms {
        m.sender_id.hash(&mut h);
        for x in m.v.to_array().iter().chain(m.w.to_array().iter()) {
            x.to_bits().hash(&mut h);
        }
        m.delta.to_bits().hash(&mut h);
    }
    h.finish()
}

pub fn run_experiment(cfg: &RunConfig, experiment_id: u64) -> Result<Vec<OffsetRecord>> {
    Ok(run_experiment_detailed(cfg, experiment_id)?.records)
}

/// One experiment: a single measurement set shared by every combination.
pub fn run_experiment_detailed(cfg: &RunConfig, experiment_id: u64) -> Result<ExperimentRun> {
    cfg.validate()?;
    let seeds = ExperimentSeeds::derive(cfg.master_seed, experiment_id);
    let room = make_cube_room(cfg.room_side)?;
    let truth = place_senders(&room, cfg.n_senders, seeds.placement)?;
    let errors = ErrorConfig {
        rng_seed: seeds.errors,
        ..cfg.error
    };
    let measurements = apply_errors(&generate_measurements(&truth), &errors)?;
    let params = ClusteringParams {
        threshold: cfg.inversion_threshold,
        max_range: cfg.gnomonic_max_range,
        seed: seeds.hemispheres,
    };

    let mut clusterings = BTreeMap::new();
    let mut calibrations = BTreeMap::new();
    for combo in &cfg.combos {
        let clusters = clusterings
            .entry(combo.clustering)
            .or_insert_with(|| combo.clustering.cluster(&measurements, &params));
        calibrations
            .entry((combo.clustering, combo.averaging))
            .or_insert_with(|| calibrate(&measurements, clusters, combo.averaging));
    }

    let mut records = Vec::with_capacity(cfg.combos.len() * cfg.n_senders);
    let mut input_hashes = Vec::with_capacity(cfg.combos.len());
    for combo in &cfg.combos {
        let input: &[Measurement] = &measurements;
        input_hashes.push((*combo, measurement_hash(input)));
        let clusters = &clusterings[&combo.clustering];
        let calibration = &calibrations[&(combo.clustering, combo.averaging)];
        let outcome = locate_all(input, clusters, calibration, combo.localization, combo.selection);
        let mut found = outcome.positions.iter().peekable();
        for (sender_id, truth_pos) in truth.sender_positions.iter().enumerate() {
            let offset = match found.peek() {
                Some(fix) if fix.sender_id == sender_id => {
                    let fix = found.next().expect("peeked");
                    Some(fix.position.distance(truth_pos))
                }
                _ => None,
            };
            records.push(OffsetRecord {
                experiment_id,
                combo: *combo,
                sender_id,
                offset,
            });
        }
    }

    Ok(ExperimentRun {
        experiment_id,
        truth,
        measurements,
        clusterings,
        calibrations,
        records,
        input_hashes,
    })
}

/// All experiments, in parallel; records are ordered by experiment id.
pub fn run(cfg: &RunConfig) -> Result<Vec<OffsetRecord>> {
    cfg.validate()?;
    let batches: Vec<Vec<OffsetRecord>> = (0..cfg.n_experiments as u64)
        .into_par_iter()
        .map(|id| run_experiment(cfg, id))
        .collect::<Result<_>>()?;
    Ok(batches.into_iter().flatten().collect())
}
