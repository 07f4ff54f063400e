//! Multi-person tracking by detection: Kalman prediction plus optimal IoU
//! assignment, with tentative-track confirmation and age-based deletion.
//! Each confirmed track accumulates a trace of observed positions and
//! appearance crops.

mod assignment;
mod kalman;

pub use assignment::{max_score_assignment, total_score};

use crate::config::TrackerCfg;
use crate::frame::{Crop, Frame};
use crate::geom::{iou, BBox, Point};
use crate::perception::Detection;
use kalman::KalmanBoxFilter;
use std::collections::BTreeMap;

/// Floor for the second association pass that rescues marginal overlaps.
const IOU_RECOVER: f64 = 0.1;

/// Identifier of a tracked person. Never reused within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonId(pub u32);

impl std::fmt::Display for PersonId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "track:{}", self.0)
    }
}

/// One observed position of a person: detection box, its centroid, and the
/// appearance crop cut from that frame.
#[derive(Debug, Clone)]
pub struct TraceSample {
    pub frame: u64,
    pub point: Point,
    pub bbox: BBox,
    pub crop: Crop,
}

/// The full observation history of one person.
#[derive(Debug, Clone)]
pub struct Trace {
    pub person: PersonId,
    pub samples: Vec<TraceSample>,
    pub alive: bool,
    pub confirmed: bool,
}

impl Trace {
    pub fn first_frame(&self) -> Option<u64> {
        self.samples.first().map(|s| s.frame)
    }

    pub fn last_frame(&self) -> Option<u64> {
        self.samples.last().map(|s| s.frame)
    }

    /// Samples with frame index in [from, to] (inclusive).
    pub fn window(&self, from: u64, to: u64) -> &[TraceSample] {
        let start = self.samples.partition_point(|s| s.frame < from);
        let end = self.samples.partition_point(|s| s.frame <= to);
        &self.samples[start..end]
    }

    /// Samples with timestamps in [from_t, to_t] seconds.
    pub fn window_secs(&self, from_t: f64, to_t: f64, fps: u32) -> &[TraceSample] {
        debug_assert!(from_t <= to_t);
        let from = (from_t * fps as f64).ceil().max(0.0) as u64;
        let to = (to_t * fps as f64).floor().max(0.0) as u64;
        self.window(from, to)
    }

    /// Most frequent ground-truth entity among the samples, if any carries one.
    pub fn gt_entity(&self) -> Option<String> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &self.samples {
            if let Some(e) = s.crop.gt_entity.as_deref() {
                *counts.entry(e).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .max_by_key(|&(_, c)| c)
            .map(|(e, _)| e.to_string())
    }
}

#[derive(Debug)]
struct Track {
    id: PersonId,
    kf: KalmanBoxFilter,
    predicted: BBox,
    hit_streak: u32,
    time_since_update: u32,
    confirmed: bool,
}

/// SORT-style tracker; owns the traces of every person it ever confirmed.
#[derive(Debug)]
pub struct SortTracker {
    cfg: TrackerCfg,
    tracks: Vec<Track>,
    traces: BTreeMap<PersonId, Trace>,
    next_id: u32,
}

impl SortTracker {
    pub fn new(cfg: TrackerCfg) -> Self {
        SortTracker {
            cfg,
            tracks: Vec::new(),
            traces: BTreeMap::new(),
            next_id: 1,
        }
    }

    pub fn traces(&self) -> &BTreeMap<PersonId, Trace> {
        &self.traces
    }

    pub fn trace(&self, id: PersonId) -> Option<&Trace> {
        self.traces.get(&id)
    }

    /// Ids of tracks that are alive and confirmed this frame.
    pub fn active_ids(&self) -> Vec<PersonId> {
        self.tracks
            .iter()
            .filter(|t| t.confirmed)
            .map(|t| t.id)
            .collect()
    }

    /// Advance one frame: predict, assign detections, update, manage births
    /// and deaths. Detections must be person detections of the current frame.
    pub fn step(&mut self, detections: &[Detection], frame: &Frame) {
        for t in &mut self.tracks {
            t.predicted = t.kf.predict();
        }

        // Optimal assignment on the IoU matrix, then drop weak pairs. A
        // second pass with a lower floor reattaches marginal leftovers
        // (stand-to-walk transitions plus jitter can dip below iou_min for a
        // frame) so one noisy frame cannot split a track.
        let mut matched_det = vec![false; detections.len()];
        let mut matched_trk = vec![false; self.tracks.len()];
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        if !self.tracks.is_empty() && !detections.is_empty() {
            let score: Vec<Vec<f64>> = self
                .tracks
                .iter()
                .map(|t| {
                    detections
                        .iter()
                        .map(|d| iou(&t.predicted, &d.bbox))
                        .collect()
                })
                .collect();
            for (ti, di) in max_score_assignment(&score) {
                if score[ti][di] >= self.cfg.iou_min {
                    matched_trk[ti] = true;
                    matched_det[di] = true;
                    pairs.push((ti, di));
                }
            }

            let rest_trk: Vec<usize> =
                (0..self.tracks.len()).filter(|&i| !matched_trk[i]).collect();
            let rest_det: Vec<usize> =
                (0..detections.len()).filter(|&i| !matched_det[i]).collect();
            if !rest_trk.is_empty() && !rest_det.is_empty() {
                let recover: Vec<Vec<f64>> = rest_trk
                    .iter()
                    .map(|&ti| rest_det.iter().map(|&di| score[ti][di]).collect())
                    .collect();
                for (ri, rj) in max_score_assignment(&recover) {
                    if recover[ri][rj] >= IOU_RECOVER {
                        let (ti, di) = (rest_trk[ri], rest_det[rj]);
                        matched_trk[ti] = true;
                        matched_det[di] = true;
                        pairs.push((ti, di));
                    }
                }
            }
        }

        for (ti, di) in pairs {
            let track = &mut self.tracks[ti];
            track.kf.update(&detections[di].bbox);
            track.hit_streak += 1;
            track.time_since_update = 0;
            if track.hit_streak >= self.cfg.min_hits {
                track.confirmed = true;
            }
            Self::record_sample(&mut self.traces, track, &detections[di], frame);
        }

        for (ti, m) in matched_trk.iter().enumerate() {
            if !m {
                let track = &mut self.tracks[ti];
                track.time_since_update += 1;
                track.hit_streak = 0;
            }
        }

        // Births: an unmatched detection spawns a tentative track unless it
        // overlaps a track that already exists (a double detection of the
        // same person must not split the track).
        for (di, m) in matched_det.iter().enumerate() {
            if *m {
                continue;
            }
            let d = &detections[di];
            let c = d.bbox.center();
            let shadowed = self.tracks.iter().any(|t| {
                iou(&t.predicted, &d.bbox) >= self.cfg.iou_min
                    || (c.x >= t.predicted.x as f64
                        && c.x < t.predicted.right() as f64
                        && c.y >= t.predicted.y as f64
                        && c.y < t.predicted.bottom() as f64)
            });
            if shadowed {
                continue;
            }
            let id = PersonId(self.next_id);
            self.next_id += 1;
            let mut track = Track {
                id,
                kf: KalmanBoxFilter::new(&d.bbox),
                predicted: d.bbox,
                hit_streak: 1,
                time_since_update: 0,
                confirmed: self.cfg.min_hits <= 1,
            };
            track.confirmed = track.hit_streak >= self.cfg.min_hits;
            self.traces.insert(
                id,
                Trace {
                    person: id,
                    samples: Vec::new(),
                    alive: true,
                    confirmed: track.confirmed,
                },
            );
            Self::record_sample(&mut self.traces, &track, d, frame);
            self.tracks.push(track);
        }

        // Deaths: retire tracks unseen for longer than max_age.
        let max_age = self.cfg.max_age;
        let traces = &mut self.traces;
        self.tracks.retain(|t| {
            let dead = t.time_since_update > max_age;
            if dead {
                if let Some(tr) = traces.get_mut(&t.id) {
                    tr.alive = false;
                }
            }
            !dead
        });
    }

    fn record_sample(
        traces: &mut BTreeMap<PersonId, Trace>,
        track: &Track,
        det: &Detection,
        frame: &Frame,
    ) {
        let trace = traces.get_mut(&track.id).expect("trace exists for track");
        trace.confirmed = track.confirmed;
        if trace.samples.last().map(|s| s.frame) == Some(frame.index()) {
            return; // at most one sample per frame
        }
        trace.samples.push(TraceSample {
            frame: frame.index(),
            point: det.bbox.center(),
            bbox: det.bbox,
            crop: frame.crop(&det.bbox, det.gt_entity.clone()),
        });
    }
}
