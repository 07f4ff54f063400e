//! Owner assignment and abandonment rules.
//!
//! The owner of a newly registered static object is the person whose recent
//! trace (the last 2 s) stayed closest to it on average. An owned object is
//! abandoned once its owner walks out of the scene (edge band + track death)
//! or stays gone for more than 30 consecutive seconds.

use crate::config::OwnershipCfg;
use crate::geom::centroid_distance;
use crate::perception::{ObjectId, ObjectRecord, RegistryKind};
use crate::tracker::{PersonId, SortTracker, Trace};
use std::collections::{BTreeMap, BTreeSet};

/// Role bookkeeping for one tracked person.
#[derive(Debug, Clone, Default)]
pub struct PersonRecord {
    pub owned: BTreeSet<ObjectId>,
    pub candidate_for: BTreeSet<ObjectId>,
    pub suspect: bool,
    /// Entity label remembered from the trace, for event reporting.
    pub gt_label: Option<String>,
}

/// Directory of every person the tracker ever confirmed.
#[derive(Debug, Default)]
pub struct PersonDirectory {
    records: BTreeMap<PersonId, PersonRecord>,
}

impl PersonDirectory {
    pub fn new() -> Self {
        PersonDirectory::default()
    }

    /// Keep the directory in sync with the tracker's confirmed traces.
    pub fn sync(&mut self, tracker: &SortTracker) {
        for (id, trace) in tracker.traces() {
            if !trace.confirmed {
                continue;
            }
            let rec = self.records.entry(*id).or_default();
            if rec.gt_label.is_none() {
                rec.gt_label = trace.gt_entity();
            }
        }
    }

    pub fn get(&self, id: PersonId) -> Option<&PersonRecord> {
        self.records.get(&id)
    }

    pub fn mark_owner(&mut self, id: PersonId, obj: ObjectId) {
        let rec = self.records.entry(id).or_default();
        rec.candidate_for.remove(&obj);
        rec.owned.insert(obj);
    }

    pub fn clear_owner(&mut self, id: PersonId, obj: ObjectId) {
        if let Some(rec) = self.records.get_mut(&id) {
            rec.owned.remove(&obj);
        }
    }

    /// Candidate and owner are mutually exclusive per object.
    pub fn mark_candidate(&mut self, id: PersonId, obj: ObjectId) {
        let rec = self.records.entry(id).or_default();
        if !rec.owned.contains(&obj) {
            rec.candidate_for.insert(obj);
        }
    }

    pub fn clear_candidate(&mut self, id: PersonId, obj: ObjectId) {
        if let Some(rec) = self.records.get_mut(&id) {
            rec.candidate_for.remove(&obj);
        }
    }

    pub fn mark_suspect(&mut self, id: PersonId) {
        self.records.entry(id).or_default().suspect = true;
    }

    /// Display label for events: ground-truth entity name when known.
    pub fn label(&self, id: PersonId, tracker: &SortTracker) -> String {
        if let Some(rec) = self.records.get(&id) {
            if let Some(l) = &rec.gt_label {
                return l.clone();
            }
        }
        tracker
            .trace(id)
            .and_then(|t| t.gt_entity())
            .unwrap_or_else(|| id.to_string())
    }

    pub fn label_from_record(&self, id: PersonId) -> Option<String> {
        Some(
            self.records
                .get(&id)
                .and_then(|r| r.gt_label.clone())
                .unwrap_or_else(|| id.to_string()),
        )
    }
}

/// Pick the owner of a freshly registered object: the confirmed person with
/// the smallest mean centroid distance over the trace window leading up to
/// registration. Ties break to the lowest person id. None if nobody has a
/// sample in the window.
pub fn assign_owner(
    obj: &ObjectRecord,
    tracker: &SortTracker,
    now: u64,
    fps: u32,
    cfg: &OwnershipCfg,
) -> Option<PersonId> {
    let window = (cfg.window_s * fps as f64).round() as u64;
    let from = now.saturating_sub(window);
    let mut best: Option<(f64, PersonId)> = None;
    for (id, trace) in tracker.traces() {
        if !trace.confirmed {
            continue;
        }
        let samples = trace.window(from, now);
        if samples.is_empty() {
            continue;
        }
        let mean = samples
            .iter()
            .map(|s| centroid_distance(&obj.bbox, s.point))
            .sum::<f64>()
            / samples.len() as f64;
        let better = match best {
            None => true,
            Some((d, _)) => mean < d,
        };
        if better {
            best = Some((mean, *id));
        }
    }
    best.map(|(_, id)| id)
}

/// Why an object counts as abandoned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbandonReason {
    /// Rule 1: the owner's trace reached the edge band and the track died.
    OwnerExited,
    /// Rule 2: the owner has been gone longer than the timeout.
    OwnerTimeout,
    /// No owner was ever assigned and the object sat for the timeout.
    Ownerless,
}

impl AbandonReason {
    pub fn detail(&self) -> &'static str {
        match self {
            AbandonReason::OwnerExited => "owner left the scene",
            AbandonReason::OwnerTimeout => "owner absent beyond timeout",
            AbandonReason::Ownerless => "unattended object with no owner",
        }
    }
}

/// Evaluate the abandonment rules for one static object. The caller latches
/// the result: once abandoned, always abandoned.
pub fn check_abandonment(
    obj: &ObjectRecord,
    owner_trace: Option<&Trace>,
    now: u64,
    fps: u32,
    frame_w: u32,
    frame_h: u32,
    cfg: &OwnershipCfg,
) -> Option<AbandonReason> {
    if obj.registry != RegistryKind::Static {
        return None;
    }
    let timeout = (cfg.abandon_timeout_s * fps as f64).round() as u64;
    let edge_margin = (cfg.edge_margin_pct * frame_w.min(frame_h) as f64).round() as u32;
    match owner_trace {
        Some(trace) => {
            let last = trace.samples.last()?;
            // Rule 1: trace extended into the edge band and the owner is no
            // longer tracked.
            if !trace.alive && last.bbox.touches_edge_band(edge_margin, frame_w, frame_h) {
                return Some(AbandonReason::OwnerExited);
            }
            // Rule 2: absent for more than the timeout while the object is
            // still there. Absence counts from the last actual sighting.
            if now.saturating_sub(last.frame) > timeout {
                return Some(AbandonReason::OwnerTimeout);
            }
            None
        }
        None => {
            if cfg.alarm_ownerless && now.saturating_sub(obj.first_seen) > timeout {
                Some(AbandonReason::Ownerless)
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TrackerCfg;
    use crate::frame::Frame;
    use crate::geom::BBox;
    use crate::perception::Detection;

    fn person_det(b: BBox, gt: &str) -> Detection {
        Detection {
            category: "person".into(),
            bbox: b,
            score: 1.0,
            gt_entity: Some(gt.into()),
        }
    }

    fn object_at(b: BBox) -> ObjectRecord {
        ObjectRecord {
            id: ObjectId(1),
            category: "bag".into(),
            bbox: b,
            registry: RegistryKind::Static,
            crop: crate::frame::Crop {
                width: 1,
                height: 1,
                frame_index: 0,
                pixels: vec![0, 0, 0],
                gt_entity: None,
            },
            first_seen: 100,
            last_seen: 100,
            owner: None,
            abandoned: false,
        }
    }

    fn frame(i: u64) -> Frame {
        Frame::new_filled(200, 120, i, [0, 0, 0])
    }

    #[test]
    fn closest_person_in_window_becomes_owner() {
        let mut tracker = SortTracker::new(TrackerCfg::default());
        // A stands 10 px away, B 100 px away, for 100 frames.
        for i in 0..100 {
            tracker.step(
                &[
                    person_det(BBox::new(55, 50, 10, 20), "a"),
                    person_det(BBox::new(150, 50, 10, 20), "b"),
                ],
                &frame(i),
            );
        }
        let obj = object_at(BBox::new(45, 55, 8, 8));
        let owner = assign_owner(&obj, &tracker, 99, 25, &OwnershipCfg::default()).unwrap();
        let trace = tracker.trace(owner).unwrap();
        assert_eq!(trace.gt_entity().as_deref(), Some("a"));
    }

    #[test]
    fn single_person_is_owner_and_empty_room_is_none() {
        let mut tracker = SortTracker::new(TrackerCfg::default());
        for i in 0..50 {
            tracker.step(&[person_det(BBox::new(60, 50, 10, 20), "a")], &frame(i));
        }
        let obj = object_at(BBox::new(45, 55, 8, 8));
        assert!(assign_owner(&obj, &tracker, 49, 25, &OwnershipCfg::default()).is_some());
        // Window before anyone appeared: no samples → no owner.
        let empty = SortTracker::new(TrackerCfg::default());
        assert!(assign_owner(&obj, &empty, 49, 25, &OwnershipCfg::default()).is_none());
    }

    #[test]
    fn owner_argmin_is_scale_invariant() {
        // Scaling every coordinate by a positive factor keeps the argmin.
        let cfg = OwnershipCfg::default();
        for s in [1i32, 3] {
            let mut tracker = SortTracker::new(TrackerCfg::default());
            for i in 0..60 {
                tracker.step(
                    &[
                        person_det(BBox::new(20 * s, 20 * s, 8 * s as u32, 16 * s as u32), "a"),
                        person_det(BBox::new(90 * s, 20 * s, 8 * s as u32, 16 * s as u32), "b"),
                    ],
                    &Frame::new_filled(400, 400, i, [0, 0, 0]),
                );
            }
            let obj = object_at(BBox::new(30 * s, 30 * s, 6 * s as u32, 6 * s as u32));
            let owner = assign_owner(&obj, &tracker, 59, 25, &cfg).unwrap();
            assert_eq!(
                tracker.trace(owner).unwrap().gt_entity().as_deref(),
                Some("a"),
                "scale {s}"
            );
        }
    }

    #[test]
    fn rule1_fires_on_edge_exit_with_dead_track() {
        let cfg = OwnershipCfg::default();
        let mut tracker = SortTracker::new(TrackerCfg::default());
        // Walk to the right edge, then vanish.
        for i in 0..40 {
            let x = 150 + i as i32;
            tracker.step(&[person_det(BBox::new(x, 50, 10, 20), "a")], &frame(i));
        }
        let owner = tracker.active_ids()[0];
        let obj = object_at(BBox::new(45, 55, 8, 8));
        // Track still alive: not abandoned even though the box is at the edge.
        assert_eq!(
            check_abandonment(&obj, tracker.trace(owner), 39, 25, 200, 120, &cfg),
            None
        );
        for i in 40..70 {
            tracker.step(&[], &frame(i));
        }
        assert!(!tracker.trace(owner).unwrap().alive);
        assert_eq!(
            check_abandonment(&obj, tracker.trace(owner), 70, 25, 200, 120, &cfg),
            Some(AbandonReason::OwnerExited)
        );
    }

    #[test]
    fn rule2_timeout_has_exact_boundary() {
        let cfg = OwnershipCfg::default();
        let mut tracker = SortTracker::new(TrackerCfg::default());
        // Mid-scene person, last seen at frame 100.
        for i in 0..=100 {
            tracker.step(&[person_det(BBox::new(90, 50, 10, 20), "a")], &frame(i));
        }
        for i in 101..130 {
            tracker.step(&[], &frame(i));
        }
        let owner = *tracker.traces().keys().next().unwrap();
        let obj = object_at(BBox::new(45, 55, 8, 8));
        // 30 s at 25 fps = 750 frames of absence; strict inequality.
        assert_eq!(
            check_abandonment(&obj, tracker.trace(owner), 100 + 749, 25, 200, 120, &cfg),
            None,
            "749 frames of absence must not fire"
        );
        assert_eq!(
            check_abandonment(&obj, tracker.trace(owner), 100 + 751, 25, 200, 120, &cfg),
            Some(AbandonReason::OwnerTimeout),
            "751 frames of absence must fire"
        );
    }

    #[test]
    fn sitting_owner_never_abandons() {
        let cfg = OwnershipCfg::default();
        let mut tracker = SortTracker::new(TrackerCfg::default());
        // Owner sits beside the object for 10 minutes (15000 frames).
        for i in 0..15_000u64 {
            tracker.step(&[person_det(BBox::new(60, 50, 10, 20), "a")], &frame(i));
        }
        let owner = tracker.active_ids()[0];
        let obj = object_at(BBox::new(45, 55, 8, 8));
        assert_eq!(
            check_abandonment(&obj, tracker.trace(owner), 14_999, 25, 200, 120, &cfg),
            None
        );
    }

    #[test]
    fn ownerless_object_abandons_after_timeout() {
        let cfg = OwnershipCfg::default();
        let obj = object_at(BBox::new(45, 55, 8, 8)); // first_seen = 100
        assert_eq!(check_abandonment(&obj, None, 700, 25, 200, 120, &cfg), None);
        assert_eq!(
            check_abandonment(&obj, None, 851, 25, 200, 120, &cfg),
            Some(AbandonReason::Ownerless)
        );
        let off = OwnershipCfg {
            alarm_ownerless: false,
            ..cfg
        };
        assert_eq!(check_abandonment(&obj, None, 851, 25, 200, 120, &off), None);
    }
}
