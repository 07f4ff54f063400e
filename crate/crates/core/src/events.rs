//! Security events, the moved-object watch list, and the state machine that
//! resolves each watch into taken-by-owner, relocated, or stolen.

use crate::config::{EventsCfg, IdentityCfg};
use crate::geom::{centroid_distance, BBox};
use crate::identity::{self, EmbeddingPort, SampleSet};
use crate::mask::Mask;
use crate::ownership::PersonDirectory;
use crate::perception::{Detection, ObjectId, ObjectRecord, ObjectStore, RegistryKind};
use crate::tracker::{PersonId, SortTracker};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    ObjectAbandoned,
    MovedByOwner,
    MovedByNonOwner,
    ObjectRelocated,
    Theft,
    SuspectBackgroundObject,
    Warning,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EventKind::ObjectAbandoned => "ObjectAbandoned",
            EventKind::MovedByOwner => "MovedByOwner",
            EventKind::MovedByNonOwner => "MovedByNonOwner",
            EventKind::ObjectRelocated => "ObjectRelocated",
            EventKind::Theft => "Theft",
            EventKind::SuspectBackgroundObject => "SuspectBackgroundObject",
            EventKind::Warning => "Warning",
        };
        f.write_str(s)
    }
}

/// One emitted security event. `object` and `person` carry ground-truth
/// entity names when the run had them, otherwise internal ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityEvent {
    pub frame: u64,
    pub time_s: f64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub person: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default)]
    pub detail: String,
}

impl SecurityEvent {
    pub fn new(frame: u64, fps: u32, kind: EventKind) -> Self {
        SecurityEvent {
            frame,
            time_s: frame as f64 / fps as f64,
            kind,
            object: None,
            person: None,
            score: None,
            detail: String::new(),
        }
    }
}

/// Serialize events as one JSON record per line, in emission order.
pub fn write_event_log<W: Write>(mut w: W, events: &[SecurityEvent]) -> std::io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_event_log<R: BufRead>(r: R) -> std::io::Result<Vec<SecurityEvent>> {
    let mut events = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: SecurityEvent = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        events.push(e);
    }
    Ok(events)
}

/// True if the short-term foreground covers more than `tau_move` of the box.
pub fn motion_trigger(bbox: &BBox, f_short: &Mask, tau_move: f64) -> bool {
    f_short.coverage(bbox) > tau_move
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveCheck {
    Unchanged,
    Moved,
}

/// Decide whether a triggered object actually moved: it stayed put only if
/// some redetection of the same category still overlaps its old box.
pub fn classify_move(obj: &ObjectRecord, redetect: &[Detection], iou_keep: f64) -> MoveCheck {
    let kept = redetect.iter().any(|d| {
        d.category == obj.category && crate::geom::iou(&d.bbox, &obj.bbox) >= iou_keep
    });
    if kept {
        MoveCheck::Unchanged
    } else {
        MoveCheck::Moved
    }
}

/// An open case: a moved/missed object bound to its candidate person.
#[derive(Debug, Clone)]
pub struct WatchEntry {
    pub object: ObjectId,
    pub candidate: Option<PersonId>,
    pub opened: u64,
    pub resolved: bool,
    /// Candidate trace length at the last verification, for re-verify pacing.
    pub verified_at_len: usize,
    /// The non-owner warning has been emitted (it fires once per watch).
    pub warned: bool,
    /// Frame the candidate's track died, once it has.
    pub candidate_lost_at: Option<u64>,
}

/// The per-frame event reducer. Owns the watch list and the event log.
pub struct EventEngine {
    cfg: EventsCfg,
    id_cfg: IdentityCfg,
    fps: u32,
    watches: Vec<WatchEntry>,
    events: Vec<SecurityEvent>,
    /// Consecutive frames each object's move check came back Moved.
    move_streak: std::collections::BTreeMap<ObjectId, u32>,
}

impl EventEngine {
    pub fn new(cfg: EventsCfg, id_cfg: IdentityCfg, fps: u32) -> Self {
        EventEngine {
            cfg,
            id_cfg,
            fps,
            watches: Vec::new(),
            events: Vec::new(),
            move_streak: std::collections::BTreeMap::new(),
        }
    }

    pub fn events(&self) -> &[SecurityEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<SecurityEvent> {
        self.events
    }

    pub fn open_watches(&self) -> impl Iterator<Item = &WatchEntry> {
        self.watches.iter().filter(|w| !w.resolved)
    }

    fn emit(&mut self, e: SecurityEvent) {
        self.events.push(e);
    }

    fn event_for_object(
        &self,
        frame: u64,
        kind: EventKind,
        obj: &ObjectRecord,
        person: Option<&str>,
    ) -> SecurityEvent {
        let mut e = SecurityEvent::new(frame, self.fps, kind);
        e.object = Some(obj.label());
        e.person = person.map(|s| s.to_string());
        e
    }

    /// Run the move-trigger / move-classify pair for one object and update
    /// its debounce streak. Returns true when a move is confirmed.
    pub fn confirm_move(
        &mut self,
        obj: &ObjectRecord,
        f_short: &Mask,
        redetect: &[Detection],
    ) -> bool {
        if !motion_trigger(&obj.bbox, f_short, self.cfg.tau_move) {
            self.move_streak.remove(&obj.id);
            return false;
        }
        match classify_move(obj, redetect, self.cfg.iou_keep) {
            MoveCheck::Unchanged => {
                self.move_streak.remove(&obj.id);
                false
            }
            MoveCheck::Moved => {
                let streak = self.move_streak.entry(obj.id).or_insert(0);
                *streak += 1;
                *streak >= self.cfg.move_confirm
            }
        }
    }

    /// Open a watch for a confirmed moved object. Marks the record Moved,
    /// picks the candidate person, and routes by registry: background objects
    /// raise a suspect alarm immediately, static objects go to verification.
    #[allow(clippy::too_many_arguments)]
    pub fn open_watch(
        &mut self,
        frame: u64,
        object: ObjectId,
        objects: &mut ObjectStore,
        persons: &mut PersonDirectory,
        tracker: &SortTracker,
        embedder: &dyn EmbeddingPort,
        threads: usize,
    ) {
        self.move_streak.remove(&object);
        let (was_background, obj_snapshot) = {
            let obj = objects.get_mut(object).expect("watched object exists");
            let was_bg = obj.registry == RegistryKind::Background;
            obj.registry = RegistryKind::Moved;
            (was_bg, obj.clone())
        };

        // Candidate: the person now closest to the object's last box.
        let candidate = tracker
            .active_ids()
            .into_iter()
            .filter_map(|id| {
                tracker.trace(id).and_then(|t| t.samples.last()).map(|s| {
                    (
                        id,
                        centroid_distance(&obj_snapshot.bbox, s.point),
                    )
                })
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(id, _)| id);

        if was_background {
            // Background objects belong to the scene: whoever moves one is a
            // suspect, and the case ends there.
            if let Some(cp) = candidate {
                persons.mark_suspect(cp);
            }
            let person_label = candidate.map(|cp| persons.label(cp, tracker));
            let e = self.event_for_object(
                frame,
                EventKind::SuspectBackgroundObject,
                &obj_snapshot,
                person_label.as_deref(),
            );
            self.emit(e);
            self.watches.push(WatchEntry {
                object,
                candidate,
                opened: frame,
                resolved: true,
                verified_at_len: 0,
                warned: false,
                candidate_lost_at: None,
            });
            return;
        }

        let Some(cp) = candidate else {
            // Nobody in frame to pin the move on.
            let mut e = self.event_for_object(frame, EventKind::Warning, &obj_snapshot, None);
            e.detail = "object moved with no person in scene".into();
            self.emit(e);
            self.watches.push(WatchEntry {
                object,
                candidate: None,
                opened: frame,
                resolved: false,
                verified_at_len: 0,
                warned: false,
                candidate_lost_at: None,
            });
            return;
        };

        persons.mark_candidate(cp, object);
        let mut watch = WatchEntry {
            object,
            candidate: Some(cp),
            opened: frame,
            resolved: false,
            verified_at_len: 0,
            warned: false,
            candidate_lost_at: None,
        };
        self.verify_watch(frame, &mut watch, objects, persons, tracker, embedder, threads);
        self.watches.push(watch);
    }

    /// Owner verification for one watch: compare the candidate's samples
    /// against the owner's via the similarity matrix.
    #[allow(clippy::too_many_arguments)]
    fn verify_watch(
        &mut self,
        frame: u64,
        watch: &mut WatchEntry,
        objects: &mut ObjectStore,
        persons: &mut PersonDirectory,
        tracker: &SortTracker,
        embedder: &dyn EmbeddingPort,
        threads: usize,
    ) {
        let Some(cp) = watch.candidate else { return };
        let obj = objects.get(watch.object).expect("watched object exists").clone();
        let cp_trace = tracker.trace(cp).expect("candidate has a trace");
        watch.verified_at_len = cp_trace.samples.len();

        let owner = obj.owner;
        let owner_samples: Option<SampleSet> = owner
            .and_then(|op| tracker.trace(op))
            .filter(|t| !t.samples.is_empty())
            .map(|t| identity::sample_person(t, self.id_cfg.samples));

        let cp_label = persons.label(cp, tracker);
        match owner_samples {
            Some(op_set) if owner != Some(cp) => {
                let cp_set = identity::sample_person(cp_trace, self.id_cfg.samples);
                let m = identity::similarity_matrix(&op_set, &cp_set, embedder, threads);
                let v = identity::verify(&m, self.id_cfg.threshold);
                if v.is_same {
                    self.resolve_moved_by_owner(frame, watch, obj, cp, v.score, objects, persons);
                } else if !watch.warned {
                    watch.warned = true;
                    let mut e = self.event_for_object(
                        frame,
                        EventKind::MovedByNonOwner,
                        &obj,
                        Some(&cp_label),
                    );
                    e.score = Some(v.score);
                    e.detail = format!("warning: candidate {cp} failed owner verification");
                    self.emit(e);
                }
            }
            _ if owner == Some(cp) => {
                // Candidate IS the owner's live track; trivially the same.
                self.resolve_moved_by_owner(frame, watch, obj, cp, 1.0, objects, persons);
            }
            _ => {
                // Ownerless object: treat like a failed verification.
                if !watch.warned {
                    watch.warned = true;
                    let mut e = self.event_for_object(
                        frame,
                        EventKind::MovedByNonOwner,
                        &obj,
                        Some(&cp_label),
                    );
                    e.detail = "object had no owner on record".into();
                    self.emit(e);
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn resolve_moved_by_owner(
        &mut self,
        frame: u64,
        watch: &mut WatchEntry,
        obj: ObjectRecord,
        cp: PersonId,
        score: f64,
        objects: &mut ObjectStore,
        persons: &mut PersonDirectory,
    ) {
        watch.resolved = true;
        let cp_label = persons.label_from_record(cp);
        let mut e = self.event_for_object(frame, EventKind::MovedByOwner, &obj, cp_label.as_deref());
        e.score = Some(score);
        self.emit(e);
        // Cancel CP, SO and MO bookkeeping: the case is closed.
        persons.clear_candidate(cp, obj.id);
        if let Some(op) = obj.owner {
            persons.clear_owner(op, obj.id);
        }
        objects.remove(obj.id);
    }

    /// A newly registered static object is compared with every open moved
    /// object; a match means the candidate relocated it. Returns true if the
    /// new object was consumed by a relocation.
    pub fn match_reappearance(
        &mut self,
        frame: u64,
        new_so: ObjectId,
        objects: &mut ObjectStore,
        persons: &mut PersonDirectory,
        tracker: &SortTracker,
        embedder: &dyn EmbeddingPort,
    ) -> bool {
        let new_crop = match objects.get(new_so) {
            Some(o) => o.crop.clone(),
            None => return false,
        };
        // Highest verification score wins; ties go to the oldest watch.
        let mut best: Option<(usize, f64)> = None;
        for (wi, w) in self.watches.iter().enumerate() {
            if w.resolved || w.candidate.is_none() {
                continue;
            }
            let mo = match objects.get(w.object) {
                Some(o) => o,
                None => continue,
            };
            let v = identity::verify_object(&new_crop, &mo.crop, embedder, self.id_cfg.threshold);
            if v.is_same {
                let better = match best {
                    None => true,
                    Some((_, s)) => v.score > s,
                };
                if better {
                    best = Some((wi, v.score));
                }
            }
        }
        let Some((wi, score)) = best else {
            return false;
        };

        let (mo_id, cp) = {
            let w = &mut self.watches[wi];
            w.resolved = true;
            (w.object, w.candidate.expect("checked above"))
        };
        let cp_label = persons.label(cp, tracker);
        let old = objects.get(mo_id).expect("moved object exists").clone();

        // The candidate becomes the owner of what they deposited.
        if let Some(op) = old.owner {
            persons.clear_owner(op, old.id);
        }
        persons.clear_candidate(cp, mo_id);
        persons.mark_owner(cp, new_so);
        {
            let rec = objects.get_mut(new_so).expect("new object exists");
            rec.owner = Some(cp);
        }

        let mut e = SecurityEvent::new(frame, self.fps, EventKind::ObjectRelocated);
        e.object = Some(old.label());
        e.person = Some(cp_label);
        e.score = Some(score);
        e.detail = format!("reappeared as {}", objects.get(new_so).unwrap().label());
        self.emit(e);
        objects.remove(mo_id);
        true
    }

    /// Re-verify open watches whose candidate kept accruing trace samples,
    /// and run the theft rules.
    #[allow(clippy::too_many_arguments)]
    pub fn tick_watches(
        &mut self,
        frame: u64,
        objects: &mut ObjectStore,
        persons: &mut PersonDirectory,
        tracker: &SortTracker,
        embedder: &dyn EmbeddingPort,
        threads: usize,
        edge_margin: u32,
        frame_w: u32,
        frame_h: u32,
        timeout_frames: u64,
    ) {
        let mut watches = std::mem::take(&mut self.watches);
        for w in watches.iter_mut() {
            if w.resolved {
                continue;
            }
            if objects.get(w.object).is_none() {
                w.resolved = true;
                continue;
            }

            let Some(cp) = w.candidate else {
                // No candidate was ever found; after the abandonment timeout
                // the object is simply gone: report it stolen by person
                // unknown.
                if frame - w.opened > timeout_frames {
                    w.resolved = true;
                    let obj = objects.get(w.object).unwrap().clone();
                    let mut e =
                        self.event_for_object(frame, EventKind::Theft, &obj, None);
                    e.detail = "track lost".into();
                    self.emit(e);
                    objects.remove(w.object);
                }
                continue;
            };

            let trace = tracker.trace(cp).expect("candidate has a trace");

            // Re-verification once the candidate's appearance record grew.
            if trace.alive
                && trace.samples.len() >= w.verified_at_len + self.cfg.reverify_growth
            {
                self.verify_watch(frame, w, objects, persons, tracker, embedder, threads);
                if w.resolved {
                    continue;
                }
            }

            // Theft checks.
            let last = trace.samples.last().expect("trace is non-empty");
            let in_exit_region = self.cfg.exit_regions.iter().any(|r| {
                let rect = BBox::new(r[0], r[1], r[2].max(1) as u32, r[3].max(1) as u32);
                rect.intersects(&last.bbox)
            });
            let died_at_edge = !trace.alive
                && last.bbox.touches_edge_band(edge_margin, frame_w, frame_h);
            let lost_timeout = !trace.alive && {
                if w.candidate_lost_at.is_none() {
                    w.candidate_lost_at = Some(frame);
                }
                frame - w.candidate_lost_at.unwrap() > timeout_frames
            };

            if died_at_edge || in_exit_region || lost_timeout {
                w.resolved = true;
                let obj = objects.get(w.object).unwrap().clone();
                let cp_label = persons.label(cp, tracker);
                let mut e =
                    self.event_for_object(frame, EventKind::Theft, &obj, Some(&cp_label));
                if lost_timeout && !died_at_edge && !in_exit_region {
                    e.detail = "track lost".into();
                } else if in_exit_region {
                    e.detail = "candidate reached exit region".into();
                } else {
                    e.detail = "candidate left the scene".into();
                }
                self.emit(e);
                persons.clear_candidate(cp, obj.id);
                objects.remove(obj.id);
            }
        }
        self.watches = watches;
    }

    /// Latch and emit an abandonment for an object (called by the pipeline
    /// when the ownership rules fire).
    pub fn emit_abandonment(
        &mut self,
        frame: u64,
        obj: &ObjectRecord,
        owner_label: Option<String>,
        detail: &str,
    ) {
        let mut e =
            self.event_for_object(frame, EventKind::ObjectAbandoned, obj, owner_label.as_deref());
        e.detail = detail.into();
        self.emit(e);
    }
}
