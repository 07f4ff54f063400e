//! Scripted synthetic scenarios: entity definitions, deterministic rendering,
//! and analytic ground-truth event derivation. Scenarios stand in for real
//! surveillance footage and act as the oracle for end-to-end verification.

mod generate;
pub mod suite;

pub use generate::{generate_random, GenParams};

use crate::events::{EventKind, SecurityEvent};
use crate::frame::Frame;
use crate::geom::BBox;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// How close (pixels) a person must be to an object to pick it up or set it
/// down.
pub const REACH_PX: f64 = 30.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundSpec {
    pub color: [u8; 3],
    /// Static per-pixel noise amplitude (a fixed texture, not flicker).
    pub noise_amp: u8,
    pub noise_seed: u64,
}

impl Default for BackgroundSpec {
    fn default() -> Self {
        BackgroundSpec {
            color: [96, 96, 96],
            noise_amp: 0,
            noise_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Pick,
    Drop,
}

/// A scripted interaction of a person with an object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub t: f64,
    pub kind: ActionKind,
    pub object: String,
    /// Drop position; defaults to the carrier's position at `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<[f64; 2]>,
}

/// A scripted entity: a person or an object, drawn as a filled rectangle.
///
/// `segments` are runs of `[t, x, y]` waypoints (the entity center) with
/// linear interpolation; the entity is absent between segments. A
/// single-waypoint segment pins the entity there until the scenario ends.
/// Objects without segments enter the scene carried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entity {
    pub id: String,
    /// "person" or "object".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub color: [u8; 3],
    pub size: [u32; 2],
    #[serde(default)]
    pub segments: Vec<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<Action>,
}

impl Entity {
    pub fn is_person(&self) -> bool {
        self.kind == "person"
    }

    pub fn category(&self) -> &str {
        if self.is_person() {
            "person"
        } else {
            self.category.as_deref().unwrap_or("box")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub fps: u32,
    pub duration_s: f64,
    #[serde(default)]
    pub background: BackgroundSpec,
    #[serde(default)]
    pub entities: Vec<Entity>,
}

/// A ground-truth entity box on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityBox {
    pub entity: String,
    pub category: String,
    pub bbox: BBox,
}

/// Object possession over a span of frames.
#[derive(Debug, Clone, PartialEq)]
enum ObjState {
    Absent,
    Placed {
        x: f64,
        y: f64,
        /// Who set it down; None for objects present from the start.
        owner: Option<String>,
        background: bool,
    },
    Held {
        person: String,
        background_origin: bool,
    },
}

#[derive(Debug, Clone)]
struct Phase {
    from: u64,
    state: ObjState,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl Scenario {
    pub fn from_toml_str(s: &str) -> Result<Scenario, ScenarioError> {
        let sc: Scenario = toml::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_file(path: &Path) -> Result<Scenario, ScenarioError> {
        Scenario::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn n_frames(&self) -> u64 {
        (self.duration_s * self.fps as f64).round() as u64
    }

    fn frame_time(&self, frame: u64) -> f64 {
        frame as f64 / self.fps as f64
    }

    fn action_frame(&self, t: f64) -> u64 {
        (t * self.fps as f64).round() as u64
    }

    fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// Center position of a person at time `t`, if present.
    fn person_position(&self, ent: &Entity, t: f64) -> Option<(f64, f64)> {
        for seg in &ent.segments {
            let first = seg.first()?;
            let last = seg.last()?;
            let end = if seg.len() == 1 {
                self.duration_s
            } else {
                last[0]
            };
            if t < first[0] - 1e-9 || t > end + 1e-9 {
                continue;
            }
            if seg.len() == 1 || t >= last[0] {
                return Some((last[1], last[2]));
            }
            // Find the bracketing pair.
            for w in seg.windows(2) {
                let (a, b) = (w[0], w[1]);
                if t >= a[0] - 1e-9 && t <= b[0] + 1e-9 {
                    let span = b[0] - a[0];
                    let u = if span <= 1e-9 { 1.0 } else { (t - a[0]) / span };
                    return Some((a[1] + u * (b[1] - a[1]), a[2] + u * (b[2] - a[2])));
                }
            }
            return Some((first[1], first[2]));
        }
        None
    }

    /// All actions touching the given object, ordered by frame.
    fn object_actions(&self, object: &str) -> Vec<(u64, String, ActionKind, Option<[f64; 2]>)> {
        let mut acts: Vec<_> = self
            .entities
            .iter()
            .filter(|e| e.is_person())
            .flat_map(|p| {
                p.actions
                    .iter()
                    .filter(|a| a.object == object)
                    .map(|a| (self.action_frame(a.t), p.id.clone(), a.kind, a.at))
            })
            .collect();
        acts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        acts
    }

    /// Possession phases of an object over the whole scenario.
    ///
    /// Objects without scripted placement are carried in: they start in the
    /// hands of whoever performs their first drop.
    fn object_phases(&self, ent: &Entity) -> Vec<Phase> {
        let actions = self.object_actions(&ent.id);
        let initial = if let Some(seg) = ent.segments.first() {
            let w = seg[0];
            ObjState::Placed {
                x: w[1],
                y: w[2],
                owner: None,
                background: true,
            }
        } else {
            match actions.first() {
                Some((_, actor, ActionKind::Drop, _)) => ObjState::Held {
                    person: actor.clone(),
                    background_origin: false,
                },
                _ => ObjState::Absent,
            }
        };
        let mut phases = vec![Phase {
            from: 0,
            state: initial,
        }];
        for (frame, actor, kind, at) in actions {
            let prev = &phases.last().unwrap().state;
            let next = match (prev, kind) {
                (ObjState::Placed { background, .. }, ActionKind::Pick) => ObjState::Held {
                    person: actor,
                    background_origin: *background,
                },
                (ObjState::Held { .. }, ActionKind::Drop) => {
                    let pos = at
                        .map(|p| (p[0], p[1]))
                        .or_else(|| {
                            self.entity(&actor)
                                .and_then(|p| self.person_position(p, self.frame_time(frame)))
                        })
                        .unwrap_or((0.0, 0.0));
                    ObjState::Placed {
                        x: pos.0,
                        y: pos.1,
                        owner: Some(actor),
                        background: false,
                    }
                }
                // Validation rejects these; keep the state unchanged if a
                // stale scenario sneaks through.
                (s, _) => s.clone(),
            };
            phases.push(Phase { from: frame, state: next });
        }
        phases
    }

    fn object_state_at(&self, phases: &[Phase], frame: u64) -> ObjState {
        let mut cur = &phases[0].state;
        for p in phases {
            if p.from <= frame {
                cur = &p.state;
            } else {
                break;
            }
        }
        cur.clone()
    }

    /// Center position of any entity at a frame.
    fn entity_position(&self, ent: &Entity, frame: u64) -> Option<(f64, f64)> {
        let t = self.frame_time(frame);
        if ent.is_person() {
            return self.person_position(ent, t);
        }
        let phases = self.object_phases(ent);
        match self.object_state_at(&phases, frame) {
            ObjState::Absent => None,
            ObjState::Placed { x, y, .. } => Some((x, y)),
            ObjState::Held { person, .. } => {
                let p = self.entity(&person)?;
                self.person_position(p, t)
            }
        }
    }

    /// Ground-truth boxes of every visible entity on a frame (clamped to the
    /// frame; entities fully outside are absent). The renderer draws exactly
    /// these rectangles.
    pub fn entity_boxes(&self, frame: u64) -> Vec<EntityBox> {
        let mut out = Vec::new();
        for ent in &self.entities {
            let Some((cx, cy)) = self.entity_position(ent, frame) else {
                continue;
            };
            let raw = BBox::from_center(cx, cy, ent.size[0], ent.size[1]);
            let Some(bbox) = raw.clamp_to(self.width, self.height) else {
                continue;
            };
            out.push(EntityBox {
                entity: ent.id.clone(),
                category: ent.category().to_string(),
                bbox,
            });
        }
        out
    }

    /// Render one frame: background texture, then placed objects, persons,
    /// and carried objects on top.
    pub fn render(&self, frame: u64) -> Result<Frame, ScenarioError> {
        if frame >= self.n_frames() {
            return Err(invalid(format!(
                "frame {frame} out of range (scenario has {} frames)",
                self.n_frames()
            )));
        }
        let mut f = Frame::new_filled(self.width, self.height, frame, self.background.color);
        if self.background.noise_amp > 0 {
            let amp = self.background.noise_amp as i32;
            for y in 0..self.height {
                for x in 0..self.width {
                    let h = splitmix64(
                        self.background
                            .noise_seed
                            .wrapping_add((y as u64) << 32 | x as u64),
                    );
                    let mut rgb = self.background.color;
                    for (c, v) in rgb.iter_mut().enumerate() {
                        let off = ((h >> (c * 8)) & 0xff) as i32 % (2 * amp + 1) - amp;
                        *v = (*v as i32 + off).clamp(0, 255) as u8;
                    }
                    f.set_pixel(x, y, rgb);
                }
            }
        }

        let boxes = self.entity_boxes(frame);
        let layer = |f: &mut Frame, want_person: bool, held: bool| {
            for eb in &boxes {
                let ent = self.entity(&eb.entity).expect("box entity exists");
                if ent.is_person() != want_person {
                    continue;
                }
                if !want_person {
                    let phases = self.object_phases(ent);
                    let is_held =
                        matches!(self.object_state_at(&phases, frame), ObjState::Held { .. });
                    if is_held != held {
                        continue;
                    }
                }
                f.fill_rect(&eb.bbox, ent.color);
            }
        };
        layer(&mut f, false, false); // placed objects
        layer(&mut f, true, false); // persons
        layer(&mut f, false, true); // carried objects
        Ok(f)
    }

    /// Frames [start, end] (inclusive) on which a person is visible.
    fn visibility_intervals(&self, ent: &Entity) -> Vec<(u64, u64)> {
        let n = self.n_frames();
        let mut intervals = Vec::new();
        let mut run: Option<(u64, u64)> = None;
        for f in 0..n {
            let visible = self
                .entity_position(ent, f)
                .map(|(cx, cy)| {
                    BBox::from_center(cx, cy, ent.size[0], ent.size[1])
                        .clamp_to(self.width, self.height)
                        .is_some()
                })
                .unwrap_or(false);
            match (visible, run) {
                (true, None) => run = Some((f, f)),
                (true, Some((s, _))) => run = Some((s, f)),
                (false, Some(r)) => {
                    intervals.push(r);
                    run = None;
                }
                (false, None) => {}
            }
        }
        if let Some(r) = run {
            intervals.push(r);
        }
        intervals
    }

    /// Derive the ground-truth security events by replaying the abandonment,
    /// verification, and theft rules analytically against the script.
    pub fn ground_truth_events(&self, p: &GtParams) -> Vec<SecurityEvent> {
        let n = self.n_frames();
        let mut events: Vec<SecurityEvent> = Vec::new();

        // Absence intervals per person: [start, end] inclusive, plus whether
        // the last visible box before the absence touched the edge band.
        struct Absence {
            start: u64,
            end: u64,
            at_edge: bool,
        }
        let mut absences: std::collections::BTreeMap<&str, Vec<Absence>> =
            std::collections::BTreeMap::new();
        for ent in self.entities.iter().filter(|e| e.is_person()) {
            let iv = self.visibility_intervals(ent);
            let mut list = Vec::new();
            for (i, &(_, e)) in iv.iter().enumerate() {
                let next_start = iv.get(i + 1).map(|&(s, _)| s);
                let end = next_start.map(|s| s - 1).unwrap_or(n.saturating_sub(1));
                if e + 1 > end || e + 1 >= n {
                    continue;
                }
                list.push(Absence {
                    start: e + 1,
                    end,
                    at_edge: self.box_at_edge(&ent.id, e, p.edge_margin_px),
                });
            }
            absences.insert(&ent.id, list);
        }
        // First absence beginning strictly after `probe` (the person is
        // visible at `probe` in every caller).
        let next_absence = |person: &str, probe: u64| -> Option<&Absence> {
            absences
                .get(person)?
                .iter()
                .find(|a| a.start > probe)
        };

        for ent in self.entities.iter().filter(|e| !e.is_person()) {
            let phases = self.object_phases(ent);
            for (i, ph) in phases.iter().enumerate() {
                let end = phases.get(i + 1).map(|n| n.from).unwrap_or(n);
                match &ph.state {
                    ObjState::Placed {
                        owner, background, ..
                    } => {
                        let picked = phases.get(i + 1).map(|next| {
                            let picker = match &next.state {
                                ObjState::Held { person, .. } => person.clone(),
                                _ => String::new(),
                            };
                            (next.from, picker)
                        });
                        if *background {
                            if let Some((f, picker)) = &picked {
                                events.push(gt_event(
                                    *f,
                                    self.fps,
                                    EventKind::SuspectBackgroundObject,
                                    &ent.id,
                                    Some(picker),
                                ));
                            }
                            continue;
                        }
                        let owner = owner.clone().expect("deposited objects have a dropper");

                        // Pick events.
                        if let Some((f, picker)) = &picked {
                            if *picker == owner {
                                events.push(gt_event(
                                    *f,
                                    self.fps,
                                    EventKind::MovedByOwner,
                                    &ent.id,
                                    Some(picker),
                                ));
                            } else {
                                events.push(gt_event(
                                    *f,
                                    self.fps,
                                    EventKind::MovedByNonOwner,
                                    &ent.id,
                                    Some(picker),
                                ));
                            }
                        }

                        // Abandonment (latched: first qualifying rule only).
                        let mut probe = ph.from;
                        while let Some(a) = next_absence(&owner, probe) {
                            if a.start >= end {
                                break;
                            }
                            let a_len = a.end + 1 - a.start;
                            if a.at_edge && a_len >= p.min_exit_frames {
                                events.push(gt_event(
                                    a.start,
                                    self.fps,
                                    EventKind::ObjectAbandoned,
                                    &ent.id,
                                    Some(&owner),
                                ));
                                break;
                            }
                            let rule2_at = a.start + p.timeout_frames;
                            if a_len > p.timeout_frames && rule2_at < end && rule2_at < n {
                                events.push(gt_event(
                                    rule2_at,
                                    self.fps,
                                    EventKind::ObjectAbandoned,
                                    &ent.id,
                                    Some(&owner),
                                ));
                                break;
                            }
                            probe = a.end + 1;
                            if probe >= end || probe >= n {
                                break;
                            }
                        }
                    }
                    ObjState::Held {
                        person,
                        background_origin,
                    } => {
                        if i == 0 || *background_origin {
                            continue; // carry-in, or a moved scene fixture
                        }
                        // Was this pick a non-owner move?
                        let was_theft_candidate = match &phases[i - 1].state {
                            ObjState::Placed { owner: Some(o), .. } => o != person,
                            _ => false,
                        };
                        if !was_theft_candidate {
                            continue;
                        }
                        // Dropped later → relocation (emitted by the next
                        // Placed episode's creation below).
                        let dropped = phases.get(i + 1).is_some();
                        if dropped {
                            events.push(gt_event(
                                phases[i + 1].from,
                                self.fps,
                                EventKind::ObjectRelocated,
                                &ent.id,
                                Some(person),
                            ));
                            continue;
                        }
                        // Still holding: theft when the holder leaves.
                        let exit_hit = (ph.from..end.min(n)).find(|&f| {
                            p.exit_regions.iter().any(|r| {
                                self.entity(person)
                                    .and_then(|pe| self.entity_position(pe, f))
                                    .map(|(cx, cy)| {
                                        r.intersects(&BBox::from_center(
                                            cx,
                                            cy,
                                            self.entity(person).unwrap().size[0],
                                            self.entity(person).unwrap().size[1],
                                        ))
                                    })
                                    .unwrap_or(false)
                            })
                        });
                        if let Some(f) = exit_hit {
                            events.push(gt_event(
                                f,
                                self.fps,
                                EventKind::Theft,
                                &ent.id,
                                Some(person),
                            ));
                            continue;
                        }
                        if let Some(a) = next_absence(person, ph.from) {
                            let f = if a.at_edge {
                                a.start
                            } else {
                                a.start + p.timeout_frames
                            };
                            if f < n {
                                events.push(gt_event(
                                    f,
                                    self.fps,
                                    EventKind::Theft,
                                    &ent.id,
                                    Some(person),
                                ));
                            }
                        }
                    }
                    ObjState::Absent => {}
                }
            }
        }

        events.sort_by(|a, b| {
            a.frame
                .cmp(&b.frame)
                .then_with(|| a.object.cmp(&b.object))
                .then_with(|| a.kind.cmp(&b.kind))
        });
        events
    }

    fn box_at_edge(&self, person: &str, frame: u64, margin: u32) -> bool {
        let Some(ent) = self.entity(person) else {
            return false;
        };
        let Some((cx, cy)) = self.entity_position(ent, frame) else {
            return true; // already gone
        };
        match BBox::from_center(cx, cy, ent.size[0], ent.size[1])
            .clamp_to(self.width, self.height)
        {
            Some(b) => b.touches_edge_band(margin, self.width, self.height),
            None => true,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.width < 32 || self.height < 32 {
            return Err(invalid("frame must be at least 32x32"));
        }
        if self.fps == 0 {
            return Err(invalid("fps must be positive"));
        }
        if self.duration_s <= 0.0 {
            return Err(invalid("duration must be positive"));
        }
        let mut ids = std::collections::BTreeSet::new();
        for ent in &self.entities {
            if ent.id.is_empty() {
                return Err(invalid("entity id must be non-empty"));
            }
            if !ids.insert(&ent.id) {
                return Err(invalid(format!("duplicate entity id {:?}", ent.id)));
            }
            match ent.kind.as_str() {
                "person" => {
                    if ent.category.is_some() {
                        return Err(invalid(format!(
                            "person {:?} must not declare a category",
                            ent.id
                        )));
                    }
                    if ent.segments.is_empty() {
                        return Err(invalid(format!("person {:?} has no waypoints", ent.id)));
                    }
                }
                "object" => {
                    if ent.category.as_deref().is_none_or(|c| c == "person") {
                        return Err(invalid(format!(
                            "object {:?} needs a non-person category",
                            ent.id
                        )));
                    }
                }
                k => return Err(invalid(format!("unknown entity kind {k:?}"))),
            }
            if ent.size[0] == 0 || ent.size[1] == 0 {
                return Err(invalid(format!("entity {:?} has zero size", ent.id)));
            }
            let mut prev_end = -1.0f64;
            for seg in &ent.segments {
                if seg.is_empty() {
                    return Err(invalid(format!("entity {:?} has an empty segment", ent.id)));
                }
                let mut prev_t = f64::NEG_INFINITY;
                for w in seg {
                    if w[0] < prev_t {
                        return Err(invalid(format!(
                            "entity {:?} waypoint times must be non-decreasing",
                            ent.id
                        )));
                    }
                    if w[0] < 0.0 || w[0] > self.duration_s + 1e-9 {
                        return Err(invalid(format!(
                            "entity {:?} waypoint at t={} outside scenario duration",
                            ent.id, w[0]
                        )));
                    }
                    prev_t = w[0];
                }
                if seg[0][0] <= prev_end {
                    return Err(invalid(format!(
                        "entity {:?} segments overlap or are out of order",
                        ent.id
                    )));
                }
                prev_end = seg.last().unwrap()[0];
            }
            if !ent.is_person() && !ent.segments.is_empty() {
                let seg = &ent.segments[0];
                if ent.segments.len() > 1 || seg[0][0] != 0.0 {
                    return Err(invalid(format!(
                        "object {:?}: scripted placement must be a single segment starting at t=0",
                        ent.id
                    )));
                }
                if seg.iter().any(|w| w[1] != seg[0][1] || w[2] != seg[0][2]) {
                    return Err(invalid(format!(
                        "object {:?}: objects move only when carried",
                        ent.id
                    )));
                }
            }
            if !ent.is_person() && !ent.actions.is_empty() {
                return Err(invalid(format!(
                    "object {:?} cannot perform actions",
                    ent.id
                )));
            }
        }

        // Action causality per object.
        for ent in self.entities.iter().filter(|e| !e.is_person()) {
            let acts = self.object_actions(&ent.id);
            for w in acts.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(invalid(format!(
                        "object {:?}: two actions on the same frame",
                        ent.id
                    )));
                }
            }
            let mut state = if ent.segments.is_empty() {
                match acts.first() {
                    Some((_, actor, ActionKind::Drop, _)) => ObjState::Held {
                        person: actor.clone(),
                        background_origin: false,
                    },
                    _ => ObjState::Absent,
                }
            } else {
                ObjState::Placed {
                    x: ent.segments[0][0][1],
                    y: ent.segments[0][0][2],
                    owner: None,
                    background: true,
                }
            };
            for (frame, actor, kind, at) in acts {
                let t = self.frame_time(frame);
                let actor_ent = self
                    .entity(&actor)
                    .ok_or_else(|| invalid(format!("unknown action actor {actor:?}")))?;
                if t > self.duration_s + 1e-9 {
                    return Err(invalid(format!(
                        "action on {:?} at t={t} is outside the scenario",
                        ent.id
                    )));
                }
                let actor_pos = self.person_position(actor_ent, t);
                state = match (&state, kind) {
                    (ObjState::Placed { x, y, background, .. }, ActionKind::Pick) => {
                        let Some(pos) = actor_pos else {
                            return Err(invalid(format!(
                                "{actor:?} picks {:?} while out of scene",
                                ent.id
                            )));
                        };
                        let d = ((pos.0 - x).powi(2) + (pos.1 - y).powi(2)).sqrt();
                        if d > REACH_PX {
                            return Err(invalid(format!(
                                "{actor:?} picks {:?} from {d:.0}px away (reach is {REACH_PX}px)",
                                ent.id
                            )));
                        }
                        ObjState::Held {
                            person: actor,
                            background_origin: *background,
                        }
                    }
                    (ObjState::Absent, ActionKind::Pick) => {
                        return Err(invalid(format!(
                            "{actor:?} picks {:?} which was never in the scene",
                            ent.id
                        )));
                    }
                    (ObjState::Held { person, .. }, ActionKind::Drop) => {
                        if *person != actor {
                            return Err(invalid(format!(
                                "{actor:?} drops {:?} but {person:?} holds it",
                                ent.id
                            )));
                        }
                        let Some(pos) = actor_pos else {
                            return Err(invalid(format!(
                                "{actor:?} drops {:?} while out of scene",
                                ent.id
                            )));
                        };
                        let target = at.map(|p| (p[0], p[1])).unwrap_or(pos);
                        let d = ((pos.0 - target.0).powi(2) + (pos.1 - target.1).powi(2)).sqrt();
                        if d > REACH_PX {
                            return Err(invalid(format!(
                                "{actor:?} drops {:?} {d:.0}px away (reach is {REACH_PX}px)",
                                ent.id
                            )));
                        }
                        ObjState::Placed {
                            x: target.0,
                            y: target.1,
                            owner: Some(actor),
                            background: false,
                        }
                    }
                    (ObjState::Held { .. }, ActionKind::Pick) => {
                        return Err(invalid(format!(
                            "{actor:?} picks {:?} while it is already held",
                            ent.id
                        )));
                    }
                    (_, ActionKind::Drop) => {
                        return Err(invalid(format!(
                            "{actor:?} drops {:?} which is not held",
                            ent.id
                        )));
                    }
                };
            }
        }
        Ok(())
    }
}

fn gt_event(
    frame: u64,
    fps: u32,
    kind: EventKind,
    object: &str,
    person: Option<&String>,
) -> SecurityEvent {
    let mut e = SecurityEvent::new(frame, fps, kind);
    e.object = Some(object.to_string());
    e.person = person.map(|s| s.to_string());
    e
}

/// Parameters for analytic ground-truth derivation, mirroring the pipeline's
/// abandonment and theft configuration.
#[derive(Debug, Clone)]
pub struct GtParams {
    pub edge_margin_px: u32,
    pub timeout_frames: u64,
    /// Minimum absence length for an edge exit to count as leaving the scene.
    pub min_exit_frames: u64,
    pub exit_regions: Vec<BBox>,
}

impl GtParams {
    pub fn from_config(cfg: &crate::config::Config, width: u32, height: u32, fps: u32) -> Self {
        GtParams {
            edge_margin_px: (cfg.own.edge_margin_pct * width.min(height) as f64).round() as u32,
            timeout_frames: (cfg.own.abandon_timeout_s * fps as f64).round() as u64,
            min_exit_frames: 2 * fps as u64,
            exit_regions: cfg
                .ev
                .exit_regions
                .iter()
                .map(|r| BBox::new(r[0], r[1], r[2].max(1) as u32, r[3].max(1) as u32))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_scenario() -> Scenario {
        Scenario {
            name: "test".into(),
            width: 160,
            height: 120,
            fps: 25,
            duration_s: 40.0,
            background: BackgroundSpec::default(),
            entities: vec![
                Entity {
                    id: "p1".into(),
                    kind: "person".into(),
                    category: None,
                    color: [200, 40, 40],
                    size: [12, 28],
                    segments: vec![vec![
                        [1.0, -10.0, 60.0],
                        [5.0, 60.0, 60.0],
                        [11.0, 60.0, 60.0],
                        [15.0, 170.0, 60.0],
                    ]],
                    actions: vec![Action {
                        t: 6.0,
                        kind: ActionKind::Drop,
                        object: "bag1".into(),
                        at: Some([75.0, 70.0]),
                    }],
                },
                Entity {
                    id: "bag1".into(),
                    kind: "object".into(),
                    category: Some("bag".into()),
                    color: [40, 40, 220],
                    size: [10, 8],
                    segments: vec![],
                    actions: vec![],
                },
            ],
        }
    }

    #[test]
    fn interpolation_is_linear() {
        let mut sc = simple_scenario();
        sc.entities[0].segments = vec![vec![[0.0, 0.0, 0.0], [10.0, 100.0, 0.0]]];
        let ent = sc.entities[0].clone();
        let (x, _) = sc.person_position(&ent, 5.0).unwrap();
        assert_eq!(x, 50.0);
    }

    #[test]
    fn empty_scenario_renders_pure_background() {
        let mut sc = simple_scenario();
        sc.entities.clear();
        let f = sc.render(0).unwrap();
        assert!(f
            .pixels()
            .chunks(3)
            .all(|p| p == sc.background.color));
    }

    #[test]
    fn rendering_is_deterministic() {
        let mut sc = simple_scenario();
        sc.background.noise_amp = 6;
        sc.background.noise_seed = 99;
        let a = sc.render(100).unwrap();
        let b = sc.render(100).unwrap();
        assert_eq!(a.pixels(), b.pixels());
    }

    #[test]
    fn rendered_rectangles_match_ground_truth_boxes() {
        let sc = simple_scenario();
        for frame in [50u64, 130, 160, 200] {
            let f = sc.render(frame).unwrap();
            for eb in sc.entity_boxes(frame) {
                let ent = sc.entity(&eb.entity).unwrap();
                // Probe the box center pixel; carried objects are drawn last.
                let c = eb.bbox.center();
                let px = f.pixel(c.x as u32, c.y as u32);
                if eb.entity == "bag1" {
                    assert_eq!(px, ent.color, "frame {frame}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_frame_is_an_error() {
        let sc = simple_scenario();
        assert!(sc.render(sc.n_frames()).is_err());
    }

    #[test]
    fn carried_object_tracks_its_carrier() {
        // Before its drop at t=6, the bag rides with p1 (implicit carry-in).
        let sc = simple_scenario();
        let f = 25 * 4; // t = 4 s
        let boxes = sc.entity_boxes(f);
        let p = boxes.iter().find(|b| b.entity == "p1").unwrap();
        let b = boxes.iter().find(|b| b.entity == "bag1").unwrap();
        assert_eq!(p.bbox.center().x, b.bbox.center().x);
        assert_eq!(p.bbox.center().y, b.bbox.center().y);
        // After the drop it stays at the drop spot.
        let boxes = sc.entity_boxes(25 * 9);
        let b = boxes.iter().find(|b| b.entity == "bag1").unwrap();
        assert_eq!(b.bbox.center(), crate::geom::Point::new(75.0, 70.0));
    }

    #[test]
    fn drop_then_exit_gives_abandonment_ground_truth() {
        let sc = simple_scenario();
        let p = GtParams {
            edge_margin_px: 6,
            timeout_frames: 750,
            min_exit_frames: 50,
            exit_regions: vec![],
        };
        let events = sc.ground_truth_events(&p);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, EventKind::ObjectAbandoned);
        assert_eq!(events[0].object.as_deref(), Some("bag1"));
        assert_eq!(events[0].person.as_deref(), Some("p1"));
        // p1's box leaves the frame shortly after t=15 s (x=170 at 15 s).
        let f = events[0].frame;
        assert!((360..=400).contains(&f), "abandonment at frame {f}");
    }

    #[test]
    fn owner_pick_is_moved_by_owner() {
        let mut sc = simple_scenario();
        // Stay in scene, pick the bag back up at t=12, then leave with it.
        sc.entities[0].segments = vec![vec![
            [1.0, -10.0, 60.0],
            [5.0, 60.0, 60.0],
            [11.0, 70.0, 68.0],
            [13.0, 70.0, 68.0],
            [18.0, 170.0, 60.0],
        ]];
        sc.entities[0].actions.push(Action {
            t: 12.0,
            kind: ActionKind::Pick,
            object: "bag1".into(),
            at: None,
        });
        let p = GtParams {
            edge_margin_px: 6,
            timeout_frames: 750,
            min_exit_frames: 50,
            exit_regions: vec![],
        };
        let events = sc.ground_truth_events(&p);
        assert_eq!(events.len(), 1, "{events:?}");
        assert_eq!(events[0].kind, EventKind::MovedByOwner);
        assert_eq!(events[0].frame, 300);
    }

    #[test]
    fn stranger_pick_and_exit_is_theft() {
        let mut sc = simple_scenario();
        sc.duration_s = 50.0;
        sc.entities.push(Entity {
            id: "p2".into(),
            kind: "person".into(),
            category: None,
            color: [40, 200, 40],
            size: [12, 28],
            segments: vec![vec![
                [20.0, 170.0, 70.0],
                [24.0, 75.0, 72.0],
                [26.0, 75.0, 72.0],
                [31.0, -15.0, 70.0],
            ]],
            actions: vec![Action {
                t: 25.0,
                kind: ActionKind::Pick,
                object: "bag1".into(),
                at: None,
            }],
        });
        let p = GtParams {
            edge_margin_px: 6,
            timeout_frames: 750,
            min_exit_frames: 50,
            exit_regions: vec![],
        };
        let events = sc.ground_truth_events(&p);
        let kinds: Vec<EventKind> = events.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EventKind::ObjectAbandoned,
                EventKind::MovedByNonOwner,
                EventKind::Theft
            ],
            "{events:?}"
        );
        assert_eq!(events[1].frame, 625);
        assert_eq!(events[2].person.as_deref(), Some("p2"));
    }

    #[test]
    fn vanishing_owner_triggers_timeout_abandonment() {
        let mut sc = simple_scenario();
        sc.duration_s = 50.0;
        // Walk to mid-scene and vanish there at t=12 (occlusion), never back.
        sc.entities[0].segments = vec![vec![
            [1.0, -10.0, 60.0],
            [5.0, 60.0, 60.0],
            [12.0, 80.0, 50.0],
        ]];
        let p = GtParams {
            edge_margin_px: 6,
            timeout_frames: 750,
            min_exit_frames: 50,
            exit_regions: vec![],
        };
        let events = sc.ground_truth_events(&p);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, EventKind::ObjectAbandoned);
        // Absence starts at frame 301; rule 2 fires 750 frames later.
        assert_eq!(events[0].frame, 301 + 750);
    }

    #[test]
    fn toml_roundtrip_preserves_scenario() {
        let sc = simple_scenario();
        let s = sc.to_toml_string();
        let back = Scenario::from_toml_str(&s).unwrap();
        assert_eq!(sc, back);
    }

    #[test]
    fn validation_rejects_broken_scripts() {
        let mut sc = simple_scenario();
        sc.entities[0].actions[0].at = Some([200.0, 70.0]); // out of reach
        assert!(sc.validate().is_err());

        let mut sc = simple_scenario();
        sc.entities[0].actions[0].kind = ActionKind::Pick; // picks a bag nobody placed...
        sc.entities[0].actions.push(Action {
            t: 7.0,
            kind: ActionKind::Pick,
            object: "bag1".into(),
            at: None,
        }); // ...then picks it again while held
        assert!(sc.validate().is_err());

        let mut sc = simple_scenario();
        sc.entities[1].id = "p1".into(); // duplicate id
        assert!(sc.validate().is_err());
    }
}
