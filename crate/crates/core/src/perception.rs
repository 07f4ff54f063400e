//! Object and person perception: the pluggable detector port, the BO/SO
//! object registries, and detection confined to static foreground regions.

use crate::background::{classify_motion, ObjectMotionState};
use crate::config::{BackgroundCfg, DetectorCfg, PerceptionCfg};
use crate::frame::{Crop, Frame};
use crate::geom::{iou, BBox};
use crate::mask::Mask;
use crate::scenario::Scenario;
use crate::tracker::PersonId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// One detector output.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub category: String,
    pub bbox: BBox,
    pub score: f64,
    /// Ground-truth entity id, present only for oracle-backed detectors.
    pub gt_entity: Option<String>,
}

/// Abstract detector: full-frame when `roi` is None, otherwise restricted to
/// the region of interest. Implementations must be deterministic functions
/// of (frame, roi, seed).
pub trait DetectorPort {
    fn detect(&self, frame: &Frame, roi: Option<BBox>) -> Vec<Detection>;
}

/// Same-object test for detection boxes: sufficient overlap, or centers
/// closer than the reference box's mean extent (small jittered boxes can
/// have near-zero IoU while clearly being the same object).
fn same_object_box(candidate: &BBox, reference: &BBox, dedup_iou: f64) -> bool {
    if iou(candidate, reference) >= dedup_iou {
        return true;
    }
    let radius = (reference.w + reference.h) as f64 / 2.0;
    candidate.center().distance(reference.center()) <= radius
}

/// Identifier of a registered object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub u32);

impl std::fmt::Display for ObjectId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "obj:{}", self.0)
    }
}

/// Which registry an object record lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegistryKind {
    /// Part of the learned scene background.
    Background,
    /// A deposited static object under watch.
    Static,
    /// Moved or missing; retains its pre-move box and crop.
    Moved,
}

#[derive(Debug, Clone)]
pub struct ObjectRecord {
    pub id: ObjectId,
    pub category: String,
    pub bbox: BBox,
    pub registry: RegistryKind,
    pub crop: Crop,
    pub first_seen: u64,
    pub last_seen: u64,
    pub owner: Option<PersonId>,
    pub abandoned: bool,
}

impl ObjectRecord {
    /// Stable display label: the ground-truth entity name when known.
    pub fn label(&self) -> String {
        self.crop
            .gt_entity
            .clone()
            .unwrap_or_else(|| self.id.to_string())
    }
}

/// All object records, in registration order. No id is ever reused, and a
/// record is only ever in one registry.
#[derive(Debug, Default)]
pub struct ObjectStore {
    objects: Vec<ObjectRecord>,
    next_id: u32,
}

impl ObjectStore {
    pub fn new() -> Self {
        ObjectStore {
            objects: Vec::new(),
            next_id: 1,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectRecord> {
        self.objects.iter()
    }

    pub fn get(&self, id: ObjectId) -> Option<&ObjectRecord> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn get_mut(&mut self, id: ObjectId) -> Option<&mut ObjectRecord> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    pub fn remove(&mut self, id: ObjectId) {
        self.objects.retain(|o| o.id != id);
    }

    pub fn ids(&self) -> Vec<ObjectId> {
        self.objects.iter().map(|o| o.id).collect()
    }

    fn insert(&mut self, mut rec: ObjectRecord) -> ObjectId {
        let id = ObjectId(self.next_id);
        self.next_id += 1;
        rec.id = id;
        self.objects.push(rec);
        id
    }

    /// True if the box duplicates an existing background or static record.
    fn duplicates(&self, bbox: &BBox, dedup_iou: f64) -> bool {
        self.objects.iter().any(|o| {
            matches!(o.registry, RegistryKind::Background | RegistryKind::Static)
                && same_object_box(bbox, &o.bbox, dedup_iou)
        })
    }
}

/// Detect objects in the learned background image and register them as
/// background objects. Persons are never part of the scene inventory.
pub fn register_background_objects(
    detector: &dyn DetectorPort,
    bg_image: &Frame,
    store: &mut ObjectStore,
    cfg: &PerceptionCfg,
) -> Vec<ObjectId> {
    let mut new_ids = Vec::new();
    for det in detector.detect(bg_image, None) {
        if det.category == "person" || !cfg.categories.contains(&det.category) {
            continue;
        }
        if store.duplicates(&det.bbox, cfg.dedup_iou) {
            continue;
        }
        let crop = bg_image.crop(&det.bbox, det.gt_entity.clone());
        new_ids.push(store.insert(ObjectRecord {
            id: ObjectId(0),
            category: det.category,
            bbox: det.bbox,
            registry: RegistryKind::Background,
            crop,
            first_seen: bg_image.index(),
            last_seen: bg_image.index(),
            owner: None,
            abandoned: false,
        }));
    }
    new_ids
}

/// Rolling confirmation of static-object candidates: a detection must show
/// up on consecutive frames (same category, overlapping box) before it is
/// registered. One-frame spurious detections never make it in.
#[derive(Debug, Default)]
pub struct SoCandidates {
    pending: Vec<PendingSo>,
}

#[derive(Debug)]
struct PendingSo {
    det: Detection,
    streak: u32,
    last_frame: u64,
}

impl SoCandidates {
    pub fn new() -> Self {
        SoCandidates::default()
    }

    /// Feed this frame's gated detections; returns the ones whose streak
    /// reached `confirm`.
    fn offer(&mut self, dets: Vec<Detection>, frame: u64, confirm: u32) -> Vec<Detection> {
        let mut confirmed = Vec::new();
        for det in dets {
            let slot = self.pending.iter_mut().find(|p| {
                p.det.category == det.category && same_object_box(&det.bbox, &p.det.bbox, 0.5)
            });
            match slot {
                Some(p) if p.last_frame + 1 == frame => {
                    p.streak += 1;
                    p.last_frame = frame;
                    p.det = det;
                    if p.streak >= confirm {
                        confirmed.push(p.det.clone());
                    }
                }
                Some(p) => {
                    p.streak = 1;
                    p.last_frame = frame;
                    p.det = det;
                    if p.streak >= confirm {
                        confirmed.push(p.det.clone());
                    }
                }
                None => {
                    let streak = 1;
                    if streak >= confirm {
                        confirmed.push(det.clone());
                    }
                    self.pending.push(PendingSo {
                        det,
                        streak,
                        last_frame: frame,
                    });
                }
            }
        }
        self.pending
            .retain(|p| p.last_frame == frame && p.streak < confirm);
        confirmed
    }
}

/// Run the detector inside the static foreground regions and register new
/// static objects. The detector is never invoked on an empty mask. A
/// detection must itself classify as Static (present in the long-term
/// foreground, absent from the short-term one), and must persist for
/// `so_confirm` consecutive frames, to be registered; this keeps moving
/// objects passing through a stale region and one-frame spurious boxes out
/// of the registry.
#[allow(clippy::too_many_arguments)]
pub fn detect_static_objects(
    detector: &dyn DetectorPort,
    frame: &Frame,
    static_mask: &Mask,
    f_long: &Mask,
    f_short: &Mask,
    store: &mut ObjectStore,
    candidates: &mut SoCandidates,
    cfg: &PerceptionCfg,
    bg_cfg: &BackgroundCfg,
) -> Vec<ObjectId> {
    let mut new_ids = Vec::new();
    if static_mask.is_empty() {
        return new_ids;
    }
    let mut gated = Vec::new();
    for component in static_mask.connected_components() {
        let Some(roi) = component.dilate(cfg.roi_margin, frame.width(), frame.height()) else {
            continue;
        };
        for det in detector.detect(frame, Some(roi)) {
            if det.category == "person" || !cfg.categories.contains(&det.category) {
                continue;
            }
            if store.duplicates(&det.bbox, cfg.dedup_iou) {
                continue;
            }
            if gated
                .iter()
                .any(|g: &Detection| same_object_box(&det.bbox, &g.bbox, cfg.dedup_iou))
            {
                continue; // same detection reached from two overlapping ROIs
            }
            if classify_motion(&det.bbox, f_long, f_short, bg_cfg.coverage_threshold)
                != ObjectMotionState::Static
            {
                continue;
            }
            gated.push(det);
        }
    }
    for det in candidates.offer(gated, frame.index(), cfg.so_confirm) {
        if store.duplicates(&det.bbox, cfg.dedup_iou) {
            continue;
        }
        let crop = frame.crop(&det.bbox, det.gt_entity.clone());
        new_ids.push(store.insert(ObjectRecord {
            id: ObjectId(0),
            category: det.category,
            bbox: det.bbox,
            registry: RegistryKind::Static,
            crop,
            first_seen: frame.index(),
            last_seen: frame.index(),
            owner: None,
            abandoned: false,
        }));
    }
    new_ids
}

/// Full-frame person detections for the tracker.
pub fn detect_persons(detector: &dyn DetectorPort, frame: &Frame) -> Vec<Detection> {
    detector
        .detect(frame, None)
        .into_iter()
        .filter(|d| d.category == "person")
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Test double for the neural detector: reads scenario ground truth,
/// perturbs it with a seeded noise model. Stateless; each (frame, roi) pair
/// derives its own generator, so results do not depend on call order.
pub struct MockDetector {
    scenario: Arc<Scenario>,
    noise: DetectorCfg,
    seed: u64,
}

impl MockDetector {
    pub fn new(scenario: Arc<Scenario>, noise: DetectorCfg, seed: u64) -> Self {
        MockDetector {
            scenario,
            noise,
            seed,
        }
    }

    fn rng_for(&self, frame: u64, roi: Option<BBox>) -> ChaCha8Rng {
        let mut h = splitmix64(self.seed ^ splitmix64(frame.wrapping_add(1)));
        if let Some(r) = roi {
            h = splitmix64(
                h ^ splitmix64(
                    (r.x as u64) << 48
                        ^ (r.y as u64 & 0xffff) << 32
                        ^ (r.w as u64) << 16
                        ^ r.h as u64,
                ),
            );
        }
        ChaCha8Rng::seed_from_u64(h)
    }
}

impl DetectorPort for MockDetector {
    fn detect(&self, frame: &Frame, roi: Option<BBox>) -> Vec<Detection> {
        let mut rng = self.rng_for(frame.index(), roi);
        let mut out = Vec::new();
        for eb in self.scenario.entity_boxes(frame.index()) {
            if let Some(r) = roi {
                if !r.intersects(&eb.bbox) {
                    continue;
                }
            }
            if self.noise.miss_rate > 0.0 && rng.gen::<f64>() < self.noise.miss_rate {
                continue;
            }
            let mut bbox = eb.bbox;
            if self.noise.jitter_px > 0 {
                let j = self.noise.jitter_px as i32;
                bbox = BBox {
                    x: bbox.x + rng.gen_range(-j..=j),
                    y: bbox.y + rng.gen_range(-j..=j),
                    w: (bbox.w as i32 + rng.gen_range(-j..=j)).max(2) as u32,
                    h: (bbox.h as i32 + rng.gen_range(-j..=j)).max(2) as u32,
                };
                bbox = match bbox.clamp_to(frame.width(), frame.height()) {
                    Some(b) => b,
                    None => continue,
                };
            }
            out.push(Detection {
                category: eb.category.clone(),
                bbox,
                score: 1.0,
                gt_entity: Some(eb.entity.clone()),
            });
        }
        if self.noise.fp_rate > 0.0 && rng.gen::<f64>() < self.noise.fp_rate {
            let area = roi.unwrap_or(BBox::new(0, 0, frame.width(), frame.height()));
            let w = rng.gen_range(6..=18).min(area.w.max(6));
            let h = rng.gen_range(6..=18).min(area.h.max(6));
            let x = area.x + rng.gen_range(0..area.w.saturating_sub(w).max(1)) as i32;
            let y = area.y + rng.gen_range(0..area.h.saturating_sub(h).max(1)) as i32;
            let categories = ["person", "bag", "backpack", "suitcase", "laptop", "box"];
            let category = categories[rng.gen_range(0..categories.len())].to_string();
            if let Some(bbox) = BBox::new(x, y, w, h).clamp_to(frame.width(), frame.height()) {
                out.push(Detection {
                    category,
                    bbox,
                    score: 0.6,
                    gt_entity: None,
                });
            }
        }
        out
    }
}

/// Wraps a detector and counts invocations (used by tests asserting that the
/// detector is not called on empty masks).
pub struct CountingDetector<D> {
    pub inner: D,
    pub calls: std::cell::Cell<usize>,
}

impl<D> CountingDetector<D> {
    pub fn new(inner: D) -> Self {
        CountingDetector {
            inner,
            calls: std::cell::Cell::new(0),
        }
    }
}

impl<D: DetectorPort> DetectorPort for CountingDetector<D> {
    fn detect(&self, frame: &Frame, roi: Option<BBox>) -> Vec<Detection> {
        self.calls.set(self.calls.get() + 1);
        self.inner.detect(frame, roi)
    }
}

/// One line of a recorded detection stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame: u64,
    pub category: String,
    pub x: i32,
    pub y: i32,
    pub w: u32,
    pub h: u32,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_entity_id: Option<String>,
}

pub fn write_detection_stream<W: Write>(
    mut w: W,
    records: &[DetectionRecord],
) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_detection_stream<R: BufRead>(r: R) -> std::io::Result<Vec<DetectionRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DetectionRecord = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        out.push(rec);
    }
    Ok(out)
}

/// Replays a recorded detection stream as a detector.
pub struct StreamDetector {
    by_frame: std::collections::BTreeMap<u64, Vec<Detection>>,
}

impl StreamDetector {
    pub fn new(records: &[DetectionRecord]) -> Self {
        let mut by_frame: std::collections::BTreeMap<u64, Vec<Detection>> =
            std::collections::BTreeMap::new();
        for r in records {
            by_frame.entry(r.frame).or_default().push(Detection {
                category: r.category.clone(),
                bbox: BBox::new(r.x, r.y, r.w.max(1), r.h.max(1)),
                score: r.score,
                gt_entity: r.gt_entity_id.clone(),
            });
        }
        StreamDetector { by_frame }
    }
}

impl DetectorPort for StreamDetector {
    fn detect(&self, frame: &Frame, roi: Option<BBox>) -> Vec<Detection> {
        let Some(dets) = self.by_frame.get(&frame.index()) else {
            return Vec::new();
        };
        dets.iter()
            .filter(|d| roi.is_none_or(|r| r.intersects(&d.bbox)))
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::scenario::suite;

    fn mock(noise: DetectorCfg, seed: u64) -> MockDetector {
        MockDetector::new(Arc::new(suite::fig3()), noise, seed)
    }

    #[test]
    fn zero_noise_detections_equal_ground_truth() {
        let sc = Arc::new(suite::fig3());
        let det = MockDetector::new(sc.clone(), DetectorCfg::default(), 7);
        for frame_idx in [0u64, 250, 500] {
            let frame = sc.render(frame_idx).unwrap();
            let got = det.detect(&frame, None);
            let want = sc.entity_boxes(frame_idx);
            assert_eq!(got.len(), want.len());
            for (d, g) in got.iter().zip(&want) {
                assert_eq!(d.bbox, g.bbox);
                assert_eq!(d.category, g.category);
                assert_eq!(d.gt_entity.as_deref(), Some(g.entity.as_str()));
            }
        }
    }

    #[test]
    fn full_miss_rate_detects_nothing() {
        let det = mock(
            DetectorCfg {
                miss_rate: 1.0,
                ..Default::default()
            },
            7,
        );
        let sc = suite::fig3();
        let frame = sc.render(300).unwrap();
        assert!(det.detect(&frame, None).is_empty());
    }

    #[test]
    fn seeded_noise_is_reproducible_and_call_order_free() {
        let noise = DetectorCfg {
            jitter_px: 2,
            miss_rate: 0.05,
            fp_rate: 0.02,
        };
        let a = mock(noise.clone(), 42);
        let b = mock(noise, 42);
        let sc = suite::fig3();
        let f1 = sc.render(100).unwrap();
        let f2 = sc.render(101).unwrap();
        // b queries in reverse order; per-call derivation must not care.
        let a1 = a.detect(&f1, None);
        let a2 = a.detect(&f2, None);
        let b2 = b.detect(&f2, None);
        let b1 = b.detect(&f1, None);
        assert_eq!(a1, b1);
        assert_eq!(a2, b2);
    }

    #[test]
    fn empty_mask_never_calls_detector() {
        let cfg = Config::default();
        let counting = CountingDetector::new(mock(DetectorCfg::default(), 1));
        let frame = Frame::new_filled(64, 48, 0, [0, 0, 0]);
        let empty = Mask::new(64, 48);
        let mut store = ObjectStore::new();
        let mut cands = SoCandidates::new();
        let ids = detect_static_objects(
            &counting, &frame, &empty, &empty, &empty, &mut store, &mut cands, &cfg.perc, &cfg.bg,
        );
        assert!(ids.is_empty());
        assert_eq!(counting.calls.get(), 0);
    }

    #[test]
    fn person_excluded_from_background_registry() {
        struct OnePerson;
        impl DetectorPort for OnePerson {
            fn detect(&self, _f: &Frame, _roi: Option<BBox>) -> Vec<Detection> {
                vec![
                    Detection {
                        category: "person".into(),
                        bbox: BBox::new(5, 5, 10, 20),
                        score: 1.0,
                        gt_entity: None,
                    },
                    Detection {
                        category: "box".into(),
                        bbox: BBox::new(30, 30, 12, 10),
                        score: 1.0,
                        gt_entity: Some("monitor".into()),
                    },
                ]
            }
        }
        let cfg = Config::default();
        let mut store = ObjectStore::new();
        let bg = Frame::new_filled(64, 48, 0, [0, 0, 0]);
        let ids = register_background_objects(&OnePerson, &bg, &mut store, &cfg.perc);
        assert_eq!(ids.len(), 1);
        let rec = store.get(ids[0]).unwrap();
        assert_eq!(rec.category, "box");
        assert_eq!(rec.registry, RegistryKind::Background);
        assert_eq!(rec.label(), "monitor");
    }

    #[test]
    fn dedup_skips_overlapping_detection() {
        struct OneBag;
        impl DetectorPort for OneBag {
            fn detect(&self, _f: &Frame, _roi: Option<BBox>) -> Vec<Detection> {
                vec![Detection {
                    category: "bag".into(),
                    bbox: BBox::new(10, 10, 10, 8),
                    score: 1.0,
                    gt_entity: None,
                }]
            }
        }
        let cfg = Config::default();
        let mut store = ObjectStore::new();
        let mut cands = SoCandidates::new();
        let mut static_mask = Mask::new(64, 48);
        static_mask.fill_rect(&BBox::new(10, 10, 10, 8));
        let mut f_long = Mask::new(64, 48);
        f_long.fill_rect(&BBox::new(10, 10, 10, 8));
        let f_short = Mask::new(64, 48);

        // Registration after so_confirm consecutive sightings.
        let mut registered = Vec::new();
        for i in 0..cfg.perc.so_confirm as u64 {
            let frame = Frame::new_filled(64, 48, 5 + i, [0, 0, 0]);
            registered.extend(detect_static_objects(
                &OneBag, &frame, &static_mask, &f_long, &f_short, &mut store, &mut cands,
                &cfg.perc, &cfg.bg,
            ));
        }
        assert_eq!(registered.len(), 1);
        // The next sighting is a duplicate of the registered record.
        let frame = Frame::new_filled(64, 48, 5 + cfg.perc.so_confirm as u64, [0, 0, 0]);
        let again = detect_static_objects(
            &OneBag, &frame, &static_mask, &f_long, &f_short, &mut store, &mut cands,
            &cfg.perc, &cfg.bg,
        );
        assert!(again.is_empty());
    }

    #[test]
    fn one_frame_candidate_is_never_registered() {
        struct FlakyBag;
        impl DetectorPort for FlakyBag {
            fn detect(&self, f: &Frame, _roi: Option<BBox>) -> Vec<Detection> {
                // Appears on frame 5 only.
                if f.index() == 5 {
                    vec![Detection {
                        category: "bag".into(),
                        bbox: BBox::new(10, 10, 10, 8),
                        score: 0.6,
                        gt_entity: None,
                    }]
                } else {
                    Vec::new()
                }
            }
        }
        let cfg = Config::default();
        let mut store = ObjectStore::new();
        let mut cands = SoCandidates::new();
        let mut static_mask = Mask::new(64, 48);
        static_mask.fill_rect(&BBox::new(10, 10, 10, 8));
        let mut f_long = Mask::new(64, 48);
        f_long.fill_rect(&BBox::new(10, 10, 10, 8));
        let f_short = Mask::new(64, 48);
        for i in 0..10u64 {
            let frame = Frame::new_filled(64, 48, i, [0, 0, 0]);
            let ids = detect_static_objects(
                &FlakyBag, &frame, &static_mask, &f_long, &f_short, &mut store, &mut cands,
                &cfg.perc, &cfg.bg,
            );
            assert!(ids.is_empty(), "frame {i}");
        }
    }

    #[test]
    fn moving_detection_not_registered_as_static() {
        struct OneBag;
        impl DetectorPort for OneBag {
            fn detect(&self, _f: &Frame, _roi: Option<BBox>) -> Vec<Detection> {
                vec![Detection {
                    category: "bag".into(),
                    bbox: BBox::new(10, 10, 10, 8),
                    score: 1.0,
                    gt_entity: None,
                }]
            }
        }
        let mut cfg = Config::default();
        cfg.perc.so_confirm = 1;
        let mut store = ObjectStore::new();
        let mut cands = SoCandidates::new();
        let frame = Frame::new_filled(64, 48, 5, [0, 0, 0]);
        let mut region = Mask::new(64, 48);
        region.fill_rect(&BBox::new(8, 8, 20, 20));
        // Short-term foreground covers the detection: it is in motion.
        let static_mask = region.clone();
        let f_long = region.clone();
        let f_short = region;
        let ids = detect_static_objects(
            &OneBag, &frame, &static_mask, &f_long, &f_short, &mut store, &mut cands,
            &cfg.perc, &cfg.bg,
        );
        assert!(ids.is_empty());
    }

    #[test]
    fn detection_stream_roundtrip_and_replay() {
        let records = vec![
            DetectionRecord {
                frame: 3,
                category: "person".into(),
                x: 10,
                y: 12,
                w: 8,
                h: 16,
                score: 0.9,
                gt_entity_id: Some("p1".into()),
            },
            DetectionRecord {
                frame: 3,
                category: "bag".into(),
                x: 40,
                y: 30,
                w: 8,
                h: 6,
                score: 0.8,
                gt_entity_id: None,
            },
        ];
        let mut buf = Vec::new();
        write_detection_stream(&mut buf, &records).unwrap();
        let back = read_detection_stream(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(records, back);

        let det = StreamDetector::new(&back);
        let frame = Frame::new_filled(64, 48, 3, [0, 0, 0]);
        assert_eq!(det.detect(&frame, None).len(), 2);
        let roi = BBox::new(35, 25, 20, 20);
        let in_roi = det.detect(&frame, Some(roi));
        assert_eq!(in_roi.len(), 1);
        assert_eq!(in_roi[0].category, "bag");
        let other = Frame::new_filled(64, 48, 9, [0, 0, 0]);
        assert!(det.detect(&other, None).is_empty());
    }
}
