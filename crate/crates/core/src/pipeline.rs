//! The frame-by-frame engine: dual background → static-region detection →
//! tracking → ownership → event analysis. Deterministic for a fixed
//! (input, config, seed) triple.

use crate::background::{static_regions, DualBackground, WhichModel};
use crate::clock::Clock;
use crate::config::Config;
use crate::events::{EventEngine, SecurityEvent};
use crate::frame::Frame;
use crate::geom::BBox;
use crate::identity::{EmbeddingPort, HistogramEmbedder, OracleEmbedder};
use crate::mask::Mask;
use crate::ownership::{assign_owner, check_abandonment, PersonDirectory};
use crate::perception::{
    detect_persons, detect_static_objects, register_background_objects, DetectionRecord,
    DetectorPort, MockDetector, ObjectStore, RegistryKind, SoCandidates, StreamDetector,
};
use crate::scenario::Scenario;
use crate::tracker::SortTracker;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Background(#[from] crate::background::BackgroundError),
    #[error("frame index {got} does not match pipeline clock {want}")]
    OutOfOrder { want: u64, got: u64 },
}

/// Anything that can hand the pipeline a deterministic frame sequence.
pub trait FrameSource {
    fn n_frames(&self) -> u64;
    fn width(&self) -> u32;
    fn height(&self) -> u32;
    fn fps(&self) -> u32;
    fn frame(&self, index: u64) -> Frame;
}

/// Frames rendered from a scripted scenario.
pub struct ScenarioSource {
    scenario: Arc<Scenario>,
}

impl ScenarioSource {
    pub fn new(scenario: Arc<Scenario>) -> Self {
        ScenarioSource { scenario }
    }
}

impl FrameSource for ScenarioSource {
    fn n_frames(&self) -> u64 {
        self.scenario.n_frames()
    }

    fn width(&self) -> u32 {
        self.scenario.width
    }

    fn height(&self) -> u32 {
        self.scenario.height
    }

    fn fps(&self) -> u32 {
        self.scenario.fps
    }

    fn frame(&self, index: u64) -> Frame {
        self.scenario.render(index).expect("index within range")
    }
}

/// Frames synthesized from a recorded detection stream: each detection is
/// drawn as a flat rectangle whose color is keyed to its entity id (or
/// category), over a gray background. This lets a recorded stream drive the
/// full pixel pipeline.
pub struct SynthSource {
    width: u32,
    height: u32,
    fps: u32,
    n_frames: u64,
    by_frame: std::collections::BTreeMap<u64, Vec<DetectionRecord>>,
}

impl SynthSource {
    pub fn new(records: &[DetectionRecord], fps: u32) -> Self {
        let mut by_frame: std::collections::BTreeMap<u64, Vec<DetectionRecord>> =
            std::collections::BTreeMap::new();
        let mut max_x = 0i64;
        let mut max_y = 0i64;
        let mut max_frame = 0u64;
        for r in records {
            max_x = max_x.max(r.x as i64 + r.w as i64);
            max_y = max_y.max(r.y as i64 + r.h as i64);
            max_frame = max_frame.max(r.frame);
            by_frame.entry(r.frame).or_default().push(r.clone());
        }
        // The frame hugs the recorded extents so that tracks leaving the
        // recorded area die in the edge band, like they would on camera.
        SynthSource {
            width: max_x.max(56) as u32,
            height: max_y.max(56) as u32,
            fps,
            n_frames: max_frame + 1,
            by_frame,
        }
    }

    fn entity_color(key: &str) -> [u8; 3] {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in key.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        // Bright, saturated colors distinct from the gray background.
        [
            64 + (h >> 8) as u8 % 192,
            64 + (h >> 24) as u8 % 192,
            64 + (h >> 40) as u8 % 192,
        ]
    }
}

impl FrameSource for SynthSource {
    fn n_frames(&self) -> u64 {
        self.n_frames
    }

    fn width(&self) -> u32 {
        self.width
    }

    fn height(&self) -> u32 {
        self.height
    }

    fn fps(&self) -> u32 {
        self.fps
    }

    fn frame(&self, index: u64) -> Frame {
        let mut f = Frame::new_filled(self.width, self.height, index, [96, 96, 96]);
        if let Some(records) = self.by_frame.get(&index) {
            for r in records {
                let key = r.gt_entity_id.as_deref().unwrap_or(&r.category);
                f.fill_rect(
                    &BBox::new(r.x, r.y, r.w.max(1), r.h.max(1)),
                    Self::entity_color(key),
                );
            }
        }
        f
    }
}

pub struct Pipeline {
    cfg: Config,
    clock: Clock,
    width: u32,
    height: u32,
    bg: DualBackground,
    tracker: SortTracker,
    objects: ObjectStore,
    so_candidates: SoCandidates,
    persons: PersonDirectory,
    engine: EventEngine,
    detector: Box<dyn DetectorPort>,
    embedder: Box<dyn EmbeddingPort>,
    threads: usize,
    bo_registered: bool,
}

pub fn embedder_from_config(cfg: &Config) -> Box<dyn EmbeddingPort> {
    match cfg.id.embedder.as_str() {
        "oracle" => Box::new(OracleEmbedder),
        _ => Box::new(HistogramEmbedder),
    }
}

impl Pipeline {
    pub fn new(
        cfg: Config,
        width: u32,
        height: u32,
        fps: u32,
        detector: Box<dyn DetectorPort>,
        threads: usize,
    ) -> Self {
        let embedder = embedder_from_config(&cfg);
        Pipeline {
            clock: Clock::new(fps),
            width,
            height,
            bg: DualBackground::new(width, height, cfg.bg.clone()),
            tracker: SortTracker::new(cfg.track.clone()),
            objects: ObjectStore::new(),
            so_candidates: SoCandidates::new(),
            persons: PersonDirectory::new(),
            engine: EventEngine::new(cfg.ev.clone(), cfg.id.clone(), fps),
            detector,
            embedder,
            threads: threads.max(1),
            bo_registered: false,
            cfg,
        }
    }

    /// Pipeline over a scripted scenario with the mock detector.
    pub fn for_scenario(
        scenario: Arc<Scenario>,
        cfg: Config,
        seed: u64,
        threads: usize,
    ) -> (Self, ScenarioSource) {
        let detector = Box::new(MockDetector::new(scenario.clone(), cfg.det.clone(), seed));
        let pipeline = Pipeline::new(
            cfg,
            scenario.width,
            scenario.height,
            scenario.fps,
            detector,
            threads,
        );
        (pipeline, ScenarioSource::new(scenario))
    }

    /// Pipeline over a recorded detection stream (frames synthesized).
    pub fn for_detections(
        records: &[DetectionRecord],
        cfg: Config,
        fps: u32,
        threads: usize,
    ) -> (Self, SynthSource) {
        let source = SynthSource::new(records, fps);
        let detector = Box::new(StreamDetector::new(records));
        let pipeline = Pipeline::new(
            cfg,
            source.width(),
            source.height(),
            fps,
            detector,
            threads,
        );
        (pipeline, source)
    }

    pub fn events(&self) -> &[SecurityEvent] {
        self.engine.events()
    }

    pub fn objects(&self) -> &ObjectStore {
        &self.objects
    }

    pub fn persons(&self) -> &PersonDirectory {
        &self.persons
    }

    pub fn tracker(&self) -> &SortTracker {
        &self.tracker
    }

    /// Run a whole frame source to completion and return the event log.
    pub fn run(&mut self, source: &dyn FrameSource) -> Result<Vec<SecurityEvent>, PipelineError> {
        for i in 0..source.n_frames() {
            let frame = source.frame(i);
            self.step(&frame)?;
        }
        Ok(self.engine.events().to_vec())
    }

    fn cleanup(mask: Mask) -> Mask {
        mask.morph_open().morph_close()
    }

    pub fn step(&mut self, frame: &Frame) -> Result<(), PipelineError> {
        if frame.index() != self.clock.frame() {
            return Err(PipelineError::OutOfOrder {
                want: self.clock.frame(),
                got: frame.index(),
            });
        }
        let now = self.clock.frame();
        self.bg.ingest(frame)?;

        // Scene inventory, once the long model has a background image.
        if !self.bo_registered {
            let bg_image = self.bg.background_image(now)?;
            register_background_objects(
                self.detector.as_ref(),
                &bg_image,
                &mut self.objects,
                &self.cfg.perc,
            );
            self.bo_registered = true;
        }

        let f_long = Self::cleanup(self.bg.foreground(frame, WhichModel::Long)?);
        let f_short = Self::cleanup(self.bg.foreground(frame, WhichModel::Short)?);

        // Person detection and tracking on the raw frame.
        let person_dets = detect_persons(self.detector.as_ref(), frame);
        self.tracker.step(&person_dets, frame);
        self.persons.sync(&self.tracker);

        // New static objects inside the static foreground regions.
        let static_mask = static_regions(&f_long, &f_short)?;
        let new_sos = detect_static_objects(
            self.detector.as_ref(),
            frame,
            &static_mask,
            &f_long,
            &f_short,
            &mut self.objects,
            &mut self.so_candidates,
            &self.cfg.perc,
            &self.cfg.bg,
        );
        for id in new_sos {
            // A new static object may be a watched object resurfacing.
            let relocated = self.engine.match_reappearance(
                now,
                id,
                &mut self.objects,
                &mut self.persons,
                &self.tracker,
                self.embedder.as_ref(),
            );
            if relocated {
                continue;
            }
            let owner = {
                let obj = self.objects.get(id).expect("just registered");
                assign_owner(obj, &self.tracker, now, self.clock.fps(), &self.cfg.own)
            };
            if let Some(op) = owner {
                self.objects.get_mut(id).unwrap().owner = Some(op);
                self.persons.mark_owner(op, id);
            }
        }

        // Abandonment rules, latched per object.
        for id in self.objects.ids() {
            let obj = self.objects.get(id).unwrap();
            if obj.registry != RegistryKind::Static || obj.abandoned {
                continue;
            }
            let owner_trace = obj.owner.and_then(|op| self.tracker.trace(op));
            let verdict = check_abandonment(
                obj,
                owner_trace,
                now,
                self.clock.fps(),
                self.width,
                self.height,
                &self.cfg.own,
            );
            if let Some(reason) = verdict {
                let owner_label = obj.owner.map(|op| self.persons.label(op, &self.tracker));
                let snapshot = obj.clone();
                self.objects.get_mut(id).unwrap().abandoned = true;
                self.engine
                    .emit_abandonment(now, &snapshot, owner_label, reason.detail());
            }
        }

        // Motion triggers on registered objects.
        for id in self.objects.ids() {
            let obj = match self.objects.get(id) {
                Some(o) => o.clone(),
                None => continue,
            };
            if obj.registry == RegistryKind::Moved {
                continue;
            }
            if !crate::events::motion_trigger(&obj.bbox, &f_short, self.cfg.ev.tau_move) {
                // Feed the debounce with a non-trigger.
                self.engine.confirm_move(&obj, &f_short, &[]);
                continue;
            }
            let roi = obj
                .bbox
                .dilate(self.cfg.perc.roi_margin, self.width, self.height)
                .unwrap_or(obj.bbox);
            let redetect = self.detector.detect(frame, Some(roi));
            if self.engine.confirm_move(&obj, &f_short, &redetect) {
                self.engine.open_watch(
                    now,
                    id,
                    &mut self.objects,
                    &mut self.persons,
                    &self.tracker,
                    self.embedder.as_ref(),
                    self.threads,
                );
            }
        }

        // Watch lifecycle: re-verification and theft rules.
        let edge_margin =
            (self.cfg.own.edge_margin_pct * self.width.min(self.height) as f64).round() as u32;
        let timeout_frames =
            (self.cfg.own.abandon_timeout_s * self.clock.fps() as f64).round() as u64;
        self.engine.tick_watches(
            now,
            &mut self.objects,
            &mut self.persons,
            &self.tracker,
            self.embedder.as_ref(),
            self.threads,
            edge_margin,
            self.width,
            self.height,
            timeout_frames,
        );

        self.clock.advance();
        Ok(())
    }
}

/// Convenience: run a scenario end to end and return the event log.
pub fn run_scenario(
    scenario: Arc<Scenario>,
    cfg: Config,
    seed: u64,
    threads: usize,
) -> Result<Vec<SecurityEvent>, PipelineError> {
    let (mut pipeline, source) = Pipeline::for_scenario(scenario, cfg, seed, threads);
    pipeline.run(&source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::EventKind;

    fn oracle_config() -> Config {
        let mut cfg = Config::default();
        cfg.id.embedder = "oracle".into();
        cfg
    }

    #[test]
    fn empty_scenario_emits_nothing() {
        let sc = Arc::new(Scenario {
            name: "empty".into(),
            width: 64,
            height: 48,
            fps: 25,
            duration_s: 8.0,
            background: Default::default(),
            entities: vec![],
        });
        let events = run_scenario(sc, oracle_config(), 1, 1).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn person_walking_through_emits_nothing() {
        let sc = Arc::new(Scenario {
            name: "walk".into(),
            width: 96,
            height: 72,
            fps: 25,
            duration_s: 10.0,
            background: Default::default(),
            entities: vec![crate::scenario::Entity {
                id: "p1".into(),
                kind: "person".into(),
                category: None,
                color: [200, 60, 50],
                size: [10, 24],
                segments: vec![vec![[1.0, -8.0, 36.0], [8.0, 104.0, 36.0]]],
                actions: vec![],
            }],
        });
        let events = run_scenario(sc, oracle_config(), 1, 1).unwrap();
        assert!(events.is_empty(), "{events:?}");
    }

    #[test]
    fn deposit_and_exit_emits_abandonment() {
        let sc = Arc::new(crate::scenario::suite::single_abandon_scenario());
        let events = run_scenario(sc.clone(), oracle_config(), 1, 1).unwrap();
        let kinds: Vec<EventKind> = events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::ObjectAbandoned], "{events:?}");
        assert_eq!(events[0].object.as_deref(), Some("bag1"));
        assert_eq!(events[0].person.as_deref(), Some("p1"));
    }

    #[test]
    fn synth_source_runs_a_detection_stream() {
        // Derive a stream from a scenario's ground truth and replay it.
        let sc = crate::scenario::suite::single_abandon_scenario();
        let mut records = Vec::new();
        for f in 0..sc.n_frames() {
            for eb in sc.entity_boxes(f) {
                records.push(DetectionRecord {
                    frame: f,
                    category: eb.category.clone(),
                    x: eb.bbox.x,
                    y: eb.bbox.y,
                    w: eb.bbox.w,
                    h: eb.bbox.h,
                    score: 1.0,
                    gt_entity_id: Some(eb.entity.clone()),
                });
            }
        }
        let (mut pipeline, source) =
            Pipeline::for_detections(&records, oracle_config(), sc.fps, 1);
        let events = pipeline.run(&source).unwrap();
        let kinds: Vec<EventKind> = events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::ObjectAbandoned], "{events:?}");
    }
}
