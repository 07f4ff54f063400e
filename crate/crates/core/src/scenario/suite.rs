//! Scripted scenario library: the narrative demo scene, eleven scenes
//! mirroring the event mixes of the evaluation table, and a large-frame
//! runtime scene. All scenes are composed from a small set of motifs
//! (deposit-and-leave, owner retrieval, relocation, theft) choreographed so
//! that the analytic ground truth and the pixel pipeline agree.

use super::{Action, ActionKind, BackgroundSpec, Entity, Scenario};

const PERSON_SIZE: [u32; 2] = [12, 28];
const BAG_SIZE: [u32; 2] = [10, 8];
/// Bags land this far below the carrier's center: clear of the person box,
/// within reach.
const BAG_DY: f64 = 22.0;

const PERSON_COLORS: [[u8; 3]; 6] = [
    [220, 55, 55],
    [210, 200, 50],
    [55, 200, 55],
    [50, 195, 195],
    [70, 70, 215],
    [200, 60, 200],
];
const BAG_COLORS: [[u8; 3]; 5] = [
    [190, 90, 35],
    [120, 35, 190],
    [35, 150, 220],
    [220, 160, 40],
    [40, 190, 120],
];
const BAG_CATEGORIES: [&str; 3] = ["bag", "backpack", "suitcase"];

/// Scene geometry: two walking lanes, two primary drop spots and two
/// relocation targets per lane, and a parking row along the top where
/// actors who stay "in scene" wait out the rest of the run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Geometry {
    pub width: u32,
    pub height: u32,
    pub lanes: [f64; 2],
    pub spots: [f64; 2],
    pub targets: [f64; 2],
    pub park_y: f64,
}

const SUITE_GEO: Geometry = Geometry {
    width: 176,
    height: 144,
    lanes: [58.0, 100.0],
    spots: [48.0, 120.0],
    targets: [66.0, 102.0],
    park_y: 24.0,
};

const RUNTIME_GEO: Geometry = Geometry {
    width: 320,
    height: 240,
    lanes: [100.0, 180.0],
    spots: [90.0, 230.0],
    targets: [130.0, 190.0],
    park_y: 36.0,
};

pub(crate) struct SceneBuilder {
    sc: Scenario,
    geo: Geometry,
    n_person: usize,
    n_object: usize,
    parked: usize,
}

impl SceneBuilder {
    pub(crate) fn new(name: &str, geo: Geometry, duration_s: f64) -> Self {
        SceneBuilder {
            sc: Scenario {
                name: name.to_string(),
                width: geo.width,
                height: geo.height,
                fps: 25,
                duration_s,
                background: BackgroundSpec::default(),
                entities: Vec::new(),
            },
            geo,
            n_person: 0,
            n_object: 0,
            parked: 0,
        }
    }

    fn duration(&self) -> f64 {
        self.sc.duration_s
    }

    fn off_left(&self) -> f64 {
        -12.0
    }

    fn off_right(&self) -> f64 {
        self.geo.width as f64 + 12.0
    }

    fn park_spot(&mut self) -> (f64, f64) {
        let x = 16.0 + 20.0 * self.parked as f64;
        self.parked += 1;
        (x, self.geo.park_y)
    }

    fn lane(&self, slot: usize) -> f64 {
        self.geo.lanes[slot % 2]
    }

    fn spot_x(&self, slot: usize) -> f64 {
        self.geo.spots[(slot / 2) % 2]
    }

    fn target_x(&self, slot: usize) -> f64 {
        self.geo.targets[(slot / 2) % 2]
    }

    fn person(&mut self, segments: Vec<Vec<[f64; 3]>>, actions: Vec<Action>) -> String {
        let id = format!("p{}", self.n_person + 1);
        let color = PERSON_COLORS[self.n_person % PERSON_COLORS.len()];
        self.n_person += 1;
        self.sc.entities.push(Entity {
            id: id.clone(),
            kind: "person".into(),
            category: None,
            color,
            size: PERSON_SIZE,
            segments,
            actions,
        });
        id
    }

    fn object(&mut self) -> String {
        let id = format!("bag{}", self.n_object + 1);
        let color = BAG_COLORS[self.n_object % BAG_COLORS.len()];
        let category = BAG_CATEGORIES[self.n_object % BAG_CATEGORIES.len()];
        self.n_object += 1;
        self.sc.entities.push(Entity {
            id: id.clone(),
            kind: "object".into(),
            category: Some(category.into()),
            color,
            size: BAG_SIZE,
            segments: vec![],
            actions: vec![],
        });
        id
    }

    pub(crate) fn finish(self) -> Scenario {
        self.sc
            .validate()
            .unwrap_or_else(|e| panic!("scripted scenario {:?} invalid: {e}", self.sc.name));
        self.sc
    }
}

fn pick(t: f64, object: &str) -> Action {
    Action {
        t,
        kind: ActionKind::Pick,
        object: object.into(),
        at: None,
    }
}

fn drop_at(t: f64, object: &str, x: f64, y: f64) -> Action {
    Action {
        t,
        kind: ActionKind::Drop,
        object: object.into(),
        at: Some([x, y]),
    }
}

/// Deposit a bag and walk out: one abandonment.
fn motif_abandon(b: &mut SceneBuilder, t0: f64, slot: usize) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let bag = b.object();
    b.person(
        vec![vec![
            [t0, b.off_left(), lane],
            [t0 + 3.0, sx, lane],
            [t0 + 8.0, sx, lane],
            [t0 + 12.0, b.off_right(), lane],
        ]],
        vec![drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY)],
    );
}

/// Deposit, walk out (abandonment), then a thief takes the bag and leaves.
fn motif_abandon_theft(b: &mut SceneBuilder, t0: f64, slot: usize) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let bag = b.object();
    b.person(
        vec![vec![
            [t0, b.off_left(), lane],
            [t0 + 3.0, sx, lane],
            [t0 + 8.0, sx, lane],
            [t0 + 12.0, b.off_right(), lane],
        ]],
        vec![drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY)],
    );
    b.person(
        vec![vec![
            [t0 + 13.0, b.off_right(), lane],
            [t0 + 16.0, sx, lane],
            [t0 + 18.0, sx, lane],
            [t0 + 23.0, b.off_right(), lane],
        ]],
        vec![pick(t0 + 17.0, &bag)],
    );
}

/// Deposit, walk out (abandonment), come back for the bag (allowed, no
/// alarm) and leave with it.
fn motif_abandon_return_pick(b: &mut SceneBuilder, t0: f64, slot: usize) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let bag = b.object();
    b.person(
        vec![
            vec![
                [t0, b.off_left(), lane],
                [t0 + 3.0, sx, lane],
                [t0 + 8.0, sx, lane],
                [t0 + 12.0, b.off_right(), lane],
            ],
            vec![
                [t0 + 15.0, b.off_right(), lane],
                [t0 + 18.0, sx, lane],
                [t0 + 19.5, sx, lane],
                [t0 + 24.0, b.off_right(), lane],
            ],
        ],
        vec![
            drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY),
            pick(t0 + 19.0, &bag),
        ],
    );
}

/// Deposit and vanish mid-scene (occlusion): the 30-second timeout rule.
/// Needs a long slot.
fn motif_abandon_vanish(b: &mut SceneBuilder, t0: f64, slot: usize) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let bag = b.object();
    b.person(
        vec![vec![
            [t0, b.off_left(), lane],
            [t0 + 3.0, sx, lane],
            [t0 + 8.0, sx, lane],
            [t0 + 9.0, sx + 25.0, lane],
        ]],
        vec![drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY)],
    );
}

/// Deposit, work beside it, take it back (no alarm at any point).
fn motif_owner_pick(b: &mut SceneBuilder, t0: f64, slot: usize) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let bag = b.object();
    b.person(
        vec![vec![
            [t0, b.off_left(), lane],
            [t0 + 3.0, sx, lane],
            [t0 + 14.0, sx, lane],
            [t0 + 19.0, b.off_right(), lane],
        ]],
        vec![
            drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY),
            pick(t0 + 14.0, &bag),
        ],
    );
}

/// Owner deposits and stays in scene (parked); a thief takes the bag and
/// leaves: non-owner warning, then theft, but no abandonment.
fn motif_present_theft(b: &mut SceneBuilder, t0: f64, slot: usize) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let d = b.duration();
    let bag = b.object();
    let (px, py) = b.park_spot();
    b.person(
        vec![vec![
            [t0, b.off_left(), lane],
            [t0 + 3.0, sx, lane],
            [t0 + 6.0, sx, lane],
            [t0 + 9.0, px, py],
            [d, px, py],
        ]],
        vec![drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY)],
    );
    b.person(
        vec![vec![
            [t0 + 10.0, b.off_right(), lane],
            [t0 + 13.0, sx, lane],
            [t0 + 15.0, sx, lane],
            [t0 + 20.0, b.off_right(), lane],
        ]],
        vec![pick(t0 + 14.0, &bag)],
    );
}

/// A stranger moves the bag to a new spot and stays around: non-owner
/// warning plus a relocation, with ownership passing to the mover.
fn motif_relocate(b: &mut SceneBuilder, t0: f64, slot: usize, with_abandon: bool) {
    let lane = b.lane(slot);
    let sx = b.spot_x(slot);
    let tx = b.target_x(slot);
    let d = b.duration();
    let bag = b.object();
    if with_abandon {
        b.person(
            vec![vec![
                [t0, b.off_left(), lane],
                [t0 + 3.0, sx, lane],
                [t0 + 8.0, sx, lane],
                [t0 + 12.0, b.off_right(), lane],
            ]],
            vec![drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY)],
        );
    } else {
        let (px, py) = b.park_spot();
        b.person(
            vec![vec![
                [t0, b.off_left(), lane],
                [t0 + 3.0, sx, lane],
                [t0 + 6.0, sx, lane],
                [t0 + 9.0, px, py],
                [d, px, py],
            ]],
            vec![drop_at(t0 + 4.0, &bag, sx, lane + BAG_DY)],
        );
    }
    let (qx, qy) = b.park_spot();
    b.person(
        vec![vec![
            [t0 + 13.0, b.off_right(), lane],
            [t0 + 16.0, sx, lane],
            [t0 + 17.5, sx, lane],
            [t0 + 20.0, tx, lane],
            [t0 + 21.0, tx, lane],
            [t0 + 24.0, qx, qy],
            [d, qx, qy],
        ]],
        vec![
            pick(t0 + 17.0, &bag),
            drop_at(t0 + 20.5, &bag, tx, lane + BAG_DY),
        ],
    );
}

const SLOT_LEN: f64 = 26.0;
const VANISH_SLOT_LEN: f64 = 42.0;
const LEAD_IN: f64 = 2.0;
const TAIL: f64 = 6.0;

#[derive(Clone, Copy)]
enum Motif {
    Abandon,
    AbandonTheft,
    AbandonReturnPick,
    AbandonVanish,
    OwnerPick,
    PresentTheft,
    Relocate,
    RelocateAbandoned,
}

impl Motif {
    fn slot_len(&self) -> f64 {
        match self {
            Motif::AbandonVanish => VANISH_SLOT_LEN,
            _ => SLOT_LEN,
        }
    }

    fn apply(&self, b: &mut SceneBuilder, t0: f64, slot: usize) {
        match self {
            Motif::Abandon => motif_abandon(b, t0, slot),
            Motif::AbandonTheft => motif_abandon_theft(b, t0, slot),
            Motif::AbandonReturnPick => motif_abandon_return_pick(b, t0, slot),
            Motif::AbandonVanish => motif_abandon_vanish(b, t0, slot),
            Motif::OwnerPick => motif_owner_pick(b, t0, slot),
            Motif::PresentTheft => motif_present_theft(b, t0, slot),
            Motif::Relocate => motif_relocate(b, t0, slot, false),
            Motif::RelocateAbandoned => motif_relocate(b, t0, slot, true),
        }
    }
}

fn compose(name: &str, geo: Geometry, motifs: &[Motif]) -> Scenario {
    let duration = LEAD_IN + motifs.iter().map(|m| m.slot_len()).sum::<f64>() + TAIL;
    let mut b = SceneBuilder::new(name, geo, duration);
    let mut t0 = LEAD_IN;
    for (slot, m) in motifs.iter().enumerate() {
        m.apply(&mut b, t0, slot);
        t0 += m.slot_len();
    }
    b.finish()
}

/// Motif palette exposed to the random generator.
#[derive(Debug, Clone, Copy)]
pub enum GenMotif {
    Abandon,
    AbandonTheft,
    AbandonReturnPick,
    AbandonVanish,
    OwnerPick,
    PresentTheft,
    Relocate,
    RelocateAbandoned,
}

impl GenMotif {
    pub fn persons(&self) -> usize {
        match self {
            GenMotif::AbandonTheft
            | GenMotif::PresentTheft
            | GenMotif::Relocate
            | GenMotif::RelocateAbandoned => 2,
            _ => 1,
        }
    }

    fn motif(&self) -> Motif {
        match self {
            GenMotif::Abandon => Motif::Abandon,
            GenMotif::AbandonTheft => Motif::AbandonTheft,
            GenMotif::AbandonReturnPick => Motif::AbandonReturnPick,
            GenMotif::AbandonVanish => Motif::AbandonVanish,
            GenMotif::OwnerPick => Motif::OwnerPick,
            GenMotif::PresentTheft => Motif::PresentTheft,
            GenMotif::Relocate => Motif::Relocate,
            GenMotif::RelocateAbandoned => Motif::RelocateAbandoned,
        }
    }
}

/// Compose a generated scene: the chosen motifs in sequential slots, plus
/// `visitors` idle persons who come in along the parking row and wait.
pub(crate) fn compose_generated(name: &str, motifs: &[GenMotif], visitors: usize) -> Scenario {
    let duration = LEAD_IN
        + motifs.iter().map(|m| m.motif().slot_len()).sum::<f64>()
        + TAIL;
    let mut b = SceneBuilder::new(name, SUITE_GEO, duration);
    for i in 0..visitors {
        let (px, py) = b.park_spot();
        let t_in = 1.0 + 1.5 * i as f64;
        let d = b.duration();
        b.person(
            vec![vec![[t_in, b.off_left(), py], [t_in + 3.0, px, py], [d, px, py]]],
            vec![],
        );
    }
    let mut t0 = LEAD_IN;
    for (slot, m) in motifs.iter().enumerate() {
        m.motif().apply(&mut b, t0, slot);
        t0 += m.motif().slot_len();
    }
    b.finish()
}

/// Eleven scenes whose per-kind ground-truth event counts mirror the
/// evaluation table's rows (abandon / moved-by-owner / moved-by-un-owner /
/// theft): sums 14, 10, 6, 8.
pub fn table_mix_suite() -> Vec<Scenario> {
    use Motif::*;
    vec![
        compose("lab1-v1", SUITE_GEO, &[AbandonTheft, OwnerPick, Relocate]),
        compose("lab1-v2", SUITE_GEO, &[AbandonTheft, AbandonReturnPick]),
        compose("library", SUITE_GEO, &[AbandonTheft, Relocate]),
        compose("lab2-v1", SUITE_GEO, &[AbandonReturnPick]),
        compose("lab2-v2", SUITE_GEO, &[AbandonReturnPick, OwnerPick]),
        compose(
            "lab2-v3",
            SUITE_GEO,
            &[AbandonTheft, AbandonReturnPick, OwnerPick, PresentTheft],
        ),
        compose(
            "lab2-v4",
            SUITE_GEO,
            &[AbandonReturnPick, RelocateAbandoned, OwnerPick, Relocate],
        ),
        compose("hall-v1", SUITE_GEO, &[PresentTheft, Relocate]),
        compose("hall-v2", SUITE_GEO, &[AbandonTheft]),
        compose("hall-v3", SUITE_GEO, &[AbandonVanish, AbandonReturnPick]),
        compose("hall-v4", SUITE_GEO, &[AbandonTheft, Relocate]),
    ]
}

/// 60-second 320x240 scene used for the wall-clock budget check.
pub fn runtime_scenario() -> Scenario {
    compose("runtime-320x240", RUNTIME_GEO, &[Motif::AbandonTheft, Motif::OwnerPick])
}

/// Minimal deposit-and-exit scene (one abandonment), for unit tests.
pub fn single_abandon_scenario() -> Scenario {
    compose("single-abandon", SUITE_GEO, &[Motif::Abandon])
}

/// The narrative demo scene: person A works beside his bag (never
/// abandoned); person B leaves his (abandoned); A retrieves his own bag (no
/// alarm), swaps it for B's (warning, and A becomes the substitute's owner),
/// and walks to the doorway with B's bag (theft). Pair with a config whose
/// `ev.exit_regions` contains [`FIG3_DOOR`] so the doorway counts as an
/// exit.
pub const FIG3_DOOR: [i32; 4] = [164, 88, 8, 28];

pub fn fig3() -> Scenario {
    let geo = SUITE_GEO;
    let mut b = SceneBuilder::new("fig3", geo, 50.0);
    b.sc.background.noise_amp = 4;
    b.sc.background.noise_seed = 11;
    let bag_a = b.object();
    let bag_b = b.object();
    // Person A: enters, drops his bag at the first table, works beside it,
    // retrieves it, swaps it with B's bag, walks to the doorway with B's.
    b.person(
        vec![vec![
            [1.0, b.off_left(), 58.0],
            [4.0, 48.0, 58.0],
            [31.0, 48.0, 58.0],
            [36.0, 106.0, 100.0],
            [38.0, 106.0, 100.0],
            [38.5, 120.0, 100.0],
            [40.0, 120.0, 100.0],
            [43.0, 166.0, 100.0],
            [50.0, 166.0, 100.0],
        ]],
        vec![
            drop_at(5.0, &bag_a, 48.0, 80.0),
            pick(30.0, &bag_a),
            drop_at(37.0, &bag_a, 102.0, 122.0),
            pick(39.0, &bag_b),
        ],
    );
    // Person B: enters later, leaves his bag at the second table and exits.
    b.person(
        vec![vec![
            [10.0, b.off_left(), 100.0],
            [14.0, 120.0, 100.0],
            [19.0, 120.0, 100.0],
            [23.0, b.off_left(), 100.0],
        ]],
        vec![drop_at(15.0, &bag_b, 120.0, 122.0)],
    );
    b.finish()
}

/// A background object (scene fixture) being moved: raises a suspect alarm.
pub fn bo_demo() -> Scenario {
    let geo = SUITE_GEO;
    let mut b = SceneBuilder::new("bo-demo", geo, 30.0);
    // Fixture present from frame zero.
    b.sc.entities.push(Entity {
        id: "monitor".into(),
        kind: "object".into(),
        category: Some("box".into()),
        color: [30, 30, 30],
        size: [14, 10],
        segments: vec![vec![[0.0, 48.0, 80.0]]],
        actions: vec![],
    });
    let (px, py) = b.park_spot();
    let d = b.duration();
    b.person(
        vec![vec![
            [2.0, b.off_left(), 58.0],
            [5.0, 48.0, 58.0],
            [7.0, 48.0, 58.0],
            [10.0, 102.0, 58.0],
            [11.0, 102.0, 58.0],
            [14.0, px, py],
            [d, px, py],
        ]],
        vec![pick(8.0, "monitor"), drop_at(10.5, "monitor", 102.0, 80.0)],
    );
    b.finish()
}
