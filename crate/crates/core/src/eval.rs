//! Event-level evaluation: greedy one-to-one matching of predicted events
//! against ground truth, per-kind precision/recall, and the fixed-width
//! report table with per-scene rows and a summary.

use crate::events::{EventKind, SecurityEvent};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Reporting column. Non-owner moves and relocations share a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReportKind {
    Abandoning,
    MovedByOwner,
    MovedByUnowner,
    Theft,
    Suspect,
    Warning,
}

impl ReportKind {
    pub fn from_event(kind: EventKind) -> ReportKind {
        match kind {
            EventKind::ObjectAbandoned => ReportKind::Abandoning,
            EventKind::MovedByOwner => ReportKind::MovedByOwner,
            EventKind::MovedByNonOwner | EventKind::ObjectRelocated => ReportKind::MovedByUnowner,
            EventKind::Theft => ReportKind::Theft,
            EventKind::SuspectBackgroundObject => ReportKind::Suspect,
            EventKind::Warning => ReportKind::Warning,
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            ReportKind::Abandoning => "Abandoning",
            ReportKind::MovedByOwner => "Moved by owner",
            ReportKind::MovedByUnowner => "Moved by un-owner",
            ReportKind::Theft => "Theft",
            ReportKind::Suspect => "Suspect",
            ReportKind::Warning => "Warning",
        }
    }

    /// The four columns of the summary table, always reported.
    pub const CANONICAL: [ReportKind; 4] = [
        ReportKind::Abandoning,
        ReportKind::MovedByOwner,
        ReportKind::MovedByUnowner,
        ReportKind::Theft,
    ];
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub gt: u32,
    pub tp: u32,
    pub fp: u32,
}

impl KindCounts {
    pub fn fn_count(&self) -> u32 {
        self.gt - self.tp
    }

    /// TP / (TP + FP); zero when nothing was predicted.
    pub fn precision(&self) -> f64 {
        let denom = self.tp + self.fp;
        if denom == 0 {
            0.0
        } else {
            self.tp as f64 / denom as f64
        }
    }

    /// TP / GT; vacuously one when there was nothing to find.
    pub fn recall(&self) -> f64 {
        if self.gt == 0 {
            if self.tp == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            self.tp as f64 / self.gt as f64
        }
    }

    pub fn has_predictions(&self) -> bool {
        self.tp + self.fp > 0
    }

    fn add(&mut self, other: &KindCounts) {
        self.gt += other.gt;
        self.tp += other.tp;
        self.fp += other.fp;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneRow {
    pub scene: String,
    pub counts: BTreeMap<ReportKind, KindCounts>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MatchReport {
    pub rows: Vec<SceneRow>,
}

impl MatchReport {
    pub fn push(&mut self, row: SceneRow) {
        self.rows.push(row);
    }

    pub fn merge(&mut self, other: MatchReport) {
        self.rows.extend(other.rows);
    }

    pub fn sums(&self) -> BTreeMap<ReportKind, KindCounts> {
        let mut out: BTreeMap<ReportKind, KindCounts> = BTreeMap::new();
        for kind in ReportKind::CANONICAL {
            out.insert(kind, KindCounts::default());
        }
        for row in &self.rows {
            for (kind, counts) in &row.counts {
                out.entry(*kind).or_default().add(counts);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table in the layout of the summary tables: per-scene
    /// GT/TP/FP columns per event kind, a sum row, then precision and recall.
    pub fn render(&self) -> String {
        let sums = self.sums();
        let kinds: Vec<ReportKind> = sums.keys().copied().collect();
        let mut out = String::new();
        let scene_w = self
            .rows
            .iter()
            .map(|r| r.scene.len())
            .chain(std::iter::once("Precision".len()))
            .max()
            .unwrap_or(9);

        let fmt_pct = |v: Option<f64>| -> String {
            match v {
                Some(p) => format!("{:.1}%", p * 100.0),
                None => "n/a".to_string(),
            }
        };

        out.push_str(&format!("{:<scene_w$}", "Event"));
        for k in &kinds {
            out.push_str(&format!(" | {:^17}", k.title()));
        }
        out.push('\n');
        out.push_str(&format!("{:<scene_w$}", "Scene"));
        for _ in &kinds {
            out.push_str(&format!(" | {:>5} {:>5} {:>5}", "GT", "TP", "FP"));
        }
        out.push('\n');
        let width = out.lines().last().map(|l| l.len()).unwrap_or(40);
        out.push_str(&"-".repeat(width));
        out.push('\n');

        for row in &self.rows {
            out.push_str(&format!("{:<scene_w$}", row.scene));
            for k in &kinds {
                let c = row.counts.get(k).copied().unwrap_or_default();
                out.push_str(&format!(" | {:>5} {:>5} {:>5}", c.gt, c.tp, c.fp));
            }
            out.push('\n');
        }
        out.push_str(&"-".repeat(width));
        out.push('\n');
        out.push_str(&format!("{:<scene_w$}", "Sum"));
        for k in &kinds {
            let c = sums[k];
            out.push_str(&format!(" | {:>5} {:>5} {:>5}", c.gt, c.tp, c.fp));
        }
        out.push('\n');
        out.push_str(&format!("{:<scene_w$}", "Precision"));
        for k in &kinds {
            let c = sums[k];
            let p = c.has_predictions().then(|| c.precision());
            out.push_str(&format!(" | {:^17}", fmt_pct(p)));
        }
        out.push('\n');
        out.push_str(&format!("{:<scene_w$}", "Recall"));
        for k in &kinds {
            let c = sums[k];
            let r = (c.gt > 0).then(|| c.recall());
            out.push_str(&format!(" | {:^17}", fmt_pct(r)));
        }
        out.push('\n');
        out
    }
}

fn object_compatible(a: &SecurityEvent, b: &SecurityEvent) -> bool {
    match (&a.object, &b.object) {
        (Some(x), Some(y)) => x == y,
        // Either side without an object id matches anything of the kind.
        _ => true,
    }
}

/// Greedy one-to-one matching on time-sorted events: a prediction is a true
/// positive iff an unmatched ground-truth event of the same reporting kind
/// and the same object lies within the tolerance. Leftover predictions are
/// false positives, leftover truths false negatives.
pub fn match_events(
    predicted: &[SecurityEvent],
    gt: &[SecurityEvent],
    tolerance_s: f64,
    scene: &str,
) -> SceneRow {
    let mut preds: Vec<&SecurityEvent> = predicted.iter().collect();
    preds.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.object.cmp(&b.object)));
    let mut truths: Vec<&SecurityEvent> = gt.iter().collect();
    truths.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.object.cmp(&b.object)));

    let mut counts: BTreeMap<ReportKind, KindCounts> = BTreeMap::new();
    for t in &truths {
        counts.entry(ReportKind::from_event(t.kind)).or_default().gt += 1;
    }
    let mut taken = vec![false; truths.len()];
    for p in &preds {
        let kind = ReportKind::from_event(p.kind);
        let slot = counts.entry(kind).or_default();
        let hit = truths.iter().enumerate().position(|(i, t)| {
            !taken[i]
                && ReportKind::from_event(t.kind) == kind
                && object_compatible(p, t)
                && (p.time_s - t.time_s).abs() <= tolerance_s
        });
        match hit {
            Some(i) => {
                taken[i] = true;
                slot.tp += 1;
            }
            None => slot.fp += 1,
        }
    }
    SceneRow {
        scene: scene.to_string(),
        counts,
    }
}
