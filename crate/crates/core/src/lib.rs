//! Security-event recognition engine for surveillance streams.
//!
//! The pipeline maintains dual long/short-term background models, detects
//! static objects inside static foreground regions, tracks persons, labels
//! object owners, and classifies the events that follow an object being
//! moved: taken by its owner, relocated by somebody else, or stolen.
//!
//! Everything is deterministic: the same scenario, config, and seed always
//! produce the same event log, which is what the built-in synthetic scenario
//! oracle and the evaluation harness rely on.

pub mod background;
pub mod clock;
pub mod config;
pub mod eval;
pub mod events;
pub mod frame;
pub mod geom;
pub mod identity;
pub mod mask;
pub mod ownership;
pub mod perception;
pub mod pipeline;
pub mod scenario;
pub mod tracker;

pub use clock::Clock;
pub use config::Config;
pub use events::{EventKind, SecurityEvent};
pub use frame::{Crop, Frame};
pub use geom::{centroid_distance, iou, BBox, Point};
pub use mask::Mask;
