//! Dual long-term/short-term background modeling.
//!
//! Each model keeps a per-pixel ring of RGB samples refreshed on its own
//! cadence: one frame out of every 50 for the long model, one out of every 3
//! for the short model. A pixel is background once `min_consensus` samples
//! sit within `match_radius` of its current color, so with full consensus a
//! deposited object is only absorbed after the whole buffer has refreshed
//! (40 s for the long model at 25 fps).

use crate::config::BackgroundCfg;
use crate::frame::Frame;
use crate::geom::BBox;
use crate::mask::Mask;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BackgroundError {
    #[error("frame is {got_w}x{got_h} but the model was built for {want_w}x{want_h}")]
    DimensionMismatch {
        want_w: u32,
        want_h: u32,
        got_w: u32,
        got_h: u32,
    },
    #[error("model queried before any frame was ingested")]
    NotReady,
    #[error("mask size mismatch")]
    MaskSizeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichModel {
    Long,
    Short,
}

/// Motion state of an object box judged against the two foreground masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectMotionState {
    /// In the long-term foreground only: recently deposited, now still.
    Static,
    /// In the short-term foreground: in motion.
    Moving,
    /// Absent from both foregrounds: still for a very long time.
    LongStatic,
}

/// Per-pixel sample ring for one model.
#[derive(Debug, Clone)]
struct SampleModel {
    width: u32,
    height: u32,
    k: usize,
    /// Layout: [pixel][slot][rgb], so the per-pixel probe is contiguous.
    samples: Vec<u8>,
    next_slot: usize,
    warm: bool,
}

impl SampleModel {
    fn new(width: u32, height: u32, k: usize) -> Self {
        SampleModel {
            width,
            height,
            k,
            samples: vec![0; (width * height) as usize * k * 3],
            next_slot: 0,
            warm: false,
        }
    }

    /// Fill every slot with the given frame (bootstrap on first ingest).
    fn fill_all(&mut self, frame: &Frame) {
        let n = (self.width * self.height) as usize;
        for p in 0..n {
            let rgb = &frame.pixels()[p * 3..p * 3 + 3];
            for s in 0..self.k {
                let o = (p * self.k + s) * 3;
                self.samples[o..o + 3].copy_from_slice(rgb);
            }
        }
        self.warm = true;
        self.next_slot = 0;
    }

    /// Replace the oldest sample of every pixel with the given frame.
    fn insert(&mut self, frame: &Frame) {
        let n = (self.width * self.height) as usize;
        let slot = self.next_slot;
        for p in 0..n {
            let rgb = &frame.pixels()[p * 3..p * 3 + 3];
            let o = (p * self.k + slot) * 3;
            self.samples[o..o + 3].copy_from_slice(rgb);
        }
        self.next_slot = (slot + 1) % self.k;
    }

    fn foreground(&self, frame: &Frame, match_radius: f64, min_consensus: usize) -> Mask {
        let mut mask = Mask::new(self.width, self.height);
        let r2 = (match_radius * match_radius) as i32;
        let n = (self.width * self.height) as usize;
        let bits = mask.bits_mut();
        #[allow(clippy::needless_range_loop)] // p also indexes the sample buffer
        for p in 0..n {
            let px = &frame.pixels()[p * 3..p * 3 + 3];
            let mut matches = 0usize;
            let base = p * self.k * 3;
            for s in 0..self.k {
                let o = base + s * 3;
                let dr = px[0] as i32 - self.samples[o] as i32;
                let dg = px[1] as i32 - self.samples[o + 1] as i32;
                let db = px[2] as i32 - self.samples[o + 2] as i32;
                if dr * dr + dg * dg + db * db <= r2 {
                    matches += 1;
                    if matches >= min_consensus {
                        break;
                    }
                } else if matches + (self.k - s - 1) < min_consensus {
                    break;
                }
            }
            bits[p] = matches < min_consensus;
        }
        mask
    }

    /// Per-pixel, per-channel median over the sample buffer.
    fn median_image(&self, index: u64) -> Frame {
        let n = (self.width * self.height) as usize;
        let mut pixels = vec![0u8; n * 3];
        let mut chan = vec![0u8; self.k];
        for p in 0..n {
            for c in 0..3 {
                for (s, v) in chan.iter_mut().enumerate() {
                    *v = self.samples[(p * self.k + s) * 3 + c];
                }
                chan.sort_unstable();
                pixels[p * 3 + c] = chan[self.k / 2];
            }
        }
        Frame::from_pixels(self.width, self.height, index, pixels)
    }
}

#[derive(Debug, Clone)]
pub struct DualBackground {
    long: SampleModel,
    short: SampleModel,
    cfg: BackgroundCfg,
}

impl DualBackground {
    pub fn new(width: u32, height: u32, cfg: BackgroundCfg) -> Self {
        DualBackground {
            long: SampleModel::new(width, height, cfg.samples),
            short: SampleModel::new(width, height, cfg.samples),
            cfg,
        }
    }

    pub fn is_warm(&self) -> bool {
        self.long.warm && self.short.warm
    }

    fn check_dims(&self, frame: &Frame) -> Result<(), BackgroundError> {
        if frame.width() != self.long.width || frame.height() != self.long.height {
            return Err(BackgroundError::DimensionMismatch {
                want_w: self.long.width,
                want_h: self.long.height,
                got_w: frame.width(),
                got_h: frame.height(),
            });
        }
        Ok(())
    }

    /// Feed one frame. Frames whose index is on neither cadence leave the
    /// model untouched; the very first ingested frame seeds both buffers.
    pub fn ingest(&mut self, frame: &Frame) -> Result<(), BackgroundError> {
        self.check_dims(frame)?;
        if !self.is_warm() {
            self.long.fill_all(frame);
            self.short.fill_all(frame);
            return Ok(());
        }
        if frame.index().is_multiple_of(self.cfg.long_interval) {
            self.long.insert(frame);
        }
        if frame.index().is_multiple_of(self.cfg.short_interval) {
            self.short.insert(frame);
        }
        Ok(())
    }

    /// Binary foreground of the frame against one model.
    pub fn foreground(&self, frame: &Frame, which: WhichModel) -> Result<Mask, BackgroundError> {
        if !self.is_warm() {
            return Err(BackgroundError::NotReady);
        }
        self.check_dims(frame)?;
        let model = match which {
            WhichModel::Long => &self.long,
            WhichModel::Short => &self.short,
        };
        Ok(model.foreground(frame, self.cfg.match_radius, self.cfg.min_consensus))
    }

    /// The learned background image (per-pixel median of the long model).
    pub fn background_image(&self, index: u64) -> Result<Frame, BackgroundError> {
        if !self.is_warm() {
            return Err(BackgroundError::NotReady);
        }
        Ok(self.long.median_image(index))
    }
}

/// Static foreground: regions of the long-term foreground with no short-term
/// motion. This is the static component of XOR(F_L, F_S); the other
/// component (short-only) is fresh motion and is discarded.
pub fn static_regions(f_long: &Mask, f_short: &Mask) -> Result<Mask, BackgroundError> {
    if !f_long.same_size(f_short) {
        return Err(BackgroundError::MaskSizeMismatch);
    }
    Ok(f_long.and(&f_short.not()))
}

/// Three-state motion classification of an object box.
pub fn classify_motion(
    bbox: &BBox,
    f_long: &Mask,
    f_short: &Mask,
    coverage_threshold: f64,
) -> ObjectMotionState {
    let in_long = f_long.coverage(bbox) >= coverage_threshold;
    let in_short = f_short.coverage(bbox) >= coverage_threshold;
    match (in_long, in_short) {
        (true, false) => ObjectMotionState::Static,
        (false, false) => ObjectMotionState::LongStatic,
        // Anything covered by short-term foreground is in motion.
        (_, true) => ObjectMotionState::Moving,
    }
}
