//! Frame-indexed time. Seconds are always derived from frame counts so
//! duration rules like "30 seconds" stay exact integer arithmetic.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clock {
    fps: u32,
    frame: u64,
}

impl Clock {
    pub fn new(fps: u32) -> Self {
        assert!(fps > 0, "fps must be positive");
        Clock { fps, frame: 0 }
    }

    pub fn fps(&self) -> u32 {
        self.fps
    }

    pub fn frame(&self) -> u64 {
        self.frame
    }

    pub fn seconds(&self) -> f64 {
        self.frame as f64 / self.fps as f64
    }

    pub fn advance(&mut self) {
        self.frame += 1;
    }

    pub fn set_frame(&mut self, frame: u64) {
        self.frame = frame;
    }

    /// Number of frames in `secs`; exact for whole seconds, rounded otherwise.
    pub fn frames_for_secs(&self, secs: f64) -> u64 {
        (secs * self.fps as f64).round() as u64
    }

    pub fn frame_to_secs(&self, frame: u64) -> f64 {
        frame as f64 / self.fps as f64
    }
}

impl Default for Clock {
    fn default() -> Self {
        Clock::new(25)
    }
}
