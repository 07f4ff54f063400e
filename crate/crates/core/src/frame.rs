//! Raw RGB raster frames and cropped image regions.

use crate::geom::BBox;

/// A raw 8-bit RGB frame, row-major, tagged with its frame index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    index: u64,
    pixels: Vec<u8>,
}

impl Frame {
    pub fn new_filled(width: u32, height: u32, index: u64, rgb: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        Frame {
            width,
            height,
            index,
            pixels,
        }
    }

    pub fn from_pixels(width: u32, height: u32, index: u64, pixels: Vec<u8>) -> Self {
        assert_eq!(
            pixels.len(),
            (width * height * 3) as usize,
            "pixel buffer length must be width * height * 3"
        );
        Frame {
            width,
            height,
            index,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn fill_rect(&mut self, b: &BBox, rgb: [u8; 3]) {
        if let Some(c) = b.clamp_to(self.width, self.height) {
            for y in c.y as u32..c.bottom() as u32 {
                for x in c.x as u32..c.right() as u32 {
                    self.set_pixel(x, y, rgb);
                }
            }
        }
    }

    /// Cut a region out of the frame; the box is clamped to the frame first.
    pub fn crop(&self, b: &BBox, gt_entity: Option<String>) -> Crop {
        let c = b
            .clamp_to(self.width, self.height)
            .unwrap_or(BBox::new(0, 0, 1, 1));
        let mut pixels = Vec::with_capacity((c.w * c.h * 3) as usize);
        for y in c.y as u32..c.bottom() as u32 {
            for x in c.x as u32..c.right() as u32 {
                pixels.extend_from_slice(&self.pixel(x, y));
            }
        }
        Crop {
            width: c.w,
            height: c.h,
            frame_index: self.index,
            pixels,
            gt_entity,
        }
    }
}

/// An image region cut from a frame.
///
/// `gt_entity` carries the ground-truth entity id when the crop originated
/// from an oracle detection; only the oracle embedder reads it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crop {
    pub width: u32,
    pub height: u32,
    pub frame_index: u64,
    pub pixels: Vec<u8>,
    pub gt_entity: Option<String>,
}

impl Crop {
    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crop_extracts_region() {
        let mut f = Frame::new_filled(8, 8, 3, [0, 0, 0]);
        f.fill_rect(&BBox::new(2, 2, 3, 3), [9, 8, 7]);
        let c = f.crop(&BBox::new(2, 2, 3, 3), Some("bag".into()));
        assert_eq!((c.width, c.height), (3, 3));
        assert_eq!(c.frame_index, 3);
        assert!(c.pixels.chunks(3).all(|p| p == [9, 8, 7]));
        assert_eq!(c.gt_entity.as_deref(), Some("bag"));
    }

    #[test]
    fn crop_clamps_to_frame() {
        let f = Frame::new_filled(8, 8, 0, [1, 2, 3]);
        let c = f.crop(&BBox::new(-2, -2, 4, 4), None);
        assert_eq!((c.width, c.height), (2, 2));
    }
}
