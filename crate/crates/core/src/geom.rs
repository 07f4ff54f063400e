//! Pixel-space geometry: bounding boxes, points, overlap measures.

use serde::{Deserialize, Serialize};

/// A 2D point in pixel coordinates (sub-pixel positions allowed).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Axis-aligned bounding box: integer top-left corner plus width/height.
///
/// Width and height are always positive; a degenerate box cannot be built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x: i32,
    pub y: i32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    pub fn new(x: i32, y: i32, w: u32, h: u32) -> Self {
        assert!(w > 0 && h > 0, "bbox must have positive extent");
        BBox { x, y, w, h }
    }

    /// Box from a center point and extent, rounded to integer pixels.
    pub fn from_center(cx: f64, cy: f64, w: u32, h: u32) -> Self {
        BBox::new(
            (cx - w as f64 / 2.0).round() as i32,
            (cy - h as f64 / 2.0).round() as i32,
            w,
            h,
        )
    }

    pub fn right(&self) -> i32 {
        self.x + self.w as i32
    }

    pub fn bottom(&self) -> i32 {
        self.y + self.h as i32
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn center(&self) -> Point {
        Point::new(
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn intersection_area(&self, other: &BBox) -> u64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        if x1 <= x0 || y1 <= y0 {
            return 0;
        }
        (x1 - x0) as u64 * (y1 - y0) as u64
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.intersection_area(other) > 0
    }

    /// Clamp the box to a `width` x `height` frame; `None` if fully outside.
    pub fn clamp_to(&self, width: u32, height: u32) -> Option<BBox> {
        let x0 = self.x.max(0);
        let y0 = self.y.max(0);
        let x1 = self.right().min(width as i32);
        let y1 = self.bottom().min(height as i32);
        if x1 <= x0 || y1 <= y0 {
            return None;
        }
        Some(BBox::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32))
    }

    /// Grow the box by `margin` pixels on every side, clamped to the frame.
    pub fn dilate(&self, margin: u32, width: u32, height: u32) -> Option<BBox> {
        BBox {
            x: self.x - margin as i32,
            y: self.y - margin as i32,
            w: self.w + 2 * margin,
            h: self.h + 2 * margin,
        }
        .clamp_to(width, height)
    }

    /// True if the box touches the border band of the given frame.
    pub fn touches_edge_band(&self, margin: u32, width: u32, height: u32) -> bool {
        self.x < margin as i32
            || self.y < margin as i32
            || self.right() > width as i32 - margin as i32
            || self.bottom() > height as i32 - margin as i32
    }
}

/// Intersection-over-union of two boxes, in [0, 1].
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Euclidean distance from the box center to a point.
pub fn centroid_distance(b: &BBox, p: Point) -> f64 {
    b.center().distance(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Counts pixels covered per box on a grid; no box arithmetic involved.
    fn iou_by_pixel_enumeration(a: &BBox, b: &BBox) -> f64 {
        let mut inter = 0u64;
        let mut union = 0u64;
        let x0 = a.x.min(b.x);
        let y0 = a.y.min(b.y);
        let x1 = a.right().max(b.right());
        let y1 = a.bottom().max(b.bottom());
        for y in y0..y1 {
            for x in x0..x1 {
                let in_a = x >= a.x && x < a.right() && y >= a.y && y < a.bottom();
                let in_b = x >= b.x && x < b.right() && y >= b.y && y < b.bottom();
                if in_a && in_b {
                    inter += 1;
                }
                if in_a || in_b {
                    union += 1;
                }
            }
        }
        inter as f64 / union as f64
    }

    #[test]
    fn iou_identical_boxes_is_one() {
        let a = BBox::new(3, 4, 10, 12);
        assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn iou_disjoint_boxes_is_zero() {
        let a = BBox::new(0, 0, 5, 5);
        let b = BBox::new(10, 10, 5, 5);
        assert_eq!(iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_half_overlap_matches_hand_computation() {
        // Areas 100 each, intersection 50, union 150.
        let a = BBox::new(0, 0, 10, 10);
        let b = BBox::new(5, 0, 10, 10);
        assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
        assert!((iou(&a, &b) - iou_by_pixel_enumeration(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn centroid_distance_to_own_center_is_zero() {
        let b = BBox::new(2, 2, 6, 8);
        assert_eq!(centroid_distance(&b, b.center()), 0.0);
    }

    #[test]
    fn centroid_distance_three_four_five() {
        let b = BBox::new(0, 0, 2, 2); // center (1, 1)
        assert_eq!(centroid_distance(&b, Point::new(4.0, 5.0)), 5.0);
    }

    #[test]
    fn clamp_to_frame() {
        let b = BBox::new(-5, -5, 20, 20);
        assert_eq!(b.clamp_to(100, 100), Some(BBox::new(0, 0, 15, 15)));
        assert_eq!(BBox::new(200, 200, 4, 4).clamp_to(100, 100), None);
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(
            ax in -20i32..20, ay in -20i32..20, aw in 1u32..15, ah in 1u32..15,
            bx in -20i32..20, by in -20i32..20, bw in 1u32..15, bh in 1u32..15,
        ) {
            let a = BBox::new(ax, ay, aw, ah);
            let b = BBox::new(bx, by, bw, bh);
            let v = iou(&a, &b);
            prop_assert!((v - iou(&b, &a)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-12);
            prop_assert!((v - iou_by_pixel_enumeration(&a, &b)).abs() < 1e-9);
        }

        #[test]
        fn centroid_distance_matches_formula(
            x in -50i32..50, y in -50i32..50, w in 1u32..30, h in 1u32..30,
            px in -100.0f64..100.0, py in -100.0f64..100.0,
        ) {
            let b = BBox::new(x, y, w, h);
            let cx = x as f64 + w as f64 / 2.0;
            let cy = y as f64 + h as f64 / 2.0;
            let expect = ((cx - px).powi(2) + (cy - py).powi(2)).sqrt();
            prop_assert!((centroid_distance(&b, Point::new(px, py)) - expect).abs() < 1e-9);
        }
    }
}
