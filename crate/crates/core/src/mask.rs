//! Binary foreground masks and the raster operations the pipeline needs:
//! boolean algebra, 3x3 morphology, box coverage, connected components.

use crate::geom::BBox;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Mask {
            width,
            height,
            bits: vec![false; (width * height) as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        (y * self.width + x) as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let i = self.idx(x, y);
        self.bits[i] = v;
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn same_size(&self, other: &Mask) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn fill_rect(&mut self, b: &BBox) {
        if let Some(c) = b.clamp_to(self.width, self.height) {
            for y in c.y as u32..c.bottom() as u32 {
                for x in c.x as u32..c.right() as u32 {
                    self.set(x, y, true);
                }
            }
        }
    }

    fn zip_with(&self, other: &Mask, f: impl Fn(bool, bool) -> bool) -> Mask {
        assert!(self.same_size(other), "mask size mismatch");
        Mask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn and(&self, other: &Mask) -> Mask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &Mask) -> Mask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn xor(&self, other: &Mask) -> Mask {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn not(&self) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    /// Fraction of the (clamped) box area covered by set pixels.
    pub fn coverage(&self, b: &BBox) -> f64 {
        let Some(c) = b.clamp_to(self.width, self.height) else {
            return 0.0;
        };
        let mut on = 0u64;
        for y in c.y as u32..c.bottom() as u32 {
            for x in c.x as u32..c.right() as u32 {
                if self.get(x, y) {
                    on += 1;
                }
            }
        }
        // Denominator is the original box area: a half-off-frame box is at
        // most half covered.
        on as f64 / b.area() as f64
    }

    fn erode3x3(&self) -> Mask {
        let mut out = Mask::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let mut all = true;
                'probe: for dy in -1i32..=1 {
                    for dx in -1i32..=1 {
                        let nx = x as i32 + dx;
                        let ny = y as i32 + dy;
                        if nx < 0
                            || ny < 0
                            || nx >= self.width as i32
                            || ny >= self.height as i32
                            || !self.get(nx as u32, ny as u32)
                        {
                            all = false;
                            break 'probe;
                        }
                    }
                }
                out.set(x, y, all);
            }
        }
        out
    }

    fn dilate3x3(&self) -> Mask {
        let mut out = Mask::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let mut any = false;
                'probe: for dy in -1i32..=1 {
                    for dx in -1i32..=1 {
                        let nx = x as i32 + dx;
                        let ny = y as i32 + dy;
                        if nx >= 0
                            && ny >= 0
                            && nx < self.width as i32
                            && ny < self.height as i32
                            && self.get(nx as u32, ny as u32)
                        {
                            any = true;
                            break 'probe;
                        }
                    }
                }
                out.set(x, y, any);
            }
        }
        out
    }

    pub fn morph_open(&self) -> Mask {
        self.erode3x3().dilate3x3()
    }

    pub fn morph_close(&self) -> Mask {
        self.dilate3x3().erode3x3()
    }

    /// Bounding boxes of 8-connected foreground components, in scan order.
    pub fn connected_components(&self) -> Vec<BBox> {
        let mut labels = vec![0u32; self.bits.len()];
        let mut boxes = Vec::new();
        let mut stack = Vec::new();
        let mut next = 1u32;
        for sy in 0..self.height {
            for sx in 0..self.width {
                let si = self.idx(sx, sy);
                if !self.bits[si] || labels[si] != 0 {
                    continue;
                }
                let label = next;
                next += 1;
                let (mut x0, mut y0, mut x1, mut y1) = (sx, sy, sx, sy);
                labels[si] = label;
                stack.push((sx, sy));
                while let Some((x, y)) = stack.pop() {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                    for dy in -1i32..=1 {
                        for dx in -1i32..=1 {
                            let nx = x as i32 + dx;
                            let ny = y as i32 + dy;
                            if nx < 0
                                || ny < 0
                                || nx >= self.width as i32
                                || ny >= self.height as i32
                            {
                                continue;
                            }
                            let ni = self.idx(nx as u32, ny as u32);
                            if self.bits[ni] && labels[ni] == 0 {
                                labels[ni] = label;
                                stack.push((nx as u32, ny as u32));
                            }
                        }
                    }
                }
                boxes.push(BBox::new(
                    x0 as i32,
                    y0 as i32,
                    x1 - x0 + 1,
                    y1 - y0 + 1,
                ));
            }
        }
        boxes
    }
}
