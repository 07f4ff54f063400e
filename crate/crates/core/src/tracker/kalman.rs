//! Constant-velocity Kalman filter over (cx, cy, area, aspect), the state
//! parameterization of the SORT tracker. Aspect ratio carries no velocity.

use crate::geom::BBox;
use nalgebra::{SMatrix, SVector};

type State = SVector<f64, 7>;
type Cov = SMatrix<f64, 7, 7>;
type Meas = SVector<f64, 4>;

fn bbox_to_z(b: &BBox) -> Meas {
    let c = b.center();
    let s = b.w as f64 * b.h as f64;
    let r = b.w as f64 / b.h as f64;
    Meas::new(c.x, c.y, s, r)
}

fn z_to_bbox(z: &Meas) -> BBox {
    let s = z[2].max(1.0);
    let r = z[3].max(1e-6);
    let w = (s * r).sqrt().max(1.0);
    let h = (s / w).max(1.0);
    BBox::new(
        (z[0] - w / 2.0).round() as i32,
        (z[1] - h / 2.0).round() as i32,
        w.round().max(1.0) as u32,
        h.round().max(1.0) as u32,
    )
}

#[derive(Debug, Clone)]
pub struct KalmanBoxFilter {
    x: State,
    p: Cov,
}

impl KalmanBoxFilter {
    pub fn new(bbox: &BBox) -> Self {
        let z = bbox_to_z(bbox);
        let mut x = State::zeros();
        x.fixed_rows_mut::<4>(0).copy_from(&z);
        // High uncertainty on the unobserved velocities.
        let mut p = Cov::identity() * 10.0;
        for i in 4..7 {
            p[(i, i)] = 10000.0;
        }
        KalmanBoxFilter { x, p }
    }

    fn motion() -> Cov {
        let mut f = Cov::identity();
        f[(0, 4)] = 1.0;
        f[(1, 5)] = 1.0;
        f[(2, 6)] = 1.0;
        f
    }

    fn process_noise() -> Cov {
        let mut q = Cov::identity();
        q[(4, 4)] = 0.01;
        q[(5, 5)] = 0.01;
        q[(6, 6)] = 0.0001;
        q
    }

    fn obs() -> SMatrix<f64, 4, 7> {
        let mut h = SMatrix::<f64, 4, 7>::zeros();
        for i in 0..4 {
            h[(i, i)] = 1.0;
        }
        h
    }

    fn meas_noise() -> SMatrix<f64, 4, 4> {
        let mut r = SMatrix::<f64, 4, 4>::identity();
        r[(2, 2)] = 10.0;
        r[(3, 3)] = 10.0;
        r
    }

    /// Advance one frame and return the predicted box.
    pub fn predict(&mut self) -> BBox {
        // Keep the area non-negative.
        if self.x[6] + self.x[2] <= 0.0 {
            self.x[6] = 0.0;
        }
        let f = Self::motion();
        self.x = f * self.x;
        self.p = f * self.p * f.transpose() + Self::process_noise();
        self.bbox()
    }

    pub fn update(&mut self, bbox: &BBox) {
        let h = Self::obs();
        let z = bbox_to_z(bbox);
        let y = z - h * self.x;
        let s = h * self.p * h.transpose() + Self::meas_noise();
        let s_inv = s.try_inverse().expect("innovation covariance is invertible");
        let k = self.p * h.transpose() * s_inv;
        self.x += k * y;
        self.p = (Cov::identity() - k * h) * self.p;
    }

    pub fn bbox(&self) -> BBox {
        z_to_bbox(&self.x.fixed_rows::<4>(0).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::iou;

    #[test]
    fn roundtrip_box_parameterization() {
        let b = BBox::new(10, 20, 8, 16);
        let back = z_to_bbox(&bbox_to_z(&b));
        assert_eq!(b, back);
    }

    #[test]
    fn tracks_constant_velocity_motion() {
        let mut kf = KalmanBoxFilter::new(&BBox::new(0, 50, 10, 20));
        for t in 1..60 {
            kf.predict();
            kf.update(&BBox::new(2 * t, 50, 10, 20));
        }
        let predicted = kf.predict();
        let truth = BBox::new(120, 50, 10, 20);
        assert!(
            iou(&predicted, &truth) > 0.8,
            "predicted {predicted:?} vs truth {truth:?}"
        );
    }
}
