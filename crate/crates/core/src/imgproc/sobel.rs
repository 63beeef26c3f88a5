use super::GrayImage;
use crate::{Error, Result};

/// Per-pixel 3×3 Sobel responses.
///
/// `gx` is positive where intensity increases with the column index
/// (dark left, bright right); `gy` is positive where it increases with the
/// row index (dark top, bright bottom). A full 0→255 step gives ±1020.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<i32>,
    pub gy: Vec<i32>,
}

impl GradientField {
    #[inline]
    pub fn gx_at(&self, row: usize, col: usize) -> i32 {
        self.gx[row * self.width + col]
    }

    #[inline]
    pub fn gy_at(&self, row: usize, col: usize) -> i32 {
        self.gy[row * self.width + col]
    }

    /// Projection of the gradient onto the unit vector `(cos, sin)`.
    #[inline]
    pub fn project(&self, row: usize, col: usize, dir: (f64, f64)) -> f64 {
        let i = row * self.width + col;
        self.gx[i] as f64 * dir.0 + self.gy[i] as f64 * dir.1
    }

    pub fn magnitude(&self, row: usize, col: usize) -> f64 {
        let i = row * self.width + col;
        (self.gx[i] as f64).hypot(self.gy[i] as f64)
    }
}

/// Sobel gradients with replicate padding at the border.
pub fn sobel(img: &GrayImage) -> Result<GradientField> {
    let (w, h) = img.dims();
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall { width: w, height: h, min: 3 });
    }
    let mut gx = vec![0i32; w * h];
    let mut gy = vec![0i32; w * h];
    for r in 0..h {
        let up = r.saturating_sub(1);
        let down = (r + 1).min(h - 1);
        for c in 0..w {
            let left = c.saturating_sub(1);
            let right = (c + 1).min(w - 1);
            let p = |rr: usize, cc: usize| img.get(rr, cc) as i32;
            let (tl, t, tr) = (p(up, left), p(up, c), p(up, right));
            let (ml, mr) = (p(r, left), p(r, right));
            let (bl, b, br) = (p(down, left), p(down, c), p(down, right));
            gx[r * w + c] = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
            gy[r * w + c] = (bl + 2 * b + br) - (tl + 2 * t + tr);
        }
    }
    Ok(GradientField { width: w, height: h, gx, gy })
}

/// `(cos, sin)` of an angle in degrees, exact at multiples of 90°.
pub fn unit_vector(angle_deg: f64) -> (f64, f64) {
    let a = angle_deg.rem_euclid(360.0);
    if a == 0.0 {
        (1.0, 0.0)
    } else if a == 90.0 {
        (0.0, 1.0)
    } else if a == 180.0 {
        (-1.0, 0.0)
    } else if a == 270.0 {
        (0.0, -1.0)
    } else {
        let rad = a.to_radians();
        (rad.cos(), rad.sin())
    }
}

/// `gx·cos(angle) + gy·sin(angle)` for every pixel.
pub fn directional_gradient(field: &GradientField, angle_deg: f64) -> Vec<f64> {
    let (c, s) = unit_vector(angle_deg);
    field.gx.iter().zip(&field.gy).map(|(&x, &y)| x as f64 * c + y as f64 * s).collect()
}
