use std::collections::VecDeque;
use std::f64::consts::{PI, SQRT_2};

use super::{BinaryMask, PixelCoord, Rect};

/// One 8-connected component of a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Pixels in breadth-first order from the topmost-leftmost pixel.
    pub pixels: Vec<PixelCoord>,
    pub area: usize,
    /// `(row, col)` mean of the pixel positions.
    pub centroid: (f64, f64),
    /// Half-open bounding box.
    pub bbox: Rect,
    /// Length of the traced outer contour (axis steps 1, diagonal steps √2).
    pub perimeter: f64,
    pub circularity: f64,
}

impl Region {
    /// Builds a region from its pixels; the first pixel must be the topmost-leftmost.
    fn from_pixels(pixels: Vec<PixelCoord>) -> Self {
        debug_assert!(!pixels.is_empty());
        let area = pixels.len();
        let (mut sr, mut sc) = (0.0, 0.0);
        let mut bbox = Rect::new(usize::MAX, usize::MAX, 0, 0);
        for p in &pixels {
            sr += p.row as f64;
            sc += p.col as f64;
            bbox.top = bbox.top.min(p.row);
            bbox.left = bbox.left.min(p.col);
            bbox.bottom = bbox.bottom.max(p.row + 1);
            bbox.right = bbox.right.max(p.col + 1);
        }
        let mut region = Region {
            pixels,
            area,
            centroid: (sr / area as f64, sc / area as f64),
            bbox,
            perimeter: 0.0,
            circularity: 1.0,
        };
        region.perimeter = contour_length(&region.contour());
        region.circularity = compactness(area, region.perimeter);
        region
    }

    pub fn centroid_pixel(&self) -> PixelCoord {
        PixelCoord::new(self.centroid.0.round() as usize, self.centroid.1.round() as usize)
    }

    /// Local bitmap over the bounding box with a one-pixel empty border.
    fn local_bitmap(&self) -> BinaryMask {
        let mut local = BinaryMask::new(self.bbox.width() + 2, self.bbox.height() + 2);
        for p in &self.pixels {
            local.set(p.row - self.bbox.top + 1, p.col - self.bbox.left + 1, true);
        }
        local
    }

    /// Closed outer contour in image coordinates.
    pub fn contour(&self) -> Vec<PixelCoord> {
        let local = self.local_bitmap();
        let start = self
            .pixels
            .iter()
            .min_by_key(|p| (p.row, p.col))
            .map(|p| PixelCoord::new(p.row - self.bbox.top + 1, p.col - self.bbox.left + 1))
            .expect("non-empty region");
        trace_contour(&local, start)
            .into_iter()
            .map(|p| PixelCoord::new(p.row + self.bbox.top - 1, p.col + self.bbox.left - 1))
            .collect()
    }

    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        let mut mask = BinaryMask::new(width, height);
        for p in &self.pixels {
            mask.set(p.row, p.col, true);
        }
        mask
    }
}

// anticlockwise on screen, starting east
const DIRS: [(isize, isize); 8] = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];

/// Moore-neighbour trace of the outer boundary of the 8-connected component
/// containing `start`, which must be that component's topmost-leftmost pixel.
///
/// The returned contour is closed implicitly (the last pixel is adjacent to
/// the first). An isolated pixel yields a one-element contour.
pub fn trace_contour(mask: &BinaryMask, start: PixelCoord) -> Vec<PixelCoord> {
    let fg = |r: isize, c: isize| mask.get_or_false(r, c);
    let mut contour = vec![start];
    let mut cur = (start.row as isize, start.col as isize);
    let mut dir = 7usize;
    loop {
        let first = if dir % 2 == 0 { (dir + 7) % 8 } else { (dir + 6) % 8 };
        let next = (0..8).map(|k| (first + k) % 8).find(|&d| fg(cur.0 + DIRS[d].0, cur.1 + DIRS[d].1));
        let Some(d) = next else {
            return contour;
        };
        dir = d;
        cur = (cur.0 + DIRS[d].0, cur.1 + DIRS[d].1);
        contour.push(PixelCoord::new(cur.0 as usize, cur.1 as usize));
        let n = contour.len();
        if n >= 4 && contour[n - 1] == contour[1] && contour[n - 2] == contour[0] {
            contour.truncate(n - 2);
            return contour;
        }
    }
}

fn contour_length(contour: &[PixelCoord]) -> f64 {
    if contour.len() < 2 {
        return 0.0;
    }
    let n = contour.len();
    (0..n)
        .map(|i| {
            let (a, b) = (contour[i], contour[(i + 1) % n]);
            if a.row != b.row && a.col != b.col {
                SQRT_2
            } else {
                1.0
            }
        })
        .sum()
}

fn compactness(area: usize, perimeter: f64) -> f64 {
    if perimeter <= 0.0 {
        return 1.0;
    }
    (4.0 * PI * area as f64 / (perimeter * perimeter)).clamp(0.0, 1.0)
}

/// Isoperimetric compactness `4π·area / perimeter²` in `[0, 1]`, with the
/// perimeter taken from the traced outer contour. A single pixel is 1.0.
pub fn circularity(region: &Region) -> f64 {
    compactness(region.area, contour_length(&region.contour()))
}

/// All 8-connected components of `mask`, largest first (ties keep raster order
/// of their topmost-leftmost pixel).
pub fn connected_components(mask: &BinaryMask) -> Vec<Region> {
    let (w, h) = mask.dims();
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for idx in 0..w * h {
        if !mask.data()[idx] || seen[idx] {
            continue;
        }
        seen[idx] = true;
        queue.push_back(idx);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / w) as isize, (i % w) as isize);
            pixels.push(PixelCoord::new(r as usize, c as usize));
            for (dr, dc) in DIRS {
                let (nr, nc) = (r + dr, c + dc);
                if mask.get_or_false(nr, nc) {
                    let j = nr as usize * w + nc as usize;
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        regions.push(Region::from_pixels(pixels));
    }
    regions.sort_by(|a, b| b.area.cmp(&a.area));
    regions
}

/// Mask of the largest 8-connected component (empty mask for empty input).
pub fn largest_component(mask: &BinaryMask) -> BinaryMask {
    match connected_components(mask).first() {
        Some(region) => region.to_mask(mask.width(), mask.height()),
        None => BinaryMask::new(mask.width(), mask.height()),
    }
}

/// Set every background pixel that is not 4-connected to the image border.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut seed = |r: usize, c: usize, queue: &mut VecDeque<usize>| {
        let i = r * w + c;
        if !mask.data()[i] && !outside[i] {
            outside[i] = true;
            queue.push_back(i);
        }
    };
    for c in 0..w {
        seed(0, c, &mut queue);
        seed(h - 1, c, &mut queue);
    }
    for r in 0..h {
        seed(r, 0, &mut queue);
        seed(r, w - 1, &mut queue);
    }
    while let Some(i) = queue.pop_front() {
        let (r, c) = ((i / w) as isize, (i % w) as isize);
        for (dr, dc) in [(0, 1), (0, -1), (1, 0), (-1, 0)] {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                continue;
            }
            let j = nr as usize * w + nc as usize;
            if !mask.data()[j] && !outside[j] {
                outside[j] = true;
                queue.push_back(j);
            }
        }
    }
    BinaryMask::from_vec(w, h, outside.into_iter().map(|o| !o).collect()).expect("same dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_mask(size: usize, radius: f64) -> BinaryMask {
        let c = (size as f64 - 1.0) / 2.0;
        BinaryMask::from_fn(size, size, |r, col| {
            let (dr, dc) = (r as f64 - c, col as f64 - c);
            dr * dr + dc * dc <= radius * radius
        })
    }

    #[test]
    fn empty_mask_no_regions() {
        assert!(connected_components(&BinaryMask::new(8, 8)).is_empty());
    }

    #[test]
    fn block_region() {
        let mask = BinaryMask::from_fn(30, 30, |r, c| (5..15).contains(&r) && (10..20).contains(&c));
        let regions = connected_components(&mask);
        assert_eq!(regions.len(), 1);
        let reg = &regions[0];
        assert_eq!(reg.area, 100);
        assert_eq!(reg.centroid, (9.5, 14.5));
        assert_eq!(reg.bbox, Rect::new(5, 10, 15, 20));
        // 10x10 square: contour through pixel centers is 36 long
        assert!((reg.perimeter - 36.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_pixels_join() {
        let mut mask = BinaryMask::new(4, 4);
        mask.set(1, 1, true);
        mask.set(2, 2, true);
        let regions = connected_components(&mask);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].area, 2);
    }

    #[test]
    fn sorted_by_area() {
        let mask = BinaryMask::from_fn(20, 20, |r, c| (r < 2 && c < 2) || (r > 10 && c > 10));
        let areas: Vec<_> = connected_components(&mask).iter().map(|r| r.area).collect();
        assert_eq!(areas, vec![81, 4]);
    }

    #[test]
    fn circle_is_circular() {
        let mask = disk_mask(61, 20.0);
        let reg = &connected_components(&mask)[0];
        assert!((0.85..=1.0).contains(&reg.circularity), "{}", reg.circularity);
        assert_eq!(circularity(reg), reg.circularity);
    }

    #[test]
    fn line_is_not_circular() {
        let mask = BinaryMask::from_fn(60, 5, |r, c| r == 2 && (5..55).contains(&c));
        let reg = &connected_components(&mask)[0];
        assert_eq!(reg.area, 50);
        // out-and-back contour of 98 unit steps
        assert!((reg.perimeter - 98.0).abs() < 1e-12);
        let expected = 4.0 * PI * 50.0 / (98.0 * 98.0);
        assert!((reg.circularity - expected).abs() < 1e-12);
        assert!(reg.circularity < 0.3);
    }

    #[test]
    fn single_pixel_circularity_one() {
        let mut mask = BinaryMask::new(3, 3);
        mask.set(1, 1, true);
        let reg = &connected_components(&mask)[0];
        assert_eq!(reg.circularity, 1.0);
        assert_eq!(reg.contour(), vec![PixelCoord::new(1, 1)]);
    }

    #[test]
    fn contour_visits_only_boundary() {
        let mask = disk_mask(41, 12.0);
        let reg = &connected_components(&mask)[0];
        for p in reg.contour() {
            assert!(mask.get(p.row, p.col));
            let interior = DIRS.iter().all(|(dr, dc)| mask.get_or_false(p.row as isize + dr, p.col as isize + dc));
            assert!(!interior, "{p:?} is interior");
        }
    }

    #[test]
    fn fill_holes_ring() {
        let ring = BinaryMask::from_fn(21, 21, |r, c| {
            let d = ((r as f64 - 10.0).powi(2) + (c as f64 - 10.0).powi(2)).sqrt();
            (5.0..8.0).contains(&d)
        });
        let filled = fill_holes(&ring);
        assert!(filled.get(10, 10));
        assert!(!filled.get(0, 0));
        assert!(ring.is_subset_of(&filled));
    }

    #[test]
    fn largest_component_keeps_biggest() {
        let mask = BinaryMask::from_fn(20, 20, |r, c| (r < 3 && c < 3) || (r > 10 && c > 15));
        let big = largest_component(&mask);
        assert_eq!(big.count(), 9 * 4);
        assert!(!big.get(0, 0));
    }
}
