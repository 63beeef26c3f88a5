use std::collections::VecDeque;

use super::BinaryMask;
use crate::Result;

fn disk_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut offsets = Vec::new();
    for dr in -r..=r {
        for dc in -r..=r {
            if dr * dr + dc * dc <= r * r {
                offsets.push((dr, dc));
            }
        }
    }
    offsets
}

/// Dilation by a rasterized disk (`dr² + dc² <= radius²`). Radius 0 is the identity.
pub fn morph_dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = mask.dims();
    let offsets = disk_offsets(radius);
    let mut out = BinaryMask::new(w, h);
    for p in mask.iter_true() {
        for &(dr, dc) in &offsets {
            let (r, c) = (p.row as isize + dr, p.col as isize + dc);
            if r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w {
                out.set(r as usize, c as usize, true);
            }
        }
    }
    out
}

/// Erosion by the same disk; pixels beyond the border count as foreground so
/// shapes touching the edge are not eaten from outside.
pub fn morph_erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = mask.dims();
    let offsets = disk_offsets(radius);
    BinaryMask::from_fn(w, h, |r, c| {
        mask.get(r, c)
            && offsets.iter().all(|&(dr, dc)| {
                let (rr, cc) = (r as isize + dr, c as isize + dc);
                rr < 0 || cc < 0 || rr as usize >= h || cc as usize >= w || mask.get(rr as usize, cc as usize)
            })
    })
}

pub fn morph_close(mask: &BinaryMask, radius: usize) -> BinaryMask {
    morph_erode(&morph_dilate(mask, radius), radius)
}

pub fn morph_open(mask: &BinaryMask, radius: usize) -> BinaryMask {
    morph_dilate(&morph_erode(mask, radius), radius)
}

/// Binary reconstruction by dilation: the 8-connected components of `mask`
/// that touch `marker`. The marker is intersected with the mask first.
pub fn morph_reconstruct(marker: &BinaryMask, mask: &BinaryMask) -> Result<BinaryMask> {
    marker.check_same_dims(mask)?;
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    let mut queue = VecDeque::new();
    for p in marker.iter_true() {
        if mask.get(p.row, p.col) && !out.get(p.row, p.col) {
            out.set(p.row, p.col, true);
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                let (r, c) = (p.row as isize + dr, p.col as isize + dc);
                if mask.get_or_false(r, c) && !out.get(r as usize, c as usize) {
                    out.set(r as usize, c as usize, true);
                    queue.push_back(super::PixelCoord::new(r as usize, c as usize));
                }
            }
        }
    }
    Ok(out)
}
