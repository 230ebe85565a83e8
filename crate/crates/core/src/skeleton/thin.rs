use super::{SkeletonRaster, N8};
use crate::raster::{Grid, RasterMask};

/// Two-subiteration thinning of the interior class to a 1-pixel skeleton.
///
/// Each subiteration collects directional candidates from a snapshot, then
/// deletes them one by one, re-checking on the live raster that the pixel is
/// still 8-simple and not an end point. A final sweep removes any remaining
/// simple pixel with two or more neighbours (staircase corners, 2×2 blocks).
pub fn thin(mask: &RasterMask) -> SkeletonRaster {
    let (w, h) = (mask.width(), mask.height());
    let mut bits = mask.interior_bits();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            let candidates: Vec<usize> = (0..w * h)
                .filter(|&i| bits[i] && is_candidate(&bits, w, h, i, pass))
                .collect();
            for i in candidates {
                let nb = neighbours(&bits, w, h, i);
                if deletable(&nb) {
                    bits[i] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    loop {
        let mut changed = false;
        for i in 0..w * h {
            if bits[i] && deletable(&neighbours(&bits, w, h, i)) {
                bits[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    SkeletonRaster::from_bits(w, h, bits, mask.transform).expect("mask dimensions are valid")
}

fn neighbours(bits: &[bool], w: usize, h: usize, i: usize) -> [bool; 8] {
    let (c, r) = ((i % w) as i64, (i / w) as i64);
    let mut nb = [false; 8];
    for (k, (dc, dr)) in N8.iter().enumerate() {
        let (cc, rr) = (c + dc, r + dr);
        nb[k] = cc >= 0 && rr >= 0 && cc < w as i64 && rr < h as i64 && bits[rr as usize * w + cc as usize];
    }
    nb
}

fn is_candidate(bits: &[bool], w: usize, h: usize, i: usize, pass: usize) -> bool {
    let p = neighbours(bits, w, h, i);
    let b = p.iter().filter(|&&x| x).count();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count();
    if a != 1 {
        return false;
    }
    // p[0]=N, p[2]=E, p[4]=S, p[6]=W
    if pass == 0 {
        !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6])
    } else {
        !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6])
    }
}

/// Simple and not an end point.
fn deletable(nb: &[bool; 8]) -> bool {
    nb.iter().filter(|&&x| x).count() >= 2 && is_simple(nb)
}

/// 8-simple point test: one foreground 8-component in the neighbourhood and
/// one background 4-component that is 4-adjacent to the center.
pub(crate) fn is_simple(nb: &[bool; 8]) -> bool {
    fg_components(nb) == 1 && bg_components_touching(nb) == 1
}

fn fg_components(nb: &[bool; 8]) -> usize {
    // Foreground 8-adjacency inside N8: ring neighbours, plus the two
    // neighbours of an edge pixel (k even) at distance 2 on the ring.
    let adj = |a: usize, b: usize| -> bool {
        let d = (a + 8 - b) % 8;
        d == 1 || d == 7 || (a % 2 == 0 && b % 2 == 0 && (d == 2 || d == 6))
    };
    count_components(nb, true, adj)
}

fn bg_components_touching(nb: &[bool; 8]) -> usize {
    // Background 4-adjacency inside N8: only consecutive ring entries.
    let adj = |a: usize, b: usize| -> bool {
        let d = (a + 8 - b) % 8;
        d == 1 || d == 7
    };
    let mut label = [usize::MAX; 8];
    let mut n = 0;
    for s in 0..8 {
        if nb[s] || label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = n;
        while let Some(a) = stack.pop() {
            for b in 0..8 {
                if !nb[b] && label[b] == usize::MAX && adj(a, b) {
                    label[b] = n;
                    stack.push(b);
                }
            }
        }
        n += 1;
    }
    let mut touching = std::collections::BTreeSet::new();
    for k in (0..8).step_by(2) {
        if !nb[k] {
            touching.insert(label[k]);
        }
    }
    touching.len()
}

fn count_components(nb: &[bool; 8], want: bool, adj: impl Fn(usize, usize) -> bool) -> usize {
    let mut seen = [false; 8];
    let mut n = 0;
    for s in 0..8 {
        if nb[s] != want || seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(a) = stack.pop() {
            for b in 0..8 {
                if nb[b] == want && !seen[b] && adj(a, b) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        n += 1;
    }
    n
}
