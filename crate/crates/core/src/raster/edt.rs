/// Euclidean distance (in pixels) from each pixel center to the nearest
/// background (`false`) pixel center; background pixels get 0. Pixels outside
/// the raster are not background. Returns `f64::INFINITY` everywhere when the
/// raster has no background at all.
pub fn distance_to_background(fg: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(fg.len(), width * height);
    const INF: f64 = 1e20;
    let mut grid: Vec<f64> = fg.iter().map(|&f| if f { INF } else { 0.0 }).collect();
    let mut buf = vec![0.0; width.max(height)];
    let mut out = vec![0.0; width.max(height)];
    for c in 0..width {
        for r in 0..height {
            buf[r] = grid[r * width + c];
        }
        edt_1d(&buf[..height], &mut out[..height]);
        for r in 0..height {
            grid[r * width + c] = out[r];
        }
    }
    for r in 0..height {
        let row = &mut grid[r * width..(r + 1) * width];
        buf[..width].copy_from_slice(row);
        edt_1d(&buf[..width], &mut out[..width]);
        row.copy_from_slice(&out[..width]);
    }
    grid.into_iter()
        .map(|d| if d >= INF / 2.0 { f64::INFINITY } else { d.sqrt() })
        .collect()
}

/// Lower envelope of parabolas (Felzenszwalb & Huttenlocher), squared distances.
fn edt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let sep = |p: usize| {
            ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
        };
        let mut s = sep(v[k]);
        while s <= z[k] {
            k -= 1;
            s = sep(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dx = q as f64 - p as f64;
        *dq = dx * dx + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(fg: &[bool], w: usize, h: usize) -> Vec<f64> {
        (0..w * h)
            .map(|i| {
                let (c, r) = ((i % w) as f64, (i / w) as f64);
                (0..w * h)
                    .filter(|&j| !fg[j])
                    .map(|j| ((j % w) as f64 - c).hypot((j / w) as f64 - r))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn single_background_pixel() {
        let mut fg = vec![true; 25];
        fg[12] = false;
        let d = distance_to_background(&fg, 5, 5);
        assert_eq!(d[12], 0.0);
        assert!((d[0] - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn all_foreground_is_infinite() {
        assert!(distance_to_background(&[true; 6], 3, 2).iter().all(|d| d.is_infinite()));
    }

    proptest! {
        #[test]
        fn matches_brute_force(w in 1usize..12, h in 1usize..12, bits in prop::collection::vec(prop::bool::weighted(0.8), 144)) {
            let fg = &bits[..w * h];
            let fast = distance_to_background(fg, w, h);
            let slow = brute(fg, w, h);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() < 1e-9 || (a.is_infinite() && b.is_infinite()));
            }
        }
    }
}
