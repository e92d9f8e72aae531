use crate::rng;

/// Smoothed value noise on a unit lattice, in `[0, 1]`.
pub fn value_noise(seed: u64, x: f64, y: f64) -> f64 {
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (smooth(x - x0), smooth(y - y0));
    let (ix, iy) = (x0 as i64, y0 as i64);
    let a = rng::lattice_unit(seed, ix, iy);
    let b = rng::lattice_unit(seed, ix + 1, iy);
    let c = rng::lattice_unit(seed, ix, iy + 1);
    let d = rng::lattice_unit(seed, ix + 1, iy + 1);
    let top = a + (b - a) * fx;
    let bottom = c + (d - c) * fx;
    top + (bottom - top) * fy
}

/// Fractal sum of `octaves` value-noise layers, normalised to `[0, 1]`.
pub fn fbm(seed: u64, x: f64, y: f64, octaves: u32) -> f64 {
    let mut sum = 0.0;
    let mut norm = 0.0;
    let mut amp = 1.0;
    let mut freq = 1.0;
    for o in 0..octaves.max(1) {
        sum += amp * value_noise(rng::derive(seed, &[o as u64]), x * freq, y * freq);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    sum / norm
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_bounded_and_continuous() {
        for i in 0..1000 {
            let x = i as f64 * 0.037 - 10.0;
            let y = i as f64 * 0.011 + 3.0;
            let n = fbm(9, x, y, 5);
            assert!((0.0..=1.0).contains(&n));
            let m = fbm(9, x + 1e-6, y, 5);
            assert!((n - m).abs() < 1e-4);
        }
    }

    #[test]
    fn lattice_points_take_lattice_values() {
        assert_eq!(value_noise(4, 3.0, -2.0), rng::lattice_unit(4, 3, -2));
    }
}
