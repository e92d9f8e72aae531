/// Visit every pixel of a `width x height` grid whose centre lies inside the
/// triangle `p` (pixel coordinates, either winding). Degenerate triangles
/// cover nothing.
pub fn for_each_covered(p: [[f64; 2]; 3], width: usize, height: usize, mut f: impl FnMut(usize, usize)) {
    let area = edge(p[0], p[1], p[2]);
    if area == 0.0 || !area.is_finite() {
        return;
    }
    let sign = area.signum();
    let min_x = p.iter().map(|q| q[0]).fold(f64::INFINITY, f64::min);
    let max_x = p.iter().map(|q| q[0]).fold(f64::NEG_INFINITY, f64::max);
    let min_y = p.iter().map(|q| q[1]).fold(f64::INFINITY, f64::min);
    let max_y = p.iter().map(|q| q[1]).fold(f64::NEG_INFINITY, f64::max);
    let x0 = (min_x - 0.5).ceil().max(0.0);
    let x1 = (max_x - 0.5).floor().min(width as f64 - 1.0);
    let y0 = (min_y - 0.5).ceil().max(0.0);
    let y1 = (max_y - 0.5).floor().min(height as f64 - 1.0);
    if x0 > x1 || y0 > y1 {
        return;
    }
    for y in y0 as usize..=y1 as usize {
        let cy = y as f64 + 0.5;
        for x in x0 as usize..=x1 as usize {
            let c = [x as f64 + 0.5, cy];
            let w0 = edge(p[1], p[2], c) * sign;
            let w1 = edge(p[2], p[0], c) * sign;
            let w2 = edge(p[0], p[1], c) * sign;
            if w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0 {
                f(x, y);
            }
        }
    }
}

fn edge(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_half_of_a_square() {
        let mut n = 0;
        for_each_covered([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], 10, 10, |_, _| n += 1);
        // Centres with x + y <= 10 (x, y in 0.5..9.5): 55 of 100.
        assert_eq!(n, 55);
        let mut m = 0;
        for_each_covered([[0.0, 0.0], [0.0, 10.0], [10.0, 0.0]], 10, 10, |_, _| m += 1);
        assert_eq!(m, n);
    }

    #[test]
    fn clips_to_the_grid() {
        let mut n = 0;
        for_each_covered([[-50.0, -50.0], [60.0, -50.0], [-50.0, 60.0]], 4, 4, |x, y| {
            assert!(x < 4 && y < 4);
            n += 1;
        });
        assert_eq!(n, 16);
    }
}
