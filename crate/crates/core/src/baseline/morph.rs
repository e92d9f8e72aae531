use image::GrayImage;

/// Square dilation followed by square erosion, radius `r`. Pixels outside
/// the image are background for dilation and foreground for erosion, so
/// regions touching the border are not eaten away.
pub fn close(img: &GrayImage, r: u32) -> GrayImage {
    if r == 0 {
        return img.clone();
    }
    let d = extremum(img, r, true);
    extremum(&d, r, false)
}

/// Separable running max (`max = true`) or min over a `(2r+1)^2` window.
fn extremum(img: &GrayImage, r: u32, max: bool) -> GrayImage {
    let (w, h) = img.dimensions();
    let pick = |a: u8, b: u8| if max { a.max(b) } else { a.min(b) };
    let pad = if max { 0 } else { 255 };
    let mut tmp = GrayImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let (lo, hi) = (x as i64 - r as i64, x as i64 + r as i64);
            let mut v = if lo < 0 || hi >= w as i64 { pad } else { img.get_pixel(x, y)[0] };
            for xx in lo.max(0)..=hi.min(w as i64 - 1) {
                v = pick(v, img.get_pixel(xx as u32, y)[0]);
            }
            tmp.put_pixel(x, y, image::Luma([v]));
        }
    }
    let mut out = GrayImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let (lo, hi) = (y as i64 - r as i64, y as i64 + r as i64);
            let mut v = if lo < 0 || hi >= h as i64 { pad } else { tmp.get_pixel(x, y)[0] };
            for yy in lo.max(0)..=hi.min(h as i64 - 1) {
                v = pick(v, tmp.get_pixel(x, yy as u32)[0]);
            }
            out.put_pixel(x, y, image::Luma([v]));
        }
    }
    out
}

/// Fill background regions not 4-connected to the image border.
pub fn fill_holes(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raw = img.as_raw();
    let mut outside = vec![false; w * h];
    let mut stack: Vec<usize> = Vec::new();
    for x in 0..w {
        stack.push(x);
        stack.push((h - 1) * w + x);
    }
    for y in 0..h {
        stack.push(y * w);
        stack.push(y * w + w - 1);
    }
    while let Some(i) = stack.pop() {
        if i >= w * h || outside[i] || raw[i] != 0 {
            continue;
        }
        outside[i] = true;
        let (x, y) = (i % w, i / w);
        if x > 0 {
            stack.push(i - 1);
        }
        if x + 1 < w {
            stack.push(i + 1);
        }
        if y > 0 {
            stack.push(i - w);
        }
        if y + 1 < h {
            stack.push(i + w);
        }
    }
    let data = outside.iter().map(|&o| if o { 0 } else { 255 }).collect();
    GrayImage::from_raw(img.width(), img.height(), data).expect("buffer sized from input")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closing_bridges_gaps_and_keeps_extent() {
        let mut img = GrayImage::new(20, 5);
        for x in (2..8).chain(10..16) {
            img.put_pixel(x, 2, image::Luma([255]));
        }
        let c = close(&img, 1);
        let on: Vec<_> = (0..20).filter(|&x| c.get_pixel(x, 2)[0] == 255).collect();
        assert_eq!(on, (2..16).collect::<Vec<_>>());
        assert!((0..20).all(|x| c.get_pixel(x, 0)[0] == 0));
    }

    #[test]
    fn holes_are_filled() {
        let img = GrayImage::from_fn(9, 9, |x, y| {
            let ring = (2..=6).contains(&x) && (2..=6).contains(&y) && !((3..=5).contains(&x) && (3..=5).contains(&y));
            image::Luma([if ring { 255 } else { 0 }])
        });
        let f = fill_holes(&img);
        assert_eq!(f.get_pixel(4, 4)[0], 255);
        assert_eq!(f.get_pixel(0, 0)[0], 0);
        assert_eq!(f.pixels().filter(|p| p[0] == 255).count(), 25);
    }
}
