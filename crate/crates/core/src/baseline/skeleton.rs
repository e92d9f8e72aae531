use image::GrayImage;

/// Zhang-Suen thinning. Foreground is any non-zero pixel; the result is
/// 0/255. Pixels outside the image count as background.
pub fn skeletonize(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut on: Vec<bool> = img.as_raw().iter().map(|&v| v != 0).collect();
    let at = |on: &[bool], x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && on[(y * w + x) as usize];
    let mut removed = Vec::new();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            removed.clear();
            for y in 0..h {
                for x in 0..w {
                    if !on[(y * w + x) as usize] {
                        continue;
                    }
                    // P2..P9 clockwise from north.
                    let n = [
                        at(&on, x, y - 1),
                        at(&on, x + 1, y - 1),
                        at(&on, x + 1, y),
                        at(&on, x + 1, y + 1),
                        at(&on, x, y + 1),
                        at(&on, x - 1, y + 1),
                        at(&on, x - 1, y),
                        at(&on, x - 1, y - 1),
                    ];
                    let b = n.iter().filter(|&&v| v).count();
                    if !(2..=6).contains(&b) {
                        continue;
                    }
                    let a = (0..8).filter(|&i| !n[i] && n[(i + 1) % 8]).count();
                    if a != 1 {
                        continue;
                    }
                    let (p2, p4, p6, p8) = (n[0], n[2], n[4], n[6]);
                    let ok = if pass == 0 {
                        !(p2 && p4 && p6) && !(p4 && p6 && p8)
                    } else {
                        !(p2 && p4 && p8) && !(p2 && p6 && p8)
                    };
                    if ok {
                        removed.push((y * w + x) as usize);
                    }
                }
            }
            for &i in &removed {
                on[i] = false;
            }
            changed |= !removed.is_empty();
        }
        if !changed {
            break;
        }
    }
    GrayImage::from_raw(
        img.width(),
        img.height(),
        on.into_iter().map(|v| if v { 255 } else { 0 }).collect(),
    )
    .expect("buffer sized from input")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(w: u32, h: u32, x0: u32, x1: u32, y0: u32, y1: u32) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| {
            image::Luma([if (x0..x1).contains(&x) && (y0..y1).contains(&y) { 255 } else { 0 }])
        })
    }

    #[test]
    fn vertical_bar_thins_to_centre_column() {
        let sk = skeletonize(&bar(15, 40, 5, 10, 3, 37));
        for y in 8..32 {
            let on: Vec<_> = (0..15).filter(|&x| sk.get_pixel(x, y)[0] != 0).collect();
            assert_eq!(on, vec![7], "row {y}");
        }
    }

    #[test]
    fn empty_stays_empty() {
        let e = GrayImage::new(9, 9);
        assert_eq!(skeletonize(&e), e);
    }

    #[test]
    fn idempotent_and_subset() {
        let mut img = bar(30, 30, 4, 12, 2, 28);
        for y in 10..16 {
            for x in 4..26 {
                img.put_pixel(x, y, image::Luma([255]));
            }
        }
        let once = skeletonize(&img);
        assert_eq!(skeletonize(&once), once);
        assert!(once.pixels().zip(img.pixels()).all(|(s, i)| s[0] == 0 || i[0] != 0));
        assert!(once.pixels().any(|p| p[0] != 0));
    }
}
