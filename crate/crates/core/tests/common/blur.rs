use qhosvd::RgbImage;

/// Separable Gaussian blur, kernel radius `ceil(3σ)`, replicated edges.
pub fn gaussian_blur(img: &RgbImage, sigma: f64) -> RgbImage {
    let radius = (3.0 * sigma).ceil() as isize;
    let weights: Vec<f64> = (-radius..=radius).map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let (h, w) = img.shape();
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let pass = |src: &dyn Fn(usize, usize) -> [f64; 3], horizontal: bool| -> Vec<[f64; 3]> {
        let mut out = vec![[0.0; 3]; h * w];
        for r in 0..h {
            for c in 0..w {
                let mut acc = [0.0; 3];
                for (t, wt) in weights.iter().enumerate() {
                    let d = t as isize - radius;
                    let p = if horizontal {
                        src(r, clamp(c as isize + d, w))
                    } else {
                        src(clamp(r as isize + d, h), c)
                    };
                    for ch in 0..3 {
                        acc[ch] += wt * p[ch];
                    }
                }
                out[r * w + c] = acc;
            }
        }
        out
    };
    let rows = pass(&|r, c| img.pixel(r, c), true);
    let both = pass(&|r, c| rows[r * w + c], false);
    RgbImage::from_fn(h, w, |r, c| both[r * w + c]).unwrap().quantize()
}

/// Sources blurred on the left and right half respectively.
pub fn complementary_pair(truth: &RgbImage, sigma: f64) -> (RgbImage, RgbImage) {
    let blurred = gaussian_blur(truth, sigma);
    let (h, w) = truth.shape();
    let half = w / 2;
    let pick = |left_blurred: bool| {
        RgbImage::from_fn(h, w, |r, c| {
            if (c < half) == left_blurred {
                blurred.pixel(r, c)
            } else {
                truth.pixel(r, c)
            }
        })
        .unwrap()
    };
    (pick(true), pick(false))
}
