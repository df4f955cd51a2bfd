//! RGB images as pure quaternion matrices, plus PNG / binary PPM file I/O.

use std::fs;
use std::io::Write;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};
use crate::matrix::QuaternionMatrix;

/// Three real channel planes, row-major, values in `[0, 255]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage {
    height: usize,
    width: usize,
    r: Vec<f64>,
    g: Vec<f64>,
    b: Vec<f64>,
}

impl RgbImage {
    pub fn new(height: usize, width: usize, r: Vec<f64>, g: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::shape(format!("image extents must be positive, got {height}x{width}")));
        }
        let n = height * width;
        if r.len() != n || g.len() != n || b.len() != n {
            return Err(Error::shape(format!(
                "channel lengths {}, {}, {} do not match {height}x{width}",
                r.len(),
                g.len(),
                b.len()
            )));
        }
        if let Some(v) = r.iter().chain(&g).chain(&b).find(|v| !(0.0..=255.0).contains(*v)) {
            return Err(Error::Parameter(format!("pixel value {v} outside [0, 255]")));
        }
        Ok(Self { height, width, r, g, b })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Result<Self> {
        let n = height * width;
        let (mut r, mut g, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for row in 0..height {
            for col in 0..width {
                let [pr, pg, pb] = f(row, col);
                r.push(pr);
                g.push(pg);
                b.push(pb);
            }
        }
        Self::new(height, width, r, g, b)
    }

    pub fn filled(height: usize, width: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_fn(height, width, |_, _| rgb)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn channels(&self) -> [&[f64]; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        let i = row * self.width + col;
        [self.r[i], self.g[i], self.b[i]]
    }

    /// Channel values rounded to the nearest integer, as written to 8-bit files.
    pub fn quantize(&self) -> Self {
        let q = |v: &Vec<f64>| v.iter().map(|x| x.round()).collect();
        Self { r: q(&self.r), g: q(&self.g), b: q(&self.b), ..*self }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "images are {}x{} and {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        let diff = self
            .channels()
            .iter()
            .zip(other.channels())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        Ok(diff)
    }

    fn to_bytes(&self) -> Vec<u8> {
        (0..self.height * self.width)
            .flat_map(|i| [self.r[i], self.g[i], self.b[i]])
            .map(|v| v.round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    fn from_bytes(height: usize, width: usize, bytes: &[u8]) -> Result<Self> {
        let channel = |c: usize| bytes.iter().skip(c).step_by(3).map(|&v| f64::from(v)).collect();
        Self::new(height, width, channel(0), channel(1), channel(2))
    }
}

/// Pixel `(R, G, B)` becomes `R·i + G·j + B·k`.
pub fn encode_rgb(img: &RgbImage) -> QuaternionMatrix {
    let n = img.r.len();
    QuaternionMatrix::from_planes(img.height, img.width, vec![0.0; n], img.r.clone(), img.g.clone(), img.b.clone())
        .expect("channel planes match image extents")
}

/// Reads channels from the i, j, k parts, drops the real part and clamps to `[0, 255]`.
pub fn decode(q: &QuaternionMatrix) -> Result<RgbImage> {
    let (_, x, y, z) = q.planes();
    let clamp = |p: &[f64]| p.iter().map(|v| v.clamp(0.0, 255.0)).collect();
    RgbImage::new(q.rows(), q.cols(), clamp(x), clamp(y), clamp(z))
}

/// Reads an 8-bit RGB PNG or binary PPM (P6). Images with alpha are rejected.
pub fn read_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
    let format = image::guess_format(&bytes).map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
    let img = image::load_from_memory_with_format(&bytes, format)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
    let rgb = match img {
        DynamicImage::ImageRgb8(rgb) => rgb,
        DynamicImage::ImageLuma8(_) => img.to_rgb8(),
        other if other.color().has_alpha() => {
            return Err(Error::Image(format!(
                "{}: images with an alpha channel are not supported",
                path.display()
            )))
        }
        other => {
            return Err(Error::Image(format!(
                "{}: unsupported pixel format {:?}, expected 8-bit RGB",
                path.display(),
                other.color()
            )))
        }
    };
    RgbImage::from_bytes(rgb.height() as usize, rgb.width() as usize, rgb.as_raw())
}

/// Writes an 8-bit image; `.ppm` / `.pnm` produce binary P6, anything else PNG.
pub fn write_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = img.to_bytes();
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    if matches!(ext.as_deref(), Some("ppm" | "pnm")) {
        let mut f = fs::File::create(path)?;
        write!(f, "P6\n{} {}\n255\n", img.width, img.height)?;
        f.write_all(&bytes)?;
        return Ok(());
    }
    let buf = image::RgbImage::from_raw(img.width as u32, img.height as u32, bytes)
        .ok_or_else(|| Error::Image("pixel buffer does not match image extents".into()))?;
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}
