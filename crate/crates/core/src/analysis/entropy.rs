use crate::error::{Error, Result};

/// Joint entropy, in bits, of (pixel, rounded 3×3 neighbourhood mean) pairs.
///
/// `pixels` is row-major with `width` columns. The neighbourhood mean
/// excludes the centre and counts only cells that fall inside the image.
pub fn entropy_2d(pixels: &[u8], width: usize, height: usize) -> Result<f64> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidArgument(format!(
            "entropy needs at least a 2x2 image, got {}x{}",
            width, height
        )));
    }
    if pixels.len() != width * height {
        return Err(Error::Shape(format!(
            "{} pixels for a {}x{} image",
            pixels.len(),
            width,
            height
        )));
    }
    let mut counts = vec![0u32; 256 * 256];
    for y in 0..height {
        for x in 0..width {
            let mut sum = 0u32;
            let mut cells = 0u32;
            for ny in y.saturating_sub(1)..=(y + 1).min(height - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(width - 1) {
                    sum += pixels[ny * width + nx] as u32;
                    cells += 1;
                }
            }
            let centre = pixels[y * width + x];
            let mean = ((sum - centre as u32) as f64 / (cells - 1) as f64).round() as usize;
            counts[centre as usize * 256 + mean] += 1;
        }
    }
    let n = (width * height) as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}
