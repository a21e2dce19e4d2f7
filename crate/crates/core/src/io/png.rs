//! PNG carriers for images and masks.
//!
//! Images are 8-bit RGB; masks are 8-bit grayscale with foreground 255 and
//! background 0 for visual inspectability, binarised at load.

use std::io::Cursor;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::Result;
use crate::imaging::{BinaryMask, RasterImage};
use crate::io::atomic::atomic_write;

pub fn read_image(path: &Path) -> Result<RasterImage<f64>> {
    let rgb = ImageReader::open(path)?.decode()?.to_rgb8();
    let (width, height) = (rgb.width() as usize, rgb.height() as usize);
    RasterImage::from_fn(width, height, |x, y| {
        let px = rgb.get_pixel(x as u32, y as u32);
        [
            px.0[0] as f64 / 255.0,
            px.0[1] as f64 / 255.0,
            px.0[2] as f64 / 255.0,
        ]
    })
}

pub fn encode_image_png(image: &RasterImage<f64>) -> Result<Vec<u8>> {
    let (width, height) = image.dims();
    let mut raw = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            for v in image.pixel(x, y) {
                raw.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
    }
    let mut bytes = Vec::new();
    PngEncoder::new(Cursor::new(&mut bytes)).write_image(
        &raw,
        width as u32,
        height as u32,
        ExtendedColorType::Rgb8,
    )?;
    Ok(bytes)
}

pub fn write_image(path: &Path, image: &RasterImage<f64>) -> Result<()> {
    atomic_write(path, &encode_image_png(image)?)
}

/// Reads a mask, treating any value of 128 or above as foreground.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let gray = ImageReader::open(path)?.decode()?.to_luma8();
    let (width, height) = (gray.width() as usize, gray.height() as usize);
    BinaryMask::from_fn(width, height, |x, y| gray.get_pixel(x as u32, y as u32).0[0] >= 128)
}

pub fn encode_mask_png(mask: &BinaryMask) -> Result<Vec<u8>> {
    let (width, height) = mask.dims();
    let raw: Vec<u8> = mask
        .data()
        .iter()
        .map(|&v| if v { 255 } else { 0 })
        .collect();
    let mut bytes = Vec::new();
    PngEncoder::new(Cursor::new(&mut bytes)).write_image(
        &raw,
        width as u32,
        height as u32,
        ExtendedColorType::L8,
    )?;
    Ok(bytes)
}

pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    atomic_write(path, &encode_mask_png(mask)?)
}
