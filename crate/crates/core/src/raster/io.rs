use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, ImageReader, Luma, Rgb, Rgba};

use super::{GeoTransform, Grid, ImageRaster, Legend, LulcRaster, MaskClass, RasterMask};
use crate::error::{Error, Result};

/// Parse a 6-line world file: A (pixel width), D, B (rotations), E (pixel
/// height), C, F (center of the upper-left pixel).
pub fn read_world_file(path: impl AsRef<Path>) -> Result<GeoTransform> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != 6 {
        return Err(Error::WorldFile(format!(
            "{}: expected 6 lines, found {}",
            path.display(),
            lines.len()
        )));
    }
    let mut v = [0.0; 6];
    for (i, l) in lines.iter().enumerate() {
        v[i] = l.trim().parse::<f64>().map_err(|_| {
            Error::WorldFile(format!("{}: line {} is not a number: {l:?}", path.display(), i + 1))
        })?;
    }
    let t = GeoTransform {
        pixel_width: v[0],
        rot_y: v[1],
        rot_x: v[2],
        pixel_height: v[3],
        origin_x: v[4],
        origin_y: v[5],
    };
    t.validate()
        .map_err(|e| Error::WorldFile(format!("{}: {e}", path.display())))?;
    Ok(t)
}

pub fn write_world_file(path: impl AsRef<Path>, t: &GeoTransform) -> Result<()> {
    let path = path.as_ref();
    let text = format!(
        "{:?}\n{:?}\n{:?}\n{:?}\n{:?}\n{:?}\n",
        t.pixel_width, t.rot_y, t.rot_x, t.pixel_height, t.origin_x, t.origin_y
    );
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn open_image(path: &Path) -> Result<DynamicImage> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}

fn format_for(path: &Path) -> Result<ImageFormat> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("png") => Ok(ImageFormat::Png),
        Some("pgm" | "ppm" | "pnm") => Ok(ImageFormat::Pnm),
        _ => Err(Error::Image(format!(
            "{}: unsupported extension (use .png or .pgm/.ppm)",
            path.display()
        ))),
    }
}

fn save(img: DynamicImage, path: &Path) -> Result<()> {
    let fmt = format_for(path)?;
    img.save_with_format(path, fmt)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}

/// Read a single-band 8-bit mask plus its world file.
pub fn load_mask(pixel_path: impl AsRef<Path>, worldfile_path: impl AsRef<Path>) -> Result<RasterMask> {
    let pixel_path = pixel_path.as_ref();
    let transform = read_world_file(worldfile_path)?;
    let img = match open_image(pixel_path)? {
        DynamicImage::ImageLuma8(b) => b,
        other => {
            return Err(Error::Image(format!(
                "{}: mask must be single-band 8-bit, found {:?}",
                pixel_path.display(),
                other.color()
            )))
        }
    };
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut labels = Vec::with_capacity(w * h);
    for (i, &v) in img.as_raw().iter().enumerate() {
        labels.push(MaskClass::try_from(v).map_err(|value| Error::LabelOutOfRange {
            value,
            col: i % w,
            row: i / w,
        })?);
    }
    RasterMask::from_labels(w, h, labels, transform)
}

pub fn write_mask(
    mask: &RasterMask,
    pixel_path: impl AsRef<Path>,
    worldfile_path: impl AsRef<Path>,
) -> Result<()> {
    let raw: Vec<u8> = mask.labels().iter().map(|&c| c as u8).collect();
    let buf: ImageBuffer<Luma<u8>, _> =
        ImageBuffer::from_raw(mask.width() as u32, mask.height() as u32, raw)
            .expect("buffer sized from mask");
    save(DynamicImage::ImageLuma8(buf), pixel_path.as_ref())?;
    write_world_file(worldfile_path, &mask.transform)
}

/// Read RGB or RGB-NIR imagery; a fourth (alpha) channel is taken as NIR.
pub fn load_image(pixel_path: impl AsRef<Path>, worldfile_path: impl AsRef<Path>) -> Result<ImageRaster> {
    let pixel_path = pixel_path.as_ref();
    let transform = read_world_file(worldfile_path)?;
    let img = open_image(pixel_path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (raw, nb, depth): (Vec<u16>, usize, u8) = match img {
        DynamicImage::ImageRgb8(b) => (b.into_raw().into_iter().map(u16::from).collect(), 3, 8),
        DynamicImage::ImageRgba8(b) => (b.into_raw().into_iter().map(u16::from).collect(), 4, 8),
        DynamicImage::ImageRgb16(b) => (b.into_raw(), 3, 16),
        DynamicImage::ImageRgba16(b) => (b.into_raw(), 4, 16),
        other => {
            return Err(Error::Image(format!(
                "{}: imagery must have 3 or 4 bands, found {:?}",
                pixel_path.display(),
                other.color()
            )))
        }
    };
    let bands = (0..nb)
        .map(|b| raw.iter().skip(b).step_by(nb).copied().collect())
        .collect();
    ImageRaster::new(w, h, bands, depth, transform)
}

pub fn write_image(
    img: &ImageRaster,
    pixel_path: impl AsRef<Path>,
    worldfile_path: impl AsRef<Path>,
) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let n = img.width() * img.height();
    let nb = img.band_count();
    let mut raw = Vec::with_capacity(n * nb);
    for i in 0..n {
        for b in 0..nb {
            raw.push(img.band(b)[i]);
        }
    }
    let dynimg = match (nb, img.bit_depth <= 8) {
        (3, true) => DynamicImage::ImageRgb8(
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw.iter().map(|&v| v as u8).collect()).unwrap(),
        ),
        (4, true) => DynamicImage::ImageRgba8(
            ImageBuffer::<Rgba<u8>, _>::from_raw(w, h, raw.iter().map(|&v| v as u8).collect()).unwrap(),
        ),
        (3, false) => DynamicImage::ImageRgb16(ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, raw).unwrap()),
        _ => DynamicImage::ImageRgba16(ImageBuffer::<Rgba<u16>, _>::from_raw(w, h, raw).unwrap()),
    };
    save(dynimg, pixel_path.as_ref())?;
    write_world_file(worldfile_path, &img.transform)
}

pub fn read_legend(path: impl AsRef<Path>) -> Result<Legend> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let legend: Legend = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(legend)
}

/// Read a land-cover label raster (8- or 16-bit single band) with its legend.
pub fn load_lulc(
    pixel_path: impl AsRef<Path>,
    worldfile_path: impl AsRef<Path>,
    legend_path: impl AsRef<Path>,
) -> Result<LulcRaster> {
    let pixel_path = pixel_path.as_ref();
    let transform = read_world_file(worldfile_path)?;
    let legend = read_legend(legend_path)?;
    let img = open_image(pixel_path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let labels: Vec<u16> = match img {
        DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(u16::from).collect(),
        DynamicImage::ImageLuma16(b) => b.into_raw(),
        other => {
            return Err(Error::Image(format!(
                "{}: land-cover labels must be single-band, found {:?}",
                pixel_path.display(),
                other.color()
            )))
        }
    };
    LulcRaster::new(w, h, labels, legend, transform)
}

pub fn write_lulc(
    lulc: &LulcRaster,
    pixel_path: impl AsRef<Path>,
    worldfile_path: impl AsRef<Path>,
    legend_path: impl AsRef<Path>,
) -> Result<()> {
    let (w, h) = (lulc.width() as u32, lulc.height() as u32);
    let img = if lulc.labels().iter().all(|&l| l <= 255) {
        DynamicImage::ImageLuma8(
            ImageBuffer::from_raw(w, h, lulc.labels().iter().map(|&v| v as u8).collect()).unwrap(),
        )
    } else {
        DynamicImage::ImageLuma16(ImageBuffer::from_raw(w, h, lulc.labels().to_vec()).unwrap())
    };
    save(img, pixel_path.as_ref())?;
    write_world_file(worldfile_path, &lulc.transform)?;
    let legend_path = legend_path.as_ref();
    let text = serde_json::to_string_pretty(&lulc.legend).expect("legend serializes");
    fs::write(legend_path, text).map_err(|e| Error::io(legend_path, e))
}
