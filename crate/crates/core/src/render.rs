//! Diagnostic renderings of pipeline stages.
//!
//! Every function returns an [`image::RgbImage`]; callers decide where and
//! how to write it. Color conventions: upper boundaries green, lower
//! boundaries red, gap defects red, overlap defects green.

use image::{Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::pipeline::BoundaryGroup;
use crate::raster::{DefectClass, DefectMask, DepthMap, PolarEdgeMap, Polarity};
use crate::towlines::TowBoundary;

const UPPER_COLOR: Rgb<u8> = Rgb([60, 220, 90]);
const LOWER_COLOR: Rgb<u8> = Rgb([230, 70, 60]);
const GAP_COLOR: Rgb<u8> = Rgb([220, 40, 40]);
const OVERLAP_COLOR: Rgb<u8> = Rgb([40, 190, 70]);

/// Distinct colors cycled across fragment groups.
const GROUP_PALETTE: [[u8; 3]; 8] = [
    [230, 80, 60],
    [70, 160, 230],
    [90, 200, 90],
    [230, 200, 60],
    [200, 90, 220],
    [70, 210, 200],
    [240, 140, 50],
    [150, 150, 240],
];

fn polarity_color(polarity: Polarity) -> Rgb<u8> {
    match polarity {
        Polarity::Upper => UPPER_COLOR,
        Polarity::Lower => LOWER_COLOR,
    }
}

fn grayscale_base(map: &DepthMap) -> RgbImage {
    let mut buf = RgbImage::new(map.width(), map.height());
    for (x, y, px) in buf.enumerate_pixels_mut() {
        let g = (map.get(x, y) * 255.0).round() as u8;
        *px = Rgb([g, g, g]);
    }
    buf
}

/// Edge pixels tinted by polarity (upper green, lower red) on black.
pub fn render_polarity(pe: &PolarEdgeMap) -> RgbImage {
    let mut buf = RgbImage::new(pe.width(), pe.height());
    for y in 0..pe.height() {
        for x in 0..pe.width() {
            if let Some(p) = pe.get(x, y) {
                buf.put_pixel(x, y, polarity_color(p));
            }
        }
    }
    buf
}

/// Fragment groups in cycled palette colors with the group id drawn beside
/// each group's left end.
pub fn render_groups(groups: &[BoundaryGroup], width: u32, height: u32) -> RgbImage {
    let mut buf = RgbImage::new(width, height);
    for group in groups {
        let color = GROUP_PALETTE
            [(group.group_id as usize + GROUP_PALETTE.len() - 1) % GROUP_PALETTE.len()];
        for &(c, r) in &group.pixels {
            if c < width && r < height {
                buf.put_pixel(c, r, Rgb(color));
            }
        }
        if let Some(&(c, r)) = group.polyline.first() {
            let label = group.group_id.to_string();
            // Place the label just above-left of the trace, clamped inside.
            let lx = (c as i64 - 1).max(0) as u32;
            let ly = (r as i64 - 7).max(0) as u32;
            draw_label(&mut buf, lx, ly, &label, Rgb([255, 255, 255]));
        }
    }
    buf
}

/// Fitted boundary curves over the scan, colored by polarity.
pub fn render_boundaries(map: &DepthMap, boundaries: &[TowBoundary]) -> RgbImage {
    let mut buf = grayscale_base(map);
    for b in boundaries {
        let (lo, hi) = b.domain();
        let color = polarity_color(b.polarity);
        for col in lo.ceil() as i64..=hi.floor() as i64 {
            let Ok(y) = b.evaluate(col as f64) else {
                continue;
            };
            let row = y.round() as i64;
            if (0..map.width() as i64).contains(&col) && (0..map.height() as i64).contains(&row) {
                buf.put_pixel(col as u32, row as u32, color);
            }
        }
    }
    buf
}

/// The scan with defect pixels tinted: gap red, overlap green.
pub fn render_overlay(map: &DepthMap, mask: &DefectMask) -> Result<RgbImage> {
    if map.width() != mask.width() || map.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            a_width: map.width(),
            a_height: map.height(),
            b_width: mask.width(),
            b_height: mask.height(),
        });
    }
    let mut buf = RgbImage::new(map.width(), map.height());
    for (x, y, px) in buf.enumerate_pixels_mut() {
        let gray = (map.get(x, y) * 255.0).round() as u8;
        *px = match mask.get(x, y) {
            DefectClass::Neutral => Rgb([gray, gray, gray]),
            DefectClass::Gap => blend(gray, GAP_COLOR),
            DefectClass::Overlap => blend(gray, OVERLAP_COLOR),
        };
    }
    Ok(buf)
}

/// 50/50 blend between the grayscale value and the class color.
fn blend(gray: u8, color: Rgb<u8>) -> Rgb<u8> {
    let mix = |c: u8| ((gray as u16 + c as u16) / 2) as u8;
    Rgb([mix(color.0[0]), mix(color.0[1]), mix(color.0[2])])
}

/// 3x5 bitmap glyphs for '0'..'9'; rows top to bottom, 3 low bits per row.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b001, 0b001, 0b001],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

/// Draws a decimal string at (x, y) with 1px glyph spacing, clipping at the
/// image edges.
fn draw_label(buf: &mut RgbImage, x: u32, y: u32, text: &str, color: Rgb<u8>) {
    let mut cursor = x;
    for ch in text.chars() {
        let Some(d) = ch.to_digit(10) else { continue };
        let glyph = DIGITS[d as usize];
        for (dy, row) in glyph.iter().enumerate() {
            for dx in 0..3u32 {
                if row >> (2 - dx) & 1 == 1 {
                    let (px, py) = (cursor + dx, y + dy as u32);
                    if px < buf.width() && py < buf.height() {
                        buf.put_pixel(px, py, color);
                    }
                }
            }
        }
        cursor += 4;
    }
}
