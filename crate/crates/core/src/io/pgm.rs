//! Netpbm graymaps. Rows are written north-first, as images are viewed.

use std::io::{self, Write};

use crate::density::DensityMap;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII `P2`.
    Plain,
    /// Binary `P5`.
    Raw,
}

pub fn write_pgm(out: &mut impl Write, grid: &Grid<u8>, format: PgmFormat) -> io::Result<()> {
    let (w, h) = (grid.width(), grid.height());
    let maxval = grid.as_slice().iter().copied().max().unwrap_or(0).max(1);
    match format {
        PgmFormat::Plain => {
            let mut text = format!("P2\n{w} {h}\n{maxval}\n");
            for y in (0..h).rev() {
                let row: Vec<String> = grid.row(y).iter().map(u8::to_string).collect();
                text.push_str(&row.join(" "));
                text.push('\n');
            }
            out.write_all(text.as_bytes())
        }
        PgmFormat::Raw => {
            let mut buf = format!("P5\n{w} {h}\n{maxval}\n").into_bytes();
            for y in (0..h).rev() {
                buf.extend_from_slice(grid.row(y));
            }
            out.write_all(&buf)
        }
    }
}

/// Reads `P2` or `P5` with a maxval below 256.
pub fn read_pgm(bytes: &[u8]) -> Result<Grid<u8>> {
    let bad = |m: &str| Error::Parse(format!("PGM: {m}"));
    let mut pos = 0;
    let token = |pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(bad("unexpected end of header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    let num = |s: String| s.parse::<usize>().map_err(|_| bad("bad number"));
    let w = num(token(&mut pos)?)?;
    let h = num(token(&mut pos)?)?;
    let maxval = num(token(&mut pos)?)?;
    if maxval > 255 {
        return Err(bad("16-bit graymaps are not supported"));
    }
    let mut rows_north_first = Vec::with_capacity(w * h);
    match magic.as_str() {
        "P2" => {
            for _ in 0..w * h {
                let v = num(token(&mut pos)?)?;
                rows_north_first.push(u8::try_from(v).map_err(|_| bad("value above 255"))?);
            }
        }
        "P5" => {
            pos += 1;
            let body = bytes
                .get(pos..pos + w * h)
                .ok_or_else(|| bad("truncated raster"))?;
            rows_north_first.extend_from_slice(body);
        }
        _ => return Err(bad("unsupported magic")),
    }
    Ok(Grid::from_fn(w, h, |x, y| {
        rows_north_first[(h - 1 - y) * w + x]
    }))
}

/// Min-max scaled density for viewing; exterior is 0 and interior spans 1..=255.
pub fn density_preview(d: &DensityMap) -> Grid<u8> {
    let interior = d.values.as_slice().iter().copied().filter(|&v| v > 0.0);
    let (lo, hi) = interior.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    d.values.map(|&v| {
        if v <= 0.0 {
            0
        } else if hi > lo {
            (1.0 + (v - lo) / (hi - lo) * 254.0).round() as u8
        } else {
            255
        }
    })
}
