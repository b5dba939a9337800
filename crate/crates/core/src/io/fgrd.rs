//! FGRD: a little-endian raw grid with a fixed 16-byte header.
//!
//! ```text
//! offset 0   magic  "FGRD"
//! offset 4   u32    width
//! offset 8   u32    height
//! offset 12  u32    cell type tag (see `CellType`)
//! offset 16  width * height cells, row-major, southern row first
//! ```
//!
//! Multi-channel data is stored as consecutive FGRD frames, one per channel.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"FGRD";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
pub enum CellType {
    U8 = 1,
    I32 = 2,
    U32 = 3,
    F32 = 4,
    F64 = 5,
}

impl CellType {
    pub fn from_tag(tag: u32) -> Option<Self> {
        Some(match tag {
            1 => Self::U8,
            2 => Self::I32,
            3 => Self::U32,
            4 => Self::F32,
            5 => Self::F64,
            _ => return None,
        })
    }
}

pub trait FgrdCell: Copy {
    const TYPE: CellType;
    const SIZE: usize;
    fn put(self, out: &mut Vec<u8>);
    fn take(bytes: &[u8]) -> Self;
}

macro_rules! cell {
    ($t:ty, $tag:expr) => {
        impl FgrdCell for $t {
            const TYPE: CellType = $tag;
            const SIZE: usize = std::mem::size_of::<$t>();
            fn put(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_le_bytes());
            }
            fn take(bytes: &[u8]) -> Self {
                <$t>::from_le_bytes(bytes.try_into().expect("cell width"))
            }
        }
    };
}

cell!(u8, CellType::U8);
cell!(i32, CellType::I32);
cell!(u32, CellType::U32);
cell!(f32, CellType::F32);
cell!(f64, CellType::F64);

pub fn write_fgrd<T: FgrdCell>(out: &mut impl Write, grid: &Grid<T>) -> io::Result<()> {
    let mut buf = Vec::with_capacity(16 + grid.len() * T::SIZE);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(grid.width() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.height() as u32).to_le_bytes());
    buf.extend_from_slice(&(T::TYPE as u32).to_le_bytes());
    for &v in grid.as_slice() {
        v.put(&mut buf);
    }
    out.write_all(&buf)
}

fn read_frame<T: FgrdCell>(bytes: &[u8]) -> Result<(Grid<T>, usize)> {
    if bytes.len() < 16 {
        return Err(Error::Parse("FGRD header truncated".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Parse("bad FGRD magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let (width, height, tag) = (word(4) as usize, word(8) as usize, word(12));
    match CellType::from_tag(tag) {
        Some(t) if t == T::TYPE => {}
        Some(t) => {
            return Err(Error::Parse(format!(
                "FGRD holds {t:?} cells, expected {:?}",
                T::TYPE
            )))
        }
        None => return Err(Error::Parse(format!("unknown FGRD cell type tag {tag}"))),
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(T::SIZE))
        .ok_or_else(|| Error::Parse("FGRD dimensions overflow".into()))?;
    let body = bytes
        .get(16..16 + len)
        .ok_or_else(|| Error::Parse("FGRD body truncated".into()))?;
    let data = body.chunks_exact(T::SIZE).map(T::take).collect();
    Ok((
        Grid::from_vec(width, height, data).expect("sized"),
        16 + len,
    ))
}

/// Reads exactly one frame.
pub fn read_fgrd<T: FgrdCell>(input: &mut impl Read) -> Result<Grid<T>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let (grid, used) = read_frame(&bytes)?;
    if used != bytes.len() {
        return Err(Error::Parse("trailing bytes after FGRD frame".into()));
    }
    Ok(grid)
}

/// Reads consecutive frames until end of input.
pub fn read_fgrd_frames<T: FgrdCell>(input: &mut impl Read) -> Result<Vec<Grid<T>>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut frames = Vec::new();
    let mut at = 0;
    while at < bytes.len() {
        let (grid, used) = read_frame(&bytes[at..])?;
        frames.push(grid);
        at += used;
    }
    Ok(frames)
}
