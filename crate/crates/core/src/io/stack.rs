//! Committee probability-map files.
//!
//! Layout: magic `PMAP`, format version, then T, C, H, W as little-endian
//! u32, followed by `T·C·H·W` little-endian IEEE-754 f32 values,
//! member-major, then class-major, then row-major. The format is the
//! language-neutral contract between the orchestrator and a trainer.

use std::path::Path;

use crate::error::{Error, Result};
use crate::query::ProbabilityStack;

pub const STACK_MAGIC: [u8; 4] = *b"PMAP";
pub const STACK_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 5;

pub fn encode_stack(stack: &ProbabilityStack<f64>) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(HEADER_LEN + stack.data().len() * 4);
    bytes.extend_from_slice(&STACK_MAGIC);
    bytes.extend_from_slice(&STACK_VERSION.to_le_bytes());
    for dim in [
        stack.members(),
        stack.classes(),
        stack.height(),
        stack.width(),
    ] {
        bytes.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for &v in stack.data() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    bytes
}

pub fn decode_stack(bytes: &[u8]) -> Result<ProbabilityStack<f64>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::FormatError(format!(
            "probability stack header needs {HEADER_LEN} bytes, got {}",
            bytes.len()
        )));
    }
    if bytes[..4] != STACK_MAGIC {
        return Err(Error::FormatError(format!(
            "bad magic {:?}, expected \"PMAP\"",
            &bytes[..4]
        )));
    }
    let word = |i: usize| -> u32 {
        u32::from_le_bytes(bytes[4 + i * 4..8 + i * 4].try_into().expect("four bytes"))
    };
    let version = word(0);
    if version != STACK_VERSION {
        return Err(Error::FormatError(format!(
            "unsupported stack format version {version}"
        )));
    }
    let (members, classes, height, width) = (
        word(1) as usize,
        word(2) as usize,
        word(3) as usize,
        word(4) as usize,
    );
    let value_count = members
        .checked_mul(classes)
        .and_then(|n| n.checked_mul(height))
        .and_then(|n| n.checked_mul(width))
        .ok_or_else(|| Error::FormatError("stack dimensions overflow".into()))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != value_count * 4 {
        return Err(Error::FormatError(format!(
            "payload holds {} bytes, {members}x{classes}x{height}x{width} requires {}",
            payload.len(),
            value_count * 4
        )));
    }
    let data: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("four bytes")) as f64)
        .collect();
    let stack = ProbabilityStack::new(members, classes, height, width, data)
        .map_err(|e| Error::FormatError(e.to_string()))?;
    stack
        .validate()
        .map_err(|e| Error::FormatError(e.to_string()))?;
    Ok(stack)
}

pub fn write_stack(path: &Path, stack: &ProbabilityStack<f64>) -> Result<()> {
    crate::io::atomic::atomic_write(path, &encode_stack(stack))
}

pub fn read_stack(path: &Path) -> Result<ProbabilityStack<f64>> {
    decode_stack(&std::fs::read(path)?)
}
