//! Binary epoch container.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        4 bytes   "EEGT"
//! version      u32       1
//! n_channels   u32
//! n_samples    u64
//! sample_rate  f64
//! names        n_channels × (u16 byte length, UTF-8 bytes)
//! samples      n_channels × n_samples × f32, channel-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{CorpusError, EegEpoch};

pub const MAGIC: &[u8; 4] = b"EEGT";
pub const VERSION: u32 = 1;

/// Header fields, readable without touching the sample block.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochHeader {
    pub channel_names: Vec<String>,
    pub n_samples: u64,
    pub sample_rate: f64,
}

fn bad(path: &Path, msg: impl Into<String>) -> CorpusError {
    CorpusError::BadEpochFile {
        path: path.to_path_buf(),
        reason: msg.into(),
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], path: &Path) -> Result<(), CorpusError> {
    r.read_exact(buf).map_err(|e| bad(path, e.to_string()))
}

fn read_header_from<R: Read>(r: &mut R, path: &Path) -> Result<EpochHeader, CorpusError> {
    let mut magic = [0u8; 4];
    read_exact(r, &mut magic, path)?;
    if &magic != MAGIC {
        return Err(bad(path, "bad magic bytes"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    read_exact(r, &mut b4, path)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(bad(path, format!("unsupported version {version}")));
    }
    read_exact(r, &mut b4, path)?;
    let n_channels = u32::from_le_bytes(b4) as usize;
    read_exact(r, &mut b8, path)?;
    let n_samples = u64::from_le_bytes(b8);
    read_exact(r, &mut b8, path)?;
    let sample_rate = f64::from_le_bytes(b8);
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(bad(path, format!("invalid sample rate {sample_rate}")));
    }
    let mut channel_names = Vec::with_capacity(n_channels);
    for _ in 0..n_channels {
        let mut b2 = [0u8; 2];
        read_exact(r, &mut b2, path)?;
        let len = u16::from_le_bytes(b2) as usize;
        let mut name = vec![0u8; len];
        read_exact(r, &mut name, path)?;
        let name = String::from_utf8(name).map_err(|_| bad(path, "channel name is not UTF-8"))?;
        channel_names.push(name);
    }
    Ok(EpochHeader {
        channel_names,
        n_samples,
        sample_rate,
    })
}

/// Reads only the header of an epoch file.
pub fn read_header(path: &Path) -> Result<EpochHeader, CorpusError> {
    let file = File::open(path).map_err(|_| CorpusError::MissingFile {
        path: path.to_path_buf(),
        trial: None,
    })?;
    read_header_from(&mut BufReader::new(file), path)
}

/// Decodes an epoch from raw bytes. `eog_channels` names the channels to flag as EOG.
pub fn decode(bytes: &[u8], path: &Path, eog_channels: &[String]) -> Result<EegEpoch, CorpusError> {
    let mut cursor = bytes;
    let header = read_header_from(&mut cursor, path)?;
    let n_ch = header.channel_names.len();
    let n = header.n_samples as usize;
    let expected = n_ch
        .checked_mul(n)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| bad(path, "sample block size overflows"))?;
    if cursor.len() != expected {
        return Err(bad(
            path,
            format!("expected {expected} sample bytes, found {}", cursor.len()),
        ));
    }
    let mut data = Vec::with_capacity(n_ch);
    for (ch, chunk) in cursor.chunks_exact(n * 4).enumerate().take(n_ch) {
        let row: Vec<f64> = chunk
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .collect();
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CorpusError::NonFinite {
                path: path.to_path_buf(),
                channel: header.channel_names[ch].clone(),
            });
        }
        data.push(row);
    }
    if n == 0 {
        data = vec![Vec::new(); n_ch];
    }
    let eog_indices = header
        .channel_names
        .iter()
        .enumerate()
        .filter(|(_, name)| eog_channels.iter().any(|e| e == *name))
        .map(|(i, _)| i)
        .collect();
    Ok(EegEpoch {
        channel_names: header.channel_names,
        sample_rate: header.sample_rate,
        data,
        eog_indices,
    })
}

/// Encodes an epoch into the binary container. Samples are narrowed to f32.
pub fn encode(epoch: &EegEpoch) -> Vec<u8> {
    let n = epoch.n_samples();
    let names_len: usize = epoch.channel_names.iter().map(|s| 2 + s.len()).sum();
    let mut out = Vec::with_capacity(28 + names_len + epoch.n_channels() * n * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(epoch.n_channels() as u32).to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&epoch.sample_rate.to_le_bytes());
    for name in &epoch.channel_names {
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
    }
    for row in &epoch.data {
        for &v in row {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn read_epoch(path: &Path, eog_channels: &[String]) -> Result<EegEpoch, CorpusError> {
    let mut bytes = Vec::new();
    File::open(path)
        .map_err(|_| CorpusError::MissingFile {
            path: path.to_path_buf(),
            trial: None,
        })?
        .read_to_end(&mut bytes)
        .map_err(|e| bad(path, e.to_string()))?;
    decode(&bytes, path, eog_channels)
}

pub fn write_epoch(path: &Path, epoch: &EegEpoch) -> Result<(), CorpusError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CorpusError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode(epoch))
        .and_then(|_| w.flush())
        .map_err(|e| CorpusError::io(path, e))
}
