//! JSON formats for channels, sequences and paths.
//!
//! A channel is `{"dim": D, "kraus": [op, ...]}` where each `op` is the
//! row-major list of its `D²` entries written as `[re, im]`.

use std::path::Path;

use holo_core::discrete::ChannelSequence;
use holo_core::smooth::SampledPath;
use holo_core::{CMat, KrausRep, C64};
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, HoloResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl ChannelFile {
    pub fn from_rep(rep: &KrausRep) -> Self {
        Self { dim: rep.dim(), kraus: rep.ops().iter().map(encode_matrix).collect() }
    }

    pub fn to_rep(&self) -> HoloResult<KrausRep> {
        let ops = self.kraus.iter().map(|op| decode_matrix(self.dim, op)).collect::<HoloResult<Vec<_>>>()?;
        Ok(KrausRep::new(ops)?)
    }
}

pub fn encode_matrix(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

pub fn decode_matrix(dim: usize, entries: &[[f64; 2]]) -> HoloResult<CMat> {
    if dim == 0 || entries.len() != dim * dim {
        return Err(HoloError::Format(format!("expected {} entries for dim {dim}, found {}", dim * dim, entries.len())));
    }
    Ok(CMat::from_row_iterator(dim, dim, entries.iter().map(|e| C64::new(e[0], e[1]))))
}

/// Either `{"channels": [...]}` or a bare array of channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceFile {
    Wrapped { channels: Vec<ChannelFile> },
    Bare(Vec<ChannelFile>),
}

impl SequenceFile {
    pub fn from_sequence(seq: &ChannelSequence) -> Self {
        SequenceFile::Wrapped { channels: seq.reps().iter().map(ChannelFile::from_rep).collect() }
    }

    pub fn channels(&self) -> &[ChannelFile] {
        match self {
            SequenceFile::Wrapped { channels } | SequenceFile::Bare(channels) => channels,
        }
    }

    pub fn to_sequence(&self) -> HoloResult<ChannelSequence> {
        let reps = self.channels().iter().map(ChannelFile::to_rep).collect::<HoloResult<Vec<_>>>()?;
        Ok(ChannelSequence::new(reps)?)
    }
}

/// A registry name with parameters, or dense samples on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathFile {
    Named {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
    Sampled {
        dim: usize,
        grid: Vec<f64>,
        samples: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

impl PathFile {
    pub fn sampled(dim: usize, grid: Vec<f64>, reps: &[KrausRep]) -> Self {
        let samples = reps.iter().map(|r| r.ops().iter().map(encode_matrix).collect()).collect();
        PathFile::Sampled { dim, grid, samples }
    }

    /// Builds the interpolated path of a sampled file.
    pub fn to_sampled_path(&self) -> HoloResult<Option<SampledPath>> {
        match self {
            PathFile::Named { .. } => Ok(None),
            PathFile::Sampled { dim, grid, samples } => {
                if grid.len() != samples.len() {
                    return Err(HoloError::Format(format!(
                        "{} grid points but {} samples",
                        grid.len(),
                        samples.len()
                    )));
                }
                let reps = samples
                    .iter()
                    .map(|ops| {
                        let ops = ops.iter().map(|op| decode_matrix(*dim, op)).collect::<HoloResult<Vec<_>>>()?;
                        Ok(KrausRep::new(ops)?)
                    })
                    .collect::<HoloResult<Vec<_>>>()?;
                Ok(Some(SampledPath::new(grid.clone(), reps)?))
            }
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> HoloResult<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> HoloResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
