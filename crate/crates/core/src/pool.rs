//! Bounded 1 FPS candidate pool and the alignment between embedding
//! positions, integer seconds, and decoded frame indices.
//!
//! Positions are 1-based and index embedding rows in pool order. Seconds are
//! integer offsets into the video. Frame indices are `floor(s * fps)`
//! clamped into the decoded range.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

/// Default cap on the number of candidates per video.
pub const DEFAULT_CAP: usize = 1000;

/// A 1-based candidate position (embedding row `index() = get() - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(usize);

impl Position {
    /// Builds a position from its 1-based value. Panics on zero.
    pub fn new(one_based: usize) -> Self {
        assert!(one_based >= 1, "positions are 1-based");
        Position(one_based)
    }

    pub fn from_index(zero_based: usize) -> Self {
        Position(zero_based + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoMeta {
    pub video_id: String,
    /// Frames per second as supplied; alignment is only as exact as this value.
    pub fps: f64,
    pub total_frames: u64,
}

impl VideoMeta {
    pub fn new(video_id: impl Into<String>, fps: f64, total_frames: u64) -> Result<Self> {
        let meta = VideoMeta {
            video_id: video_id.into(),
            fps,
            total_frames,
        };
        meta.validate()?;
        Ok(meta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::Parameter(format!(
                "fps must be a positive finite number, got {}",
                self.fps
            )));
        }
        if self.total_frames == 0 {
            return Err(Error::Parameter("total_frames must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of whole seconds, `floor(T / f)`.
    pub fn duration_seconds(&self) -> u64 {
        (self.total_frames as f64 / self.fps).floor() as u64
    }

    /// Decoded frame index of second `s`, `clamp(floor(s * f), 0, T - 1)`.
    pub fn frame_index_of_second(&self, second: u64) -> u64 {
        let raw = (second as f64 * self.fps).floor();
        let last = self.total_frames.saturating_sub(1);
        if raw <= 0.0 {
            0
        } else if raw >= last as f64 {
            last
        } else {
            raw as u64
        }
    }
}

/// Free-function form of [`VideoMeta::frame_index_of_second`].
pub fn frame_index_of_second(meta: &VideoMeta, second: u64) -> u64 {
    meta.frame_index_of_second(second)
}

/// `count` evenly spaced integers over `[0, len - 1]`.
///
/// Element `k` is `trunc(k * (len - 1) / (count - 1))` evaluated in 64-bit
/// floating point, product first. Both endpoints are pinned exactly. When
/// `count >= len` the identity `0..len` is returned. `count == 1` yields `[0]`.
pub fn even_spacing(len: u64, count: usize) -> Vec<u64> {
    if len == 0 || count == 0 {
        return Vec::new();
    }
    if count as u64 >= len {
        return (0..len).collect();
    }
    if count == 1 {
        return vec![0];
    }
    let span = (len - 1) as f64;
    let denom = (count - 1) as f64;
    (0..count)
        .map(|k| ((k as f64 * span) / denom).trunc() as u64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    meta: VideoMeta,
    seconds: Vec<u64>,
    cap: usize,
}

impl CandidatePool {
    /// Builds the pool of integer-second candidates, downsampling evenly to
    /// `cap` when the video has more than `cap` whole seconds.
    pub fn build(meta: VideoMeta, cap: usize) -> Result<Self> {
        meta.validate()?;
        if cap == 0 {
            return Err(Error::Parameter("cap must be at least 1".into()));
        }
        let duration = meta.duration_seconds();
        if duration == 0 {
            return Err(Error::EmptyPool {
                fps: meta.fps,
                total_frames: meta.total_frames,
            });
        }
        if cap == 1 && duration > 1 {
            return Err(Error::DegenerateSpacing { duration });
        }
        let seconds = even_spacing(duration, cap);
        Ok(CandidatePool { meta, seconds, cap })
    }

    /// Wraps an explicit list of seconds, checking ordering, range, and cap.
    pub fn from_seconds(meta: VideoMeta, seconds: Vec<u64>, cap: usize) -> Result<Self> {
        meta.validate()?;
        if cap == 0 {
            return Err(Error::Parameter("cap must be at least 1".into()));
        }
        if seconds.is_empty() {
            return Err(Error::EmptyPool {
                fps: meta.fps,
                total_frames: meta.total_frames,
            });
        }
        if seconds.len() > cap {
            return Err(Error::Format(format!(
                "pool has {} seconds but cap is {cap}",
                seconds.len()
            )));
        }
        if let Some(w) = seconds.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Format(format!(
                "seconds must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        let duration = meta.duration_seconds();
        if let Some(&last) = seconds.last() {
            if last >= duration {
                return Err(Error::Format(format!(
                    "second {last} is outside the video's {duration} whole seconds"
                )));
            }
        }
        Ok(CandidatePool { meta, seconds, cap })
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn seconds(&self) -> &[u64] {
        &self.seconds
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.seconds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seconds.is_empty()
    }

    pub fn second_of_position(&self, position: Position) -> Result<u64> {
        self.seconds
            .get(position.index())
            .copied()
            .ok_or(Error::Index {
                index: position.get(),
                len: self.seconds.len(),
            })
    }

    pub fn frame_index_of_position(&self, position: Position) -> Result<u64> {
        Ok(self
            .meta
            .frame_index_of_second(self.second_of_position(position)?))
    }

    pub fn to_manifest(&self) -> PoolManifest {
        PoolManifest {
            video_id: self.meta.video_id.clone(),
            fps: self.meta.fps,
            total_frames: self.meta.total_frames,
            cap: self.cap,
            seconds: self.seconds.clone(),
            relevance_embeddings: None,
            semantic_embeddings: None,
            query_embedding: None,
        }
    }
}

/// Convenience wrapper for [`CandidatePool::build`].
pub fn build_pool(meta: VideoMeta, cap: usize) -> Result<CandidatePool> {
    CandidatePool::build(meta, cap)
}

/// On-disk pool manifest. The three embedding paths are present only once
/// embeddings have been attached, and are resolved relative to the
/// manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolManifest {
    pub video_id: String,
    pub fps: f64,
    pub total_frames: u64,
    pub cap: usize,
    pub seconds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevance_embeddings: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_embeddings: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_embedding: Option<String>,
}

impl PoolManifest {
    pub fn read(path: &Path) -> Result<Self> {
        io::read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn to_pool(&self) -> Result<CandidatePool> {
        let meta = VideoMeta::new(self.video_id.clone(), self.fps, self.total_frames)?;
        CandidatePool::from_seconds(meta, self.seconds.clone(), self.cap)
    }
}
