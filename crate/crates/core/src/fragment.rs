//! Contiguous symbol windows over a tokenized SMILES string.
//!
//! Fragments are not required to be valid SMILES on their own; a window may
//! start with `=` or cut a branch in half.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::smiles::TokenSequence;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FragmentError {
    #[error("window length {length} outside 1..={available}")]
    LengthOutOfRange { length: usize, available: usize },
    #[error("schedule maximum {max} exceeds sequence length {available}")]
    ScheduleExceedsLength { max: usize, available: usize },
    #[error("invalid size schedule: {0}")]
    InvalidSchedule(String),
}

impl FragmentError {
    pub fn code(&self) -> &'static str {
        match self {
            FragmentError::LengthOutOfRange { .. } => "LengthOutOfRange",
            FragmentError::ScheduleExceedsLength { .. } => "ScheduleExceedsLength",
            FragmentError::InvalidSchedule(_) => "InvalidSchedule",
        }
    }
}

/// `length` tokens of `parent` starting at token `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fragment<'a> {
    parent: &'a TokenSequence,
    start: usize,
    length: usize,
}

impl<'a> Fragment<'a> {
    pub fn new(
        parent: &'a TokenSequence,
        start: usize,
        length: usize,
    ) -> Result<Self, FragmentError> {
        if length == 0 || start + length > parent.len() {
            return Err(FragmentError::LengthOutOfRange {
                length,
                available: parent.len().saturating_sub(start),
            });
        }
        Ok(Fragment {
            parent,
            start,
            length,
        })
    }

    pub fn parent(&self) -> &'a TokenSequence {
        self.parent
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The covered slice of the parent source string.
    pub fn render(&self) -> &'a str {
        &self.parent.source()[self.parent.char_span(self.start, self.length)]
    }
}

impl fmt::Display for Fragment<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.render())
    }
}

/// Fragment sizes `min, min + step, ...` up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeSchedule {
    min: usize,
    max: usize,
    step: usize,
}

impl SizeSchedule {
    pub fn new(min: usize, max: usize, step: usize) -> Result<Self, FragmentError> {
        if min == 0 || step == 0 || min > max {
            return Err(FragmentError::InvalidSchedule(format!(
                "need 1 <= min <= max and step >= 1, got {min}:{max}:{step}"
            )));
        }
        Ok(SizeSchedule { min, max, step })
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> {
        (self.min..=self.max).step_by(self.step)
    }

    pub fn max_size(&self) -> usize {
        self.sizes().last().unwrap_or(self.min)
    }
}

impl FromStr for SizeSchedule {
    type Err = FragmentError;

    /// Parses `min:max:step`; `min:max` implies a step of 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| FragmentError::InvalidSchedule(format!("bad number {p:?} in {s:?}")))
        };
        match parts.as_slice() {
            [min, max] => SizeSchedule::new(num(min)?, num(max)?, 1),
            [min, max, step] => SizeSchedule::new(num(min)?, num(max)?, num(step)?),
            _ => Err(FragmentError::InvalidSchedule(format!(
                "expected min:max:step, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for SizeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

/// Every window of `length` tokens, by ascending start.
pub fn windows(tokens: &TokenSequence, length: usize) -> Result<Vec<Fragment<'_>>, FragmentError> {
    if length == 0 || length > tokens.len() {
        return Err(FragmentError::LengthOutOfRange {
            length,
            available: tokens.len(),
        });
    }
    Ok((0..=tokens.len() - length)
        .map(|start| Fragment {
            parent: tokens,
            start,
            length,
        })
        .collect())
}

/// One fragment per schedule size, each start drawn uniformly and
/// independently from a ChaCha8 stream seeded with `seed`.
pub fn sample<'a>(
    tokens: &'a TokenSequence,
    schedule: &SizeSchedule,
    seed: u64,
) -> Result<Vec<Fragment<'a>>, FragmentError> {
    if schedule.max_size() > tokens.len() {
        return Err(FragmentError::ScheduleExceedsLength {
            max: schedule.max_size(),
            available: tokens.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(schedule
        .sizes()
        .map(|length| Fragment {
            parent: tokens,
            start: rng.gen_range(0..=tokens.len() - length),
            length,
        })
        .collect())
}
