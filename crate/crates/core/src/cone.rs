use std::fmt;

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 6;

/// A tuple of natural numbers of fixed rank, stored inline.
///
/// Unused trailing coordinates are kept at zero so the derived comparisons
/// and hashing only see the first `rank` entries in effect.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    rank: u8,
    exps: [u32; MAX_RANK],
}

impl Cone {
    pub fn zero(rank: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&rank), "cone rank {rank} outside 1..={MAX_RANK}");
        Cone {
            rank: rank as u8,
            exps: [0; MAX_RANK],
        }
    }

    pub fn new(exps: &[u32]) -> Self {
        let mut cone = Cone::zero(exps.len());
        cone.exps[..exps.len()].copy_from_slice(exps);
        cone
    }

    pub fn try_new(exps: &[u32]) -> Result<Self> {
        if exps.is_empty() || exps.len() > MAX_RANK {
            return Err(Error::Parse(format!(
                "tuple of length {} outside 1..={MAX_RANK}",
                exps.len()
            )));
        }
        Ok(Cone::new(exps))
    }

    pub fn generator(rank: usize, i: usize) -> Self {
        let mut cone = Cone::zero(rank);
        cone.exps[i] = 1;
        cone
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps[..self.rank()]
    }

    pub fn is_zero(&self) -> bool {
        self.exps().iter().all(|&e| e == 0)
    }

    fn zip_with(&self, other: &Cone, op: impl Fn(u32, u32) -> u32) -> Cone {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = *self;
        for i in 0..self.rank() {
            out.exps[i] = op(self.exps[i], other.exps[i]);
        }
        out
    }

    pub fn add(&self, other: &Cone) -> Cone {
        self.zip_with(other, |a, b| a.checked_add(b).expect("cone exponent overflow"))
    }

    /// Truncated difference `self ∸ other`.
    pub fn monus(&self, other: &Cone) -> Cone {
        self.zip_with(other, u32::saturating_sub)
    }

    pub fn sup(&self, other: &Cone) -> Cone {
        self.zip_with(other, u32::max)
    }

    pub fn inf(&self, other: &Cone) -> Cone {
        self.zip_with(other, u32::min)
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Cone) -> bool {
        self.exps().iter().zip(other.exps()).all(|(a, b)| a >= b)
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.exps().iter().map(|&e| i64::from(e)).collect()
    }

    /// All tuples of the given rank with coordinates at most `bound`, lexicographically.
    pub fn window(rank: usize, bound: u32) -> Vec<Cone> {
        let mut out = vec![Cone::zero(rank)];
        for i in 0..rank {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..=bound).map(move |v| {
                        let mut next = c;
                        next.exps[i] = v;
                        next
                    })
                })
                .collect();
        }
        out.sort();
        out
    }

    pub fn window_len(rank: usize, bound: u32) -> usize {
        (bound as usize + 1).pow(rank as u32)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.exps().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `(1,2,3)`.
pub fn parse_cone(text: &str) -> Result<Cone> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected a tuple like (1,2), got {text:?}")))?;
    let exps = inner
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad tuple coordinate {p:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Cone::try_new(&exps)
}
