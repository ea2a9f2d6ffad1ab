use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format, one, zero, Rational};

/// `[start, start + width)` inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalInterval {
    start: Rational,
    width: Rational,
}

impl RationalInterval {
    pub fn new(start: Rational, width: Rational) -> Result<Self> {
        if start.is_negative() || !width.is_positive() || start.clone() + &width > one() {
            return Err(Error::InvalidGadget(format!(
                "interval [{}, +{}) is not a positive-width subinterval of [0,1]",
                format(&start),
                format(&width)
            )));
        }
        Ok(Self { start, width })
    }

    pub(crate) fn unchecked(start: Rational, width: Rational) -> Self {
        Self { start, width }
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    pub fn width(&self) -> &Rational {
        &self.width
    }

    pub fn end(&self) -> Rational {
        self.start.clone() + &self.width
    }

    pub fn intersection_width(&self, other: &RationalInterval) -> Rational {
        let lo = if self.start > other.start { &self.start } else { &other.start };
        let e1 = self.end();
        let e2 = other.end();
        let hi = if e1 < e2 { e1 } else { e2 };
        if hi > *lo {
            hi - lo
        } else {
            zero()
        }
    }
}

/// Sorts and coalesces touching intervals. Fails on any overlap.
pub(crate) fn normalize(mut pieces: Vec<RationalInterval>) -> Result<Vec<RationalInterval>> {
    pieces.sort_by(|a, b| a.start.cmp(&b.start));
    let mut out: Vec<RationalInterval> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            let end = last.end();
            if p.start < end {
                return Err(Error::OverlappingSupports(format!(
                    "intervals starting at {} and {} overlap",
                    format(&last.start),
                    format(&p.start)
                )));
            }
            if p.start == end {
                last.width += p.width;
                continue;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// One level of a column: a finite disjoint union of intervals, kept sorted
/// and coalesced. A plain column level is a single interval; merging produces
/// unions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    pieces: Vec<RationalInterval>,
    width: Rational,
}

impl Level {
    pub fn new(pieces: Vec<RationalInterval>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidGadget("empty level".into()));
        }
        let pieces = normalize(pieces)?;
        let width = pieces.iter().fold(zero(), |acc, p| acc + &p.width);
        Ok(Self { pieces, width })
    }

    pub fn interval(iv: RationalInterval) -> Self {
        let width = iv.width.clone();
        Self { pieces: vec![iv], width }
    }

    pub fn pieces(&self) -> &[RationalInterval] {
        &self.pieces
    }

    pub fn width(&self) -> &Rational {
        &self.width
    }

    pub fn start(&self) -> &Rational {
        &self.pieces[0].start
    }

    /// The part of this level lying in measure coordinates
    /// `[offset, offset + len)`, reading the pieces left to right.
    pub fn slice(&self, offset: &Rational, len: &Rational) -> Level {
        let stop = offset.clone() + len;
        let mut acc = zero();
        let mut out = Vec::new();
        for p in &self.pieces {
            let p_lo = acc.clone();
            let p_hi = acc.clone() + &p.width;
            acc = p_hi.clone();
            let lo = if *offset > p_lo { offset.clone() } else { p_lo.clone() };
            let hi = if stop < p_hi { stop.clone() } else { p_hi };
            if hi > lo {
                let start = p.start.clone() + (&lo - &p_lo);
                out.push(RationalInterval::unchecked(start, hi - lo));
            }
            if acc >= stop {
                break;
            }
        }
        debug_assert!(!out.is_empty());
        let width = out.iter().fold(zero(), |a, p| a + &p.width);
        Level { pieces: out, width }
    }

    pub(crate) fn union(levels: &[&Level]) -> Result<Level> {
        Level::new(levels.iter().flat_map(|l| l.pieces.iter().cloned()).collect())
    }
}

/// Total length of the intersection of two sorted disjoint interval lists.
pub fn overlap_length(a: &[RationalInterval], b: &[RationalInterval]) -> Rational {
    let (mut i, mut j) = (0, 0);
    let mut total = zero();
    while i < a.len() && j < b.len() {
        let w = a[i].intersection_width(&b[j]);
        if !w.is_zero() {
            total += w;
        }
        if a[i].end() <= b[j].end() {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}
