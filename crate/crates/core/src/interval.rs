//! Finite unions of half-open intervals `[a, b)` on the real line.
//!
//! Endpoints may be infinite, so `[-inf, inf)` is the whole line. A lattice
//! point lying exactly on a left endpoint belongs to the interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "endpoint")]
    pub a: f64,
    #[serde(with = "endpoint")]
    pub b: f64,
}

/// Finite endpoints as numbers, infinite ones as `"inf"` / `"-inf"`, since
/// JSON has no infinity.
pub mod endpoint {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("bad interval endpoint {other:?}"))),
            },
        }
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::MalformedInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn full() -> Self {
        Self {
            a: f64::NEG_INFINITY,
            b: f64::INFINITY,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x < self.b
    }

    /// Midpoint of a bounded interval; `None` when either end is infinite.
    pub fn midpoint(&self) -> Option<f64> {
        (self.a.is_finite() && self.b.is_finite()).then(|| 0.5 * (self.a + self.b))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        (a < b).then_some(Interval { a, b })
    }

    pub fn scaled(&self, factor: f64) -> Result<Interval> {
        if !(factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "interval scale factor must be positive, got {factor}"
            )));
        }
        Interval::new(self.a * factor, self.b * factor)
    }
}

/// Sorted, disjoint, non-adjacent union of half-open intervals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            parts: vec![Interval::full()],
        }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            parts: vec![Interval::new(a, b)?],
        })
    }

    /// Builds the union of the given `(a, b)` pairs, merging overlaps.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let parts = pairs
            .iter()
            .map(|&(a, b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_intervals(parts))
    }

    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|l, r| l.a.total_cmp(&r.a));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match merged.last_mut() {
                Some(last) if iv.a <= last.b => last.b = last.b.max(iv.b),
                _ => merged.push(iv),
            }
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.parts.len() == 1 && self.parts[0] == Interval::full()
    }

    pub fn contains(&self, x: f64) -> bool {
        // parts are sorted; the candidate is the last interval starting at or before x
        let idx = self.parts.partition_point(|iv| iv.a <= x);
        idx > 0 && self.parts[idx - 1].contains(x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.parts.clone();
        all.extend_from_slice(&other.parts);
        Self::from_intervals(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for l in &self.parts {
            for r in &other.parts {
                if let Some(iv) = l.intersect(r) {
                    out.push(iv);
                }
            }
        }
        Self::from_intervals(out)
    }

    /// Complement in the real line; half-open cells stay half-open.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = f64::NEG_INFINITY;
        for iv in &self.parts {
            if cursor < iv.a {
                out.push(Interval { a: cursor, b: iv.a });
            }
            cursor = iv.b;
        }
        if cursor < f64::INFINITY {
            out.push(Interval {
                a: cursor,
                b: f64::INFINITY,
            });
        }
        Self { parts: out }
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.intersection(other) == *self
    }

    pub fn scaled(&self, factor: f64) -> Result<IntervalSet> {
        let parts = self
            .parts
            .iter()
            .map(|iv| iv.scaled(factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_intervals(parts))
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        Self { parts: vec![iv] }
    }
}

/// An ordered list of pairwise disjoint cells used for histograms and
/// expectation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    cells: Vec<Interval>,
}

impl Partition {
    pub fn new(mut cells: Vec<Interval>) -> Result<Self> {
        cells.sort_by(|l, r| l.a.total_cmp(&r.a));
        for w in cells.windows(2) {
            if w[1].a < w[0].b {
                return Err(Error::BadPartition(format!(
                    "[{}, {}) overlaps [{}, {})",
                    w[0].a, w[0].b, w[1].a, w[1].b
                )));
            }
        }
        Ok(Self { cells })
    }

    /// Consecutive cells `[edges[k], edges[k+1])`.
    pub fn from_edges(edges: &[f64]) -> Result<Self> {
        let cells = edges
            .windows(2)
            .map(|w| Interval::new(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cells)
    }

    pub fn cells(&self) -> &[Interval] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn union(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.cells.clone())
    }
}
