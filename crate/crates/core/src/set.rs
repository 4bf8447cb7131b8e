//! Finite sets of exact rationals and their elementary arithmetic.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// A finite, duplicate-free set of rationals in strictly increasing order.
///
/// `excludes_zero` is fixed at construction; multiplicative operations check
/// it and fail rather than silently dropping 0.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatSet {
    elems: Vec<Scalar>,
    excludes_zero: bool,
}

impl RatSet {
    pub fn new(mut elems: Vec<Scalar>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        Self::from_sorted(elems)
    }

    /// `elems` must already be strictly increasing.
    fn from_sorted(elems: Vec<Scalar>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let excludes_zero = elems.binary_search(&Scalar::zero()).is_err();
        RatSet {
            elems,
            excludes_zero,
        }
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new())
    }

    pub fn singleton(x: Scalar) -> Self {
        Self::from_sorted(vec![x])
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(it: I) -> Self {
        Self::new(it.into_iter().map(Scalar::from).collect())
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn excludes_zero(&self) -> bool {
        self.excludes_zero
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<Scalar> {
        self.elems
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.elems.binary_search(x).is_ok()
    }

    pub fn index_of(&self, x: &Scalar) -> Option<usize> {
        self.elems.binary_search(x).ok()
    }

    pub fn min(&self) -> Option<&Scalar> {
        self.elems.first()
    }

    pub fn max(&self) -> Option<&Scalar> {
        self.elems.last()
    }

    pub fn require_nonempty(&self, what: &str) -> Result<()> {
        if self.is_empty() {
            return domain(format!("{what} must be nonempty"));
        }
        Ok(())
    }

    pub fn require_no_zero(&self, what: &str) -> Result<()> {
        if !self.excludes_zero {
            return domain(format!("{what} contains 0"));
        }
        Ok(())
    }

    fn combine(&self, other: &RatSet, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> RatSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.elems {
            for b in &other.elems {
                out.push(f(a, b));
            }
        }
        RatSet::new(out)
    }

    /// `A + B`.
    pub fn sumset(&self, other: &RatSet) -> Result<RatSet> {
        self.require_nonempty("A")?;
        other.require_nonempty("B")?;
        Ok(self.combine(other, |a, b| a + b))
    }

    /// `A − B = {a − b}`.
    pub fn difference_set(&self, other: &RatSet) -> Result<RatSet> {
        self.require_nonempty("A")?;
        other.require_nonempty("B")?;
        Ok(self.combine(other, |a, b| a - b))
    }

    /// `AB`.
    pub fn productset(&self, other: &RatSet) -> Result<RatSet> {
        self.require_nonempty("A")?;
        other.require_nonempty("B")?;
        Ok(self.combine(other, |a, b| a * b))
    }

    /// `A/B = {a/b : b ≠ 0}`.
    pub fn quotientset(&self, other: &RatSet) -> Result<RatSet> {
        self.require_nonempty("A")?;
        let mut out = Vec::with_capacity(self.len() * other.len());
        for b in other.elems.iter().filter(|b| !b.is_zero()) {
            for a in &self.elems {
                out.push(a / b);
            }
        }
        if out.is_empty() {
            return domain("quotient set needs a nonzero denominator");
        }
        Ok(RatSet::new(out))
    }

    /// `{c·a}`; a bijection for `c ≠ 0`.
    pub fn dilate(&self, c: &Scalar) -> Result<RatSet> {
        if c.is_zero() {
            return domain("dilation by 0");
        }
        let mut out: Vec<Scalar> = self.elems.iter().map(|a| c * a).collect();
        if c.is_negative() {
            out.reverse();
        }
        Ok(RatSet::from_sorted(out))
    }

    /// `{c + a}`.
    pub fn translate(&self, c: &Scalar) -> RatSet {
        RatSet::from_sorted(self.elems.iter().map(|a| c + a).collect())
    }

    pub fn negate(&self) -> RatSet {
        RatSet::from_sorted(self.elems.iter().rev().map(|a| -a).collect())
    }

    /// `A⁻¹ = {1/a}`.
    pub fn inverse(&self) -> Result<RatSet> {
        self.require_no_zero("set to invert")?;
        Ok(RatSet::new(
            self.elems
                .iter()
                .map(|a| a.recip().expect("nonzero"))
                .collect(),
        ))
    }

    /// The slice `A_λ = A ∩ λA`.
    pub fn slice(&self, lambda: &Scalar) -> Result<RatSet> {
        let scaled = self.dilate(lambda)?;
        Ok(self.intersection(&scaled))
    }

    /// `|A ∩ λA|` without materialising the intersection.
    pub fn slice_len(&self, lambda: &Scalar) -> Result<usize> {
        let scaled = self.dilate(lambda)?;
        Ok(self.intersection_len(&scaled))
    }

    pub fn union(&self, other: &RatSet) -> RatSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elems, &other.elems);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        RatSet::from_sorted(out)
    }

    pub fn intersection(&self, other: &RatSet) -> RatSet {
        let mut out = Vec::new();
        merge_common(&self.elems, &other.elems, |x| out.push(x.clone()));
        RatSet::from_sorted(out)
    }

    pub fn intersection_len(&self, other: &RatSet) -> usize {
        let mut n = 0;
        merge_common(&self.elems, &other.elems, |_| n += 1);
        n
    }

    /// `A ∖ B`.
    pub fn difference(&self, other: &RatSet) -> RatSet {
        RatSet::from_sorted(
            self.elems
                .iter()
                .filter(|x| !other.contains(x))
                .cloned()
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &RatSet) -> bool {
        self.len() <= other.len() && self.elems.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &RatSet) -> bool {
        self.intersection_len(other) == 0
    }

    /// Elements at the given (sorted, canonical-order) positions.
    pub fn select(&self, mut keep: impl FnMut(usize, &Scalar) -> bool) -> RatSet {
        RatSet::from_sorted(
            self.elems
                .iter()
                .enumerate()
                .filter(|(i, x)| keep(*i, x))
                .map(|(_, x)| x.clone())
                .collect(),
        )
    }

    /// One element per line in canonical form, newline-terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in &self.elems {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the line format. Blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<RatSet> {
        let mut elems = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let x: Scalar = line
                .parse()
                .map_err(|e: Error| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            elems.push(x);
        }
        Ok(RatSet::new(elems))
    }

    /// Accepts either a JSON array of strings or the line format.
    pub fn parse_any(text: &str) -> Result<RatSet> {
        if text.trim_start().starts_with('[') {
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            Self::parse_text(text)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string array")
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// First 12 hex digits of [`RatSet::digest`], for table columns.
    pub fn short_digest(&self) -> String {
        self.digest()[..12].to_string()
    }
}

fn merge_common<'a>(a: &'a [Scalar], b: &'a [Scalar], mut hit: impl FnMut(&'a Scalar)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                hit(&a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

impl fmt::Debug for RatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl FromIterator<Scalar> for RatSet {
    fn from_iter<T: IntoIterator<Item = Scalar>>(iter: T) -> Self {
        RatSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a RatSet {
    type Item = &'a Scalar;
    type IntoIter = std::slice::Iter<'a, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

impl Serialize for RatSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(RatSet::new(Vec::<Scalar>::deserialize(deserializer)?))
    }
}
