//! Truncated formal characters: sums Σ b_ν e^{anchor−ν} with ν ∈ Q̂⁺ of height
//! at most H, stored as offset vectors in simple-root coordinates.
//!
//! Offsets are packed eight bits per coordinate into a `u128` and bucketed by
//! height. Because every stored offset has height ≤ H ≤ 255, packed keys add
//! without carries.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};
use rustc_hash::FxHashMap;

use crate::lattice::{SimpleCoords, Weight};
use crate::scalar::{fmt_coeff, Coeff};

pub const MAX_RANK: usize = 16;
pub const MAX_HEIGHT: u32 = 255;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("rank {0} exceeds the packed-key limit of {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("height bound {0} exceeds {MAX_HEIGHT}")]
    HeightTooLarge(u32),
    #[error("factor root {0} is neither positive nor negative")]
    NotInY(Weight),
    #[error("exponent {0} is not in the anchor's root-lattice coset")]
    Coset(Weight),
    #[error("truncation overflow: exponent {0} lies above the anchor")]
    Overflow(Weight),
    #[error("series have different anchors or windows")]
    Incompatible,
    #[error("series is empty")]
    Empty,
}

/// (1 + sign·e^{−γ})^{exponent·multiplicity}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorForm {
    pub root: Weight,
    pub sign: i8,
    pub exponent: i32,
    pub multiplicity: u32,
}

impl FactorForm {
    /// (1 − e^{−γ})^{mult}, an even numerator factor.
    pub fn even(root: Weight, multiplicity: u32) -> Self {
        FactorForm {
            root,
            sign: -1,
            exponent: 1,
            multiplicity,
        }
    }

    /// (1 + e^{−γ})^{−mult}, an odd denominator factor.
    pub fn odd(root: Weight, multiplicity: u32) -> Self {
        FactorForm {
            root,
            sign: 1,
            exponent: -1,
            multiplicity,
        }
    }

    pub fn power(&self) -> i64 {
        self.exponent as i64 * self.multiplicity as i64
    }
}

/// Result of a coefficient query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup<C> {
    Value(C),
    OutsideWindow,
}

impl<C: Coeff> Lookup<C> {
    pub fn value(self) -> Option<C> {
        match self {
            Lookup::Value(c) => Some(c),
            Lookup::OutsideWindow => None,
        }
    }
}

fn pack(o: &[u32]) -> u128 {
    o.iter()
        .enumerate()
        .fold(0u128, |k, (i, &x)| k | ((x as u128) << (8 * i)))
}

fn unpack(k: u128, rank: usize) -> Vec<u32> {
    (0..rank).map(|i| ((k >> (8 * i)) & 0xff) as u32).collect()
}

#[derive(Clone)]
pub struct TruncatedSeries<C> {
    coords: Arc<SimpleCoords>,
    anchor: Weight,
    h: u32,
    buckets: Vec<FxHashMap<u128, C>>,
    /// False once a term has been dropped for exceeding H.
    complete: bool,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn zero(coords: Arc<SimpleCoords>, anchor: Weight, h: u32) -> Result<Self, SeriesError> {
        if coords.rank() > MAX_RANK {
            return Err(SeriesError::RankTooLarge(coords.rank()));
        }
        if h > MAX_HEIGHT {
            return Err(SeriesError::HeightTooLarge(h));
        }
        Ok(TruncatedSeries {
            coords,
            anchor,
            h,
            buckets: (0..=h).map(|_| FxHashMap::default()).collect(),
            complete: true,
        })
    }

    /// e^{anchor}.
    pub fn unit(coords: Arc<SimpleCoords>, anchor: Weight, h: u32) -> Result<Self, SeriesError> {
        let mut s = Self::zero(coords, anchor, h)?;
        s.buckets[0].insert(0, C::one());
        Ok(s)
    }

    /// c·e^{μ}, or the zero series when μ is below the window.
    pub fn monomial(
        coords: Arc<SimpleCoords>,
        anchor: Weight,
        h: u32,
        mu: &Weight,
        c: C,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(coords, anchor, h)?;
        let off = s.offset_of(mu)?;
        let ht: i64 = off.iter().sum();
        if ht > h as i64 {
            s.complete = false;
        } else if !c.is_zero() {
            let o: Vec<u32> = off.iter().map(|&x| x as u32).collect();
            s.buckets[ht as usize].insert(pack(&o), c);
        }
        Ok(s)
    }

    /// The same offsets read against another anchor.
    pub fn reanchored(&self, anchor: Weight) -> Self {
        TruncatedSeries {
            anchor,
            ..self.clone()
        }
    }

    pub fn anchor(&self) -> &Weight {
        &self.anchor
    }

    pub fn height_bound(&self) -> u32 {
        self.h
    }

    pub fn coords(&self) -> &Arc<SimpleCoords> {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.rank()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.buckets.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Offset anchor − μ in simple-root coordinates; errors when μ is not in
    /// the anchor's coset or lies above it.
    pub fn offset_of(&self, mu: &Weight) -> Result<Vec<i64>, SeriesError> {
        let c = self
            .coords
            .decompose(&(&self.anchor - mu))
            .ok_or_else(|| SeriesError::Coset(mu.clone()))?;
        let v: Option<Vec<i64>> = c
            .iter()
            .map(|x| {
                if x.is_integer() {
                    x.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect();
        let v = v.ok_or_else(|| SeriesError::Coset(mu.clone()))?;
        if v.iter().any(|&x| x < 0) {
            return Err(SeriesError::Overflow(mu.clone()));
        }
        Ok(v)
    }

    /// The weight anchor − Σ oᵢαᵢ.
    pub fn weight_of(&self, o: &[u32]) -> Weight {
        let mut w = self.anchor.clone();
        for (a, &x) in self.coords.simple.iter().zip(o) {
            if x != 0 {
                w = &w - &a.scale_int(x as i64);
            }
        }
        w
    }

    /// The coefficient of e^{μ}.
    pub fn coefficient(&self, mu: &Weight) -> Lookup<C> {
        match self.offset_of(mu) {
            Ok(o) => {
                let ht: i64 = o.iter().sum();
                if ht > self.h as i64 {
                    return Lookup::OutsideWindow;
                }
                let o: Vec<u32> = o.iter().map(|&x| x as u32).collect();
                Lookup::Value(
                    self.buckets[ht as usize]
                        .get(&pack(&o))
                        .cloned()
                        .unwrap_or_else(C::zero),
                )
            }
            Err(_) => Lookup::OutsideWindow,
        }
    }

    /// Coefficient at an offset vector.
    pub fn coefficient_at_offset(&self, o: &[u32]) -> C {
        let ht: u32 = o.iter().sum();
        if ht > self.h {
            return C::zero();
        }
        self.buckets[ht as usize]
            .get(&pack(o))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// (offset, coefficient) pairs in lexicographic offset order.
    pub fn terms(&self) -> Vec<(Vec<u32>, C)> {
        let r = self.rank();
        let mut v: Vec<(Vec<u32>, C)> = self
            .buckets
            .iter()
            .flat_map(|b| b.iter().map(move |(k, c)| (unpack(*k, r), c.clone())))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// (weight, coefficient) pairs, by offset order.
    pub fn support(&self) -> Vec<(Weight, C)> {
        self.terms()
            .into_iter()
            .map(|(o, c)| (self.weight_of(&o), c))
            .collect()
    }

    /// The dominance-maximal elements of the support.
    pub fn max_support(&self) -> Result<Vec<Weight>, SeriesError> {
        let t = self.terms();
        if t.is_empty() {
            return Err(SeriesError::Empty);
        }
        let le = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x <= y);
        Ok(t.iter()
            .filter(|(o, _)| !t.iter().any(|(p, _)| p != o && le(p, o)))
            .map(|(o, _)| self.weight_of(o))
            .collect())
    }

    fn insert_add(&mut self, ht: usize, key: u128, c: &C) {
        let e = self.buckets[ht].entry(key).or_insert_with(C::zero);
        *e += c;
        if e.is_zero() {
            self.buckets[ht].remove(&key);
        }
    }

    fn prune(&mut self) {
        for b in &mut self.buckets {
            b.retain(|_, c| !c.is_zero());
        }
    }

    /// Multiplies by (1 + a·e^{−γ})^e where γ is given by its positive offset
    /// vector and a = ±1.
    pub fn mul_positive(&mut self, gamma: &[u32], a: i8, e: i64) {
        let hg: u32 = gamma.iter().sum();
        assert!(hg > 0, "factor root must be nonzero");
        if hg > self.h {
            // e^{−γ} and its powers fall outside the window.
            if !self.is_empty() {
                self.complete = false;
            }
            return;
        }
        let g = pack(gamma);
        let hg = hg as usize;
        let top = self.h as usize;
        let neg = a < 0;
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                if self.buckets[top + 1 - hg..].iter().any(|b| !b.is_empty()) {
                    self.complete = false;
                }
                for src in (0..=top - hg).rev() {
                    let (lo, hi) = self.buckets.split_at_mut(src + hg);
                    let from = &lo[src];
                    let to = &mut hi[0];
                    for (k, c) in from.iter() {
                        let t = to.entry(k + g).or_insert_with(C::zero);
                        if neg {
                            *t -= c;
                        } else {
                            *t += c;
                        }
                    }
                }
            } else {
                if !self.is_empty() {
                    self.complete = false;
                }
                for src in 0..=top - hg {
                    let (lo, hi) = self.buckets.split_at_mut(src + hg);
                    let from = &lo[src];
                    let to = &mut hi[0];
                    for (k, c) in from.iter() {
                        if c.is_zero() {
                            continue;
                        }
                        let t = to.entry(k + g).or_insert_with(C::zero);
                        if neg {
                            *t += c;
                        } else {
                            *t -= c;
                        }
                    }
                }
            }
            self.prune();
        }
    }

    /// Multiplies every exponent by e^{−ν}, i.e. adds `d` to every offset.
    /// Raising exponents (negative entries in `d`) needs a complete series.
    pub fn shift_offsets(&mut self, d: &[i64]) -> Result<(), SeriesError> {
        if d.iter().all(|&x| x == 0) {
            return Ok(());
        }
        let raises = d.iter().any(|&x| x < 0);
        if raises && !self.complete {
            let w = self.weight_of(&vec![0; self.rank()]);
            return Err(SeriesError::Overflow(w));
        }
        let r = self.rank();
        let mut out: Vec<FxHashMap<u128, C>> = (0..=self.h).map(|_| FxHashMap::default()).collect();
        for b in &self.buckets {
            for (k, c) in b {
                let o = unpack(*k, r);
                let n: Vec<i64> = o.iter().zip(d).map(|(&x, &y)| x as i64 + y).collect();
                if n.iter().any(|&x| x < 0) {
                    let mut w = self.anchor.clone();
                    for (a, &x) in self.coords.simple.iter().zip(&n) {
                        w = &w - &a.scale_int(x);
                    }
                    return Err(SeriesError::Overflow(w));
                }
                let ht: i64 = n.iter().sum();
                if ht > self.h as i64 {
                    self.complete = false;
                    continue;
                }
                let n: Vec<u32> = n.iter().map(|&x| x as u32).collect();
                out[ht as usize].insert(pack(&n), c.clone());
            }
        }
        self.buckets = out;
        Ok(())
    }

    pub fn scale(&mut self, c: &C) {
        for b in &mut self.buckets {
            for v in b.values_mut() {
                *v = v.clone() * c.clone();
            }
        }
        self.prune();
    }

    pub fn negate(&mut self) {
        for b in &mut self.buckets {
            for v in b.values_mut() {
                *v = -v.clone();
            }
        }
    }

    fn compatible(&self, o: &Self) -> Result<(), SeriesError> {
        if self.anchor != o.anchor || self.h != o.h || self.rank() != o.rank() {
            Err(SeriesError::Incompatible)
        } else {
            Ok(())
        }
    }

    /// self += c·o.
    pub fn add_scaled(&mut self, o: &Self, c: &C) -> Result<(), SeriesError> {
        self.compatible(o)?;
        for (ht, b) in o.buckets.iter().enumerate() {
            for (k, v) in b {
                let x = v.clone() * c.clone();
                self.insert_add(ht, *k, &x);
            }
        }
        self.complete &= o.complete;
        Ok(())
    }

    pub fn add_assign(&mut self, o: &Self) -> Result<(), SeriesError> {
        self.add_scaled(o, &C::one())
    }

    pub fn sub_assign(&mut self, o: &Self) -> Result<(), SeriesError> {
        self.add_scaled(o, &-C::one())
    }

    /// Cauchy product truncated to H; the anchor is the sum of the anchors.
    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        if self.h != o.h || self.rank() != o.rank() {
            return Err(SeriesError::Incompatible);
        }
        let mut out = Self::zero(self.coords.clone(), &self.anchor + &o.anchor, self.h)?;
        out.complete = self.complete && o.complete;
        for (ha, ba) in self.buckets.iter().enumerate() {
            for (hb, bb) in o.buckets.iter().enumerate() {
                if ha + hb > self.h as usize {
                    if !ba.is_empty() && !bb.is_empty() {
                        out.complete = false;
                    }
                    continue;
                }
                for (ka, va) in ba {
                    for (kb, vb) in bb {
                        let x = va.clone() * vb.clone();
                        out.insert_add(ha + hb, ka + kb, &x);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Drops everything above height `h2` (in the same anchor).
    pub fn truncate(&self, h2: u32) -> Self {
        let h2 = h2.min(self.h);
        let mut out = self.clone();
        out.h = h2;
        if out.buckets[h2 as usize + 1..].iter().any(|b| !b.is_empty()) {
            out.complete = false;
        }
        out.buckets.truncate(h2 as usize + 1);
        out
    }

    /// Multiplies by a factor given as a weight, normalizing negative roots
    /// by (1 + a·e^{−γ}) = a·e^{−γ}(1 + a·e^{γ}).
    pub fn mul_factor(&mut self, f: &FactorForm) -> Result<(), SeriesError> {
        let c = self
            .coords
            .decompose(&f.root)
            .ok_or_else(|| SeriesError::NotInY(f.root.clone()))?;
        let ints: Option<Vec<i64>> = c
            .iter()
            .map(|x| {
                if x.is_integer() {
                    x.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect();
        let ints = ints.ok_or_else(|| SeriesError::Coset(f.root.clone()))?;
        let e = f.power();
        if ints.iter().all(|&x| x >= 0) && ints.iter().any(|&x| x > 0) {
            let g: Vec<u32> = ints.iter().map(|&x| x as u32).collect();
            self.mul_positive(&g, f.sign, e);
            Ok(())
        } else if ints.iter().all(|&x| x <= 0) && ints.iter().any(|&x| x < 0) {
            if f.sign < 0 && e % 2 != 0 {
                self.negate();
            }
            let d: Vec<i64> = ints.iter().map(|&x| x * e).collect();
            self.shift_offsets(&d)?;
            let g: Vec<u32> = ints.iter().map(|&x| (-x) as u32).collect();
            self.mul_positive(&g, f.sign, e);
            Ok(())
        } else {
            Err(SeriesError::NotInY(f.root.clone()))
        }
    }

    /// Debug dump: `(o1,o2,…)\tp/q` per term, lexicographic.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (o, c) in self.terms() {
            let o: Vec<String> = o.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("({})\t{}\n", o.join(","), fmt_coeff(&c)));
        }
        s
    }
}

impl<C: Coeff> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TruncatedSeries(anchor={}, H={}, terms={})",
            self.anchor,
            self.h,
            self.len()
        )
    }
}

impl<C: Coeff> PartialEq for TruncatedSeries<C> {
    fn eq(&self, o: &Self) -> bool {
        self.anchor == o.anchor && self.h == o.h && self.terms() == o.terms()
    }
}

/// Builds c·e^{lead}·∏ factors: negative factors are normalized on the
/// monomial first, then positive factors expand in increasing height.
pub fn build_product<C: Coeff>(
    coords: Arc<SimpleCoords>,
    anchor: Weight,
    h: u32,
    lead: &Weight,
    coeff: C,
    factors: &[FactorForm],
) -> Result<TruncatedSeries<C>, SeriesError> {
    let mut lead = lead.clone();
    let mut coeff = coeff;
    let mut positive: Vec<(Vec<u32>, i8, i64)> = Vec::with_capacity(factors.len());
    for f in factors {
        let c = coords
            .decompose(&f.root)
            .ok_or_else(|| SeriesError::NotInY(f.root.clone()))?;
        if c.iter().any(|x| !x.is_integer()) {
            return Err(SeriesError::Coset(f.root.clone()));
        }
        let pos = c.iter().all(|x| !x.is_negative()) && c.iter().any(|x| x.is_positive());
        let negr = c.iter().all(|x| !x.is_positive()) && c.iter().any(|x| x.is_negative());
        let e = f.power();
        if pos {
            positive.push((
                c.iter().map(|x| x.to_integer().to_u32().unwrap()).collect(),
                f.sign,
                e,
            ));
        } else if negr {
            if f.sign < 0 && e % 2 != 0 {
                coeff = -coeff;
            }
            lead = &lead - &f.root.scale_int(e);
            positive.push((
                c.iter()
                    .map(|x| (-x).to_integer().to_u32().unwrap())
                    .collect(),
                f.sign,
                e,
            ));
        } else {
            return Err(SeriesError::NotInY(f.root.clone()));
        }
    }
    let mut s = TruncatedSeries::monomial(coords, anchor, h, &lead, coeff)?;
    if s.is_empty() {
        return Ok(s);
    }
    positive.sort_by_key(|(g, _, _)| g.iter().sum::<u32>());
    for (g, a, e) in positive {
        s.mul_positive(&g, a, e);
    }
    Ok(s)
}

/// Offset of `lead` after normalizing `factors`, without expanding: the
/// height below the anchor of the product's maximal exponent.
pub fn leading_offset(
    coords: &SimpleCoords,
    anchor: &Weight,
    lead: &Weight,
    factors: &[FactorForm],
) -> Result<Vec<i64>, SeriesError> {
    let mut lead = lead.clone();
    for f in factors {
        let c = coords
            .decompose(&f.root)
            .ok_or_else(|| SeriesError::NotInY(f.root.clone()))?;
        let negr = c.iter().all(|x| !x.is_positive()) && c.iter().any(|x| x.is_negative());
        let pos = c.iter().all(|x| !x.is_negative()) && c.iter().any(|x| x.is_positive());
        if negr {
            lead = &lead - &f.root.scale_int(f.power());
        } else if !pos {
            return Err(SeriesError::NotInY(f.root.clone()));
        }
    }
    let c = coords
        .decompose(&(anchor - &lead))
        .ok_or_else(|| SeriesError::Coset(lead.clone()))?;
    c.iter()
        .map(|x| {
            if x.is_integer() {
                x.to_integer()
                    .to_i64()
                    .ok_or_else(|| SeriesError::Coset(lead.clone()))
            } else {
                Err(SeriesError::Coset(lead.clone()))
            }
        })
        .collect()
}
