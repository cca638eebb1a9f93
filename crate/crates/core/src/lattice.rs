//! Weights on ĥ*, the invariant bilinear form, and coordinates with respect to
//! a set of simple roots.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::scalar::{q, qi, Q};

/// A basis vector of ĥ*. The derived order (ε by index, then δ_j by index,
/// then δ, then Λ₀) fixes iteration order everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BasisSymbol {
    Eps(u32),
    Del(u32),
    Delta,
    Lambda0,
}

impl BasisSymbol {
    pub fn is_finite(self) -> bool {
        matches!(self, BasisSymbol::Eps(_) | BasisSymbol::Del(_))
    }
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisSymbol::Eps(i) => write!(f, "e{i}"),
            BasisSymbol::Del(j) => write!(f, "d{j}"),
            BasisSymbol::Delta => write!(f, "delta"),
            BasisSymbol::Lambda0 => write!(f, "L0"),
        }
    }
}

/// A vector of ĥ* with exact rational coordinates. Zero coordinates are never
/// stored, so derived equality is coordinate-wise equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    coords: BTreeMap<BasisSymbol, Q>,
}

impl Weight {
    pub fn zero() -> Self {
        Weight::default()
    }

    pub fn basis(s: BasisSymbol) -> Self {
        Weight::zero().with(s, qi(1))
    }

    pub fn eps(i: u32) -> Self {
        Weight::basis(BasisSymbol::Eps(i))
    }

    pub fn del(j: u32) -> Self {
        Weight::basis(BasisSymbol::Del(j))
    }

    pub fn delta() -> Self {
        Weight::basis(BasisSymbol::Delta)
    }

    pub fn lambda0() -> Self {
        Weight::basis(BasisSymbol::Lambda0)
    }

    /// Returns `self` with coordinate `s` increased by `c`.
    pub fn with(mut self, s: BasisSymbol, c: Q) -> Self {
        self.add_coord(s, &c);
        self
    }

    fn add_coord(&mut self, s: BasisSymbol, c: &Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coords.entry(s).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coords.remove(&s);
        }
    }

    pub fn coord(&self, s: BasisSymbol) -> Q {
        self.coords.get(&s).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisSymbol, &Q)> {
        self.coords.iter()
    }

    pub fn scale(&self, c: &Q) -> Weight {
        if c.is_zero() {
            return Weight::zero();
        }
        Weight {
            coords: self.coords.iter().map(|(s, v)| (*s, v * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Weight {
        self.scale(&qi(n))
    }

    /// The component in the span of the ε_i, δ_j.
    pub fn finite_part(&self) -> Weight {
        Weight {
            coords: self
                .coords
                .iter()
                .filter(|(s, _)| s.is_finite())
                .map(|(s, v)| (*s, v.clone()))
                .collect(),
        }
    }

    /// Adds `c·w` in place.
    pub fn add_scaled(&mut self, w: &Weight, c: &Q) {
        for (s, v) in &w.coords {
            self.add_coord(*s, &(v * c));
        }
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, o: &Weight) -> Weight {
        let mut r = self.clone();
        for (s, v) in &o.coords {
            r.add_coord(*s, v);
        }
        r
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, o: &Weight) -> Weight {
        let mut r = self.clone();
        for (s, v) in &o.coords {
            r.add_coord(*s, &-v);
        }
        r
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        &self + &o
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        &self - &o
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        self.scale(&qi(-1))
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        -&self
    }
}

/// Sorted `coef*symbol` sum, e.g. `3/1*L0 + -1/2*e1`; the zero weight is `0`.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(s, c)| format!("{}/{}*{}", c.numer(), c.denom(), s))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("basis symbol {0} is not valid for this family")]
    UnknownSymbol(BasisSymbol),
}

/// Signature of the invariant form on the finite block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signature {
    /// (ε_i,ε_j)=σδ_ij, (δ_i,δ_j)=−σδ_ij.
    Standard { sigma: i8 },
    /// (ε₁,ε₁)=3/2, (ε₂,ε₂)=1/2, (ε₃,ε₃)=−2.
    G3,
}

/// The invariant form on ĥ* for one family at fixed ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub signature: Signature,
    pub n_eps: u32,
    pub n_del: u32,
}

impl BilinearForm {
    pub fn standard(sigma: i8, n_eps: u32, n_del: u32) -> Self {
        BilinearForm {
            signature: Signature::Standard { sigma },
            n_eps,
            n_del,
        }
    }

    pub fn g3() -> Self {
        BilinearForm {
            signature: Signature::G3,
            n_eps: 3,
            n_del: 0,
        }
    }

    /// Finite basis symbols in canonical order.
    pub fn finite_symbols(&self) -> Vec<BasisSymbol> {
        (1..=self.n_eps)
            .map(BasisSymbol::Eps)
            .chain((1..=self.n_del).map(BasisSymbol::Del))
            .collect()
    }

    pub fn check_symbol(&self, s: BasisSymbol) -> Result<(), LatticeError> {
        let ok = match s {
            BasisSymbol::Eps(i) => i >= 1 && i <= self.n_eps,
            BasisSymbol::Del(j) => j >= 1 && j <= self.n_del,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(LatticeError::UnknownSymbol(s))
        }
    }

    pub fn check(&self, w: &Weight) -> Result<(), LatticeError> {
        w.iter().try_for_each(|(s, _)| self.check_symbol(*s))
    }

    /// Pairing of two basis symbols.
    pub fn pair(&self, a: BasisSymbol, b: BasisSymbol) -> Q {
        use BasisSymbol::*;
        match (a, b) {
            (Lambda0, Delta) | (Delta, Lambda0) => qi(1),
            (Eps(i), Eps(j)) if i == j => match self.signature {
                Signature::Standard { sigma } => qi(sigma as i64),
                Signature::G3 => match i {
                    1 => q(3, 2),
                    2 => q(1, 2),
                    _ => qi(-2),
                },
            },
            (Del(i), Del(j)) if i == j => match self.signature {
                Signature::Standard { sigma } => qi(-(sigma as i64)),
                Signature::G3 => Q::zero(),
            },
            _ => Q::zero(),
        }
    }

    /// (λ, μ). Symbols are assumed valid (see [`BilinearForm::check`]).
    pub fn form(&self, l: &Weight, m: &Weight) -> Q {
        let mut acc = Q::zero();
        for (s, a) in l.iter() {
            match s {
                BasisSymbol::Lambda0 => acc += a * m.coord(BasisSymbol::Delta),
                BasisSymbol::Delta => acc += a * m.coord(BasisSymbol::Lambda0),
                _ => {
                    let b = m.coord(*s);
                    if !b.is_zero() {
                        acc += a * b * self.pair(*s, *s);
                    }
                }
            }
        }
        acc
    }

    pub fn norm(&self, l: &Weight) -> Q {
        self.form(l, l)
    }

    /// Gram matrix on the finite block.
    pub fn gram(&self) -> Vec<Vec<Q>> {
        let syms = self.finite_symbols();
        syms.iter()
            .map(|a| syms.iter().map(|b| self.pair(*a, *b)).collect())
            .collect()
    }
}

/// Coordinates with respect to an ordered list of linearly independent simple
/// roots spanning a sublattice of ĥ* (finite symbols, plus δ in the affine case).
#[derive(Clone, Debug)]
pub struct SimpleCoords {
    pub symbols: Vec<BasisSymbol>,
    pub simple: Vec<Weight>,
    inverse: Vec<Vec<Q>>,
}

impl SimpleCoords {
    /// Fails when the roots are dependent or do not span `symbols`.
    pub fn new(symbols: Vec<BasisSymbol>, simple: Vec<Weight>) -> Option<Self> {
        if symbols.len() != simple.len() {
            return None;
        }
        let m: Vec<Vec<Q>> = symbols
            .iter()
            .map(|s| simple.iter().map(|a| a.coord(*s)).collect())
            .collect();
        for a in &simple {
            if a.iter().any(|(s, _)| !symbols.contains(s)) {
                return None;
            }
        }
        let inverse = linalg::invert(&m)?;
        Some(SimpleCoords {
            symbols,
            simple,
            inverse,
        })
    }

    pub fn rank(&self) -> usize {
        self.simple.len()
    }

    /// c with ν = Σ c_i α_i, or `None` when ν is outside the span.
    pub fn decompose(&self, nu: &Weight) -> Option<Vec<Q>> {
        if nu.iter().any(|(s, _)| !self.symbols.contains(s)) {
            return None;
        }
        let v: Vec<Q> = self.symbols.iter().map(|s| nu.coord(*s)).collect();
        Some(
            self.inverse
                .iter()
                .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// Integer coordinates, or `None` when ν is outside the root lattice.
    pub fn decompose_int(&self, nu: &Weight) -> Option<Vec<i64>> {
        self.decompose(nu)?
            .iter()
            .map(crate::scalar::q_to_i64)
            .collect()
    }

    pub fn recompose(&self, c: &[Q]) -> Weight {
        let mut w = Weight::zero();
        for (a, ci) in self.simple.iter().zip(c) {
            w.add_scaled(a, ci);
        }
        w
    }

    /// True iff μ − ν ∈ Q̂⁺.
    pub fn dominates(&self, mu: &Weight, nu: &Weight) -> bool {
        match self.decompose(&(mu - nu)) {
            Some(c) => c.iter().all(|x| x.is_integer() && !x.is_negative()),
            None => false,
        }
    }

    /// True iff ν is a nonzero element of Q̂⁺.
    pub fn is_positive(&self, nu: &Weight) -> bool {
        !nu.is_zero() && self.dominates(nu, &Weight::zero())
    }
}

/// Σ c_i.
pub fn height(c: &[Q]) -> Q {
    c.iter().sum()
}
