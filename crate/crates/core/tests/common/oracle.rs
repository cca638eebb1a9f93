//! Dense brute-force expansion of e^ρR and of
//! Σ_{w∈W^#} sgn(w)·w(e^ρ/∏_{β∈S}(1+e^{−β})) on a full box of offsets.
//!
//! Nothing here goes through the library's series, group or solver code:
//! coordinates come from a local Gaussian elimination, the group from
//! closing reflections on a generic vector, and the expansion from in-place
//! recurrences on an i128 array.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_traits::{One, ToPrimitive, Zero};
use superdenom::{AlgebraSpec, BasisSymbol, Parity, Weight, Q};

/// Coefficients indexed by offsets in [0, h]^r; entries of height > h are
/// never read.
pub struct Dense {
    pub rank: usize,
    pub h: usize,
    pub data: Vec<i128>,
}

impl Dense {
    fn new(rank: usize, h: usize) -> Self {
        Dense {
            rank,
            h,
            data: vec![0; (h + 1).pow(rank as u32)],
        }
    }

    fn stride(&self, i: usize) -> usize {
        (self.h + 1).pow(i as u32)
    }

    fn decode(&self, mut idx: usize) -> Vec<usize> {
        let b = self.h + 1;
        (0..self.rank)
            .map(|_| {
                let x = idx % b;
                idx /= b;
                x
            })
            .collect()
    }

    fn shift_of(&self, g: &[usize]) -> usize {
        g.iter().enumerate().map(|(i, &x)| x * self.stride(i)).sum()
    }

    /// Multiplies by (1 + s·x^g), g ≥ 0 and nonzero.
    fn mul_binomial(&mut self, g: &[usize], s: i128) {
        let d = self.shift_of(g);
        for idx in (0..self.data.len()).rev() {
            let o = self.decode(idx);
            if o.iter().zip(g).all(|(a, b)| a >= b) {
                self.data[idx] += s * self.data[idx - d];
            }
        }
    }

    /// Multiplies by (1 + s·x^g)^{−1} = Σ (−s)^n x^{ng}.
    fn div_binomial(&mut self, g: &[usize], s: i128) {
        let d = self.shift_of(g);
        for idx in 0..self.data.len() {
            let o = self.decode(idx);
            if o.iter().zip(g).all(|(a, b)| a >= b) {
                self.data[idx] -= s * self.data[idx - d];
            }
        }
    }

    /// Nonzero coefficients of height ≤ h, keyed by offset.
    pub fn terms(&self) -> BTreeMap<Vec<usize>, i128> {
        let mut out = BTreeMap::new();
        for (idx, &c) in self.data.iter().enumerate() {
            if c != 0 {
                let o = self.decode(idx);
                if o.iter().sum::<usize>() <= self.h {
                    out.insert(o, c);
                }
            }
        }
        out
    }
}

/// Coordinates of `w` in the basis `basis` over the symbols `syms`, by
/// exact elimination.
pub fn solve(basis: &[Weight], syms: &[BasisSymbol], w: &Weight) -> Option<Vec<Q>> {
    let n = basis.len();
    let rows = syms.len();
    let mut m: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Q> = basis.iter().map(|b| b.coord(syms[i])).collect();
            r.push(w.coord(syms[i]));
            r
        })
        .collect();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let p = (r..rows).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        piv.push(r);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    Some(piv.iter().map(|&i| m[i][n].clone()).collect())
}

fn int_coords(basis: &[Weight], syms: &[BasisSymbol], w: &Weight) -> Vec<i64> {
    solve(basis, syms, w)
        .expect("weight outside the span")
        .into_iter()
        .map(|x| {
            assert!(x.is_integer(), "non-integral coordinate");
            x.to_integer().to_i64().unwrap()
        })
        .collect()
}

fn reflect(spec: &AlgebraSpec, a: &Weight, v: &Weight) -> Weight {
    let c = spec.form.form(v, a) * Q::from_integer(2.into()) / spec.form.norm(a);
    let mut out = v.clone();
    out.add_scaled(a, &-c);
    out
}

/// Elements of the group generated by the reflections in `roots`, each as
/// (action on the listed weights, sign). Elements are identified by the
/// image of a generic vector.
pub fn closure(spec: &AlgebraSpec, roots: &[Weight], track: &[Weight]) -> Vec<(Vec<Weight>, i128)> {
    let syms = spec.form.finite_symbols();
    let mut generic = Weight::zero();
    for (i, s) in syms.iter().enumerate() {
        generic = generic.with(
            *s,
            Q::from_integer((1i64 << (3 * i + 1)).into()) + Q::new(1.into(), 7.into()),
        );
    }
    let mut start = vec![generic];
    start.extend(track.iter().cloned());
    let mut seen: HashSet<Weight> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(start.clone(), 1i128)]);
    seen.insert(start[0].clone());
    while let Some((imgs, s)) = queue.pop_front() {
        out.push((imgs[1..].to_vec(), s));
        for a in roots {
            let next: Vec<Weight> = imgs.iter().map(|v| reflect(spec, a, v)).collect();
            if seen.insert(next[0].clone()) {
                queue.push_back((next, -s));
            }
        }
        assert!(out.len() < 10_000, "group closure too large");
    }
    out
}

/// Both sides of the finite identity at height ≤ `depth` below the anchor
/// ρ + Σ_{odd positive}β, as offset → coefficient maps over the finite
/// simple roots.
pub struct FiniteOracle {
    pub lhs: BTreeMap<Vec<usize>, i128>,
    pub rhs: BTreeMap<Vec<usize>, i128>,
    pub group_order: usize,
    pub simple: Vec<Weight>,
    pub anchor: Weight,
}

pub fn finite_identity(spec: &AlgebraSpec, depth: usize, letters: &[BasisSymbol]) -> FiniteOracle {
    let syms = spec.form.finite_symbols();
    let simple: Vec<Weight> = spec.finite_simple().map(|(w, _)| w.clone()).collect();
    let r = simple.len();
    let pos = spec.finite_positive_roots();
    let mut anchor = spec.rho.clone();
    for (a, p) in &pos {
        if *p == Parity::Odd {
            anchor = &anchor + a;
        }
    }
    let top: i64 = int_coords(&simple, &syms, &(&anchor - &spec.rho))
        .iter()
        .sum();
    let h = depth + top as usize;

    // One product c·e^λ·∏(1 + s e^{−γ})^{±1} expanded densely.
    let expand = |lead: &Weight, c: i128, factors: &[(Weight, i128, bool)]| -> Dense {
        let mut c = c;
        let mut lead_off = int_coords(&simple, &syms, &(&anchor - lead));
        let mut pos_factors = Vec::new();
        for (g, s, inverse) in factors {
            let v = int_coords(&simple, &syms, g);
            if v.iter().all(|&x| x >= 0) {
                pos_factors.push((v, *s, *inverse));
            } else {
                assert!(v.iter().all(|&x| x <= 0), "root of mixed sign");
                // (1 + s e^{−γ}) = s e^{−γ}(1 + s e^{γ}), γ negative.
                c *= s;
                for (o, x) in lead_off.iter_mut().zip(&v) {
                    if *inverse {
                        *o -= x;
                    } else {
                        *o += x;
                    }
                }
                pos_factors.push((v.iter().map(|x| -x).collect(), *s, *inverse));
            }
        }
        let mut d = Dense::new(r, h);
        assert!(
            lead_off.iter().all(|&x| x >= 0),
            "leading term above the anchor"
        );
        let lo: Vec<usize> = lead_off.iter().map(|&x| x as usize).collect();
        if lo.iter().sum::<usize>() <= h {
            let idx = d.shift_of(&lo);
            d.data[idx] = c;
        }
        for (g, s, inverse) in pos_factors {
            let g: Vec<usize> = g.iter().map(|&x| x as usize).collect();
            if inverse {
                d.div_binomial(&g, s);
            } else {
                d.mul_binomial(&g, s);
            }
        }
        d
    };

    let lhs_factors: Vec<(Weight, i128, bool)> = pos
        .iter()
        .map(|(a, p)| match p {
            Parity::Even => (a.clone(), -1, false),
            Parity::Odd => (a.clone(), 1, true),
        })
        .collect();
    let lhs = expand(&spec.rho, 1, &lhs_factors).terms();

    let roots: Vec<Weight> = pos
        .iter()
        .filter(|(a, p)| {
            *p == Parity::Even
                && a.iter().all(|(s, _)| letters.contains(s))
                && !spec.form.norm(a).is_zero()
        })
        .map(|(a, _)| a.clone())
        .collect();
    let mut track = vec![spec.rho.clone()];
    track.extend(spec.isotropic.iter().cloned());
    let group = closure(spec, &roots, &track);
    let mut rhs: BTreeMap<Vec<usize>, i128> = BTreeMap::new();
    for (imgs, sgn) in &group {
        let factors: Vec<(Weight, i128, bool)> =
            imgs[1..].iter().map(|b| (b.clone(), 1, true)).collect();
        for (o, c) in expand(&imgs[0], *sgn, &factors).terms() {
            *rhs.entry(o).or_insert(0) += c;
        }
    }
    rhs.retain(|_, c| *c != 0);
    FiniteOracle {
        lhs,
        rhs,
        group_order: group.len(),
        simple,
        anchor,
    }
}

/// Converts a library series' support to the oracle's offset keys.
pub fn offsets_of(
    oracle: &FiniteOracle,
    syms: &[BasisSymbol],
    support: &[(Weight, num_bigint::BigInt)],
) -> BTreeMap<Vec<usize>, i128> {
    support
        .iter()
        .map(|(w, c)| {
            let o = int_coords(&oracle.simple, syms, &(&oracle.anchor - w));
            (
                o.iter().map(|&x| x as usize).collect(),
                c.to_i128().unwrap(),
            )
        })
        .collect()
}
