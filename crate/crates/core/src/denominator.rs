//! Both sides of the affine denominator identity as truncated series, and
//! the auxiliary checks run alongside the comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, FamilyId, FqSelector, Parity};
use crate::lattice::{BasisSymbol, SimpleCoords, Weight};
use crate::scalar::{fmt_pq, qi, Q};
use crate::series::{build_product, FactorForm, SeriesError, TruncatedSeries};
use crate::weylgroup::{self, GroupElement, Seed, ShellEnumeration, WeylError};
use crate::Series;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DenomError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("window: {0}")]
    Window(String),
}

/// Σ c_n qⁿ with q = e^{−δ}, known through qᵈᵉᵖᵗʰ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    pub coefficients: Vec<Q>,
    pub depth: u32,
}

impl QSeries {
    pub fn one(depth: u32) -> Self {
        let mut c = vec![Q::zero(); depth as usize + 1];
        c[0] = Q::one();
        QSeries {
            coefficients: c,
            depth,
        }
    }

    pub fn coefficient(&self, n: u32) -> Q {
        self.coefficients
            .get(n as usize)
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// Multiplies by (1 + a·qᵖ)^e.
    pub fn mul_binomial(&mut self, a: i64, p: u32, e: i64) {
        let p = p as usize;
        let a = qi(a);
        let n = self.coefficients.len();
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for i in (p..n).rev() {
                    let v = &self.coefficients[i - p] * &a;
                    self.coefficients[i] += v;
                }
            } else {
                for i in p..n {
                    let v = &self.coefficients[i - p] * &a;
                    self.coefficients[i] -= v;
                }
            }
        }
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let depth = self.depth.min(o.depth);
        let n = depth as usize + 1;
        let mut c = vec![Q::zero(); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += &self.coefficient(i as u32) * &o.coefficient(j as u32);
            }
        }
        QSeries {
            coefficients: c,
            depth,
        }
    }

    pub fn truncate(&self, depth: u32) -> QSeries {
        let depth = depth.min(self.depth);
        QSeries {
            coefficients: self.coefficients[..=depth as usize].to_vec(),
            depth,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == QSeries::one(self.depth)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match n {
                0 => fmt_pq(c),
                1 => format!("{}*q", fmt_pq(c)),
                _ => format!("{}*q^{}", fmt_pq(c), n),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} + O(q^{})", parts.join(" + "), self.depth + 1)
    }
}

/// The f(q) row for the family, through qᵈᵉᵖᵗʰ.
pub fn f_q(spec: &AlgebraSpec, depth: u32) -> QSeries {
    f_q_for(spec.fq, depth)
}

pub fn f_q_for(sel: FqSelector, depth: u32) -> QSeries {
    let mut s = QSeries::one(depth);
    let mut n = 1;
    while 2 * n < depth {
        let p = 2 * n + 1;
        match sel {
            FqSelector::One => {}
            FqSelector::AOddSquareInv => s.mul_binomial(-1, p, -2),
            FqSelector::AQuarterInv => s.mul_binomial(1, p, -1),
            FqSelector::DPlain => s.mul_binomial(-1, p, 1),
        }
        n += 1;
    }
    s
}

/// The truncation window shared by every series of one computation.
#[derive(Clone, Debug)]
pub struct Window {
    pub depth: u32,
    pub anchor: Weight,
    pub h: u32,
    pub coords: Arc<SimpleCoords>,
    /// Offset of ρ̂ below the anchor.
    pub rho_offset: Vec<i64>,
    pub q_depth: u32,
}

pub fn window(spec: &AlgebraSpec, depth: u32) -> Result<Window, DenomError> {
    let mut anchor = spec.rho_hat.clone();
    for (a, p) in spec.finite_positive_roots() {
        if p == Parity::Odd {
            anchor = &anchor + &a;
        }
    }
    let rho_offset = spec
        .coords
        .decompose_int(&(&anchor - &spec.rho_hat))
        .ok_or_else(|| DenomError::Window("anchor − ρ̂ is not in the root lattice".into()))?;
    let h = depth as i64 + rho_offset.iter().sum::<i64>();
    let h = u32::try_from(h).map_err(|_| DenomError::Window(format!("height bound {h}")))?;
    if h > crate::series::MAX_HEIGHT {
        return Err(DenomError::Window(format!(
            "height bound {h} exceeds {}",
            crate::series::MAX_HEIGHT
        )));
    }
    let qd = (qi(depth as i64) / spec.delta_height())
        .floor()
        .to_integer()
        .to_u32()
        .unwrap_or(0);
    Ok(Window {
        depth,
        anchor,
        h,
        coords: Arc::new(spec.coords.clone()),
        rho_offset,
        q_depth: qd,
    })
}

impl Window {
    pub fn zero(&self) -> Result<Series, DenomError> {
        Ok(TruncatedSeries::zero(
            self.coords.clone(),
            self.anchor.clone(),
            self.h,
        )?)
    }

    pub fn build(&self, seed: &Seed, coeff: i64) -> Result<Series, DenomError> {
        Ok(build_product(
            self.coords.clone(),
            self.anchor.clone(),
            self.h,
            &seed.lead,
            BigInt::from(coeff),
            &seed.factors,
        )?)
    }

    pub fn weight_at(&self, o: &[u32]) -> Weight {
        let mut w = self.anchor.clone();
        for (a, &x) in self.coords.simple.iter().zip(o) {
            if x != 0 {
                w = &w - &a.scale_int(x as i64);
            }
        }
        w
    }
}

fn factor_for(root: Weight, parity: Parity, mult: u32) -> FactorForm {
    match parity {
        Parity::Even => FactorForm::even(root, mult),
        Parity::Odd => FactorForm::odd(root, mult),
    }
}

/// e^{ρ̂}·R̂ restricted to roots of height ≤ `max_height`.
pub fn affine_seed(spec: &AlgebraSpec, max_height: u32) -> Seed {
    let factors = spec
        .positive_roots_below(&qi(max_height as i64))
        .into_iter()
        .map(|r| factor_for(r.root, r.parity, r.multiplicity))
        .collect();
    Seed {
        lead: spec.rho_hat.clone(),
        factors,
    }
}

/// e^{ρ̂}·R over the finite positive roots.
pub fn finite_seed(spec: &AlgebraSpec) -> Seed {
    let factors = spec
        .finite_positive_roots()
        .into_iter()
        .map(|(a, p)| factor_for(a, p, 1))
        .collect();
    Seed {
        lead: spec.rho_hat.clone(),
        factors,
    }
}

/// e^{ρ̂}/∏_{β∈S}(1+e^{−β}).
pub fn isotropic_seed(spec: &AlgebraSpec) -> Seed {
    Seed {
        lead: spec.rho_hat.clone(),
        factors: spec
            .isotropic
            .iter()
            .map(|b| FactorForm::odd(b.clone(), 1))
            .collect(),
    }
}

pub fn build_lhs(spec: &AlgebraSpec, w: &Window) -> Result<Series, DenomError> {
    w.build(&affine_seed(spec, w.depth), 1)
}

/// Negative-control mutations of the right-hand side.
#[derive(Clone, Debug, Default)]
pub struct Controls {
    /// Adds the given value to the qⁿ coefficient of f(q).
    pub mutate_fq: Option<(u32, i64)>,
    /// Drops the i-th nonidentity contributing translation.
    pub drop_translation: Option<usize>,
    /// Flips the sign of the i-th nonidentity contributing translation.
    pub flip_sign: Option<usize>,
}

impl Controls {
    pub fn is_empty(&self) -> bool {
        self.mutate_fq.is_none() && self.drop_translation.is_none() && self.flip_sign.is_none()
    }
}

/// Σ_{t∈T′} sgn(t)·t(e^{ρ̂}R), before multiplication by f(q).
pub fn translation_sum(
    spec: &AlgebraSpec,
    w: &Window,
    controls: &Controls,
) -> Result<(Series, ShellEnumeration), DenomError> {
    let seed = finite_seed(spec);
    let (ts, en) =
        weylgroup::enumerate_t_prime(spec, &w.anchor, w.h as i64, std::slice::from_ref(&seed))?;
    let terms = signed_terms(ts, controls);
    let sum = sum_terms(spec, w, &seed, &terms)?;
    Ok((sum, en))
}

/// Pairs each group element with its sign, then applies the sign-flip and
/// drop controls to the nonidentity elements.
fn signed_terms(els: Vec<GroupElement>, controls: &Controls) -> Vec<(GroupElement, i64)> {
    let mut terms: Vec<(GroupElement, i64)> = els
        .into_iter()
        .map(|g| {
            let s = g.sign as i64;
            (g, s)
        })
        .collect();
    let nonid: Vec<usize> = (0..terms.len())
        .filter(|&i| !terms[i].0.is_identity())
        .collect();
    if let Some(&j) = controls.flip_sign.and_then(|i| nonid.get(i)) {
        terms[j].1 = -terms[j].1;
    }
    if let Some(&j) = controls.drop_translation.and_then(|i| nonid.get(i)) {
        terms.remove(j);
    }
    terms
}

fn sum_terms(
    spec: &AlgebraSpec,
    w: &Window,
    seed: &Seed,
    terms: &[(GroupElement, i64)],
) -> Result<Series, DenomError> {
    let form = &spec.form;
    let zero = w.zero()?;
    terms
        .par_iter()
        .map(|(g, c)| w.build(&seed.moved(form, g), *c))
        .try_fold(
            || zero.clone(),
            |mut acc, t| {
                acc.add_assign(&t?)?;
                Ok::<_, DenomError>(acc)
            },
        )
        .try_reduce(
            || zero.clone(),
            |mut a, b| {
                a.add_assign(&b)?;
                Ok(a)
            },
        )
}

fn delta_shift(spec: &AlgebraSpec, n: u32) -> Option<Vec<i64>> {
    spec.delta_coeffs()
        .iter()
        .map(|x| {
            let v = x * qi(n as i64);
            if v.is_integer() {
                v.to_integer().to_i64()
            } else {
                None
            }
        })
        .collect()
}

/// Σ_n c_n·e^{−nδ}·S over the n with nδ in the root lattice; the other
/// terms are returned by `mul_qseries_strays`.
pub fn mul_qseries(spec: &AlgebraSpec, s: &Series, f: &QSeries) -> Result<Series, DenomError> {
    let mut out = TruncatedSeries::zero(s.coords().clone(), s.anchor().clone(), s.height_bound())?;
    for (n, c) in f.coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !c.is_integer() {
            return Err(DenomError::Unsupported(format!(
                "non-integral q-coefficient {}",
                fmt_pq(c)
            )));
        }
        let Some(shift) = delta_shift(spec, n as u32) else {
            continue;
        };
        let mut t = s.clone();
        t.shift_offsets(&shift)?;
        out.add_scaled(&t, &c.to_integer())?;
    }
    Ok(out)
}

/// The part of f(q)·S outside the anchor's coset of the root lattice (only
/// when δ itself is not in it), one series per coset anchored at
/// anchor − rδ.
pub fn mul_qseries_strays(
    spec: &AlgebraSpec,
    s: &Series,
    f: &QSeries,
) -> Result<Vec<Series>, DenomError> {
    let Some(p) = (1..=spec.m.max(1) * 2).find(|&n| delta_shift(spec, n).is_some()) else {
        return Err(DenomError::Unsupported(
            "no multiple of δ lies in the root lattice".into(),
        ));
    };
    let mut out = Vec::new();
    for r in 1..p {
        let anchor = s.anchor() - &Weight::delta().scale_int(r as i64);
        let base = s.reanchored(anchor.clone());
        let mut acc = TruncatedSeries::zero(s.coords().clone(), anchor, s.height_bound())?;
        for (n, c) in f.coefficients.iter().enumerate().skip(r as usize) {
            if c.is_zero() || !(n - r as usize).is_multiple_of(p as usize) {
                continue;
            }
            let mut t = base.clone();
            t.shift_offsets(&delta_shift(spec, n as u32 - r).unwrap())?;
            acc.add_scaled(&t, &c.to_integer())?;
        }
        let lost = (spec.delta_height() * qi(r as i64))
            .ceil()
            .to_integer()
            .to_u32()
            .unwrap_or(u32::MAX);
        let acc = acc.truncate(s.height_bound().saturating_sub(lost));
        if !acc.is_empty() {
            out.push(acc);
        }
    }
    Ok(out)
}

/// f(q) with the requested mutation applied.
pub fn controlled_fq(spec: &AlgebraSpec, w: &Window, controls: &Controls) -> QSeries {
    let mut f = f_q(spec, w.q_depth.max(1));
    if let Some((n, d)) = controls.mutate_fq {
        if (n as usize) < f.coefficients.len() {
            f.coefficients[n as usize] += qi(d);
        }
    }
    f
}

pub fn build_rhs_translation_sum(
    spec: &AlgebraSpec,
    w: &Window,
    controls: &Controls,
) -> Result<(Series, ShellEnumeration), DenomError> {
    let (s, en) = translation_sum(spec, w, controls)?;
    let f = controlled_fq(spec, w, controls);
    if f.is_one() {
        return Ok((s, en));
    }
    Ok((mul_qseries(spec, &s, &f)?, en))
}

/// The right-hand side used by `verify`: f(q) times the translation sum, or
/// the Ŵ′ sum when Ŵ′ is not T′ ⋊ W′ (G(3)^(2)). Also returns the terms of
/// the product that leave the anchor's coset, and a description of the
/// enumeration.
pub fn build_rhs(
    spec: &AlgebraSpec,
    w: &Window,
    controls: &Controls,
) -> Result<(Series, Vec<Series>, String), DenomError> {
    let (s, d) = if isotropic_form(spec) == Ok(IsotropicForm::Affine) {
        let (s, n) = isotropic_sum(spec, w, controls)?;
        (
            s,
            format!("{n} elements of the affine Weyl group of the even subsystem"),
        )
    } else {
        let (s, en) = translation_sum(spec, w, controls)?;
        (s, en.describe())
    };
    let f = controlled_fq(spec, w, controls);
    if f.is_one() {
        return Ok((s, vec![], d));
    }
    let strays = mul_qseries_strays(spec, &s, &f)?;
    Ok((mul_qseries(spec, &s, &f)?, strays, d))
}

/// Which group the isotropic sum runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsotropicForm {
    /// T′ ⋊ W′.
    Plain,
    /// ½ Σ over T′ ⋊ W_{C_k}.
    Extended,
    /// Ŵ′ enumerated by affine reflections.
    Affine,
}

pub fn isotropic_form(spec: &AlgebraSpec) -> Result<IsotropicForm, DenomError> {
    match spec.family {
        FamilyId::A2km12km1 => Err(DenomError::Unsupported(
            "the isotropic sum is not well defined for A(2k-1,2k-1)^(2)".into(),
        )),
        FamilyId::G3 => Ok(IsotropicForm::Affine),
        _ if spec.extended_sign => Ok(IsotropicForm::Extended),
        _ => Ok(IsotropicForm::Plain),
    }
}

/// F_{Ŵ′}(e^{ρ̂}/∏_{β∈S}(1+e^{−β})), with the number of group elements used.
pub fn build_rhs_isotropic_sum(
    spec: &AlgebraSpec,
    w: &Window,
) -> Result<(Series, usize), DenomError> {
    isotropic_sum(spec, w, &Controls::default())
}

fn isotropic_sum(
    spec: &AlgebraSpec,
    w: &Window,
    controls: &Controls,
) -> Result<(Series, usize), DenomError> {
    let seed = isotropic_seed(spec);
    let form = &spec.form;
    match isotropic_form(spec)? {
        IsotropicForm::Affine => {
            let gens = weylgroup::affine_prime_generators(spec)?;
            let els = weylgroup::enumerate_affine(spec, &gens, &qi(w.depth as i64), 1_000_000)?;
            let terms = signed_terms(els, controls);
            Ok((sum_terms(spec, w, &seed, &terms)?, terms.len()))
        }
        form_kind => {
            let fin = if form_kind == IsotropicForm::Extended {
                weylgroup::w_ck(spec)?
            } else {
                weylgroup::w_prime(spec)?
            };
            let seeds: Vec<Seed> = fin.iter().map(|y| seed.moved(form, y)).collect();
            let (ts, _) = weylgroup::enumerate_t_prime(spec, &w.anchor, w.h as i64, &seeds)?;
            let mut els = Vec::new();
            for t in &ts {
                for y in &fin {
                    let g = t.compose(form, y);
                    if seed.moved(form, &g).drop_below(spec, &w.anchor)? <= w.h as i64 {
                        els.push(g);
                    }
                }
            }
            let terms = signed_terms(els, controls);
            let mut sum = sum_terms(spec, w, &seed, &terms)?;
            if form_kind == IsotropicForm::Extended {
                let mut half = w.zero()?;
                for (o, c) in sum.terms() {
                    let h = crate::scalar::Coeff::div_int(&c, 2).ok_or_else(|| {
                        DenomError::Unsupported("odd coefficient in the doubled sum".into())
                    })?;
                    let mu = w.weight_at(&o);
                    half.add_assign(&TruncatedSeries::monomial(
                        w.coords.clone(),
                        w.anchor.clone(),
                        w.h,
                        &mu,
                        h,
                    )?)?;
                }
                sum = half;
            }
            Ok((sum, terms.len()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub weight: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: String,
    pub k: u32,
    pub l: u32,
    pub depth: u32,
    pub q_depth: u32,
    pub anchor: String,
    pub status: String,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub mismatches: Vec<Mismatch>,
    pub checks: BTreeMap<String, CheckResult>,
}

impl VerificationReport {
    pub fn is_match(&self) -> bool {
        self.status == "match"
    }
}

/// Coefficient differences over the whole window, lowest offsets first.
pub fn compare(a: &Series, b: &Series) -> Vec<Mismatch> {
    let ta: BTreeMap<Vec<u32>, BigInt> = a.terms().into_iter().collect();
    let tb: BTreeMap<Vec<u32>, BigInt> = b.terms().into_iter().collect();
    let mut keys: Vec<&Vec<u32>> = ta.keys().chain(tb.keys()).collect();
    keys.sort_by_key(|o| (o.iter().sum::<u32>(), (*o).clone()));
    keys.dedup();
    let zero = BigInt::zero();
    keys.into_iter()
        .filter_map(|o| {
            let x = ta.get(o).unwrap_or(&zero);
            let y = tb.get(o).unwrap_or(&zero);
            (x != y).then(|| Mismatch {
                weight: a.weight_of(o).to_string(),
                lhs: format!("{x}/1"),
                rhs: format!("{y}/1"),
            })
        })
        .collect()
}

/// Every support weight μ satisfies (μ,μ) = (ρ̂,ρ̂).
pub fn casimir_check(spec: &AlgebraSpec, sides: &[(&str, &Series)]) -> CheckResult {
    let target = spec.form.norm(&spec.rho_hat);
    let mut total = 0usize;
    for (name, s) in sides {
        for (mu, _) in s.support() {
            total += 1;
            if spec.form.norm(&mu) != target {
                return CheckResult::new(
                    false,
                    format!("{name}: ({mu},{mu}) != (ρ̂,ρ̂) = {}", fmt_pq(&target)),
                );
            }
        }
    }
    CheckResult::new(
        true,
        format!(
            "{total} support weights on the shell (μ,μ) = {}",
            fmt_pq(&target)
        ),
    )
}

pub fn casimir_support_check(spec: &AlgebraSpec, depth: u32) -> Result<CheckResult, DenomError> {
    let w = window(spec, depth)?;
    let lhs = build_lhs(spec, &w)?;
    let (rhs, _) = build_rhs_translation_sum(spec, &w, &Controls::default())?;
    Ok(casimir_check(spec, &[("lhs", &lhs), ("rhs", &rhs)]))
}

/// The quotient F_{T′}(e^{ρ̂}R)/(e^{ρ̂}R̂) as a q-series, with its check.
#[derive(Clone, Debug)]
pub struct RatioReport {
    pub ratio: QSeries,
    pub escaping: Vec<String>,
    pub check: CheckResult,
}

pub fn ratio_invariant(spec: &AlgebraSpec, depth: u32) -> Result<RatioReport, DenomError> {
    if !spec.h_dual.is_zero() {
        return Err(DenomError::Unsupported(
            "the ratio property concerns h∨ = 0 families".into(),
        ));
    }
    let w = window(spec, depth)?;
    let (mut s, _) = translation_sum(spec, &w, &Controls::default())?;
    for r in spec.positive_roots_below(&qi(w.h as i64)) {
        let e = r.multiplicity as i32;
        let inv = match r.parity {
            Parity::Even => FactorForm {
                root: r.root,
                sign: -1,
                exponent: -1,
                multiplicity: e as u32,
            },
            Parity::Odd => FactorForm {
                root: r.root,
                sign: 1,
                exponent: 1,
                multiplicity: e as u32,
            },
        };
        s.mul_factor(&inv)?;
    }
    let dc: Vec<Q> = spec.delta_coeffs();
    let base: Vec<Q> = w.rho_offset.iter().map(|&x| qi(x)).collect();
    let mut ratio = QSeries {
        coefficients: vec![Q::zero(); w.q_depth as usize + 1],
        depth: w.q_depth,
    };
    let mut escaping = Vec::new();
    for (o, c) in s.terms() {
        // exponent − ρ̂ = −(o − base) in simple coordinates
        let rel: Vec<Q> = o
            .iter()
            .zip(&base)
            .map(|(&x, b)| qi(x as i64) - b)
            .collect();
        let n = dc
            .iter()
            .zip(&rel)
            .find(|(d, _)| !d.is_zero())
            .map(|(d, r)| r / d);
        let on_line = n
            .as_ref()
            .map(|n| {
                n.is_integer()
                    && !n.is_negative()
                    && dc.iter().zip(&rel).all(|(d, r)| &(d * n) == r)
            })
            .unwrap_or(false);
        let ht: u32 = o.iter().sum();
        if ht as i64 > w.h as i64 {
            continue;
        }
        if !on_line {
            escaping.push(format!(
                "{} (coefficient {c})",
                &w.weight_at(&o) - &spec.rho_hat
            ));
            continue;
        }
        let n = n.unwrap().to_integer().to_usize().unwrap();
        if n <= w.q_depth as usize {
            ratio.coefficients[n] = Q::from_integer(c);
        }
    }
    let f = f_q(spec, w.q_depth);
    let prod = ratio.mul(&f);
    let pass = escaping.is_empty() && prod.is_one();
    let detail = format!(
        "ratio = {}; ratio·f(q) = {}; {} escaping terms; q_depth {}",
        ratio,
        prod,
        escaping.len(),
        w.q_depth
    );
    Ok(RatioReport {
        ratio,
        escaping,
        check: CheckResult::new(pass, detail),
    })
}

/// Both sides of the finite identity over the finite root lattice:
/// e^ρR and Σ_{w∈W^#} sgn(w)·w(e^ρ/∏_{β∈S}(1+e^{−β})).
pub struct FiniteIdentity {
    pub lhs: Series,
    pub rhs: Series,
    pub group_order: usize,
    pub letters: Vec<BasisSymbol>,
    pub anchor: Weight,
    pub coords: Arc<SimpleCoords>,
}

pub fn finite_identity(
    spec: &AlgebraSpec,
    depth: u32,
    letters: Option<&[BasisSymbol]>,
) -> Result<FiniteIdentity, DenomError> {
    let syms = spec.form.finite_symbols();
    let simple: Vec<Weight> = spec.finite_simple().map(|(w, _)| w.clone()).collect();
    let coords = Arc::new(
        SimpleCoords::new(syms, simple)
            .ok_or_else(|| DenomError::Window("finite simple roots are not a basis".into()))?,
    );
    let pos = spec.finite_positive_roots();
    let mut anchor = spec.rho.clone();
    for (a, p) in &pos {
        if *p == Parity::Odd {
            anchor = &anchor + a;
        }
    }
    let off = coords
        .decompose_int(&(&anchor - &spec.rho))
        .ok_or_else(|| DenomError::Window("anchor − ρ is not in the root lattice".into()))?;
    let h = depth + off.iter().sum::<i64>() as u32;
    let letters: Vec<BasisSymbol> = letters
        .map(|l| l.to_vec())
        .unwrap_or_else(|| spec.sharp_letters());
    let group = weylgroup::w_sharp(spec, &letters)?;
    let lhs_seed = Seed {
        lead: spec.rho.clone(),
        factors: pos
            .iter()
            .map(|(a, p)| factor_for(a.clone(), *p, 1))
            .collect(),
    };
    let iso = Seed {
        lead: spec.rho.clone(),
        factors: spec
            .isotropic
            .iter()
            .map(|b| FactorForm::odd(b.clone(), 1))
            .collect(),
    };
    let lhs = build_product(
        coords.clone(),
        anchor.clone(),
        h,
        &lhs_seed.lead,
        BigInt::one(),
        &lhs_seed.factors,
    )?;
    let mut rhs = TruncatedSeries::zero(coords.clone(), anchor.clone(), h)?;
    for g in &group {
        let s = iso.moved(&spec.form, g);
        let t = build_product(
            coords.clone(),
            anchor.clone(),
            h,
            &s.lead,
            BigInt::from(g.sign),
            &s.factors,
        )?;
        rhs.add_assign(&t)?;
    }
    Ok(FiniteIdentity {
        lhs,
        rhs,
        group_order: group.len(),
        letters,
        anchor,
        coords,
    })
}

pub fn finite_identity_check(
    spec: &AlgebraSpec,
    depth: u32,
    letters: Option<&[BasisSymbol]>,
) -> Result<CheckResult, DenomError> {
    let fi = finite_identity(spec, depth, letters)?;
    let pass = fi.lhs == fi.rhs;
    let ls: Vec<String> = fi.letters.iter().map(|s| s.to_string()).collect();
    Ok(CheckResult::new(
        pass,
        format!(
            "finite part {}, W^# on [{}] of order {}, {} terms (lhs) vs {} (rhs) at height <= {}",
            spec.finite_type,
            ls.join(" "),
            fi.group_order,
            fi.lhs.len(),
            fi.rhs.len(),
            depth
        ),
    ))
}

/// One row of the root-count table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub label: String,
    pub expected: Option<u64>,
    pub actual: u64,
}

impl CountRow {
    pub fn ok(&self) -> bool {
        self.expected.map(|e| e == self.actual).unwrap_or(true)
    }
}

fn imaginary_total(spec: &AlgebraSpec, s: u32) -> u64 {
    (spec.imaginary_mult(s, Parity::Even) + spec.imaginary_mult(s, Parity::Odd)) as u64
}

/// Class counts |Δ_p^{(j)}| and dim ĝ_{sδ}, with the closed forms printed
/// for the three h∨ = 0 families.
pub fn root_count_table(spec: &AlgebraSpec) -> Vec<CountRow> {
    let k = spec.k as u64;
    let counts = spec.class_counts();
    let expected: BTreeMap<String, u64> = match spec.family {
        FamilyId::A2km12km1 => [
            ("D0(0)", 4 * k * k - 2 * k),
            ("D0(1)", 4 * k * k - 2 * k),
            ("D1(0)", 4 * k * k),
            ("D1(1)", 4 * k * k),
            ("dim h", 2 * k),
            ("dim g_1d", 2 * k - 2),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect(),
        FamilyId::A2k2k4 => [
            ("D0(0)", 4 * k * k),
            ("D0(2)", 4 * k * k),
            ("D0(1)", 2 * k),
            ("D0(3)", 2 * k),
            ("D1(0)", 4 * k * k + 2 * k),
            ("D1(2)", 4 * k * k + 2 * k),
            ("D1(1)", 2 * k),
            ("D1(3)", 2 * k),
            ("dim h", 2 * k),
            ("dim g_2d", 2 * k),
            ("dim g_1d", 1),
            ("dim g_3d", 1),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect(),
        FamilyId::Dk1k => [
            ("D0(0)", 4 * k * k),
            ("D0(1)", 2 * k),
            ("D1(1)", 2 * k),
            ("D1(0)", 4 * k * k + 2 * k),
            ("dim h", 2 * k),
            ("dim g_1d", 1),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect(),
        _ => BTreeMap::new(),
    };
    let mut rows = Vec::new();
    for ((j, p), c) in &counts {
        let label = format!("D{}({})", if *p == Parity::Even { 0 } else { 1 }, j);
        rows.push(CountRow {
            expected: expected.get(&label).copied(),
            label,
            actual: *c as u64,
        });
    }
    rows.push(CountRow {
        label: "dim h".into(),
        expected: expected.get("dim h").copied(),
        actual: imaginary_total(spec, 0),
    });
    for s in 1..spec.m {
        let label = format!("dim g_{s}d");
        rows.push(CountRow {
            expected: expected.get(&label).copied(),
            label,
            actual: imaginary_total(spec, s),
        });
    }
    let (e, o) = spec.bookkeeping();
    rows.push(CountRow {
        label: "dim g0 (even loop)".into(),
        expected: Some(spec.loop_dims.0),
        actual: e,
    });
    rows.push(CountRow {
        label: "dim g1 (odd loop)".into(),
        expected: Some(spec.loop_dims.1),
        actual: o,
    });
    rows
}

pub fn root_count_report(spec: &AlgebraSpec) -> CheckResult {
    let rows = root_count_table(spec);
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.ok())
        .map(|r| {
            format!(
                "{}: expected {}, got {}",
                r.label,
                r.expected.unwrap(),
                r.actual
            )
        })
        .collect();
    let checked = rows.iter().filter(|r| r.expected.is_some()).count();
    if bad.is_empty() {
        CheckResult::new(true, format!("{checked} counts match"))
    } else {
        CheckResult::new(false, bad.join("; "))
    }
}

/// Which auxiliary checks `verify` runs.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub isotropic: bool,
    pub ratio: bool,
    pub casimir: bool,
    pub controls: Controls,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            isotropic: true,
            ratio: true,
            casimir: true,
            controls: Controls::default(),
        }
    }
}

fn error_report(
    spec: &AlgebraSpec,
    depth: u32,
    q_depth: u32,
    anchor: String,
    name: &str,
    e: &DenomError,
) -> VerificationReport {
    let mut checks = BTreeMap::new();
    checks.insert(name.to_string(), CheckResult::new(false, e.to_string()));
    VerificationReport {
        family: spec.family.token().to_string(),
        k: spec.k,
        l: spec.l,
        depth,
        q_depth,
        anchor,
        status: "error".into(),
        lhs_terms: 0,
        rhs_terms: 0,
        mismatches: vec![],
        checks,
    }
}

/// Compares e^{ρ̂}R̂ with f(q)·Σ_{t∈T′} sgn(t)·t(e^{ρ̂}R) over the window.
pub fn verify(spec: &AlgebraSpec, depth: u32, opts: &VerifyOptions) -> VerificationReport {
    let w = match window(spec, depth) {
        Ok(w) => w,
        Err(e) => return error_report(spec, depth, 0, spec.rho_hat.to_string(), "window", &e),
    };
    let anchor = w.anchor.to_string();
    let lhs = match build_lhs(spec, &w) {
        Ok(s) => s,
        Err(e) => return error_report(spec, depth, w.q_depth, anchor, "lhs", &e),
    };
    let mut checks = BTreeMap::new();
    let (rhs, strays) = match build_rhs(spec, &w, &opts.controls) {
        Ok((s, strays, d)) => {
            checks.insert("enumeration".to_string(), CheckResult::new(true, d));
            (s, strays)
        }
        Err(e) => {
            let mut r = error_report(spec, depth, w.q_depth, anchor, "rhs", &e);
            r.lhs_terms = lhs.len();
            return r;
        }
    };
    let mut mismatches = compare(&lhs, &rhs);
    // The left side has no terms off the anchor's coset.
    for t in &strays {
        let zero = TruncatedSeries::zero(t.coords().clone(), t.anchor().clone(), t.height_bound());
        mismatches.extend(zero.map(|z| compare(&z, t)).unwrap_or_default());
    }
    let f = controlled_fq(spec, &w, &opts.controls);
    checks.insert("f_q".into(), CheckResult::new(true, f.to_string()));
    let c = rhs.coefficient(&spec.rho_hat).value();
    checks.insert(
        "rho_hat_coefficient".into(),
        CheckResult::new(
            c == Some(BigInt::one()),
            format!(
                "coefficient of e^ρ̂ on the sum: {}",
                c.map(|x| x.to_string()).unwrap_or("outside window".into())
            ),
        ),
    );
    if opts.casimir {
        checks.insert(
            "casimir".into(),
            casimir_check(spec, &[("lhs", &lhs), ("rhs", &rhs)]),
        );
    }
    if opts.isotropic {
        checks.insert("isotropic_sum".into(), alternate_form_check(spec, &w));
    }
    if opts.ratio && spec.h_dual.is_zero() {
        let c = match ratio_invariant(spec, depth) {
            Ok(r) => r.check,
            Err(e) => CheckResult::new(false, e.to_string()),
        };
        checks.insert("ratio".into(), c);
    }
    let all = checks.values().all(|c| c.pass);
    VerificationReport {
        family: spec.family.token().to_string(),
        k: spec.k,
        l: spec.l,
        depth,
        q_depth: w.q_depth,
        anchor,
        status: if mismatches.is_empty() && all {
            "match"
        } else {
            "mismatch"
        }
        .into(),
        lhs_terms: lhs.len(),
        rhs_terms: rhs.len() + strays.iter().map(|t| t.len()).sum::<usize>(),
        mismatches,
        checks,
    }
}

/// Agreement of the translation sum Σ_{t∈T′} sgn(t)·t(e^{ρ̂}R) with the
/// isotropic sum over Ŵ′ (or ½ Σ over T′ ⋊ W_{C_k}). Both sides are taken
/// before multiplication by f(q). Reported "unsupported" when either form
/// is not defined for the family.
pub fn alternate_form_check(spec: &AlgebraSpec, w: &Window) -> CheckResult {
    let (iso, n) = match build_rhs_isotropic_sum(spec, w) {
        Ok(x) => x,
        Err(DenomError::Unsupported(d)) => {
            return CheckResult::new(true, format!("unsupported: {d}"))
        }
        Err(e) => return CheckResult::new(false, e.to_string()),
    };
    let tr = match translation_sum(spec, w, &Controls::default()) {
        Ok((t, _)) => t,
        Err(e) if isotropic_form(spec) == Ok(IsotropicForm::Affine) => {
            return CheckResult::new(
                true,
                format!("unsupported: the translation form is undefined since T′ is not contained in Ŵ′ ({e})"),
            )
        }
        Err(e) => return CheckResult::new(false, e.to_string()),
    };
    let mm = compare(&iso, &tr);
    if mm.is_empty() {
        CheckResult::new(
            true,
            format!(
                "{n} group elements; agrees with the translation sum on {} terms",
                iso.len()
            ),
        )
    } else {
        CheckResult::new(
            false,
            format!(
                "{n} group elements; {} coefficients differ from the translation sum, first at {}",
                mm.len(),
                mm[0].weight
            ),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_spec;

    #[test]
    fn f_q_rows() {
        let a = f_q_for(FqSelector::AOddSquareInv, 6);
        assert_eq!(a.coefficient(3), qi(2));
        assert_eq!(a.coefficient(5), qi(2));
        assert_eq!(a.coefficient(6), qi(3));
        let d = f_q_for(FqSelector::DPlain, 4);
        assert_eq!(d.coefficients, vec![qi(1), qi(0), qi(0), qi(-1), qi(0)]);
        let one = f_q_for(FqSelector::One, 5);
        assert!(one.is_one());
    }

    #[test]
    fn lhs_leading_terms() {
        let s = build_spec(FamilyId::A2k2lm1, 1, 1).unwrap();
        let w = window(&s, 2).unwrap();
        let lhs = build_lhs(&s, &w).unwrap();
        assert_eq!(lhs.coefficient(&s.rho_hat).value(), Some(BigInt::one()));
        for (a, _) in &s.simple_roots {
            assert_eq!(
                lhs.coefficient(&(&s.rho_hat - a)).value(),
                Some(BigInt::from(-1))
            );
        }
    }

    #[test]
    fn small_identity() {
        let s = build_spec(FamilyId::A2k2lm1, 1, 1).unwrap();
        let r = verify(&s, 4, &VerifyOptions::default());
        assert!(r.is_match(), "{r:?}");
    }
}
