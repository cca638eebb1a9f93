//! Affine Weyl group elements in translation/linear normal form, the sign
//! function (with the diagram-automorphism extension), finite closures and
//! certified enumeration of translation lattices.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::algebra::AlgebraSpec;
use crate::lattice::{BasisSymbol, BilinearForm, Weight};
use crate::linalg;
use crate::scalar::{qi, Q};
use crate::series::{leading_offset, FactorForm, SeriesError};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("cannot reflect in the isotropic root {0}")]
    Isotropic(Weight),
    #[error("{0} has a component outside the finite span")]
    NotFinite(Weight),
    #[error("group closure exceeded {0} elements")]
    CapExceeded(usize),
    #[error("sign undefined for this element: {0}")]
    SignUndefined(String),
    #[error("enumeration not certified at radius {radius}: {detail}")]
    Certification { radius: u32, detail: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// g = t_μ ∘ y, with y linear on the finite block and fixing δ and Λ₀.
#[derive(Clone, Debug)]
pub struct GroupElement {
    /// `linear[i][j]` is the coefficient of symbol i in y(symbol j).
    pub linear: Vec<Vec<Q>>,
    pub translation: Weight,
    pub sign: i8,
    /// Membership in Ŵ′ (always true outside the extended families).
    pub in_affine_prime: bool,
}

impl PartialEq for GroupElement {
    fn eq(&self, o: &Self) -> bool {
        self.linear == o.linear && self.translation == o.translation
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.linear.hash(h);
        self.translation.hash(h);
    }
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        let linear = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect();
        GroupElement {
            linear,
            translation: Weight::zero(),
            sign: 1,
            in_affine_prime: true,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.linear.len())
    }

    pub fn is_translation(&self) -> bool {
        self.linear == Self::identity(self.linear.len()).linear
    }

    /// y(λ): the linear part on the finite block, identity on δ and Λ₀.
    pub fn apply_linear(&self, form: &BilinearForm, l: &Weight) -> Weight {
        let syms = form.finite_symbols();
        let mut out = Weight::zero();
        for (s, c) in l.iter() {
            match syms.iter().position(|x| x == s) {
                Some(j) => {
                    for (i, t) in syms.iter().enumerate() {
                        let v = &self.linear[i][j];
                        if !v.is_zero() {
                            out.add_scaled(&Weight::basis(*t), &(v * c));
                        }
                    }
                }
                None => out.add_scaled(&Weight::basis(*s), c),
            }
        }
        out
    }

    /// (t_μ∘y)(λ) = y(λ) + (λ,δ)μ − ((y(λ),μ) + ½(μ,μ)(λ,δ))δ.
    pub fn apply(&self, form: &BilinearForm, l: &Weight) -> Weight {
        let y = self.apply_linear(form, l);
        translate(form, &self.translation, &y)
    }

    /// self ∘ other: (t_a y)(t_b z) = t_{a + y b}(yz).
    pub fn compose(&self, form: &BilinearForm, o: &GroupElement) -> GroupElement {
        let n = self.linear.len();
        let linear = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.linear[i][k] * &o.linear[k][j]).sum())
                    .collect()
            })
            .collect();
        let translation = &self.translation + &self.apply_linear(form, &o.translation);
        GroupElement {
            linear,
            translation,
            sign: self.sign * o.sign,
            in_affine_prime: self.in_affine_prime == o.in_affine_prime,
        }
    }

    pub fn det(&self) -> Q {
        linalg::det(&self.linear)
    }
}

/// t_μ(λ) = λ + (λ,δ)μ − ((λ,μ) + ½(μ,μ)(λ,δ))δ.
pub fn translate(form: &BilinearForm, mu: &Weight, l: &Weight) -> Weight {
    if mu.is_zero() {
        return l.clone();
    }
    let ld = form.form(l, &Weight::delta());
    let mut out = l.clone();
    out.add_scaled(mu, &ld);
    let c = form.form(l, mu) + form.norm(mu) * &ld / qi(2);
    out.add_scaled(&Weight::delta(), &-c);
    out
}

/// Sign from the normal form: det y, times (−1)^{p(g)} in the extended
/// families, where p counts the M′-coordinate sum of μ and the sign changes
/// of y on the Δ′ letters.
pub fn sign_of(
    spec: &AlgebraSpec,
    linear: &[Vec<Q>],
    mu: &Weight,
) -> Result<(i8, bool), WeylError> {
    let d = linalg::det(linear);
    let s = if d == qi(1) {
        1
    } else if d == qi(-1) {
        -1
    } else {
        return Err(WeylError::SignUndefined(format!("determinant {d}")));
    };
    if !spec.extended_sign {
        return Ok((s, true));
    }
    let syms = spec.form.finite_symbols();
    let letters = &spec.delta_prime.letters;
    let mut p = Q::zero();
    for x in letters {
        p += mu.coord(*x);
    }
    if !p.is_integer() {
        return Err(WeylError::SignUndefined(format!(
            "translation {mu} is outside M′"
        )));
    }
    let mut parity = (p.to_integer() % 2u32 != num_bigint::BigInt::zero()) as u32;
    for x in letters {
        let j = syms.iter().position(|s| s == x).unwrap();
        let col: Vec<(usize, &Q)> = letters
            .iter()
            .map(|y| syms.iter().position(|s| s == y).unwrap())
            .map(|i| (i, &linear[i][j]))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        match col.as_slice() {
            [(_, v)] if v.abs() == qi(1) => {
                if v.is_negative() {
                    parity += 1;
                }
            }
            _ => {
                return Err(WeylError::SignUndefined(
                    "linear part is not a signed permutation of Δ′".into(),
                ))
            }
        }
    }
    let even = parity.is_multiple_of(2);
    Ok((if even { s } else { -s }, even))
}

/// s_α for α = a + nδ: t_{−2n a/(a,a)} ∘ s_a.
pub fn reflection(spec: &AlgebraSpec, alpha: &Weight) -> Result<GroupElement, WeylError> {
    if !alpha.coord(BasisSymbol::Lambda0).is_zero() {
        return Err(WeylError::NotFinite(alpha.clone()));
    }
    let form = &spec.form;
    let a = alpha.finite_part();
    let n = alpha.coord(BasisSymbol::Delta);
    let aa = form.norm(&a);
    if aa.is_zero() {
        return Err(WeylError::Isotropic(alpha.clone()));
    }
    let syms = form.finite_symbols();
    let mut linear = vec![vec![Q::zero(); syms.len()]; syms.len()];
    for (j, s) in syms.iter().enumerate() {
        let e = Weight::basis(*s);
        let c = form.form(&e, &a) * qi(2) / &aa;
        let mut img = e;
        img.add_scaled(&a, &-c);
        for (i, t) in syms.iter().enumerate() {
            linear[i][j] = img.coord(*t);
        }
    }
    let translation = a.scale(&(-(qi(2) * n) / aa));
    let (sign, in_affine_prime) = sign_of(spec, &linear, &translation)?;
    Ok(GroupElement {
        linear,
        translation,
        sign,
        in_affine_prime,
    })
}

/// t_μ for μ in the finite span.
pub fn translation(spec: &AlgebraSpec, mu: &Weight) -> Result<GroupElement, WeylError> {
    if mu.iter().any(|(s, _)| !s.is_finite()) {
        return Err(WeylError::NotFinite(mu.clone()));
    }
    let mut g = GroupElement::identity(spec.form.finite_symbols().len());
    let (sign, inp) = sign_of(spec, &g.linear, mu)?;
    g.translation = mu.clone();
    g.sign = sign;
    g.in_affine_prime = inp;
    Ok(g)
}

/// Recomputes the sign of `g` from its normal form.
pub fn sign(spec: &AlgebraSpec, g: &GroupElement) -> Result<i8, WeylError> {
    sign_of(spec, &g.linear, &g.translation).map(|x| x.0)
}

/// The lattice whose translations form T′: the Δ′ letters themselves in the
/// extended families, M′ otherwise.
pub fn t_prime_basis(spec: &AlgebraSpec) -> Vec<Weight> {
    if spec.extended_sign {
        spec.delta_prime
            .letters
            .iter()
            .map(|s| Weight::basis(*s))
            .collect()
    } else {
        spec.delta_prime.lattice.clone()
    }
}

/// Closure of a generating set under composition (BFS order).
pub fn enumerate_finite_group(
    form: &BilinearForm,
    generators: &[GroupElement],
    cap: usize,
) -> Result<Vec<GroupElement>, WeylError> {
    let n = form.finite_symbols().len();
    let id = GroupElement::identity(n);
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut out = vec![id.clone()];
    seen.insert(id);
    let mut i = 0;
    while i < out.len() {
        let g = out[i].clone();
        for h in generators {
            let x = g.compose(form, h);
            if !seen.contains(&x) {
                if out.len() >= cap {
                    return Err(WeylError::CapExceeded(cap));
                }
                seen.insert(x.clone());
                out.push(x);
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Reflections in the given roots.
pub fn reflections(spec: &AlgebraSpec, roots: &[Weight]) -> Result<Vec<GroupElement>, WeylError> {
    roots.iter().map(|a| reflection(spec, a)).collect()
}

/// W′: generated by the level-0 reflections of Δ′.
pub fn w_prime(spec: &AlgebraSpec) -> Result<Vec<GroupElement>, WeylError> {
    let gens = reflections(spec, &spec.subsystem_finite_roots(&spec.delta_prime))?;
    enumerate_finite_group(&spec.form, &gens, FINITE_CAP)
}

/// W^# on the given letters.
pub fn w_sharp(
    spec: &AlgebraSpec,
    letters: &[BasisSymbol],
) -> Result<Vec<GroupElement>, WeylError> {
    let roots: Vec<Weight> = spec
        .finite_positive_roots()
        .into_iter()
        .filter(|(w, p)| {
            *p == crate::algebra::Parity::Even && w.iter().all(|(s, _)| letters.contains(s))
        })
        .map(|(w, _)| w)
        .collect();
    let gens = reflections(spec, &roots)?;
    let mut g = enumerate_finite_group(&spec.form, &gens, FINITE_CAP)?;
    for x in g.iter_mut() {
        x.sign = if x.det() == qi(1) { 1 } else { -1 };
    }
    Ok(g)
}

/// W_{C_k} = ⟨W′, s_{ε_k}⟩ for the extended families.
pub fn w_ck(spec: &AlgebraSpec) -> Result<Vec<GroupElement>, WeylError> {
    let mut gens = reflections(spec, &spec.subsystem_finite_roots(&spec.delta_prime))?;
    if let Some(x) = spec.delta_prime.letters.last() {
        gens.push(reflection(spec, &Weight::basis(*x).scale_int(2))?);
    }
    enumerate_finite_group(&spec.form, &gens, FINITE_CAP)
}

pub const FINITE_CAP: usize = 100_000;

/// A closed-form term e^{lead}·∏ factors, to be moved by group elements.
#[derive(Clone, Debug)]
pub struct Seed {
    pub lead: Weight,
    pub factors: Vec<FactorForm>,
}

impl Seed {
    pub fn moved(&self, form: &BilinearForm, g: &GroupElement) -> Seed {
        Seed {
            lead: g.apply(form, &self.lead),
            factors: self
                .factors
                .iter()
                .map(|f| FactorForm {
                    root: g.apply(form, &f.root),
                    ..f.clone()
                })
                .collect(),
        }
    }

    /// Height of the anchor minus the normalized leading exponent.
    pub fn drop_below(&self, spec: &AlgebraSpec, anchor: &Weight) -> Result<i64, SeriesError> {
        Ok(
            leading_offset(&spec.coords, anchor, &self.lead, &self.factors)?
                .iter()
                .sum(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct ShellEnumeration {
    /// Lattice coordinates of every contributing point, by shell.
    pub points: Vec<Vec<i64>>,
    pub radius: u32,
    pub certified: bool,
    pub fallback: bool,
    pub visited: usize,
}

impl ShellEnumeration {
    pub fn describe(&self) -> String {
        format!(
            "{} contributing of {} visited, radius {}, {}",
            self.points.len(),
            self.visited,
            self.radius,
            if self.certified {
                "certified"
            } else {
                "fallback radius"
            }
        )
    }
}

/// Integer vectors of the given rank with ℓ¹ norm r, in lexicographic order.
pub fn shell(rank: usize, r: u32) -> Vec<Vec<i64>> {
    fn rec(rank: usize, r: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rank == 0 {
            if r == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if rank == 1 {
            if r == 0 {
                cur.push(0);
                out.push(cur.clone());
                cur.pop();
            } else {
                for v in [-r, r] {
                    cur.push(v);
                    out.push(cur.clone());
                    cur.pop();
                }
            }
            return;
        }
        for v in -r..=r {
            cur.push(v);
            rec(rank - 1, r - v.abs(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, r as i64, &mut Vec::new(), &mut out);
    out
}

fn predecessors(p: &[i64]) -> Vec<Vec<i64>> {
    (0..p.len())
        .filter(|&i| p[i] != 0)
        .map(|i| {
            let mut q = p.to_vec();
            q[i] -= q[i].signum();
            q
        })
        .collect()
}

/// Grows ℓ¹ shells until a quiet shell is followed by a quiet shell on which
/// the drop is nondecreasing along every outward step. `drop` returns the
/// smallest drop over the terms attached to a lattice point.
pub fn enumerate_shells<F>(
    rank: usize,
    bound: i64,
    cap: u32,
    drop: F,
) -> Result<ShellEnumeration, WeylError>
where
    F: Fn(&[i64]) -> Result<i64, WeylError> + Sync,
{
    let mut points = Vec::new();
    let mut visited = 0usize;
    let mut prev: HashMap<Vec<i64>, i64> = HashMap::new();
    let mut prev_quiet = false;
    for r in 0..=cap {
        let sh = shell(rank, r);
        let drops: Vec<i64> = sh.par_iter().map(|p| drop(p)).collect::<Result<_, _>>()?;
        visited += sh.len();
        let mut quiet = true;
        for (p, d) in sh.iter().zip(&drops) {
            if *d <= bound {
                quiet = false;
                points.push(p.clone());
            }
        }
        if rank == 0 {
            return Ok(ShellEnumeration {
                points,
                radius: 0,
                certified: true,
                fallback: false,
                visited,
            });
        }
        let monotone = r > 0
            && sh.iter().zip(&drops).all(|(p, d)| {
                predecessors(p)
                    .iter()
                    .all(|q| prev.get(q).map(|e| e <= d).unwrap_or(true))
            });
        if prev_quiet && quiet && monotone {
            return Ok(ShellEnumeration {
                points,
                radius: r,
                certified: true,
                fallback: false,
                visited,
            });
        }
        if r == cap && !quiet {
            return Err(WeylError::Certification {
                radius: r,
                detail: "the outermost shell still contributes; review the bound".into(),
            });
        }
        prev = sh.into_iter().zip(drops).collect();
        prev_quiet = quiet;
    }
    Ok(ShellEnumeration {
        points,
        radius: cap,
        certified: false,
        fallback: true,
        visited,
    })
}

/// Hard radius used when monotonicity cannot be certified.
pub fn fallback_radius(bound: i64) -> u32 {
    (2 * bound.max(0) + 2) as u32
}

/// μ = Σ n_i b_i.
pub fn lattice_point(basis: &[Weight], n: &[i64]) -> Weight {
    let mut mu = Weight::zero();
    for (b, c) in basis.iter().zip(n) {
        if *c != 0 {
            mu = &mu + &b.scale_int(*c);
        }
    }
    mu
}

/// Translations t_μ, μ ∈ M′, whose image of some seed reaches within
/// `bound` of the anchor.
pub fn enumerate_t_prime(
    spec: &AlgebraSpec,
    anchor: &Weight,
    bound: i64,
    seeds: &[Seed],
) -> Result<(Vec<GroupElement>, ShellEnumeration), WeylError> {
    let basis = t_prime_basis(spec);
    let form = &spec.form;
    let en = enumerate_shells(basis.len(), bound, fallback_radius(bound), |n| {
        let t = translation(spec, &lattice_point(&basis, n))?;
        let mut best = i64::MAX;
        for s in seeds {
            best = best.min(s.moved(form, &t).drop_below(spec, anchor)?);
        }
        Ok(best)
    })?;
    let ts = en
        .points
        .iter()
        .map(|n| translation(spec, &lattice_point(&basis, n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ts, en))
}

/// Elements of the group generated by `generators` reachable through
/// elements w with ht(ρ̂ − wρ̂) ≤ bound.
pub fn enumerate_affine(
    spec: &AlgebraSpec,
    generators: &[GroupElement],
    bound: &Q,
    cap: usize,
) -> Result<Vec<GroupElement>, WeylError> {
    let form = &spec.form;
    let id = GroupElement::identity(form.finite_symbols().len());
    let mut seen: HashSet<GroupElement> = HashSet::new();
    seen.insert(id.clone());
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for h in generators {
            let x = g.compose(form, h);
            if seen.contains(&x) {
                continue;
            }
            let d = spec
                .height_of(&(&spec.rho_hat - &x.apply(form, &spec.rho_hat)))
                .ok_or_else(|| WeylError::NotFinite(spec.rho_hat.clone()))?;
            if d > *bound {
                continue;
            }
            if out.len() >= cap {
                return Err(WeylError::CapExceeded(cap));
            }
            seen.insert(x.clone());
            out.push(x.clone());
            queue.push_back(x);
        }
    }
    Ok(out)
}

/// Reflections in the positive even real roots of Δ̂′ up to level m; they
/// include the simple roots of Δ̂′ and generate Ŵ′.
pub fn affine_prime_generators(spec: &AlgebraSpec) -> Result<Vec<GroupElement>, WeylError> {
    let roots = spec.subsystem_affine_roots(&spec.delta_prime, spec.m);
    reflections(spec, &roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_spec, FamilyId};
    use crate::scalar::q;

    fn d21() -> AlgebraSpec {
        build_spec(FamilyId::Dk1l, 2, 1).unwrap()
    }

    #[test]
    fn reflection_negates_root() {
        let s = d21();
        for (a, _) in s.finite_positive_roots() {
            if s.form.norm(&a).is_zero() {
                assert!(reflection(&s, &a).is_err());
                continue;
            }
            let r = reflection(&s, &a).unwrap();
            assert_eq!(r.apply(&s.form, &a), -a.clone());
            assert_eq!(r.sign, -1);
            assert!(r.compose(&s.form, &r).is_identity());
        }
    }

    #[test]
    fn affine_reflection_matches_formula() {
        let s = d21();
        let a = Weight::eps(1);
        let alpha = &Weight::delta() - &a;
        let r = reflection(&s, &alpha).unwrap();
        let lam = s.rho_hat.clone();
        let c = s.form.form(&lam, &alpha) * qi(2) / s.form.norm(&alpha);
        let mut direct = lam.clone();
        direct.add_scaled(&alpha, &-c);
        assert_eq!(r.apply(&s.form, &lam), direct);
        // s_{δ−α} s_α = t_{2α/(α,α)}
        let t = r.compose(&s.form, &reflection(&s, &a).unwrap());
        assert!(t.is_translation());
        assert_eq!(t.translation, a.scale(&(qi(2) / s.form.norm(&a))));
    }

    #[test]
    fn translation_basics() {
        let s = build_spec(FamilyId::Dk1k, 1, 1).unwrap();
        let t = translation(&s, &Weight::del(1).scale_int(2)).unwrap();
        assert_eq!(t.apply(&s.form, &Weight::delta()), Weight::delta());
        assert_eq!(
            t.apply(&s.form, &Weight::del(1)),
            &Weight::del(1) - &Weight::delta().scale_int(2)
        );
        let mu = Weight::del(1);
        let t = translation(&s, &mu).unwrap();
        let expect = &(&Weight::lambda0() + &mu) - &Weight::delta().scale(&q(1, 2));
        assert_eq!(t.apply(&s.form, &Weight::lambda0()), expect);
    }

    #[test]
    fn group_orders() {
        let s = build_spec(FamilyId::A2k2lm1, 2, 1).unwrap();
        // B2 on ε1, ε2
        let roots = vec![&Weight::eps(1) - &Weight::eps(2), Weight::eps(2)];
        let g = enumerate_finite_group(&s.form, &reflections(&s, &roots).unwrap(), 100).unwrap();
        assert_eq!(g.len(), 8);
        let roots = vec![Weight::eps(1)];
        let g = enumerate_finite_group(&s.form, &reflections(&s, &roots).unwrap(), 100).unwrap();
        assert_eq!(g.len(), 2);
        let roots = vec![
            &Weight::eps(1) - &Weight::eps(2),
            &Weight::eps(1) + &Weight::eps(2),
        ];
        let g = enumerate_finite_group(&s.form, &reflections(&s, &roots).unwrap(), 100).unwrap();
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn infinite_closure_is_capped() {
        let s = d21();
        let gens = reflections(&s, &[Weight::eps(1), &Weight::delta() - &Weight::eps(1)]).unwrap();
        assert_eq!(
            enumerate_finite_group(&s.form, &gens, 50),
            Err(WeylError::CapExceeded(50))
        );
    }

    #[test]
    fn extended_sign() {
        let s = build_spec(FamilyId::A2km12lm1, 2, 1).unwrap();
        assert!(s.extended_sign);
        let t = translation(&s, &Weight::eps(2)).unwrap();
        assert_eq!(t.sign, -1);
        assert!(!t.in_affine_prime);
        let r = reflection(&s, &Weight::eps(2).scale_int(2)).unwrap();
        assert_eq!(r.sign, 1);
        let r = reflection(&s, &(&Weight::eps(1) - &Weight::eps(2))).unwrap();
        assert_eq!(r.sign, -1);
    }

    #[test]
    fn shells_have_expected_sizes() {
        assert_eq!(shell(2, 0).len(), 1);
        assert_eq!(shell(2, 3).len(), 12);
        assert_eq!(shell(3, 2).len(), 18);
        assert_eq!(shell(0, 0).len(), 1);
        assert!(shell(0, 1).is_empty());
    }

    #[test]
    fn identity_only_for_tight_bound() {
        let s = d21();
        let anchor = s.rho_hat.clone();
        let seed = Seed {
            lead: s.rho_hat.clone(),
            factors: vec![],
        };
        let (ts, en) = enumerate_t_prime(&s, &anchor, 0, &[seed]).unwrap();
        assert_eq!(ts.len(), 1);
        assert!(ts[0].is_identity());
        assert!(en.certified);
    }
}
