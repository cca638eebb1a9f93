//! Randomized structural properties, each run through a deterministic
//! proptest runner so the suites and the acceptance harness share them.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use superdenom::lattice::SimpleCoords;
use superdenom::series::{FactorForm, TruncatedSeries};
use superdenom::weylgroup::{self, GroupElement};
use superdenom::{build_spec, AlgebraSpec, BasisSymbol, FamilyId, Weight};

pub const CASES: u32 = 10_000;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

struct Pool {
    spec: AlgebraSpec,
    gens: Vec<GroupElement>,
    roots: Vec<Weight>,
}

/// A spread of families, with Ŵ′ reflections and T′ translations as
/// generators. Includes both extended-sign families.
fn pool() -> &'static [Pool] {
    static POOL: OnceLock<Vec<Pool>> = OnceLock::new();
    POOL.get_or_init(|| {
        [
            (FamilyId::A2k2lm1, 1, 1),
            (FamilyId::A2km12lm1, 2, 1),
            (FamilyId::A2l2km1, 2, 1),
            (FamilyId::A2k2l4, 2, 1),
            (FamilyId::Dk1l, 2, 1),
            (FamilyId::Cl1, 0, 1),
            (FamilyId::G3, 0, 0),
            (FamilyId::A2km12km1, 2, 2),
            (FamilyId::Dk1k, 2, 2),
        ]
        .into_iter()
        .map(|(f, k, l)| {
            let spec = build_spec(f, k, l).unwrap();
            let roots = spec.subsystem_affine_roots(&spec.delta_prime, 2);
            let mut gens: Vec<GroupElement> = roots
                .iter()
                .map(|a| weylgroup::reflection(&spec, a).unwrap())
                .collect();
            for b in weylgroup::t_prime_basis(&spec) {
                gens.push(weylgroup::translation(&spec, &b).unwrap());
                gens.push(weylgroup::translation(&spec, &-&b).unwrap());
            }
            let mut all = roots;
            all.extend(spec.subsystem_affine_roots(&spec.delta_doubleprime, 2));
            Pool {
                spec,
                gens,
                roots: all,
            }
        })
        .collect()
    })
}

fn word(p: &Pool, w: &[u16]) -> GroupElement {
    let n = p.spec.form.finite_symbols().len();
    let mut g = GroupElement::identity(n);
    for &i in w {
        g = g.compose(&p.spec.form, &p.gens[i as usize % p.gens.len()]);
    }
    g
}

fn weight(p: &Pool, c: &[i64], l0: i64, d: i64) -> Weight {
    let mut w = Weight::lambda0().scale_int(l0);
    w = &w + &Weight::delta().scale_int(d);
    for (s, x) in p.spec.form.finite_symbols().iter().zip(c) {
        w = &w + &Weight::basis(*s).scale_int(*x);
    }
    w
}

fn words() -> impl Strategy<Value = (usize, Vec<u16>, Vec<u16>)> {
    (
        0..9usize,
        prop::collection::vec(any::<u16>(), 0..6),
        prop::collection::vec(any::<u16>(), 0..6),
    )
}

fn weights() -> impl Strategy<Value = (Vec<i64>, i64, i64)> {
    (prop::collection::vec(-4i64..=4, 8), -3i64..=3, -3i64..=3)
}

fn run<S: Strategy>(
    cases: u32,
    s: S,
    f: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&s, f).map_err(|e| e.to_string())
}

/// (gλ, gμ) = (λ, μ), and the normal form composes like the action.
pub fn form_invariance(cases: u32) -> Result<(), String> {
    run(
        cases,
        (words(), weights(), weights()),
        |((i, a, b), (x, l0, d), (y, m0, e))| {
            let p = &pool()[i];
            let form = &p.spec.form;
            let g = word(p, &a);
            let h = word(p, &b);
            let lam = weight(p, &x, l0, d);
            let mu = weight(p, &y, m0, e);
            prop_assert_eq!(
                form.form(&g.apply(form, &lam), &g.apply(form, &mu)),
                form.form(&lam, &mu)
            );
            prop_assert_eq!(
                g.compose(form, &h).apply(form, &lam),
                g.apply(form, &h.apply(form, &lam))
            );
            Ok(())
        },
    )
}

/// sgn(gh) = sgn(g)·sgn(h), with signs recomputed from normal forms.
pub fn sign_multiplicativity(cases: u32) -> Result<(), String> {
    run(cases, words(), |(i, a, b)| {
        let p = &pool()[i];
        let g = word(p, &a);
        let h = word(p, &b);
        let gh = g.compose(&p.spec.form, &h);
        let s = |x: &GroupElement| weylgroup::sign(&p.spec, x).unwrap();
        prop_assert_eq!(s(&gh), s(&g) * s(&h));
        prop_assert_eq!(gh.sign, g.sign * h.sign);
        Ok(())
    })
}

/// t_μ t_ν = t_{μ+ν} on M′, as group elements and as actions.
pub fn translations_add(cases: u32) -> Result<(), String> {
    let s = (
        0..9usize,
        prop::collection::vec(-3i64..=3, 8),
        prop::collection::vec(-3i64..=3, 8),
        weights(),
    );
    run(cases, s, |(i, m, n, (x, l0, d))| {
        let p = &pool()[i];
        let basis = weylgroup::t_prime_basis(&p.spec);
        let mu = weylgroup::lattice_point(&basis, &m[..basis.len()]);
        let nu = weylgroup::lattice_point(&basis, &n[..basis.len()]);
        let form = &p.spec.form;
        let tm = weylgroup::translation(&p.spec, &mu).unwrap();
        let tn = weylgroup::translation(&p.spec, &nu).unwrap();
        let tmn = weylgroup::translation(&p.spec, &(&mu + &nu)).unwrap();
        prop_assert_eq!(&tm.compose(form, &tn), &tmn);
        prop_assert_eq!(tm.compose(form, &tn).sign, tmn.sign);
        let lam = weight(p, &x, l0, d);
        prop_assert_eq!(tm.apply(form, &tn.apply(form, &lam)), tmn.apply(form, &lam));
        Ok(())
    })
}

/// s_α² = 1 and s_α(α) = −α for the real roots of Δ̂′ and Δ̂″.
pub fn reflection_involution(cases: u32) -> Result<(), String> {
    run(
        cases,
        (0..9usize, any::<u16>(), weights()),
        |(i, j, (x, l0, d))| {
            let p = &pool()[i];
            let a = &p.roots[j as usize % p.roots.len()];
            let form = &p.spec.form;
            let s = weylgroup::reflection(&p.spec, a).unwrap();
            prop_assert!(s.compose(form, &s).is_identity());
            prop_assert_eq!(s.apply(form, a), -a);
            let lam = weight(p, &x, l0, d);
            prop_assert_eq!(s.apply(form, &s.apply(form, &lam)), lam);
            Ok(())
        },
    )
}

// Series over three free coordinates, anchored at 0, against a map oracle.

type Map = BTreeMap<Vec<u32>, i64>;

fn coords3() -> Arc<SimpleCoords> {
    static C: OnceLock<Arc<SimpleCoords>> = OnceLock::new();
    C.get_or_init(|| {
        let syms: Vec<BasisSymbol> = (1..=3).map(BasisSymbol::Eps).collect();
        let simple = syms.iter().map(|s| Weight::basis(*s)).collect();
        Arc::new(SimpleCoords::new(syms, simple).unwrap())
    })
    .clone()
}

fn at(o: &[u32]) -> Weight {
    let mut w = Weight::zero();
    for (i, &x) in o.iter().enumerate() {
        w = &w - &Weight::eps(i as u32 + 1).scale_int(x as i64);
    }
    w
}

fn series(m: &Map, h: u32) -> TruncatedSeries<i64> {
    let c = coords3();
    let mut s = TruncatedSeries::zero(c.clone(), Weight::zero(), h).unwrap();
    for (o, v) in m {
        s.add_assign(&TruncatedSeries::monomial(c.clone(), Weight::zero(), h, &at(o), *v).unwrap())
            .unwrap();
    }
    s
}

fn as_map(s: &TruncatedSeries<i64>) -> Map {
    s.terms().into_iter().filter(|(_, c)| *c != 0).collect()
}

fn clean(mut m: Map, h: u32) -> Map {
    m.retain(|o, c| *c != 0 && o.iter().sum::<u32>() <= h);
    m
}

fn oracle_mul(a: &Map, b: &Map, h: u32) -> Map {
    let mut out = Map::new();
    for (x, c) in a {
        for (y, d) in b {
            let o: Vec<u32> = x.iter().zip(y).map(|(p, q)| p + q).collect();
            *out.entry(o).or_insert(0) += c * d;
        }
    }
    clean(out, h)
}

fn oracle_add(a: &Map, b: &Map, sign: i64, h: u32) -> Map {
    let mut out = a.clone();
    for (o, c) in b {
        *out.entry(o.clone()).or_insert(0) += sign * c;
    }
    clean(out, h)
}

/// (1 + s·x^g)^{±m} by repeated dense recurrences over the box.
fn oracle_factor(a: &Map, g: &[u32], s: i64, e: i64, h: u32) -> Map {
    let mut cur = a.clone();
    let mut boxed: Vec<Vec<u32>> = Vec::new();
    for x in 0..=h {
        for y in 0..=h - x {
            for z in 0..=h - x - y {
                boxed.push(vec![x, y, z]);
            }
        }
    }
    boxed.sort_by_key(|o| o.iter().sum::<u32>());
    for _ in 0..e.abs() {
        let prev = cur.clone();
        let mut next = Map::new();
        for o in &boxed {
            let mut v = *prev.get(o).unwrap_or(&0);
            if o.iter().zip(g).all(|(p, q)| p >= q) {
                let below: Vec<u32> = o.iter().zip(g).map(|(p, q)| p - q).collect();
                if e > 0 {
                    v += s * prev.get(&below).unwrap_or(&0);
                } else {
                    v -= s * next.get(&below).unwrap_or(&0);
                }
            }
            next.insert(o.clone(), v);
        }
        cur = clean(next, h);
    }
    cur
}

fn maps(h: u32) -> impl Strategy<Value = Map> {
    prop::collection::btree_map(prop::collection::vec(0u32..=h, 3), -3i64..=3, 0..8)
        .prop_map(move |m| clean(m, h))
}

fn three_maps() -> impl Strategy<Value = (u32, Map, Map, Map)> {
    (0u32..=4).prop_flat_map(|h| (Just(h), maps(h), maps(h), maps(h)))
}

/// Ring axioms and agreement with the map oracle at H ≤ 4.
pub fn series_ring(cases: u32) -> Result<(), String> {
    run(cases, three_maps(), |(h, a, b, c)| {
        let (sa, sb, sc) = (series(&a, h), series(&b, h), series(&c, h));
        let ab = sa.mul(&sb).unwrap();
        prop_assert_eq!(as_map(&ab), oracle_mul(&a, &b, h));
        prop_assert!(ab == sb.mul(&sa).unwrap());
        prop_assert!(ab.mul(&sc).unwrap() == sa.mul(&sb.mul(&sc).unwrap()).unwrap());
        let mut bc = sb.clone();
        bc.add_assign(&sc).unwrap();
        let mut ab_ac = ab.clone();
        ab_ac.add_assign(&sa.mul(&sc).unwrap()).unwrap();
        prop_assert!(sa.mul(&bc).unwrap() == ab_ac);
        prop_assert_eq!(as_map(&bc), oracle_add(&b, &c, 1, h));
        let mut d = sb.clone();
        d.sub_assign(&sc).unwrap();
        prop_assert_eq!(as_map(&d), oracle_add(&b, &c, -1, h));
        let one = TruncatedSeries::<i64>::unit(coords3(), Weight::zero(), h).unwrap();
        prop_assert!(sa.mul(&one).unwrap() == sa);
        Ok(())
    })
}

/// Factor multiplication, including the geometric inverse, against the
/// dense recurrences; a factor times its inverse is the identity.
pub fn series_factors(cases: u32) -> Result<(), String> {
    let s = (1u32..=4).prop_flat_map(|h| {
        (
            Just(h),
            maps(h),
            prop::collection::vec(0u32..=2, 3),
            prop::bool::ANY,
            1u32..=2,
            prop::bool::ANY,
        )
    });
    run(cases, s, |(h, a, g, plus, mult, inverse)| {
        prop_assume!(g.iter().any(|&x| x > 0));
        let root = g.iter().enumerate().fold(Weight::zero(), |w, (i, &x)| {
            &w + &Weight::eps(i as u32 + 1).scale_int(x as i64)
        });
        let sign: i8 = if plus { 1 } else { -1 };
        let f = FactorForm {
            root,
            sign,
            exponent: if inverse { -1 } else { 1 },
            multiplicity: mult,
        };
        let mut s = series(&a, h);
        s.mul_factor(&f).unwrap();
        let e = f.power();
        prop_assert_eq!(as_map(&s), oracle_factor(&a, &g, sign as i64, e, h));
        let mut back = s.clone();
        back.mul_factor(&FactorForm {
            exponent: -f.exponent,
            ..f.clone()
        })
        .unwrap();
        prop_assert_eq!(as_map(&back), a);
        Ok(())
    })
}

/// Truncating a product equals the product of truncations, and truncations
/// compose.
pub fn truncation_coherence(cases: u32) -> Result<(), String> {
    run(
        cases,
        (three_maps(), 0u32..=4, 0u32..=4),
        |((h, a, b, _), h2, h3)| {
            let (sa, sb) = (series(&a, h), series(&b, h));
            let h2 = h2.min(h);
            let lhs = sa.mul(&sb).unwrap().truncate(h2);
            let rhs = sa.truncate(h2).mul(&sb.truncate(h2)).unwrap();
            prop_assert!(lhs == rhs);
            prop_assert_eq!(as_map(&lhs), oracle_mul(&a, &b, h2));
            prop_assert!(sa.truncate(h2).truncate(h3) == sa.truncate(h2.min(h3)));
            let big = series(&a, h).truncate(h2);
            prop_assert_eq!(big.height_bound(), h2);
            Ok(())
        },
    )
}

/// Every property at `cases` cases, by name.
pub fn all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("form invariance", form_invariance(cases)),
        ("sign multiplicativity", sign_multiplicativity(cases)),
        ("t_mu t_nu = t_(mu+nu)", translations_add(cases)),
        ("reflection involution", reflection_involution(cases)),
        ("series ring axioms", series_ring(cases)),
        ("series factors", series_factors(cases)),
        ("truncation coherence", truncation_coherence(cases)),
    ]
}
