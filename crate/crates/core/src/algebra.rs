//! Root data for the twisted affine superalgebra families: root multisets by
//! level class, simple roots, ρ, ρ̂, h∨, isotropic sets, the even subsystems
//! Δ′/Δ″ with their translation lattices, and imaginary multiplicities.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{height, BasisSymbol, BilinearForm, SimpleCoords, Weight};
use crate::linalg;
use crate::scalar::{fmt_pq, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// The rows of the family table. Diagonal cases are separate variants because
/// their form, subsystems and f(q) differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    /// A(2k,2l−1)^(2), k ≥ l.
    A2k2lm1,
    /// A(2l,2k−1)^(2), k ≥ l+1.
    A2l2km1,
    /// A(2k−1,2l−1)^(2), k ≥ l+1.
    A2km12lm1,
    /// A(2l−1,2k−1)^(2), k ≥ l+1.
    A2lm12km1,
    /// A(2k,2l)^(4), k ≥ l+1.
    A2k2l4,
    /// A(2l,2k)^(4), k ≥ l+1.
    A2l2k4,
    /// D(k+1,l)^(2), k ≥ l+1.
    Dk1l,
    /// D(l+1,k)^(2), k ≥ l+1.
    Dl1k,
    /// C(l+1)^(2).
    Cl1,
    /// A(2k−1,2k−1)^(2).
    A2km12km1,
    /// A(2k,2k)^(4).
    A2k2k4,
    /// D(k+1,k)^(2).
    Dk1k,
    /// G(3)^(2).
    G3,
}

impl FamilyId {
    pub const ALL: [FamilyId; 13] = [
        FamilyId::A2k2lm1,
        FamilyId::A2l2km1,
        FamilyId::A2km12lm1,
        FamilyId::A2lm12km1,
        FamilyId::A2k2l4,
        FamilyId::A2l2k4,
        FamilyId::Dk1l,
        FamilyId::Dl1k,
        FamilyId::Cl1,
        FamilyId::A2km12km1,
        FamilyId::A2k2k4,
        FamilyId::Dk1k,
        FamilyId::G3,
    ];

    /// Command line token.
    pub fn token(self) -> &'static str {
        match self {
            FamilyId::A2k2lm1 => "A_2k_2l-1_2",
            FamilyId::A2l2km1 => "A_2l_2k-1_2",
            FamilyId::A2km12lm1 => "A_2k-1_2l-1_2",
            FamilyId::A2lm12km1 => "A_2l-1_2k-1_2",
            FamilyId::A2k2l4 => "A_2k_2l_4",
            FamilyId::A2l2k4 => "A_2l_2k_4",
            FamilyId::Dk1l => "D_k+1_l_2",
            FamilyId::Dl1k => "D_l+1_k_2",
            FamilyId::Cl1 => "C_l+1_2",
            FamilyId::A2km12km1 => "A_2k-1_2k-1_2",
            FamilyId::A2k2k4 => "A_2k_2k_4",
            FamilyId::Dk1k => "D_k+1_k_2",
            FamilyId::G3 => "G3_2",
        }
    }

    pub fn from_token(s: &str) -> Option<FamilyId> {
        FamilyId::ALL.iter().copied().find(|f| f.token() == s)
    }

    pub fn valid_tokens() -> Vec<&'static str> {
        FamilyId::ALL.iter().map(|f| f.token()).collect()
    }

    /// True for the three families with vanishing dual Coxeter number.
    pub fn is_diagonal(self) -> bool {
        matches!(
            self,
            FamilyId::A2km12km1 | FamilyId::A2k2k4 | FamilyId::Dk1k
        )
    }

    /// Human-readable name at given ranks, e.g. `A(2,1)^(2)`.
    pub fn name(self, k: u32, l: u32) -> String {
        match self {
            FamilyId::A2k2lm1 => format!("A({},{})^(2)", 2 * k, 2 * l - 1),
            FamilyId::A2l2km1 => format!("A({},{})^(2)", 2 * l, 2 * k - 1),
            FamilyId::A2km12lm1 => format!("A({},{})^(2)", 2 * k - 1, 2 * l - 1),
            FamilyId::A2lm12km1 => format!("A({},{})^(2)", 2 * l - 1, 2 * k - 1),
            FamilyId::A2k2l4 => format!("A({},{})^(4)", 2 * k, 2 * l),
            FamilyId::A2l2k4 => format!("A({},{})^(4)", 2 * l, 2 * k),
            FamilyId::Dk1l => format!("D({},{})^(2)", k + 1, l),
            FamilyId::Dl1k => format!("D({},{})^(2)", l + 1, k),
            FamilyId::Cl1 => format!("C({})^(2)", l + 1),
            FamilyId::A2km12km1 => format!("A({},{})^(2)", 2 * k - 1, 2 * k - 1),
            FamilyId::A2k2k4 => format!("A({},{})^(4)", 2 * k, 2 * k),
            FamilyId::Dk1k => format!("D({},{})^(2)", k + 1, k),
            FamilyId::G3 => "G(3)^(2)".to_string(),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Row of the f(q) table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FqSelector {
    /// f = 1.
    One,
    /// ∏_{n≥1}(1−q^{2n+1})^{−2}.
    AOddSquareInv,
    /// ∏_{n≥1}(1+q^{2n+1})^{−1}.
    AQuarterInv,
    /// ∏_{n≥1}(1−q^{2n+1}).
    DPlain,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("rank violation for {family}: {detail}")]
    Rank {
        family: &'static str,
        detail: String,
    },
    #[error("inconsistent root data for {family}: {detail}")]
    Inconsistent {
        family: &'static str,
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    pub root: Weight,
    pub parity: Parity,
    pub multiplicity: u32,
    /// δ-coefficient.
    pub level: i64,
}

impl RootDatum {
    pub fn is_imaginary(&self) -> bool {
        self.root.finite_part().is_zero()
    }
}

/// An even subsystem: the real even roots whose finite part only involves
/// `letters`, its affine type, and its translation lattice.
#[derive(Clone, Debug)]
pub struct Subsystem {
    pub label: String,
    pub letters: Vec<BasisSymbol>,
    pub lattice: Vec<Weight>,
}

impl Subsystem {
    pub fn contains(&self, finite: &Weight) -> bool {
        !finite.is_zero() && finite.iter().all(|(s, _)| self.letters.contains(s))
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

type ClassRoots = Vec<(Weight, Parity)>;

/// One family at fixed ranks.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub family: FamilyId,
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub form: BilinearForm,
    /// α₀ first, then the finite simple roots π.
    pub simple_roots: Vec<(Weight, Parity)>,
    pub coords: SimpleCoords,
    pub rho: Weight,
    pub h_dual: Q,
    pub rho_hat: Weight,
    pub theta: Weight,
    pub isotropic: Vec<Weight>,
    pub delta_prime: Subsystem,
    pub delta_doubleprime: Subsystem,
    pub imaginary: BTreeMap<(u32, Parity), u32>,
    pub fq: FqSelector,
    pub extended_sign: bool,
    pub finite_type: String,
    /// (even, odd) dimensions of the simple superalgebra the loop algebra is
    /// built from.
    pub loop_dims: (u64, u64),
    classes: Vec<ClassRoots>,
    alpha0_listed: Weight,
}

fn eps(i: u32) -> Weight {
    Weight::eps(i)
}
fn del(j: u32) -> Weight {
    Weight::del(j)
}

fn basis_weight(s: BasisSymbol) -> Weight {
    Weight::basis(s)
}

fn pairs(x: &[BasisSymbol]) -> Vec<Weight> {
    let mut out = Vec::new();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let a = basis_weight(x[i]);
            let b = basis_weight(x[j]);
            for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                out.push(a.scale_int(sa) + b.scale_int(sb));
            }
        }
    }
    out
}

fn single(x: &[BasisSymbol], c: i64) -> Vec<Weight> {
    x.iter()
        .flat_map(|s| {
            let w = basis_weight(*s).scale_int(c);
            [w.clone(), -w]
        })
        .collect()
}

fn cross(x: &[BasisSymbol], y: &[BasisSymbol]) -> Vec<Weight> {
    let mut out = Vec::new();
    for a in x {
        for b in y {
            for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                out.push(basis_weight(*a).scale_int(sa) + basis_weight(*b).scale_int(sb));
            }
        }
    }
    out
}

fn tag(ws: Vec<Weight>, p: Parity) -> ClassRoots {
    ws.into_iter().map(|w| (w, p)).collect()
}

fn class(even: Vec<Vec<Weight>>, odd: Vec<Vec<Weight>>) -> ClassRoots {
    let mut r = tag(even.concat(), Parity::Even);
    r.extend(tag(odd.concat(), Parity::Odd));
    r
}

#[derive(Clone, Copy)]
enum Pattern {
    /// A(even, odd)^(2) shape.
    AEvenOdd,
    /// A(odd, odd)^(2) shape.
    AOddOdd,
    /// A(even, even)^(4) shape.
    AQuarter,
    /// D(·,·)^(2) and C(l+1)^(2) shape.
    DTwisted,
}

/// Level-class root lists for pattern `p`; `x` are the letters carrying the
/// single roots of the finite part, `y` the others.
fn pattern_classes(p: Pattern, x: &[BasisSymbol], y: &[BasisSymbol]) -> Vec<ClassRoots> {
    match p {
        Pattern::AEvenOdd => {
            let odd = vec![cross(x, y), single(y, 1)];
            vec![
                class(
                    vec![pairs(x), single(x, 1), pairs(y), single(y, 2)],
                    odd.clone(),
                ),
                class(vec![pairs(x), single(x, 1), single(x, 2), pairs(y)], odd),
            ]
        }
        Pattern::AOddOdd => vec![
            class(vec![pairs(x), pairs(y), single(y, 2)], vec![cross(x, y)]),
            class(vec![pairs(x), pairs(y), single(x, 2)], vec![cross(x, y)]),
        ],
        Pattern::AQuarter => {
            let quarter = class(vec![single(y, 1)], vec![single(x, 1)]);
            vec![
                class(
                    vec![pairs(x), single(x, 1), pairs(y), single(y, 2)],
                    vec![single(y, 1), cross(x, y)],
                ),
                quarter.clone(),
                class(
                    vec![pairs(x), single(x, 1), single(x, 2), pairs(y)],
                    vec![single(y, 1), cross(x, y)],
                ),
                quarter,
            ]
        }
        Pattern::DTwisted => vec![
            class(
                vec![single(x, 1), pairs(x), pairs(y), single(y, 2)],
                vec![cross(x, y), single(y, 1)],
            ),
            class(vec![single(x, 1)], vec![single(y, 1)]),
        ],
    }
}

fn g3_classes() -> Vec<ClassRoots> {
    let w =
        |a: i64, b: i64, c: i64| eps(1).scale_int(a) + eps(2).scale_int(b) + eps(3).scale_int(c);
    let mut c0_odd = Vec::new();
    for a in [1, -1] {
        for b in [1, -1] {
            for c in [1, -1] {
                c0_odd.push(w(a, b, c));
            }
        }
    }
    let c0 = class(
        vec![vec![
            w(2, 0, 0),
            w(-2, 0, 0),
            w(0, 2, 0),
            w(0, -2, 0),
            w(0, 0, 2),
            w(0, 0, -2),
        ]],
        vec![c0_odd],
    );
    let mut c1_even = Vec::new();
    for v in [w(1, 3, 0), w(-1, 3, 0), w(1, 1, 0), w(-1, 1, 0)] {
        c1_even.push(-&v);
        c1_even.push(v);
    }
    let mut c1_odd = Vec::new();
    for b in [2, -2] {
        for c in [1, -1] {
            c1_odd.push(w(0, b, c));
        }
    }
    c1_odd.push(w(0, 0, 1));
    c1_odd.push(w(0, 0, -1));
    let c1 = class(vec![c1_even], vec![c1_odd]);
    vec![c0, c1]
}

fn chain(letters: &[BasisSymbol], tail: Weight) -> Vec<Weight> {
    let mut out: Vec<Weight> = letters
        .windows(2)
        .map(|w| basis_weight(w[0]) - basis_weight(w[1]))
        .collect();
    out.push(tail);
    out
}

/// [x₁, y₁, x₂, y₂, …] followed by the leftover letters of the longer list.
fn interleave(x: &[BasisSymbol], y: &[BasisSymbol]) -> Vec<BasisSymbol> {
    let mut out = Vec::new();
    for i in 0..x.len().max(y.len()) {
        if let Some(a) = x.get(i) {
            out.push(*a);
        }
        if let Some(b) = y.get(i) {
            out.push(*b);
        }
    }
    out
}

fn es(n: u32) -> Vec<BasisSymbol> {
    (1..=n).map(BasisSymbol::Eps).collect()
}
fn ds(n: u32) -> Vec<BasisSymbol> {
    (1..=n).map(BasisSymbol::Del).collect()
}

struct Blueprint {
    n_eps: u32,
    n_del: u32,
    sigma: i8,
    m: u32,
    classes: Vec<ClassRoots>,
    finite_simple: Vec<Weight>,
    theta_listed: Weight,
    isotropic: Vec<Weight>,
    prime_letters: Vec<BasisSymbol>,
    prime_label: String,
    dprime_label: String,
    imaginary: Vec<((u32, Parity), u32)>,
    fq: FqSelector,
    extended: bool,
    finite_type: String,
    loop_dims: (u64, u64),
}

fn sl_dims(a: u64, b: u64) -> (u64, u64) {
    (a * a + b * b - 1, 2 * a * b)
}

fn psl_dims(a: u64) -> (u64, u64) {
    (2 * a * a - 2, 2 * a * a)
}

fn osp_dims(orth: u64, symp_half: u64) -> (u64, u64) {
    let n = symp_half;
    (orth * (orth - 1) / 2 + n * (2 * n + 1), orth * 2 * n)
}

fn blueprint(family: FamilyId, k: u32, l: u32) -> Blueprint {
    use BasisSymbol::Eps;
    use FamilyId::*;
    use Parity::{Even, Odd};
    let e = es(k);
    let d = ds(l);
    let n = k + l;
    let ev = |i: u32| eps(i) - del(i);
    let (ku, lu) = (k as u64, l as u64);
    match family {
        A2k2lm1 => {
            let (letters, theta, iso) = if k > l {
                (
                    interleave(&e, &d),
                    eps(1).scale_int(2),
                    (1..=l).map(ev).collect(),
                )
            } else {
                (
                    interleave(&d, &e),
                    eps(1) + del(1),
                    (1..=l).map(|i| del(i) - eps(i)).collect(),
                )
            };
            Blueprint {
                n_eps: k,
                n_del: l,
                sigma: 1,
                m: 2,
                classes: pattern_classes(Pattern::AEvenOdd, &e, &d),
                finite_simple: chain(&letters, eps(k)),
                theta_listed: theta,
                isotropic: iso,
                prime_letters: e.clone(),
                prime_label: format!("A_{}^(2)", 2 * k),
                dprime_label: format!("A_{}^(2)", 2 * l - 1),
                imaginary: vec![((0, Even), n), ((1, Even), n)],
                fq: FqSelector::One,
                extended: false,
                finite_type: format!("B({k},{l})"),
                loop_dims: sl_dims(2 * ku + 1, 2 * lu),
            }
        }
        A2l2km1 => {
            let (letters, iso): (Vec<BasisSymbol>, Vec<Weight>) = if k >= l + 2 {
                let mut v = vec![Eps(1)];
                v.extend(interleave(&e[1..], &d));
                (v, (1..=l).map(|i| eps(i + 1) - del(i)).collect())
            } else {
                (
                    interleave(&e, &d),
                    (1..=l).map(|i| del(i) - eps(i + 1)).collect(),
                )
            };
            let theta = if k >= l + 2 {
                eps(1) + eps(2)
            } else {
                del(1) + eps(1)
            };
            Blueprint {
                n_eps: k,
                n_del: l,
                sigma: 1,
                m: 2,
                classes: pattern_classes(Pattern::AEvenOdd, &d, &e),
                finite_simple: chain(&letters, eps(k)),
                theta_listed: theta,
                isotropic: iso,
                prime_letters: e.clone(),
                prime_label: format!("A_{}^(2)", 2 * k - 1),
                dprime_label: format!("A_{}^(2)", 2 * l),
                imaginary: vec![((0, Even), n), ((1, Even), n)],
                fq: FqSelector::One,
                extended: false,
                finite_type: format!("B({l},{k})"),
                loop_dims: sl_dims(2 * lu + 1, 2 * ku),
            }
        }
        A2km12lm1 => {
            let letters = interleave(&e, &d);
            let nl = letters.len();
            let tail = basis_weight(letters[nl - 2]) + basis_weight(letters[nl - 1]);
            Blueprint {
                n_eps: k,
                n_del: l,
                sigma: 1,
                m: 2,
                classes: pattern_classes(Pattern::AOddOdd, &e, &d),
                finite_simple: chain(&letters, tail),
                theta_listed: eps(1).scale_int(2),
                isotropic: (1..=l).map(ev).collect(),
                prime_letters: e.clone(),
                prime_label: format!("A_{}^(2)", 2 * k - 1),
                dprime_label: format!("A_{}^(2)", 2 * l - 1),
                imaginary: vec![((0, Even), n), ((1, Even), n - 1)],
                fq: FqSelector::One,
                extended: true,
                finite_type: format!("D({k},{l})"),
                loop_dims: sl_dims(2 * ku, 2 * lu),
            }
        }
        A2lm12km1 => {
            let mut letters = vec![Eps(1)];
            letters.extend(interleave(&e[1..], &d));
            let tail = if k >= l + 2 {
                eps(k).scale_int(2)
            } else {
                eps(l + 1) + del(l)
            };
            Blueprint {
                n_eps: k,
                n_del: l,
                sigma: 1,
                m: 2,
                classes: pattern_classes(Pattern::AOddOdd, &d, &e),
                finite_simple: chain(&letters, tail),
                theta_listed: eps(1) + eps(2),
                isotropic: (1..=l).map(|i| eps(i + 1) - del(i)).collect(),
                prime_letters: e.clone(),
                prime_label: format!("A_{}^(2)", 2 * k - 1),
                dprime_label: format!("A_{}^(2)", 2 * l - 1),
                imaginary: vec![((0, Even), n), ((1, Even), n - 1)],
                fq: FqSelector::One,
                extended: false,
                finite_type: format!("D({l},{k})"),
                loop_dims: sl_dims(2 * lu, 2 * ku),
            }
        }
        A2km12km1 => {
            let letters = interleave(&e, &d);
            Blueprint {
                n_eps: k,
                n_del: k,
                sigma: -1,
                m: 2,
                classes: pattern_classes(Pattern::AOddOdd, &d, &e),
                finite_simple: chain(&letters, eps(k) + del(k)),
                theta_listed: eps(1) + del(1),
                isotropic: (1..=k).map(ev).collect(),
                prime_letters: d.clone(),
                prime_label: format!("A_{}^(2)", 2 * k - 1),
                dprime_label: format!("A_{}^(2)", 2 * k - 1),
                imaginary: vec![((0, Even), 2 * k), ((1, Even), 2 * k - 2)],
                fq: FqSelector::AOddSquareInv,
                extended: true,
                finite_type: format!("D({k},{k})"),
                loop_dims: psl_dims(2 * ku),
            }
        }
        A2k2l4 | A2l2k4 | A2k2k4 => {
            let (x, y) = if family == A2k2l4 { (&e, &d) } else { (&d, &e) };
            let letters = interleave(&e, &d);
            let last = *letters.last().unwrap();
            let (prime, dprime, ftype, dims, imag, fq, sigma) = match family {
                A2k2l4 => (
                    format!("A_{}^(2)", 2 * k),
                    format!("A_{}^(2)", 2 * l),
                    format!("B({k},{l})"),
                    sl_dims(2 * ku + 1, 2 * lu + 1),
                    vec![
                        ((0, Even), n),
                        ((2, Even), n + 1),
                        ((1, Odd), 1),
                        ((3, Odd), 1),
                    ],
                    FqSelector::One,
                    1,
                ),
                A2l2k4 => (
                    format!("A_{}^(2)", 2 * k),
                    format!("A_{}^(2)", 2 * l),
                    format!("B({l},{k})"),
                    sl_dims(2 * lu + 1, 2 * ku + 1),
                    vec![
                        ((0, Even), n),
                        ((2, Even), n + 1),
                        ((1, Odd), 1),
                        ((3, Odd), 1),
                    ],
                    FqSelector::One,
                    1,
                ),
                _ => (
                    format!("A_{}^(2)", 2 * k),
                    format!("A_{}^(2)", 2 * k),
                    format!("B({k},{k})"),
                    psl_dims(2 * ku + 1),
                    vec![((0, Even), n), ((2, Even), n), ((1, Odd), 1), ((3, Odd), 1)],
                    FqSelector::AQuarterInv,
                    -1,
                ),
            };
            Blueprint {
                n_eps: k,
                n_del: l,
                sigma,
                m: 4,
                classes: pattern_classes(Pattern::AQuarter, x, y),
                finite_simple: chain(&letters, basis_weight(last)),
                theta_listed: eps(1),
                isotropic: (1..=l).map(ev).collect(),
                prime_letters: if family == A2k2k4 {
                    d.clone()
                } else {
                    e.clone()
                },
                prime_label: prime,
                dprime_label: dprime,
                imaginary: imag,
                fq,
                extended: false,
                finite_type: ftype,
                loop_dims: dims,
            }
        }
        Dk1l | Dl1k | Dk1k | Cl1 => {
            // Cl1 keeps its l symplectic letters in the ε slots.
            let (ne, nd) = if family == Cl1 { (l, 0) } else { (k, l) };
            let e = es(ne);
            let d = ds(nd);
            let (x, y) = if family == Dk1l { (&e, &d) } else { (&d, &e) };
            let letters = interleave(&e, &d);
            let last = *letters.last().unwrap();
            let nn = ne + nd;
            let (prime, dprime, ftype, dims, fq, sigma) = match family {
                Dk1l => (
                    format!("D_{}^(2)", k + 1),
                    format!("C_{l}^(1)"),
                    format!("B({k},{l})"),
                    osp_dims(2 * ku + 2, lu),
                    FqSelector::One,
                    1,
                ),
                Dl1k => (
                    format!("C_{k}^(1)"),
                    format!("D_{}^(2)", l + 1),
                    format!("B({l},{k})"),
                    osp_dims(2 * lu + 2, ku),
                    FqSelector::One,
                    1,
                ),
                Dk1k => (
                    format!("D_{}^(2)", k + 1),
                    format!("C_{k}^(1)"),
                    format!("B({k},{k})"),
                    osp_dims(2 * ku + 2, ku),
                    FqSelector::DPlain,
                    -1,
                ),
                _ => (
                    format!("C_{l}^(1)"),
                    "none".to_string(),
                    format!("B(0,{l})"),
                    osp_dims(2, lu),
                    FqSelector::One,
                    1,
                ),
            };
            Blueprint {
                n_eps: ne,
                n_del: nd,
                sigma,
                m: 2,
                classes: pattern_classes(Pattern::DTwisted, x, y),
                finite_simple: chain(&letters, basis_weight(last)),
                theta_listed: eps(1),
                isotropic: (1..=nd.min(ne)).map(ev).collect(),
                prime_letters: if family == Dk1k { d.clone() } else { e.clone() },
                prime_label: prime,
                dprime_label: dprime,
                imaginary: vec![((0, Even), nn), ((1, Even), 1)],
                fq,
                extended: false,
                finite_type: ftype,
                loop_dims: dims,
            }
        }
        G3 => Blueprint {
            n_eps: 3,
            n_del: 0,
            sigma: 1,
            m: 2,
            classes: g3_classes(),
            finite_simple: vec![
                eps(3) - eps(2) - eps(1),
                eps(1).scale_int(2),
                eps(2).scale_int(2),
            ],
            theta_listed: eps(3) + eps(2).scale_int(2),
            isotropic: vec![eps(3) - eps(2) - eps(1)],
            prime_letters: vec![Eps(1), Eps(2)],
            prime_label: "G_2^(1)".to_string(),
            dprime_label: "A_1^(1)".to_string(),
            imaginary: vec![((0, Even), 3)],
            fq: FqSelector::One,
            extended: false,
            finite_type: "D(1,2,-3/4)".to_string(),
            loop_dims: (17, 14),
        },
    }
}

/// Rank constraints, and the diagonal redirection of mirror rows at k = l.
fn normalize_ranks(family: FamilyId, k: u32, l: u32) -> Result<(FamilyId, u32, u32), SpecError> {
    use FamilyId::*;
    let bad = |detail: String| SpecError::Rank {
        family: family.token(),
        detail,
    };
    match family {
        G3 => Ok((G3, 0, 0)),
        Cl1 => {
            if l < 1 {
                Err(bad(format!("need l >= 1, got l={l}")))
            } else {
                Ok((Cl1, 0, l))
            }
        }
        A2km12km1 | A2k2k4 | Dk1k => {
            // A(1,1)^(2) is degenerate: its class-1 roots have no unique maximum.
            let min_k = if family == A2km12km1 { 2 } else { 1 };
            if k < min_k {
                Err(bad(format!("need k >= {min_k}, got k={k}")))
            } else if l != 0 && l != k {
                Err(bad(format!("l is forced to equal k, got k={k}, l={l}")))
            } else {
                Ok((family, k, k))
            }
        }
        _ => {
            if l < 1 {
                return Err(bad(format!("need l >= 1, got l={l}")));
            }
            let (min_k, mirror_diag) = match family {
                A2k2lm1 => (l, None),
                A2lm12km1 => (l, Some(A2km12km1)),
                A2l2k4 => (l, Some(A2k2k4)),
                Dl1k => (l, Some(Dk1k)),
                _ => (l + 1, None),
            };
            if k < min_k {
                return Err(bad(format!("need k >= {min_k}, got k={k}, l={l}")));
            }
            match mirror_diag {
                Some(diag) if k == l => normalize_ranks(diag, k, k),
                _ => Ok((family, k, l)),
            }
        }
    }
}

impl AlgebraSpec {
    /// Roots of level class j (finite parts, with parity).
    pub fn class_roots(&self, j: u32) -> &[(Weight, Parity)] {
        &self.classes[(j % self.m) as usize]
    }

    pub fn alpha0(&self) -> &Weight {
        &self.simple_roots[0].0
    }

    pub fn finite_simple(&self) -> impl Iterator<Item = &(Weight, Parity)> {
        self.simple_roots[1..].iter()
    }

    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn name(&self) -> String {
        self.family.name(self.k, self.l)
    }

    /// Simple-root coordinates of δ.
    pub fn delta_coeffs(&self) -> Vec<Q> {
        self.coords
            .decompose(&Weight::delta())
            .expect("δ lies in the span")
    }

    pub fn height_of(&self, w: &Weight) -> Option<Q> {
        self.coords.decompose(w).map(|c| height(&c))
    }

    pub fn delta_height(&self) -> Q {
        height(&self.delta_coeffs())
    }

    /// Smallest s > 0 with sδ a root.
    pub fn minimal_imaginary_level(&self) -> u32 {
        (1..=self.m)
            .find(|s| {
                let j = s % self.m;
                self.imaginary.get(&(j, Parity::Even)).copied().unwrap_or(0)
                    + self.imaginary.get(&(j, Parity::Odd)).copied().unwrap_or(0)
                    > 0
            })
            .unwrap_or(self.m)
    }

    pub fn imaginary_mult(&self, s: u32, p: Parity) -> u32 {
        self.imaginary.get(&(s % self.m, p)).copied().unwrap_or(0)
    }

    /// Positive roots of the finite part g (level 0).
    pub fn finite_positive_roots(&self) -> Vec<(Weight, Parity)> {
        self.class_roots(0)
            .iter()
            .filter(|(w, _)| self.coords.is_positive(w))
            .cloned()
            .collect()
    }

    /// All positive roots with δ-coefficient at most `max_delta`.
    pub fn positive_roots(&self, max_delta: u32) -> Vec<RootDatum> {
        let mut out: Vec<RootDatum> = self
            .finite_positive_roots()
            .into_iter()
            .map(|(root, parity)| RootDatum {
                root,
                parity,
                multiplicity: 1,
                level: 0,
            })
            .collect();
        for s in 1..=max_delta {
            let sd = Weight::delta().scale_int(s as i64);
            for (a, p) in self.class_roots(s) {
                out.push(RootDatum {
                    root: &sd + a,
                    parity: *p,
                    multiplicity: 1,
                    level: s as i64,
                });
            }
            for p in [Parity::Even, Parity::Odd] {
                let mu = self.imaginary_mult(s, p);
                if mu > 0 {
                    out.push(RootDatum {
                        root: sd.clone(),
                        parity: p,
                        multiplicity: mu,
                        level: s as i64,
                    });
                }
            }
        }
        out
    }

    /// Positive roots whose height is at most `max_height`.
    pub fn positive_roots_below(&self, max_height: &Q) -> Vec<RootDatum> {
        let hd = self.delta_height();
        // A level-s root a + sδ has height at least s·ht(δ) − max |ht(a)|.
        let hmax = (0..self.m)
            .flat_map(|j| self.class_roots(j).iter())
            .filter_map(|(a, _)| self.height_of(a))
            .map(|h| h.abs())
            .max()
            .unwrap_or_else(Q::zero);
        let mut smax = 0u32;
        while qi(smax as i64 + 1) * &hd - &hmax <= *max_height {
            smax += 1;
        }
        self.positive_roots(smax)
            .into_iter()
            .filter(|r| {
                self.height_of(&r.root)
                    .map(|h| h <= *max_height)
                    .unwrap_or(false)
            })
            .collect()
    }

    /// The maximal isotropic subspace dimension of the finite real span.
    pub fn defect(&self) -> usize {
        let g = self.form.gram();
        let pos = (0..g.len()).filter(|&i| g[i][i].is_positive()).count();
        let neg = (0..g.len()).filter(|&i| g[i][i].is_negative()).count();
        pos.min(neg)
    }

    /// Counts of nonzero finite parts per (class, parity).
    pub fn class_counts(&self) -> BTreeMap<(u32, Parity), usize> {
        let mut out = BTreeMap::new();
        for j in 0..self.m {
            for p in [Parity::Even, Parity::Odd] {
                out.insert((j, p), 0);
            }
            for (_, p) in self.class_roots(j) {
                *out.get_mut(&(j, *p)).unwrap() += 1;
            }
        }
        out
    }

    /// The dimension bookkeeping: Σ_j (|Δ^{(j)}| + mult(j)) for each parity.
    pub fn bookkeeping(&self) -> (u64, u64) {
        let counts = self.class_counts();
        let mut tot = (0u64, 0u64);
        for ((j, p), c) in counts {
            let v = c as u64 + self.imaginary_mult(j, p) as u64;
            match p {
                Parity::Even => tot.0 += v,
                Parity::Odd => tot.1 += v,
            }
        }
        tot
    }

    /// Even real roots of `sub` in the class of level n (finite parts).
    fn subsystem_class(&self, letters: &[BasisSymbol], j: u32) -> Vec<Weight> {
        self.class_roots(j)
            .iter()
            .filter(|(w, p)| {
                *p == Parity::Even && !w.is_zero() && w.iter().all(|(s, _)| letters.contains(s))
            })
            .map(|(w, _)| w.clone())
            .collect()
    }

    /// The lattice generated by 2n/(α,α)·α over nδ−α in the subsystem,
    /// reduced to a Hermite basis.
    fn subsystem_lattice(&self, letters: &[BasisSymbol]) -> Vec<Weight> {
        let syms = self.form.finite_symbols();
        let mut gens: Vec<Vec<Q>> = Vec::new();
        for n in 1..=(2 * self.m) {
            for a in self.subsystem_class(letters, n) {
                let aa = self.form.norm(&a);
                if aa.is_zero() {
                    continue;
                }
                let c = qi(2 * n as i64) / aa;
                gens.push(syms.iter().map(|s| a.coord(*s) * &c).collect());
            }
        }
        if gens.is_empty() {
            return Vec::new();
        }
        let den = gens
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| (x * Q::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        linalg::hermite_basis(&ints)
            .into_iter()
            .map(|row| {
                let mut w = Weight::zero();
                for (s, x) in syms.iter().zip(row) {
                    w = w.with(*s, Q::new(x, den.clone()));
                }
                w
            })
            .collect()
    }

    /// Level-0 even roots of the subsystem (the finite Weyl group's roots).
    pub fn subsystem_finite_roots(&self, sub: &Subsystem) -> Vec<Weight> {
        self.subsystem_class(&sub.letters, 0)
            .into_iter()
            .filter(|w| self.coords.is_positive(w))
            .collect()
    }

    /// Every positive even real root of the subsystem up to level `max_level`.
    pub fn subsystem_affine_roots(&self, sub: &Subsystem, max_level: u32) -> Vec<Weight> {
        let mut out = self.subsystem_finite_roots(sub);
        for s in 1..=max_level {
            let sd = Weight::delta().scale_int(s as i64);
            for a in self.subsystem_class(&sub.letters, s) {
                out.push(&sd + &a);
            }
        }
        out
    }

    /// The even component of the finite part used as W^# in the finite
    /// identity: the larger by rank; at equal rank a non-D type wins, and a
    /// remaining tie falls back to Δ′.
    pub fn sharp_letters(&self) -> Vec<BasisSymbol> {
        if self.family == FamilyId::G3 {
            return self.delta_prime.letters.clone();
        }
        let a = self.delta_prime.letters.clone();
        let b = self.delta_doubleprime.letters.clone();
        let roots = |ls: &[BasisSymbol]| self.subsystem_class(ls, 0);
        let is_d = |ls: &[BasisSymbol]| roots(ls).iter().all(|w| w.iter().count() == 2);
        let (ra, rb) = (
            if roots(&a).is_empty() { 0 } else { a.len() },
            if roots(&b).is_empty() { 0 } else { b.len() },
        );
        if ra != rb {
            return if ra > rb { a } else { b };
        }
        if is_d(&a) && !is_d(&b) {
            return b;
        }
        a
    }

    /// Reports every structural check that fails.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let f = &self.form;
        // δ integrality on the minimal imaginary root.
        let s0 = self.minimal_imaginary_level();
        let dmin = self.coords.decompose(&Weight::delta().scale_int(s0 as i64));
        match dmin {
            Some(c) if c.iter().all(|x| x.is_integer() && x.is_positive()) => {}
            _ => rep.failures.push(format!(
                "{}δ is not a positive integer combination of simple roots",
                s0
            )),
        }
        if s0 != 1 {
            rep.notes.push(format!(
                "minimal imaginary root is {}δ; δ has simple-root coordinates [{}]",
                s0,
                self.delta_coeffs()
                    .iter()
                    .map(fmt_pq)
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        // simple roots belong to the multiset with the right parity
        for (i, (a, p)) in self.simple_roots.iter().enumerate() {
            let (j, fin) = if i == 0 {
                (1, -&self.theta)
            } else {
                (0, a.clone())
            };
            match self.class_roots(j).iter().find(|(w, _)| *w == fin) {
                Some((_, q)) if q == p => {}
                Some(_) => rep
                    .failures
                    .push(format!("simple root {a} has the wrong parity")),
                None => rep.failures.push(format!("simple root {a} is not a root")),
            }
        }
        if *self.alpha0() != self.alpha0_listed {
            rep.failures.push(format!(
                "computed α0 = {} differs from the listed {}",
                self.alpha0(),
                self.alpha0_listed
            ));
        }
        // every class root is ± a nonnegative integer combination
        for j in 0..self.m {
            for lev in [j as i64, j as i64 - self.m as i64] {
                if lev == 0 && j != 0 {
                    continue;
                }
                let sd = Weight::delta().scale_int(lev);
                for (a, _) in self.class_roots(j) {
                    let r = &sd + a;
                    let ok = match self.coords.decompose(&r) {
                        Some(c) => {
                            c.iter().all(|x| x.is_integer())
                                && (c.iter().all(|x| !x.is_negative())
                                    || c.iter().all(|x| !x.is_positive()))
                        }
                        None => false,
                    };
                    if !ok {
                        rep.failures
                            .push(format!("root {r} is neither positive nor negative"));
                    }
                }
            }
        }
        for (a, _) in self.simple_roots.iter() {
            let lhs = f.form(&self.rho_hat, a);
            let rhs = f.norm(a) / qi(2);
            if lhs != rhs {
                rep.failures.push(format!("(ρ̂,α) ≠ ½(α,α) for α = {a}"));
            }
        }
        // isotropic set
        let fin: Vec<&Weight> = self.finite_simple().map(|(w, _)| w).collect();
        for b in &self.isotropic {
            if !fin.contains(&b) {
                rep.failures
                    .push(format!("S element {b} is not a simple root"));
            }
            for c in &self.isotropic {
                if !f.form(b, c).is_zero() {
                    rep.failures.push("S not isotropic".to_string());
                }
            }
            if !f.form(&self.rho_hat, b).is_zero() {
                rep.failures.push(format!("(ρ̂,β) ≠ 0 for β = {b}"));
            }
        }
        if self.isotropic.len() != self.defect() {
            rep.failures.push(format!(
                "|S| = {} but the defect is {}",
                self.isotropic.len(),
                self.defect()
            ));
        }
        if f.form(&self.rho_hat, &Weight::delta()) != self.h_dual {
            rep.failures.push("h∨ differs from (ρ̂,δ)".to_string());
        }
        // positivity conditions on simple roots
        if !self.family.is_diagonal() {
            for (a, _) in &self.simple_roots {
                if f.norm(a).is_negative() {
                    rep.failures.push(format!("(α,α) < 0 for simple root {a}"));
                }
            }
            let a00 = f.norm(self.alpha0());
            let exempt = matches!(self.family, FamilyId::G3)
                || (matches!(self.family, FamilyId::A2k2lm1) && self.k == self.l)
                || (matches!(self.family, FamilyId::A2l2km1) && self.k == self.l + 1);
            if exempt {
                rep.notes.push(format!(
                    "(α0,α0) = {} is permitted for this family",
                    fmt_pq(&a00)
                ));
            } else if !a00.is_positive() {
                rep.failures.push("(α0,α0) is not positive".to_string());
            }
        }
        if (self.h_dual.is_zero()) != self.family.is_diagonal() {
            rep.failures.push(format!(
                "h∨ = {} disagrees with the family class",
                fmt_pq(&self.h_dual)
            ));
        }
        if self.bookkeeping() != self.loop_dims {
            rep.failures.push(format!(
                "dimension bookkeeping {:?} does not balance against {:?}",
                self.bookkeeping(),
                self.loop_dims
            ));
        }
        if self.imaginary_mult(0, Parity::Even) as usize != self.form.finite_symbols().len()
            || self.imaginary_mult(0, Parity::Odd) != 0
        {
            rep.failures.push("mult(0,·) is not (rank, 0)".to_string());
        }
        for j in 1..self.m {
            for p in [Parity::Even, Parity::Odd] {
                if self.imaginary_mult(j, p) != self.imaginary_mult(self.m - j, p) {
                    rep.failures
                        .push("imaginary multiplicities are not symmetric".to_string());
                }
            }
        }
        rep
    }

    /// Plain-text sheet of the encoded data.
    pub fn data_sheet(&self) -> String {
        let mut s = String::new();
        let line = |s: &mut String, k: &str, v: String| s.push_str(&format!("{k:<14}{v}\n"));
        line(
            &mut s,
            "family",
            format!("{} [{}]", self.name(), self.family.token()),
        );
        line(
            &mut s,
            "ranks",
            format!("k={} l={} m={}", self.k, self.l, self.m),
        );
        line(&mut s, "finite part", self.finite_type.clone());
        for (i, (a, p)) in self.simple_roots.iter().enumerate() {
            line(&mut s, &format!("alpha{i}"), format!("{a} ({p})"));
        }
        line(&mut s, "theta", self.theta.to_string());
        line(&mut s, "rho", self.rho.to_string());
        line(&mut s, "rho_hat", self.rho_hat.to_string());
        line(&mut s, "h_dual", fmt_pq(&self.h_dual));
        line(
            &mut s,
            "delta",
            self.delta_coeffs()
                .iter()
                .map(fmt_pq)
                .collect::<Vec<_>>()
                .join(" "),
        );
        line(
            &mut s,
            "S",
            self.isotropic
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        );
        for (name, sub) in [
            ("Delta'", &self.delta_prime),
            ("Delta''", &self.delta_doubleprime),
        ] {
            let letters: Vec<String> = sub.letters.iter().map(|x| x.to_string()).collect();
            line(
                &mut s,
                name,
                format!("{} on {{{}}}", sub.label, letters.join(",")),
            );
            line(
                &mut s,
                &format!("M{}", &name[5..]),
                sub.lattice
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            );
        }
        for ((j, p), mu) in &self.imaginary {
            line(&mut s, "imag mult", format!("class {j} {p}: {mu}"));
        }
        line(&mut s, "f(q)", format!("{:?}", self.fq));
        line(&mut s, "extended", self.extended_sign.to_string());
        s
    }
}

/// Builds and validates the spec of `family` at ranks (k, l).
pub fn build_spec(family: FamilyId, k: u32, l: u32) -> Result<AlgebraSpec, SpecError> {
    let (family, k, l) = normalize_ranks(family, k, l)?;
    let bp = blueprint(family, k, l);
    let tok = family.token();
    let inconsistent = |detail: String| SpecError::Inconsistent {
        family: tok,
        detail,
    };
    let form = if family == FamilyId::G3 {
        BilinearForm::g3()
    } else {
        BilinearForm::standard(bp.sigma, bp.n_eps, bp.n_del)
    };
    let syms = form.finite_symbols();
    let n = syms.len();
    if bp.finite_simple.len() != n {
        return Err(inconsistent(format!(
            "{} finite simple roots for rank {}",
            bp.finite_simple.len(),
            n
        )));
    }
    // ρ from (ρ,α_i) = ½(α_i,α_i)
    let a: Vec<Vec<Q>> = bp
        .finite_simple
        .iter()
        .map(|al| {
            syms.iter()
                .map(|s| al.coord(*s) * form.pair(*s, *s))
                .collect()
        })
        .collect();
    let b: Vec<Q> = bp
        .finite_simple
        .iter()
        .map(|al| form.norm(al) / qi(2))
        .collect();
    let x = linalg::solve(&a, &b)
        .ok_or_else(|| inconsistent("finite simple roots are dependent".into()))?;
    let mut rho = Weight::zero();
    for (s, v) in syms.iter().zip(x) {
        rho = rho.with(*s, v);
    }
    // finite coordinates, to compute θ by dominance
    let mut fsyms = syms.clone();
    fsyms.push(BasisSymbol::Delta);
    let finite_coords = {
        let mut sr = bp.finite_simple.clone();
        sr.push(Weight::delta());
        SimpleCoords::new(fsyms.clone(), sr)
            .ok_or_else(|| inconsistent("finite simple roots are dependent".into()))?
    };
    let c1: Vec<Weight> = bp.classes[1 % bp.m as usize]
        .iter()
        .map(|(w, _)| w.clone())
        .filter(|w| !w.is_zero())
        .collect();
    let maximal: Vec<&Weight> = c1
        .iter()
        .filter(|w| c1.iter().all(|v| v == *w || !finite_coords.dominates(v, w)))
        .collect();
    let theta = match maximal.as_slice() {
        [t] => (*t).clone(),
        _ => {
            return Err(inconsistent(format!(
                "{} maximal class-1 roots, expected one",
                maximal.len()
            )))
        }
    };
    if theta != bp.theta_listed {
        return Err(inconsistent(format!(
            "highest class-1 root {} differs from the listed {}",
            theta, bp.theta_listed
        )));
    }
    let alpha0 = Weight::delta() - theta.clone();
    let parity_of =
        |w: &Weight, j: usize| bp.classes[j].iter().find(|(x, _)| x == w).map(|(_, p)| *p);
    let p0 = parity_of(&-&theta, 1 % bp.m as usize)
        .ok_or_else(|| inconsistent("−θ is not a class-1 root".into()))?;
    let mut simple_roots = vec![(alpha0.clone(), p0)];
    for al in &bp.finite_simple {
        let p = parity_of(al, 0)
            .ok_or_else(|| inconsistent(format!("simple root {al} is not a root")))?;
        simple_roots.push((al.clone(), p));
    }
    let coords = SimpleCoords::new(fsyms, simple_roots.iter().map(|(w, _)| w.clone()).collect())
        .ok_or_else(|| inconsistent("simple roots are dependent".into()))?;
    let h_dual = form.norm(&alpha0) / qi(2) + form.form(&rho, &theta);
    let rho_hat = rho.clone().with(BasisSymbol::Lambda0, h_dual.clone());
    let dprime_letters: Vec<BasisSymbol> = syms
        .iter()
        .copied()
        .filter(|s| !bp.prime_letters.contains(s))
        .collect();
    let mut spec = AlgebraSpec {
        family,
        k,
        l,
        m: bp.m,
        form,
        simple_roots,
        coords,
        rho,
        h_dual,
        rho_hat,
        theta,
        isotropic: bp.isotropic,
        delta_prime: Subsystem {
            label: bp.prime_label,
            letters: bp.prime_letters,
            lattice: vec![],
        },
        delta_doubleprime: Subsystem {
            label: bp.dprime_label,
            letters: dprime_letters,
            lattice: vec![],
        },
        imaginary: bp.imaginary.into_iter().filter(|(_, v)| *v > 0).collect(),
        fq: bp.fq,
        extended_sign: bp.extended,
        finite_type: bp.finite_type,
        loop_dims: bp.loop_dims,
        classes: bp.classes,
        alpha0_listed: Weight::zero(),
    };
    spec.alpha0_listed = alpha0;
    spec.delta_prime.lattice = spec.subsystem_lattice(&spec.delta_prime.letters.clone());
    spec.delta_doubleprime.lattice =
        spec.subsystem_lattice(&spec.delta_doubleprime.letters.clone());
    let rep = spec.validate();
    if !rep.ok() {
        return Err(inconsistent(rep.failures.join("; ")));
    }
    Ok(spec)
}

/// Replaces S, bypassing validation (used for negative controls).
pub fn with_isotropic(spec: &AlgebraSpec, s: Vec<Weight>) -> AlgebraSpec {
    let mut out = spec.clone();
    out.isotropic = s;
    out
}

/// Integer vector of M′-basis coordinates for μ, when μ ∈ M′.
pub fn lattice_coords(basis: &[Weight], mu: &Weight, syms: &[BasisSymbol]) -> Option<Vec<i64>> {
    if basis.is_empty() {
        return if mu.is_zero() { Some(vec![]) } else { None };
    }
    // least squares is unnecessary: the basis is in echelon form over syms
    let mut rest = mu.clone();
    let mut out = Vec::with_capacity(basis.len());
    for b in basis {
        let pivot = syms.iter().find(|s| !b.coord(**s).is_zero())?;
        let c = rest.coord(*pivot) / b.coord(*pivot);
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer().to_i64()?);
        rest = &rest - &b.scale(&c);
    }
    if rest.is_zero() {
        Some(out)
    } else {
        None
    }
}
