//! Small dense linear algebra: Gaussian elimination over any field and an
//! integer Hermite normal form for lattice bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, Signed, Zero};

/// Solves `a·x = b` for square `a`. Returns `None` when `a` is singular.
///
/// Pivots on the entry of largest absolute value, which is harmless for exact
/// fields and keeps floating point inputs stable.
pub fn solve<F>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>>
where
    F: Num + Signed + PartialOrd + Clone,
{
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&x, &y| {
                m[x][col]
                    .abs()
                    .partial_cmp(&m[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for c in col..=n {
            m[col][c] = m[col][c].clone() / p.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = m[col][c].clone() * f.clone();
                    m[r][c] = m[r][c].clone() - v;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert<F>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>>
where
    F: Num + Signed + PartialOrd + Clone,
{
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<F> = (0..n)
            .map(|i| if i == j { F::one() } else { F::zero() })
            .collect();
        cols.push(solve(a, &e)?);
    }
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
            .collect(),
    )
}

/// Determinant by elimination.
pub fn det<F>(a: &[Vec<F>]) -> F
where
    F: Num + Signed + PartialOrd + Clone,
{
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = F::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return F::zero(),
        };
        if piv != col {
            m.swap(col, piv);
            d = -d;
        }
        let p = m[col][col].clone();
        d = d * p.clone();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = m[r][col].clone() / p.clone();
                for c in col..n {
                    let v = m[col][c].clone() * f.clone();
                    m[r][c] = m[r][c].clone() - v;
                }
            }
        }
    }
    d
}

/// Row-style Hermite normal form of the lattice spanned by integer vectors.
///
/// Returns a basis (nonzero rows, leading entries positive, entries above each
/// pivot reduced modulo it). Two generating sets span the same lattice iff
/// their HNF bases coincide.
pub fn hermite_basis(vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..ncols {
        // Euclid on the column until one row holds the gcd.
        loop {
            let mut nz: Vec<usize> = (0..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()));
            let p = nz[0];
            for &r in &nz[1..] {
                let f = rows[r][col].div_floor(&rows[p][col]);
                let pr = rows[p].clone();
                for (c, v) in pr.iter().enumerate() {
                    rows[r][c] -= &f * v;
                }
            }
        }
        if let Some(p) = (0..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            let mut pr = rows.remove(p);
            if pr[col].is_negative() {
                for v in pr.iter_mut() {
                    *v = -v.clone();
                }
            }
            out.push(pr);
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    // Reduce entries above pivots.
    for i in 0..out.len() {
        let pc = out[i].iter().position(|x| !x.is_zero()).unwrap();
        for j in 0..i {
            let f = out[j][pc].div_floor(&out[i][pc]);
            if !f.is_zero() {
                let pr = out[i].clone();
                for (c, v) in pr.iter().enumerate() {
                    out[j][c] -= &f * v;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, Q};

    #[test]
    fn solves_rational_system() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(3)]];
        let x = solve(&a, &[qi(3), qi(5)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
    }

    #[test]
    fn singular_is_none() {
        let a = vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]];
        assert!(solve(&a, &[qi(1), qi(1)]).is_none());
        assert_eq!(det(&a), Q::zero());
    }

    #[test]
    fn float_solve() {
        let a = vec![vec![0.0f64, 1.0], vec![2.0, 0.0]];
        let x = solve(&a, &[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![2.0, 3.0]);
    }

    #[test]
    fn hnf_of_d2_lattice() {
        let v = |a: i64, b: i64| vec![BigInt::from(a), BigInt::from(b)];
        let basis = hermite_basis(&[v(1, 1), v(1, -1), v(2, 0)]);
        assert_eq!(basis, vec![v(1, 1), v(0, 2)]);
    }
}
