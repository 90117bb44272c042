//! Exact linear algebra over the scalar ring.
//!
//! Elimination divides only by units; other pivots are handled
//! fraction-free and reported back as genericity assumptions.

use crate::scalars::Scalar;

/// Row-echelon data produced by [`echelon`].
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<Scalar>>,
    /// Pivot column of each row in `rows`.
    pub pivots: Vec<usize>,
    /// Non-unit pivots that were assumed nonzero (printed canonically).
    pub assumptions: Vec<String>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduce `rows` (each of length `ncols`). Pivots prefer unit entries, then
/// the lowest row index. Unit pivots are scaled to one and cleared above
/// and below, giving the reduced row-echelon form when every pivot is a
/// unit.
pub fn echelon(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> Echelon {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut pivots = Vec::new();
    let mut assumptions = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let pick = (r..rows.len())
            .find(|&i| rows[i][c].is_unit())
            .or_else(|| (r..rows.len()).find(|&i| !rows[i][c].is_zero()));
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        let unit = piv.is_unit();
        if unit {
            let inv = piv.inv_unit().expect("unit pivot");
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
        } else {
            let a = format!("{piv} != 0");
            if !assumptions.contains(&a) {
                assumptions.push(a);
            }
        }
        let prow = rows[r].clone();
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            if i < r && !unit {
                continue;
            }
            let a = rows[i][c].clone();
            if unit {
                for (x, y) in rows[i].iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x = &*x - &(&a * y);
                    }
                }
            } else {
                for (x, y) in rows[i].iter_mut().zip(&prow) {
                    *x = &(&piv * &*x) - &(&a * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Echelon { rows, pivots, assumptions }
}

/// Basis of the right kernel `{x : A x = 0}`, one vector per free column,
/// in increasing free-column order. With unit pivots each vector has a one
/// in its free column and the basis is the canonical reduced one.
pub fn kernel(rows: Vec<Vec<Scalar>>, ncols: usize, m: usize) -> (Vec<Vec<Scalar>>, Vec<String>) {
    let ech = echelon(rows, ncols);
    let mut basis = Vec::new();
    let is_pivot: Vec<bool> = (0..ncols).map(|c| ech.pivots.contains(&c)).collect();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Scalar::zero(m); ncols];
        v[f] = Scalar::one(m);
        for (row, &pc) in ech.rows.iter().zip(&ech.pivots).rev() {
            let mut acc = Scalar::zero(m);
            for j in pc + 1..ncols {
                if !row[j].is_zero() && !v[j].is_zero() {
                    acc += &(&row[j] * &v[j]);
                }
            }
            let p = &row[pc];
            if p.is_unit() {
                v[pc] = -&acc.div_unit(p).expect("unit");
            } else {
                for x in v.iter_mut() {
                    *x = &*x * p;
                }
                v[pc] = -acc;
            }
        }
        basis.push(v);
    }
    (basis, ech.assumptions)
}

/// Inverse of a square matrix whose elimination only meets unit pivots.
pub fn inverse(a: &[Vec<Scalar>], m: usize) -> Option<Vec<Vec<Scalar>>> {
    let n = a.len();
    let rows: Vec<Vec<Scalar>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Scalar::one(m) } else { Scalar::zero(m) }));
            row
        })
        .collect();
    let ech = echelon(rows, 2 * n);
    if ech.rank() != n || ech.pivots.iter().any(|&p| p >= n) || !ech.assumptions.is_empty() {
        return None;
    }
    Some(ech.rows.iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(a: &[Vec<Scalar>], x: &[Scalar], m: usize) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            let mut acc = Scalar::zero(m);
            for (p, q) in row.iter().zip(x) {
                if !p.is_zero() && !q.is_zero() {
                    acc += &(p * q);
                }
            }
            acc
        })
        .collect()
}
