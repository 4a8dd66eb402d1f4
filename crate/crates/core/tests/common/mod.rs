//! Test-only oracles, written without the library's linear algebra.

#![allow(dead_code)]

use num_traits::{One, Zero};
use vira_core::sampling::Sampler;
use vira_core::Scalar;

/// Plain Gauss–Jordan solve of `a x = b`; `None` if singular or inconsistent.
pub fn gauss_solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Scalar::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot = m[row].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() < cols || m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

pub fn pow(base: &Scalar, e: i64) -> Scalar {
    let mut acc = Scalar::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        Scalar::one() / acc
    } else {
        acc
    }
}

/// `Σ_{i,j} μ_i^m m^j v_{i,j}` evaluated term by term.
pub fn synthesize(mus: &[Scalar], table: &[Vec<Vec<Scalar>>], m: i64) -> Vec<Scalar> {
    let dim = table[0][0].len();
    let mut out = vec![Scalar::zero(); dim];
    for (mu, row) in mus.iter().zip(table) {
        for (j, v) in row.iter().enumerate() {
            let w = pow(mu, m) * pow(&Scalar::from_integer(m.into()), j as i64);
            for (o, x) in out.iter_mut().zip(v) {
                *o += &w * x;
            }
        }
    }
    out
}

/// Brute-force recovery: one dense solve per coordinate of the full system.
pub fn oracle_separate(mus: &[Scalar], k: usize, window: &[i64], values: &[Vec<Scalar>]) -> Option<Vec<Vec<Vec<Scalar>>>> {
    let a: Vec<Vec<Scalar>> = window
        .iter()
        .map(|&m| {
            let mut row = Vec::new();
            for mu in mus {
                for j in 0..=k {
                    row.push(pow(mu, m) * pow(&Scalar::from_integer(m.into()), j as i64));
                }
            }
            row
        })
        .collect();
    let dim = values[0].len();
    let mut table = vec![vec![vec![Scalar::zero(); dim]; k + 1]; mus.len()];
    for c in 0..dim {
        let b: Vec<Scalar> = values.iter().map(|v| v[c].clone()).collect();
        let x = gauss_solve(&a, &b)?;
        for (idx, val) in x.into_iter().enumerate() {
            table[idx / (k + 1)][idx % (k + 1)][c] = val;
        }
    }
    Some(table)
}

pub struct Instance {
    pub mus: Vec<Scalar>,
    pub k: usize,
    pub table: Vec<Vec<Vec<Scalar>>>,
}

/// Random structure with `s ≤ 3`, `k ≤ 3`, dimension `≤ 4` and rational data.
pub fn random_instance(rng: &mut Sampler) -> Instance {
    let s = rng.int(1, 3) as usize;
    let k = rng.int(0, 3) as usize;
    let dim = rng.int(1, 4) as usize;
    let mut mus: Vec<Scalar> = Vec::new();
    while mus.len() < s {
        let mu = rng.nonzero_scalar(4, 3);
        if !mus.contains(&mu) {
            mus.push(mu);
        }
    }
    let table = (0..s)
        .map(|_| (0..=k).map(|_| (0..dim).map(|_| rng.scalar(9, 4)).collect()).collect())
        .collect();
    Instance { mus, k, table }
}

/// `len` consecutive integers starting at `start`.
pub fn consecutive(start: i64, len: usize) -> Vec<i64> {
    (start..start + len as i64).collect()
}
