//! Sparse integer matrices and Smith normal form.
//!
//! Elimination first pivots on ±1 entries, choosing the pivot of least
//! Markowitz cost (row length − 1)(column length − 1). A unit pivot splits
//! off a factor 1 exactly via the Schur complement. The residual block goes
//! to a dense Smith form over arbitrary-precision integers.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse integer matrix stored by rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    /// Per row, (column, value) sorted by column, no zeros.
    pub rows: Vec<Vec<(u32, i64)>>,
}

impl SparseIntMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    /// Adds `v` to entry (i, j).
    pub fn add(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.nrows && j < self.ncols, "entry out of range");
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(p) => {
                row[p].1 += v;
                if row[p].1 == 0 {
                    row.remove(p);
                }
            }
            Err(p) => {
                if v != 0 {
                    row.insert(p, (j as u32, v));
                }
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&(j as u32), |e| e.0).map(|p| row[p].1).unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Self {
        let nrows = m.len();
        let ncols = m.first().map(|r| r.len()).unwrap_or(0);
        let mut s = SparseIntMatrix::new(nrows, ncols);
        for (i, r) in m.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    s.add(i, j, v);
                }
            }
        }
        s
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.ncols]; self.nrows];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[i][j as usize] = v;
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = SparseIntMatrix::new(self.ncols, self.nrows);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                t.rows[j as usize].push((i as u32, v));
            }
        }
        t
    }

    /// Product self · other.
    pub fn mul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = SparseIntMatrix::new(self.nrows, other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            let mut acc: HashMap<u32, i64> = HashMap::new();
            for &(k, a) in r {
                for &(j, b) in &other.rows[k as usize] {
                    *acc.entry(j).or_insert(0) += a * b;
                }
            }
            let mut row: Vec<(u32, i64)> = acc.into_iter().filter(|e| e.1 != 0).collect();
            row.sort_unstable();
            out.rows[i] = row;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }
}

/// Rank and elementary divisors (> 1) of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub rank: usize,
    pub divisors: Vec<BigInt>,
    /// Pivots taken by sparse unit elimination.
    pub unit_pivots: usize,
    /// Size of the residual dense block.
    pub dense_shape: (usize, usize),
}

/// Smith normal form: sparse unit elimination, then dense SNF.
pub fn smith_normal_form(a: &SparseIntMatrix) -> SmithForm {
    let mut elim = Eliminator::new(a);
    elim.run();
    let (dense, shape) = elim.residual();
    let (drank, mut divisors) = dense_smith(dense);
    divisors.retain(|d| !d.is_one());
    SmithForm {
        rank: elim.pivots + drank,
        divisors,
        unit_pivots: elim.pivots,
        dense_shape: shape,
    }
}

struct Eliminator {
    rows: Vec<Vec<(u32, i64)>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    /// Row indices with a (possibly stale) entry in each column.
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<usize>,
    pivots: usize,
    ncols: usize,
    overflow: bool,
}

impl Eliminator {
    fn new(a: &SparseIntMatrix) -> Self {
        let mut col_rows = vec![Vec::new(); a.ncols];
        let mut col_count = vec![0; a.ncols];
        for (i, r) in a.rows.iter().enumerate() {
            for &(j, _) in r {
                col_rows[j as usize].push(i as u32);
                col_count[j as usize] += 1;
            }
        }
        Eliminator {
            rows: a.rows.clone(),
            row_alive: vec![true; a.nrows],
            col_alive: vec![true; a.ncols],
            col_rows,
            col_count,
            pivots: 0,
            ncols: a.ncols,
            overflow: false,
        }
    }

    /// Best unit entry of row i: (cost, column, value).
    fn best_unit(&self, i: usize) -> Option<(usize, u32, i64)> {
        let len = self.rows[i].len();
        self.rows[i]
            .iter()
            .filter(|e| e.1 == 1 || e.1 == -1)
            .map(|&(j, v)| ((len - 1) * (self.col_count[j as usize] - 1), j, v))
            .min()
    }

    fn run(&mut self) {
        let mut heap: BinaryHeap<Reverse<(usize, u32)>> = BinaryHeap::new();
        for i in 0..self.rows.len() {
            if let Some((c, _, _)) = self.best_unit(i) {
                heap.push(Reverse((c, i as u32)));
            }
        }
        while let Some(Reverse((cost, i))) = heap.pop() {
            let i = i as usize;
            if !self.row_alive[i] || self.overflow {
                continue;
            }
            let Some((c, j, v)) = self.best_unit(i) else { continue };
            if c > cost {
                heap.push(Reverse((c, i as u32)));
                continue;
            }
            let touched = self.pivot(i, j, v);
            for r in touched {
                if let Some((c, _, _)) = self.best_unit(r) {
                    heap.push(Reverse((c, r as u32)));
                }
            }
        }
    }

    /// Schur complement on the unit entry (i, j) = v. Returns rows changed.
    fn pivot(&mut self, i: usize, j: u32, v: i64) -> Vec<usize> {
        let prow = std::mem::take(&mut self.rows[i]);
        let others: Vec<u32> = std::mem::take(&mut self.col_rows[j as usize]);
        let mut touched = Vec::new();
        let mut updates: Vec<(usize, Vec<(u32, i64)>)> = Vec::new();
        for &r in &others {
            let r = r as usize;
            if r == i || !self.row_alive[r] {
                continue;
            }
            let a = match self.rows[r].binary_search_by_key(&j, |e| e.0) {
                Ok(p) => self.rows[r][p].1,
                Err(_) => continue,
            };
            // row_r -= (a / v) * row_i, with 1/v = v for v = ±1
            let f = a * v;
            match merge_rows(&self.rows[r], &prow, f) {
                Some(nr) => updates.push((r, nr)),
                None => {
                    // restore and stop sparse elimination
                    self.rows[i] = prow;
                    self.col_rows[j as usize] = others;
                    self.overflow = true;
                    return Vec::new();
                }
            }
        }
        for (r, nr) in updates {
            // update column counts
            for &(c, _) in &self.rows[r] {
                self.col_count[c as usize] -= 1;
            }
            for &(c, _) in &nr {
                self.col_count[c as usize] += 1;
                if self.rows[r].binary_search_by_key(&c, |e| e.0).is_err() {
                    self.col_rows[c as usize].push(r as u32);
                }
            }
            self.rows[r] = nr;
            touched.push(r);
        }
        for &(c, _) in &prow {
            self.col_count[c as usize] -= 1;
        }
        self.row_alive[i] = false;
        self.col_alive[j as usize] = false;
        debug_assert_eq!(self.col_count[j as usize], 0);
        self.pivots += 1;
        touched
    }

    fn residual(&self) -> (Vec<Vec<BigInt>>, (usize, usize)) {
        let cols: Vec<usize> =
            (0..self.ncols).filter(|&c| self.col_alive[c] && self.col_count[c] > 0).collect();
        let mut index = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            index[c] = k;
        }
        let mut dense = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            if !self.row_alive[i] || r.is_empty() {
                continue;
            }
            let mut row = vec![BigInt::zero(); cols.len()];
            for &(c, v) in r {
                row[index[c as usize]] = BigInt::from(v);
            }
            dense.push(row);
        }
        let shape = (dense.len(), cols.len());
        (dense, shape)
    }
}

/// a − f·b for sorted sparse rows; None on overflow.
fn merge_rows(a: &[(u32, i64)], b: &[(u32, i64)], f: i64) -> Option<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        if y == b.len() || (x < a.len() && a[x].0 < b[y].0) {
            out.push(a[x]);
            x += 1;
        } else if x == a.len() || b[y].0 < a[x].0 {
            out.push((b[y].0, f.checked_mul(b[y].1)?.checked_neg()?));
            y += 1;
        } else {
            let v = a[x].1.checked_sub(f.checked_mul(b[y].1)?)?;
            if v != 0 {
                out.push((a[x].0, v));
            }
            x += 1;
            y += 1;
        }
    }
    Some(out)
}

/// Dense Smith normal form. Returns rank and the nonzero diagonal in
/// divisibility order (absolute values).
pub fn dense_smith(mut m: Vec<Vec<BigInt>>) -> (usize, Vec<BigInt>) {
    let nr = m.len();
    let nc = m.first().map(|r| r.len()).unwrap_or(0);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut again = false;
            // clear column t
            for i in t + 1..nr {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..nc {
                    let s = &q * &m[t][j];
                    m[i][j] -= s;
                }
                if !m[i][t].is_zero() {
                    again = true;
                }
            }
            // clear row t
            for j in t + 1..nc {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for i in t..nr {
                    let s = &q * &m[i][t];
                    m[i][j] -= s;
                }
                if !m[t][j].is_zero() {
                    again = true;
                }
            }
            if again {
                // move the smallest nonzero of row/column t to the pivot
                let mut bi = (t, t);
                for i in t..nr {
                    if !m[i][t].is_zero() && m[i][t].abs() < m[bi.0][bi.1].abs() {
                        bi = (i, t);
                    }
                }
                for j in t..nc {
                    if !m[t][j].is_zero() && m[t][j].abs() < m[bi.0][bi.1].abs() {
                        bi = (t, j);
                    }
                }
                m.swap(t, bi.0);
                for row in m.iter_mut() {
                    row.swap(t, bi.1);
                }
                continue;
            }
            // divisibility of the trailing block
            let p = m[t][t].clone();
            let mut bad = None;
            'find: for i in t + 1..nr {
                for j in t + 1..nc {
                    if !(&m[i][j] % &p).is_zero() {
                        bad = Some(i);
                        break 'find;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..nc {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    (diag.len(), normalize_chain(diag))
}

/// Rewrites a list of nonzero diagonal entries as a divisibility chain.
fn normalize_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}
