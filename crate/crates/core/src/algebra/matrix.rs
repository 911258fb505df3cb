use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Dense matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length".into()));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Reduced row echelon form and pivot columns. Pivots are chosen scanning
    /// columns left to right and rows top to bottom.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let sub = m.get(r, j) * &f;
                    if !sub.is_zero() {
                        let v = m.get(i, j) - sub;
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.insert(SparseRow::from_dense(self.row(i)));
        }
        red.rank()
    }

    /// Basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free).clone();
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        let rank = pivots.iter().filter(|&&p| p < n).count();
        if rank < n {
            return Err(Error::Singular { rank, size: n });
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sparse row: `(column, value)` pairs sorted by column, no zero values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseRow(Vec<(usize, Rational)>);

impl SparseRow {
    pub fn from_map(map: BTreeMap<usize, Rational>) -> Self {
        SparseRow(map.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseRow(values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn lead(&self) -> Option<usize> {
        self.0.first().map(|(c, _)| *c)
    }

    /// `self - f * other`
    fn axpy(&self, f: &Rational, other: &SparseRow) -> SparseRow {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ci = self.0.get(i).map(|e| e.0).unwrap_or(usize::MAX);
            let cj = other.0.get(j).map(|e| e.0).unwrap_or(usize::MAX);
            if ci < cj {
                out.push(self.0[i].clone());
                i += 1;
            } else if cj < ci {
                out.push((cj, -(f * &other.0[j].1)));
                j += 1;
            } else {
                let v = &self.0[i].1 - f * &other.0[j].1;
                if !v.is_zero() {
                    out.push((ci, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseRow(out)
    }
}

/// Incremental row echelon form over sparse rows. The set of pivot columns
/// agrees with the one of the reduced row echelon form of all inserted rows.
#[derive(Clone, Debug)]
pub struct RowReducer {
    ncols: usize,
    basis: BTreeMap<usize, SparseRow>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        RowReducer { ncols, basis: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `row` against the basis; returns the remainder (zero if `row`
    /// lies in the span).
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        while let Some(c) = row.lead() {
            match self.basis.get(&c) {
                Some(b) => {
                    let f = row.0[0].1.clone();
                    row = row.axpy(&f, b);
                }
                None => break,
            }
        }
        row
    }

    /// Inserts a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut r = self.reduce(row);
        let Some(c) = r.lead() else { return false };
        let inv = r.0[0].1.recip();
        for e in r.0.iter_mut() {
            e.1 *= &inv;
        }
        self.basis.insert(c, r);
        true
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.keys().copied().collect()
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_zero()
    }

    /// Basis of the common kernel of the inserted rows, one vector per
    /// non-pivot column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        // back-substitute to reduced form, last pivot first
        let mut reduced: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&p, row) in self.basis.iter().rev() {
            let mut r = row.clone();
            loop {
                let hit = r.0.iter().skip(1).find(|(c, _)| reduced.contains_key(c)).map(|(c, v)| (*c, v.clone()));
                match hit {
                    Some((c, v)) => r = r.axpy(&v, &reduced[&c]),
                    None => break,
                }
            }
            reduced.insert(p, r);
        }
        let mut out = Vec::new();
        for free in (0..self.ncols).filter(|c| !self.basis.contains_key(c)) {
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for (&p, r) in &reduced {
                if let Some((_, val)) = r.0.iter().find(|(c, _)| *c == free) {
                    v[p] = -val.clone();
                }
            }
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, piv) = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, m(&[&[1, 0, 1], &[0, 1, 1], &[0, 0, 0]]));
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn inverse_and_singular() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), ExactMatrix::identity(2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular { rank: 1, size: 2 }));
    }

    #[test]
    fn reducer_pivots_match_rref() {
        let a = m(&[&[0, 1, 1, 0], &[0, 2, 2, 1], &[0, 0, 0, 3]]);
        let mut red = RowReducer::new(4);
        for i in 0..3 {
            red.insert(SparseRow::from_dense(a.row(i)));
        }
        assert_eq!(red.pivots(), a.rref().1);
        let ns = red.nullspace();
        assert_eq!(ns, a.nullspace());
    }
}
