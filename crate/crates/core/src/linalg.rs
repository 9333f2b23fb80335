//! Small exact linear algebra over the integers and rationals.
//!
//! Everything in this crate works in fixed bases with integer matrices, so a
//! handful of dense `i64` / `Ratio<i64>` routines is all that is needed:
//! products, determinants, rational inverses, and a Smith normal form with
//! unimodular transforms. Dimensions stay in single digits and entries stay
//! small (Cartan-matrix scale), so `i64` never gets close to overflow.

use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Rat = Ratio<i64>;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from a slice of rows, which must be non-empty and
    /// rectangular.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        assert!(r > 0, "matrix needs at least one row");
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        IntMat { rows: r, cols: c, data }
    }

    /// Builds a square matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<i64>]) -> Self {
        let c = cols.len();
        assert!(c > 0, "matrix needs at least one column");
        let r = cols[0].len();
        let mut m = IntMat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for i in 0..r {
                m.set(i, j, col[i]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == IntMat::identity(self.rows)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut m: Vec<i64> = self.data.clone();
        let at = |m: &Vec<i64>, i: usize, j: usize| m[i * n + j];
        let mut sign = 1i64;
        let mut prev = 1i64;
        for k in 0..n - 1 {
            if at(&m, k, k) == 0 {
                let Some(p) = (k + 1..n).find(|&i| at(&m, i, k) != 0) else {
                    return 0;
                };
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = at(&m, k, k) * at(&m, i, j) - at(&m, i, k) * at(&m, k, j);
                    m[i * n + j] = x / prev;
                }
                m[i * n + k] = 0;
            }
            prev = at(&m, k, k);
        }
        sign * at(&m, n - 1, n - 1)
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Rat::from_integer(x)).collect(),
        }
    }

    /// Exact inverse as a rational matrix; `None` when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        self.to_rat().inverse()
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Rat {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matvec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect()
    }

    pub fn matvec_int(&self, v: &[i64]) -> Vec<Rat> {
        let rv: Vec<Rat> = v.iter().map(|&x| Rat::from_integer(x)).collect();
        self.matvec(&rv)
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMat::zeros(n, n);
        for i in 0..n {
            inv.set(i, i, Rat::one());
        }
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a.get(i, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let p = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col);
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let x = a.get(i, j) - f * a.get(col, j);
                    a.set(i, j, x);
                    let x = inv.get(i, j) - f * inv.get(col, j);
                    inv.set(i, j, x);
                }
            }
        }
        Some(inv)
    }

    /// Converts to an integer matrix if every entry is integral.
    pub fn to_int(&self) -> Option<IntMat> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            if !x.denom().is_one() {
                return None;
            }
            data.push(*x.numer());
        }
        Some(IntMat { rows: self.rows, cols: self.cols, data })
    }
}

/// Converts a rational vector to integers if possible.
pub fn rat_vec_to_int(v: &[Rat]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| x.denom().is_one().then(|| *x.numer()))
        .collect()
}

pub fn int_vec_to_rat(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(x)).collect()
}

/// Smith normal form `u * a * v = diag(d)` with `u`, `v` unimodular,
/// `d` non-negative and each entry dividing the next.
pub struct Snf {
    pub u: IntMat,
    pub v: IntMat,
    pub d: Vec<i64>,
}

pub fn smith_normal_form(a: &IntMat) -> Snf {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);

    // Row operation helpers keep `u * a_original * v = m` invariant.
    fn row_add(m: &mut IntMat, u: &mut IntMat, dst: usize, src: usize, f: i64) {
        for j in 0..m.cols() {
            let x = m.get(dst, j) + f * m.get(src, j);
            m.set(dst, j, x);
        }
        for j in 0..u.cols() {
            let x = u.get(dst, j) + f * u.get(src, j);
            u.set(dst, j, x);
        }
    }
    fn row_swap(m: &mut IntMat, u: &mut IntMat, a: usize, b: usize) {
        for j in 0..m.cols() {
            let (x, y) = (m.get(a, j), m.get(b, j));
            m.set(a, j, y);
            m.set(b, j, x);
        }
        for j in 0..u.cols() {
            let (x, y) = (u.get(a, j), u.get(b, j));
            u.set(a, j, y);
            u.set(b, j, x);
        }
    }
    fn row_neg(m: &mut IntMat, u: &mut IntMat, r: usize) {
        for j in 0..m.cols() {
            m.set(r, j, -m.get(r, j));
        }
        for j in 0..u.cols() {
            u.set(r, j, -u.get(r, j));
        }
    }
    fn col_add(m: &mut IntMat, v: &mut IntMat, dst: usize, src: usize, f: i64) {
        for i in 0..m.rows() {
            let x = m.get(i, dst) + f * m.get(i, src);
            m.set(i, dst, x);
        }
        for i in 0..v.rows() {
            let x = v.get(i, dst) + f * v.get(i, src);
            v.set(i, dst, x);
        }
    }
    fn col_swap(m: &mut IntMat, v: &mut IntMat, a: usize, b: usize) {
        for i in 0..m.rows() {
            let (x, y) = (m.get(i, a), m.get(i, b));
            m.set(i, a, y);
            m.set(i, b, x);
        }
        for i in 0..v.rows() {
            let (x, y) = (v.get(i, a), v.get(i, b));
            v.set(i, a, y);
            v.set(i, b, x);
        }
    }

    let n = rows.min(cols);
    for t in 0..n {
        // Find a non-zero pivot in the untouched block.
        let mut pivot = None;
        'search: for i in t..rows {
            for j in t..cols {
                if m.get(i, j) != 0 {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            row_swap(&mut m, &mut u, pi, t);
        }
        if pj != t {
            col_swap(&mut m, &mut v, pj, t);
        }

        // Euclidean reduction until the pivot divides its row and column.
        loop {
            let mut progressed = false;
            for i in t + 1..rows {
                let x = m.get(i, t);
                if x != 0 {
                    let q = x.div_euclid(m.get(t, t));
                    row_add(&mut m, &mut u, i, t, -q);
                    if m.get(i, t) != 0 {
                        row_swap(&mut m, &mut u, i, t);
                        progressed = true;
                    }
                }
            }
            for j in t + 1..cols {
                let x = m.get(t, j);
                if x != 0 {
                    let q = x.div_euclid(m.get(t, t));
                    col_add(&mut m, &mut v, j, t, -q);
                    if m.get(t, j) != 0 {
                        col_swap(&mut m, &mut v, j, t);
                        progressed = true;
                    }
                }
            }
            if !progressed {
                break;
            }
        }

        // Make the pivot divide every remaining entry.
        let mut clean = false;
        while !clean {
            clean = true;
            'fix: for i in t + 1..rows {
                for j in t + 1..cols {
                    if m.get(i, j) % m.get(t, t) != 0 {
                        row_add(&mut m, &mut u, t, i, 1);
                        clean = false;
                        // Re-run the Euclidean reduction for this pivot.
                        loop {
                            let mut progressed = false;
                            for jj in t + 1..cols {
                                let x = m.get(t, jj);
                                if x != 0 {
                                    let q = x.div_euclid(m.get(t, t));
                                    col_add(&mut m, &mut v, jj, t, -q);
                                    if m.get(t, jj) != 0 {
                                        col_swap(&mut m, &mut v, jj, t);
                                        progressed = true;
                                    }
                                }
                            }
                            for ii in t + 1..rows {
                                let x = m.get(ii, t);
                                if x != 0 {
                                    let q = x.div_euclid(m.get(t, t));
                                    row_add(&mut m, &mut u, ii, t, -q);
                                    if m.get(ii, t) != 0 {
                                        row_swap(&mut m, &mut u, ii, t);
                                        progressed = true;
                                    }
                                }
                            }
                            if !progressed {
                                break;
                            }
                        }
                        break 'fix;
                    }
                }
            }
        }
        if m.get(t, t) < 0 {
            row_neg(&mut m, &mut u, t);
        }
    }

    let d = (0..n).map(|i| m.get(i, i)).collect();
    Snf { u, v, d }
}
