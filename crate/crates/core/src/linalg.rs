//! Exact integer linear algebra: fraction-free elimination, rank, nullspace.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    /// Builds a matrix from equal-length rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged matrix rows");
            data.extend(row);
        }
        IntMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Result of fraction-free row reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Number of linearly independent rows.
    pub rank: usize,
    /// Columns in which pivots were found, ascending.
    pub pivot_cols: Vec<usize>,
    /// Primitive integer basis of the right nullspace, one vector per free
    /// column in ascending column order; first nonzero entry positive.
    pub nullspace: Vec<Vec<BigInt>>,
}

/// Row-reduces `mat` by fraction-free (Bareiss) elimination and extracts the
/// rank, pivot columns, and a canonical integer basis of the right nullspace.
/// Entirely exact; deterministic pivot choice (first nonzero in column).
pub fn reduce(mat: &IntMatrix) -> Reduction {
    let mut m = mat.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.at(i, c).is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = m.at(i, j) * m.at(r, c) - m.at(i, c) * m.at(r, j);
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free elimination divided inexactly");
                *m.at_mut(i, j) = q;
            }
            *m.at_mut(i, c) = BigInt::zero();
        }
        prev = m.at(r, c).clone();
        pivot_cols.push(c);
        r += 1;
    }
    let rank = pivot_cols.len();

    // Back-substitute one basis vector per free column, then clear
    // denominators to a primitive integer vector with positive leading entry.
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut nullspace = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let mut x = vec![BigRational::zero(); cols];
        x[f] = BigRational::one();
        for i in (0..rank).rev() {
            let p = pivot_cols[i];
            let mut acc = BigRational::zero();
            for j in p + 1..cols {
                if !x[j].is_zero() && !m.at(i, j).is_zero() {
                    acc += BigRational::from(m.at(i, j).clone()) * &x[j];
                }
            }
            x[p] = -acc / BigRational::from(m.at(i, p).clone());
        }
        nullspace.push(primitive_integer_vector(&x));
    }
    Reduction {
        rank,
        pivot_cols,
        nullspace,
    }
}

/// Scales a rational vector to a primitive integer vector (coprime entries)
/// whose first nonzero entry is positive.
fn primitive_integer_vector(x: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in x {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
        }
    }
    let mut ints: Vec<BigInt> = x
        .iter()
        .map(|v| {
            let scaled = v * BigRational::from(lcm.clone());
            debug_assert!(scaled.denom().is_one());
            scaled.numer().clone()
        })
        .collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = gcd.gcd(v);
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for v in &mut ints {
            *v = &*v / &gcd;
        }
    }
    if let Some(first) = ints.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            for v in &mut ints {
                *v = -v.clone();
            }
        }
    }
    ints
}

/// Multiplies `mat · v` exactly; used to verify nullspace vectors.
pub fn mat_vec(mat: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(mat.cols, v.len());
    (0..mat.rows)
        .map(|r| (0..mat.cols).map(|c| mat.at(r, c) * &v[c]).sum())
        .collect()
}
