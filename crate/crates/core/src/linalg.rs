//! Small exact linear algebra over `Ratio<i64>`.
//!
//! Everything here works on dense row-major data; the dimensions involved
//! (at most a few dozen) make anything fancier pointless.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reduced row echelon form in place. Returns the pivot columns.
fn rref(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col];
                let (src, dst) = if r < row {
                    let (a, b) = m.split_at_mut(row);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = m.split_at_mut(r);
                    (&a[row], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= f * *s;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Rank of a family of integer vectors.
pub fn rank(vectors: &[Vec<i64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let mut m: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect();
    rref(&mut m, cols).len()
}

/// Coefficients of `v` in the (linearly independent) family `base`.
pub fn solve_in_span(base: &[Vec<i64>], v: &[i64]) -> Result<Vec<Rational>> {
    let r = base.len();
    let n = v.len();
    if base.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: base.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
        });
    }
    // Rows are coordinates, columns are base vectors, last column is `v`.
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = base.iter().map(|b| Rational::from_integer(b[i])).collect();
            row.push(Rational::from_integer(v[i]));
            row
        })
        .collect();
    let pivots = rref(&mut m, r + 1);
    if pivots.contains(&r) {
        return Err(Error::NotInSpan);
    }
    if pivots.len() != r {
        return Err(Error::NotABase("vectors are linearly dependent".into()));
    }
    let mut coeffs = vec![Rational::zero(); r];
    for (row, &col) in pivots.iter().enumerate() {
        coeffs[col] = m[row][r];
    }
    Ok(coeffs)
}

/// Dual family of an independent family `b_1..b_r`: vectors `d_1..d_r` in
/// the span with `<d_i, b_j> = δ_ij`. Reading coefficients is then a dot
/// product per base vector.
#[derive(Debug, Clone)]
pub struct DualBasis {
    base: Vec<Vec<i64>>,
    dual: Vec<Vec<Rational>>,
}

impl DualBasis {
    pub fn new(base: Vec<Vec<i64>>) -> Result<Self> {
        let r = base.len();
        // Gram matrix augmented with the identity, inverted by elimination.
        let mut m: Vec<Vec<Rational>> = (0..r)
            .map(|i| {
                let mut row: Vec<Rational> = (0..r)
                    .map(|j| Rational::from_integer(dot(&base[i], &base[j])))
                    .collect();
                row.extend((0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let pivots = rref(&mut m, r);
        if pivots.len() != r {
            return Err(Error::NotABase("vectors are linearly dependent".into()));
        }
        let n = base.first().map_or(0, Vec::len);
        let dual = (0..r)
            .map(|i| {
                let mut d = vec![Rational::zero(); n];
                for (j, b) in base.iter().enumerate() {
                    let g = m[i][r + j];
                    if g.is_zero() {
                        continue;
                    }
                    for (x, &y) in d.iter_mut().zip(b) {
                        *x += g * Rational::from_integer(y);
                    }
                }
                d
            })
            .collect();
        Ok(DualBasis { base, dual })
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn dual_vector(&self, i: usize) -> &[Rational] {
        &self.dual[i]
    }

    /// Coefficients of `v`, or `NotInSpan` if the reconstruction disagrees.
    pub fn coefficients(&self, v: &[i64]) -> Result<Vec<Rational>> {
        let coeffs: Vec<Rational> = self
            .dual
            .iter()
            .map(|d| {
                d.iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (x, &y)| acc + *x * Rational::from_integer(y))
            })
            .collect();
        let n = v.len();
        for i in 0..n {
            let s = self
                .base
                .iter()
                .zip(&coeffs)
                .fold(Rational::zero(), |acc, (b, c)| acc + *c * Rational::from_integer(b[i]));
            if s != Rational::from_integer(v[i]) {
                return Err(Error::NotInSpan);
            }
        }
        Ok(coeffs)
    }

    /// Integer coefficients; `None` if some coefficient is fractional.
    pub fn integer_coefficients(&self, v: &[i64]) -> Result<Option<Vec<i64>>> {
        let c = self.coefficients(v)?;
        Ok(c.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect())
    }
}

/// Scale a rational vector to the primitive integer vector with the same
/// direction and sign.
pub fn clear_denominators(v: &[Rational]) -> Vec<i64> {
    let lcm = v.iter().fold(1i64, |acc, x| num_integer_lcm(acc, *x.denom()));
    let ints: Vec<i64> = v.iter().map(|x| (x * lcm).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, &x| gcd(acc, x.abs()));
    if g > 1 {
        ints.iter().map(|x| x / g).collect()
    } else {
        ints
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    let b = b.abs();
    a / gcd(a, b) * b
}

/// True if every entry is nonnegative, or every entry is nonpositive.
pub fn is_sign_coherent(c: &[Rational]) -> bool {
    c.iter().all(|x| !x.is_negative()) || c.iter().all(|x| !x.is_positive())
}
