//! Distance matrices, quasimetrics and quasiultrametrics.
//!
//! Distances are `f64` values in `[0, +inf]`. Unreachable pairs carry IEEE
//! `+inf`, which absorbs addition and compares above every finite value; NaN
//! and negative entries are rejected when a matrix is built, so the remaining
//! values are totally ordered.

use std::fmt;

/// Relative slack allowed when checking triangle inequalities on values that
/// went through floating-point sums.
pub const TRIANGLE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) is {value}, distances must be non-negative and not NaN")]
    BadEntry { row: usize, col: usize, value: f64 },
    #[error("empty matrix")]
    Empty,
}

/// The first violated condition found by [`validate_quasimetric`] or
/// [`validate_quasiultrametric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// `d(x, x) != 0`.
    Diagonal { x: usize },
    /// `d(x, y)` exceeds the bound obtained through `z`.
    Triangle { x: usize, y: usize, z: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Diagonal { x } => write!(f, "non-zero diagonal entry at {x}"),
            Violation::Triangle { x, y, z } => {
                write!(f, "d({x},{y}) violates the triangle bound through {z}")
            }
        }
    }
}

impl std::error::Error for Violation {}

/// Square matrix of extended non-negative reals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// All-zero `n × n` matrix.
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// `n × n` matrix with zero diagonal and `+inf` elsewhere.
    pub fn unreachable(n: usize) -> Self {
        let mut m = Self { n, data: vec![f64::INFINITY; n * n] };
        for x in 0..n {
            m.data[x * n + x] = 0.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, values) in rows.iter().enumerate() {
            if values.len() != n {
                return Err(MatrixError::NotSquare { row, len: values.len(), expected: n });
            }
            for (col, &value) in values.iter().enumerate() {
                if value.is_nan() || value < 0.0 {
                    return Err(MatrixError::BadEntry { row, col, value });
                }
                data.push(value);
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, MatrixError> {
        let rows: Vec<Vec<f64>> = (0..n).map(|u| (0..n).map(|v| f(u, v)).collect()).collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    /// Panics on NaN or negative values; callers produce distances from
    /// validated inputs.
    #[inline]
    pub(crate) fn set(&mut self, u: usize, v: usize, value: f64) {
        debug_assert!(value >= 0.0, "distance must be non-negative, got {value}");
        self.data[u * self.n + v] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Ordered pairs `(u, v)` with `u != v`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
    }

    /// Smallest strictly positive finite entry.
    pub fn min_positive(&self) -> Option<f64> {
        self.data.iter().copied().filter(|d| *d > 0.0 && d.is_finite()).min_by(f64::total_cmp)
    }

    /// Largest finite entry.
    pub fn max_finite(&self) -> Option<f64> {
        self.data.iter().copied().filter(|d| d.is_finite()).max_by(f64::total_cmp)
    }

    /// Divides every entry by `divisor` (`+inf` stays `+inf`).
    pub fn divided_by(&self, divisor: f64) -> Self {
        assert!(divisor > 0.0 && divisor.is_finite());
        Self { n: self.n, data: self.data.iter().map(|d| d / divisor).collect() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor >= 0.0 && factor.is_finite());
        Self { n: self.n, data: self.data.iter().map(|d| d * factor).collect() }
    }
}

fn exceeds(lhs: f64, bound: f64) -> bool {
    lhs > bound + TRIANGLE_RTOL * bound.max(1.0)
}

/// Checks `d(x,x) = 0` and `d(x,y) <= d(x,z) + d(z,y)` for every triple.
///
/// Distinct points at distance zero are accepted. Triples are scanned with `x`
/// outermost, then `y`, then `z`.
pub fn validate_quasimetric(m: &DistanceMatrix) -> Result<(), Violation> {
    validate_with(m, |a, b| a + b)
}

/// Like [`validate_quasimetric`] with `max` in place of the sum.
pub fn validate_quasiultrametric(m: &DistanceMatrix) -> Result<(), Violation> {
    validate_with(m, f64::max)
}

fn validate_with(m: &DistanceMatrix, combine: impl Fn(f64, f64) -> f64) -> Result<(), Violation> {
    let n = m.size();
    if let Some(x) = (0..n).find(|&x| m.get(x, x) != 0.0) {
        return Err(Violation::Diagonal { x });
    }
    for x in 0..n {
        for y in 0..n {
            let direct = m.get(x, y);
            if direct == 0.0 {
                continue;
            }
            for z in 0..n {
                if exceeds(direct, combine(m.get(x, z), m.get(z, y))) {
                    return Err(Violation::Triangle { x, y, z });
                }
            }
        }
    }
    Ok(())
}

/// A distance matrix known to satisfy the directed triangle inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Quasimetric(DistanceMatrix);

impl Quasimetric {
    pub fn new(m: DistanceMatrix) -> Result<Self, Violation> {
        validate_quasimetric(&m)?;
        Ok(Self(m))
    }

    /// Skips validation; for matrices produced by shortest-path computations.
    pub(crate) fn from_trusted(m: DistanceMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DistanceMatrix {
        self.0
    }
}

impl std::ops::Deref for Quasimetric {
    type Target = DistanceMatrix;

    fn deref(&self) -> &DistanceMatrix {
        &self.0
    }
}

/// A distance matrix satisfying `d(x,y) <= max(d(x,z), d(z,y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiUltrametric(DistanceMatrix);

impl QuasiUltrametric {
    pub fn new(m: DistanceMatrix) -> Result<Self, Violation> {
        validate_quasiultrametric(&m)?;
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DistanceMatrix {
        self.0
    }

    pub fn as_quasimetric(&self) -> Quasimetric {
        Quasimetric(self.0.clone())
    }
}

impl std::ops::Deref for QuasiUltrametric {
    type Target = DistanceMatrix;

    fn deref(&self) -> &DistanceMatrix {
        &self.0
    }
}

/// Exact `floor(log2(x))` for positive finite `x`, read off the binary
/// exponent so powers of two never round the wrong way.
pub fn floor_log2(x: f64) -> i32 {
    assert!(x > 0.0 && x.is_finite(), "floor_log2 needs a positive finite value, got {x}");
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i32;
    if exponent == 0 {
        // subnormal
        let mantissa = bits & ((1u64 << 52) - 1);
        -1074 + (63 - mantissa.leading_zeros() as i32)
    } else {
        exponent - 1023
    }
}
