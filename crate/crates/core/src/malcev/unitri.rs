use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::qmatrix::{q, QMatrix};
use crate::error::{Error, Result};

/// Upper unitriangular rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QMatrix", into = "QMatrix")]
pub struct UniTriangular(QMatrix);

/// Strictly upper triangular rational matrix, an element of the Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QMatrix", into = "QMatrix")]
pub struct StrictUpper(QMatrix);

fn check_shape(m: &QMatrix, diag: &BigRational) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    for i in 0..m.rows() {
        if m[(i, i)] != *diag {
            return Err(Error::Input(format!("diagonal entry ({i},{i}) is {}", m[(i, i)])));
        }
        for j in 0..i {
            if !m[(i, j)].is_zero() {
                return Err(Error::Input(format!("entry ({i},{j}) below the diagonal is nonzero")));
            }
        }
    }
    Ok(())
}

impl TryFrom<QMatrix> for UniTriangular {
    type Error = Error;
    fn try_from(m: QMatrix) -> Result<Self> {
        check_shape(&m, &BigRational::one())?;
        Ok(UniTriangular(m))
    }
}

impl From<UniTriangular> for QMatrix {
    fn from(u: UniTriangular) -> QMatrix {
        u.0
    }
}

impl TryFrom<QMatrix> for StrictUpper {
    type Error = Error;
    fn try_from(m: QMatrix) -> Result<Self> {
        check_shape(&m, &BigRational::zero())?;
        Ok(StrictUpper(m))
    }
}

impl From<StrictUpper> for QMatrix {
    fn from(u: StrictUpper) -> QMatrix {
        u.0
    }
}

impl UniTriangular {
    pub fn new(m: QMatrix) -> Result<Self> {
        m.try_into()
    }

    pub fn identity(n: usize) -> Self {
        UniTriangular(QMatrix::identity(n))
    }

    /// `I + a E_{ij}` (0-based indices, `i < j`).
    pub fn elementary(n: usize, i: usize, j: usize, a: BigRational) -> Self {
        assert!(i < j && j < n, "elementary matrix must be strictly upper");
        let mut m = QMatrix::identity(n);
        m[(i, j)] = a;
        UniTriangular(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn mul(&self, other: &UniTriangular) -> UniTriangular {
        UniTriangular(&self.0 * &other.0)
    }

    /// Exact inverse via the finite series `sum (-N)^k`.
    pub fn inverse(&self) -> UniTriangular {
        let n = self.dim();
        let nil = &self.0 - &QMatrix::identity(n);
        let neg = nil.scale(&q(-1));
        let mut acc = QMatrix::identity(n);
        let mut term = QMatrix::identity(n);
        for _ in 1..n {
            term = &term * &neg;
            acc = &acc + &term;
        }
        UniTriangular(acc)
    }

    pub fn pow(&self, e: i64) -> UniTriangular {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = UniTriangular::identity(self.dim());
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        acc
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, other: &UniTriangular) -> UniTriangular {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    pub fn is_integral(&self) -> bool {
        self.0.is_integral()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }
}

impl StrictUpper {
    pub fn new(m: QMatrix) -> Result<Self> {
        m.try_into()
    }

    pub fn zero(n: usize) -> Self {
        StrictUpper(QMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn add(&self, other: &StrictUpper) -> StrictUpper {
        StrictUpper(&self.0 + &other.0)
    }

    pub fn scale(&self, k: &BigRational) -> StrictUpper {
        StrictUpper(self.0.scale(k))
    }

    /// `uv - vu`.
    pub fn bracket(&self, other: &StrictUpper) -> StrictUpper {
        StrictUpper(&(&self.0 * &other.0) - &(&other.0 * &self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// `sum_{k<n} m^k / k!`.
pub fn expm(m: &StrictUpper) -> UniTriangular {
    let n = m.dim();
    let mut acc = QMatrix::identity(n);
    let mut term = QMatrix::identity(n);
    for k in 1..n.max(1) {
        term = (&term * &m.0).scale(&BigRational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    UniTriangular(acc)
}

/// `sum_{k=1}^{n-1} (-1)^{k+1} (u - I)^k / k`.
pub fn logm(u: &UniTriangular) -> StrictUpper {
    let n = u.dim();
    let x = &u.0 - &QMatrix::identity(n);
    let mut acc = QMatrix::zeros(n, n);
    let mut power = QMatrix::identity(n);
    for k in 1..n.max(1) {
        power = &power * &x;
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = &acc + &power.scale(&BigRational::new(sign.into(), (k as i64).into()));
    }
    StrictUpper(acc)
}
