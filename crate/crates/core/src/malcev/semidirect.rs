use serde::{Deserialize, Serialize};

use super::qmatrix::QMatrix;
use crate::error::{Error, Result};

/// An element `(k; h_1, ..., h_r)` of `K ⋉ H^r`, realized as `diag(k, k h_1, ..., k h_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidirectElement {
    pub k: QMatrix,
    pub hs: Vec<QMatrix>,
}

/// A point of `H^{n_1} ⊕ ... ⊕ H^{n_r}` acted on by `K ⋉ H^r`.
pub type Point = Vec<Vec<QMatrix>>;

impl SemidirectElement {
    pub fn new(k: QMatrix, hs: Vec<QMatrix>) -> Result<Self> {
        let n = k.rows();
        if !k.is_square() || hs.iter().any(|h| h.rows() != n || h.cols() != n) {
            return Err(Error::Dimension("all blocks must be square of the same size".into()));
        }
        if k.inverse().is_none() {
            return Err(Error::Input("k is not invertible".into()));
        }
        Ok(SemidirectElement { k, hs })
    }

    pub fn identity(n: usize, r: usize) -> Self {
        SemidirectElement { k: QMatrix::identity(n), hs: vec![QMatrix::identity(n); r] }
    }

    pub fn block_size(&self) -> usize {
        self.k.rows()
    }

    pub fn arity(&self) -> usize {
        self.hs.len()
    }

    pub fn materialize(&self) -> QMatrix {
        let mut blocks = vec![self.k.clone()];
        blocks.extend(self.hs.iter().map(|h| &self.k * h));
        QMatrix::block_diagonal(&blocks)
    }

    /// Reads `(k; h)` back from a block-diagonal matrix `diag(k, k h_1, ...)`.
    pub fn from_block_matrix(m: &QMatrix, n: usize) -> Result<Self> {
        if !m.is_square() || n == 0 || m.rows() % n != 0 {
            return Err(Error::Dimension(format!("{}x{} is not made of {n}x{n} blocks", m.rows(), m.cols())));
        }
        let r = m.rows() / n - 1;
        let k = m.block(0, n);
        let kinv = k.inverse().ok_or_else(|| Error::Input("k block is singular".into()))?;
        let hs: Vec<QMatrix> = (1..=r).map(|i| &kinv * &m.block(i * n, n)).collect();
        let e = SemidirectElement { k, hs };
        if e.materialize() != *m {
            return Err(Error::Input("matrix is not block diagonal".into()));
        }
        Ok(e)
    }

    /// `(k1 k2; k2^-1 h1 k2 h2)`.
    pub fn multiply(&self, other: &SemidirectElement) -> Result<SemidirectElement> {
        if self.block_size() != other.block_size() || self.arity() != other.arity() {
            return Err(Error::Dimension("semidirect factors have different shapes".into()));
        }
        let k2inv = other.k.inverse().expect("k is invertible");
        let hs = self
            .hs
            .iter()
            .zip(&other.hs)
            .map(|(h1, h2)| &(&(&k2inv * h1) * &other.k) * h2)
            .collect();
        Ok(SemidirectElement { k: &self.k * &other.k, hs })
    }

    pub fn inverse(&self) -> SemidirectElement {
        let kinv = self.k.inverse().expect("k is invertible");
        let hs = self
            .hs
            .iter()
            .map(|h| {
                let hinv = h.inverse().expect("h is invertible");
                &(&self.k * &hinv) * &kinv
            })
            .collect();
        SemidirectElement { k: kinv, hs }
    }

    /// Right action: every entry `x` of tuple `i` goes to `(k h_i)^-1 x (k h_i)`.
    pub fn act(&self, point: &Point) -> Result<Point> {
        if point.len() != self.arity() {
            return Err(Error::Dimension(format!("point has {} tuples, element has {} blocks", point.len(), self.arity())));
        }
        let n = self.block_size();
        let mut out = Vec::with_capacity(point.len());
        for (tuple, h) in point.iter().zip(&self.hs) {
            let g = &self.k * h;
            let ginv = g.inverse().ok_or_else(|| Error::Input("block is singular".into()))?;
            let mut t = Vec::with_capacity(tuple.len());
            for x in tuple {
                if x.rows() != n || x.cols() != n {
                    return Err(Error::Dimension("point entry has the wrong size".into()));
                }
                t.push(&(&ginv * x) * &g);
            }
            out.push(t);
        }
        Ok(out)
    }
}

pub fn semidirect_encode(k: QMatrix, hs: Vec<QMatrix>) -> Result<SemidirectElement> {
    SemidirectElement::new(k, hs)
}

pub fn semidirect_multiply(a: &SemidirectElement, b: &SemidirectElement) -> Result<SemidirectElement> {
    a.multiply(b)
}

pub fn semidirect_act(point: &Point, g: &SemidirectElement) -> Result<Point> {
    g.act(point)
}
