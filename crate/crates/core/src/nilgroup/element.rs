use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent normal form `g1^e1 ... gn^en` of a group element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NilElement {
    exps: Vec<i64>,
}

impl NilElement {
    pub fn identity(n: usize) -> Self {
        NilElement { exps: vec![0; n] }
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut e = Self::identity(n);
        e.exps[i] = 1;
        e
    }

    pub fn generator_power(n: usize, i: usize, k: i64) -> Self {
        let mut e = Self::identity(n);
        e.exps[i] = k;
        e
    }

    /// Wraps raw exponents; callers are responsible for reducing finite coordinates.
    pub fn from_exponents(exps: Vec<i64>) -> Self {
        NilElement { exps }
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exps
    }

    pub fn into_exponents(self) -> Vec<i64> {
        self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Position and exponent of the first nonzero coordinate.
    pub fn leading(&self) -> Option<(usize, i64)> {
        self.exps.iter().position(|&e| e != 0).map(|p| (p, self.exps[p]))
    }

    pub fn depth(&self) -> usize {
        self.exps.iter().position(|&e| e != 0).unwrap_or(self.exps.len())
    }

    pub(crate) fn exps_mut(&mut self) -> &mut Vec<i64> {
        &mut self.exps
    }
}

impl std::ops::Index<usize> for NilElement {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.exps[i]
    }
}

impl fmt::Debug for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl From<Vec<i64>> for NilElement {
    fn from(exps: Vec<i64>) -> Self {
        NilElement { exps }
    }
}
