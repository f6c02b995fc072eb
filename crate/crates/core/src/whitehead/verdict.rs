use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuples `(S_1, ..., S_k)` of group elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TupleSystem<E> {
    pub tuples: Vec<Vec<E>>,
}

impl<E> TupleSystem<E> {
    pub fn new(tuples: Vec<Vec<E>>) -> Self {
        TupleSystem { tuples }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.tuples.iter().map(Vec::len).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = &E> {
        self.tuples.iter().flatten()
    }

    pub fn check_shape(&self, other: &TupleSystem<E>) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!("tuple shapes {:?} and {:?} differ", self.shape(), other.shape())));
        }
        Ok(())
    }
}

/// An automorphism `σ` and conjugators `g_i` with `σ(S_i) = g_i^-1 T_i g_i`.
///
/// Automorphism images are exponent vectors for pc groups, canonical coordinates
/// for abelian groups, and `[index]` for the generating set of a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub automorphism: Vec<Vec<i64>>,
    pub conjugators: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Refutation {
    /// An automorphism invariant separates the two systems.
    Invariant { reason: String },
    /// Every automorphism of a finite group (or finite torsion part) was tried.
    Exhaustive { automorphisms: usize },
    /// The images in a characteristic finite quotient are not equivalent.
    Quotient {
        power: i64,
        order: u64,
        presentation: String,
        source: Vec<Vec<Vec<i64>>>,
        target: Vec<Vec<Vec<i64>>>,
        automorphisms: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub radius: i64,
    pub candidates: usize,
    /// `(power, quotient order)` for every quotient that was solved without a refutation.
    pub quotients: Vec<(i64, u64)>,
    pub skipped_powers: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Equivalent { witness: Witness },
    NotEquivalent { refutation: Refutation },
    Unknown { report: BudgetReport },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, Verdict::NotEquivalent { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Equivalent { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn refutation(&self) -> Option<&Refutation> {
        match self {
            Verdict::NotEquivalent { refutation } => Some(refutation),
            _ => None,
        }
    }

    pub(crate) fn invariant(reason: impl Into<String>) -> Verdict {
        Verdict::NotEquivalent { refutation: Refutation::Invariant { reason: reason.into() } }
    }
}
