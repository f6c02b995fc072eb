use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::verdict::{TupleSystem, Witness};
use crate::error::{Error, Result};
use crate::malcev::{embed_full_translation, embed_matrix_group, Embedding, Point, QMatrix, SemidirectElement, DEFAULT_CLASS_CAP};
use crate::nilgroup::{FiniteGroupTable, NilElement, PcPresentation};

/// Two points of `⊕ H^{n_i}` whose orbits under `K ⋉ H^k` encode a Whitehead instance.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitInstance {
    pub block_dim: usize,
    pub source: Point,
    pub target: Point,
}

/// An orbit instance built from a unitriangular embedding of a torsion-free group.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitEncoding {
    pub instance: OrbitInstance,
    pub embedding: Embedding,
}

fn point_of(emb: &Embedding, s: &TupleSystem<NilElement>) -> Point {
    s.tuples.iter().map(|t| t.iter().map(|x| emb.apply(x).matrix().clone()).collect()).collect()
}

pub fn orbit_encoding(p: &PcPresentation, s: &TupleSystem<NilElement>, t: &TupleSystem<NilElement>) -> Result<OrbitEncoding> {
    s.check_shape(t)?;
    let embedding = embed_matrix_group(p, DEFAULT_CLASS_CAP.max(p.nilpotency_class()))?;
    Ok(encode_with(embedding, s, t))
}

fn encode_with(embedding: Embedding, s: &TupleSystem<NilElement>, t: &TupleSystem<NilElement>) -> OrbitEncoding {
    let instance = OrbitInstance { block_dim: embedding.dim, source: point_of(&embedding, s), target: point_of(&embedding, t) };
    OrbitEncoding { instance, embedding }
}

/// Invertible `A` with `ρ(g) A = A ρ(σ(g))` for all generators, so that `A^-1 ρ(x) A = ρ(σ(x))`.
pub fn intertwiner(emb: &Embedding, sigma_images: &[NilElement]) -> Option<QMatrix> {
    let n = emb.dim;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (i, img) in sigma_images.iter().enumerate() {
        let lhs = emb.images[i].matrix();
        let rhs = emb.apply(img);
        let rhs = rhs.matrix();
        // entry (r, c) of lhs A - A rhs, as a linear form in the entries of A
        for r in 0..n {
            for c in 0..n {
                let mut row = vec![BigRational::zero(); n * n];
                for k in 0..n {
                    row[k * n + c] += &lhs[(r, k)];
                    row[r * n + k] -= &rhs[(k, c)];
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let basis = if rows.is_empty() {
        QMatrix::identity(n * n).to_rows()
    } else {
        QMatrix::from_rows(rows).ok()?.nullspace()
    };
    let as_matrix = |v: &[BigRational]| QMatrix::from_rows(v.chunks(n).map(<[BigRational]>::to_vec).collect()).ok();
    for v in &basis {
        let m = as_matrix(v)?;
        if m.inverse().is_some() {
            return Some(m);
        }
    }
    // deterministic combinations with small coefficients
    for seed in 1..=20i64 {
        let mut acc = vec![BigRational::zero(); n * n];
        for (j, v) in basis.iter().enumerate() {
            let c = BigRational::from_integer(((seed * (j as i64 + 1)) % 7 + 1).into());
            for (a, x) in acc.iter_mut().zip(v) {
                *a += &c * x;
            }
        }
        let m = as_matrix(&acc)?;
        if m.inverse().is_some() {
            return Some(m);
        }
    }
    None
}

impl OrbitEncoding {
    /// The semidirect element `(A_σ; ρ(g_1)^-1, ..., ρ(g_k)^-1)` moving the source point to the target point.
    pub fn encode_witness(&self, w: &Witness) -> Result<SemidirectElement> {
        let images: Vec<NilElement> = w.automorphism.iter().map(|v| NilElement::from_exponents(v.clone())).collect();
        let a = match intertwiner(&self.embedding, &images) {
            Some(a) => a,
            None => {
                return Err(Error::EmbeddingUnavailable("automorphism is not realized by conjugation on this embedding".into()))
            }
        };
        let hs = w
            .conjugators
            .iter()
            .map(|g| self.embedding.apply(&NilElement::from_exponents(g.clone())).inverse().matrix().clone())
            .collect();
        SemidirectElement::new(a, hs)
    }

    /// Whether `g` moves the source point exactly onto the target point.
    pub fn moves_source_to_target(&self, g: &SemidirectElement) -> Result<bool> {
        Ok(g.act(&self.instance.source)? == self.instance.target)
    }
}

/// Re-encodes on right translation of all bounded-degree polynomials, where every automorphism has an intertwiner.
pub fn orbit_encoding_translation(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
) -> Result<OrbitEncoding> {
    s.check_shape(t)?;
    Ok(encode_with(embed_full_translation(p)?, s, t))
}

/// Encodes a witness, moving to the full translation embedding when the default one has no intertwiner.
pub fn orbit_witness(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
    w: &Witness,
) -> Result<(OrbitEncoding, SemidirectElement)> {
    let enc = orbit_encoding(p, s, t)?;
    match enc.encode_witness(w) {
        Ok(g) => Ok((enc, g)),
        Err(Error::EmbeddingUnavailable(_)) => {
            let enc = orbit_encoding_translation(p, s, t)?;
            let g = enc.encode_witness(w)?;
            Ok((enc, g))
        }
        Err(e) => Err(e),
    }
}

/// Regular-representation encoding of a finite instance, with one block per automorphism.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteOrbitEncoding {
    pub instance: OrbitInstance,
    /// `P_σ` with `P_σ^-1 R(x) P_σ = R(σ(x))`, one per automorphism.
    pub automorphism_blocks: Vec<QMatrix>,
    pub regular: Vec<QMatrix>,
}

fn permutation_matrix(perm: &[usize]) -> QMatrix {
    let n = perm.len();
    let mut m = QMatrix::zeros(n, n);
    for (x, &y) in perm.iter().enumerate() {
        m[(y, x)] = BigRational::from_integer(1.into());
    }
    m
}

pub fn orbit_encoding_finite(
    f: &FiniteGroupTable,
    s: &TupleSystem<usize>,
    t: &TupleSystem<usize>,
    cap: usize,
) -> Result<FiniteOrbitEncoding> {
    s.check_shape(t)?;
    let n = f.order();
    let regular: Vec<QMatrix> = (0..n).map(|g| permutation_matrix(&(0..n).map(|x| f.mul(g, x)).collect::<Vec<_>>())).collect();
    let automorphism_blocks = f
        .automorphisms(cap)?
        .iter()
        .map(|perm| {
            let mut inv = vec![0; n];
            for (x, &y) in perm.iter().enumerate() {
                inv[y] = x;
            }
            permutation_matrix(&inv)
        })
        .collect();
    let point = |sys: &TupleSystem<usize>| -> Point {
        sys.tuples.iter().map(|tu| tu.iter().map(|&x| regular[x].clone()).collect()).collect()
    };
    let instance = OrbitInstance { block_dim: n, source: point(s), target: point(t) };
    Ok(FiniteOrbitEncoding { instance, automorphism_blocks, regular })
}

impl FiniteOrbitEncoding {
    /// Brute-force orbit membership over all `(P_σ; R(h_1), ..., R(h_k))`.
    pub fn orbit_contains_target(&self) -> bool {
        let src = &self.instance.source;
        let tgt = &self.instance.target;
        self.automorphism_blocks.iter().any(|k| {
            let kinv = k.inverse().expect("permutation matrix");
            src.iter().zip(tgt).all(|(st, tt)| {
                let moved: Vec<QMatrix> = st.iter().map(|x| &(&kinv * x) * k).collect();
                self.regular.iter().any(|h| {
                    let hinv = h.inverse().expect("permutation matrix");
                    moved.iter().zip(tt).all(|(x, y)| &(&hinv * x) * h == *y)
                })
            })
        })
    }
}
