//! Small named presentations used throughout the examples and tests.

use super::{PcPresentation, Relation};

fn gens(names: &[&str]) -> Vec<(String, Option<u64>)> {
    names.iter().map(|n| (n.to_string(), None)).collect()
}

/// `Z^n` on generators `a1, ..., an`.
pub fn free_abelian(n: usize) -> PcPresentation {
    PcPresentation::abelian(&format!("z{n}"), n, &[]).expect("free abelian")
}

/// `<x, y, z | [x,y] = z, z central>`.
pub fn heisenberg() -> PcPresentation {
    PcPresentation::from_relations("heisenberg", gens(&["x", "y", "z"]), &[Relation::conj(1, 0, vec![(1, 1), (2, -1)])])
        .expect("heisenberg")
}

/// `<x, y, z | [x,y] = z^k, z central>`.
pub fn heisenberg_k(k: i64) -> PcPresentation {
    PcPresentation::from_relations(
        &format!("h{k}"),
        gens(&["x", "y", "z"]),
        &[Relation::conj(1, 0, vec![(1, 1), (2, -k)])],
    )
    .expect("heisenberg variant")
}

/// Free nilpotent group of class 2 on `r` generators `x1..xr`, with
/// commutators `c_ij = [x_i, x_j]` for `i < j`.
pub fn free_nilpotent_class2(r: usize) -> PcPresentation {
    let mut names: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
    let mut pos = std::collections::HashMap::new();
    for i in 0..r {
        for j in i + 1..r {
            pos.insert((i, j), names.len());
            names.push(format!("c{}{}", i + 1, j + 1));
        }
    }
    let g: Vec<(String, Option<u64>)> = names.iter().map(|n| (n.clone(), None)).collect();
    // x_j ^ x_i = x_i^-1 x_j x_i = x_j [x_j, x_i] = x_j c_ij^-1
    let rels: Vec<Relation> = pos.iter().map(|(&(i, j), &c)| Relation::conj(j, i, vec![(j, 1), (c, -1)])).collect();
    PcPresentation::from_relations(&format!("f2_{r}"), g, &rels).expect("free nilpotent class 2")
}
