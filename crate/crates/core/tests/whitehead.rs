use nilcert::nilgroup::library::{free_abelian, heisenberg};
use nilcert::nilgroup::{FiniteGroupTable, NilElement, PcPresentation};
use nilcert::whitehead::*;
use nilcert::zmod::AbelianModule;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn el(v: &[i64]) -> NilElement {
    NilElement::from_exponents(v.to_vec())
}

fn sys(t: &[&[&[i64]]]) -> TupleSystem<Vec<i64>> {
    TupleSystem::new(t.iter().map(|tu| tu.iter().map(|v| v.to_vec()).collect()).collect())
}

fn nsys(t: &[&[&[i64]]]) -> TupleSystem<NilElement> {
    TupleSystem::new(t.iter().map(|tu| tu.iter().map(|v| el(v)).collect()).collect())
}

fn z(n: usize) -> AbelianModule {
    AbelianModule::free(n)
}

#[test]
fn abelian_examples() {
    let s = sys(&[&[&[1, 0], &[0, 1]]]);
    let t = sys(&[&[&[0, 1], &[1, 0]]]);
    let v = whitehead_abelian(&z(2), &s, &t).unwrap();
    assert_eq!(v.witness().unwrap().automorphism, vec![vec![0, 1], vec![1, 0]]);
    verify_abelian_witness(&z(2), &s, &t, v.witness().unwrap()).unwrap();

    assert!(whitehead_abelian(&z(1), &sys(&[&[&[2]]]), &sys(&[&[&[1]]])).unwrap().is_not_equivalent());
    let v = whitehead_abelian(&z(2), &sys(&[&[&[2, 0], &[0, 1]]]), &sys(&[&[&[1, 0], &[0, 2]]])).unwrap();
    assert!(v.is_not_equivalent());
    assert!(whitehead_abelian(&z(1), &sys(&[&[&[3]]]), &sys(&[&[&[-3]]])).unwrap().is_equivalent());
}

#[test]
fn abelian_with_torsion() {
    let g = AbelianModule::new(2, vec![BigInt::from(2)]).unwrap();
    // (1,0,0) -> (1,0,1) needs the shift Z^2 -> Z/2
    let s = sys(&[&[&[1, 0, 0]]]);
    let t = sys(&[&[&[1, 0, 1]]]);
    let v = whitehead_abelian(&g, &s, &t).unwrap();
    verify_abelian_witness(&g, &s, &t, v.witness().unwrap()).unwrap();
    // (2,0,0) has no preimage of (2,0,1): 2 * anything is zero in Z/2
    assert!(whitehead_abelian(&g, &sys(&[&[&[2, 0, 0]]]), &sys(&[&[&[2, 0, 1]]])).unwrap().is_not_equivalent());
    // torsion elements go to torsion elements
    assert!(whitehead_abelian(&g, &sys(&[&[&[0, 0, 1]]]), &sys(&[&[&[1, 0, 1]]])).unwrap().is_not_equivalent());
}

fn unimodular_box(r: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    if (a * d - b * c).abs() == 1 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Oracle: some `U` in the box and shift `φ: Z^2 -> Z/2` maps every source row to the target row.
fn oracle(mats: &[[i64; 4]], torsion: bool, s: &[Vec<i64>], t: &[Vec<i64>]) -> bool {
    let shifts: &[[i64; 2]] = if torsion { &[[0, 0], [0, 1], [1, 0], [1, 1]] } else { &[[0, 0]] };
    mats.iter().any(|m| {
        shifts.iter().any(|phi| {
            s.iter().zip(t).all(|(x, y)| {
                let a = x[0] * m[0] + x[1] * m[2];
                let b = x[0] * m[1] + x[1] * m[3];
                if (a, b) != (y[0], y[1]) {
                    return false;
                }
                !torsion || (x[0] * phi[0] + x[1] * phi[1] + x[2] - y[2]).rem_euclid(2) == 0
            })
        })
    })
}

pub fn random_abelian_instance(rng: &mut ChaCha8Rng, torsion: bool, mats: &[[i64; 4]]) -> (TupleSystem<Vec<i64>>, TupleSystem<Vec<i64>>) {
    let dim = if torsion { 3 } else { 2 };
    let shape: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=2)).collect();
    let vec = |rng: &mut ChaCha8Rng| -> Vec<i64> {
        (0..dim).map(|i| if i < 2 { rng.gen_range(-2..=2) } else { rng.gen_range(0..2) }).collect()
    };
    let s: Vec<Vec<Vec<i64>>> = shape.iter().map(|&n| (0..n).map(|_| vec(rng)).collect()).collect();
    let t = if rng.gen_bool(0.5) {
        shape.iter().map(|&n| (0..n).map(|_| vec(rng)).collect()).collect()
    } else {
        let m = mats[rng.gen_range(0..mats.len())];
        let phi = [rng.gen_range(0..2), rng.gen_range(0..2)];
        s.iter()
            .map(|tu| {
                tu.iter()
                    .map(|x| {
                        let mut y = vec![x[0] * m[0] + x[1] * m[2], x[0] * m[1] + x[1] * m[3]];
                        if torsion {
                            y.push((x[0] * phi[0] + x[1] * phi[1] + x[2]).rem_euclid(2));
                        }
                        y
                    })
                    .collect()
            })
            .collect()
    };
    (TupleSystem::new(s), TupleSystem::new(t))
}

#[test]
fn abelian_agrees_with_brute_force() {
    // entries of source and target are at most 2, so a box of radius 8 contains every needed U
    let mats = unimodular_box(8);
    let narrow = unimodular_box(3);
    let small = unimodular_box(1);
    let mut narrow_agree = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut equivalent = 0;
    for i in 0..500 {
        let torsion = i % 2 == 1;
        let g = if torsion { AbelianModule::new(2, vec![BigInt::from(2)]).unwrap() } else { z(2) };
        let (s, t) = random_abelian_instance(&mut rng, torsion, &small);
        let flat_s: Vec<Vec<i64>> = s.elements().cloned().collect();
        let flat_t: Vec<Vec<i64>> = t.elements().cloned().collect();
        let expected = oracle(&mats, torsion, &flat_s, &flat_t);
        let v = whitehead_abelian(&g, &s, &t).unwrap();
        if oracle(&narrow, torsion, &flat_s, &flat_t) == v.is_equivalent() {
            narrow_agree += 1;
        }
        assert_eq!(v.is_equivalent(), expected, "instance {i}: {s:?} -> {t:?}");
        if let Some(w) = v.witness() {
            verify_abelian_witness(&g, &s, &t, w).unwrap();
            equivalent += 1;
        }
    }
    assert!(equivalent > 100);
    assert!(narrow_agree >= 495, "radius-3 oracle agreed on {narrow_agree}/500");
}

fn cyclic_square(n: usize) -> FiniteGroupTable {
    let p = PcPresentation::abelian("c", 0, &[n as u64, n as u64]).unwrap();
    FiniteGroupTable::from_pc(&p, 1000).unwrap().table
}

#[test]
fn finite_examples() {
    let f = cyclic_square(3);
    let s = TupleSystem::new(vec![vec![1, 4]]);
    let v = whitehead_finite(&f, &s, &s).unwrap();
    verify_finite_witness(&f, &s, &s, v.witness().unwrap()).unwrap();

    let t3 = FiniteGroupTable::from_pc(&PcPresentation::abelian("c", 0, &[3, 3]).unwrap(), 100).unwrap();
    let x = t3.index_of(&el(&[1, 0]));
    let y = t3.index_of(&el(&[0, 1]));
    let v = whitehead_finite(&t3.table, &TupleSystem::new(vec![vec![x]]), &TupleSystem::new(vec![vec![y]])).unwrap();
    assert!(v.is_equivalent());

    let c4 = FiniteGroupTable::cyclic(4);
    let v = whitehead_finite(&c4, &TupleSystem::new(vec![vec![1]]), &TupleSystem::new(vec![vec![2]])).unwrap();
    assert!(v.is_not_equivalent());
}

#[test]
fn nilpotent_identity_and_psi_witness() {
    let h = heisenberg();
    let s = nsys(&[&[&[1, 0, 0]]]);
    let v = whitehead_nilpotent(&h, &s, &s, &WhiteheadBudget::default()).unwrap();
    assert_eq!(v.witness().unwrap().automorphism, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);

    let t = nsys(&[&[&[1, 0, 1]]]);
    let v = whitehead_nilpotent(&h, &s, &t, &WhiteheadBudget::default()).unwrap();
    let w = v.witness().unwrap();
    verify_nilpotent_witness(&h, &s, &t, w).unwrap();

    // several tuples force genuinely different conjugators
    let s = nsys(&[&[&[1, 0, 0], &[0, 1, 0]], &[&[0, 0, 1]]]);
    let t = nsys(&[&[&[1, 0, 1], &[0, 1, 0]], &[&[0, 0, 1]]]);
    let v = whitehead_nilpotent(&h, &s, &t, &WhiteheadBudget::default()).unwrap();
    verify_nilpotent_witness(&h, &s, &t, v.witness().unwrap()).unwrap();
}

#[test]
fn nilpotent_quotient_refutation() {
    let h = heisenberg();
    let s = nsys(&[&[&[0, 0, 1]]]);
    let t = nsys(&[&[&[0, 0, 2]]]);
    let v = whitehead_nilpotent(&h, &s, &t, &WhiteheadBudget::default()).unwrap();
    let r = v.refutation().expect("refuted");
    match r {
        Refutation::Quotient { power, order, .. } => {
            assert_eq!((*power, *order), (4, 32));
        }
        other => panic!("unexpected refutation {other:?}"),
    }
    verify_refutation(&h, &s, &t, r, 512).unwrap();
    // the order-27 quotient cannot tell z from z^2: swapping x and y inverts z there
    assert!(quotient_refutation(&h, &s, &t, 3, 512).unwrap().is_none());
}

#[test]
fn nilpotent_budget_monotone() {
    let h = heisenberg();
    let s = nsys(&[&[&[1, 0, 0]]]);
    let t = nsys(&[&[&[2, 1, 0]]]);
    let tiny = WhiteheadBudget { max_radius: 0, powers: vec![], ..WhiteheadBudget::default() };
    assert!(whitehead_nilpotent(&h, &s, &t, &tiny).unwrap().is_unknown());
    let v = whitehead_nilpotent(&h, &s, &t, &WhiteheadBudget::default()).unwrap();
    verify_nilpotent_witness(&h, &s, &t, v.witness().unwrap()).unwrap();
    // abelianization class (2,0) is not primitive, so x -> x^2 is refuted
    let t2 = nsys(&[&[&[2, 0, 0]]]);
    assert!(whitehead_nilpotent(&h, &s, &t2, &WhiteheadBudget::default()).unwrap().is_not_equivalent());
}

#[test]
fn orbit_encoding_heisenberg() {
    let h = heisenberg();
    let s = nsys(&[&[&[1, 0, 0]]]);
    let t = nsys(&[&[&[1, 0, 1]]]);
    let enc = orbit_encoding(&h, &s, &t).unwrap();
    assert_eq!(enc.instance.block_dim, 3);
    let trivial = orbit_encoding(&h, &s, &s).unwrap();
    assert_eq!(trivial.instance.source, trivial.instance.target);

    let v = whitehead_nilpotent(&h, &s, &t, &WhiteheadBudget::default()).unwrap();
    let g = enc.encode_witness(v.witness().unwrap()).unwrap();
    assert!(enc.moves_source_to_target(&g).unwrap());

    // psi-type automorphism x -> xz realized as a conjugation by a rational matrix
    let w = Witness { automorphism: vec![vec![1, 0, 1], vec![0, 1, 0], vec![0, 0, 1]], conjugators: vec![vec![0, 0, 0]] };
    let g = enc.encode_witness(&w).unwrap();
    assert!(enc.moves_source_to_target(&g).unwrap());

    // swapping x and y inverts z; realized on the translation embedding
    let s2 = nsys(&[&[&[1, 0, 0], &[0, 0, 1]]]);
    let t2 = nsys(&[&[&[0, 1, 0], &[0, 0, -1]]]);
    let enc2 = orbit_encoding_translation(&h, &s2, &t2).unwrap();
    let w = Witness { automorphism: vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -1]], conjugators: vec![vec![0, 0, 0]] };
    let g = enc2.encode_witness(&w).unwrap();
    assert!(enc2.moves_source_to_target(&g).unwrap());
}

#[test]
fn orbit_encoding_abelian_is_linear() {
    let z2 = free_abelian(2);
    let s = nsys(&[&[&[1, 0]], &[&[0, 1]]]);
    let t = nsys(&[&[&[1, 1]], &[&[0, 1]]]);
    let enc = orbit_encoding(&z2, &s, &t).unwrap();
    let v = whitehead_nilpotent(&z2, &s, &t, &WhiteheadBudget::default()).unwrap();
    let g = enc.encode_witness(v.witness().unwrap()).unwrap();
    assert!(enc.moves_source_to_target(&g).unwrap());
    // conjugation blocks commute with the abelian images
    for (tuple, h) in enc.instance.source.iter().zip(&g.hs) {
        for x in tuple {
            assert_eq!(&(h * x), &(x * h));
        }
    }
}

#[test]
fn finite_orbit_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let groups = [
        FiniteGroupTable::cyclic(4),
        cyclic_square(2),
        FiniteGroupTable::from_pc(&nilcert::pcp::parse("group d8\ngen a order 2\ngen b order 2\ngen c order 2\nconj b ^ a = b c\n").unwrap(), 8)
            .unwrap()
            .table,
    ];
    for i in 0..50 {
        let f = &groups[i % groups.len()];
        let n = f.order();
        let shape: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=2)).collect();
        let gen = |rng: &mut ChaCha8Rng| -> TupleSystem<usize> {
            TupleSystem::new(shape.iter().map(|&k| (0..k).map(|_| rng.gen_range(0..n)).collect()).collect())
        };
        let s = gen(&mut rng);
        let t = gen(&mut rng);
        let abstract_verdict = whitehead_finite(f, &s, &t).unwrap().is_equivalent();
        let enc = orbit_encoding_finite(f, &s, &t, 512).unwrap();
        assert_eq!(enc.orbit_contains_target(), abstract_verdict, "instance {i}");
    }
}
