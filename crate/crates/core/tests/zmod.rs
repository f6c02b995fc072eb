use nilcert::zmod::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn bi(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

#[test]
fn hnf_examples() {
    let (h, u) = hnf(&IntMatrix::identity(2));
    assert_eq!(h, IntMatrix::identity(2));
    assert_eq!(u, IntMatrix::identity(2));

    let a = m(&[&[2, 4], &[6, 8]]);
    let (h, u) = hnf(&a);
    assert_eq!(h, m(&[&[2, 0], &[0, 4]]));
    assert_eq!(&u * &a, h);

    let (h, _) = hnf(&IntMatrix::zeros(2, 2));
    assert!(h.is_zero());
}

#[test]
fn snf_examples() {
    let (d, u, v) = snf(&m(&[&[2, 4], &[6, 8]]));
    assert_eq!(d, m(&[&[2, 0], &[0, 4]]));
    assert!(u.is_unimodular() && v.is_unimodular());
    let (d, _, _) = snf(&IntMatrix::identity(3));
    assert_eq!(d, IntMatrix::identity(3));
    let (d, _, _) = snf(&m(&[&[-6]]));
    assert_eq!(d, m(&[&[6]]));
}

#[test]
fn solve_examples() {
    let s = solve_integer(&m(&[&[2]]), &bi(&[4]));
    assert_eq!(s.particular, Some(bi(&[2])));
    assert!(s.kernel.is_empty());
    assert_eq!(solve_integer(&m(&[&[2]]), &bi(&[3])).particular, None);
    let s = solve_integer(&m(&[&[1, 1]]), &bi(&[0]));
    assert_eq!(s.particular, Some(bi(&[0, 0])));
    assert_eq!(s.kernel, vec![bi(&[1, -1])]);
}

#[test]
fn isolator_examples() {
    let z2 = AbelianModule::free(2);
    let s = Submodule::from_generators(z2.clone(), &[bi(&[2, 0]), bi(&[0, 2])]);
    assert_eq!(isolator(&s), z2.whole());
    let s = Submodule::from_generators(z2.clone(), &[bi(&[1, 0])]);
    assert_eq!(isolator(&s), s);
    assert_eq!(isolator(&z2.whole()), z2.whole());
    // torsion is always swallowed
    let mixed = AbelianModule::new(1, vec![BigInt::from(4)]).unwrap();
    let s = Submodule::from_generators(mixed.clone(), &[bi(&[3, 0])]);
    assert_eq!(isolator(&s), mixed.whole());
}

#[test]
fn coset_examples() {
    let z2 = AbelianModule::free(2);
    let two = Submodule::from_generators(z2.clone(), &[bi(&[2, 0]), bi(&[0, 2])]);
    let reps = coset_representatives(&two, &z2.whole(), 1000).unwrap();
    assert_eq!(reps, vec![bi(&[0, 0]), bi(&[1, 0]), bi(&[0, 1]), bi(&[1, 1])]);
    assert_eq!(coset_representatives(&two, &two, 1000).unwrap(), vec![bi(&[0, 0])]);
    let s = Submodule::from_generators(z2.clone(), &[bi(&[2, 0]), bi(&[0, 4])]);
    assert_eq!(coset_representatives(&s, &z2.whole(), 1000).unwrap().len(), 8);
    let line = Submodule::from_generators(z2.clone(), &[bi(&[1, 0])]);
    assert_eq!(
        coset_representatives(&line, &z2.whole(), 1000).unwrap_err().code(),
        "index-infinite"
    );
}

#[test]
fn hom_examples() {
    let h = hom_module(&AbelianModule::free(2), &AbelianModule::free(1));
    assert_eq!(h.module, AbelianModule::free(2));
    let z2 = AbelianModule::new(0, vec![BigInt::from(2)]).unwrap();
    let z4 = AbelianModule::new(0, vec![BigInt::from(4)]).unwrap();
    assert!(hom_module(&z2, &AbelianModule::free(1)).module.is_trivial());
    let h = hom_module(&z4, &z2);
    assert_eq!(h.module, z2);
    for (q, b) in h.basis().iter().enumerate() {
        assert_eq!(h.coords(b).unwrap(), h.module.unit(q));
    }
}

/// Independent count of homomorphisms between finite modules by checking every generator image.
fn brute_hom_count(a: &AbelianModule, c: &AbelianModule) -> usize {
    let elems = c.elements(10_000).unwrap();
    let mut count = 1usize;
    for n in &a.invariant_factors {
        count *= elems.iter().filter(|e| c.is_zero_elem(&c.scale(n, e))).count();
    }
    count
}

fn modules() -> Vec<AbelianModule> {
    let orders: &[&[i64]] = &[&[2], &[4], &[2, 2], &[2, 4], &[3], &[6], &[2, 6], &[8], &[3, 3], &[2, 2, 2]];
    orders.iter().map(|o| AbelianModule::from_orders(&bi(o))).collect()
}

#[test]
fn hom_counts_match_brute_force() {
    for a in modules() {
        for c in modules() {
            let h = hom_module(&a, &c);
            let n: BigInt = h.module.order().unwrap();
            assert_eq!(n, BigInt::from(brute_hom_count(&a, &c)), "Hom({a}, {c})");
            for (q, b) in h.basis().iter().enumerate() {
                assert!(h.is_hom(b));
                assert_eq!(h.coords(b).unwrap(), h.module.unit(q));
            }
        }
    }
}

#[test]
fn from_orders_canonicalizes() {
    let m = AbelianModule::from_orders(&bi(&[0, 6, 4, 1]));
    assert_eq!(m, AbelianModule::new(1, bi(&[2, 12])).unwrap());
}

fn matrix_strategy(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-50i64..=50, c), r)
            .prop_map(move |rows| IntMatrix::from_rows(c, &rows))
    })
}

fn random_unimodular(n: usize, seed: u64) -> IntMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut u = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let k: i64 = rng.gen_range(-3..=3);
        let row: Vec<BigInt> = (0..n).map(|c| &u[(i, c)] + BigInt::from(k) * &u[(j, c)]).collect();
        for (c, e) in row.into_iter().enumerate() {
            u[(i, c)] = e;
        }
    }
    u
}

fn is_hermite(h: &IntMatrix) -> bool {
    let mut last: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..h.rows() {
        match h.row(i).iter().position(|e| !e.is_zero()) {
            None => seen_zero = true,
            Some(p) => {
                if seen_zero || last.map_or(false, |l| p <= l) || h[(i, p)] <= BigInt::zero() {
                    return false;
                }
                for r in 0..i {
                    if h[(r, p)] < BigInt::zero() || h[(r, p)] >= h[(i, p)] {
                        return false;
                    }
                }
                last = Some(p);
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_identities(a in matrix_strategy(8)) {
        let (h, u) = hnf(&a);
        prop_assert!(u.det() == BigInt::one() || u.det() == -BigInt::one());
        prop_assert_eq!(&u * &a, h.clone());
        prop_assert!(is_hermite(&h));
    }

    #[test]
    fn snf_identities(a in matrix_strategy(8)) {
        let s = smith(&a);
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        prop_assert!((&s.v * &s.v_inv).is_identity());
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j { prop_assert!(s.d[(i, j)].is_zero()); }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(w[0] >= BigInt::zero());
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            prop_assert!(divides);
        }
    }

    #[test]
    fn snf_invariant_under_unimodular(a in matrix_strategy(5), seed in any::<u64>()) {
        let d0 = smith(&a).diagonal();
        for t in 0..100u64 {
            let p = random_unimodular(a.rows(), seed.wrapping_add(2 * t));
            let q = random_unimodular(a.cols(), seed.wrapping_add(2 * t + 1));
            prop_assert_eq!(smith(&(&(&p * &a) * &q)).diagonal(), d0.clone());
        }
    }

    #[test]
    fn solve_is_exact(a in matrix_strategy(5), x in prop::collection::vec(-9i64..=9, 5)) {
        let x: Vec<BigInt> = x[..a.cols()].iter().map(|&v| BigInt::from(v)).collect();
        let b = a.mul_vec(&x);
        let s = solve_integer(&a, &b);
        let p = s.particular.expect("consistent system");
        prop_assert_eq!(a.mul_vec(&p), b);
        for k in &s.kernel {
            prop_assert!(a.mul_vec(k).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn isolator_laws(gens in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 0..4), tors in 0usize..2) {
        let amb = AbelianModule::new(3 - tors, if tors == 1 { bi(&[6]) } else { vec![] }).unwrap();
        let rows: Vec<Vec<BigInt>> = gens.iter().map(|g| amb.reduce(&bi(g))).collect();
        let s = Submodule::from_generators(amb.clone(), &rows);
        let iso = isolator(&s);
        prop_assert_eq!(isolator(&iso), iso.clone());
        prop_assert!(s.is_subset_of(&iso));
        prop_assert!(amb.torsion_submodule().is_subset_of(&iso));
        if s.lattice_rank() == iso.lattice_rank() {
            prop_assert!(s.index_in(&iso).is_ok());
        }
    }

    #[test]
    fn coset_count_matches_elementary_divisors(d in prop::collection::vec(1i64..=4, 2), off in -3i64..=3) {
        let amb = AbelianModule::free(2);
        let sub = Submodule::from_generators(amb.clone(), &[bi(&[d[0], off]), bi(&[0, d[1]])]);
        let reps = coset_representatives(&sub, &amb.whole(), 10_000).unwrap();
        let incl = sub.basis().clone();
        let idx: BigInt = smith(&incl).diagonal().iter().product();
        prop_assert_eq!(BigInt::from(reps.len()), idx);
        for i in 0..reps.len() {
            for j in 0..i {
                let diff: Vec<BigInt> = reps[i].iter().zip(&reps[j]).map(|(a, b)| a - b).collect();
                prop_assert!(!sub.contains(&diff));
            }
        }
    }
}
