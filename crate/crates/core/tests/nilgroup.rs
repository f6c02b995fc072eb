use std::sync::Arc;

use nilcert::nilgroup::library::{free_abelian, heisenberg, heisenberg_k};
use nilcert::nilgroup::{out_finite, FiniteGroupTable, GroupHom, NilElement, PcPresentation};
use nilcert::pcp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn el(v: &[i64]) -> NilElement {
    NilElement::from_exponents(v.to_vec())
}

fn random_element(p: &PcPresentation, rng: &mut ChaCha8Rng, r: i64) -> NilElement {
    let v: Vec<i64> = (0..p.len())
        .map(|i| match p.relative_order(i) {
            Some(o) => rng.gen_range(0..o),
            None => rng.gen_range(-r..=r),
        })
        .collect();
    el(&v)
}

type M3 = [[i64; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn unitriangular(a: i64, b: i64, c: i64) -> M3 {
    [[1, a, c], [0, 1, b], [0, 0, 1]]
}

/// x = E + e12, y = E + e23, z = E + e13; integer inverses of unitriangular matrices.
fn heis_matrix(g: usize, e: i64) -> M3 {
    match g {
        0 => unitriangular(e, 0, 0),
        1 => unitriangular(0, e, 0),
        _ => unitriangular(0, 0, e),
    }
}

fn heis_matrix_of(v: &NilElement) -> M3 {
    let mut m = unitriangular(0, 0, 0);
    for g in 0..3 {
        m = mat_mul(&m, &heis_matrix(g, v[g]));
    }
    m
}

#[test]
fn collect_examples() {
    let h = heisenberg();
    assert_eq!(h.collect_str("y x").unwrap(), el(&[1, 1, -1]));
    assert_eq!(h.collect_str("").unwrap(), el(&[0, 0, 0]));
    assert_eq!(h.collect_str("x x^-1 y").unwrap(), el(&[0, 1, 0]));
}

#[test]
fn commutator_convention() {
    let h = heisenberg();
    let (x, y, z) = (h.generator(0), h.generator(1), h.generator(2));
    assert_eq!(h.commutator(&x, &y), z);
    assert!(h.commutator(&x, &x).is_identity());
    let h2 = heisenberg_k(2);
    assert_eq!(h2.commutator(&h2.generator(0), &h2.generator(1)), el(&[0, 0, 2]));
}

#[test]
fn inverse_of_product() {
    let h = heisenberg();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = random_element(&h, &mut rng, 9);
        let b = random_element(&h, &mut rng, 9);
        let lhs = h.invert(&h.multiply(&a, &b));
        let rhs = h.multiply(&h.invert(&b), &h.invert(&a));
        assert_eq!(lhs, rhs);
        assert!(h.multiply(&a, &h.invert(&a)).is_identity());
    }
}

#[test]
fn collection_matches_matrix_oracle() {
    let h = heisenberg();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let len = rng.gen_range(0..=20);
        let word: Vec<(usize, i64)> =
            (0..len).map(|_| (rng.gen_range(0..3), if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let mut m = unitriangular(0, 0, 0);
        for &(g, e) in &word {
            m = mat_mul(&m, &heis_matrix(g, e));
        }
        let nf = h.collect(&word);
        assert_eq!(heis_matrix_of(&nf), m, "word {word:?}");
    }
}

#[test]
fn collect_is_a_homomorphism_from_words() {
    let h = heisenberg_k(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let u: Vec<(usize, i64)> = (0..rng.gen_range(0..8)).map(|_| (rng.gen_range(0..3), rng.gen_range(-3..=3))).collect();
        let w: Vec<(usize, i64)> = (0..rng.gen_range(0..8)).map(|_| (rng.gen_range(0..3), rng.gen_range(-3..=3))).collect();
        let mut uw = u.clone();
        uw.extend(w.iter().cloned());
        assert_eq!(h.collect(&uw), h.multiply(&h.collect(&u), &h.collect(&w)));
    }
}

fn z_times_z2() -> PcPresentation {
    PcPresentation::abelian("zz2", 1, &[2]).unwrap()
}

#[test]
fn upper_central_series_examples() {
    let h = heisenberg();
    let ucs = h.upper_central_series();
    assert_eq!(ucs.length(), 2);
    assert_eq!(ucs.terms[1], h.subgroup(&[h.generator(2)]));
    assert_eq!(ucs.terms[2], h.whole_group());

    let z3 = free_abelian(3);
    let ucs = z3.upper_central_series();
    assert_eq!(ucs.length(), 1);
    assert_eq!(ucs.terms[1], z3.whole_group());

    let h2 = heisenberg_k(2);
    let ucs = h2.upper_central_series();
    assert_eq!(ucs.length(), 2);
    assert_eq!(ucs.terms[1], h2.subgroup(&[h2.generator(2)]));
}

#[test]
fn central_series_layers_are_centers() {
    for p in [heisenberg(), heisenberg_k(2), heisenberg_k(3), nilcert::nilgroup::library::free_nilpotent_class2(3)] {
        let ucs = p.upper_central_series();
        for i in 0..ucs.length() {
            let q = p.quotient(&ucs.terms[i]).unwrap();
            let z = q.presentation.center();
            for g in ucs.terms[i + 1].generators() {
                assert!(q.presentation.contains(&z, &q.project(&p, g)));
            }
            for g in z.generators() {
                assert!(p.contains(&ucs.terms[i + 1], &q.lift(p.len(), g)));
            }
        }
        // brute-force oracle for the center: generators of Z commute with everything
        let z = p.center();
        for c in z.generators() {
            for g in p.generators() {
                assert!(p.commutator(c, &g).is_identity());
            }
        }
    }
}

#[test]
fn torsion_data_examples() {
    let g = z_times_z2();
    let t = g.torsion_data(1000).unwrap();
    assert_eq!(t.tau, g.subgroup(&[g.generator(1)]));
    assert_eq!(t.elements.len(), 2);
    assert_eq!(t.m, 2);

    let h = heisenberg();
    let t = h.torsion_data(1000).unwrap();
    assert!(t.tau.is_trivial());
    assert_eq!(t.m, 1);

    let c6 = PcPresentation::abelian("c6", 0, &[6]).unwrap();
    let t = c6.torsion_data(1000).unwrap();
    assert_eq!(t.tau, c6.whole_group());
    assert_eq!(t.elements.len(), 6);
    assert_eq!(t.m, 6);
}

/// Heisenberg times a central Z/2.
fn twisted() -> PcPresentation {
    pcp::parse(
        "group twisted\ngen x order inf\ngen y order inf\ngen z order inf\ngen t order 2\nconj y ^ x = y z^-1\n",
    )
    .unwrap()
}

#[test]
fn torsion_powers_meet_tau_trivially() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [z_times_z2(), twisted(), PcPresentation::abelian("m", 2, &[2, 6]).unwrap()] {
        let t = p.torsion_data(10_000).unwrap();
        for x in &t.elements {
            assert!(p.element_order(x).is_some());
        }
        for _ in 0..200 {
            let x = random_element(&p, &mut rng, 6);
            let y = p.power(&x, t.m);
            let hits = t.elements.iter().filter(|e| **e == y).count();
            assert!(y.is_identity() || hits == 0);
        }
    }
}

#[test]
fn quotient_tables() {
    let z2 = free_abelian(2);
    let k = z2.verbal_power_subgroup(3, 1000).unwrap();
    let q = z2.quotient(&k).unwrap();
    let t = FiniteGroupTable::from_pc(&q.presentation, 1000).unwrap();
    assert_eq!(t.table.order(), 9);

    let h = heisenberg();
    let q = h.quotient(&h.whole_group()).unwrap();
    let t = FiniteGroupTable::from_pc(&q.presentation, 1000).unwrap();
    assert_eq!(t.table.order(), 1);

    let k = h.normal_closure(&[el(&[3, 0, 0]), el(&[0, 3, 0]), el(&[0, 0, 3])]);
    let q = h.quotient(&k).unwrap();
    let t = FiniteGroupTable::from_pc(&q.presentation, 1000).unwrap();
    assert_eq!(t.table.order(), 27);
    assert!(!t.table.is_abelian());

    // projection is a homomorphism with kernel k
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let a = random_element(&h, &mut rng, 10);
        let b = random_element(&h, &mut rng, 10);
        let pa = q.project(&h, &a);
        let pb = q.project(&h, &b);
        assert_eq!(q.project(&h, &h.multiply(&a, &b)), q.presentation.multiply(&pa, &pb));
        assert_eq!(pa.is_identity(), h.contains(&k, &a));
    }
}

#[test]
fn quotient_rejects_non_normal() {
    let h = heisenberg();
    let s = h.subgroup(&[h.generator(0)]);
    assert!(!h.is_normal(&s));
    assert!(h.quotient(&s).is_err());
}

#[test]
fn verbal_power_subgroups() {
    let z2 = free_abelian(2);
    let v = z2.verbal_power_subgroup(3, 1000).unwrap();
    assert_eq!(z2.index(&v), Some(9));
    assert_eq!(v, z2.subgroup(&[el(&[3, 0]), el(&[0, 3])]));

    let h = heisenberg();
    assert_eq!(h.verbal_power_subgroup(1, 1000).unwrap(), h.whole_group());
    let v = h.verbal_power_subgroup(2, 1000).unwrap();
    for g in [el(&[2, 0, 0]), el(&[0, 2, 0]), el(&[0, 0, 1])] {
        assert!(h.contains(&v, &g));
    }
    // (xy)^2 = x^2 y^2 z^-1, so z lies in the subgroup generated by squares
    assert_eq!(h.index(&v), Some(4));
}

/// Index of the subgroup generated by all k-th powers of elements of a finite
/// box, computed by closing a set of elements of the finite quotient by `N^(k*k)`.
#[test]
fn verbal_power_matches_closure_oracle() {
    let h = heisenberg();
    for k in [2i64, 3] {
        let v = h.verbal_power_subgroup(k, 10_000).unwrap();
        let big = h.normal_closure(&[el(&[k * k, 0, 0]), el(&[0, k * k, 0]), el(&[0, 0, k * k])]);
        let q = h.quotient(&big).unwrap();
        let t = FiniteGroupTable::from_pc(&q.presentation, 100_000).unwrap();
        let powers: Vec<usize> = (0..t.table.order()).map(|a| t.table.pow(a, k)).collect();
        let closure = t.table.closure(&powers);
        let expected = t.table.order() / closure.len();
        assert_eq!(h.index(&v), Some(expected as u128), "k = {k}");
    }
}

#[test]
fn low_index_examples() {
    let z = free_abelian(1);
    let subs = z.low_index_subgroups(3, 6).unwrap();
    assert_eq!(subs.len(), 3);
    let idx: Vec<u128> = subs.iter().map(|s| z.index(s).unwrap()).collect();
    assert_eq!(idx, vec![1, 2, 3]);

    let z2 = free_abelian(2);
    let subs = z2.low_index_subgroups(2, 6).unwrap();
    assert_eq!(subs.len(), 4);
    assert_eq!(subs[0], z2.whole_group());

    let h = heisenberg();
    let subs = h.low_index_subgroups(2, 6).unwrap();
    assert_eq!(subs.iter().filter(|s| h.index(s) == Some(2)).count(), 3);
    for s in &subs {
        assert!(h.contains(s, &h.generator(2)));
    }

    assert!(z.low_index_subgroups(7, 6).is_err());
}

type Perm = Vec<usize>;

fn perm_mul(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x]).collect()
}

fn perm_inv(a: &Perm) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

fn perm_pow(a: &Perm, e: i64) -> Perm {
    let base = if e < 0 { perm_inv(a) } else { a.clone() };
    let mut out: Perm = (0..a.len()).collect();
    for _ in 0..e.unsigned_abs() {
        out = perm_mul(&out, &base);
    }
    out
}

fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Perm = (0..n).collect();
    fn rec(k: usize, cur: &mut Perm, out: &mut Vec<Perm>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

/// Number of subgroups of index `n`: transitive right actions on `n` points
/// divided by `(n-1)!`.
fn subgroups_of_index_oracle(p: &PcPresentation, n: usize) -> usize {
    let perms = all_perms(n);
    let k = p.len();
    let eval = |sigma: &[Perm], w: &NilElement| {
        let mut out: Perm = (0..n).collect();
        for (g, e) in p.word_of(w) {
            out = perm_mul(&out, &perm_pow(&sigma[g], e));
        }
        out
    };
    let mut count = 0usize;
    let mut idx = vec![0usize; k];
    loop {
        let sigma: Vec<Perm> = idx.iter().map(|&i| perms[i].clone()).collect();
        let mut ok = true;
        'rels: for i in 0..k {
            if let Some(o) = p.relative_order(i) {
                if perm_pow(&sigma[i], o) != eval(&sigma, p.power_relation(i)) {
                    ok = false;
                    break 'rels;
                }
            }
            for j in i + 1..k {
                let lhs = perm_mul(&perm_mul(&perm_inv(&sigma[i]), &sigma[j]), &sigma[i]);
                if lhs != eval(&sigma, p.conj_relation(j, i)) {
                    ok = false;
                    break 'rels;
                }
            }
        }
        if ok {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![0usize];
            while let Some(x) = stack.pop() {
                for s in &sigma {
                    if !seen[s[x]] {
                        seen[s[x]] = true;
                        stack.push(s[x]);
                    }
                }
            }
            if seen.iter().all(|&b| b) {
                count += 1;
            }
        }
        let mut t = 0;
        while t < k {
            idx[t] += 1;
            if idx[t] < perms.len() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == k {
            break;
        }
    }
    let fact: usize = (1..n).product();
    count / fact
}

#[test]
fn low_index_matches_permutation_oracle() {
    let cases: Vec<(PcPresentation, usize)> = vec![
        (free_abelian(2), 4),
        (heisenberg(), 4),
        (heisenberg_k(2), 4),
        (z_times_z2(), 4),
        (PcPresentation::abelian("z_z3", 1, &[3]).unwrap(), 3),
    ];
    for (p, d) in cases {
        let subs = p.low_index_subgroups(d, 6).unwrap();
        for n in 1..=d {
            let ours = subs.iter().filter(|s| p.index(s) == Some(n as u128)).count();
            assert_eq!(ours, subgroups_of_index_oracle(&p, n), "{} index {n}", p.name());
        }
    }
}

#[test]
fn hom_from_images_checks_relations() {
    let h = Arc::new(heisenberg());
    let ok = GroupHom::from_images(h.clone(), h.clone(), vec![el(&[1, 0, 2]), el(&[0, 1, 0]), el(&[0, 0, 1])]);
    assert!(ok.is_ok());
    let bad = GroupHom::from_images(h.clone(), h.clone(), vec![el(&[1, 0, 0]), el(&[0, 1, 0]), el(&[0, 0, 2])]);
    let err = bad.unwrap_err();
    assert_eq!(err.code(), "relation-violated");
    assert!(err.to_string().contains("y ^ x"));
}

#[test]
fn inner_automorphisms() {
    let h = Arc::new(heisenberg());
    let f = GroupHom::from_images(h.clone(), h.clone(), vec![el(&[1, 0, 2]), el(&[0, 1, 0]), el(&[0, 0, 1])]).unwrap();
    assert!(f.is_automorphism());
    let c = f.inner_conjugator().expect("inner");
    assert_eq!(GroupHom::inner(h.clone(), &c), f);
    assert_eq!(c, el(&[0, 2, 0]));

    let id = GroupHom::identity(h.clone());
    assert_eq!(id.inner_conjugator(), Some(h.identity()));

    let z2 = Arc::new(free_abelian(2));
    let neg = GroupHom::from_images(z2.clone(), z2.clone(), vec![el(&[-1, 0]), el(&[0, -1])]).unwrap();
    assert!(neg.is_automorphism());
    assert!(!neg.is_inner());

    // x -> x z^3 in H_2 is not inner: Ad_g moves x by even powers of z
    let h2 = Arc::new(heisenberg_k(2));
    let g = GroupHom::from_images(h2.clone(), h2.clone(), vec![el(&[1, 0, 3]), el(&[0, 1, 0]), el(&[0, 0, 1])]).unwrap();
    assert!(g.is_automorphism());
    assert!(!g.is_inner());
}

#[test]
fn hom_kernel_image_inverse() {
    let h = Arc::new(heisenberg());
    let z2 = Arc::new(free_abelian(2));
    let ab = GroupHom::from_images(h.clone(), z2.clone(), vec![el(&[1, 0]), el(&[0, 1]), el(&[0, 0])]).unwrap();
    assert_eq!(ab.kernel(), h.subgroup(&[h.generator(2)]));
    assert!(ab.is_surjective());
    assert!(!ab.is_injective());
    let pre = ab.preimage(&el(&[3, -2])).unwrap();
    assert_eq!(ab.apply(&pre), el(&[3, -2]));

    let phi = GroupHom::from_images(h.clone(), h.clone(), vec![el(&[1, 1, 0]), el(&[0, 1, 0]), el(&[0, 0, 1])]).unwrap();
    assert!(phi.is_automorphism());
    let inv = phi.inverse().unwrap();
    assert_eq!(inv.compose(&phi).unwrap(), GroupHom::identity(h.clone()));
    assert_eq!(phi.compose(&inv).unwrap(), GroupHom::identity(h.clone()));

    let dbl = GroupHom::from_images(z2.clone(), z2.clone(), vec![el(&[2, 0]), el(&[0, 1])]).unwrap();
    assert!(dbl.is_injective());
    assert!(!dbl.is_surjective());
    assert!(dbl.preimage(&el(&[1, 0])).is_none());
}

#[test]
fn out_finite_orders() {
    let c5 = FiniteGroupTable::cyclic(5);
    let o = out_finite(&c5, 512).unwrap();
    assert_eq!(o.aut_order, 4);
    assert_eq!(o.out_order, 4);

    let e9 = PcPresentation::abelian("e9", 0, &[3, 3]).unwrap();
    let t = FiniteGroupTable::from_pc(&e9, 512).unwrap();
    let o = out_finite(&t.table, 512).unwrap();
    assert_eq!(o.aut_order, 48);
    assert_eq!(o.inn_order, 1);

    // Heisenberg mod 3: |Aut| = |GL(2,3)| * 9 = 432, Inn = 9
    let h = heisenberg();
    let k = h.normal_closure(&[el(&[3, 0, 0]), el(&[0, 3, 0]), el(&[0, 0, 3])]);
    let q = h.quotient(&k).unwrap();
    let t = FiniteGroupTable::from_pc(&q.presentation, 512).unwrap();
    let o = out_finite(&t.table, 512).unwrap();
    assert_eq!(o.aut_order, 432);
    assert_eq!(o.inn_order, 9);
    assert_eq!(o.inner.iter().filter(|&&b| b).count(), 9);
}

#[test]
fn pcp_round_trip() {
    let text = "# a class-2 group\ngroup h2\ngen x order inf\ngen y order inf\ngen z order inf\nconj y ^ x = y z^-2\n";
    let p = pcp::parse(text).unwrap();
    assert_eq!(p, heisenberg_k(2).with_name("h2"));
    let again = pcp::parse(&pcp::to_string(&p)).unwrap();
    assert_eq!(again, p);

    let t = pcp::parse("group t\ngen a order 4\ngen b order 2\npow a = b\n").unwrap();
    assert_eq!(t.order(), Some(8));
    assert_eq!(t.element_order(&t.generator(0)), Some(8));
    assert_eq!(pcp::parse(&pcp::to_string(&t)).unwrap(), t);
}

#[test]
fn pcp_parse_errors_have_positions() {
    let err = pcp::parse("group g\ngen x order inf\nconj x ^ w = x\n").unwrap_err();
    match err {
        nilcert::Error::Parse { line, column, .. } => {
            assert_eq!(line, 3);
            assert_eq!(column, 10);
        }
        other => panic!("unexpected {other:?}"),
    }
    let err = pcp::parse("group g\ngen x order banana\n").unwrap_err();
    assert_eq!(err.code(), "parse-error");
}

#[test]
fn inconsistent_presentation_rejected() {
    // a^2 = b forces b to commute with a, contradicting b^a = b c
    let text = "group bad\ngen a order 2\ngen b order inf\ngen c order inf\npow a = b\nconj b ^ a = b c\n";
    let err = pcp::parse(text).unwrap_err();
    assert_eq!(err.code(), "inconsistent-presentation", "{err}");

    let shape = "group bad\ngen x order 2\ngen y order 3\nconj y ^ x = y^2\n";
    assert!(pcp::parse(shape).is_err());
}
