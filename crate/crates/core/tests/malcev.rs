use nilcert::malcev::*;
use nilcert::nilgroup::library::{free_abelian, free_nilpotent_class2, heisenberg, heisenberg_k};
use nilcert::nilgroup::{NilElement, PcPresentation};
use nilcert::pcp;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(rows: &[&[i64]]) -> UniTriangular {
    UniTriangular::new(QMatrix::from_i64(rows)).unwrap()
}

fn strict(rows: &[&[i64]]) -> StrictUpper {
    StrictUpper::new(QMatrix::from_i64(rows)).unwrap()
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    q_frac(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

fn random_strict(rng: &mut ChaCha8Rng, n: usize) -> StrictUpper {
    let mut m = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = random_rational(rng);
        }
    }
    StrictUpper::new(m).unwrap()
}

fn random_unitriangular(rng: &mut ChaCha8Rng, n: usize) -> UniTriangular {
    let mut m = QMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = random_rational(rng);
        }
    }
    UniTriangular::new(m).unwrap()
}

#[test]
fn expm_examples() {
    assert_eq!(expm(&strict(&[&[0, 1], &[0, 0]])), unit(&[&[1, 1], &[0, 1]]));
    let e = expm(&strict(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]));
    assert_eq!(e.matrix()[(0, 2)], q_frac(1, 2));
    assert_eq!(e.matrix()[(0, 1)], q(1));
    assert!(expm(&StrictUpper::zero(4)).is_identity());
}

#[test]
fn logm_examples() {
    assert_eq!(logm(&unit(&[&[1, 2], &[0, 1]])), strict(&[&[0, 2], &[0, 0]]));
    let l = logm(&unit(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]));
    let mut expected = QMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
    expected[(0, 2)] = q_frac(-1, 2);
    assert_eq!(l.matrix(), &expected);
}

#[test]
fn exp_log_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for t in 0..100 {
        let n = 2 + t % 5;
        let m = random_strict(&mut rng, n);
        assert_eq!(logm(&expm(&m)), m);
        let u = random_unitriangular(&mut rng, n);
        assert_eq!(expm(&logm(&u)), u);
    }
}

#[test]
fn exp_of_commuting_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let m = random_strict(&mut rng, n);
        let a = m.scale(&random_rational(&mut rng));
        let b = m.scale(&random_rational(&mut rng));
        assert_eq!(expm(&a.add(&b)), expm(&a).mul(&expm(&b)));
    }
}

#[test]
fn curated_embeddings() {
    let e = embed_matrix_group(&free_abelian(1), DEFAULT_CLASS_CAP).unwrap();
    assert_eq!(e.images, vec![unit(&[&[1, 1], &[0, 1]])]);

    let e = embed_matrix_group(&heisenberg(), DEFAULT_CLASS_CAP).unwrap();
    assert_eq!(e.construction, Construction::Curated);
    assert_eq!(
        e.images,
        vec![
            unit(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
            unit(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]),
            unit(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]),
        ]
    );
    assert_eq!(e.certified_radius, 3);

    let e = embed_matrix_group(&free_abelian(2), DEFAULT_CLASS_CAP).unwrap();
    assert_eq!(e.dim, 3);
    assert_eq!(e.images[0].mul(&e.images[1]), e.images[1].mul(&e.images[0]));

    let e = embed_matrix_group(&heisenberg_k(2), DEFAULT_CLASS_CAP).unwrap();
    assert!(e.images.iter().all(UniTriangular::is_integral));
}

#[test]
fn embedding_rejects_torsion_and_deep_class() {
    let t = PcPresentation::abelian("t", 1, &[2]).unwrap();
    assert_eq!(embed_matrix_group(&t, 3).unwrap_err().code(), "torsion-present");
    assert_eq!(embed_matrix_group(&heisenberg(), 1).unwrap_err().code(), "class-cap");
}

fn class3() -> PcPresentation {
    // filiform group: [b, a] = c, [c, a] = d
    pcp::parse(
        "group fil\ngen a order inf\ngen b order inf\ngen c order inf\ngen d order inf\nconj b ^ a = b c\nconj c ^ a = c d\n",
    )
    .unwrap()
}

#[test]
fn translation_embeddings() {
    for p in [heisenberg(), heisenberg_k(2), heisenberg_k(3), free_nilpotent_class2(3), class3(), free_abelian(2)] {
        let e = embed_by_translation(&p).unwrap();
        assert_eq!(e.construction, Construction::Translation);
        assert!(e.images.iter().all(UniTriangular::is_integral), "{}", p.name());
        e.verify_relations(&p).unwrap();
        assert!(e.certified_radius >= 2, "{}", p.name());
    }
    let e = embed_matrix_group(&class3(), DEFAULT_CLASS_CAP).unwrap();
    assert_eq!(e.construction, Construction::Translation);
}

#[test]
fn embedding_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in [heisenberg(), class3()] {
        let e = embed_matrix_group(&p, DEFAULT_CLASS_CAP).unwrap();
        for _ in 0..1000 {
            let a: Vec<i64> = (0..p.len()).map(|_| rng.gen_range(-5..=5)).collect();
            let b: Vec<i64> = (0..p.len()).map(|_| rng.gen_range(-5..=5)).collect();
            let a = NilElement::from_exponents(a);
            let b = NilElement::from_exponents(b);
            assert_eq!(e.apply(&p.multiply(&a, &b)), e.apply(&a).mul(&e.apply(&b)));
        }
    }
}

#[test]
fn lie_spans() {
    let e = embed_matrix_group(&heisenberg(), 3).unwrap();
    let span = qlie_span(&e.images).unwrap();
    assert_eq!(span.dim(), 3);
    assert!(span.verify_closure());
    let e12 = strict(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
    let e23 = strict(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
    let e13 = strict(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]);
    assert_eq!(e12.bracket(&e23), e13);
    for m in [&e12, &e23, &e13] {
        assert!(span.contains(m));
    }
    assert!(!span.is_abelian());

    let single = qlie_span(&e.images[..1]).unwrap();
    assert_eq!(single.dim(), 1);
    assert!(single.is_abelian());

    let z2 = embed_matrix_group(&free_abelian(2), 3).unwrap();
    let span = qlie_span(&z2.images).unwrap();
    assert_eq!(span.dim(), 2);
    assert!(span.is_abelian());

    let f = embed_by_translation(&free_nilpotent_class2(3)).unwrap();
    let span = qlie_span(&f.images).unwrap();
    assert_eq!(span.dim(), 6);
    assert!(span.verify_closure());
}

fn random_heisenberg_block(rng: &mut ChaCha8Rng) -> QMatrix {
    let mut m = QMatrix::identity(3);
    m[(0, 1)] = q(rng.gen_range(-4..=4));
    m[(1, 2)] = q(rng.gen_range(-4..=4));
    m[(0, 2)] = q(rng.gen_range(-4..=4));
    m
}

fn random_k(rng: &mut ChaCha8Rng) -> QMatrix {
    // products of elementary integer matrices and sign changes
    let mut k = QMatrix::identity(3);
    for _ in 0..4 {
        let mut e = QMatrix::identity(3);
        let i = rng.gen_range(0..3);
        let j = (i + rng.gen_range(1..3)) % 3;
        e[(i, j)] = q(rng.gen_range(-2..=2));
        k = &k * &e;
    }
    if rng.gen_bool(0.5) {
        let mut d = QMatrix::identity(3);
        d[(1, 1)] = q(-1);
        k = &k * &d;
    }
    k
}

#[test]
fn semidirect_examples() {
    let id = SemidirectElement::identity(3, 2);
    assert!(id.materialize().is_identity());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let a = semidirect_encode(random_k(&mut rng), vec![random_heisenberg_block(&mut rng), random_heisenberg_block(&mut rng)]).unwrap();
        let b = semidirect_encode(random_k(&mut rng), vec![random_heisenberg_block(&mut rng), random_heisenberg_block(&mut rng)]).unwrap();
        let ab = semidirect_multiply(&a, &b).unwrap();
        assert_eq!(ab.materialize(), &a.materialize() * &b.materialize());
        assert_eq!(SemidirectElement::from_block_matrix(&(&a.materialize() * &b.materialize()), 3).unwrap(), ab);
        assert!(semidirect_multiply(&a, &a.inverse()).unwrap().materialize().is_identity());

        let point: Point = vec![
            vec![random_heisenberg_block(&mut rng)],
            vec![random_heisenberg_block(&mut rng), random_heisenberg_block(&mut rng)],
        ];
        let lhs = semidirect_act(&semidirect_act(&point, &a).unwrap(), &b).unwrap();
        let rhs = semidirect_act(&point, &ab).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(semidirect_act(&point, &id).unwrap(), point);
    }
}

#[test]
fn conjugation_only_elements() {
    let h = QMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
    let g = semidirect_encode(QMatrix::identity(3), vec![h.clone()]).unwrap();
    let x = QMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
    let out = semidirect_act(&vec![vec![x.clone()]], &g).unwrap();
    assert_eq!(out[0][0], &(&h.inverse().unwrap() * &x) * &h);
    assert!(semidirect_encode(QMatrix::identity(2), vec![QMatrix::identity(3)]).is_err());
}

#[test]
fn rational_json_round_trip() {
    let mut m = QMatrix::identity(2);
    m[(0, 1)] = q_frac(-3, 4);
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(s, r#"[["1","-3/4"],["0","1"]]"#);
    let back: QMatrix = serde_json::from_str(&s).unwrap();
    assert_eq!(back, m);
    assert!(serde_json::from_str::<UniTriangular>(r#"[["2","0"],["0","1"]]"#).is_err());
}
