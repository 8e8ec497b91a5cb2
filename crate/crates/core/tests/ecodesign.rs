use proptest::prelude::*;

use qbath::ecodesign::*;

fn bare(name: &str) -> MoleculeDescriptors {
    MoleculeDescriptors {
        name: name.into(),
        homo_ev: None,
        lumo_ev: None,
        ionization_ev: None,
        affinity_ev: None,
        populations_n: None,
        populations_np1: None,
        populations_nm1: None,
        carbonyl_atoms: vec![],
        aromatic_atoms: vec![],
        n_ester: 0,
        bde_min_kj_mol: 350.0,
        f_minus_carbonyl: None,
        f_plus_aromatic_max: None,
        mean_f_minus: None,
        reference_b_index: None,
    }
}

#[test]
fn fukui_toy_example() {
    let f = condensed_fukui(&[3.0, 4.0], &[3.7, 4.3], &[2.9, 3.1]).unwrap();
    for (got, want) in [(&f.f_plus, [0.7, 0.3]), (&f.f_minus, [0.1, 0.9]), (&f.f_zero, [0.4, 0.6])] {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }
    let zero = condensed_fukui(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]).unwrap();
    assert!(zero.f_plus.iter().chain(&zero.f_minus).all(|x| *x == 0.0));
    assert!(condensed_fukui(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
}

#[test]
fn electrophilicity_and_koopmans() {
    let g = descriptors_from_mu_eta(-4.30, 1.10).unwrap();
    assert!((g.electrophilicity_ev - 8.40).abs() < 0.01);
    let mut m = bare("a");
    m.ionization_ev = Some(5.40);
    m.affinity_ev = Some(3.20);
    let g = global_descriptors(&m, None).unwrap();
    assert!((g.mu_ev + 4.30).abs() < 1e-12 && (g.hardness_ev - 1.10).abs() < 1e-12);
    assert!((g.softness - 0.909).abs() < 1e-3);
    assert!((g.softness * g.hardness_ev - 1.0).abs() < 1e-10);
    assert!(descriptors_from_mu_eta(-4.0, 0.0).is_err());
}

#[test]
fn nucleophilicity_reference() {
    let mut m = bare("n");
    m.homo_ev = Some(-5.2);
    m.lumo_ev = Some(-3.0);
    assert_eq!(global_descriptors(&m, Some(-5.2)).unwrap().nucleophilicity_ev, Some(0.0));
    assert_eq!(global_descriptors(&m, None).unwrap().nucleophilicity_ev, None);
}

#[test]
fn ionization_and_koopmans_routes_agree() {
    let mut a = bare("k");
    a.homo_ev = Some(-5.4);
    a.lumo_ev = Some(-3.2);
    let mut b = bare("i");
    b.ionization_ev = Some(5.4);
    b.affinity_ev = Some(3.2);
    let (ga, gb) = (global_descriptors(&a, None).unwrap(), global_descriptors(&b, None).unwrap());
    assert!((ga.electrophilicity_ev - gb.electrophilicity_ev).abs() < 1e-9);
}

#[test]
fn susceptibility_examples() {
    let mut m = bare("s");
    m.ionization_ev = Some(5.4);
    m.affinity_ev = Some(3.2);
    m.f_minus_carbonyl = Some(0.0);
    m.bde_min_kj_mol = 285.0;
    let r = reactivity_report(&m, None, DEFAULT_B_WEIGHTS, &EcoInputs::default()).unwrap();
    assert_eq!(r.hydrolysis_proxy, Some(0.0));
    assert_eq!(r.bde_class, "readily cleaved");
    assert_eq!(r.oxidation_proxy, None);

    m.f_minus_carbonyl = Some(0.08);
    let r = reactivity_report(&m, None, DEFAULT_B_WEIGHTS, &EcoInputs::default()).unwrap();
    assert!(r.flags.iter().any(|f| f.contains("rapid biodegradation (<1 year)")));
}

#[test]
fn b_index_examples() {
    let (b, _) = b_index_from_parts(1.0 / 1.1, 0.05, 4.0, 285.0, DEFAULT_B_WEIGHTS);
    assert!((b - 24.09).abs() < 0.01, "{b}");
    let (z, c) = b_index_from_parts(0.0, 0.0, 0.0, 400.0, DEFAULT_B_WEIGHTS);
    assert_eq!(z, 0.0);
    assert_eq!(c, BiodegClass::Recalcitrant);
    assert_eq!(classify_b_index(58.0).label(), "moderately biodegradable (6–18 months)");
    assert_eq!(classify_b_index(70.0), BiodegClass::Highly);
    assert_eq!(classify_b_index(50.0), BiodegClass::Moderately);
    assert_eq!(classify_b_index(30.0), BiodegClass::Slowly);
    assert_eq!(classify_b_index(29.999), BiodegClass::Recalcitrant);
}

#[test]
fn molecule_a_report_is_annotated() {
    let a = &reference_molecules()[0];
    let r = reactivity_report(a, None, DEFAULT_B_WEIGHTS, &EcoInputs::default()).unwrap();
    assert!((r.b_index.unwrap() - 24.09).abs() < 0.01);
    assert!(r.annotations.iter().any(|s| s.contains("unreconciled vs paper 101.5")));
    assert!(r.eco_score.is_none());
}

#[test]
fn eco_score_examples() {
    assert!((eco_score(1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(eco_score(0.0, 0.0, 0.0).unwrap(), 0.0);
    assert!(eco_score(-0.1, 0.0, 0.0).is_err());
}

#[test]
fn invalid_molecules_rejected() {
    let mut m = bare("bad");
    m.homo_ev = Some(-3.0);
    m.lumo_ev = Some(-5.0);
    assert!(m.validate().is_err());
    let mut m = bare("bde");
    m.bde_min_kj_mol = 0.0;
    assert!(m.validate().is_err());
}

proptest! {
    #[test]
    fn b_index_monotone(s in 0.0f64..5.0, f in 0.0f64..1.0, n in 0u32..10, bde in 100.0f64..500.0, d in 0.01f64..1.0) {
        let w = DEFAULT_B_WEIGHTS;
        let base = b_index_from_parts(s, f, n as f64, bde, w).0;
        prop_assert!(b_index_from_parts(s + d, f, n as f64, bde, w).0 > base);
        prop_assert!(b_index_from_parts(s, f + d, n as f64, bde, w).0 > base);
        prop_assert!(b_index_from_parts(s, f, n as f64 + 1.0, bde, w).0 > base);
        prop_assert!(b_index_from_parts(s, f, n as f64, bde + d, w).0 < base);
    }

    #[test]
    fn fukui_sums_and_average(p in prop::collection::vec(0.0f64..6.0, 2..8), a in prop::collection::vec(0.0f64..1.0, 8), b in prop::collection::vec(0.0f64..1.0, 8)) {
        let k = p.len();
        let norm = |v: &[f64]| { let s: f64 = v.iter().sum(); v.iter().map(|x| x / s).collect::<Vec<_>>() };
        let (da, db) = (norm(&a[..k]), norm(&b[..k]));
        let np1: Vec<f64> = p.iter().zip(&da).map(|(x, d)| x + d).collect();
        let nm1: Vec<f64> = p.iter().zip(&db).map(|(x, d)| x - d).collect();
        let f = condensed_fukui(&p, &np1, &nm1).unwrap();
        prop_assert!((f.f_plus.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        prop_assert!((f.f_minus.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        for i in 0..k {
            prop_assert_eq!(f.f_zero[i], (f.f_plus[i] + f.f_minus[i]) / 2.0);
        }
    }

    #[test]
    fn classification_partitions_the_line(x in -1e3f64..1e3) {
        let c = classify_b_index(x);
        let expected = if x >= 70.0 { BiodegClass::Highly } else if x >= 50.0 { BiodegClass::Moderately } else if x >= 30.0 { BiodegClass::Slowly } else { BiodegClass::Recalcitrant };
        prop_assert_eq!(c, expected);
    }
}
