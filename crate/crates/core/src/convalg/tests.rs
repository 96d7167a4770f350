use proptest::prelude::*;

use super::*;
use crate::repring::{CocycleSpec, GroupSpec};

fn finite(name: &str) -> RepRingSpec {
    RepRingSpec::Finite { group: GroupSpec::Named(name.into()) }
}

fn klein_twisted() -> RepRingSpec {
    RepRingSpec::TwistedFinite {
        group: GroupSpec::Named("V4".into()),
        cocycle: CocycleSpec::Bilinear { modulus: 2, matrix: vec![vec![0, 1], vec![0, 0]] },
    }
}

fn terms(alg: &ConvAlgebra, p: &Product) -> Vec<(String, u64)> {
    p.terms.iter().map(|&(k, c)| (alg.label(k), c)).collect()
}

/// Mackey products against the oracle, plus unit and associativity.
fn check_algebra(alg: &ConvAlgebra) {
    for i in 0..alg.len() {
        for j in 0..alg.len() {
            assert_eq!(alg.convolve(i, j).unwrap(), alg.convolve_oracle(i, j).unwrap(), "{} * {}", alg.label(i), alg.label(j));
        }
    }
    let b = alg.to_based().unwrap();
    assert_eq!(b.unit_check().unwrap(), 2 * alg.len());
    let (count, bad) = b.associativity();
    assert!(bad.is_empty());
    assert_eq!(count, alg.len().pow(3));
}

#[test]
fn sl2_two_points() {
    let alg = ConvAlgebra::build(&RepRingSpec::Sl2, &CentrallyExtendedSet::trivial(2), 4).unwrap();
    assert_eq!(alg.len(), 20);
    let e01v1 = alg.find(alg.orbit_of(0, 1), &[1]).unwrap();
    let e10v1 = alg.find(alg.orbit_of(1, 0), &[1]).unwrap();
    let p = alg.convolve(e01v1, e10v1).unwrap();
    assert_eq!(terms(&alg, &p), vec![("E_00⊗V(0)".into(), 1), ("E_00⊗V(2)".into(), 1)]);
    assert!(p.complete);
    assert!(alg.convolve(e01v1, e01v1).unwrap().terms.is_empty());
    let unit = alg.identity_element();
    assert_eq!(unit.iter().map(|&k| alg.label(k)).collect::<Vec<_>>(), vec!["E_00⊗V(0)", "E_11⊗V(0)"]);
    let v4 = alg.find(alg.orbit_of(0, 0), &[4]).unwrap();
    assert!(!alg.convolve(v4, v4).unwrap().complete);
    let b = alg.to_based().unwrap();
    assert!(b.unit_check().unwrap() > 0);
    let (count, bad) = b.associativity();
    assert!(count > 0 && bad.is_empty());
}

#[test]
fn trivial_group_gives_matrix_units() {
    let n = 3;
    let alg = ConvAlgebra::build(&finite("trivial"), &CentrallyExtendedSet::trivial(n), 0).unwrap();
    assert_eq!(alg.len(), n * n);
    for i in 0..alg.len() {
        for j in 0..alg.len() {
            let (a, b) = (&alg.basis()[i], &alg.basis()[j]);
            let expect = if a.target == b.source { vec![(alg.find(alg.orbit_of(a.source, b.target), &[0, 0]).unwrap(), 1)] } else { vec![] };
            assert_eq!(alg.convolve(i, j).unwrap().terms, expect);
        }
    }
    assert_eq!(alg.identity_element().len(), n);
    check_algebra(&alg);
}

#[test]
fn s3_on_two_cosets_of_a3() {
    let g = FiniteGroup::named("S3").unwrap();
    let c = (0..g.order()).find(|&x| g.element_order(x) == 3).unwrap();
    let set = CentrallyExtendedSet::from_cosets(&g, &[(vec![c], 0)]);
    assert_eq!(set.size, 2);
    let alg = ConvAlgebra::build(&finite("S3"), &set, 0).unwrap();
    // the diagonal and the off-diagonal orbit, each with stabilizer A3
    assert_eq!(alg.orbits().len(), 2);
    assert!(alg.orbits().iter().all(|o| o.stabilizer.len() == 3 && o.size == 2));
    assert_eq!(alg.len(), 6);
    assert_eq!(alg.identity_element().len(), 1);
    check_algebra(&alg);
}

#[test]
fn trivial_action_is_matrices_over_the_fusion_ring() {
    let spec = finite("S3");
    let alg = ConvAlgebra::build(&spec, &CentrallyExtendedSet::trivial(2), 0).unwrap();
    let ring = RepRing::from_spec(&spec).unwrap();
    assert_eq!(alg.len(), 12);
    for i in 0..alg.len() {
        for j in 0..alg.len() {
            let (a, b) = (&alg.basis()[i], &alg.basis()[j]);
            let got = alg.convolve(i, j).unwrap();
            if a.target != b.source {
                assert!(got.terms.is_empty());
                continue;
            }
            let o = alg.orbit_of(a.source, b.target);
            let mut expect: Vec<(usize, u64)> = ring
                .tensor_decompose(&a.irrep, &b.irrep)
                .unwrap()
                .into_iter()
                .map(|(v, m)| (alg.find(o, &v.label).unwrap(), m))
                .collect();
            expect.sort_unstable();
            assert_eq!(got.terms, expect);
        }
    }
}

#[test]
fn all_small_actions_agree_with_the_oracle() {
    for name in ["S3", "Z2"] {
        let g = FiniteGroup::named(name).unwrap();
        for size in 1..=3 {
            let actions = all_actions(&g, size);
            assert!(!actions.is_empty());
            for imgs in actions {
                let set = CentrallyExtendedSet { size, action: Action::Generators(imgs), degrees: Vec::new() };
                check_algebra(&ConvAlgebra::build(&finite(name), &set, 0).unwrap());
            }
        }
    }
}

#[test]
fn action_counts() {
    // homomorphisms Z/2 → S_n number the involutions plus one
    let z2 = FiniteGroup::named("Z2").unwrap();
    assert_eq!(all_actions(&z2, 3).len(), 4);
    let s3 = FiniteGroup::named("S3").unwrap();
    // S3 → S3: trivial, three through the sign, six automorphisms
    assert_eq!(all_actions(&s3, 3).len(), 10);
}

#[test]
fn twisted_klein_points() {
    let set = CentrallyExtendedSet::trivial(2).with_degrees(vec![0, 1]);
    let alg = ConvAlgebra::build(&klein_twisted(), &set, 0).unwrap();
    // four characters on each diagonal orbit, one projective irreducible
    // of dimension 2 on each off-diagonal orbit
    assert_eq!(alg.len(), 10);
    let off = alg.find(alg.orbit_of(0, 1), &[alg.basis().iter().find(|b| b.source == 0 && b.target == 1).unwrap().irrep.label[0], 1]).unwrap();
    assert_eq!(alg.basis()[off].irrep.dim, 2);
    let back = alg.basis().iter().position(|b| b.source == 1 && b.target == 0).unwrap();
    let p = alg.convolve(off, back).unwrap();
    assert_eq!(p.terms.len(), 4);
    assert!(p.terms.iter().all(|t| t.1 == 1));
    check_algebra(&alg);
}

#[test]
fn twisted_klein_actions_agree_with_the_oracle() {
    let g = FiniteGroup::named("V4").unwrap();
    for size in 1..=3 {
        for imgs in all_actions(&g, size) {
            let base = CentrallyExtendedSet { size, action: Action::Generators(imgs), degrees: Vec::new() };
            let untwisted = ConvAlgebra::build(&klein_twisted(), &base, 0).unwrap();
            // every degree assignment constant on point orbits
            let orbit_count = untwisted.point_orbit.iter().max().unwrap() + 1;
            for mask in 0..1u32 << orbit_count {
                let degrees = untwisted.point_orbit.iter().map(|&o| (mask >> o) & 1).collect();
                let set = base.clone().with_degrees(degrees);
                check_algebra(&ConvAlgebra::build(&klein_twisted(), &set, 0).unwrap());
            }
        }
    }
}

#[test]
fn rejections() {
    let swap = CentrallyExtendedSet { size: 2, action: Action::Generators(vec![vec![1, 0]]), degrees: Vec::new() };
    assert!(matches!(ConvAlgebra::build(&RepRingSpec::Sl2, &swap, 2), Err(Error::Config(_))));
    let z3 = CentrallyExtendedSet { size: 2, action: Action::Generators(vec![vec![1, 0]]), degrees: Vec::new() };
    assert!(ConvAlgebra::build(&finite("Z3"), &z3, 0).is_err());
    let mixed = swap.clone().with_degrees(vec![0, 1]);
    assert!(matches!(ConvAlgebra::build(&klein_twisted(), &mixed, 0), Err(Error::Config(_)) | Err(Error::CocycleDegree(_))));
    assert!(ConvAlgebra::build(&finite("Z2"), &CentrallyExtendedSet::trivial(1).with_degrees(vec![1]), 0).is_err());
}

#[test]
fn pgl2_twisted_point() {
    let set = CentrallyExtendedSet::trivial(2).with_degrees(vec![0, 1]);
    let alg = ConvAlgebra::build(&RepRingSpec::Pgl2, &set, 6).unwrap();
    // even weights on the diagonal, odd weights off it
    assert_eq!(alg.len(), 4 + 4 + 3 + 3);
    for b in alg.basis() {
        assert_eq!((b.irrep.label[0] % 2 == 1), b.source != b.target);
    }
    let b = alg.to_based().unwrap();
    assert!(b.associativity().1.is_empty());
}

#[test]
fn target_json_round_trip() {
    let t = ConvTarget { group: RepRingSpec::Sl2, set: CentrallyExtendedSet::trivial(2) };
    let s = serde_json::to_string(&t).unwrap();
    assert_eq!(s, r#"{"group":{"kind":"sl2"},"set":{"size":2,"action":"trivial"}}"#);
    assert_eq!(serde_json::from_str::<ConvTarget>(&s).unwrap(), t);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A cyclic group acting through one permutation.
    #[test]
    fn cyclic_actions_agree_with_the_oracle(perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle()) {
        let mut order = 1;
        let mut cur = perm.clone();
        while cur.iter().enumerate().any(|(i, &j)| i != j) {
            cur = cur.iter().map(|&i| perm[i]).collect();
            order += 1;
        }
        let name = format!("Z{}", order.max(2));
        let g = FiniteGroup::named(&name).unwrap();
        prop_assume!(g.generators().len() == 1);
        let set = CentrallyExtendedSet { size: 4, action: Action::Generators(vec![perm]), degrees: Vec::new() };
        let alg = ConvAlgebra::build(&finite(&name), &set, 0).unwrap();
        for i in 0..alg.len() {
            for j in 0..alg.len() {
                prop_assert_eq!(alg.convolve(i, j).unwrap(), alg.convolve_oracle(i, j).unwrap());
            }
        }
        let b = alg.to_based().unwrap();
        prop_assert!(b.associativity().1.is_empty());
        prop_assert_eq!(b.unit_check().unwrap(), 2 * alg.len());
    }
}
