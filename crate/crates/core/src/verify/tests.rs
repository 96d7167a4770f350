use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::convalg::CentrallyExtendedSet;
use crate::hecke::KlTable;
use crate::repring::{GroupSpec, RepRingSpec};
use crate::weyl::{Ball, RootDatum};

fn analysis(spec: &str, radius: usize, extended: bool) -> CellAnalysis {
    let d = Arc::new(RootDatum::from_spec(spec).unwrap());
    let ball = Arc::new(Ball::new(d, radius, extended).unwrap());
    CellAnalysis::build(Arc::new(KlTable::build(ball).unwrap())).unwrap()
}

fn lowest(an: &CellAnalysis, bound: u64) -> BasedAlgebra {
    BasedAlgebra::from_cell(an, CellSelector::Lowest.resolve(an).unwrap(), bound).unwrap()
}

fn target(group: RepRingSpec, set: CentrallyExtendedSet, bound: u64) -> BasedAlgebra {
    ConvAlgebra::build(&group, &set, bound).unwrap().to_based().unwrap()
}

fn pgl2_pair(bound: u64) -> BasedAlgebra {
    target(RepRingSpec::Pgl2, CentrallyExtendedSet::trivial(2).with_degrees(vec![0, 1]), bound)
}

/// `w ↦ E_ij ⊗ V(ℓ(w) − 1)` with `i`, `j` the first and last letters.
fn letter_map(j: &BasedAlgebra, k: &BasedAlgebra) -> Vec<usize> {
    j.labels
        .iter()
        .map(|w| {
            let (first, last) = (&w[1..2], &w[w.len() - 1..]);
            let label = format!("E_{first}{last}⊗V({})", w.len() / 2 - 1);
            k.labels.iter().position(|l| *l == label).unwrap()
        })
        .collect()
}

#[test]
fn identity_bijection_is_consistent() {
    let an = analysis("A1:sc", 12, true);
    let j = lowest(&an, 6);
    let k = target(RepRingSpec::Sl2, CentrallyExtendedSet::trivial(2), 6);
    for alg in [&j, &k, &j.opposite()] {
        let id: Vec<usize> = (0..alg.len()).collect();
        let r = iso_check(alg, alg, &id).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert!(r.checked_triples > 0);
    }
    assert_eq!(j.opposite().opposite(), BasedAlgebra { name: format!("{}^op^op", j.name), ..j.clone() });
}

#[test]
fn truncated_a1_cell_shape() {
    let an = analysis("A1:sc", 12, true);
    let j = lowest(&an, 6);
    assert_eq!(j.len(), 28);
    assert_eq!(j.row_names.len(), 2);
    assert_eq!(j.distinguished.iter().map(|&d| j.labels[d].as_str()).collect::<Vec<_>>(), vec!["s0", "s1"]);
    assert!(j.unit_check().unwrap() > 0);
    let (count, bad) = j.associativity();
    assert!(count > 0 && bad.is_empty());
    assert!(matches!(BasedAlgebra::from_cell(&an, CellSelector::Lowest.resolve(&an).unwrap(), 8), Err(Error::Unstabilized(_))));
}

#[test]
fn letter_bijection_is_consistent() {
    let an = analysis("A1:sc", 12, false);
    let j = lowest(&an, 6);
    let k = pgl2_pair(6);
    assert_eq!((j.len(), k.len()), (14, 14));
    let bij = letter_map(&j, &k);
    let r = iso_check(&j, &k, &bij).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.mismatches);
    // the search finds the same map
    let found = iso_search(&j, &k, SearchLimits::default()).unwrap();
    assert_eq!(found.verdict, Verdict::Consistent);
    assert_eq!(found.bijection, r.bijection);
    // inverting the bijection gives the same comparison
    let mut inv = vec![0; bij.len()];
    for (i, &b) in bij.iter().enumerate() {
        inv[b] = i;
    }
    let back = iso_check(&k, &j, &inv).unwrap();
    assert_eq!((back.verdict, back.checked_triples), (r.verdict, r.checked_triples));
}

#[test]
fn wrong_bijections() {
    let an = analysis("A1:sc", 12, false);
    let j = lowest(&an, 6);
    let k = pgl2_pair(6);
    let bij = letter_map(&j, &k);
    let at = |w: &str| j.labels.iter().position(|l| l == w).unwrap();
    let (s0, s0s1s0, s0s1s0s1s0) = (at("s0"), at("s0s1s0"), at("s0s1s0s1s0"));
    // a distinguished involution sent off the diagonal
    let mut off = bij.clone();
    let s0s1 = at("s0s1");
    off.swap(s0, s0s1);
    assert!(matches!(iso_check(&j, &k, &off), Err(Error::Config(_))));
    // partitions respected, constants not
    let mut swapped = bij.clone();
    swapped.swap(s0s1s0, s0s1s0s1s0);
    let r = iso_check(&j, &k, &swapped).unwrap();
    assert_eq!(r.verdict, Verdict::RefutedOnBall);
    assert!(!r.mismatches.is_empty());
    assert!(r.mismatches.iter().all(|m| m.source != m.target));
}

#[test]
fn searches_that_fail() {
    let an = analysis("A1:sc", 12, true);
    let j = lowest(&an, 6);
    let k3 = target(RepRingSpec::Sl2, CentrallyExtendedSet::trivial(3), 6);
    assert_eq!(iso_search(&j, &k3, SearchLimits::default()).unwrap().verdict, Verdict::Exhausted);
    // same size, different grading
    let torus = target(RepRingSpec::Torus { rank: 1 }, CentrallyExtendedSet::trivial(2), 3);
    assert_eq!(torus.len(), j.len());
    assert_eq!(iso_search(&j, &torus, SearchLimits::default()).unwrap().verdict, Verdict::Exhausted);
}

#[test]
fn identity_cell_against_one_point() {
    let an = analysis("A1:sc", 8, false);
    let t = ConvTarget {
        group: RepRingSpec::Finite { group: GroupSpec::Named("trivial".into()) },
        set: CentrallyExtendedSet::trivial(1),
    };
    let r = conjecture_harness(&an, CellSelector::Identity, &t, 0, SearchLimits::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert_eq!(r.bijection, vec![("e".to_string(), "O0(0,0)⊗χ0".to_string())]);
    // with the length-zero elements the cell of e is the group ring of Ω
    let an = analysis("A1:sc", 8, true);
    let t = ConvTarget { group: RepRingSpec::Finite { group: GroupSpec::Named("Z2".into()) }, set: t.set };
    let r = conjecture_harness(&an, CellSelector::Identity, &t, 0, SearchLimits::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert_eq!(r.bijection.len(), 2);
}

#[test]
fn lowest_cell_harness() {
    let an = analysis("A1:sc", 12, true);
    let t = ConvTarget { group: RepRingSpec::Sl2, set: CentrallyExtendedSet::trivial(2) };
    let r = conjecture_harness(&an, CellSelector::Lowest, &t, 6, SearchLimits::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert_eq!(r.convention, "opposite");
    assert_eq!(r.bijection.len(), 28);
    // rows of the opposite algebra are left cells; they land on points
    assert_eq!(r.row_map.len(), 2);
    assert!(r.row_map.iter().all(|(l, x)| l.starts_with('L') && x.starts_with('x')));
    let again = conjecture_harness(&an, CellSelector::Lowest, &t, 6, SearchLimits::default()).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    let unext = analysis("A1:sc", 12, false);
    let twisted = ConvTarget { group: RepRingSpec::Pgl2, set: CentrallyExtendedSet::trivial(2).with_degrees(vec![0, 1]) };
    let r = conjecture_harness(&unext, CellSelector::Lowest, &twisted, 6, SearchLimits::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
}

#[test]
fn selector_parsing() {
    assert_eq!("lowest".parse::<CellSelector>().unwrap(), CellSelector::Lowest);
    assert_eq!("e".parse::<CellSelector>().unwrap(), CellSelector::Identity);
    assert_eq!("3".parse::<CellSelector>().unwrap(), CellSelector::Index(3));
    assert!("top".parse::<CellSelector>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Any bijection that preserves the blocks gives the same verdict and
    /// triple count read in either direction.
    #[test]
    fn check_is_symmetric(seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let k = target(RepRingSpec::Sl2, CentrallyExtendedSet::trivial(2), 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut bij: Vec<usize> = (0..k.len()).collect();
        // shuffle inside the non-distinguished elements of each block
        let mut blocks: BTreeMap<(usize, usize, bool), Vec<usize>> = BTreeMap::new();
        for i in 0..k.len() {
            blocks.entry((k.rows[i], k.cols[i], k.is_distinguished(i))).or_default().push(i);
        }
        for members in blocks.values() {
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            for (a, b) in members.iter().zip(shuffled) {
                bij[*a] = b;
            }
        }
        let mut inv = vec![0; bij.len()];
        for (i, &b) in bij.iter().enumerate() {
            inv[b] = i;
        }
        let r = iso_check(&k, &k, &bij).unwrap();
        let s = iso_check(&k, &k, &inv).unwrap();
        prop_assert_eq!(r.verdict, s.verdict);
        prop_assert_eq!(r.checked_triples, s.checked_triples);
        prop_assert_eq!(r.mismatches.len(), s.mismatches.len());
        prop_assert_eq!(r.verdict == Verdict::Consistent, bij.iter().enumerate().all(|(i, &b)| i == b));
    }
}
