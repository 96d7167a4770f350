use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::*;
use crate::cache::KlCache;
use crate::weyl::Ball;

fn lp(terms: &[(i32, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().copied())
}

fn setup(spec: &str, radius: usize, extended: bool) -> Arc<KlTable> {
    let d = Arc::new(RootDatum::from_spec(spec).unwrap());
    let ball = Arc::new(Ball::new(d, radius, extended).unwrap());
    Arc::new(KlTable::build(ball).unwrap())
}

// C_w from scratch: C_s C_u, then clear every coefficient outside v⁻¹ℤ[v⁻¹]
// top-down by subtracting bar-invariant multiples of shorter C_y.
fn kl_oracle(d: &RootDatum, ball: &Ball) -> HashMap<usize, HeckeElt> {
    let mut out: HashMap<usize, HeckeElt> = HashMap::new();
    for w in 0..ball.len() {
        let c = if ball.length(w) == 0 {
            HeckeElt::basis(ball.element(w))
        } else {
            let i = ball.left_descents(w)[0];
            let u = ball.left_mul(i, w).unwrap();
            let s = ball.datum().generators()[i];
            let cs = {
                let mut e = HeckeElt::basis(s);
                e.add_term(d.identity(), &LaurentPoly::monomial(1, -1));
                e
            };
            let mut x = h_mul(d, &cs, &out[&u]);
            loop {
                let bad = x
                    .iter()
                    .filter(|(y, p)| **y != ball.element(w) && p.max_degree().unwrap() >= 0)
                    .max_by_key(|(y, _)| (d.length(y), **y))
                    .map(|(y, p)| (*y, p.clone()));
                let Some((y, p)) = bad else { break };
                // bar-invariant part carrying the nonnegative degrees
                let pos: Vec<(i32, i64)> = p.terms().iter().filter(|t| t.0 >= 0).copied().collect();
                let mut b = LaurentPoly::from_terms(pos.iter().copied());
                for &(e, c) in &pos {
                    if e > 0 {
                        b.add_scaled(&LaurentPoly::monomial(c, -e), 1, 0);
                    }
                }
                let cy = &out[&ball.id_of(&y).unwrap()];
                x.add_assign_scaled(cy, &b.scale(-1));
            }
            x
        };
        out.insert(w, c);
    }
    out
}

#[test]
fn quadratic_relation() {
    let d = RootDatum::from_spec("A1:sc").unwrap();
    for s in d.generators() {
        let hs = HeckeElt::basis(*s);
        let sq = h_mul(&d, &hs, &hs);
        let mut expect = HeckeElt::basis(d.identity());
        expect.add_term(*s, &lp(&[(1, 1), (-1, -1)]));
        assert_eq!(sq, expect);
    }
}

#[test]
fn length_additive_products() {
    let d = RootDatum::from_spec("A2:sc").unwrap();
    let ball = Ball::new(Arc::new(d.clone()), 4, true).unwrap();
    for x in ball.elements() {
        for y in ball.elements() {
            let xy = d.mul(x, y);
            if d.length(&xy) == d.length(x) + d.length(y) {
                assert_eq!(h_mul(&d, &HeckeElt::basis(*x), &HeckeElt::basis(*y)), HeckeElt::basis(xy));
            }
        }
    }
    let a = HeckeElt::monomial(ball.element(5), lp(&[(2, 3), (-1, 1)]));
    assert_eq!(h_mul(&d, &HeckeElt::basis(d.identity()), &a), a);
}

#[test]
fn bar_examples() {
    let d = RootDatum::from_spec("A1:sc").unwrap();
    let e = HeckeElt::basis(d.identity());
    assert_eq!(bar(&d, &e), e);
    let s = d.generators()[0];
    let mut expect = HeckeElt::basis(s);
    expect.add_term(d.identity(), &lp(&[(-1, 1), (1, -1)]));
    assert_eq!(bar(&d, &HeckeElt::basis(s)), expect);
    // bar is an involutive ring homomorphism
    let ball = Ball::new(Arc::new(d.clone()), 3, true).unwrap();
    for x in ball.elements() {
        let hx = HeckeElt::monomial(*x, lp(&[(1, 2), (-2, 1)]));
        assert_eq!(bar(&d, &bar(&d, &hx)), hx);
        for y in ball.elements() {
            let hy = HeckeElt::basis(*y);
            assert_eq!(bar(&d, &h_mul(&d, &hx, &hy)), h_mul(&d, &bar(&d, &hx), &bar(&d, &hy)));
        }
    }
}

#[test]
fn kl_examples() {
    let kl = setup("A1:sc", 4, false);
    let ball = kl.ball();
    let d = ball.datum();
    assert_eq!(kl.kl_element(0), HeckeElt::basis(d.identity()));
    let s0 = ball.id_of_word("s0").unwrap();
    let mut cs = HeckeElt::basis(ball.element(s0));
    cs.add_term(d.identity(), &lp(&[(-1, 1)]));
    assert_eq!(kl.kl_element(s0), cs);

    let w = ball.id_of_word("s0s1").unwrap();
    let mut expect = HeckeElt::basis(ball.element(w));
    for y in ["s0", "s1"] {
        expect.add_term(d.parse_word(y).unwrap(), &lp(&[(-1, 1)]));
    }
    expect.add_term(d.identity(), &lp(&[(-2, 1)]));
    assert_eq!(kl.kl_element(w), expect);
    let w3 = ball.id_of_word("s0s1s0").unwrap();
    assert_eq!(kl.p(0, w3), lp(&[(3, 1)]));
}

#[test]
fn kl_matches_oracle() {
    for (spec, radius) in [("A1:sc", 7), ("A2:sc", 5), ("B2:sc", 5), ("G2:sc", 6), ("A1xA1:sc", 4)] {
        let kl = setup(spec, radius, true);
        let ball = kl.ball();
        let d = ball.datum();
        let oracle = kl_oracle(d, ball);
        for w in 0..ball.len() {
            assert_eq!(kl.kl_element(w), oracle[&w], "{spec} {}", ball.word(w));
        }
    }
}

#[test]
fn kl_invariants() {
    for (spec, radius) in [("A2:sc", 7), ("C2:sc", 7), ("GL3", 5)] {
        let extended = !spec.starts_with("GL");
        let kl = setup(spec, radius, extended);
        let ball = kl.ball();
        let d = ball.datum();
        for w in 0..ball.len() {
            let c = kl.kl_element(w);
            assert_eq!(bar(d, &c), c, "{spec} C_{} not bar-invariant", ball.word(w));
            for (y, p) in kl.column(w) {
                assert!(p.all_nonnegative());
                if *y != w {
                    assert!(ball.bruhat_leq(*y, w));
                    assert!(p.min_degree().unwrap() >= 1);
                    assert!(p.max_degree().unwrap() <= (ball.length(w) - ball.length(*y)) as i32);
                }
            }
        }
    }
}

#[test]
fn structure_constant_examples() {
    let kl = setup("A1:sc", 6, true);
    let st = StructureTable::build(kl.clone(), 6).unwrap();
    let ball = kl.ball();
    for s in ["s0", "s1"] {
        let s = ball.id_of_word(s).unwrap();
        assert_eq!(st.product(s, s).unwrap(), &[(s, LaurentPoly::quantum_two())]);
    }
    for y in 0..ball.len() {
        if ball.length(y) <= 6 {
            assert_eq!(st.product(0, y).unwrap(), &[(y, LaurentPoly::one())]);
        }
    }
    let (s0, s1) = (ball.id_of_word("s0").unwrap(), ball.id_of_word("s1").unwrap());
    let s0s1 = ball.id_of_word("s0s1").unwrap();
    assert_eq!(st.product(s0, s1).unwrap(), &[(s0s1, LaurentPoly::one())]);
    assert!(st.product(ball.id_of_word("s0s1s0").unwrap(), ball.id_of_word("s1s0s1s0").unwrap()).is_none());
}

#[test]
fn structure_constants_two_routes_agree() {
    for (spec, radius) in [("A1:sc", 6), ("A2:sc", 4), ("B2:sc", 4)] {
        let kl = setup(spec, radius, true);
        let st = StructureTable::build(kl.clone(), radius).unwrap();
        let pairs = st.complete_pairs();
        assert!(!pairs.is_empty());
        for (x, y) in pairs {
            let (direct, complete) = structure_constants_direct(&kl, x, y).unwrap();
            assert!(complete);
            assert_eq!(st.product(x, y).unwrap(), &direct[..]);
        }
    }
}

#[test]
fn direct_route_flags_overflow() {
    let kl = setup("A1:sc", 3, false);
    let ball = kl.ball();
    let (x, y) = (ball.id_of_word("s0s1").unwrap(), ball.id_of_word("s0s1").unwrap());
    let (_, complete) = structure_constants_direct(&kl, x, y).unwrap();
    assert!(!complete);
}

type GroupAlg = BTreeMap<WeylElement, i64>;

fn at_one(e: &HeckeElt) -> GroupAlg {
    e.iter().map(|(w, p)| (*w, p.eval_one())).filter(|t| t.1 != 0).collect()
}

#[test]
fn specialisation_at_one() {
    for radius in 1..=8 {
        let kl = setup("A1:sc", radius, true);
        let st = StructureTable::build(kl.clone(), radius).unwrap();
        let ball = kl.ball();
        let d = ball.datum();
        for (x, y) in st.complete_pairs() {
            let cx = at_one(&kl.kl_element(x));
            let cy = at_one(&kl.kl_element(y));
            let mut lhs = GroupAlg::new();
            for (a, ca) in &cx {
                for (b, cb) in &cy {
                    *lhs.entry(d.mul(a, b)).or_default() += ca * cb;
                }
            }
            lhs.retain(|_, c| *c != 0);
            let mut rhs = GroupAlg::new();
            for (z, h) in st.product(x, y).unwrap() {
                for (w, c) in at_one(&kl.kl_element(*z)) {
                    *rhs.entry(w).or_default() += h.eval_one() * c;
                }
            }
            rhs.retain(|_, c| *c != 0);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn cache_replay_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = Arc::new(RootDatum::from_spec("B2:sc").unwrap());
    let ball = Arc::new(Ball::new(d.clone(), 6, true).unwrap());
    let mut cache = KlCache::open(dir.path(), &d.spec_string()).unwrap();
    let cold = KlTable::build_with_cache(ball.clone(), &mut cache).unwrap();
    assert_eq!(cold.loaded_from_cache(), 0);
    let mut cache = KlCache::open(dir.path(), &d.spec_string()).unwrap();
    let small = Arc::new(Ball::new(d.clone(), 4, true).unwrap());
    let warm_small = KlTable::build_with_cache(small.clone(), &mut cache).unwrap();
    assert_eq!(warm_small.loaded_from_cache(), small.core_ids().len());
    let warm = KlTable::build_with_cache(ball.clone(), &mut cache).unwrap();
    assert_eq!(warm.loaded_from_cache(), ball.core_ids().len());
    for w in 0..ball.len() {
        assert_eq!(cold.column(w), warm.column(w));
        assert_eq!(cold.mu_down(w), warm.mu_down(w));
    }
    let fresh = KlTable::build(ball.clone()).unwrap();
    for w in 0..ball.len() {
        assert_eq!(fresh.column(w), warm.column(w));
    }
}
