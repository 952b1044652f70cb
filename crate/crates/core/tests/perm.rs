use proptest::prelude::*;
use strata::perm::Permutation;
use strata::surface::perm_profile;

fn irreducible(max_m: usize) -> impl Strategy<Value = Permutation> {
    (2..=max_m)
        .prop_flat_map(|m| Just((1..=m).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
        .prop_filter("irreducible", |p| p.is_irreducible())
}

#[derive(Clone, Copy, Debug)]
enum Move {
    A,
    B,
    Ad,
}

fn apply(p: &Permutation, mv: Move) -> Permutation {
    match mv {
        Move::A => p.rauzy_a().unwrap(),
        Move::B => p.rauzy_b().unwrap(),
        Move::Ad => p.ad_pi0(),
    }
}

proptest! {
    #[test]
    fn inverse_relation(p in irreducible(10)) {
        prop_assert_eq!(p.rauzy_a().unwrap().inverse(), p.inverse().rauzy_b().unwrap());
    }

    #[test]
    fn ad_conjugates_omega_up_to_transpose(p in irreducible(10)) {
        let m = p.len();
        let w = p.omega();
        let v = p.ad_pi0().omega();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(v.get(i, j), w.get(m - 1 - j, m - 1 - i));
            }
        }
        prop_assert_eq!(v.rank(), w.rank());
        prop_assert!(w.is_skew_symmetric());
    }

    #[test]
    fn moves_preserve_nondegeneracy(
        p in irreducible(9),
        moves in prop::collection::vec(prop_oneof![Just(Move::A), Just(Move::B), Just(Move::Ad)], 1..40),
    ) {
        prop_assume!(p.len() >= 4);
        prop_assume!(!p.is_degenerate().unwrap());
        prop_assume!(!perm_profile(&p).unwrap().has_marked_points());
        let mut cur = p;
        for mv in moves {
            cur = apply(&cur, mv);
            prop_assert!(!cur.is_degenerate().unwrap(), "{} became degenerate", cur);
        }
    }
}

#[test]
fn rauzy_maps_are_bijections() {
    for m in 2..=7 {
        let all: Vec<Permutation> = Permutation::all(m).filter(|p| p.is_irreducible()).collect();
        let mut images_a = Vec::new();
        let mut images_b = Vec::new();
        for p in &all {
            let a = p.rauzy_a().unwrap();
            let b = p.rauzy_b().unwrap();
            assert!(a.is_irreducible() && b.is_irreducible());
            assert_eq!(&a.rauzy_a_inverse().unwrap(), p);
            assert_eq!(&b.rauzy_b_inverse().unwrap(), p);
            assert_eq!(&p.rauzy_a_inverse().unwrap().rauzy_a().unwrap(), p);
            assert_eq!(&p.rauzy_b_inverse().unwrap().rauzy_b().unwrap(), p);
            images_a.push(a);
            images_b.push(b);
        }
        images_a.sort();
        images_a.dedup();
        images_b.sort();
        images_b.dedup();
        assert_eq!(images_a.len(), all.len(), "m={m}");
        assert_eq!(images_b.len(), all.len(), "m={m}");
    }
}

#[test]
fn omega_rank_is_even() {
    for m in 2..=8 {
        for p in Permutation::all(m).filter(|p| p.is_irreducible()) {
            if m >= 4 && p.is_degenerate().unwrap() {
                continue;
            }
            assert_eq!(p.omega_rank() % 2, 0, "{p}");
        }
    }
}
