use proptest::prelude::*;
use strata::perm::Permutation;
use strata::surface::{
    one_cylinder_suspension, perm_profile, spin_parity_perm, spin_parity_surface, suspend, SquareTiledSurface, Step,
};

fn admissible(m: usize) -> impl Iterator<Item = Permutation> {
    Permutation::all(m).filter(|p| p.is_irreducible() && !p.is_degenerate().unwrap())
}

fn row_cores(s: &SquareTiledSurface) -> Vec<(usize, usize)> {
    let mut seen = vec![false; s.n_squares()];
    let mut out = Vec::new();
    for start in 0..s.n_squares() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        loop {
            seen[cur] = true;
            len += 1;
            cur = s.h(cur);
            if cur == start {
                break;
            }
        }
        out.push((start, len));
    }
    out
}

#[test]
fn genus_agrees_three_ways() {
    for m in 4..=8 {
        for p in admissible(m) {
            let s = suspend(&p).unwrap();
            let profile = s.singularity_profile();
            assert_eq!(profile.stratum(), perm_profile(&p).unwrap().stratum(), "{p}");
            let degree_sum: u32 = profile.degrees().iter().sum();
            let from_euler = (2 - s.euler_characteristic()) / 2;
            let from_rank = p.omega_rank() as i64 / 2;
            assert_eq!(2 * from_euler - 2, degree_sum as i64, "{p}");
            assert_eq!(from_euler, from_rank, "{p}");
            let zeros = perm_profile(&p).unwrap().degrees().len();
            assert_eq!(m as i64, 2 * from_rank + zeros as i64 - 1, "{p}");
        }
    }
}

#[test]
fn cylinder_cores_have_winding_zero() {
    for m in 4..=7 {
        for p in admissible(m) {
            let mut surfaces = vec![suspend(&p).unwrap()];
            if p.is_standard() {
                surfaces.push(one_cylinder_suspension(&p).unwrap());
            }
            for s in surfaces {
                for (start, len) in row_cores(&s) {
                    assert_eq!(s.winding_number(start, &vec![Step::East; len]).unwrap(), 0, "{p}");
                }
            }
        }
    }
}

#[test]
fn torus_is_odd() {
    assert_eq!(spin_parity_surface(&SquareTiledSurface::torus()).unwrap(), 1);
}

#[test]
fn hyperelliptic_parity_law() {
    for g in 2..=6u32 {
        let p = Permutation::reversal(2 * g as usize);
        assert_eq!(spin_parity_perm(&p).unwrap(), (g.div_ceil(2) % 2) as u8, "g={g}");
    }
}

fn even_admissible() -> impl Strategy<Value = Permutation> {
    (4usize..=9)
        .prop_flat_map(|m| Just((1..=m).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
        .prop_filter("admissible with even profile", |p| {
            p.is_irreducible() && !p.is_degenerate().unwrap() && perm_profile(p).unwrap().all_even()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn parity_routes_agree(p in even_admissible()) {
        prop_assert_eq!(spin_parity_perm(&p).unwrap(), spin_parity_surface(&suspend(&p).unwrap()).unwrap());
    }

    #[test]
    fn json_round_trip(p in even_admissible()) {
        let s = suspend(&p).unwrap();
        prop_assert_eq!(SquareTiledSurface::from_json(&s.to_json()).unwrap(), s);
    }
}
