use rand::{Rng, SeedableRng};
use strata::classify::{classify_surface, ComponentTag};
use strata::diagram::{DiagramError, DiagramKind, SeparatrixDiagram};
use strata::perm::Permutation;
use strata::rauzy::{census_classes, CensusOptions};
use strata::surface::{one_cylinder_suspension, spin_parity_surface, suspend, SquareTiledSurface};

fn torus() -> SeparatrixDiagram {
    SeparatrixDiagram::one_vertex(2, &[(0, 1)], &[(0, 1)]).unwrap()
}

fn three_loops() -> SeparatrixDiagram {
    SeparatrixDiagram::one_vertex(6, &[(2, 3), (0, 5), (4, 1)], &[(2, 5), (0, 3)]).unwrap()
}

fn glue(d: &SeparatrixDiagram) -> SquareTiledSurface {
    let lengths = d.realizability().integer_lengths().expect("realizable");
    let k = d.cylinder_count();
    d.diagram_to_surface(&lengths, &vec![1; k], &vec![0; k]).unwrap()
}

fn parity(d: &SeparatrixDiagram) -> u8 {
    spin_parity_surface(&glue(d)).unwrap()
}

fn canonical() -> Vec<SeparatrixDiagram> {
    let mut out = vec![torus()];
    for g in 2..=5 {
        for kind in [DiagramKind::H, DiagramKind::O, DiagramKind::E] {
            if let Ok(d) = SeparatrixDiagram::make_canonical(kind, g) {
                out.push(d);
            }
        }
    }
    out
}

/// Pair whose two faces are exactly the loops `e` and `e + 1`.
fn petal_pair(d: &SeparatrixDiagram, e: usize) -> usize {
    (0..d.cylinder_count())
        .find(|&i| {
            let (p, n) = d.pairing()[i];
            let mut faces = [d.faces()[p].edges.clone(), d.faces()[n].edges.clone()];
            faces.sort();
            faces == [vec![e], vec![e + 1]]
        })
        .expect("fresh petals form a pair")
}

fn simple_pairs(d: &SeparatrixDiagram) -> Vec<usize> {
    (0..d.cylinder_count()).filter(|&i| d.erase_handle(i).is_ok()).collect()
}

#[test]
fn faces_split_evenly_into_pairs() {
    for d in canonical().iter().chain([three_loops()].iter()) {
        let pos = d.faces().iter().filter(|f| f.positive).count();
        assert_eq!(pos, d.cylinder_count());
        assert_eq!(d.faces().len() - pos, d.cylinder_count());
        for &(p, n) in d.pairing() {
            assert!(d.faces()[p].positive && !d.faces()[n].positive);
        }
    }
}

#[test]
fn degree_sum_matches_glued_genus() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut diagrams = canonical();
    for _ in 0..30 {
        let d = diagrams[rng.gen_range(0..diagrams.len())].clone();
        let len = d.vertices()[0].len();
        let a = rng.gen_range(0..len);
        let b = (a + 2 * rng.gen_range(0..len / 2) + 1) % len;
        diagrams.push(d.bubble_handle(0, a, b).unwrap());
    }
    for d in &diagrams {
        let s = glue(d);
        let sum: u32 = d.degrees().iter().sum();
        assert_eq!(sum, 2 * s.genus() - 2);
        assert_eq!(d.genus(), s.genus());
        let mut from_surface = s.singularity_profile().stratum();
        let mut from_diagram: Vec<u32> = d.degrees().into_iter().filter(|&k| k > 0).collect();
        from_surface.sort_unstable();
        from_diagram.sort_unstable();
        assert_eq!(from_surface, from_diagram);
    }
}

#[test]
fn parity_law_under_bubble_and_erase() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut pool = canonical();
    let mut instances = 0;
    while instances < 60 {
        let d = pool[rng.gen_range(0..pool.len())].clone();
        let len = d.vertices()[0].len();
        let a = rng.gen_range(0..len);
        let b = (a + 2 * rng.gen_range(0..len / 2) + 1) % len;
        let bubbled = d.bubble_handle(0, a, b).unwrap();
        assert!(bubbled.realizability().is_feasible());
        let (back, m) = bubbled.erase_handle(petal_pair(&bubbled, d.edge_count())).unwrap();
        assert_eq!(back, d);
        assert_eq!((parity(&d) + parity(&bubbled)) % 2, ((m + 1) % 2) as u8, "m={m}");
        if bubbled.genus() <= 5 {
            pool.push(bubbled);
        }
        instances += 1;
    }
}

#[test]
fn realizability_survives_reversal_rotation_and_bubbling() {
    for d in canonical() {
        assert!(d.realizability().is_feasible());
        assert!(d.reverse_arrows().realizability().is_feasible());
        for pair in simple_pairs(&d) {
            for steps in -3..=3 {
                let r = d.rotate_handle(pair, steps).unwrap();
                assert!(r.realizability().is_feasible());
                assert_eq!(r.degrees(), d.degrees());
            }
        }
        let len = d.vertices()[0].len();
        for a in 0..len {
            for b in (0..len).filter(|b| (b + len - a) % 2 == 1) {
                assert!(d.bubble_handle(0, a, b).unwrap().realizability().is_feasible());
            }
        }
    }
}

#[test]
fn rotation_identities() {
    for d in canonical() {
        for pair in simple_pairs(&d) {
            assert_eq!(d.rotate_handle(pair, 0).unwrap(), d);
            let full = d.vertices()[0].len() as i64 - 4;
            assert_eq!(d.rotate_handle(pair, full).unwrap(), d);
            let back = d.rotate_handle(pair, 3).unwrap();
            let pair_back = simple_pairs(&back).into_iter().find(|&q| back.rotate_handle(q, -3).unwrap() == d);
            assert!(pair_back.is_some());
        }
    }
}

#[test]
fn rotation_chain_from_o4_reaches_bubbled_h3() {
    let o4 = SeparatrixDiagram::make_canonical(DiagramKind::O, 4).unwrap();
    let h3 = SeparatrixDiagram::make_canonical(DiagramKind::H, 3).unwrap();
    assert_eq!(parity(&o4), 1);
    let mut found = false;
    for p1 in simple_pairs(&o4) {
        let middle = o4.rotate_handle(p1, -2).unwrap();
        if !middle.realizability().is_feasible() {
            continue;
        }
        for p2 in simple_pairs(&middle) {
            let left = middle.rotate_handle(p2, -1).unwrap();
            if !left.realizability().is_feasible() {
                continue;
            }
            for p3 in simple_pairs(&left) {
                let (erased, _) = left.erase_handle(p3).unwrap();
                if erased.is_isomorphic_up_to_reversal(&h3) {
                    assert_eq!(parity(&middle), 1);
                    assert_eq!(parity(&left), 1);
                    found = true;
                }
            }
        }
    }
    assert!(found);
}

#[test]
fn hyperelliptic_diagrams() {
    for g in 2..=6 {
        for kind in [DiagramKind::H, DiagramKind::O, DiagramKind::E] {
            let Ok(d) = SeparatrixDiagram::make_canonical(kind, g) else { continue };
            let expected =
                kind == DiagramKind::H || (kind == DiagramKind::O && g == 2) || (kind == DiagramKind::E && g == 3);
            assert_eq!(d.is_hyperelliptic_diagram().unwrap(), expected, "{kind} g={g}");
            let tag = classify_surface(&glue(&d)).unwrap().label.tag;
            assert_eq!(tag == ComponentTag::Hyperelliptic, expected, "{kind} g={g}");
        }
    }
    assert!(three_loops().is_hyperelliptic_diagram().unwrap());
}

#[test]
fn contraction_merges_zeroes() {
    let pi: Permutation = "5 4 3 2 1".parse().unwrap();
    let (d, _) = SeparatrixDiagram::horizontal_diagram(&one_cylinder_suspension(&pi).unwrap()).unwrap();
    assert_eq!(d.degrees(), vec![1, 1]);
    let mut contracted = 0;
    for e in 0..d.edge_count() {
        let (u, w) = d.edge_ends(e);
        if u == w {
            assert_eq!(d.contract_saddle_connection(e), Err(DiagramError::LoopEdge(e)));
            continue;
        }
        let c = d.contract_saddle_connection(e).unwrap();
        assert_eq!(c.degrees(), vec![2]);
        if c.realizability().is_feasible() {
            let label = classify_surface(&glue(&c)).unwrap();
            assert_eq!(label.label.tag, ComponentTag::Hyperelliptic);
            contracted += 1;
        }
    }
    assert!(contracted > 0);
    assert_eq!(d.contract_saddle_connection(d.edge_count()), Err(DiagramError::EdgeOutOfRange(d.edge_count())));
}

#[test]
fn every_small_class_has_a_one_cylinder_member() {
    for m in 4..=7 {
        for class in census_classes(m, CensusOptions::default()).unwrap() {
            let hit = class.members().iter().filter(|p| p.is_standard()).any(|p| {
                let (d, _) = SeparatrixDiagram::horizontal_diagram(&one_cylinder_suspension(p).unwrap()).unwrap();
                d.cylinder_count() == 1
            });
            assert!(hit, "no one-cylinder suspension in the class of {}", class.representative());
        }
    }
}

#[test]
fn canonical_suspension_cylinder_counts() {
    for (text, count) in [("4 3 2 1", 2), ("5 4 3 2 1", 2), ("6 5 4 3 2 1", 3)] {
        let pi: Permutation = text.parse().unwrap();
        let (d, _) = SeparatrixDiagram::horizontal_diagram(&suspend(&pi).unwrap()).unwrap();
        assert_eq!(d.cylinder_count(), count, "{text}");
    }
}

#[test]
fn horizontal_diagram_round_trip() {
    for d in canonical() {
        let s = glue(&d);
        let (h, _) = SeparatrixDiagram::horizontal_diagram(&s).unwrap();
        assert!(h.is_isomorphic(&d), "{}", d.to_json());
    }
}

#[test]
fn json_round_trip_and_validation() {
    for d in canonical().into_iter().chain([three_loops()]) {
        assert_eq!(SeparatrixDiagram::from_json(&d.to_json()).unwrap(), d);
    }
    let bad = r#"{"vertices":[[{"half":0,"dir":"out"},{"half":2,"dir":"out"},{"half":1,"dir":"in"},{"half":3,"dir":"in"}]],"edges":[[0,1],[2,3]],"pairing":[]}"#;
    assert!(matches!(SeparatrixDiagram::from_json(bad), Err(DiagramError::NotAlternating(_))));
}

#[test]
fn three_loops_is_realizable_with_equal_lengths() {
    let d = three_loops();
    let cert = d.realizability();
    assert!(d.verify_certificate(&cert));
    assert_eq!(cert.integer_lengths(), Some(vec![1, 1, 1]));
    let broken = SeparatrixDiagram::new(vec![vec![0, 1, 4, 3, 2, 5]], vec![(0, 1), (2, 3)]).unwrap();
    let cert = broken.realizability();
    assert!(!cert.is_feasible());
    assert!(broken.verify_certificate(&cert));
}

#[test]
fn torus_bubbles_into_three_loops() {
    let t = torus();
    let fig = three_loops();
    let bubbled = t.bubble_handle(0, 0, 1).unwrap();
    assert!(bubbled.is_isomorphic(&fig));
    let black = (0..fig.cylinder_count()).find(|&p| fig.erase_handle(p).is_ok()).unwrap();
    let (erased, _) = fig.erase_handle(black).unwrap();
    assert!(erased.is_isomorphic(&t));
    let s = fig.diagram_to_surface(&[1, 1, 1], &[1, 1], &[0, 0]).unwrap();
    assert_eq!(s.n_squares(), 3);
    assert_eq!(s.singularity_profile().stratum(), vec![2]);
    assert_eq!(fig.cylinder_count(), 2);
    assert_eq!(t.cylinder_count(), 1);
}

#[test]
fn canonical_shapes() {
    let h5 = SeparatrixDiagram::make_canonical(DiagramKind::H, 5).unwrap();
    assert_eq!(h5.edge_count(), 9);
    assert_eq!(h5.faces().len(), 10);
    assert_eq!(h5.cylinder_count(), 5);
    for g in 2..=6u32 {
        let h = SeparatrixDiagram::make_canonical(DiagramKind::H, g).unwrap();
        assert_eq!(parity(&h), (g.div_ceil(2) % 2) as u8);
        assert_eq!(h.degrees(), vec![2 * g - 2]);
    }
}

#[test]
fn reversal_keeps_the_component() {
    for d in canonical().into_iter().skip(1) {
        let a = classify_surface(&glue(&d)).unwrap();
        let b = classify_surface(&glue(&d.reverse_arrows())).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn erasing_from_o_keeps_odd_parity() {
    for g in 3..=6 {
        let o = SeparatrixDiagram::make_canonical(DiagramKind::O, g).unwrap();
        for pair in simple_pairs(&o) {
            let (erased, m) = o.erase_handle(pair).unwrap();
            assert!(erased.realizability().is_feasible());
            assert_eq!(m % 2, 1);
            assert_eq!(parity(&erased), 1);
        }
    }
}

#[test]
fn contraction_drops_one_vertex() {
    let pi: Permutation = "7 6 5 4 3 2 1".parse().unwrap();
    let (d, _) = SeparatrixDiagram::horizontal_diagram(&one_cylinder_suspension(&pi).unwrap()).unwrap();
    assert_eq!(d.vertex_count(), 2);
    for e in (0..d.edge_count()).filter(|&e| d.edge_ends(e).0 != d.edge_ends(e).1) {
        let c = d.contract_saddle_connection(e).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.degrees(), vec![4]);
        assert_eq!(c.cylinder_count(), d.cylinder_count());
    }
}

#[test]
fn reversal_suspension_matches_h() {
    for g in 2..=4u32 {
        let pi0 = Permutation::reversal(2 * g as usize);
        let from_perm = classify_surface(&suspend(&pi0).unwrap()).unwrap();
        let h = SeparatrixDiagram::make_canonical(DiagramKind::H, g).unwrap();
        assert_eq!(from_perm, classify_surface(&glue(&h)).unwrap(), "g={g}");
        assert_eq!(from_perm.label.tag, ComponentTag::Hyperelliptic);
    }
}
