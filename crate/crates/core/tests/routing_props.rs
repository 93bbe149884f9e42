mod common;

use balsub::gadgets::{Expansion, UnitParams};
use balsub::generators;
use balsub::router::{connect_with_length, realize_exact_length, LengthWindow, RouteFailure};
use balsub::VertexSet;
use common::{all_path_lengths, arb_graph};
use proptest::prelude::*;

proptest! {
    #[test]
    fn windowed_paths_land_in_the_window(seed in 0u64..300, lo in 1usize..12, span in 0usize..6, units in any::<bool>()) {
        let g = generators::gnp(40, 0.15, seed).unwrap();
        let window = LengthWindow::new(lo, lo + span).unwrap();
        let start = Expansion { anchor: 0, vertices: VertexSet::from([0]), radius: 0 };
        let target = VertexSet::from([39]);
        let avoid: VertexSet = (30..35).collect();
        let params = units.then_some(UnitParams { h0: 1, h1: 1, h2: 1, h3: 2 });
        match connect_with_length(&g, 0, &start, &target, &avoid, window, params) {
            Ok(r) => {
                prop_assert!(r.path.is_valid_in(&g));
                prop_assert!(window.contains(r.path.length()));
                prop_assert_eq!(r.path.start(), 0);
                prop_assert_eq!(r.path.end(), 39);
                prop_assert!(r.path.vertex_set().is_disjoint(&avoid));
            }
            Err(RouteFailure::Stalled { longest, .. }) => prop_assert!(longest.is_valid_in(&g)),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn exact_search_matches_path_enumeration(g in arb_graph(12), mask in any::<u16>(), target in 1usize..12) {
        let n = g.vertex_count();
        prop_assume!(n >= 2);
        let (a, b) = (0, n - 1);
        let center: VertexSet = (1..n - 1).filter(|&v| mask >> v & 1 == 1).collect();
        let got = realize_exact_length(&g, &center, a, b, target).unwrap();
        let lengths = all_path_lengths(&g, &g.mask(&center), a, b);
        prop_assert_eq!(got.is_some(), lengths.contains(&target));
        if let Some(p) = got {
            prop_assert!(p.is_valid_in(&g));
            prop_assert_eq!(p.length(), target);
            prop_assert!(p.interior().iter().all(|&x| center.contains(x)));
        }
    }
}

#[test]
fn exact_search_on_two_hundred_instances() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let n = 4 + (seed % 10) as usize;
        let g = generators::gnp(n, 0.35, seed).unwrap();
        let center: VertexSet = (1..n - 1).collect();
        let lengths = all_path_lengths(&g, &g.mask(&center), 0, n - 1);
        for t in 1..n {
            let got = realize_exact_length(&g, &center, 0, n - 1, t).unwrap();
            assert_eq!(got.is_some(), lengths.contains(&t), "seed {seed} target {t}");
            checked += 1;
        }
    }
    assert!(checked > 1000);
}
