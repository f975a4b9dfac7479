use avl_grammar::io::{deserialize, serialize, verify_against_text};
use avl_grammar::lz::lz77_parse;
use avl_grammar::{convert_basic, convert_lazy, Grammar};
use proptest::prelude::*;

fn build(ops: &[(usize, usize)]) -> (Grammar, Vec<Vec<u8>>) {
    let mut g = Grammar::new();
    for &c in b"xyz" {
        g.add_symbol(c);
    }
    for &(a, b) in ops {
        let n = g.len();
        g.add_merged((a % n) as u32, (b % n) as u32);
    }
    let exp = (0..g.len() as u32).map(|id| g.expand(id)).collect();
    (g, exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merges_stay_avl(ops in prop::collection::vec((0usize..1000, 0usize..1000), 1..120)) {
        let (g, exp) = build(&ops);
        prop_assert!(g.avl_check());
        prop_assert!(g.height_check());
        for id in 0..g.len() as u32 {
            prop_assert_eq!(g.explen(id), exp[id as usize].len() as u64);
        }
    }

    #[test]
    fn substrings_match_slices(
        ops in prop::collection::vec((0usize..1000, 0usize..1000), 1..80),
        picks in prop::collection::vec((0usize..1000, 0u64..1 << 20, 0u64..1 << 20), 1..30),
    ) {
        let (mut g, exp) = build(&ops);
        let originals = g.len();
        for (a, u, v) in picks {
            let a = (a % originals) as u32;
            let n = g.explen(a);
            let (i, j) = (1 + u % n, 1 + v % n);
            let (i, j) = (i.min(j), i.max(j));
            let b = g.add_substring(a, i, j).unwrap();
            prop_assert_eq!(g.expand(b), exp[a as usize][(i - 1) as usize..j as usize].to_vec());
        }
        prop_assert!(g.avl_check());
    }

    #[test]
    fn converters_round_trip(t in prop::collection::vec(0u8..3, 1..1500), p in 0usize..3) {
        let fact = lz77_parse(&t).unwrap();
        let basic = convert_basic(&fact).unwrap();
        prop_assert!(verify_against_text(&basic, basic.start().unwrap(), &t));
        let pruned = basic.pruned().unwrap();
        prop_assert_eq!(pruned.expand(pruned.start().unwrap()), t.clone());
        let p = [0.0, 0.125, 1.0][p];
        let (lazy, start, stats) = convert_lazy(&fact, p, 3, true).unwrap();
        prop_assert!(verify_against_text(&lazy, start, &t));
        prop_assert!(lazy.avl_check() && lazy.height_check());
        prop_assert_eq!(stats.paranoid_mismatches, 0);
        let back = deserialize(&serialize(&lazy)).unwrap();
        prop_assert_eq!(back.records().collect::<Vec<_>>(), lazy.records().collect::<Vec<_>>());
    }

    #[test]
    fn prune_keeps_reachable_expansions(ops in prop::collection::vec((0usize..1000, 0usize..1000), 1..100)) {
        let (g, exp) = build(&ops);
        let roots = [(g.len() - 1) as u32, (g.len() / 2) as u32];
        let (p, map) = g.prune(&roots).unwrap();
        prop_assert!(p.len() <= g.len());
        for (&r, &m) in roots.iter().zip(&map) {
            prop_assert_eq!(p.expand(m), exp[r as usize].clone());
        }
        prop_assert!(p.avl_check());
    }
}
