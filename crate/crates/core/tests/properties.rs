use std::collections::BTreeSet;

use num_rational::Ratio;
use proptest::prelude::*;
use tricover::certificate::{verify_certificate, Certificate};
use tricover::cover::{cover, cover_from, CoverOptions};
use tricover::graph::{build_graph, Graph};
use tricover::io::{parse_edge_list, write_edge_list};
use tricover::oracles::{nu_exact, tau_exact, tau_star_k_exact};
use tricover::order2::{charge_order2, TailNaming};
use tricover::packing::{greedy_packing, improve_packing, local_search_packing, Packing};
use tricover::rounding::{compose_order_k, round_third_integral};
use tricover::structure::{build_structure, check_structure};
use tricover::verify::verify_cover;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |keep| {
            let pairs = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)));
            let edges: Vec<_> = pairs.zip(keep).filter(|(_, k)| *k).map(|(e, _)| e).collect();
            build_graph(n, &edges).unwrap()
        })
    })
}

fn brute_nu(g: &Graph) -> usize {
    let t = g.triangles();
    (0u32..1 << t.len())
        .filter(|mask| {
            let mut used = BTreeSet::new();
            (0..t.len())
                .filter(|i| mask >> i & 1 == 1)
                .all(|i| t[i].edges.iter().all(|&e| used.insert(e)))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

/// Minimum total numerator over all assignments with values in `0..=k`.
fn brute_tau_star(g: &Graph, k: u32) -> u32 {
    let m = g.m();
    let mut best = u32::MAX;
    let mut f = vec![0u32; m];
    loop {
        let total: u32 = f.iter().sum();
        if total < best
            && g.triangles()
                .iter()
                .all(|t| t.edges.iter().map(|&e| f[e as usize]).sum::<u32>() >= k)
        {
            best = total;
        }
        let mut i = 0;
        while i < m && f[i] == k {
            f[i] = 0;
            i += 1;
        }
        if i == m {
            return best;
        }
        f[i] += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn oracles_match_brute_force(g in graph(5)) {
        prop_assume!(g.triangles().len() <= 10);
        prop_assert_eq!(nu_exact(&g).unwrap(), brute_nu(&g));
        let tau = brute_tau_star(&g, 1) as usize;
        prop_assert_eq!(tau_exact(&g).unwrap(), tau);
        for k in [2u32, 3] {
            let want = Ratio::new(brute_tau_star(&g, k) as i64, k as i64);
            prop_assert_eq!(tau_star_k_exact(&g, k).unwrap(), want);
        }
    }

    #[test]
    fn oracle_sandwich(g in graph(8)) {
        let nu = nu_exact(&g).unwrap();
        let tau = tau_exact(&g).unwrap();
        prop_assert!(nu <= tau && tau <= 3 * nu);
        let tau_r = Ratio::from_integer(tau as i64);
        let t2 = tau_star_k_exact(&g, 2).unwrap();
        let t3 = tau_star_k_exact(&g, 3).unwrap();
        prop_assert!(Ratio::from_integer(nu as i64) <= t2 && t2 <= tau_r);
        prop_assert!(t3 <= tau_r);
    }

    #[test]
    fn covers_are_verified_and_bounded(g in graph(8), seed in 0u64..4) {
        let nu = nu_exact(&g).unwrap();
        for k in [2u32, 3, 6] {
            let r = cover(&g, k, &CoverOptions { seed, ..CoverOptions::default() }).unwrap();
            prop_assert!(r.report.ok());
            prop_assert!(r.packing.len() <= nu);
            let sum = r.f.total();
            prop_assert!(sum <= Ratio::from_integer(2 * r.packing.len() as i64));
            if k <= 3 {
                prop_assert!(tau_star_k_exact(&g, k).unwrap() <= sum);
            }
            if k == 2 {
                prop_assert!(r.f.num.iter().all(|&x| x <= 2));
            }
        }
    }

    #[test]
    fn order2_pipeline_invariants(g in graph(9), seed in 0u64..4) {
        let p = local_search_packing(&g, seed, 5);
        let s = build_structure(&g, &p);
        prop_assume!(check_structure(&g, &s).is_empty());
        for naming in [TailNaming::SmallerFirst, TailNaming::LargerFirst] {
            let run = charge_order2(&g, &s, naming).unwrap();
            // Discharges and pins only add to fixed charge.
            for e in 0..g.m() {
                prop_assert!(run.f.num[e] >= run.f_fix.num[e]);
            }
            prop_assert!(run.demand.demanding.is_empty());
            let mut seen = BTreeSet::new();
            for c in &run.chains.chains {
                for &e in &c.half_edges {
                    prop_assert!(seen.insert(e), "half edge {} shared by two chains", e);
                }
            }
            prop_assert!(verify_cover(&g, &run.f, p.len()).ok());
        }
    }

    #[test]
    fn certificates_round_trip(g in graph(8), k in 2u32..8) {
        let r = cover(&g, k, &CoverOptions::default()).unwrap();
        let cert = Certificate::from_outcome(&g, &r);
        let json = cert.to_json();
        prop_assert!(!json.contains('.'));
        let back = Certificate::from_json(&json).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert_eq!(back.to_json(), json);
        prop_assert!(verify_certificate(&g, &back).unwrap().ok());
    }

    #[test]
    fn swaps_grow_packings_by_one(g in graph(9), seed in 0u64..8) {
        let mut p = greedy_packing(&g, seed);
        while let Some(swap) = improve_packing(&g, &p, 3) {
            let before = p.len();
            prop_assert_eq!(swap.added.len(), swap.removed.len() + 1);
            p.apply(&g, &swap).unwrap();
            prop_assert_eq!(p.len(), before + 1);
            let ids: Vec<_> = p.triangles().collect();
            prop_assert!(Packing::from_triangles(&g, &ids).is_ok());
        }
    }

    #[test]
    fn rounding_gives_integral_covers(g in graph(9)) {
        let r = cover(&g, 3, &CoverOptions::default()).unwrap();
        let c = round_third_integral(&g, &r.f).unwrap();
        prop_assert!(g.triangles().iter().all(|t| t.edges.iter().any(|e| c.binary_search(e).is_ok())));
        let cap = (3 * r.f.total_num()).div_ceil(2 * r.f.order as u64);
        prop_assert!(c.len() as u64 <= cap);
        prop_assert!(c.len() >= tau_exact(&g).unwrap());
    }

    #[test]
    fn composed_orders_cover(g in graph(8), k in 2u32..10) {
        let p = local_search_packing(&g, 0, 5);
        let f2 = cover_from(&g, p.clone(), 2, &CoverOptions::default()).unwrap();
        let f3 = cover_from(&g, f2.packing.clone(), 3, &CoverOptions::default()).unwrap();
        prop_assume!(f3.packing == f2.packing);
        let f = compose_order_k(Some(&f2.f), Some(&f3.f), k).unwrap();
        prop_assert_eq!(f.order, k);
        prop_assert!(verify_cover(&g, &f, f2.packing.len()).ok());
    }

    #[test]
    fn edge_lists_round_trip(g in graph(10)) {
        let text = write_edge_list(&g);
        let h = parse_edge_list(&text).unwrap();
        prop_assert_eq!(h.n(), g.n());
        prop_assert_eq!(h.edges(), g.edges());
        prop_assert_eq!(write_edge_list(&h), text);
    }
}
