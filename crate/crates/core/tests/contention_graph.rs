mod common;

use common::{random, rel_close, square};
use fdbackhaul::contention::relative_interference;
use fdbackhaul::{build_graph, classify_pair, hd_graph, EdgeCause, PairKind, Scenario};
use proptest::prelude::*;

#[test]
fn parallel_square_links_are_symmetric() {
    let s = square([3.0; 4], &[(0, 1, 1e9), (2, 3, 1e9)]);
    let kind = classify_pair(&s.flows[0], &s.flows[1]);
    assert_eq!(kind, PairKind::NoCommonNode);
    let (a, b) = relative_interference(0, 1, kind, &s).unwrap();
    assert_eq!(a, b);
    assert!(rel_close(a, 1.819_044_625_170_297_7e-6, 1e-12), "{a}");
}

#[test]
fn relay_pair_values() {
    // 0 -> 1 and 1 -> 2 with β = 3 at station 1
    let s = square([3.0; 4], &[(0, 1, 1e9), (1, 2, 1e9)]);
    let kind = classify_pair(&s.flows[0], &s.flows[1]);
    assert_eq!(kind, PairKind::RsiOneWay);
    let (hurt_by_first, hurt_by_second) = relative_interference(0, 1, kind, &s).unwrap();
    assert!(rel_close(hurt_by_first, 6.283_895_657_605_678e-6, 1e-12), "{hurt_by_first}");
    assert!(rel_close(hurt_by_second, 1.984_565_686_151_027e-6, 1e-12), "{hurt_by_second}");
}

#[test]
fn zero_beta_makes_rsi_pure_noise_ratio() {
    let s = square([0.0; 4], &[(0, 1, 1e9), (1, 0, 1e9)]);
    let kind = classify_pair(&s.flows[0], &s.flows[1]);
    assert_eq!(kind, PairKind::RsiBothWays);
    let (a, b) = relative_interference(0, 1, kind, &s).unwrap();
    // 1/SNR of a 50 m aligned link
    let snr = 9.628_879_668_694_238e-8 / 4.777_286_047e-14;
    assert!(rel_close(a, 1.0 / snr, 1e-9));
    assert_eq!(a, b);
}

#[test]
fn role_conflicts_have_no_interference_value() {
    let s = square([3.0; 4], &[(0, 1, 1e9), (0, 2, 1e9)]);
    assert!(relative_interference(0, 1, PairKind::SameTx, &s).is_err());
}

#[test]
fn threshold_is_strict() {
    let mut s = square([3.0; 4], &[(0, 1, 1e9), (2, 3, 1e9)]);
    let (ri, _) = relative_interference(0, 1, PairKind::NoCommonNode, &s).unwrap();
    s.sigma = ri;
    assert!(!build_graph(&s).unwrap().has_edge(0, 1));
    s.sigma = ri * (1.0 - 1e-12);
    let g = build_graph(&s).unwrap();
    assert_eq!(g.cause(0, 1), Some(EdgeCause::RiExceeded));
}

#[test]
fn half_duplex_adds_shared_node_edges() {
    let s = square([3.0; 4], &[(0, 1, 1e9), (1, 2, 1e9), (2, 3, 1e9)]);
    let mut loose = s.clone();
    loose.sigma = 1.0;
    let fd = build_graph(&loose).unwrap();
    let hd = hd_graph(&loose).unwrap();
    assert_eq!(fd.num_edges(), 0);
    assert_eq!(hd.cause(0, 1), Some(EdgeCause::RoleConflict));
    assert_eq!(hd.cause(1, 2), Some(EdgeCause::RoleConflict));
    assert!(!hd.has_edge(0, 2));
}

#[test]
fn hd_edges_contain_fd_edges() {
    for seed in 0..30 {
        let s = random(seed, 40);
        let fd = build_graph(&s).unwrap();
        let hd = hd_graph(&s).unwrap();
        for (a, b, _) in fd.edges() {
            assert!(hd.has_edge(a, b), "seed {seed}: ({a},{b})");
        }
    }
}

#[test]
fn sigma_limits() {
    let s = random(7, 30);
    let mut open = s.clone();
    open.sigma = 1e300;
    let g = build_graph(&open).unwrap();
    for (a, b, cause) in g.edges() {
        assert_eq!(cause, EdgeCause::RoleConflict);
        assert!(classify_pair(&s.flows[a], &s.flows[b]).is_role_conflict());
    }
    let mut closed = s.clone();
    closed.sigma = 1e-300;
    let g = build_graph(&closed).unwrap();
    assert_eq!(g.num_edges(), 30 * 29 / 2);
}

#[test]
fn relabeling_flows_permutes_the_graph() {
    let s = random(11, 25);
    let g = build_graph(&s).unwrap();
    let perm: Vec<usize> = (0..25).map(|i| (i * 7 + 3) % 25).collect();
    let mut t = s.clone();
    for (old, &new) in perm.iter().enumerate() {
        t.flows[new] = s.flows[old];
        t.flows[new].id = new;
    }
    let h = build_graph(&t).unwrap();
    assert_eq!(g.num_edges(), h.num_edges());
    for (a, b, cause) in g.edges() {
        assert_eq!(h.cause(perm[a], perm[b]), Some(cause));
    }
}

#[test]
fn edge_list_format() {
    let s = square([3.0; 4], &[(0, 1, 1e9), (0, 2, 1e9)]);
    let text = build_graph(&s).unwrap().edge_list();
    assert_eq!(text, "flows 2\n0 1 role-conflict\n");
}

fn with_sigma(s: &Scenario, sigma: f64) -> Scenario {
    let mut t = s.clone();
    t.sigma = sigma;
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn raising_sigma_only_removes_edges(
        seed in 0u64..10_000,
        lo in -8.0f64..0.0,
        gap in 0.0f64..4.0,
    ) {
        let s = random(seed, 20);
        let tight = build_graph(&with_sigma(&s, 10f64.powf(lo))).unwrap();
        let loose = build_graph(&with_sigma(&s, 10f64.powf(lo + gap))).unwrap();
        for (a, b, _) in loose.edges() {
            prop_assert!(tight.has_edge(a, b));
        }
    }
}
