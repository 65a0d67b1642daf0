use ghostbox::analysis::{
    k4_witness_at, kr_factor_search, kr_factor_search_with_limit, max_codegree, regular_pair_check,
    triangle_witness, verify_box_transcript, verify_real_transcript, verify_transcript_json, CheckStatus,
};
use ghostbox::breaker::BreakerSpec;
use ghostbox::engine::{run_game, GameEvent, GameId, RealGameParams, RealTranscript};
use ghostbox::graph::SimpleGraph;
use ghostbox::spookybox::policies::{RandomBreaker, RandomGhost};
use ghostbox::spookybox::{run_box_game, BoxEvent, BoxGameConfig};
use ghostbox::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gnp(n: usize, p: f64, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SimpleGraph::new(n);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

fn from_bits(n: usize, bits: &[bool]) -> SimpleGraph {
    let mut g = SimpleGraph::new(n);
    let mut k = 0;
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if bits[k] {
                g.add_edge(u, v).unwrap();
            }
            k += 1;
        }
    }
    g
}

fn is_clique(g: &SimpleGraph, vs: &[u32]) -> bool {
    vs.iter()
        .enumerate()
        .all(|(i, &a)| vs[i + 1..].iter().all(|&b| a != b && g.has_edge(a, b)))
}

/// Every partition of `rest` into blocks of size `r`, checked block by block
/// only once complete.
fn partitions(rest: Vec<u32>, r: usize, acc: &mut Vec<Vec<u32>>, found: &mut dyn FnMut(&[Vec<u32>]) -> bool) -> bool {
    if rest.is_empty() {
        return found(acc);
    }
    let first = rest[0];
    let others = &rest[1..];
    let k = others.len();
    let mut pick = vec![0usize; r - 1];
    fn next(pick: &mut [usize], k: usize) -> bool {
        let r = pick.len();
        for i in (0..r).rev() {
            if pick[i] < k - r + i {
                pick[i] += 1;
                for j in i + 1..r {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, p) in pick.iter_mut().enumerate() {
        *p = i;
    }
    loop {
        let mut block = vec![first];
        block.extend(pick.iter().map(|&i| others[i]));
        let left: Vec<u32> = others
            .iter()
            .enumerate()
            .filter(|(i, _)| !pick.contains(i))
            .map(|(_, &v)| v)
            .collect();
        acc.push(block);
        let hit = partitions(left, r, acc, found);
        acc.pop();
        if hit {
            return true;
        }
        if !next(&mut pick, k) {
            return false;
        }
    }
}

fn factor_oracle(g: &SimpleGraph, r: usize) -> bool {
    if g.n() % r != 0 {
        return false;
    }
    let mut seen = 0u64;
    let hit = partitions((0..g.n() as u32).collect(), r, &mut Vec::new(), &mut |parts| {
        seen += 1;
        parts.iter().all(|b| is_clique(g, b))
    });
    assert!(seen > 0);
    hit
}

fn check_factor(g: &SimpleGraph, r: usize, got: &Option<Vec<Vec<u32>>>) {
    assert_eq!(got.is_some(), factor_oracle(g, r));
    if let Some(parts) = got {
        let mut all: Vec<u32> = parts.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.n() as u32).collect::<Vec<_>>());
        assert!(parts.iter().all(|b| b.len() == r && is_clique(g, b)));
    }
}

#[test]
fn triangle_in_k3() {
    let g = SimpleGraph::complete(3);
    assert_eq!(triangle_witness(&g), Some((0, 1, 2)));
    let c5 = SimpleGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
    assert_eq!(triangle_witness(&c5), None);
}

#[test]
fn k4_witness_needs_v0() {
    let mut g = SimpleGraph::from_edges(8, [(1, 2), (1, 3), (2, 3), (0, 1), (0, 2)]).unwrap();
    assert_eq!(k4_witness_at(&g, 0), None);
    g.add_edge(0, 3).unwrap();
    let mut w = k4_witness_at(&g, 0).unwrap();
    w.sort_unstable();
    assert_eq!(w, [0, 1, 2, 3]);
    assert_eq!(k4_witness_at(&g, 5), None);
    let other = SimpleGraph::from_edges(8, [(4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]).unwrap();
    assert_eq!(k4_witness_at(&other, 0), None);
    assert!(k4_witness_at(&other, 4).is_some());
}

#[test]
fn codegree_of_a_star() {
    let g = SimpleGraph::from_edges(6, [(0, 1), (0, 2), (0, 3), (5, 1), (5, 2)]).unwrap();
    assert_eq!(max_codegree(&g, 0), (5, 2));
}

#[test]
fn dense_random_graphs_match_partition_enumeration() {
    for seed in 0..6 {
        let g = gnp(12, 0.9, seed);
        check_factor(&g, 3, &kr_factor_search(&g, 3).unwrap());
        check_factor(&g, 4, &kr_factor_search(&g, 4).unwrap());
        check_factor(&g, 2, &kr_factor_search(&g, 2).unwrap());
    }
    for seed in 0..4 {
        let g = gnp(9, 0.6, 100 + seed);
        check_factor(&g, 3, &kr_factor_search(&g, 3).unwrap());
    }
}

#[test]
fn factor_limits() {
    let g = SimpleGraph::complete(40);
    assert!(matches!(kr_factor_search(&g, 4), Err(Error::Size { .. })));
    assert!(kr_factor_search_with_limit(&g, 4, 40).unwrap().is_some());
    assert!(kr_factor_search_with_limit(&SimpleGraph::new(65), 5, 100).is_err());
    assert!(kr_factor_search(&SimpleGraph::complete(7), 3).is_err());
    assert_eq!(kr_factor_search(&SimpleGraph::new(6), 3).unwrap(), None);
}

/// `min over X' ⊆ X, Y' ⊆ Y of e(X',Y') − c|X'||Y'|`, empty sets included.
fn slack_oracle(g: &SimpleGraph, x: &[u32], y: &[u32], c: f64) -> f64 {
    let mut best = 0.0f64;
    for xs in 0u32..1 << x.len() {
        for ys in 0u32..1 << y.len() {
            let mut e = 0usize;
            for (i, &u) in x.iter().enumerate() {
                if xs >> i & 1 == 0 {
                    continue;
                }
                for (j, &w) in y.iter().enumerate() {
                    if ys >> j & 1 == 1 && g.has_edge(u, w) {
                        e += 1;
                    }
                }
            }
            let s = e as f64 - c * (xs.count_ones() * ys.count_ones()) as f64;
            best = best.min(s);
        }
    }
    best
}

#[test]
fn regularity_matches_double_loop() {
    let x: Vec<u32> = (0..10).collect();
    let y: Vec<u32> = (10..20).collect();
    for (seed, d) in [(0, 0.5), (1, 0.6), (2, 0.3), (3, 0.45)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = SimpleGraph::new(20);
        for &u in &x {
            for &w in &y {
                if rng.gen_bool(0.5) {
                    g.add_edge(u, w).unwrap();
                }
            }
        }
        let (eps, p) = (0.1, 1.0);
        let v = regular_pair_check(&g, &x, &y, eps, d, p).unwrap();
        let want = slack_oracle(&g, &x, &y, (d - eps) * p);
        assert!((v.min_slack - want).abs() < 1e-9, "seed {seed}: {} vs {want}", v.min_slack);
        assert_eq!(v.regular, want >= 0.0);
        if let Some((xs, ys)) = &v.witness {
            let e = xs.iter().map(|&u| ys.iter().filter(|&&w| g.has_edge(u, w)).count()).sum::<usize>();
            let s = e as f64 - (d - eps) * p * (xs.len() * ys.len()) as f64;
            assert!((s - want).abs() < 1e-9);
        }
    }
}

fn honest_real() -> RealTranscript {
    let mut s = BreakerSpec::Random { seed: 3 }.build();
    run_game(RealGameParams::new(24, 0.5, 2, 0.5, 3), s.as_mut()).unwrap().0
}

fn resealed(mut t: RealTranscript) -> RealTranscript {
    t.hash = t.recompute_hash();
    t
}

#[test]
fn honest_transcript_passes() {
    let t = honest_real();
    let r = verify_real_transcript(&t).unwrap();
    assert!(r.pass, "{:?}", r.first_failure());
    assert_eq!(r.transcript_hash, t.hash);
    let r2 = verify_transcript_json(&t.to_json()).unwrap();
    assert_eq!(r2, r);
}

#[test]
fn retagged_maker_claim_fails_at_that_event() {
    let mut t = honest_real();
    let i = t.events.iter().position(|e| matches!(e, GameEvent::Claim { .. })).unwrap();
    let GameEvent::Claim { e, .. } = t.events[i] else { unreachable!() };
    t.events[i] = GameEvent::Breaker { e: vec![e] };
    let r = verify_real_transcript(&resealed(t)).unwrap();
    assert!(!r.pass);
    let f = r.first_failure().unwrap();
    assert_eq!(f.failure.as_ref().unwrap().event, Some(i), "{f:?}");
}

#[test]
fn shrunk_box_names_the_box() {
    let mut t = honest_real();
    let mut sizes = std::collections::HashMap::new();
    let mut target = None;
    for (i, ev) in t.events.iter().enumerate() {
        if let GameEvent::Grow { g: GameId::Nbh, box_id, size, .. } = ev {
            if let Some(&prev) = sizes.get(box_id) {
                if prev > 0 {
                    target = Some((i, *box_id, prev));
                    break;
                }
            }
            sizes.insert(*box_id, *size);
        }
    }
    let (i, id, prev) = target.expect("a box grows twice");
    if let GameEvent::Grow { add, size, .. } = &mut t.events[i] {
        add.clear();
        *size = prev - 1;
    }
    let r = verify_real_transcript(&resealed(t)).unwrap();
    let c = r.check("box_growth").unwrap();
    assert_eq!(c.status, CheckStatus::Fail);
    let f = c.failure.as_ref().unwrap();
    assert_eq!(f.event, Some(i));
    assert!(f.message.contains(&format!("box {id} shrank")), "{}", f.message);
}

#[test]
fn tampered_hash_and_gamma_claims_are_caught() {
    let mut t = honest_real();
    t.hash = "0000000000000000".into();
    let r = verify_real_transcript(&t).unwrap();
    assert_eq!(r.check("hash").unwrap().status, CheckStatus::Fail);

    let mut t = honest_real();
    let i = t.events.iter().position(|e| matches!(e, GameEvent::Claim { .. })).unwrap();
    let GameEvent::Claim { g, e } = t.events[i] else { unreachable!() };
    t.events[i] = GameEvent::Haunt { g, e, out: true };
    let r = verify_real_transcript(&resealed(t)).unwrap();
    let f = r.check("gamma_membership").unwrap().failure.clone().unwrap();
    assert_eq!(f.event, Some(i));
}

#[test]
fn parse_errors_carry_offsets() {
    let text = honest_real().to_json();
    let cut = text.len() / 2;
    match verify_transcript_json(&text[..cut]) {
        Err(Error::Parse { offset, .. }) => assert!(offset <= cut),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(verify_transcript_json(r#"{"kind":"other"}"#), Err(Error::Parse { offset: 0, .. })));
    match verify_transcript_json("{\"kind\": \"real\", \"events\": 7}") {
        Err(Error::Parse { .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

fn box_cfg() -> BoxGameConfig {
    BoxGameConfig {
        m: 2,
        b: 3,
        vertex_count: 300,
        e: 12,
        max_box: 40,
        ell: 1.0,
        strict_preconditions: false,
    }
}

fn box_transcript(seed: u64) -> ghostbox::spookybox::BoxGameTranscript {
    let initial = ghostbox::spookybox::random_hypergraph(300, 12, 10, seed);
    run_box_game(box_cfg(), initial, &mut RandomGhost::new(seed), &mut RandomBreaker::new(seed)).unwrap()
}

#[test]
fn box_transcripts_verify_and_catch_shrinkage() {
    let t = box_transcript(4);
    let r = verify_box_transcript(&t).unwrap();
    assert!(r.pass, "{:?}", r.first_failure());
    assert_eq!(r.check("maker_choice").unwrap().status, CheckStatus::Pass);
    assert_eq!(verify_transcript_json(&t.to_json()).unwrap().kind, "box");

    let mut bad = t.clone();
    let mut sizes: Vec<u32> = bad.initial.iter().map(|b| b.len() as u32).collect();
    let (i, id) = bad
        .events
        .iter()
        .enumerate()
        .find_map(|(i, ev)| match ev {
            BoxEvent::Grow { box_id, size, .. } if sizes[*box_id as usize] > 0 => Some((i, *box_id)),
            BoxEvent::Grow { box_id, size, .. } => {
                sizes[*box_id as usize] = *size;
                None
            }
            _ => None,
        })
        .expect("a non-empty box grows");
    if let BoxEvent::Grow { add, size, .. } = &mut bad.events[i] {
        add.clear();
        *size = sizes[id as usize] - 1;
    }
    bad.hash = bad.recompute_hash();
    let r = verify_box_transcript(&bad).unwrap();
    let f = r.check("box_growth").unwrap().failure.clone().unwrap();
    assert_eq!(f.event, Some(i));
    assert!(f.message.contains(&format!("box {id}")), "{}", f.message);

    let mut stolen = t.clone();
    let i = stolen.events.iter().position(|e| matches!(e, BoxEvent::Claim { .. })).unwrap();
    let BoxEvent::Claim { v } = stolen.events[i] else { unreachable!() };
    let j = stolen.events[i..].iter().position(|e| matches!(e, BoxEvent::Breaker { .. })).unwrap() + i;
    if let BoxEvent::Breaker { v: claims } = &mut stolen.events[j] {
        claims.push(v);
    }
    stolen.hash = stolen.recompute_hash();
    assert!(!verify_box_transcript(&stolen).unwrap().pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn detectors_agree_with_brute_force(
        (n, bits, v0) in (4usize..11).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2), 0..n as u32)
        })
    ) {
        let g = from_bits(n, &bits);
        let n32 = n as u32;
        let mut tri = false;
        let mut k4 = false;
        for a in 0..n32 {
            for b in a + 1..n32 {
                for c in b + 1..n32 {
                    if is_clique(&g, &[a, b, c]) {
                        tri = true;
                        if [a, b, c].iter().all(|&x| x != v0 && g.has_edge(v0, x)) {
                            k4 = true;
                        }
                    }
                }
            }
        }
        let t = triangle_witness(&g);
        prop_assert_eq!(t.is_some(), tri);
        if let Some((a, b, c)) = t {
            prop_assert!(is_clique(&g, &[a, b, c]));
        }
        let w = k4_witness_at(&g, v0);
        prop_assert_eq!(w.is_some(), k4);
        if let Some(w) = w {
            prop_assert!(w.contains(&v0) && is_clique(&g, &w));
        }
        let (z, c) = max_codegree(&g, v0);
        let best = (0..n32)
            .filter(|&z| z != v0)
            .map(|z| (0..n32).filter(|&x| g.has_edge(v0, x) && g.has_edge(z, x)).count())
            .max()
            .unwrap();
        prop_assert_eq!(c, best);
        prop_assert_ne!(z, v0);
    }

    #[test]
    fn bipartite_graphs_have_no_triangle(
        (a, bits) in (1usize..7, 1usize..7).prop_flat_map(|(a, b)| {
            (Just(a), proptest::collection::vec(any::<bool>(), a * b))
        })
    ) {
        let b = bits.len() / a;
        let mut g = SimpleGraph::new(a + b);
        for i in 0..a {
            for j in 0..b {
                if bits[i * b + j] {
                    g.add_edge(i as u32, (a + j) as u32).unwrap();
                }
            }
        }
        prop_assert_eq!(triangle_witness(&g), None);
    }

    #[test]
    fn factor_search_matches_enumeration(
        (n, r, bits) in (2usize..5).prop_flat_map(|r| {
            let n = r * if r == 2 { 5 } else { 3 };
            (Just(n), Just(r), proptest::collection::vec(proptest::bool::weighted(0.8), n * (n - 1) / 2))
        })
    ) {
        let g = from_bits(n, &bits);
        check_factor(&g, r, &kr_factor_search(&g, r).unwrap());
    }
}

#[test]
fn nominal_slack_survives_json() {
    // δpn = 1e-5 is not exactly representable; the header must read back bit for bit
    let mut s = BreakerSpec::Random { seed: 7 }.build();
    let (t, _) = run_game(RealGameParams::new(200, 0.2, 2, 0.5, 7), s.as_mut()).unwrap();
    let back = RealTranscript::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
    assert!(verify_transcript_json(&t.to_json()).unwrap().pass);
}
