use induced_markov::partition::*;
use induced_markov::semigroup::{verify_locally_expanding, Chart, ExpandingCover, Generator, GeneratorSystem, Word};
use induced_markov::{Arc, Error};

fn doubling() -> (GeneratorSystem, ExpandingCover) {
    let s = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0)]).unwrap();
    let c = verify_locally_expanding(&s, 1024).unwrap();
    (s, c)
}

fn doubling_tripling() -> (GeneratorSystem, ExpandingCover) {
    let s = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0), Generator::affine(3, 0.0)]).unwrap();
    let c = verify_locally_expanding(&s, 1024).unwrap();
    (s, c)
}

#[test]
fn family_covers_grid_for_doubling() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let fam = build_vitali_family(&s, &c, &base, 3, 8).unwrap();
    assert!(fam.is_complete(), "{:?}", fam.uncovered_point);
    assert!(fam.tiles.iter().all(|t| (3..=8).contains(&t.word.len())));
    // every tile has length 2 eps / 2^n
    for t in &fam.tiles {
        let expect = 0.3 / f64::powi(2.0, t.word.len() as i32);
        assert!((t.arc.len - expect).abs() < 1e-15);
    }
}

#[test]
fn family_with_depth_beyond_cap_is_empty() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let fam = build_vitali_family(&s, &c, &base, 9, 8).unwrap();
    assert!(fam.tiles.is_empty());
    assert!(!fam.is_complete());
}

#[test]
fn family_has_small_members_around_each_point() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let delta: f64 = 1e-3;
    let cap = (2.0 * 0.15 / delta).log2().ceil() as usize;
    let fam = build_vitali_family(&s, &c, &base, 1, cap).unwrap();
    assert!(fam.tiles.iter().any(|t| t.arc.contains(0.3) && t.arc.len < delta));
}

#[test]
fn vitali_select_fills_a_base_ball() {
    let (s, c) = doubling();
    let base = BaseCover::standard(1.0 / 16.0).unwrap();
    let b = base.balls[5];
    let u = (b.lo, b.hi());
    let fam = family_in(&s, &c, &base, u, 1, 12).unwrap();
    let (chosen, uncovered) = vitali_select(&[u], &fam, 1e-3);
    assert!(uncovered < 1e-3, "{uncovered}");
    let mass: f64 = chosen.iter().map(|&i| fam[i].arc.len).sum();
    assert!((mass + uncovered - b.len).abs() < 1e-12);
    // chosen interiors are disjoint
    let mut arcs: Vec<Arc> = chosen.iter().map(|&i| fam[i].arc).collect();
    arcs.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    for w in arcs.windows(2) {
        assert!(w[0].hi() <= w[1].lo + 1e-15);
    }
}

#[test]
fn vitali_select_of_empty_set() {
    let (s, c) = doubling();
    let base = BaseCover::standard(1.0 / 16.0).unwrap();
    let fam = family_in(&s, &c, &base, (0.1, 0.3), 1, 6).unwrap();
    let (chosen, uncovered) = vitali_select(&[], &fam, 1e-3);
    assert!(chosen.is_empty());
    assert_eq!(uncovered, 0.0);
}

#[test]
fn vitali_select_on_complement_of_boundaries() {
    let (s, c) = doubling();
    let base = BaseCover::standard(1.0 / 16.0).unwrap();
    let gaps = base.gaps();
    let fam = build_vitali_family(&s, &c, &base, 1, 9).unwrap();
    let (chosen, uncovered) = vitali_select(&gaps, &fam.tiles, 1e-3);
    let mass: f64 = chosen.iter().map(|&i| fam.tiles[i].arc.len).sum();
    assert!((mass + uncovered - 1.0).abs() < 1e-12);
    assert!(uncovered < 5e-2);
}

fn check_structure(s: &GeneratorSystem, p: &CountableMarkovPartition) {
    let t = transition_matrix(p);
    assert!(overlapping_pair(p).is_none());
    assert!(markov_violation(p, &t).is_none());
    assert!(t.zero_rows().is_empty());
    assert!(t.zero_columns().is_empty());
    assert!(t.distinct_rows() <= p.base.len());
    let fip = check_fip(s, p);
    assert!(fip.holds, "{:?}", fip.violation);
    assert!(check_fcp(p, &t).holds);
    assert!(check_bip(&t, &p.cycle).holds);
    let mix = check_shift_mixing(&t, 64);
    assert!(mix.mixing, "{mix:?}");
    for (j, &b) in p.cycle.iter().enumerate() {
        let e = &p.elements[b];
        assert_eq!(e.image, (j + 1) % p.base.len());
        assert!(p.base.balls[j].contains_arc(&e.arc, 1e-12));
    }
}

#[test]
fn doubling_partition_on_four_balls() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let p = build_markov_partition(&s, &c, base, 24, 1e-3).unwrap();
    assert_eq!(p.cycle.len(), 4);
    assert!(p.is_complete(), "{}", p.uncovered);
    assert!((p.covered_mass() + p.uncovered - 1.0).abs() < 1e-9);
    check_structure(&s, &p);
    // affine tiles have lengths 0.3 / 2^n
    for e in &p.elements {
        let expect = 0.3 / f64::powi(2.0, e.return_time() as i32);
        assert!((e.arc.len - expect).abs() < 1e-15);
    }
}

#[test]
fn doubling_tripling_partition() {
    let (s, c) = doubling_tripling();
    let base = BaseCover::standard(1.0 / 16.0).unwrap();
    let p = build_markov_partition(&s, &c, base, 24, 1e-3).unwrap();
    assert!(p.uncovered < 1e-3, "{}", p.uncovered);
    check_structure(&s, &p);
}

#[test]
fn unit_partition_for_doubling() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(1, 0.5).unwrap();
    let p = build_markov_partition(&s, &c, base, 4, 1e-9).unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!(p.uncovered, 0.0);
    assert!(p.elements.iter().all(|e| e.return_time() == 1 && e.arc.len == 0.5));
    check_structure(&s, &p);
}

#[test]
fn too_shallow_search_is_a_constructive_failure() {
    let (s, c) = doubling();
    let base = BaseCover::standard(1.0 / 16.0).unwrap();
    match build_markov_partition(&s, &c, base, 1, 1e-3) {
        Err(Error::MixingWitnessMissing { from, to, max_len }) => {
            assert_eq!((from, to, max_len), (1, 2, 1));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn disjoint_attractors_give_no_cycle() {
    let gens = vec![Generator::perturbed(1, 0.0, 0.1), Generator::perturbed(1, 0.0, -0.1)];
    let s = GeneratorSystem::new(gens, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let charts = vec![
        Chart { arc: Arc::new(-0.3, 0.6), generator: 0 },
        Chart { arc: Arc::new(0.2, 0.6), generator: 1 },
    ];
    let c = ExpandingCover::from_charts(charts, 0.99, 0.1).unwrap();
    let base = BaseCover::standard(c.eta / 6.0).unwrap();
    let r = build_markov_partition(&s, &c, base, 6, 1e-3);
    assert!(matches!(r, Err(Error::MixingWitnessMissing { .. })), "{r:?}");
}

#[test]
fn radius_above_eta_over_six_is_rejected_for_partial_charts() {
    let s = GeneratorSystem::uniform(vec![Generator::perturbed(2, 0.0, 0.3), Generator::perturbed(2, 0.0, -0.3)]).unwrap();
    let c = verify_locally_expanding(&s, 1024).unwrap();
    let base = BaseCover::standard(c.eta / 5.0).unwrap();
    assert!(matches!(build_markov_partition(&s, &c, base, 6, 1e-3), Err(Error::InvalidInput(_))));
}

#[test]
fn text_round_trip() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let p = build_markov_partition(&s, &c, base, 24, 1e-2).unwrap();
    let text = p.to_text();
    let q = CountableMarkovPartition::parse(&text).unwrap();
    assert_eq!(q.to_text(), text);
    assert_eq!(q.digest(), p.digest());
    assert_eq!(q.elements.len(), p.elements.len());
    assert!(text.contains("element 1 1.1 9/160 21/160 2 2 1/4"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let bad = "induced-markov partition v1\ntol 1/1000\ncap 4\nbase 1 1/2\nball 1 0 1\nelement 1 1 0 x 1 1 1/2\n";
    match CountableMarkovPartition::parse(bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
        other => panic!("{other:?}"),
    }
}

#[test]
fn transition_matrix_hand_built() {
    let full = TransitionMatrix::from_rows(vec![vec![0, 1], vec![0, 1]]);
    let m = check_shift_mixing(&full, 8);
    assert!(m.mixing);
    assert_eq!(m.power, Some(1));
    assert!(check_bip(&full, &[0]).holds);

    let bip = TransitionMatrix::from_rows(vec![vec![1], vec![0]]);
    let m = check_shift_mixing(&bip, 32);
    assert!(!m.mixing && !m.inconclusive);
    assert_eq!(m.period, Some(2));

    let chain = TransitionMatrix::from_rows(vec![vec![1], vec![2], vec![3], vec![]]);
    let r = check_bip(&chain, &[0]);
    assert!(!r.holds);
    assert_eq!(r.witness, Some(0));

    let own = TransitionMatrix::from_rows(vec![vec![0]]);
    assert!(check_bip(&own, &[0]).holds);
}

#[test]
fn deleting_a_cycle_element_breaks_fcp() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let mut p = build_markov_partition(&s, &c, base, 24, 1e-2).unwrap();
    p.elements.remove(2);
    for (k, e) in p.elements.iter_mut().enumerate() {
        e.index = k;
    }
    p.cycle = vec![0, 1, 2];
    let t = transition_matrix(&p);
    let r = check_fcp(&p, &t);
    assert!(!r.holds);
    assert!(r.witness.is_some());
}

#[test]
fn fip_negative_control() {
    let (s, c) = doubling();
    let base = BaseCover::explicit(4, 0.15).unwrap();
    let mut p = build_markov_partition(&s, &c, base, 24, 1e-2).unwrap();
    p.elements[5].word = Word(vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    let r = check_fip(&s, &p);
    assert!(!r.holds);
    assert_eq!(r.violation, Some(5));
}

#[test]
fn empty_partition_has_finite_images() {
    let (s, _) = doubling();
    let p = CountableMarkovPartition {
        base: BaseCover::explicit(1, 0.5).unwrap(),
        elements: vec![],
        cycle: vec![],
        tol: 1.0,
        cap: 1,
        uncovered: 1.0,
    };
    assert!(check_fip(&s, &p).holds);
}
