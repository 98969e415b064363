use induced_markov::induced::*;
use induced_markov::partition::{build_markov_partition, BaseCover};
use induced_markov::semigroup::{apply_word, verify_locally_expanding, ExpandingCover, Generator, GeneratorSystem};
use induced_markov::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(gens: Vec<Generator>, n: Option<usize>, eps: f64, tol: f64) -> (InducedMap, ExpandingCover) {
    let s = GeneratorSystem::uniform(gens).unwrap();
    let c = verify_locally_expanding(&s, 1024).unwrap();
    let base = match n {
        Some(n) => BaseCover::explicit(n, eps).unwrap(),
        None => BaseCover::standard(eps).unwrap(),
    };
    let p = build_markov_partition(&s, &c, base, 24, tol).unwrap();
    (induce(&s, p), c)
}

fn doubling4() -> (InducedMap, ExpandingCover) {
    setup(vec![Generator::affine(2, 0.0)], Some(4), 0.15, 1e-3)
}

fn interior_point(map: &InducedMap, rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x: f64 = rng.gen();
        if map.locate(x).is_ok() {
            return x;
        }
    }
}

#[test]
fn dispatch_and_return_times() {
    let (map, _) = doubling4();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let x = interior_point(&map, &mut rng);
        let i = map.locate(x).unwrap();
        let e = &map.partition.elements[i];
        let y = apply_word(&map.system, &e.word, x.into()).unwrap();
        assert_eq!(map.apply(x).unwrap(), y.value());
    }
    let e = &map.partition.elements[3];
    assert!(matches!(map.apply(e.arc.lo), Err(Error::BoundaryOrbit { step: 0, .. })));
    let three = map.partition.elements.iter().position(|e| e.word.len() == 3).unwrap();
    assert_eq!(map.return_time(three), 3);
    let x = map.partition.elements[three].arc.midpoint();
    assert!((map.branch_derivative(three, x) - 8.0).abs() < 1e-12);
}

#[test]
fn cylinder_refinement() {
    let (map, _) = doubling4();
    let c = map.refine_cylinder(&[7]).unwrap();
    assert_eq!(c.arc, map.partition.elements[7].arc);

    let (unit, _) = setup(vec![Generator::affine(2, 0.0)], Some(1), 0.5, 1e-9);
    let c = unit.refine_cylinder(&[0, 1]).unwrap();
    assert!((c.arc.lo - 0.25).abs() < 1e-15 && (c.arc.len - 0.25).abs() < 1e-15);
    assert_eq!(c.total_time, 2);

    let sigma = 0.5;
    for w in sample_cylinders(&map, 50, 11, 3) {
        let c = map.refine_cylinder(&w).unwrap();
        let tau: usize = w[..w.len() - 1].iter().map(|&i| map.return_time(i)).sum();
        let last = map.partition.elements[*w.last().unwrap()].arc.len;
        // endpoints near 1 carry absolute rounding of order 1e-16
        assert!(c.arc.len <= f64::powi(sigma, tau as i32) * last + 1e-15);
    }
}

#[test]
fn forbidden_cylinder_is_rejected() {
    let (map, _) = doubling4();
    let (i, j) = (0..map.len())
        .flat_map(|i| (0..map.len()).map(move |j| (i, j)))
        .find(|&(i, j)| !map.matrix.get(i, j))
        .unwrap();
    assert!(matches!(map.refine_cylinder(&[i, j]), Err(Error::ForbiddenTransition { .. })));
}

#[test]
fn inverse_branch_counts_and_disjointness() {
    let (map, _) = setup(vec![Generator::affine(2, 0.0)], Some(4), 0.15, 5e-2);
    let preds = map.predecessors();
    let k = 2;
    let one = map.inverse_branches(k, 1).unwrap();
    assert_eq!(one.len(), preds[k].len());
    let two = map.inverse_branches(k, 2).unwrap();
    let paths: usize = preds[k].iter().map(|&p| preds[p].len()).sum();
    assert_eq!(two.len(), paths);
    let mut arcs: Vec<_> = two.iter().map(|c| c.arc).collect();
    arcs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    for w in arcs.windows(2) {
        assert!(w[0].hi() <= w[1].lo + 1e-12);
    }
}

#[test]
fn doubling_scheme_holds() {
    let (map, cover) = doubling4();
    let r = verify_inducing_scheme(&map, &cover, 7);
    assert!(r.all_hold(), "{r:#?}");
    assert_eq!(r.h5.value, 1.0);
    assert!(r.h4.value >= 2.0);
}

#[test]
fn unit_partition_fails_h2() {
    let (map, cover) = setup(vec![Generator::affine(2, 0.0)], Some(1), 0.5, 1e-9);
    let r = verify_inducing_scheme(&map, &cover, 7);
    assert_eq!(r.failures(), vec!["H2"]);
}

#[test]
fn perturbed_distortion_below_analytic_bound() {
    let (map, cover) = setup(vec![Generator::perturbed(2, 0.0, 0.01)], None, 1.0 / 16.0, 1e-2);
    let r = verify_inducing_scheme(&map, &cover, 7);
    assert!(r.all_hold(), "{r:#?}");
    assert!(r.h5.value > 1.0);
    let k1 = analytic_k1(&map, cover.sigma);
    let pi = std::f64::consts::PI;
    let c0 = 4.0 * pi * pi * 0.01 / (2.0 - 0.02 * pi);
    assert!((k1 - (c0 * 0.125 / (1.0 - cover.sigma)).exp()).abs() < 1e-12);

    let cyl = sample_cylinders(&map, 100, 6, 11);
    let d = distortion_bound_induced(&map, &cyl, 7, cover.sigma);
    assert!(d.holds && d.empirical > 1.0, "{d:?}");
    let d0 = distortion_bound_induced(&map, &cyl, 0, cover.sigma);
    assert_eq!(d0.empirical, 1.0);
}

#[test]
fn affine_distortion_is_one() {
    let (map, cover) = doubling4();
    let cyl = sample_cylinders(&map, 50, 6, 5);
    let d = distortion_bound_induced(&map, &cyl, 6, cover.sigma);
    assert_eq!(d.empirical, 1.0);
    assert_eq!(d.analytic, 1.0);
}

#[test]
fn encode_periodic_and_fixed_points() {
    let (map, _) = doubling4();
    let it = map.encode(1.0 / 3.0, 8).unwrap();
    for t in 0..6 {
        assert_eq!(it[t], it[t + 2]);
    }
    // a self-mapping element with word 1^tau fixes k / (2^tau - 1)
    let (i, x) = (0..map.len())
        .filter(|&i| map.matrix.get(i, i))
        .find_map(|i| {
            let m = f64::powi(2.0, map.return_time(i) as i32) - 1.0;
            let a = map.partition.elements[i].arc;
            (0..m as usize).map(|k| k as f64 / m).find(|&x| a.contains(x)).map(|x| (i, x))
        })
        .unwrap();
    assert_eq!(map.encode(x, 5).unwrap(), vec![i; 5]);
    let lo = map.partition.elements[0].arc.lo;
    assert!(matches!(map.encode(lo, 3), Err(Error::BoundaryOrbit { step: 0, .. })));
}

#[test]
fn coding_conjugates_shift_and_map() {
    let (map, _) = doubling4();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 100 {
        let x = interior_point(&map, &mut rng);
        let Ok(s) = map.encode(x, 6) else { continue };
        let (arc, mid, half) = map.decode(&s).unwrap();
        assert!(arc.contains_closed(x) && (mid - x).abs() <= half + 1e-15 || arc.contains(x));
        let tx = map.apply(x).unwrap();
        assert_eq!(map.encode(tx, 5).unwrap(), s[1..].to_vec());
        let (tail, _, _) = map.decode(&s[1..]).unwrap();
        assert!(tail.contains_closed(tx));
        done += 1;
    }
}

#[test]
fn decoded_width_decays() {
    let (map, _) = setup(vec![Generator::affine(2, 0.0)], Some(1), 0.5, 1e-9);
    let d0 = map.partition.max_diameter();
    let x = 0.123456789;
    let s = map.encode(x, 13).unwrap();
    let (arc, _, _) = map.decode(&s).unwrap();
    assert!(arc.len <= d0 * f64::powi(2.0, -12));
    assert!(arc.contains(x));
}

#[test]
fn cycle_elements_reach_every_element() {
    let (map, _) = setup(vec![Generator::affine(2, 0.0)], Some(4), 0.15, 5e-2);
    let n = map.partition.base.len();
    let b = map.partition.cycle[0];
    let mut reach = vec![false; map.len()];
    reach[b] = true;
    for _ in 0..=n {
        let mut next = vec![false; map.len()];
        for i in (0..map.len()).filter(|&i| reach[i]) {
            for &j in map.matrix.row(i) {
                next[j] = true;
            }
        }
        reach = next;
    }
    assert!(reach.iter().all(|&r| r));
}

#[test]
fn return_time_integral_is_monotone_and_bounded() {
    let integral = |tol: f64| {
        let (map, _) = setup(vec![Generator::affine(2, 0.0)], Some(4), 0.15, tol);
        map.partition
            .elements
            .iter()
            .map(|e| e.return_time() as f64 * e.arc.len)
            .sum::<f64>()
    };
    let (a, b) = (integral(1e-2), integral(1e-4));
    assert!(a <= b && b < 10.0, "{a} {b}");
}

#[test]
fn itinerary_dump_round_trip() {
    let (map, _) = doubling4();
    let digest = map.partition.digest();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (x, y) = (interior_point(&map, &mut rng), interior_point(&map, &mut rng));
    let orbits = vec![map.encode(x, 4).unwrap(), map.encode(y, 3).unwrap()];
    let text = dump_itineraries(&digest, &orbits);
    assert_eq!(parse_itineraries(&text, &digest).unwrap(), orbits);
    assert!(parse_itineraries(&text, "0000").is_err());
}
