use induced_markov::induced::{induce, InducedMap};
use induced_markov::measures::*;
use induced_markov::partition::{build_markov_partition, BaseCover};
use induced_markov::semigroup::{verify_locally_expanding, Generator, GeneratorSystem};
use induced_markov::thermo::{equilibrium_check, transfer_gibbs, ProjectedPotential, GIBBS_TOL};
use induced_markov::Error;

fn build(gens: Vec<Generator>, base: BaseCover) -> InducedMap {
    let s = GeneratorSystem::uniform(gens).unwrap();
    let c = verify_locally_expanding(&s, 1024).unwrap();
    let p = build_markov_partition(&s, &c, base, 24, 1e-3).unwrap();
    induce(&s, p)
}

fn unit(gens: Vec<Generator>) -> InducedMap {
    build(gens, BaseCover::explicit(1, 0.5).unwrap())
}

fn triangle(bins: usize) -> UlamDensity {
    UlamDensity::from_density(bins, |x| if x < 0.5 { 4.0 * x } else { 4.0 * (1.0 - x) })
}

#[test]
fn perron_examples() {
    let p = perron_vector(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    assert!((p.p[0] - 0.5).abs() < 1e-12 && p.residual <= PERRON_TOL);
    let p = perron_vector(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
    assert!((p.p[0] - 5.0 / 6.0).abs() < 1e-11 && (p.p[1] - 1.0 / 6.0).abs() < 1e-11);
    assert!(p.residual <= PERRON_TOL);
    let p = perron_vector(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert_eq!(p.p, vec![0.5, 0.5]);

    assert!(matches!(perron_vector(&[vec![1.0, 0.0], vec![0.5, 0.5]]), Err(Error::Reducible(1, 2))));
    assert!(matches!(perron_vector(&[vec![0.7, 0.7], vec![0.5, 0.5]]), Err(Error::InvalidInput(_))));
}

#[test]
fn doubling_acip_is_lebesgue() {
    let map = unit(vec![Generator::affine(2, 0.0)]);
    assert!(map.partition.elements.iter().all(|e| e.return_time() == 1));
    let r = acip_pushforward(&map, 256, 50, 1e-9).unwrap();
    assert!(r.exact && r.converged);
    assert!(r.density.distance_from_lebesgue() < 1e-12);
    assert!((r.c0 - 1.0).abs() < 1e-12 && r.analytic_c0 == 1.0);
    assert!(r.deficit.abs() < 1e-12);

    let one = acip_pushforward(&map, 64, 1, 1e-9).unwrap();
    assert_eq!(one.density, UlamDensity::lebesgue(64));
    assert!(matches!(acip_pushforward(&map, 100, 5, 1e-9), Err(Error::InvalidInput(_))));
    assert!(acip_pushforward(&map, 32, 5, 1e-9).is_err());
}

#[test]
fn transport_conserves_mass() {
    let map = unit(vec![Generator::perturbed(2, 0.0, 0.01)]);
    let mu = triangle(128);
    let (img, lost) = transport(&map, &mu);
    assert!(lost.abs() < 1e-12 && (img.mass() - 1.0).abs() < 1e-12);
    let map = unit(vec![Generator::affine(3, 0.0)]);
    let (img, lost) = transport(&map, &mu);
    assert!(lost.abs() < 1e-12 && (img.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn perturbed_acip_is_close_to_lebesgue_and_bin_stable() {
    let map = unit(vec![Generator::perturbed(2, 0.0, 0.01)]);
    let tol = 1e-4;
    let a = acip_pushforward(&map, 256, 200, tol).unwrap();
    let b = acip_pushforward(&map, 512, 200, tol).unwrap();
    assert!(a.converged && b.converged && !a.exact);
    assert!(b.density.min_density() >= 0.8 && b.density.max_density() <= 1.2);
    assert!(b.within_distortion_band());
    assert!(b.density.coarsen(2).unwrap().tv(&a.density) <= 2.0 * tol);
}

#[test]
fn rokhlin_entropy_of_affine_maps() {
    for a in [2u32, 3] {
        let map = unit(vec![Generator::affine(a, 0.0)]);
        let e = rokhlin_entropy(&map, &UlamDensity::lebesgue(64));
        assert!((e.entropy - (a as f64).ln()).abs() < 1e-12 && e.exact);
    }
    // each affine element contributes mu(M_k) tau_k log 2
    let map = build(vec![Generator::affine(2, 0.0)], BaseCover::explicit(4, 0.15).unwrap());
    let mu = UlamDensity::lebesgue(1024);
    let e = rokhlin_entropy(&map, &mu);
    let (mut num, mut den) = (0.0, 0.0);
    for el in &map.partition.elements {
        let m = mu.mass_of(el.arc.lo, el.arc.hi());
        num += m * el.return_time() as f64 * 2f64.ln();
        den += m;
    }
    assert!((e.entropy - num / den).abs() < 1e-12);
    assert!((e.covered - den).abs() < 1e-12);
}

#[test]
fn rokhlin_matches_symbolic_entropy() {
    let map = unit(vec![Generator::perturbed(2, 0.0, 0.01)]);
    let acip = acip_pushforward(&map, 512, 200, 1e-6).unwrap();
    let e = rokhlin_entropy(&map, &acip.density);
    assert!((e.entropy - 2f64.ln()).abs() < 1e-3);

    let phi = ProjectedPotential::new(&map, |x: f64| -map.branch_derivative(map.locate(x).unwrap_or(0), x).ln(), 0.0, 1.0)
        .unwrap()
        .on_elements();
    let g = transfer_gibbs(&map.matrix, &phi, GIBBS_TOL).unwrap();
    let eq = equilibrium_check(&g, &phi, g.pressure).unwrap();
    assert!((eq.entropy - e.entropy).abs() < 1e-2, "{} vs {}", eq.entropy, e.entropy);
}

#[test]
fn birkhoff_averages() {
    let map = unit(vec![Generator::affine(2, 0.0)]);
    let avg = birkhoff_average(&map, log_jacobian(&map), 0.123_456_7, 40).unwrap();
    assert!(avg.iter().all(|v| (v - 2f64.ln()).abs() < 1e-15));
    let avg = birkhoff_average(&map, |_, _| 0.25, 0.3, 30).unwrap();
    assert!(avg.iter().all(|&v| v == 0.25));
    // binary doubling runs into 0, which is an element endpoint
    assert!(matches!(
        birkhoff_average(&map, |_, _| 0.0, 0.375, 10),
        Err(Error::BoundaryOrbit { step: 2, .. })
    ));
}

#[test]
fn birkhoff_spread_of_a_mixing_map() {
    let map = unit(vec![Generator::perturbed(2, 0.0, 0.01)]);
    let s = birkhoff_spread(&map, log_jacobian(&map), 100_000, 10, 42).unwrap();
    assert_eq!(s.finals.len(), 10);
    assert!(s.spread <= 0.01, "{}", s.spread);
    let again = birkhoff_spread(&map, log_jacobian(&map), 100_000, 10, 42).unwrap();
    assert_eq!(s, again);
}

#[test]
fn lift_of_single_level_tower() {
    let map = unit(vec![Generator::affine(2, 0.0)]);
    let m = lift_measure(&map, &UlamDensity::lebesgue(128), &[1.0], 1e-3).unwrap();
    assert!((m.q - 1.0).abs() < 1e-12 && !m.flagged);
    assert!(m.components[0].distance_from_lebesgue() < 1e-12);
    assert!(check_stationary(&map.system, &m).unwrap().residual < 1e-12);
}

#[test]
fn lebesgue_preserving_pair_lifts_to_lebesgue_fibers() {
    let map = unit(vec![Generator::affine(2, 0.0), Generator::affine(3, 0.0)]);
    let acip = acip_pushforward(&map, 512, 20, 1e-9).unwrap();
    let p = perron_vector(&map.system.driving).unwrap();
    let m = lift_measure(&map, &acip.density, &p.p, 1e-3).unwrap();
    for c in &m.components {
        assert!((c.mass() - 0.5).abs() < 1e-12);
        for b in 0..c.bins() {
            assert!((c.density(b) - 0.5).abs() < 1e-12);
        }
    }
    let r = check_stationary(&map.system, &m).unwrap();
    assert!(r.exact && r.residual < 1e-12);
}

#[test]
fn perturbed_pair_is_nearly_stationary() {
    let map = unit(vec![Generator::perturbed(2, 0.0, 0.01), Generator::perturbed(3, 0.0, 0.01)]);
    let acip = acip_pushforward(&map, 512, 200, 1e-6).unwrap();
    let p = perron_vector(&map.system.driving).unwrap();
    let m = lift_measure(&map, &acip.density, &p.p, 1e-3).unwrap();
    assert!((m.mass() - 1.0).abs() < 1e-12);
    assert!(check_stationary(&map.system, &m).unwrap().residual <= 1e-3);
}

#[test]
fn tower_lift_with_longer_words() {
    let map = build(vec![Generator::affine(2, 0.0)], BaseCover::explicit(4, 0.15).unwrap());
    let mu = UlamDensity::lebesgue(256);
    let m = lift_measure(&map, &mu, &[1.0], 1e-2).unwrap();
    let q: f64 = map
        .partition
        .elements
        .iter()
        .map(|e| e.return_time() as f64 * e.arc.len)
        .sum();
    assert!((m.q - q).abs() < 1e-9);
    assert!((m.deficit - map.partition.uncovered).abs() < 1e-9);
    assert!((m.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn triangle_density_is_not_stationary() {
    let s = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0)]).unwrap();
    let tri = triangle(4);
    assert!((tri.weights[0] - 0.125).abs() < 1e-15 && (tri.weights[1] - 0.375).abs() < 1e-15);
    let m = FiberedMeasure::product(&[1.0], &tri);
    let r = check_stationary(&s, &m).unwrap();
    assert!((r.residual - 0.25).abs() < 1e-12);

    let leb = FiberedMeasure::product(&[1.0], &UlamDensity::lebesgue(4));
    assert_eq!(check_stationary(&s, &leb).unwrap().residual, 0.0);
}

#[test]
fn skew_product_occupation() {
    let s = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0), Generator::affine(3, 0.0)]).unwrap();
    let good = FiberedMeasure::product(&[0.5, 0.5], &UlamDensity::lebesgue(64));
    let r = skew_invariance_check(&s, &good, 200_000, 7).unwrap();
    assert!(r.holds, "{r:?}");
    assert_eq!(r.cells, 2 * SKEW_CELLS);
    let bad = FiberedMeasure::product(&[0.5, 0.5], &triangle(64));
    let r = skew_invariance_check(&s, &bad, 200_000, 7).unwrap();
    assert!(!r.holds && r.residual > 0.01);

    let one = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0)]).unwrap();
    let r = skew_invariance_check(&one, &FiberedMeasure::product(&[1.0], &UlamDensity::lebesgue(64)), 50_000, 1).unwrap();
    assert!(r.holds && r.cells == SKEW_CELLS);
}

#[test]
fn csv_exports() {
    let d = UlamDensity::lebesgue(64);
    let csv = d.to_csv();
    assert_eq!(csv.lines().count(), 65);
    assert!(csv.lines().nth(2).unwrap().starts_with("2,1.5625"));
    let m = FiberedMeasure::product(&[0.25, 0.75], &d);
    let csv = m.to_csv();
    assert_eq!(csv.lines().count(), 129);
    assert!(csv.lines().nth(65).unwrap().starts_with("2,1,0.0"));
}
