mod common;

use common::{exact_polygon_is_simple, random_polygon};
use formspace::cem::solve_equilibrium;
use formspace::filter::{accept_form, polygon_is_simple, segment_tolerance, segments_properly_intersect, ProjectionAxis, RejectReason};
use formspace::generator::{expand_params, sample_params, MappingConfig, Overrides, TopologySpec};
use formspace::vector::{Vec2, Vec3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v2(p: &[(f64, f64)]) -> Vec<Vec2<f64>> {
    p.iter().map(|&(x, y)| Vec2::new(x, y)).collect()
}

#[test]
fn ring_examples() {
    let square = v2(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
    assert!(polygon_is_simple(&square));
    let bowtie = v2(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]);
    assert!(!polygon_is_simple(&bowtie));
}

#[test]
fn segment_examples() {
    let s = |a: (f64, f64), b: (f64, f64)| (Vec2::new(a.0, a.1), Vec2::new(b.0, b.1));
    let hit = |a, b| segments_properly_intersect(a, b, segment_tolerance(a, b));
    assert!(hit(s((0., 0.), (1., 1.)), s((0., 1.), (1., 0.))));
    assert!(!hit(s((0., 0.), (1., 0.)), s((1., 0.), (2., 0.))));
    assert!(hit(s((0., 0.), (2., 0.)), s((1., 0.), (3., 0.))));
}

#[test]
fn ring_simplicity_matches_exact_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut simple = 0;
    for case in 0..500 {
        let poly = random_polygon(&mut rng);
        let expected = exact_polygon_is_simple(&poly);
        let got = polygon_is_simple(&poly.iter().map(|&(x, y)| Vec2::new(x as f64, y as f64)).collect::<Vec<_>>());
        assert_eq!(got, expected, "case {case}: {poly:?}");
        simple += usize::from(expected);
    }
    assert!(simple > 50 && simple < 450, "oracle suite is lopsided: {simple} simple of 500");
}

fn random_form(seed: u64) -> Option<(formspace::Topology, formspace::Form)> {
    let spec = TopologySpec::default();
    let topo = spec.build_topology::<f64>().unwrap();
    let p = sample_params(seed, &Overrides::new()).unwrap();
    let inputs = expand_params::<f64>(&p, &spec, &MappingConfig::default()).unwrap();
    let form = solve_equilibrium(&topo, &inputs).ok()?;
    Some((topo, form))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdict_ignores_rotation_and_scale(seed in any::<u64>(), angle in -3.2f64..3.2, scale in 0.01f64..100.0) {
        if let Some((topo, form)) = random_form(seed) {
            let verdict = accept_form(&form, &topo, ProjectionAxis::Z);
            let mut moved = form.clone();
            for p in moved.positions.iter_mut() {
                *p = p.rotate_z(angle) * scale;
            }
            prop_assert_eq!(accept_form(&moved, &topo, ProjectionAxis::Z).accepted, verdict.accepted);
            // idempotent
            prop_assert_eq!(accept_form(&form, &topo, ProjectionAxis::Z), verdict);
        }
    }

    #[test]
    fn square_grid_is_invariant(scale in 1e-3f64..1e3, dx in -1e3f64..1e3, dy in -1e3f64..1e3) {
        let poly: Vec<Vec2<f64>> = [(0., 0.), (2., 0.), (2., 2.), (1., 3.), (0., 2.)]
            .iter()
            .map(|&(x, y)| Vec2::new(x * scale + dx, y * scale + dy))
            .collect();
        prop_assert!(polygon_is_simple(&poly));
    }
}

#[test]
fn symmetric_radial_form_is_accepted() {
    let spec = TopologySpec::default();
    let topo = spec.build_topology::<f64>().unwrap();
    // constant moderate compression rings and zero ring frequencies
    let mut p = formspace::generator::DesignParams::uniform(0).unwrap();
    for (n, v) in [("A_D", 45), ("R", 50), ("L", 50), ("A_H", 50)] {
        p.set(n.parse().unwrap(), v).unwrap();
    }
    let inputs = expand_params::<f64>(&p, &spec, &MappingConfig::default()).unwrap();
    let form = solve_equilibrium(&topo, &inputs).unwrap();
    assert!(accept_form(&form, &topo, ProjectionAxis::Z).accepted);
    // flatten one ring node across the centre: rings fold
    let mut broken = form.clone();
    let v = spec.vertex(3, 0);
    broken.positions[v] = Vec3::new(-broken.positions[v].x * 3.0, 0.1, broken.positions[v].z);
    assert!(!accept_form(&broken, &topo, ProjectionAxis::Z).accepted);
    let _ = RejectReason::DegenerateSolve;
}
