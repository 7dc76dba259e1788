//! End-to-end runs through the public API on small parameter sets.

use ybe_core::brace::{AxiomSampling, BraceData};
use ybe_core::format::{parse_params, parse_solution, write_solution};
use ybe_core::permgroup::{Nilpotency, PermGroupData, DEFAULT_CAP};
use ybe_core::retraction::{tower_default, TowerClass};
use ybe_core::solution::FiniteSolution;
use ybe_core::wreath::wreath_check;

// Orders from an independent breadth-first closure over the σ tables.
const CASES: &[(&str, usize)] = &[
    ("A = Z/2\nB = Z/2\nI = 3\nphi1: 0 -> 0\nphi1: 1 -> 1\nphi2 = [[1]]\n", 256),
    ("A = Z/2\nB = Z/2\nI = 2\nphi1: 0 -> 1\nphi1: 1 -> 1\nphi2 = [[1]]\n", 16),
    ("A = Z/2\nB = Z/2\nI = 2\nphi1: 0 -> 0\nphi1: 1 -> 0\nphi2 = [[1]]\n", 4),
    ("A = Z/3\nB = Z/3\nI = 2\nphi1: 0 -> 2\nphi1: 1 -> 2\nphi1: 2 -> 2\nphi2 = [[1]]\n", 81),
    (
        "A = Z/4\nB = Z/2 x Z/2\nI = 2\nphi1: 0 -> 0,0\nphi1: 1 -> 1,0\nphi1: 2 -> 0,0\nphi1: 3 -> 1,0\nphi2 = [[2,0]]\n",
        64,
    ),
    ("A = Z/2\nB = Z/3\nI = 3\nphi1: 0 -> 1\nphi1: 1 -> 1\nphi2 = [[0]]\n", 27),
];

#[test]
fn orders_match_closure_oracle() {
    for (text, order) in CASES {
        let p = parse_params(text).unwrap().params;
        let s = p.build();
        let g = PermGroupData::enumerate(&s, DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), *order, "{text}");
        let a = g.analyze();
        let w = wreath_check(&p, &g, &a).unwrap();
        assert!(w.nu_homomorphic && w.nu_injective, "{text}");
        assert!(!w.applicable);
        // every group here is a p-group for p = 2 or 3, hence nilpotent
        assert!(matches!(a.nilpotency_class, Nilpotency::Class(_)), "{text}");
        let b = BraceData::build(g).unwrap();
        assert_eq!(b.quotient_size(), (*order).into());
        assert!(b.verify_brace_axioms(AxiomSampling::Random { count: 2000, seed: 1 }).passes());
    }
}

#[test]
fn solution_files_round_trip_through_the_pipeline() {
    let p = parse_params(CASES[0].0).unwrap().params;
    let s = p.build();
    let t = FiniteSolution::new(parse_solution(&write_solution(&s)).unwrap()).unwrap();
    assert_eq!(s, t);
    assert_eq!(
        tower_default(&t).unwrap().classification,
        TowerClass::Irretractable
    );
}

#[test]
fn socle_of_retractable_trivial_solution_is_trivial() {
    let s = FiniteSolution::trivial(2);
    assert_eq!(
        tower_default(&s).unwrap().classification,
        TowerClass::MultipermutationLevel(1)
    );
    let b = BraceData::build(PermGroupData::enumerate(&s, 10).unwrap()).unwrap();
    assert_eq!(b.socle().len(), 1);
}
