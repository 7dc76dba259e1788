//! Property tests against brute-force oracles written here from the definitions.

use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;

use ybe_core::abgroup::{AbHom, FiniteAbelianGroup};
use ybe_core::brace::{AxiomSampling, BraceData};
use ybe_core::family::FamilyParams;
use ybe_core::lattice::HnfBuilder;
use ybe_core::perm::Permutation;
use ybe_core::permgroup::{Letter, PermGroupData};
use ybe_core::retraction::tower_default;
use ybe_core::solution::{validate, FiniteSolution, SigmaTable};
use ybe_core::structgroup::StructureGroup;

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn perm_table(max_n: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(perm(n), n))
}

fn any_table(max_n: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0..n, n), n))
}

struct Oracle {
    involutive: bool,
    non_degenerate: bool,
    braid: bool,
}

/// `r(x, y) = (σ_x(y), σ⁻¹_{σ_x(y)}(x))`, all flags by exhaustion.
/// `None` when some row is not a bijection.
fn oracle(s: &[Vec<usize>]) -> Option<Oracle> {
    let n = s.len();
    let mut inv = vec![vec![0; n]; n];
    for x in 0..n {
        let mut seen = vec![false; n];
        for y in 0..n {
            if seen[s[x][y]] {
                return None;
            }
            seen[s[x][y]] = true;
            inv[x][s[x][y]] = y;
        }
    }
    let r = |x: usize, y: usize| {
        let u = s[x][y];
        (u, inv[u][x])
    };
    let involutive = (0..n).all(|x| (0..n).all(|y| {
        let (u, v) = r(x, y);
        r(u, v) == (x, y)
    }));
    let non_degenerate = (0..n).all(|y| {
        let img: HashSet<usize> = (0..n).map(|x| r(x, y).1).collect();
        img.len() == n
    });
    let mut braid = true;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut a = [x, y, z];
                let mut b = [x, y, z];
                for (i, j) in [(0, 1), (1, 2), (0, 1)] {
                    let (u, v) = r(a[i], a[j]);
                    a[i] = u;
                    a[j] = v;
                }
                for (i, j) in [(1, 2), (0, 1), (1, 2)] {
                    let (u, v) = r(b[i], b[j]);
                    b[i] = u;
                    b[j] = v;
                }
                braid &= a == b;
            }
        }
    }
    Some(Oracle {
        involutive,
        non_degenerate,
        braid,
    })
}

fn relabel(s: &FiniteSolution, pi: &[usize]) -> FiniteSolution {
    let n = s.len();
    let mut rows = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            rows[pi[x]][pi[y]] = pi[s.sigma(x).apply(y)];
        }
    }
    FiniteSolution::new(SigmaTable::new(rows)).expect("relabelled solution")
}

fn small_solutions() -> Vec<FiniteSolution> {
    let z = FiniteAbelianGroup::cyclic;
    let z2_i3 = {
        let id = FamilyParams::eight_point();
        FamilyParams::new(z(2), z(2), 3, id.phi1().clone(), id.phi2().clone()).unwrap()
    };
    vec![
        FamilyParams::eight_point().build(),
        z2_i3.build(),
        FiniteSolution::trivial(5),
        FamilyParams::cyclic_indicator(3, 2, 2).unwrap().build(),
    ]
}

proptest! {
    #[test]
    fn validate_matches_oracle(rows in any_table(4)) {
        let rep = validate(&SigmaTable::new(rows.clone())).unwrap();
        match oracle(&rows) {
            None => prop_assert!(!rep.is_solution() && !rep.non_degenerate.holds),
            Some(o) => {
                prop_assert_eq!(rep.involutive.holds, o.involutive);
                prop_assert_eq!(rep.non_degenerate.holds, o.non_degenerate);
                prop_assert_eq!(rep.braid.holds, o.braid);
                prop_assert_eq!(rep.is_solution(), o.involutive && o.non_degenerate && o.braid);
            }
        }
    }

    #[test]
    fn braid_criteria_agree(rows in perm_table(5)) {
        let rep = validate(&SigmaTable::new(rows)).unwrap();
        prop_assert!(rep.braid_checks_agree(), "{}", rep);
    }

    /// `σ_x = f` for a fixed permutation `f` always gives a solution.
    #[test]
    fn constant_sigma_is_a_solution(f in (1usize..=7).prop_flat_map(perm)) {
        let n = f.len();
        let rep = validate(&SigmaTable::new(vec![f.clone(); n])).unwrap();
        prop_assert!(rep.is_solution());
        let fixes_all = f.iter().enumerate().all(|(i, &y)| i == y);
        prop_assert_eq!(rep.square_free.holds, fixes_all);
        prop_assert!(rep.lri.holds);
    }

    #[test]
    fn isomorphism_search_is_symmetric(
        which in 0usize..4,
        seed in any::<u64>(),
    ) {
        let s = small_solutions().swap_remove(which);
        let n = s.len();
        let mut pi: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            pi.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let t = relabel(&s, &pi);
        prop_assert!(s.is_isomorphism(&t, &pi));
        let eta = s.find_isomorphism(&t).expect("relabelling is an isomorphism");
        prop_assert!(s.is_isomorphism(&t, &eta));
        let back = t.find_isomorphism(&s).expect("inverse exists");
        prop_assert!(t.is_isomorphism(&s, &back));
        let mut eta_inv = vec![0; n];
        for (x, &y) in eta.iter().enumerate() {
            eta_inv[y] = x;
        }
        prop_assert!(t.is_isomorphism(&s, &eta_inv));
        prop_assert_eq!(
            tower_default(&s).unwrap().sizes(n),
            tower_default(&t).unwrap().sizes(n)
        );
    }

    #[test]
    fn hnf_invariants(
        gens in (1usize..=4).prop_flat_map(|d| {
            prop::collection::vec(prop::collection::vec(-20i64..=20, d), d..d + 4)
        }),
        coeffs in prop::collection::vec(-3i64..=3, 8),
    ) {
        let dim = gens[0].len();
        let mut fwd = HnfBuilder::new(dim);
        let mut rev = HnfBuilder::new(dim);
        for g in &gens {
            fwd.insert(g).unwrap();
        }
        for g in gens.iter().rev() {
            rev.insert(g).unwrap();
        }
        prop_assert_eq!(fwd.rank(), rev.rank());
        if let Ok(h) = fwd.finish() {
            prop_assert_eq!(&h, &rev.finish().unwrap());
            let diag = h.diagonal();
            prop_assert!(diag.iter().all(|&d| d > 0));
            for g in &gens {
                prop_assert!(h.contains(g));
            }
            // an integer combination of generators lies in the lattice
            let mut comb = vec![0i64; dim];
            for (g, c) in gens.iter().zip(coeffs.iter().cycle()) {
                for (k, x) in g.iter().enumerate() {
                    comb[k] += c * x;
                }
            }
            prop_assert!(h.contains(&comb));
            // reduced representatives lie in the box and reduction is idempotent
            let mut v: Vec<i64> = coeffs.iter().cycle().take(dim).map(|c| c * 7 + 1).collect();
            h.reduce(&mut v);
            for (x, d) in v.iter().zip(&diag) {
                prop_assert!(*x >= 0 && x < d);
            }
            let mut w = v.clone();
            h.reduce(&mut w);
            prop_assert_eq!(v, w);
        }
    }

    #[test]
    fn hom_additivity(
        src in prop::collection::vec(2u32..=4, 1..=2),
        dst in prop::collection::vec(2u32..=6, 1..=2),
        entries in prop::collection::vec(0i64..6, 4),
    ) {
        let a = FiniteAbelianGroup::new(src.clone()).unwrap();
        let b = FiniteAbelianGroup::new(dst.clone()).unwrap();
        let matrix: Vec<Vec<i64>> = (0..dst.len())
            .map(|r| (0..src.len()).map(|c| entries[r * 2 + c]).collect())
            .collect();
        if let Ok(f) = AbHom::new(a.clone(), b.clone(), matrix).validate() {
            for x in a.elements() {
                for y in a.elements() {
                    prop_assert_eq!(f.apply(&a.add(&x, &y).unwrap()), b.add(&f.apply(&x), &f.apply(&y)).unwrap());
                }
            }
        }
    }

    #[test]
    fn group_order_matches_closure(
        gens in (1usize..=6).prop_flat_map(|n| prop::collection::vec(perm(n), 1..=3)),
    ) {
        let n = gens[0].len();
        let ps: Vec<Permutation> = gens
            .iter()
            .map(|g| Permutation::from_images(g.iter().map(|&x| x as u32).collect()).unwrap())
            .collect();
        let g = PermGroupData::from_generators(n, ps, 10_000).unwrap();
        // breadth-first closure on plain vectors
        let id: Vec<usize> = (0..n).collect();
        let mut seen = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for s in &gens {
                let q: Vec<usize> = (0..n).map(|i| p[s[i]]).collect();
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        prop_assert_eq!(g.order(), seen.len());
        for h in 0..g.order() {
            let w = g.word(h);
            prop_assert_eq!(g.evaluate_word(&w), g.element(h));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `φ(x_1^{e_1} ⋯ x_k^{e_k}) = σ_{x_1}^{e_1} ∘ ⋯ ∘ σ_{x_k}^{e_k}`.
    #[test]
    fn structure_group_permutation_is_the_sigma_product(
        word in prop::collection::vec((0usize..8, any::<bool>()), 0..12),
    ) {
        let s = FamilyParams::eight_point().build();
        let sg = StructureGroup::new(&s).unwrap();
        let letters: Vec<Letter> = word.iter().map(|&(x, i)| Letter::new(x, i)).collect();
        let g = sg.from_word(&letters).unwrap();
        let mut p = Permutation::identity(8);
        for &(x, inverse) in &word {
            let q = if inverse { s.sigma(x).inverse() } else { s.sigma(x).clone() };
            p = p.compose(&q);
        }
        prop_assert_eq!(&g.perm, &p);
        prop_assert_eq!(g.deg(), StructureGroup::word_degree(&letters));
        prop_assert_eq!(sg.perm_of_vector(&g.v).unwrap(), p);
        let gi = sg.inv(&g);
        prop_assert!(sg.mul(&g, &gi).is_identity());
    }

    #[test]
    fn sampled_brace_axioms_hold(which in 0usize..3, seed in any::<u64>()) {
        let params = [
            FamilyParams::eight_point(),
            FamilyParams::cyclic_indicator(3, 2, 1).unwrap(),
            FamilyParams::cyclic_indicator(2, 3, 1).unwrap(),
        ];
        let s = params[which].build();
        let g = PermGroupData::enumerate(&s, 100_000).unwrap();
        let b = BraceData::build(g).unwrap();
        let rep = b.verify_brace_axioms(AxiomSampling::Random { count: 500, seed });
        prop_assert!(rep.passes(), "{:?}", rep);
    }
}
