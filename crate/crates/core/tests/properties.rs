//! Cross-module properties checked against independent oracles: closed-form
//! pressures, brute-force orbit counts and rescaling identities.

use proptest::prelude::*;

use rotset_core::gallery::{Example2Spec, GalleryPotential};
use rotset_core::perorbit::{count_in_ball, h_per, per_count, CountMode, CountOptions};
use rotset_core::potential::TablePotential;
use rotset_core::rotgeom::{rotation_polytope, support};
use rotset_core::sft::Sft;
use rotset_core::thermo::{newton, PressureEngine, RotationSolver, SolveOptions};

fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Every cyclic word of length `n` on the full `d`-shift, as symbol lists.
fn all_words(d: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..d as u8).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

fn table_strategy(d: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, m), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // A per-symbol potential on the full shift has a rank-one transfer
    // matrix, so Q(T) = log Σ_s exp(T·φ(s)).
    #[test]
    fn pressure_of_symbol_potential_is_log_sum_exp(
        vals in table_strategy(3, 2),
        t in prop::collection::vec(-4.0f64..4.0, 2),
    ) {
        let s = Sft::full(3);
        let p = TablePotential::per_symbol(&s, &vals).unwrap();
        let q = PressureEngine::new(&s, &p).unwrap().pressure(&t).unwrap().q;
        let expect = log_sum_exp(&vals.iter().map(|v| v[0] * t[0] + v[1] * t[1]).collect::<Vec<_>>());
        prop_assert!((q - expect).abs() < 1e-10, "{q} vs {expect}");
    }

    #[test]
    fn adding_a_constant_shifts_pressure(vals in table_strategy(2, 1), c in 0.01f64..3.0) {
        let s = Sft::golden_mean();
        let p = TablePotential::from_fn(&s, 2, 1, |w| vec![vals[w[0] as usize][0] - 0.5 * vals[w[1] as usize][0]]).unwrap();
        let q0 = PressureEngine::new(&s, &p).unwrap().pressure(&[1.0]).unwrap().q;
        let q1 = PressureEngine::new(&s, &p.shifted(&[c])).unwrap().pressure(&[1.0]).unwrap().q;
        prop_assert!((q1 - q0 - c).abs() < 1e-10);
    }

    #[test]
    fn gradient_lies_inside_the_polytope(
        vals in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 4),
        t in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        let s = Sft::full(2);
        let p = TablePotential::from_fn(&s, 2, 2, |w| vals[(2 * w[0] + w[1]) as usize].clone()).unwrap();
        let poly = rotation_polytope(&s, &p).unwrap();
        prop_assume!(poly.dim == 2);
        let (_, g) = PressureEngine::new(&s, &p).unwrap().gradient(&t).unwrap();
        prop_assert!(poly.interior_margin(&g) > 0.0);
    }

    #[test]
    fn support_queries_agree_with_polytope(
        vals in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 4),
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let s = Sft::full(2);
        let p = TablePotential::from_fn(&s, 2, 2, |w| vals[(2 * w[0] + w[1]) as usize].clone()).unwrap();
        let u = [angle.cos(), angle.sin()];
        let poly = rotation_polytope(&s, &p).unwrap();
        let q = support(&s, &p, &u).unwrap();
        prop_assert!((q.value - poly.support(&u)).abs() < 1e-12);
    }

    // Solving for sΦ at target s·w gives T*/s and the same entropy.
    #[test]
    fn argmax_invariance(vals in table_strategy(2, 1), w in 0.2f64..0.8, scale in 0.25f64..4.0) {
        prop_assume!((vals[0][0] - vals[1][0]).abs() > 0.3);
        let s = Sft::full(2);
        let p = TablePotential::per_symbol(&s, &vals).unwrap();
        let lo = vals[0][0].min(vals[1][0]);
        let hi = vals[0][0].max(vals[1][0]);
        let target = lo + w * (hi - lo);
        let a = RotationSolver::new(&s, &p).unwrap().solve(&[target], &SolveOptions::default()).unwrap();
        let b = RotationSolver::new(&s, &p.scaled(scale))
            .unwrap()
            .solve(&[scale * target], &SolveOptions::default())
            .unwrap();
        prop_assert!((a.h - b.h).abs() < 1e-8);
        prop_assert!((a.t_star[0] - scale * b.t_star[0]).abs() < 1e-6 * (1.0 + a.t_star[0].abs()));
    }

    // Enumeration is exact; the DP bracket must contain it.
    #[test]
    fn dp_bracket_contains_exact_ball_count(
        vals in prop::collection::vec(-1.0f64..1.0, 4),
        w in -1.0f64..1.0,
        r in 0.05f64..0.6,
        n in 2usize..10,
    ) {
        let s = Sft::full(2);
        let p = TablePotential::from_fn(&s, 2, 1, |x| vec![vals[(2 * x[0] + x[1]) as usize]]).unwrap();
        let exact = count_in_ball(&s, &p, &[w], r, n, &CountOptions { mode: CountMode::Enumerate, ..CountOptions::default() }).unwrap();
        let dp = count_in_ball(&s, &p, &[w], r, n, &CountOptions { mode: CountMode::Dp, q: Some(1.0 / 64.0), ..CountOptions::default() }).unwrap();
        prop_assert_eq!(exact.lower, exact.upper);
        prop_assert!(dp.lower <= exact.lower && exact.lower <= dp.upper, "{:?} vs {:?}", dp, exact);

        // Brute force over every word read cyclically.
        let brute = all_words(2, n)
            .iter()
            .filter(|x| {
                let mean = (0..n).map(|i| vals[(2 * x[i] + x[(i + 1) % n]) as usize]).sum::<f64>() / n as f64;
                (mean - w).abs() < r
            })
            .count() as u128;
        prop_assert_eq!(exact.lower, brute);
    }
}

#[test]
fn identity_matrix_has_two_periodic_points() {
    let s = Sft::from_flat(2, vec![true, false, false, true]).unwrap();
    for n in 1..6 {
        assert_eq!(per_count(&s, n).unwrap().to_string(), "2");
    }
}

#[test]
fn growth_never_exceeds_topological_entropy() {
    let s = Sft::golden_mean();
    let p = TablePotential::per_symbol(&s, &[vec![0.0], vec![1.0]]).unwrap();
    let ns: Vec<usize> = (1..=18).collect();
    let ceiling = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    for w in [0.1, 0.25, 0.4] {
        let g = h_per(&s, &p, &[w], 0.1, &ns, &CountOptions::default()).unwrap();
        assert!(g.estimate <= ceiling + 0.02, "w={w}: {} > {ceiling}", g.estimate);
    }
}

// Pressures of the two truncations differ by at most ‖T‖₁·ε with ε the sum
// of their sup errors, so the Legendre duals differ by at most
// max(‖T₅*‖₁, ‖T₆*‖₁)·ε.
#[test]
fn gallery_truncation_refinement() {
    let build = |depth| GalleryPotential::build(Example2Spec { depth, ..Example2Spec::new(6) }).unwrap();
    let (g5, g6) = (build(5), build(6));
    let eps = g5.bound().sup_error + g6.bound().sup_error;
    let e5 = PressureEngine::new(&g5.sft(), g5.table()).unwrap();
    let e6 = PressureEngine::new(&g6.sft(), g6.table()).unwrap();
    let l1 = |t: &[f64]| t.iter().map(|x| x.abs()).sum::<f64>();
    for w in [[0.0, 0.3], [0.2, -0.1], [-0.25, 0.05]] {
        let a = newton(&e5, &w, &SolveOptions::default()).unwrap();
        let b = newton(&e6, &w, &SolveOptions::default()).unwrap();
        let slack = l1(&a.t_star).max(l1(&b.t_star)) * eps;
        assert!((a.h - b.h).abs() <= slack + 1e-9, "w={w:?}: |{} - {}| > {slack}", a.h, b.h);
    }
}
