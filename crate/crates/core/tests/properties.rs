use diamond_gap::channels::{compose_theta, id_minus, random_channel, seeded_rng, Channel, SuperOperator};
use diamond_gap::diamond::{diamond_norm_ascent, diamond_norm_sdp, pointwise_lr};
use diamond_gap::linalg::random::{gaussian_matrix, random_density, random_traceless_hermitian};
use diamond_gap::linalg::{
    hermitian_trace_norm, hs_norm, partial_trace, partial_transpose, trace_norm, BipartiteOperator, Factor,
};
use diamond_gap::verify::{equality_witness_analysis, run_trial, Statement, ALPHA, LEMMA_TOL};
use proptest::prelude::*;

fn channel(d: usize, env_pick: usize, seed: u64) -> Channel {
    random_channel(d, [1, d, d * d][env_pick % 3], seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn traceless_hermitian_norm_bound(seed in any::<u64>(), n in 2usize..=9) {
        let x = random_traceless_hermitian(&mut seeded_rng(seed), n);
        let lhs = hs_norm(&x);
        let rhs = hermitian_trace_norm(&x).unwrap() / std::f64::consts::SQRT_2;
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn trace_norm_below_root_dimension_times_hs(seed in any::<u64>(), n in 1usize..=9) {
        let y = gaussian_matrix(&mut seeded_rng(seed), n, n);
        prop_assert!(trace_norm(&y).unwrap() <= (n as f64).sqrt() * hs_norm(&y) + 1e-12);
        prop_assert!(hs_norm(&y) <= trace_norm(&y).unwrap() + 1e-12);
    }

    #[test]
    fn partial_transpose_is_hs_isometric_involution(seed in any::<u64>(), dh in 1usize..=3, dk in 1usize..=3) {
        let x = BipartiteOperator::new(dh, dk, gaussian_matrix(&mut seeded_rng(seed), dh * dk, dh * dk)).unwrap();
        let y = partial_transpose(&x);
        prop_assert!((hs_norm(y.matrix()) - hs_norm(x.matrix())).abs() < 1e-12);
        prop_assert_eq!(partial_transpose(&y), x);
    }

    #[test]
    fn every_lemma_statement_holds(seed in any::<u64>(), which in 0usize..8, d in 2usize..=4) {
        let out = run_trial(Statement::ALL[which], d, &mut seeded_rng(seed)).unwrap();
        prop_assert!(out.violation <= LEMMA_TOL, "{:?} violated by {}", Statement::ALL[which], out.violation);
    }

    #[test]
    fn channels_preserve_the_k_marginal(seed in any::<u64>(), env in 0usize..3, d in 2usize..=3) {
        let t = channel(d, env, seed);
        let z = BipartiteOperator::new(d, d, gaussian_matrix(&mut seeded_rng(!seed), d * d, d * d)).unwrap();
        let tz = t.apply_extended(&z).unwrap();
        prop_assert!(partial_trace(&tz, Factor::H).max_abs_diff(&partial_trace(&z, Factor::H)) < 1e-12);
    }

    #[test]
    fn composing_theta_twice_is_identity(seed in any::<u64>()) {
        let s = id_minus(&channel(3, seed as usize, seed));
        let back = compose_theta(&compose_theta(&s));
        prop_assert_eq!(back.transfer(), s.transfer());
    }

    #[test]
    fn pointwise_inequality(seed in any::<u64>(), env in 0usize..3, d in 2usize..=4) {
        let t = channel(d, env, seed);
        let rho = BipartiteOperator::new(d, d, random_density(&mut seeded_rng(!seed), d * d)).unwrap();
        let p = pointwise_lr(&t, &rho).unwrap();
        prop_assert!(p.l <= p.bound + 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn diamond_norm_is_homogeneous_and_subadditive(a in any::<u64>(), b in any::<u64>(), c in 0.1f64..3.0) {
        let s = id_minus(&channel(2, a as usize, a));
        let t = id_minus(&channel(2, b as usize, b));
        let ns = diamond_norm_sdp(&s).unwrap();
        let nt = diamond_norm_sdp(&t).unwrap();
        let scaled = diamond_norm_sdp(&s.scale(c)).unwrap();
        prop_assert!((scaled.value - c * ns.value).abs() <= 1e-6 * (1.0 + c * ns.value));
        let sum = s.sub(&t.scale(-1.0)).unwrap();
        let nsum = diamond_norm_sdp(&sum).unwrap();
        prop_assert!(nsum.lower_certificate <= ns.upper_certificate + nt.upper_certificate + 1e-9);
    }

    #[test]
    fn channels_have_unit_norm(seed in any::<u64>(), d in 2usize..=3) {
        let r = diamond_norm_sdp(&channel(d, seed as usize, seed).to_superop()).unwrap();
        prop_assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ascent_never_beats_the_dual_certificate(seed in any::<u64>()) {
        let s = id_minus(&channel(2, seed as usize, seed));
        let upper = diamond_norm_sdp(&s).unwrap().upper_certificate;
        prop_assert!(diamond_norm_ascent(&s, 3, seed).unwrap().value <= upper + 1e-6);
    }

    #[test]
    fn theorem_holds_with_certificates(seed in any::<u64>(), env in 0usize..3, d in 2usize..=3) {
        let t = channel(d, env, seed);
        let phi = id_minus(&t);
        let l = diamond_norm_sdp(&compose_theta(&phi)).unwrap();
        let r = diamond_norm_sdp(&phi).unwrap();
        // certified: lower(L) ≤ (d/√2) upper(R)
        prop_assert!(l.lower_certificate <= d as f64 * ALPHA * r.upper_certificate + 1e-9);
    }

    #[test]
    fn witnesses_never_tight_in_both_links(seed in any::<u64>()) {
        let t = channel(2, seed as usize, seed);
        let phi = id_minus(&t);
        let psi = diamond_norm_ascent(&phi, 2, seed).unwrap().psi;
        let x = phi.apply_extended(&BipartiteOperator::pure(2, 2, &psi).unwrap()).unwrap();
        let a = equality_witness_analysis(&x).unwrap();
        prop_assert!(!a.incompatible_pair);
    }
}

#[test]
fn transpose_map_is_hermiticity_preserving_but_not_cp() {
    let theta = SuperOperator::transpose_map(3);
    assert!(theta.is_hermiticity_preserving(0.0));
    let j = diamond_gap::channels::superop_choi(&theta);
    assert!(j.min_eigenvalue().unwrap() < -0.5);
}
