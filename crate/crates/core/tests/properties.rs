use normctl::differential::{
    brandenburg_estimate, certified_amalgam_bound, diff_ratio, theta0, triplet_check, TripletSpecs,
};
use normctl::function::{
    c1_inversion_check, c1_leibniz_check, w1_leibniz_check, wiener1_norm, wiener_inverse,
    wiener_norm,
};
use normctl::generators::{gen_decay, gen_invertible, gen_trig_poly};
use normctl::inversion::{
    constants, digit_expansion, neumann_inverse, direct_inverse, norm_control_bound, s_derivative,
    s_function, t0_value, Conditioning, NormControlInputs,
};
use normctl::norms::{
    beurling_norm, bgs_norm, jaffard_norm, normalization_constant, operator_norm_l2, schur_norm,
    DEFAULT_TOL,
};
use normctl::{laurent_from_symbol, AlgebraSpec, Family, FiniteMatrix, FourierSymbol, IndexWindow};
use num_complex::Complex64;
use proptest::prelude::*;

const P_VALUES: [f64; 4] = [1.0, 2.0, 4.0, f64::INFINITY];

fn decay(n: usize, alpha: f64, seed: u64) -> FiniteMatrix {
    gen_decay(n, alpha, seed).unwrap()
}

fn symbol(coeffs: &[(i64, f64, f64)]) -> FourierSymbol {
    FourierSymbol::new(coeffs.iter().map(|&(n, re, im)| (n, Complex64::new(re, im))))
}

fn symbol_strategy(max_degree: i64) -> impl Strategy<Value = Vec<(i64, f64, f64)>> {
    prop::collection::vec((-max_degree..=max_degree, -1.0..1.0f64, -1.0..1.0f64), 1..8)
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiply_is_associative(n in 2usize..24, seed in any::<u64>()) {
        let (a, b, c) = (decay(n, 1.0, seed), decay(n, 0.5, seed ^ 1), decay(n, 2.0, seed ^ 2));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        let scale = a.max_abs() * b.max_abs() * c.max_abs() * (n * n) as f64;
        prop_assert!(left.sub(&right).unwrap().max_abs() <= 1e-13 * scale);
    }

    #[test]
    fn adjoint_reverses_products_exactly(n in 1usize..20, seed in any::<u64>()) {
        let (a, b) = (decay(n.max(2), 1.0, seed), decay(n.max(2), 1.0, !seed));
        let lhs = a.multiply(&b).unwrap().adjoint();
        let rhs = b.adjoint().multiply(&a.adjoint()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn laurent_is_multiplicative_in_the_interior(
        f in symbol_strategy(3),
        g in symbol_strategy(3),
        radius in 8usize..14,
    ) {
        let (f, g) = (symbol(&f), symbol(&g));
        let window = IndexWindow::centered(radius);
        let product = laurent_from_symbol(&f, window).multiply(&laurent_from_symbol(&g, window)).unwrap();
        let direct = laurent_from_symbol(&f.convolve(&g), window);
        let margin = (f.degree() + g.degree()) as i64;
        for i in window.indices().filter(|i| (i - window.lo()) > margin && (window.hi() - i) > margin) {
            for j in window.indices() {
                let d = product.get(i, j) - direct.get(i, j);
                prop_assert!(d.norm() <= 1e-14, "({i}, {j}): {d}");
            }
        }
    }

    #[test]
    fn family_norms_are_ordered(
        n in 2usize..24,
        seed in any::<u64>(),
        p in prop::sample::select(P_VALUES.to_vec()),
        alpha in prop::sample::select(vec![0.0, 0.5, 1.0, 2.0]),
    ) {
        let a = decay(n, alpha, seed);
        let s = schur_norm(&a, p, alpha).unwrap();
        let g = bgs_norm(&a, p, alpha).unwrap();
        let b = beurling_norm(&a, p, alpha).unwrap();
        prop_assert!(s <= g * (1.0 + 1e-12));
        prop_assert!(g <= b * (1.0 + 1e-12));
        if p.is_infinite() {
            let j = jaffard_norm(&a, alpha).unwrap();
            for x in [s, g, b] {
                prop_assert!(rel_close(x, j, 1e-14), "{x} vs {j}");
            }
        }
    }

    #[test]
    fn schur_test_bounds_operator_norm(n in 2usize..24, seed in any::<u64>(), alpha in 0.0..3.0f64) {
        let a = decay(n, alpha, seed);
        prop_assert!(operator_norm_l2(&a, DEFAULT_TOL).unwrap() <= schur_norm(&a, 1.0, 0.0).unwrap() + 1e-9);
    }

    #[test]
    fn norms_are_adjoint_symmetric(
        n in 2usize..20,
        seed in any::<u64>(),
        p in prop::sample::select(P_VALUES.to_vec()),
        alpha in 0.0..3.0f64,
    ) {
        let a = decay(n, alpha, seed);
        let adj = a.adjoint();
        for family in [Family::Schur, Family::Bgs, Family::Beurling, Family::Jaffard, Family::OperatorL2] {
            let spec = AlgebraSpec::new(family, p, alpha).unwrap();
            let (x, y) = (spec.norm(&a).unwrap(), spec.norm(&adj).unwrap());
            let tol = if family == Family::OperatorL2 { 1e-10 } else { 1e-14 };
            prop_assert!(rel_close(x, y, tol), "{family}: {x} vs {y}");
        }
    }

    #[test]
    fn laurent_bridge(f in symbol_strategy(5)) {
        let f = symbol(&f);
        let window = IndexWindow::centered(2 * f.degree() as usize + 2);
        let a = laurent_from_symbol(&f, window);
        prop_assert_eq!(schur_norm(&a, 1.0, 0.0).unwrap(), wiener_norm(&f));
        prop_assert_eq!(bgs_norm(&a, 1.0, 0.0).unwrap(), wiener_norm(&f));
        prop_assert_eq!(schur_norm(&a, 1.0, 1.0).unwrap(), wiener1_norm(&f));
    }

    #[test]
    fn normalized_norms_are_submultiplicative(
        n in 2usize..20,
        seed in any::<u64>(),
        family in prop::sample::select(vec![Family::Schur, Family::Bgs, Family::Beurling, Family::Jaffard]),
        p in prop::sample::select(P_VALUES.to_vec()),
        alpha in prop::sample::select(vec![1.25, 2.0, 3.0]),
    ) {
        let spec = AlgebraSpec::new(family, p, alpha).unwrap();
        let (a, b) = (decay(n, alpha, seed), decay(n, 0.0, !seed));
        let k = normalization_constant(&spec).unwrap();
        let ab = spec.norm(&a.multiply(&b).unwrap()).unwrap();
        prop_assert!(ab <= k * spec.norm(&a).unwrap() * spec.norm(&b).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn amalgam_bound_dominates_l1_schur_norm(
        n in 2usize..32,
        seed in any::<u64>(),
        p in prop::sample::select(P_VALUES.to_vec()),
        alpha in 0.6..3.0f64,
        gen_alpha in 0.0..3.0f64,
    ) {
        prop_assume!(alpha > 1.0 - 1.0 / p);
        let a = decay(n, gen_alpha, seed);
        let bound = certified_amalgam_bound(&a, p, alpha).unwrap();
        prop_assert!(schur_norm(&a, 1.0, 0.0).unwrap() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn diff_ratio_is_homogeneous(
        n in 2usize..20,
        seed in any::<u64>(),
        c in 1e-3..1e3f64,
        d in 1e-3..1e3f64,
        theta in 0.1..1.0f64,
    ) {
        let spec = AlgebraSpec::schur(1.0, 1.0).unwrap();
        let (a, b) = (decay(n, 1.0, seed), decay(n, 1.0, !seed));
        let r = diff_ratio(&a, &b, &spec, theta).unwrap().unwrap();
        let scaled = diff_ratio(&a.scale(c), &b.scale(d), &spec, theta).unwrap().unwrap();
        prop_assert!(rel_close(r, scaled, 1e-12), "{r} vs {scaled}");
    }

    #[test]
    fn triplet_implication_holds_pairwise(
        n in 4usize..16,
        seed in any::<u64>(),
        p in prop::sample::select(vec![1.0, 2.0]),
        alpha in prop::sample::select(vec![1.0, 1.5, 2.0]),
        theta1 in 0.2..1.0f64,
    ) {
        let specs = TripletSpecs {
            fine: AlgebraSpec::schur(p, alpha).unwrap(),
            middle: AlgebraSpec::schur(1.0, 0.0).unwrap(),
            coarse: AlgebraSpec::operator(),
        };
        let pairs: Vec<_> = (0..6u64)
            .map(|i| (decay(n, alpha, seed ^ (2 * i)), decay(n, alpha, seed ^ (2 * i + 1))))
            .collect();
        let t0 = theta0(p, alpha).unwrap();
        let report = triplet_check(&pairs, &specs, t0, theta1).unwrap();
        prop_assert_eq!(report.chain_violations, 0);
    }

    #[test]
    fn b_contracts_geometrically(n in 4usize..24, seed in any::<u64>(), kappa in 1.5..6.0f64) {
        let a = gen_invertible(n, 1.0, kappa, seed).unwrap().matrix;
        let c = Conditioning::of(&a, DEFAULT_TOL).unwrap();
        prop_assume!(!c.is_degenerate());
        let q = 1.0 - 1.0 / c.kappa;
        let b = c.b_matrix();
        prop_assert!(operator_norm_l2(&b, DEFAULT_TOL).unwrap() <= q + 1e-10);
        let mut power = b.clone();
        for k in 2..=16 {
            power = power.multiply(&b).unwrap();
            prop_assert!(operator_norm_l2(&power, DEFAULT_TOL).unwrap() <= q.powi(k) + 1e-9);
        }
        let spec = AlgebraSpec::schur(1.0, 1.0).unwrap();
        let k = constants(&a, &spec).unwrap();
        prop_assert!(spec.normalized_norm(&b).unwrap() <= k.b / k.a + 1e-9);
    }

    #[test]
    fn neumann_matches_direct_inverse(n in 2usize..24, seed in any::<u64>(), kappa in 1.2..8.0f64) {
        let a = gen_invertible(n, 1.0, kappa, seed).unwrap().matrix;
        let neumann = neumann_inverse(&a, 1e-10, 100_000).unwrap();
        let direct = direct_inverse(&a).unwrap();
        let scale = operator_norm_l2(&direct, DEFAULT_TOL).unwrap();
        let gap = operator_norm_l2(&neumann.inverse.sub(&direct).unwrap(), DEFAULT_TOL).unwrap();
        prop_assert!(gap <= 1e-8 * scale);
    }

    #[test]
    fn norm_control_bound_is_monotone(
        a in 1.05..3.0f64,
        b in 1.5..32.0f64,
        d in 1.0..8.0f64,
        step in 1.01..2.0f64,
        gamma_branch in any::<bool>(),
        theta in 0.2..0.95f64,
    ) {
        let theta = if gamma_branch { 1.0 } else { theta };
        let x = NormControlInputs { s: 2.0, adjoint_norm: 3.0, a, b, m: 2, theta, d };
        let base = norm_control_bound(&x).unwrap().bound.ln;
        let at = |x: NormControlInputs| norm_control_bound(&x).unwrap().bound.ln;
        let slack = 1e-12 * base.abs();
        let more_d = at(NormControlInputs { d: d * step, ..x });
        let more_b = at(NormControlInputs { b: b * step, ..x });
        let more_a = at(NormControlInputs { a: 1.0 + (a - 1.0) * step, ..x });
        prop_assert!(more_d >= base - slack);
        prop_assert!(more_b >= base - slack);
        prop_assert!(more_a <= base + slack);
    }

    #[test]
    fn s_function_dips_below_zero_and_then_grows(
        m in 2u32..5,
        theta_frac in 0.05..0.95f64,
        d in 1.0..4.0f64,
        b in 1.5..32.0f64,
        a in 1.05..3.0f64,
        t_scale in 2.0..50.0f64,
    ) {
        let theta = theta_frac * (m - 1) as f64;
        let t0 = t0_value(m, theta, d, b, a).unwrap();
        prop_assume!(t0 > 0.0);
        prop_assert!(s_function(t0, m, theta, d, b, a).unwrap() < 0.0);
        let slope = 1.0 - 2f64.powf((1.0 - theta / m as f64).ln() / (m as f64).ln());
        let t = t_scale * t0;
        prop_assert!(s_derivative(t, m, theta, d, b, a).unwrap() >= slope - 1e-12);
    }

    #[test]
    fn identity_power_condition_constant_is_one(
        n in 2usize..10,
        family in prop::sample::select(vec![Family::Schur, Family::Bgs, Family::Beurling, Family::Jaffard, Family::OperatorL2]),
        p in prop::sample::select(P_VALUES.to_vec()),
        theta in 0.1..1.0f64,
    ) {
        let spec = AlgebraSpec::new(family, p, 2.0).unwrap();
        let id = FiniteMatrix::identity(IndexWindow::zero_based(n).unwrap());
        prop_assert_eq!(spec.norm(&id).unwrap(), 1.0);
        let r = brandenburg_estimate(&id, &spec, 2, theta, 64).unwrap();
        prop_assert_eq!(r.d_empirical, 1.0);
    }

    #[test]
    fn c1_inequalities_on_trig_polynomials(degree in 1usize..8, seed in any::<u64>()) {
        let (_, f) = gen_trig_poly(degree, seed, (0.0, 3.0), 128).unwrap();
        let (_, g) = gen_trig_poly(degree, !seed, (0.0, 3.0), 128).unwrap();
        prop_assert!(c1_inversion_check(&f).unwrap().holds);
        prop_assert!(c1_leibniz_check(&f, &g).unwrap().holds);
    }

    #[test]
    fn w1_leibniz_is_exact(f in symbol_strategy(8), g in symbol_strategy(8)) {
        prop_assert!(w1_leibniz_check(&symbol(&f), &symbol(&g)).holds);
    }

    #[test]
    fn wiener_inverse_residual_is_small(c in 1.5..5.0f64, phase in -1.0..1.0f64) {
        let half = Complex64::from_polar(0.5, phase);
        let f = FourierSymbol::new([(0, Complex64::new(c, 0.0)), (1, half), (-1, half.conj())]);
        let tol = 1e-10;
        let inv = wiener_inverse(&f, 256, tol).unwrap();
        prop_assert!(inv.residual <= 10.0 * tol, "{}", inv.residual);
    }

    #[test]
    fn generators_are_pure(n in 2usize..16, seed in any::<u64>(), alpha in 0.0..3.0f64) {
        prop_assert_eq!(decay(n, alpha, seed).to_json(), decay(n, alpha, seed).to_json());
    }
}

#[test]
fn digit_expansions_round_trip() {
    for m in 2..=5u32 {
        for n in 1..=1_000_000u64 {
            let e = digit_expansion(n, m).unwrap();
            assert_eq!(e.value(), n);
        }
    }
}

#[test]
fn theta0_in_unit_interval_and_increasing_in_alpha() {
    for p in [1.0, 2.0, 4.0] {
        let values: Vec<f64> = [0.6, 1.0, 2.0, 4.0]
            .iter()
            .filter(|&&a| a > 1.0 - 1.0 / p)
            .map(|&a| theta0(p, a).unwrap())
            .collect();
        assert!(values.iter().all(|&t| t > 0.0 && t < 1.0));
        assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
    }
}
