//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use normctl::differential::{
    certified_amalgam_bound, diff_inequality_sample_sized, diff_ratio, sample_pair, theta0,
};
use normctl::function::{
    c1_inversion_check, c1_leibniz_check, w1_leibniz_check, wiener_inverse, wiener_norm,
};
use normctl::generators::{gen_decay, gen_invertible, gen_symbol, gen_trig_poly};
use normctl::inversion::{
    bn_digit_bound, s_derivative, s_function, t0_value, Certifier, CertifyOptions, DMode,
};
use normctl::norms::{
    beurling_norm, bgs_norm, jaffard_norm, operator_norm_l2, schur_norm, DEFAULT_TOL,
};
use normctl::special::gamma;
use normctl::{AlgebraSpec, FiniteMatrix, FourierSymbol};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs())
}

// ------------------------------------------------------------------ fixtures

/// The 200 decay matrices shared by criteria 1 and 2.
fn ordering_matrices() -> Vec<FiniteMatrix> {
    (0..200u64)
        .map(|i| gen_decay(64, [0.0, 1.0, 2.0][(i % 3) as usize], 1000 + i).unwrap())
        .collect()
}

struct Inversion {
    kappa: f64,
    certifier: Certifier,
}

/// The 50 invertible matrices of criteria 6 to 9; the first 20 carry a
/// 512-step power ladder.
fn inversion_fixtures() -> Vec<Inversion> {
    let spec = AlgebraSpec::schur(1.0, 1.0).unwrap();
    (0..50u64)
        .map(|i| {
            let g = gen_invertible(64, 1.0, 4.0, 5000 + i).unwrap();
            let options = CertifyOptions {
                ladder_max: if i < 20 { 512 } else { 256 },
                ..CertifyOptions::default()
            };
            Inversion {
                kappa: g.kappa,
                certifier: Certifier::new(&g.matrix, &spec, options).unwrap(),
            }
        })
        .collect()
}

// ------------------------------------------------------------------ criteria

fn norm_ordering(ms: &[FiniteMatrix]) -> Outcome {
    let mut worst_order = f64::NEG_INFINITY;
    let mut worst_inf = 0.0_f64;
    for a in ms {
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            for alpha in [0.0, 1.0, 2.0] {
                let s = schur_norm(a, p, alpha).unwrap();
                let g = bgs_norm(a, p, alpha).unwrap();
                let b = beurling_norm(a, p, alpha).unwrap();
                worst_order = worst_order.max((s - g) / g).max((g - b) / b);
                if p.is_infinite() {
                    let j = jaffard_norm(a, alpha).unwrap();
                    worst_inf = worst_inf.max(rel_gap(s, j)).max(rel_gap(g, j)).max(rel_gap(b, j));
                }
            }
        }
    }
    check(
        worst_order <= 1e-12 && worst_inf <= 1e-14,
        format!("max relative excess {worst_order:.3e}, max p=inf gap {worst_inf:.3e}"),
    )
}

fn schur_test(ms: &[FiniteMatrix]) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for a in ms {
        let op = operator_norm_l2(a, DEFAULT_TOL).unwrap();
        worst = worst.max(op - schur_norm(a, 1.0, 0.0).unwrap());
    }
    check(worst <= 1e-9, format!("max op - schur(1,0) = {worst:.3e}"))
}

fn theta0_values() -> Outcome {
    let (a, b) = (theta0(1.0, 1.0).unwrap(), theta0(2.0, 1.0).unwrap());
    check(a == 2.0 / 3.0 && b == 0.5, format!("theta0(1,1) = {a}, theta0(2,1) = {b}"))
}

fn amalgam_bound() -> Outcome {
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for (p, alpha) in [(2.0, 1.0), (2.0, 2.0), (4.0, 1.5)] {
        for i in 0..100u64 {
            let a = gen_decay(64, alpha, 2000 + i).unwrap();
            let bound = certified_amalgam_bound(&a, p, alpha).unwrap();
            let l1 = schur_norm(&a, 1.0, 0.0).unwrap();
            min_slack = min_slack.min(bound / l1);
            if l1 > bound {
                violations += 1;
            }
        }
    }
    check(violations == 0, format!("{violations} violations, min bound/norm {min_slack:.4}"))
}

fn differential_inequality() -> Outcome {
    let spec = AlgebraSpec::schur(1.0, 1.0).unwrap();
    let theta = 2.0 / 3.0;
    let run = || diff_inequality_sample_sized(&spec, theta, 100, 7, 128, None).unwrap();
    let (first, second) = (run(), run());
    let reproducible = first.max_ratio.to_bits() == second.max_ratio.to_bits() && first == second;
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let (a, b) = sample_pair(128, 1.0, 7, i).unwrap();
        let r = diff_ratio(&a, &b, &spec, theta).unwrap().unwrap();
        for (c, d) in [(3.7, 0.02), (1e-3, 250.0), (42.0, 42.0)] {
            let scaled = diff_ratio(&a.scale(c), &b.scale(d), &spec, theta).unwrap().unwrap();
            worst = worst.max(rel_gap(r, scaled));
        }
    }
    check(
        first.max_ratio.is_finite() && reproducible && worst <= 1e-12,
        format!(
            "D0 = {:.6}, bit-identical rerun: {reproducible}, max scaling gap {worst:.3e}",
            first.max_ratio
        ),
    )
}

fn b_contract(fx: &[Inversion]) -> Outcome {
    let mut worst_one = f64::NEG_INFINITY;
    let mut worst_pow = f64::NEG_INFINITY;
    for f in fx {
        let table = f.certifier.power_table().unwrap();
        let q = 1.0 - 1.0 / f.certifier.constants().unwrap().kappa;
        for n in 1..=64u64 {
            let measured = table.ln_op(n).map_or(0.0, f64::exp);
            let excess = measured - q.powi(n as i32);
            if n == 1 {
                worst_one = worst_one.max(excess);
            }
            worst_pow = worst_pow.max(excess);
        }
    }
    let kappa_max = fx.iter().map(|f| f.kappa).fold(0.0, f64::max);
    check(
        worst_one <= 1e-10 && worst_pow <= 1e-9,
        format!(
            "max kappa {kappa_max:.4}, max excess n=1 {worst_one:.3e}, n<=64 {worst_pow:.3e}"
        ),
    )
}

fn neumann(fx: &[Inversion]) -> Outcome {
    let mut dev = 0.0_f64;
    let mut res = 0.0_f64;
    for f in fx {
        let cert = f.certifier.certificate(2, 2.0 / 3.0, DMode::Empirical).unwrap();
        dev = dev.max(cert.neumann_deviation);
        res = res.max(cert.residual);
    }
    check(
        dev <= 1e-8 && res <= 1e-8,
        format!("max relative deviation {dev:.3e}, max residual {res:.3e}"),
    )
}

fn digit_dominance(fx: &[Inversion]) -> Outcome {
    let (m, theta) = (2, 2.0 / 3.0);
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut d_range = (f64::INFINITY, 0.0_f64);
    for f in &fx[..20] {
        let table = f.certifier.power_table().unwrap();
        let c = f.certifier.constants().unwrap();
        let d_emp = f.certifier.d_empirical(m, theta).unwrap().unwrap();
        d_range = (d_range.0.min(d_emp), d_range.1.max(d_emp));
        assert!(table.n_max() >= 512);
        for n in 1..=512u64 {
            let Some(measured) = table.ln_norm(n) else { continue };
            let bound = bn_digit_bound(n, m, theta, d_emp, c.a, c.b).unwrap().ln;
            if measured > bound + (1e-9f64).ln_1p() {
                violations += 1;
            }
            min_margin = min_margin.min(bound - measured);
        }
    }
    check(
        violations == 0,
        format!(
            "{violations} violations over 20 x 512 powers, D_emp in [{:.4}, {:.4}], min ln margin {min_margin:.3}",
            d_range.0, d_range.1
        ),
    )
}

fn bound_dominance(fx: &[Inversion]) -> Outcome {
    let mut failures = 0;
    let mut min_gap = [f64::INFINITY; 2];
    for f in fx {
        for (k, theta) in [2.0 / 3.0, 1.0].into_iter().enumerate() {
            let cert = f.certifier.certificate(2, theta, DMode::Empirical).unwrap();
            let gap = cert.bound.ln - cert.measured_inverse_norm.ln();
            min_gap[k] = min_gap[k].min(gap);
            if !cert.dominates || gap < 0.0 {
                failures += 1;
            }
        }
    }
    check(
        failures == 0,
        format!(
            "{failures} failures, min ln(bound/measured) {:.3} (theta=2/3), {:.3} (theta=1)",
            min_gap[0], min_gap[1]
        ),
    )
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-13 * hi.max(1.0) {
        let (x1, x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

fn t0_machinery() -> Outcome {
    let mut worst_t0 = 0.0_f64;
    let mut worst_slope = f64::INFINITY;
    for theta in [0.25, 0.5, 2.0 / 3.0] {
        for (a, b) in [(1.1, 4.0), (1.5, 16.0), (2.0, 64.0)] {
            let t0 = t0_value(2, theta, 1.0, b, a).unwrap();
            let found = golden_min(|t| s_function(t, 2, theta, 1.0, b, a).unwrap(), 0.0, 10.0 * t0 + 10.0);
            worst_t0 = worst_t0.max(rel_gap(found, t0));
            let floor = 1.0 - 2f64.powf((1.0 - theta / 2.0).log2());
            for k in 0..200 {
                let t = 2.0 * t0 * (1.0 + k as f64 * 0.25);
                let slope = s_derivative(t, 2, theta, 1.0, b, a).unwrap();
                worst_slope = worst_slope.min(slope - floor);
            }
        }
    }
    check(
        worst_t0 <= 1e-6 && worst_slope >= -1e-9,
        format!("max t0 relative gap {worst_t0:.3e}, min s'(t) - floor {worst_slope:.3e}"),
    )
}

fn gamma_by_quadrature(s: f64) -> f64 {
    let (upper, panels) = (12.0, 200_000);
    let h = upper / panels as f64;
    let f = |u: f64| 2.0 * u.powf(2.0 * s - 1.0) * (-u * u).exp();
    let inner: f64 = (1..panels)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h))
        .sum();
    (f(0.0) + f(upper) + inner) * h / 3.0
}

fn gamma_values() -> Outcome {
    let half = (gamma(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs();
    let five = (gamma(5.0).unwrap() - 24.0).abs();
    let quad = [0.5, 1.5, 3.7]
        .iter()
        .map(|&s| (gamma(s).unwrap() - gamma_by_quadrature(s)).abs())
        .fold(0.0, f64::max);
    check(
        half <= 1e-10 && five <= 1e-9 && quad <= 1e-8,
        format!("|G(1/2) - sqrt(pi)| {half:.2e}, |G(5) - 24| {five:.2e}, quadrature {quad:.2e}"),
    )
}

fn wiener_demo() -> Outcome {
    let f = FourierSymbol::from_real(&[(-1, 0.5), (0, 2.0), (1, 0.5)]);
    let inv = wiener_inverse(&f, 256, 1e-10).unwrap();
    let gap = (wiener_norm(&inv.inverse) - 1.0).abs();
    let mut failures = 0;
    for i in 0..100u64 {
        let g = gen_symbol(1 + (i % 7) as usize, 0.5, 3000 + 2 * i).unwrap();
        let h = gen_symbol(1 + (i % 5) as usize, 1.0, 3001 + 2 * i).unwrap();
        if !w1_leibniz_check(&g, &h).holds {
            failures += 1;
        }
    }
    check(
        gap <= 1e-8 && failures == 0,
        format!("| ||1/(2+cos)||_W - 1 | = {gap:.3e}, W1 Leibniz failures {failures}/100"),
    )
}

fn c1_control() -> Outcome {
    let (mut inv_fail, mut leib_fail) = (0, 0);
    for i in 0..50u64 {
        let (_, f) = gen_trig_poly(1 + (i % 6) as usize, 4000 + i, (0.0, 2.0), 512).unwrap();
        let (_, g) = gen_trig_poly(1 + (i % 4) as usize, 4100 + i, (0.0, 2.0), 512).unwrap();
        if !c1_inversion_check(&f).unwrap().holds {
            inv_fail += 1;
        }
        if !c1_leibniz_check(&f, &g).unwrap().holds {
            leib_fail += 1;
        }
    }
    check(
        inv_fail == 0 && leib_fail == 0,
        format!("inversion failures {inv_fail}/50, Leibniz failures {leib_fail}/50"),
    )
}

fn without_wall_clock(text: &str) -> String {
    let mut out = String::new();
    let mut skipping = false;
    for line in text.lines() {
        skipping |= line.contains("\"wall_clock\"");
        if !skipping {
            out.push_str(line);
            out.push('\n');
        } else if line.trim_start().starts_with('}') {
            skipping = false;
        }
    }
    out
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_normctl");
    let dir = std::env::temp_dir().join(format!("normctl-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let run = |args: &[String]| -> Result<Vec<u8>, String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    run(&own(&["gen", "invertible", "--n", "32", "--seed", "11", "--out", &path("a.json")]))?;
    run(&own(&["gen", "symbol", "--degree", "5", "--seed", "11", "--out", &path("s.json")]))?;
    run(&own(&["invert", &path("a.json"), "--theta", "1", "--out", &path("c.json")]))?;

    let commands: Vec<Vec<String>> = vec![
        own(&["gen", "decay", "--n", "16", "--seed", "3"]),
        own(&["gen", "invertible", "--n", "16", "--seed", "3"]),
        own(&["gen", "laurent", "--degree", "3", "--lo", "-5", "--hi", "5", "--seed", "3"]),
        own(&["gen", "symbol", "--degree", "4", "--seed", "3"]),
        own(&["gen", "trig", "--degree", "4", "--grid", "64", "--seed", "3"]),
        own(&["norm", &path("a.json"), "--family", "bgs", "--p", "2", "--alpha", "1"]),
        own(&["diffcheck", "--theta", "0.6666666667", "--samples", "16", "--seed", "5", "--n", "32"]),
        own(&["powers", &path("a.json"), "--theta", "0.6666666667", "--nmax", "32"]),
        own(&["invert", &path("a.json"), "--theta", "0.6666666667", "--D", "auto"]),
        own(&["wiener", "norm", &path("s.json")]),
        own(&["wiener", "norm1", &path("s.json")]),
        own(&["wiener", "invert", &path("s.json")]),
        own(&["report", &path("c.json")]),
    ];
    let mut mismatches = Vec::new();
    for cmd in &commands {
        let mut texts = Vec::new();
        for threads in ["1", "8", "1"] {
            let mut args = own(&["--threads", threads]);
            args.extend(cmd.iter().cloned());
            texts.push(without_wall_clock(&String::from_utf8_lossy(&run(&args)?)));
        }
        if texts[0] != texts[1] || texts[0] != texts[2] {
            mismatches.push(cmd[0].clone());
        }
    }
    let _ = std::fs::remove_dir_all(Path::new(&dir));
    check(
        mismatches.is_empty(),
        format!("{} commands x 3 runs, mismatches {mismatches:?}", commands.len()),
    )
}

fn main() {
    let started = Instant::now();
    let ordering = ordering_matrices();
    let inversion = inversion_fixtures();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("norm ordering", Box::new(|| norm_ordering(&ordering))),
        ("Schur test", Box::new(|| schur_test(&ordering))),
        ("theta0 formula", Box::new(theta0_values)),
        ("certified amalgam bound", Box::new(amalgam_bound)),
        ("differential inequality", Box::new(differential_inequality)),
        ("inversion B-contract", Box::new(|| b_contract(&inversion))),
        ("Neumann correctness", Box::new(|| neumann(&inversion))),
        ("digit-bound dominance", Box::new(|| digit_dominance(&inversion))),
        ("inverse-norm bound dominance", Box::new(|| bound_dominance(&inversion))),
        ("t0 and s(t)", Box::new(t0_machinery)),
        ("Gamma", Box::new(gamma_values)),
        ("Wiener demo", Box::new(wiener_demo)),
        ("C1 control", Box::new(c1_control)),
        ("CLI determinism", Box::new(cli_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("acceptance {:>2} {tag} {name}: {detail} ({:.1}s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
