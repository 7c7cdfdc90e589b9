//! Seeded randomized checks across module boundaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isogeo4::curve::{Curve4, Interval};
use isogeo4::expr::{eval_grad3, parse, parse_in, BinOp, Expr, Func, Var};
use isogeo4::family::{
    builtin, FamilyParams, HypersurfaceFamily, MarchingKind, MarchingScale, Separable, Tolerances,
};
use isogeo4::linalg4::{dot, triple_product, Vec4};
use isogeo4::validator::{validate, Thresholds};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vec4(r: &mut ChaCha8Rng) -> Vec4 {
    Vec4::new(
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
    )
}

#[test]
fn triple_product_is_trilinear() {
    let mut r = rng(11);
    for _ in 0..200 {
        let (u, u2, v, w) = (vec4(&mut r), vec4(&mut r), vec4(&mut r), vec4(&mut r));
        let (a, b) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let lhs = triple_product(u * a + u2 * b, v, w);
        let rhs = triple_product(u, v, w) * a + triple_product(u2, v, w) * b;
        let scale = (u.norm() * a.abs() + u2.norm() * b.abs()) * v.norm() * w.norm();
        assert!(lhs.max_abs_diff(rhs) <= 1e-12 * scale.max(1.0));
    }
}

fn random_expr(r: &mut ChaCha8Rng, depth: u32, allow_vars: bool) -> Expr {
    let leaf = depth == 0 || r.random_bool(0.3);
    if leaf {
        return match r.random_range(0..if allow_vars { 5 } else { 2 }) {
            0 => Expr::Const((r.random_range(0.0..10.0_f64) * 100.0).round() / 100.0),
            1 => Expr::Pi,
            k => Expr::Var(Var::ALL[k - 2]),
        };
    }
    match r.random_range(0..4) {
        0 => Expr::Neg(Box::new(random_expr(r, depth - 1, allow_vars))),
        1 => {
            let f = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt][r.random_range(0..6)];
            Expr::Call(f, Box::new(random_expr(r, depth - 1, allow_vars)))
        }
        2 => Expr::Binary(
            BinOp::Pow,
            Box::new(random_expr(r, depth - 1, allow_vars)),
            Box::new(random_expr(r, depth - 1, false)),
        ),
        _ => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][r.random_range(0..4)];
            Expr::Binary(
                op,
                Box::new(random_expr(r, depth - 1, allow_vars)),
                Box::new(random_expr(r, depth - 1, allow_vars)),
            )
        }
    }
}

#[test]
fn parse_print_round_trip() {
    let mut r = rng(12);
    for _ in 0..1000 {
        let e = random_expr(&mut r, 5, true);
        let printed = e.to_string();
        let once = parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(once, e, "{printed}");
        let twice = parse(&once.to_string()).unwrap();
        assert_eq!(twice, once);
    }
}

#[test]
fn grad_is_additive() {
    let mut r = rng(13);
    let mut checked = 0;
    while checked < 500 {
        let a = random_expr(&mut r, 3, true);
        let b = random_expr(&mut r, 3, true);
        let sum = Expr::Binary(BinOp::Add, Box::new(a.clone()), Box::new(b.clone()));
        let (s, t, q) = (r.random_range(0.1..2.0), r.random_range(0.1..2.0), r.random_range(0.1..2.0));
        let (Ok(ga), Ok(gb)) = (eval_grad3(&a, s, t, q), eval_grad3(&b, s, t, q)) else {
            continue;
        };
        let Ok(gs) = eval_grad3(&sum, s, t, q) else {
            continue;
        };
        assert_eq!(gs.value, ga.value + gb.value);
        assert_eq!(gs.partials(), [ga.d_s + gb.d_s, ga.d_t + gb.d_t, ga.d_q + gb.d_q]);
        checked += 1;
    }
}

#[test]
fn jet_value_matches_plain_eval() {
    let mut r = rng(14);
    for _ in 0..500 {
        let e = random_expr(&mut r, 4, true);
        let (s, t, q) = (r.random_range(0.1..2.0), r.random_range(0.1..2.0), r.random_range(0.1..2.0));
        if let (Ok(v), Ok(j)) = (e.eval(s, t, q), e.eval_jet_s(s, t, q)) {
            assert_eq!(j.value(), v, "{e}");
        }
    }
}

fn pick<'a>(r: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[r.random_range(0..pool.len())]
}

fn random_family(r: &mut ChaCha8Rng, kind: MarchingKind) -> HypersurfaceFamily {
    let unit = Interval::new(0.0, 1.0).unwrap();
    let (curve, params) = match kind {
        MarchingKind::TypeI => (builtin("example1").unwrap().curve().clone(), FamilyParams::new(0.5, 0.0, unit, unit)),
        _ => (
            Curve4::parse(["0.5*sin(s)", "0.5*cos(s)", "0", "sqrt(3)/2*s"], Interval::new(0.5, 6.0).unwrap()).unwrap(),
            FamilyParams::new(0.5, 0.5, unit, unit),
        ),
    };
    let (coeff_pool, profile_pool, uv_pool): (&[&str], &[&str], &[&str]) = match kind {
        MarchingKind::TypeI => (
            &["1", "2 + sin(s)", "exp(s/10)", "1 + s^2", "-1"],
            &["0", "t - t0", "q - q0", "2*(t - t0) - (q - q0)", "(t - t0)*(q - q0)", "(q - q0)^2", "1", "t - t0 + 3*(q - q0)"],
            &["0", "(t - t0)^2", "(t - t0)*(q - q0)", "q - q0", "t - t0", "1"],
        ),
        MarchingKind::TypeII => (
            &["1", "s + t + 1", "(s + 1)*(t - t0)", "t - t0", "2 + sin(s*t)", "exp(t)*(1 + s)", "0"],
            &["q - q0", "1", "2*(q - q0)", "0", "(q - q0)^2", "1 + (q - q0)"],
            &["0", "(q - q0)^2", "(q - q0)^3"],
        ),
        _ => (
            &["1", "s + q + 1", "(s + 1)*(q - q0)", "q - q0", "2 + sin(s*q)", "sin(s*(q - q0))", "s*q^2", "0"],
            &["t - t0", "1", "2*(t - t0)", "0", "(t - t0)^2", "1 + (t - t0)"],
            &["0", "(t - t0)^2", "(t - t0)^3"],
        ),
    };
    let (cs, ps) = kind.scopes();
    let mut coeff = [(); 4].map(|_| parse_in(pick(r, coeff_pool), cs).unwrap());
    if kind == MarchingKind::TypeI {
        // Keep the type I hypothesis: coefficients nowhere zero.
        coeff[0] = parse_in(pick(r, &coeff_pool[..4]), cs).unwrap();
    }
    let profile = [
        parse_in(pick(r, uv_pool), ps).unwrap(),
        parse_in(pick(r, uv_pool), ps).unwrap(),
        parse_in(pick(r, profile_pool), ps).unwrap(),
        parse_in(pick(r, profile_pool), ps).unwrap(),
    ];
    HypersurfaceFamily::new(curve, MarchingScale::separable(kind, Separable { coeff, profile }), params.unwrap()).unwrap()
}

#[test]
fn condition_paths_agree_on_random_scales() {
    let tol = Tolerances::default();
    let thresholds = Thresholds::default();
    let mut r = rng(15);
    for kind in [MarchingKind::TypeI, MarchingKind::TypeII, MarchingKind::TypeIII] {
        let mut passes = 0;
        for i in 0..50 {
            let f = random_family(&mut r, kind);
            let iso = f.check_isogeodesic(65, &tol).unwrap();
            let typed = f.check_type_conditions(65, &tol).unwrap();
            let report = validate(&f, 65, &thresholds).unwrap();
            let desc = format!("{} #{i}: {:?}", kind.label(), f.marching().parts().unwrap().profile.each_ref().map(|e| e.to_string()));
            assert_eq!(typed.passed(), iso.passed(), "{desc}\n{typed}\n{iso}");
            assert_eq!(report.passed(), iso.passed(), "{desc}\n{}", report.summary_line("random"));
            assert_eq!(
                report.max_tangential_accel <= 1e-8,
                report.max_collinearity_defect <= 1e-8,
                "{desc}"
            );
            passes += usize::from(iso.passed());
        }
        // Both verdicts must actually occur for the comparison to mean anything.
        assert!(passes > 0 && passes < 50, "type {}: {passes} of 50 pass", kind.label());
    }
}

#[test]
fn negative_cases_stay_failed_under_refinement() {
    let f1 = builtin("example1").unwrap();
    let mutate = |slot: usize, text: &str| {
        let mut m = f1.marching().clone();
        let (_, scope) = m.kind().scopes();
        m.parts_mut().unwrap().profile[slot] = parse_in(text, scope).unwrap();
        f1.with_marching(m).unwrap()
    };
    let w_eq_x = {
        let g = mutate(2, "t - t0");
        let mut m = g.marching().clone();
        m.parts_mut().unwrap().profile[3] = parse_in("t - t0", &[Var::T, Var::Q]).unwrap();
        g.with_marching(m).unwrap()
    };
    let cases = [w_eq_x, mutate(1, "t - t0"), builtin("example3").unwrap().with_anchor(1.0, 0.0).unwrap()];
    for f in &cases {
        for n in [9, 33, 129, 257, 513] {
            assert!(!validate(f, n, &Thresholds::default()).unwrap().passed());
        }
    }
}

#[test]
fn triple_product_orthogonal_to_frame_pairs() {
    for (_, f) in isogeo4::family::builtin_examples() {
        for s in f.s_samples(33) {
            let fr = f.curve().frenet_apparatus(s).unwrap().frame;
            let b1 = triple_product(fr.b2, fr.t, fr.n);
            for v in [fr.b2, fr.t, fr.n] {
                assert!(dot(b1, v).abs() <= 1e-12);
            }
        }
    }
}
