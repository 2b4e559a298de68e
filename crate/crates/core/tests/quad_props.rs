use fracinfo::quad::{gauss_kronrod, integrate, integrate_semiinfinite, Symmetry, Tail};
use fracinfo::{SingularityHint, Tolerance};
use proptest::prelude::*;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn poly_integral(c: &[f64], a: f64, b: f64) -> f64 {
    c.iter().enumerate().map(|(p, v)| v * (b.powi(p as i32 + 1) - a.powi(p as i32 + 1)) / (p as f64 + 1.0)).sum()
}

/// `Σ aᵢcos(wᵢt + φᵢ) + b·e^{ct}` and its integral over `[lo, hi]`.
struct Smooth {
    waves: Vec<(f64, f64, f64)>,
    b: f64,
    c: f64,
}

impl Smooth {
    fn eval(&self, t: f64) -> f64 {
        self.waves.iter().map(|(a, w, p)| a * (w * t + p).cos()).sum::<f64>() + self.b * (self.c * t).exp()
    }

    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let waves: f64 = self.waves.iter().map(|(a, w, p)| a * ((w * hi + p).sin() - (w * lo + p).sin()) / w).sum();
        waves + self.b * ((self.c * hi).exp() - (self.c * lo).exp()) / self.c
    }

    fn abs_scale(&self, lo: f64, hi: f64) -> f64 {
        (hi - lo) * (self.waves.iter().map(|w| w.0.abs()).sum::<f64>() + self.b.abs() * (self.c.abs() * lo.abs().max(hi.abs())).exp())
    }
}

#[test]
fn error_estimates_are_honest_on_smooth_integrands() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let cases = 1000;
    let mut honest = 0;
    for _ in 0..cases {
        let f = Smooth {
            waves: (0..rng.gen_range(1..4))
                .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.5..40.0), rng.gen_range(0.0..6.3)))
                .collect(),
            b: rng.gen_range(-1.0..1.0),
            c: rng.gen_range(-3.0..3.0),
        };
        let lo = rng.gen_range(-2.0..1.0);
        let hi = lo + rng.gen_range(0.1..4.0);
        let rel = [1e-4, 1e-6, 1e-8][rng.gen_range(0..3)];
        let r = integrate(|t| f.eval(t), lo, hi, Tolerance::new(0.0, rel), &[]).unwrap();
        let err = (r.value - f.integral(lo, hi)).abs();
        // rounding floor of the reference and of the sum itself
        if err <= 3.0 * r.error_estimate + 1e-14 * f.abs_scale(lo, hi) {
            honest += 1;
        }
    }
    assert!(honest as f64 >= 0.99 * cases as f64, "{honest}/{cases}");
}

#[test]
fn semi_infinite_gaussian_moments() {
    let tol = Tolerance::new(0.0, 1e-12);
    let g = integrate_semiinfinite(|t| (-t * t).exp(), Symmetry::Even, Tail::RationalMap, tol, &[]).unwrap();
    assert!((g.value - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    let m2 = integrate_semiinfinite(|t| t * t * (-t * t).exp(), Symmetry::Even, Tail::Truncate { upper: 9.0 }, tol, &[]).unwrap();
    assert!((m2.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-11);
}

proptest! {
    #[test]
    fn single_panel_exact_to_degree_fifteen(c in prop::collection::vec(-3.0f64..3.0, 16), a in -2.0f64..0.0, w in 0.1f64..3.0) {
        let b = a + w;
        let (v, _) = gauss_kronrod(|x| poly(&c, x), a, b);
        let exact = poly_integral(&c, a, b);
        let scale = c.iter().map(|x| x.abs()).sum::<f64>() * w * (a.abs().max(b.abs()).max(1.0)).powi(15);
        prop_assert!((v - exact).abs() <= 1e-13 * scale);
    }

    #[test]
    fn error_estimate_is_honest(p in -0.95f64..2.5, rel in prop::sample::select(vec![1e-6, 1e-9, 1e-12])) {
        let hints = if p.fract() != 0.0 { vec![SingularityHint::new(0.0, p)] } else { vec![] };
        let r = integrate(|t| t.powf(p), 0.0, 1.0, Tolerance::new(0.0, rel), &hints).unwrap();
        let err = (r.value - 1.0 / (p + 1.0)).abs();
        prop_assert!(r.converged);
        prop_assert!(err <= r.error_estimate.max(1e-14 / (p + 1.0)), "err {err} estimate {}", r.error_estimate);
        prop_assert!(err <= 10.0 * rel / (p + 1.0));
    }

    #[test]
    fn endpoint_hint(p in -0.95f64..-0.01) {
        let tol = Tolerance::new(0.0, 1e-11);
        let with = integrate(|t| t.powf(p), 0.0, 1.0, tol, &[SingularityHint::new(0.0, p)]).unwrap();
        prop_assert!(((with.value - 1.0 / (p + 1.0)) * (p + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn hint_saves_evaluations(p in -0.5f64..-0.05) {
        let tol = Tolerance::new(0.0, 1e-10);
        let with = integrate(|t| t.powf(p), 0.0, 1.0, tol, &[SingularityHint::new(0.0, p)]).unwrap();
        let without = integrate(|t| t.powf(p), 0.0, 1.0, tol, &[]).unwrap();
        prop_assert!(((without.value - 1.0 / (p + 1.0)) * (p + 1.0)).abs() < 1e-9);
        prop_assert!(without.evaluations >= 10 * with.evaluations, "{} vs {}", without.evaluations, with.evaluations);
    }

    #[test]
    fn interior_singularity(loc in prop::sample::select(vec![0.25, 0.375, 0.5, 0.625]), p in -0.4f64..-0.05) {
        let r = integrate(|t| (t - loc).abs().powf(p), 0.0, 1.0, Tolerance::new(0.0, 1e-9), &[SingularityHint::new(loc, p)]).unwrap();
        let exact = (loc.powf(p + 1.0) + (1.0 - loc).powf(p + 1.0)) / (p + 1.0);
        prop_assert!((r.value - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn strong_interior_singularity_never_lies(loc in 0.1f64..0.9, p in -0.95f64..-0.4) {
        // near `loc` the distance t − loc rounds away, so a silent wrong answer
        // is the failure mode to rule out
        let exact = (loc.powf(p + 1.0) + (1.0 - loc).powf(p + 1.0)) / (p + 1.0);
        if let Ok(r) = integrate(|t| (t - loc).abs().powf(p), 0.0, 1.0, Tolerance::new(0.0, 1e-9), &[SingularityHint::new(loc, p)]) {
            prop_assert!((r.value - exact).abs() <= 3.0 * r.error_estimate.max(1e-9 * exact));
        }
    }
}

/// Midpoint rule on `t = L·s^q`, which smooths an integrable power at 0.
fn graded_oracle(f: impl Fn(f64) -> f64, upper: f64, q: f64, points: usize) -> f64 {
    let h = 1.0 / points as f64;
    let mut acc = 0.0;
    let mut comp = 0.0;
    for i in 0..points {
        let s = (i as f64 + 0.5) * h;
        let y = f(upper * s.powf(q)) * q * upper * s.powf(q - 1.0) * h - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    acc
}

#[test]
fn singular_envelope_against_graded_oracle() {
    let alpha: f64 = 1.5;
    let f = |t: f64| t.powf(alpha - 2.0) * (-2.0 * t.powf(alpha / 2.0 + 1.0) / (alpha + 2.0)).exp();
    let r = integrate_semiinfinite(
        f,
        Symmetry::Even,
        Tail::Truncate { upper: fracinfo::quad::envelope_cutoff(alpha, 1e-18) },
        Tolerance::default(),
        &[SingularityHint::new(0.0, alpha - 2.0)],
    )
    .unwrap();
    let oracle = 2.0 * graded_oracle(f, fracinfo::quad::envelope_cutoff(alpha, 1e-30), 6.0, 10_000_000);
    assert!((r.value - oracle).abs() < 1e-7 * oracle, "{} vs {oracle}", r.value);
}
