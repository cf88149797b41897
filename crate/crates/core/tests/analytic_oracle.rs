use nlh_core::analytic::{exact_gradient, exact_scattered, Benchmark, IncidentWave};
use nlh_core::scalar::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn at_radius(r: f64, theta: f64) -> [f64; 2] {
    [r * theta.cos(), r * theta.sin()]
}

fn fd_laplacian(f: impl Fn([f64; 2]) -> C, x: [f64; 2], h: f64) -> C {
    let c = f(x) * 4.0;
    (f([x[0] + h, x[1]]) + f([x[0] - h, x[1]]) + f([x[0], x[1] + h]) + f([x[0], x[1] - h]) - c) / (h * h)
}

#[test]
fn continuous_value_and_radial_derivative_at_unit_circle() {
    for k in [10.0, 50.0, 100.0] {
        let b = Benchmark::with_default_epsilon(k);
        let inner = b.scattered([1.0, 0.0]);
        let outer = b.scattered([1.0 + 1e-15, 0.0]);
        assert!((inner - outer).norm() <= 1e-12, "k = {k}");
        let g_in = b.gradient([1.0, 0.0])[0];
        let g_out = b.gradient([1.0 + 1e-15, 0.0])[0];
        assert!((g_in - g_out).norm() <= 1e-10, "k = {k}: {g_in} vs {g_out}");
    }
}

#[test]
fn far_field_decays_like_inverse_sqrt_radius() {
    let ratio = exact_scattered(10.0, [20.0, 0.0]).norm() / exact_scattered(10.0, [10.0, 0.0]).norm();
    assert!((0.68..=0.73).contains(&ratio), "{ratio}");
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let step = 1e-6;
    for _ in 0..20 {
        let x = at_radius(rng.gen_range(0.05..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let g = exact_gradient(10.0, x);
        let fd = [
            (exact_scattered(10.0, [x[0] + step, x[1]]) - exact_scattered(10.0, [x[0] - step, x[1]])) / (2.0 * step),
            (exact_scattered(10.0, [x[0], x[1] + step]) - exact_scattered(10.0, [x[0], x[1] - step])) / (2.0 * step),
        ];
        let scale = g[0].norm().hypot(g[1].norm());
        for i in 0..2 {
            assert!((g[i] - fd[i]).norm() <= 1e-6 * scale, "{x:?}");
        }
        // radial field: no tangential component
        let tangential = g[0] * (-x[1]) + g[1] * x[0];
        assert!(tangential.norm() <= 1e-14 * scale);
    }
}

#[test]
fn linear_operator_reproduces_load() {
    let k = 10.0;
    let b = Benchmark::with_default_epsilon(k);
    let u = |x| b.scattered(x);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        for r in [rng.gen_range(0.0..0.95), rng.gen_range(1.05..2.0)] {
            let x = at_radius(r, theta);
            let lhs = -fd_laplacian(u, x, 1e-4) - u(x) * (k * k);
            let expected = if r < 1.0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) };
            assert!((lhs - expected).norm() <= 1e-4, "r = {r}: {lhs}");
            // the full equation including the Kerr term
            let w = u(x) + b.incident().value(x);
            let kerr = if r <= 0.5 { w * (w.norm_sqr() * k * k * b.epsilon()) } else { C::new(0.0, 0.0) };
            assert!((lhs - kerr - b.load(x)).norm() <= 1e-4);
        }
    }
}

#[test]
fn plane_wave_solves_helmholtz() {
    let wave = IncidentWave::Plane { amplitude: 1.0, k0: 5.4 };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let res = -fd_laplacian(|p| wave.value(p), x, 1e-4) - wave.value(x) * (5.4 * 5.4);
        assert!(res.norm() <= 1e-4);
    }
}

#[test]
fn load_is_bounded() {
    for k in [1.0, 5.0, 20.0, 80.0, 200.0] {
        let b = Benchmark::with_default_epsilon(k);
        for i in 0..=100 {
            let f = b.load([i as f64 * 0.01, 0.0]);
            assert!(f.re.is_finite() && f.im.is_finite() && f.norm() < 10.0, "k = {k}");
        }
    }
}
