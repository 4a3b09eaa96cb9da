use std::f64::consts::PI;

use critex::fraclap::{japanese, GridFunction};
use critex::sim::{SimRun, Snapshot};
use critex::testfn::TestFunctionFamily;
use rustfft::num_complex::Complex64;

/// `∫_a^b f` by Gauss–Legendre on `panels` equal panels, 20 nodes each.
pub fn gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    // nodes and weights on [−1, 1] from Newton on P_20
    let order = 20;
    let mut nodes = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                let w = 2.0 / ((1.0 - x * x) * dp * dp);
                nodes.push((x, w));
                break;
            }
        }
    }
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            nodes.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Unitary Fourier transform of the radial `⟨x⟩^{−q}` by summing the
/// oscillatory integral over half periods and averaging consecutive partial
/// sums of the resulting alternating series.
pub fn fourier_by_quadrature(n: u32, q: f64, xi: f64) -> f64 {
    let integrand = |r: f64| match n {
        // √(2/π) ∫₀^∞ ⟨r⟩^{−q} cos(ξr) dr
        1 => (2.0 / PI).sqrt() * japanese(r).powf(-q) * (xi * r).cos(),
        // √(2/π)/ξ ∫₀^∞ r ⟨r⟩^{−q} sin(ξr) dr
        3 => (2.0 / PI).sqrt() / xi * r * japanese(r).powf(-q) * (xi * r).sin(),
        _ => unreachable!(),
    };
    let half = PI / xi;
    let offset = if n == 1 { 0.5 * half } else { 0.0 };
    let mut sum = gauss(integrand, 0.0, offset.max(1e-300), 4);
    let mut partial = Vec::new();
    let mut a = offset;
    for _ in 0..4000 {
        sum += gauss(integrand, a, a + half, 2);
        partial.push(sum);
        a += half;
    }
    // repeated averaging of the alternating tail
    for _ in 0..8 {
        partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    *partial.last().unwrap()
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `ψ = (1 + e^u)^{−P}`, `u = 1/(1−z) − 1/(z−½)`, continued to complex `z`.
pub fn psi_complex(z: Complex64, power: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let u = one / (one - z) - one / (z - 0.5);
    let softplus = if u.re > 0.0 { u + (one + (-u).exp()).ln() } else { (one + u.exp()).ln() };
    (-softplus * power).exp()
}

/// `d^k/dt^k ψ(t/s)` by the Cauchy integral on a circle inside the
/// analyticity region, `t/s ∈ (½, 1)`.
pub fn cauchy_derivative(power: f64, s: f64, t: f64, k: u32) -> f64 {
    let x = t / s;
    let du = 1.0 / (1.0 - x).powi(2) + 1.0 / (x - 0.5).powi(2);
    let rho = (0.4 / du).min(0.5 * (x - 0.5)).min(0.5 * (1.0 - x));
    let nodes = 128;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..nodes {
        let e = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / nodes as f64);
        acc += psi_complex(x + e * rho, power) * e.powi(-(k as i32));
    }
    factorial(k) * acc.re / (nodes as f64 * rho.powi(k as i32)) / s.powi(k as i32)
}

/// Composite Simpson on `[a, b]` with `2k` panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, k: usize) -> f64 {
    let h = (b - a) / (2 * k) as f64;
    let mut acc = f(a) + f(b);
    for i in 1..2 * k {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `ψ_R^{(−k)}(t) = (−1)^k ∫_t^{S} (τ−t)^{k−1}/(k−1)! ψ(τ/S) dτ`, `S = R^η`,
/// with the plateau part done exactly.
pub fn primitive_by_quadrature(f: &TestFunctionFamily, k: u32, t: f64) -> f64 {
    let s = f.time_scale();
    let psi = |tau: f64| f.psi_derivative(0, tau / s).unwrap();
    let kernel = |tau: f64| (tau - t).powi(k as i32 - 1) / factorial(k - 1);
    let mut v = 0.0;
    let start = t.max(0.5 * s);
    if t < 0.5 * s {
        v += (0.5 * s - t).powi(k as i32) / factorial(k);
    }
    if start < s {
        v += simpson(|tau| kernel(tau) * psi(tau), start, s, 20_000);
    }
    if k % 2 == 0 {
        v
    } else {
        -v
    }
}

pub fn manufactured_run(step: f64, half_width: f64, points: usize) -> SimRun {
    // u = e^{−t}⟨x⟩^{−2} solves u_t + (−Δ)^{1/2}u = F with
    // F = e^{−t}(−⟨x⟩^{−2} + (1 − x²)⟨x⟩^{−4})
    let count = (2.0 / step).round() as usize + 2;
    let snapshots = (0..=count)
        .map(|k| {
            let t = k as f64 * step;
            let e = (-t).exp();
            let u = GridFunction::from_fn(1, points, half_width, |x| e / (1.0 + x[0] * x[0])).unwrap();
            let forcing = GridFunction::from_fn(1, points, half_width, |x| {
                let w = 1.0 / (1.0 + x[0] * x[0]);
                e * (-w + (1.0 - x[0] * x[0]) * w * w)
            })
            .unwrap();
            Snapshot { t, u, ut: None, forcing }
        })
        .collect();
    SimRun::from_snapshots(snapshots)
}
