//! Globally adaptive 21-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_522_230,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Kronrod panel: returns (kronrod, error estimate, roundoff floor).
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut resabs = kronrod.abs();
    let mut fv = [0.0; 21];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        kronrod += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for i in 0..10 {
        resasc += WGK[i] * ((fv[2 * i] - mean).abs() + (fv[2 * i + 1] - mean).abs());
    }
    let hab = half.abs();
    let (kronrod, resabs, resasc) = (kronrod * half, resabs * hab, resasc * hab);
    let mut err = (kronrod - gauss * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (kronrod, err, floor)
}

/// Adaptive integrator with absolute/relative tolerance and a subdivision budget.
#[derive(Clone, Copy, Debug)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator { abs_tol: 1e-13, rel_tol: 1e-11, max_subdivisions: 4000 }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Integrator { abs_tol, rel_tol, ..Default::default() }
    }

    pub fn with_budget(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integrate over `[points[0], points[last]]`, starting from the given
    /// breakpoints (which must be non-decreasing).
    pub fn integrate_breaks<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> Result<QuadResult> {
        if points.len() < 2 {
            return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
        }
        let mut heap = BinaryHeap::new();
        let mut value = 0.0;
        let mut error = 0.0;
        let mut floor = 0.0;
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[1] == w[0] {
                continue;
            }
            let (v, e, fl) = gk21(&mut f, w[0], w[1]);
            evaluations += 21;
            value += v;
            error += e;
            floor += fl;
            heap.push(Segment { a: w[0], b: w[1], value: v, error: e, floor: fl });
        }
        let mut splits = 0;
        loop {
            if !value.is_finite() {
                return Err(Error::NonFinite("quadrature integrand".into()));
            }
            // Panel floors add up to a fixed roundoff limit that splitting cannot lower.
            if error <= self.abs_tol.max(self.rel_tol * value.abs()).max(2.0 * floor) {
                break;
            }
            if splits >= self.max_subdivisions {
                return Err(Error::QuadratureBudget {
                    tol: self.abs_tol.max(self.rel_tol * value.abs()),
                    budget: self.max_subdivisions,
                });
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval can no longer be split in floating point.
                heap.push(Segment { error: 0.0, ..worst });
                error -= worst.error;
                continue;
            }
            let (v1, e1, f1) = gk21(&mut f, worst.a, mid);
            let (v2, e2, f2) = gk21(&mut f, mid, worst.b);
            evaluations += 42;
            splits += 1;
            value += v1 + v2 - worst.value;
            error += e1 + e2 - worst.error;
            floor += f1 + f2 - worst.floor;
            heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, floor: f1 });
            heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, floor: f2 });
        }
        // Re-sum to shed accumulated cancellation from the running updates.
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        Ok(QuadResult { value, error, evaluations })
    }
}

/// Convenience wrapper around [`Integrator::integrate`].
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    Integrator::new(abs_tol, rel_tol).integrate(f, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_exact_for_high_degree_polynomials() {
        // Kronrod-21 integrates degree 31 exactly; Gauss-10 degree 19.
        for deg in [0, 5, 19, 30] {
            let mut f = |x: f64| x.powi(deg);
            let (k, _, _) = gk21(&mut f, 0.0, 1.0);
            assert!((k - 1.0 / (deg as f64 + 1.0)).abs() < 1e-15, "deg {deg}: {k}");
        }
    }

    #[test]
    fn smooth_and_singular_integrands() {
        let r = integrate(f64::exp, 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((r.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        // Integrable endpoint singularity.
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        // Peak placed at a breakpoint.
        let r = Integrator::new(1e-13, 1e-13)
            .integrate_breaks(|x: f64| 1.0 / (1.0 + 1e4 * (x - 0.3).powi(2)), &[0.0, 0.3, 1.0])
            .unwrap();
        let exact = ((100.0f64 * 0.7).atan() + (100.0f64 * 0.3).atan()) / 100.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let res = Integrator::new(0.0, 1e-15)
            .with_budget(3)
            .integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0);
        assert!(matches!(res, Err(Error::QuadratureBudget { .. })));
    }
}
