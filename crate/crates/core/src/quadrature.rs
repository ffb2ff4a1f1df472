//! Adaptive Gauss–Kronrod quadrature.
//!
//! Every analytic metric reduces to one- or two-dimensional integrals over
//! smooth integrands on short intervals, so a globally adaptive 21-point
//! Gauss–Kronrod scheme (the QUADPACK `qag` strategy) is all that is needed.
//! Besides plain integration, [`adaptive_rule`] returns the final partition
//! as an explicit node/weight set so that an expensive integrand family can
//! be integrated repeatedly on the same nodes.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// Kronrod abscissae on [-1, 1]; odd indices are the embedded 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_600_525_452_196,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule for [`integrate`]: converged once the summed error estimate
/// is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
    /// Upper bound on the width of any interval in the final partition.
    /// Forces a minimum resolution when the rule is reused for other
    /// integrands.
    pub max_width: Option<f64>,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_intervals: 2000,
            max_width: None,
        }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_intervals: 2000,
            max_width: None,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_max_width(mut self, width: f64) -> Self {
        self.max_width = Some(width);
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// A fixed set of nodes and weights, produced by [`adaptive_rule`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// The integral of the function the rule was adapted to.
    pub integral: Integral,
}

impl QuadratureRule {
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Applies the rule to values already evaluated at `self.nodes`.
    pub fn apply_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod21(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut samples = [0.0; 21];
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        if x == 0.0 {
            let fc = f(center);
            samples[10] = fc;
            kronrod += w * fc;
            continue;
        }
        let lo = f(center - half * x);
        let hi = f(center + half * x);
        samples[i] = lo;
        samples[20 - i] = hi;
        kronrod += w * (lo + hi);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!(
            "non-finite integrand value {bad} on [{a}, {b}]"
        )));
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

fn refine(
    f: &mut impl FnMut(f64) -> f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(Vec<Segment>, usize)> {
    if breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite bounds {breaks:?}")));
    }
    let mut segments = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            continue;
        }
        let pieces = match tol.max_width {
            Some(w) if w > 0.0 => (((b - a).abs() / w).ceil() as usize).max(1),
            _ => 1,
        };
        let step = (b - a) / pieces as f64;
        for k in 0..pieces {
            let lo = a + step * k as f64;
            let hi = if k + 1 == pieces { b } else { lo + step };
            segments.push(kronrod21(f, lo, hi)?);
        }
    }
    if segments.is_empty() {
        return Ok((segments, 0));
    }
    let initial = segments.len();
    let mut evaluations = 21 * initial;

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol.target(value) {
            return Ok((segments, evaluations));
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "error estimate {error:e} above tolerance after {} intervals",
                segments.len()
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            return Err(Error::Quadrature(format!(
                "interval [{}, {}] cannot be bisected further",
                seg.a, seg.b
            )));
        }
        segments.push(kronrod21(f, seg.a, mid)?);
        segments.push(kronrod21(f, mid, seg.b)?);
        evaluations += 42;
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` from `breaks[0]` to the last break, starting the adaptive
/// refinement from the given partition. Useful when the integrand has
/// features much narrower than the interval at known locations.
pub fn integrate_with_breaks(mut f: impl FnMut(f64) -> f64, breaks: &[f64], tol: Tolerance) -> Result<Integral> {
    let (segments, evaluations) = refine(&mut f, breaks, tol)?;
    Ok(Integral {
        value: segments.iter().map(|s| s.value).sum(),
        abs_error: segments.iter().map(|s| s.error).sum(),
        evaluations,
    })
}

/// Adapts a partition of `[a, b]` to `f` and returns the resulting composite
/// Kronrod rule. The nodes are sorted in increasing order.
pub fn adaptive_rule(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureRule> {
    adaptive_rule_with_breaks(f, &[a, b], tol)
}

/// [`adaptive_rule`] started from the partition given by `breaks`.
pub fn adaptive_rule_with_breaks(
    mut f: impl FnMut(f64) -> f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadratureRule> {
    let (mut segments, evaluations) = refine(&mut f, breaks, tol)?;
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut nodes = Vec::with_capacity(21 * segments.len());
    let mut weights = Vec::with_capacity(21 * segments.len());
    for seg in &segments {
        let center = 0.5 * (seg.a + seg.b);
        let half = 0.5 * (seg.b - seg.a);
        for i in 0..21 {
            let (x, w) = if i < 10 {
                (-XGK[i], WGK[i])
            } else {
                (XGK[20 - i], WGK[20 - i])
            };
            nodes.push(center + half * x);
            weights.push(half * w);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        integral: Integral {
            value: segments.iter().map(|s| s.value).sum(),
            abs_error: segments.iter().map(|s| s.error).sum(),
            evaluations,
        },
    })
}
