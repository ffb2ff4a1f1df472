//! Scalar special functions: log-gamma, Kummer's confluent hypergeometric
//! series, the cosine-weighted Rayleigh mass of the pointing-error model and
//! generalized binomial coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of summing a convergent series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude of the first term that was not added.
    pub truncation_bound: f64,
}

/// Hard cap on the number of ₁F₁ terms.
pub const KUMMER_MAX_TERMS: usize = 10_000;
const KUMMER_REL_TOL: f64 = 1e-14;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            value: x,
            reason: "requires finite x > 0",
        });
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum away from its pole.
        return Ok(lanczos_ln_gamma(x + 1.0) - x.ln());
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z) by its Taylor
/// series. Summation stops once the next term drops below `1e-14` of the
/// partial sum.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<SeriesResult> {
    if b <= 0.0 && b == b.floor() {
        return Err(Error::Domain {
            function: "kummer_1f1",
            value: b,
            reason: "b must not be zero or a negative integer",
        });
    }
    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    for n in 0..KUMMER_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        if term.abs() < KUMMER_REL_TOL * sum.abs() || term == 0.0 {
            return Ok(SeriesResult {
                value: sum,
                terms_used: n + 1,
                truncation_bound: term.abs(),
            });
        }
        sum += term;
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        what: "kummer_1f1",
        terms: KUMMER_MAX_TERMS,
    })
}

/// `exp(-σ₀²/2) · ₁F₁(-1/2; 1/2; σ₀²/2)`, which equals
/// `(1/σ₀²) ∫₀^∞ θ cos θ exp(-θ²/(2σ₀²)) dθ`, i.e. `E[cos θ_d]` for a
/// Rayleigh deviation angle with scale `σ₀`.
///
/// This is the total probability mass of the continuous part of the
/// misalignment fading distribution.
pub fn cos_weighted_rayleigh_mass(sigma0: f64) -> Result<f64> {
    if !(sigma0 > 0.0) || !sigma0.is_finite() {
        return Err(Error::Domain {
            function: "cos_weighted_rayleigh_mass",
            value: sigma0,
            reason: "requires finite sigma0 > 0",
        });
    }
    let half_var = 0.5 * sigma0 * sigma0;
    let series = kummer_1f1(-0.5, 0.5, half_var)?;
    Ok((-half_var).exp() * series.value)
}

/// Generalized binomial coefficient `r (r-1) ⋯ (r-n+1) / n!` for real `r`.
pub fn gen_binom_coeff(r: f64, n: u64) -> f64 {
    let mut c = 1.0;
    for k in 1..=n {
        c *= (r - (k - 1) as f64) / k as f64;
    }
    c
}

/// Sums `term(0) + term(1) + ...` until `|term(n)| < rel_tol · |partial sum|`
/// or `max_terms` terms have been added. Reaching the cap is not an error;
/// the returned `truncation_bound` reports how far from converged the sum is.
pub fn sum_series(
    mut term: impl FnMut(usize) -> f64,
    rel_tol: f64,
    max_terms: usize,
) -> SeriesResult {
    let mut sum = term(0);
    let mut used = 1;
    while used < max_terms {
        let next = term(used);
        if next.abs() < rel_tol * sum.abs() {
            return SeriesResult {
                value: sum,
                terms_used: used,
                truncation_bound: next.abs(),
            };
        }
        sum += next;
        used += 1;
    }
    SeriesResult {
        value: sum,
        terms_used: used,
        truncation_bound: term(used).abs(),
    }
}

/// `Σₙ (-1)ⁿ C(r, n) qⁿ`, the generalized binomial expansion of `(1 - q)^r`,
/// for `0 ≤ q < 1`.
pub fn binomial_series(r: f64, q: f64, rel_tol: f64, max_terms: usize) -> Result<SeriesResult> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain {
            function: "binomial_series",
            value: q,
            reason: "requires 0 <= q < 1",
        });
    }
    // Carry the coefficient and power along rather than recomputing them.
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut last = 0;
    Ok(sum_series(
        |n| {
            while last < n {
                last += 1;
                coeff *= -(r - (last - 1) as f64) / last as f64;
                power *= q;
            }
            coeff * power
        },
        rel_tol,
        max_terms,
    ))
}
