//! Lorentz quasi-norms `|f|_{(P,Q)}`, norms `‖f‖_{(P,Q)}` via the maximal
//! function, and the radial weighted norm `‖g‖_I = ∫_0^∞ r^{p-1} g̃(r) dr`.
//!
//! Step-function reductions are exact per segment (power antiderivatives);
//! `+∞` is an ordinary return value so that membership tests read naturally.

use crate::error::CoreError;
use crate::rearrange::{MaximalFunction, StepFunction};

/// The pair `(P, Q)`; `Q = None` encodes `Q = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex {
    pub p: f64,
    pub q: Option<f64>,
}

impl LorentzIndex {
    pub fn new(p: f64, q: Option<f64>) -> Result<Self, CoreError> {
        if !(p > 1.0) {
            return Err(CoreError::invalid("Lorentz index needs P > 1"));
        }
        if let Some(q) = q {
            if !(q >= 1.0) || !q.is_finite() {
                return Err(CoreError::invalid("Lorentz index needs Q in [1, ∞]"));
            }
        }
        Ok(LorentzIndex { p, q })
    }

    pub fn weak(p: f64) -> Result<Self, CoreError> {
        LorentzIndex::new(p, None)
    }
}

/// `|f|_{(P,Q)}` from the decreasing rearrangement.
pub fn lorentz_quasinorm(fstar: &StepFunction, idx: LorentzIndex) -> f64 {
    match idx.q {
        None => {
            // t^{1/P} v increases in t on each segment: sup at the right end
            let mut sup = 0.0f64;
            for (_, t1, v) in fstar.segments() {
                if v == 0.0 {
                    continue;
                }
                if t1.is_infinite() {
                    return f64::INFINITY;
                }
                sup = sup.max(v * t1.powf(1.0 / idx.p));
            }
            sup
        }
        Some(q) => {
            // ∫ t^{Q/P - 1} v^Q dt, exact power antiderivatives
            let a = q / idx.p;
            let mut total = 0.0;
            for (t0, t1, v) in fstar.segments() {
                if v == 0.0 {
                    continue;
                }
                if t1.is_infinite() {
                    return f64::INFINITY;
                }
                total += v.powf(q) * (t1.powf(a) - t0.powf(a)) / a;
            }
            total.powf(1.0 / q)
        }
    }
}

/// `‖f‖_{(P,Q)}`: the same reduction with `f**` in place of `f*`.
/// Always at least the quasi-norm since `f** ≥ f*`.
pub fn lorentz_norm(fstar: &StepFunction, idx: LorentzIndex) -> f64 {
    let maximal = MaximalFunction::new(fstar.clone());
    lorentz_norm_of_maximal(&maximal, idx)
}

pub fn lorentz_norm_of_maximal(maximal: &MaximalFunction, idx: LorentzIndex) -> f64 {
    let pieces = maximal.pieces();
    match idx.q {
        None => {
            let inv_p = 1.0 / idx.p;
            let mut sup = 0.0f64;
            for (t0, t1, v, b) in pieces {
                if v == 0.0 && b == 0.0 {
                    continue;
                }
                // w(t) = t^{1/P} f**(t) = v t^{1/P} + b t^{1/P - 1}
                let w = |t: f64| v * t.powf(inv_p) + b * t.powf(inv_p - 1.0);
                if t1.is_infinite() {
                    if v > 0.0 {
                        return f64::INFINITY;
                    }
                    if t0 > 0.0 {
                        sup = sup.max(w(t0)); // pure b/t piece decays
                    }
                    continue;
                }
                if t0 > 0.0 {
                    sup = sup.max(w(t0));
                }
                sup = sup.max(w(t1));
                if v > 0.0 && b > 0.0 {
                    let t_crit = b * (idx.p - 1.0) / v;
                    if t_crit > t0 && t_crit < t1 {
                        sup = sup.max(w(t_crit));
                    }
                }
            }
            sup
        }
        Some(q) => {
            let a = q / idx.p;
            let mut total = 0.0;
            for (t0, t1, v, b) in pieces {
                if v == 0.0 && b == 0.0 {
                    continue;
                }
                if t1.is_infinite() {
                    if v > 0.0 {
                        return f64::INFINITY;
                    }
                    // ∫_{t0}^∞ t^{a-1} (b/t)^Q dt converges since a < Q
                    let expo = a - q;
                    total += b.powf(q) * (-t0.powf(expo)) / expo;
                    continue;
                }
                total += piece_integral(t0, t1, v, b, a, q);
            }
            total.powf(1.0 / q)
        }
    }
}

/// `∫_{t0}^{t1} t^{a-1} (v + b/t)^Q dt`: binomial-exact for integer `Q`,
/// adaptive Simpson otherwise (interior pieces are smooth).
fn piece_integral(t0: f64, t1: f64, v: f64, b: f64, a: f64, q: f64) -> f64 {
    if b == 0.0 {
        return v.powf(q) * (t1.powf(a) - t0.powf(a)) / a;
    }
    let q_round = q.round();
    if (q - q_round).abs() < 1e-12 && (1.0..=64.0).contains(&q_round) {
        let qi = q_round as u32;
        let mut total = 0.0;
        let mut binom = 1.0f64;
        for j in 0..=qi {
            // C(Q,j) v^{Q-j} b^j ∫ t^{a-1-j} dt
            let expo = a - j as f64;
            let term = if expo.abs() < 1e-13 {
                (t1 / t0).ln()
            } else {
                (t1.powf(expo) - t0.powf(expo)) / expo
            };
            total += binom * v.powf((qi - j) as f64) * b.powi(j as i32) * term;
            binom *= (qi - j) as f64 / (j + 1) as f64;
        }
        total
    } else {
        let f = |t: f64| t.powf(a - 1.0) * (v + b / t).powf(q);
        adaptive_simpson(&f, t0, t1, 1e-12, 40)
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let whole = simpson(f, a, b);
    adaptive_simpson_rec(f, a, b, whole, tol, depth)
}

fn adaptive_simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol * (1.0 + refined.abs()) {
        refined + (refined - whole) / 15.0
    } else {
        adaptive_simpson_rec(f, a, m, left, tol * 0.5, depth - 1)
            + adaptive_simpson_rec(f, m, b, right, tol * 0.5, depth - 1)
    }
}

/// Analytic pure-power profile `f*(t) = coeff · t^{-exponent}` on `(0, ∞)`.
/// Backs the exact weak-norm identities that step functions cannot
/// represent.
#[derive(Debug, Clone, Copy)]
pub struct PowerProfile {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerProfile {
    /// `sup t^{1/P} f*(t)`: finite only in the matched case `1/P = exponent`.
    pub fn weak_quasinorm(&self, p: f64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        if (1.0 / p - self.exponent).abs() < 1e-14 {
            self.coeff
        } else {
            f64::INFINITY
        }
    }

    /// `f** = f*/(1 - exponent)` for exponent < 1, divergent otherwise.
    pub fn maximal(&self) -> Option<PowerProfile> {
        if self.exponent < 1.0 {
            Some(PowerProfile {
                coeff: self.coeff / (1.0 - self.exponent),
                exponent: self.exponent,
            })
        } else {
            None
        }
    }

    /// `sup t^{1/P} f**(t)`.
    pub fn weak_norm(&self, p: f64) -> f64 {
        match self.maximal() {
            Some(m) => m.weak_quasinorm(p),
            None => f64::INFINITY,
        }
    }

    /// `sup_{[a,b]} t^{1/P} f*(t)` for the truncated profile.
    pub fn weak_quasinorm_on(&self, p: f64, a: f64, b: f64) -> f64 {
        let e = 1.0 / p - self.exponent;
        if e.abs() < 1e-14 {
            self.coeff
        } else {
            self.coeff * (a.powf(e)).max(b.powf(e))
        }
    }
}

/// Piecewise-constant radial profile `g̃(r)`; unlike [`StepFunction`] the
/// levels need not be monotone (radial profiles of annuli are not).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub cuts: Vec<f64>,
    pub levels: Vec<f64>,
}

impl RadialProfile {
    pub fn new(cuts: Vec<f64>, levels: Vec<f64>) -> Result<Self, CoreError> {
        if levels.len() != cuts.len() + 1 {
            return Err(CoreError::invalid("levels must have one more entry than cuts"));
        }
        if cuts.first().is_some_and(|t| *t <= 0.0) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::invalid("cuts must be positive and increasing"));
        }
        if levels.iter().any(|v| *v < 0.0) {
            return Err(CoreError::invalid("radial profiles must be nonnegative"));
        }
        Ok(RadialProfile { cuts, levels })
    }

    pub fn segments(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.levels.len());
        let mut prev = 0.0;
        for (i, cut) in self.cuts.iter().enumerate() {
            out.push((prev, *cut, self.levels[i]));
            prev = *cut;
        }
        out.push((prev, f64::INFINITY, *self.levels.last().unwrap()));
        out
    }
}

impl From<&StepFunction> for RadialProfile {
    fn from(fs: &StepFunction) -> Self {
        RadialProfile {
            cuts: fs.cuts.clone(),
            levels: fs.levels.clone(),
        }
    }
}

/// `∫_0^∞ r^{p-1} g̃(r) dr` for a piecewise-constant radial profile, exact.
pub fn radial_i_norm_step(profile: &RadialProfile, p: f64) -> f64 {
    if *profile.levels.last().unwrap() > 0.0 {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    for (r0, r1, level) in profile.segments() {
        if level == 0.0 || r1.is_infinite() {
            continue;
        }
        total += level * (r1.powf(p) - r0.powf(p)) / p;
    }
    total
}

/// `∫_a^b r^{p-1} g̃(r) dr` for an analytic radial profile with possible
/// endpoint singularities. Panels shrink geometrically toward both
/// endpoints; if panel contributions stop decaying the integral is `+∞`.
pub fn radial_i_norm_analytic(
    profile: impl Fn(f64) -> f64,
    p: f64,
    support: (f64, f64),
    rel_tol: f64,
) -> f64 {
    let (a, b) = support;
    if !(b > a) || a < 0.0 {
        return 0.0;
    }
    let f = |r: f64| r.powf(p - 1.0) * profile(r);
    let mid = 0.5 * (a + b);
    let left = panel_sum_toward(&f, mid, a, rel_tol);
    let right = panel_sum_toward(&f, mid, b, rel_tol);
    left + right
}

/// Integrate from `from` toward the possibly singular `endpoint` over
/// geometrically shrinking panels.
fn panel_sum_toward(f: &impl Fn(f64) -> f64, from: f64, endpoint: f64, rel_tol: f64) -> f64 {
    let mut total = 0.0;
    let mut outer = from;
    let mut prev_panel = f64::INFINITY;
    let mut non_decaying = 0;
    for k in 1..=80 {
        let inner = endpoint + (from - endpoint) * 0.5f64.powi(k);
        if inner == endpoint || inner == outer {
            // f64 cannot resolve the endpoint any closer; the remaining
            // mass of an integrable singularity sits below resolution
            return total;
        }
        let (lo, hi) = if inner < outer { (inner, outer) } else { (outer, inner) };
        let panel = adaptive_simpson(f, lo, hi, rel_tol, 20);
        total += panel;
        if !total.is_finite() {
            return f64::INFINITY;
        }
        if panel.abs() <= rel_tol * total.abs().max(1e-300) {
            return total;
        }
        if panel.abs() >= 0.999 * prev_panel.abs() {
            non_decaying += 1;
            if non_decaying >= 6 {
                return f64::INFINITY; // contributions not decaying: divergent
            }
        } else {
            non_decaying = 0;
        }
        prev_panel = panel;
        outer = inner;
    }
    if non_decaying > 0 {
        f64::INFINITY
    } else {
        total
    }
}
