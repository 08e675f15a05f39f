//! Distribution functions, decreasing rearrangements `f*`, the maximal
//! function `f**`, Schwarz symmetrization and the Hardy–Littlewood gap.
//!
//! Everything here is exact discrete combinatorics on sorted cell values:
//! each cell of measure `h^N` becomes one step of `f*`, so equimeasurability
//! and `L^p`-sum preservation hold up to floating-point reassociation only.

use crate::error::CoreError;
use crate::grid::{GridDomain, GridFunction};
use crate::unit_ball_volume;
use std::io::Write;
use std::sync::Arc;

/// Right-continuous nonincreasing step function on `(0, ∞)`: value
/// `levels[i]` on `[cuts[i-1], cuts[i])` with `cuts[-1] = 0`, and
/// `levels[k]` on `[cuts[k-1], ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    /// Strictly increasing positive breakpoints `t_1 < … < t_k`.
    pub cuts: Vec<f64>,
    /// Nonincreasing levels `v_0 ≥ … ≥ v_k`, one more than `cuts`.
    pub levels: Vec<f64>,
}

impl StepFunction {
    pub fn new(cuts: Vec<f64>, levels: Vec<f64>) -> Result<Self, CoreError> {
        if levels.len() != cuts.len() + 1 {
            return Err(CoreError::invalid("levels must have one more entry than cuts"));
        }
        if cuts.first().is_some_and(|t| *t <= 0.0) {
            return Err(CoreError::invalid("breakpoints must be positive"));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::invalid("breakpoints must increase strictly"));
        }
        if levels.windows(2).any(|w| w[0] < w[1]) {
            return Err(CoreError::invalid("levels must be nonincreasing"));
        }
        Ok(StepFunction { cuts, levels })
    }

    /// Identically zero function.
    pub fn zero() -> Self {
        StepFunction {
            cuts: Vec::new(),
            levels: vec![0.0],
        }
    }

    /// `c · χ_{[0, m)}`.
    pub fn indicator(c: f64, m: f64) -> Self {
        if m <= 0.0 || c == 0.0 {
            return StepFunction::zero();
        }
        StepFunction {
            cuts: vec![m],
            levels: vec![c, 0.0],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        // value on [cuts[i-1], cuts[i]) is levels[i]
        let pos = self.cuts.partition_point(|c| *c <= t);
        self.levels[pos]
    }

    /// Value of the trailing level on `[t_k, ∞)`.
    pub fn tail_level(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    /// Is the function 0 beyond its last breakpoint?
    pub fn compactly_supported(&self) -> bool {
        self.tail_level() == 0.0
    }

    /// Measure of the support (finite only when compactly supported).
    pub fn support_measure(&self) -> f64 {
        if !self.compactly_supported() {
            return f64::INFINITY;
        }
        let mut m = 0.0;
        for i in (0..self.cuts.len()).rev() {
            if self.levels[i] > 0.0 {
                m = self.cuts[i];
                break;
            }
        }
        m
    }

    /// `∫_0^∞ f(t)^p dt` by exact segment sums.
    pub fn lp_integral(&self, p: f64) -> f64 {
        if self.tail_level() != 0.0 {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        let mut prev = 0.0;
        for (i, cut) in self.cuts.iter().enumerate() {
            if self.levels[i] != 0.0 {
                total += self.levels[i].abs().powf(p) * (cut - prev);
            }
            prev = *cut;
        }
        total
    }

    /// `∫_0^t f(τ) dτ`, exact.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut total = 0.0;
        let mut prev = 0.0;
        for (i, cut) in self.cuts.iter().enumerate() {
            let upper = cut.min(t);
            if upper > prev {
                total += self.levels[i] * (upper - prev);
            }
            if *cut >= t {
                return total;
            }
            prev = *cut;
        }
        if t > prev {
            total += self.tail_level() * (t - prev);
        }
        total
    }

    /// Segment view: `(t_start, t_end, level)` triples, the last with
    /// `t_end = ∞`.
    pub fn segments(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.levels.len());
        let mut prev = 0.0;
        for (i, cut) in self.cuts.iter().enumerate() {
            out.push((prev, *cut, self.levels[i]));
            prev = *cut;
        }
        out.push((prev, f64::INFINITY, self.tail_level()));
        out
    }

    /// CSV serialization, columns `(t_start, level)`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<(), CoreError> {
        writeln!(out, "t_start,level")?;
        let mut prev = 0.0;
        for (i, level) in self.levels.iter().enumerate() {
            writeln!(out, "{prev},{level}")?;
            if i < self.cuts.len() {
                prev = self.cuts[i];
            }
        }
        Ok(())
    }
}

/// Distribution function `α_f(s) = |{|f| > s}|` as a decreasing step
/// function of `s`, measured in cells of volume `h^N`.
pub fn distribution(f: &GridFunction) -> Result<StepFunction, CoreError> {
    f.check_finite()?;
    let vol = f.domain.cell_volume();
    let mut mags: Vec<f64> = f
        .values
        .iter()
        .zip(&f.domain.mask)
        .filter(|(_, m)| **m)
        .map(|(v, _)| v.abs())
        .collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // cuts at distinct positive magnitudes; α on [s_i, s_{i+1}) counts the
    // cells strictly above s_i
    let mut cuts = Vec::new();
    let mut levels = vec![0.0f64];
    let n = mags.len();
    let mut i = 0;
    while i < n {
        let s = mags[i];
        let mut j = i;
        while j < n && mags[j] == s {
            j += 1;
        }
        if s > 0.0 {
            cuts.push(s);
            levels.push((n - j) as f64 * vol);
        }
        i = j;
    }
    let positive = mags.iter().filter(|m| **m > 0.0).count();
    levels[0] = positive as f64 * vol;
    StepFunction::new(cuts, levels)
}

/// Decreasing rearrangement `f*`: sorted-descending cell magnitudes, one
/// step of width `h^N` each (equal adjacent values merged).
pub fn decreasing_rearrangement(f: &GridFunction) -> Result<StepFunction, CoreError> {
    f.check_finite()?;
    let vol = f.domain.cell_volume();
    let mut mags: Vec<f64> = f
        .values
        .iter()
        .zip(&f.domain.mask)
        .filter(|(_, m)| **m)
        .map(|(v, _)| v.abs())
        .collect();
    // descending; ties collapse into one step, so sort stability is moot
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cuts = Vec::new();
    let mut levels = Vec::new();
    let mut i = 0;
    while i < mags.len() {
        let v = mags[i];
        let mut j = i;
        while j < mags.len() && mags[j] == v {
            j += 1;
        }
        if v == 0.0 {
            break; // zeros merge into the tail
        }
        levels.push(v);
        cuts.push(j as f64 * vol);
        i = j;
    }
    levels.push(0.0);
    StepFunction::new(cuts, levels)
}

/// Lazy evaluator for the maximal function `f**(t) = (1/t)∫_0^t f*`:
/// piecewise `v + b/t`, evaluated exactly from cumulative integrals.
#[derive(Debug, Clone)]
pub struct MaximalFunction {
    fstar: StepFunction,
    /// cumulative `∫_0^{cuts[i]} f*`
    cumulative: Vec<f64>,
}

impl MaximalFunction {
    pub fn new(fstar: StepFunction) -> Self {
        let mut cumulative = Vec::with_capacity(fstar.cuts.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (i, cut) in fstar.cuts.iter().enumerate() {
            acc += fstar.levels[i] * (cut - prev);
            cumulative.push(acc);
            prev = *cut;
        }
        MaximalFunction { fstar, cumulative }
    }

    pub fn fstar(&self) -> &StepFunction {
        &self.fstar
    }

    pub fn eval(&self, t: f64) -> Result<f64, CoreError> {
        if t <= 0.0 {
            return Err(CoreError::invalid("f** is defined for t > 0"));
        }
        Ok(self.fstar.integral_to(t) / t)
    }

    /// Per-segment pieces `(t0, t1, v, b)` meaning `f**(t) = v + b/t` on
    /// `[t0, t1)`; the last piece has `t1 = ∞`.
    pub fn pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        let mut prev = 0.0;
        let ends = self
            .fstar
            .cuts
            .iter()
            .copied()
            .chain(std::iter::once(f64::INFINITY));
        for (i, seg_end) in ends.enumerate() {
            let v = self.fstar.levels[i];
            let base = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
            // on [prev, seg_end): ∫_0^t f* = base + v (t - prev)
            out.push((prev, seg_end, v, base - v * prev));
            prev = seg_end;
        }
        out
    }
}

pub fn maximal_function(fstar: &StepFunction) -> MaximalFunction {
    MaximalFunction::new(fstar.clone())
}

/// Schwarz symmetrization: radial decreasing resampling
/// `f⋆(x) = f*(ω_N |x|^N)` onto the target grid.
pub fn schwarz_symmetrization(
    f: &GridFunction,
    target: &Arc<GridDomain>,
) -> Result<GridFunction, CoreError> {
    let fstar = decreasing_rearrangement(f)?;
    let support = fstar.support_measure();
    let dim = target.dim;
    let omega = unit_ball_volume(dim);
    let r_support = (support / omega).powf(1.0 / dim as f64);
    for k in 0..dim {
        let half = 0.5 * (target.box_hi[k] - target.box_lo[k]);
        let center = 0.5 * (target.box_hi[k] + target.box_lo[k]);
        if center.abs() > 1e-12 * half {
            return Err(CoreError::Geometry(
                "target box must be centered at the origin".into(),
            ));
        }
        if half < r_support {
            return Err(CoreError::Geometry(format!(
                "target half-width {half} cannot contain the symmetrized ball of radius {r_support}"
            )));
        }
    }
    let values: Vec<f64> = (0..target.len())
        .map(|idx| {
            if !target.mask[idx] {
                return 0.0;
            }
            let x = target.cell_center(idx);
            let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            fstar.eval(omega * r.powi(dim as i32))
        })
        .collect();
    GridFunction::new(target.clone(), values)
}

/// `∫_0^∞ f* g* dt − ∫ f g dx` for nonnegative `f, g` on a shared domain.
/// Nonnegative up to roundoff by the Hardy–Littlewood inequality.
pub fn hardy_littlewood_gap(f: &GridFunction, g: &GridFunction) -> Result<f64, CoreError> {
    if !f.domain.same_layout(&g.domain) {
        return Err(CoreError::DomainMismatch("operands on different grids".into()));
    }
    if f.values.iter().chain(g.values.iter()).any(|v| *v < 0.0) {
        return Err(CoreError::invalid("hardy_littlewood_gap needs nonnegative inputs"));
    }
    let fstar = decreasing_rearrangement(f)?;
    let gstar = decreasing_rearrangement(g)?;
    let rearranged = step_product_integral(&fstar, &gstar);
    let vol = f.domain.cell_volume();
    let direct: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * vol;
    Ok(rearranged - direct)
}

/// `∫_0^∞ f g dt` for two step functions, on the merged segment grid.
pub fn step_product_integral(f: &StepFunction, g: &StepFunction) -> f64 {
    let mut total = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0.0;
    loop {
        let fi = f.levels[i];
        let gj = g.levels[j];
        let next_f = f.cuts.get(i).copied().unwrap_or(f64::INFINITY);
        let next_g = g.cuts.get(j).copied().unwrap_or(f64::INFINITY);
        let next = next_f.min(next_g);
        if fi != 0.0 && gj != 0.0 {
            if next.is_infinite() {
                return f64::INFINITY;
            }
            total += fi * gj * (next - prev);
        }
        if next.is_infinite() {
            return total;
        }
        if next_f == next {
            i += 1;
        }
        if next_g == next {
            j += 1;
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gradient_p_energy, GridDomain};

    fn unit_cells(values: Vec<f64>) -> GridFunction {
        let n = values.len();
        let d = Arc::new(GridDomain::full_box(vec![0.0], vec![n as f64], vec![n]).unwrap());
        GridFunction::new(d, values).unwrap()
    }

    #[test]
    fn zero_distribution_is_zero() {
        let f = unit_cells(vec![0.0; 5]);
        let alpha = distribution(&f).unwrap();
        assert_eq!(alpha, StepFunction::zero());
    }

    #[test]
    fn indicator_distribution() {
        // |A| = 0.5 on a 2-cell grid over (0,1)
        let d = Arc::new(GridDomain::full_box(vec![0.0], vec![1.0], vec![2]).unwrap());
        let f = GridFunction::new(d, vec![1.0, 0.0]).unwrap();
        let alpha = distribution(&f).unwrap();
        assert!((alpha.eval(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(alpha.eval(1.0), 0.0);
        assert_eq!(alpha.eval(2.0), 0.0);
    }

    #[test]
    fn distribution_of_three_values_by_hand() {
        let f = unit_cells(vec![3.0, 1.0, 2.0]);
        let alpha = distribution(&f).unwrap();
        assert_eq!(alpha.eval(0.0), 3.0);
        assert_eq!(alpha.eval(0.9), 3.0);
        assert_eq!(alpha.eval(1.0), 2.0);
        assert_eq!(alpha.eval(1.5), 2.0);
        assert_eq!(alpha.eval(2.0), 1.0);
        assert_eq!(alpha.eval(2.5), 1.0);
        assert_eq!(alpha.eval(3.0), 0.0);
    }

    #[test]
    fn rearrangement_sorts_descending() {
        let f = unit_cells(vec![3.0, 1.0, 2.0]);
        let fs = decreasing_rearrangement(&f).unwrap();
        assert_eq!(fs.cuts, vec![1.0, 2.0, 3.0]);
        assert_eq!(fs.levels, vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn rearrangement_constant_case() {
        let d = Arc::new(GridDomain::full_box(vec![0.0], vec![1.0], vec![4]).unwrap());
        let f = GridFunction::new(d, vec![2.5; 4]).unwrap();
        let fs = decreasing_rearrangement(&f).unwrap();
        assert_eq!(fs, StepFunction::indicator(2.5, 1.0));
    }

    #[test]
    fn rearrangement_is_permutation_invariant() {
        let f = unit_cells(vec![0.3, 1.7, 0.0, 2.2, 1.7]);
        let g = unit_cells(vec![1.7, 2.2, 1.7, 0.0, 0.3]);
        assert_eq!(
            decreasing_rearrangement(&f).unwrap(),
            decreasing_rearrangement(&g).unwrap()
        );
    }

    #[test]
    fn equimeasurability_is_exact() {
        let f = unit_cells(vec![0.25, 3.5, 3.5, 0.0, 1.0, 0.125, 7.0]);
        let fs = decreasing_rearrangement(&f).unwrap();
        // rebuild f* as a grid function on unit cells and compare distributions
        let mut vals = Vec::new();
        for (t0, t1, level) in fs.segments() {
            if level > 0.0 {
                vals.extend(std::iter::repeat(level).take((t1 - t0).round() as usize));
            }
        }
        vals.resize(7, 0.0);
        let fstar_grid = unit_cells(vals);
        assert_eq!(
            distribution(&f).unwrap(),
            distribution(&fstar_grid).unwrap()
        );
    }

    #[test]
    fn lp_sums_are_preserved() {
        let f = unit_cells(vec![0.25, 3.5, 3.5, 0.0, 1.0, 0.125, 7.0]);
        for p in [1.0, 2.0, 3.7] {
            let direct = f.lp_sum(p);
            let viastar = decreasing_rearrangement(&f).unwrap().lp_integral(p);
            assert!((direct - viastar).abs() <= 1e-10 * direct.max(1.0));
        }
    }

    #[test]
    fn maximal_function_of_indicator() {
        let fs = StepFunction::indicator(1.0, 1.0);
        let m = maximal_function(&fs);
        assert_eq!(m.eval(0.5).unwrap(), 1.0);
        assert_eq!(m.eval(1.0).unwrap(), 1.0);
        assert!((m.eval(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((m.eval(8.0).unwrap() - 0.125).abs() < 1e-15);
        assert!(m.eval(0.0).is_err());
    }

    #[test]
    fn maximal_function_of_constant_is_constant() {
        let fs = StepFunction::new(vec![], vec![3.0]).unwrap();
        let m = maximal_function(&fs);
        for t in [0.1, 1.0, 100.0] {
            assert!((m.eval(t).unwrap() - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn maximal_function_steps_321() {
        let fs = StepFunction::new(vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0, 0.0]).unwrap();
        let m = maximal_function(&fs);
        assert!((m.eval(2.0).unwrap() - 2.5).abs() < 1e-15);
        assert!((m.eval(3.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn maximal_dominates_fstar_and_decreases() {
        let fs = StepFunction::new(vec![0.5, 1.25, 4.0], vec![5.0, 3.0, 0.5, 0.0]).unwrap();
        let m = maximal_function(&fs);
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let t = 0.05 * k as f64;
            let v = m.eval(t).unwrap();
            assert!(v >= fs.eval(t) - 1e-15);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn schwarz_indicator_becomes_ball() {
        // f = χ_A with |A| = ω_2 in 2-D: f⋆ = χ_{B_1} up to one cell layer
        let n = 40;
        let d = Arc::new(GridDomain::full_box(vec![-3.0; 2], vec![3.0; 2], vec![n, n]).unwrap());
        let omega2 = unit_ball_volume(2);
        let cells_wanted = (omega2 / d.cell_volume()).round() as usize;
        let mut vals = vec![0.0; d.len()];
        for v in vals.iter_mut().take(cells_wanted) {
            *v = 1.0;
        }
        let f = GridFunction::new(d.clone(), vals).unwrap();
        let sym = schwarz_symmetrization(&f, &d).unwrap();
        let h = d.spacing()[0];
        for idx in 0..d.len() {
            let x = d.cell_center(idx);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let v = sym.values[idx];
            if r < 1.0 - 1.5 * h {
                assert_eq!(v, 1.0, "inside r={r}");
            } else if r > 1.0 + 1.5 * h {
                assert_eq!(v, 0.0, "outside r={r}");
            }
        }
    }

    #[test]
    fn schwarz_of_radial_decreasing_is_close_to_itself() {
        let n = 48;
        let d = Arc::new(GridDomain::full_box(vec![-2.0; 2], vec![2.0; 2], vec![n, n]).unwrap());
        let vals: Vec<f64> = (0..d.len())
            .map(|i| {
                let x = d.cell_center(i);
                (1.0 - (x[0] * x[0] + x[1] * x[1])).max(0.0)
            })
            .collect();
        let f = GridFunction::new(d.clone(), vals).unwrap();
        let sym = schwarz_symmetrization(&f, &d).unwrap();
        let mut worst = 0.0f64;
        for idx in 0..d.len() {
            let x = d.cell_center(idx);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r < 0.9 {
                worst = worst.max((sym.values[idx] - f.values[idx]).abs());
            }
        }
        // resampling error is O(h) at level-set boundaries
        assert!(worst < 0.12, "worst interior deviation {worst}");
    }

    #[test]
    fn schwarz_equimeasurability_within_surface_error() {
        let n = 40;
        let d = Arc::new(GridDomain::full_box(vec![-3.0; 2], vec![3.0; 2], vec![n, n]).unwrap());
        let vals: Vec<f64> = (0..d.len())
            .map(|i| {
                let x = d.cell_center(i);
                if x[0] * x[0] + x[1] * x[1] > 4.0 {
                    return 0.0;
                }
                ((x[0] * 1.3).sin() * (x[1] * 0.7).cos()).abs()
            })
            .collect();
        let f = GridFunction::new(d.clone(), vals).unwrap();
        let sym = schwarz_symmetrization(&f, &d).unwrap();
        let vol = d.cell_volume();
        let h = d.spacing()[0];
        for s in [0.1, 0.3, 0.6, 0.9] {
            let mf = f.values.iter().filter(|v| v.abs() > s).count() as f64 * vol;
            let ms = sym.values.iter().filter(|v| v.abs() > s).count() as f64 * vol;
            let surface_cells = 2.0 * (std::f64::consts::PI * mf).sqrt() / h + 4.0;
            assert!(
                (mf - ms).abs() <= 2.0 * surface_cells * vol,
                "s={s}: {mf} vs {ms}"
            );
        }
    }

    #[test]
    fn schwarz_rejects_small_target() {
        let d = Arc::new(GridDomain::full_box(vec![-0.2; 2], vec![0.2; 2], vec![8, 8]).unwrap());
        let big = Arc::new(GridDomain::full_box(vec![-3.0; 2], vec![3.0; 2], vec![24, 24]).unwrap());
        let f = GridFunction::constant(big, 1.0).unwrap();
        assert!(schwarz_symmetrization(&f, &d).is_err());
    }

    #[test]
    fn polya_szego_for_a_smooth_bump() {
        let n = 64;
        let d = Arc::new(GridDomain::full_box(vec![-2.0; 2], vec![2.0; 2], vec![n, n]).unwrap());
        // off-center anisotropic bump
        let vals: Vec<f64> = (0..d.len())
            .map(|i| {
                let x = d.cell_center(i);
                let q = (x[0] - 0.3) * (x[0] - 0.3) + 2.0 * (x[1] + 0.2) * (x[1] + 0.2);
                (1.0 - q).max(0.0).powi(2)
            })
            .collect();
        let u = GridFunction::new(d.clone(), vals).unwrap();
        let sym = schwarz_symmetrization(&u, &d).unwrap();
        let h = d.spacing()[0];
        for p in [1.5, 2.0, 3.0] {
            let eu = gradient_p_energy(&u, p).unwrap();
            let es = gradient_p_energy(&sym, p).unwrap();
            assert!(
                es <= eu * (1.0 + 5.0 * h),
                "p={p}: symmetrized {es} vs original {eu}"
            );
        }
    }

    #[test]
    fn hardy_littlewood_equality_and_disjoint_cases() {
        // already-sorted f = g: gap is zero exactly
        let sorted = unit_cells(vec![5.0, 4.0, 2.0, 1.0]);
        let gap = hardy_littlewood_gap(&sorted, &sorted).unwrap();
        assert!(gap.abs() <= 1e-12);
        // disjoint unit-measure indicators: ∫fg = 0, ∫f*g* = 1
        let f = unit_cells(vec![1.0, 0.0, 0.0]);
        let g = unit_cells(vec![0.0, 1.0, 0.0]);
        let gap = hardy_littlewood_gap(&f, &g).unwrap();
        assert!((gap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hardy_littlewood_rejects_negative() {
        let f = unit_cells(vec![1.0, -1.0]);
        let g = unit_cells(vec![1.0, 1.0]);
        assert!(hardy_littlewood_gap(&f, &g).is_err());
    }

    #[test]
    fn csv_output_shape() {
        let fs = StepFunction::new(vec![1.0, 2.5], vec![2.0, 1.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        fs.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t_start,level");
        assert_eq!(lines[1], "0,2");
    }
}
