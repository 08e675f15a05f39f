//! The potential gallery: analytic weights `g` with declared singularities,
//! sampled onto grids by cell averaging.
//!
//! Sampling rule: `m^N`-point midpoint sub-sampling per cell (default
//! `m = 3`). Cells containing a point singularity of `|x-a|^{-q}` get the
//! radially exact average over the measure-matched ball around `a`; all
//! other singular loci are handled by excluding sub-sample points within
//! `h/10` of the locus.

use crate::error::CoreError;
use crate::grid::{GridDomain, GridFunction};
use crate::unit_ball_volume;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Singular loci declared by a potential; these seed concentration centers
/// and steer the sampling rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Singularity {
    Point { at: Vec<f64> },
    /// `{x_1 = … = x_k = 0}`, the axis of a cylindrical weight.
    CylinderAxis { k: usize },
    /// The sphere `|x| = radius` (annulus-type weights).
    Sphere { radius: f64 },
}

/// Gallery entry: an analytic weight function on `R^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    /// `|x - center|^{-exponent}`.
    InversePower {
        center: Vec<f64>,
        exponent: f64,
    },
    /// `1/|x'|^{exponent}` with `x' = (x_1, …, x_k)`; needs `exponent < k`.
    Cylindrical {
        k: usize,
        exponent: f64,
    },
    /// Piecewise-constant radial profile `g̃(|x|)`: level `levels[i]` on
    /// `[cuts[i-1], cuts[i])`, zero beyond the last cut.
    RadialProfile {
        cuts: Vec<f64>,
        levels: Vec<f64>,
    },
    /// `value · χ_{B_radius(center)}`.
    IndicatorScaled {
        center: Vec<f64>,
        radius: f64,
        value: f64,
    },
    /// `χ_{1 < |x| ≤ 2} (|x| - 1)^{-beta}` (finite in `I(R^N)` for beta < 1).
    AnnulusSingular {
        beta: f64,
    },
    /// Smooth compactly supported bump
    /// `amplitude · max(0, 1 - |x-center|²/radius²)²`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    Sum {
        terms: Vec<(f64, PotentialSpec)>,
    },
}

impl PotentialSpec {
    /// Pointwise evaluation away from singular loci.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            PotentialSpec::Constant { value } => *value,
            PotentialSpec::InversePower { center, exponent } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2.powf(-0.5 * exponent)
            }
            PotentialSpec::Cylindrical { k, exponent } => {
                let d2: f64 = x.iter().take(*k).map(|a| a * a).sum();
                d2.powf(-0.5 * exponent)
            }
            PotentialSpec::RadialProfile { cuts, levels } => {
                let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let pos = cuts.partition_point(|c| *c <= r);
                if pos < levels.len() {
                    levels[pos]
                } else {
                    0.0
                }
            }
            PotentialSpec::IndicatorScaled {
                center,
                radius,
                value,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                if d2 <= radius * radius {
                    *value
                } else {
                    0.0
                }
            }
            PotentialSpec::AnnulusSingular { beta } => {
                let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                if r > 1.0 && r <= 2.0 {
                    (r - 1.0).powf(-beta)
                } else {
                    0.0
                }
            }
            PotentialSpec::Bump {
                center,
                radius,
                amplitude,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let t = 1.0 - d2 / (radius * radius);
                if t > 0.0 {
                    amplitude * t * t
                } else {
                    0.0
                }
            }
            PotentialSpec::Sum { terms } => {
                terms.iter().map(|(c, s)| c * s.eval(x)).sum()
            }
        }
    }

    pub fn singularities(&self) -> Vec<Singularity> {
        match self {
            PotentialSpec::InversePower { center, .. } => vec![Singularity::Point {
                at: center.clone(),
            }],
            PotentialSpec::Cylindrical { k, .. } => vec![Singularity::CylinderAxis { k: *k }],
            PotentialSpec::AnnulusSingular { .. } => vec![Singularity::Sphere { radius: 1.0 }],
            PotentialSpec::Sum { terms } => {
                let mut out = Vec::new();
                for (_, s) in terms {
                    out.extend(s.singularities());
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Natural domain is all of `R^N` (true for everything except constants,
    /// which are Hardy potentials only on bounded domains).
    pub fn natural_domain_unbounded(&self) -> bool {
        match self {
            PotentialSpec::Constant { .. } => false,
            PotentialSpec::Sum { terms } => {
                terms.iter().all(|(_, s)| s.natural_domain_unbounded())
            }
            _ => true,
        }
    }

    /// Validity of the exponent ranges for a given dimension and p.
    pub fn validate(&self, dim: usize, p: f64) -> Result<(), CoreError> {
        match self {
            PotentialSpec::InversePower { center, exponent } => {
                if center.len() != dim {
                    return Err(CoreError::invalid("center dimension mismatch"));
                }
                if *exponent >= dim as f64 {
                    return Err(CoreError::UnsupportedPotential(format!(
                        "inverse power exponent {exponent} is not locally integrable in dimension {dim}"
                    )));
                }
                Ok(())
            }
            PotentialSpec::Cylindrical { k, exponent } => {
                if *k >= dim || *k < 2 {
                    return Err(CoreError::invalid(format!(
                        "cylindrical split k={k} needs 2 ≤ k < N={dim}"
                    )));
                }
                if p >= *k as f64 || *exponent >= *k as f64 {
                    return Err(CoreError::UnsupportedPotential(format!(
                        "cylindrical weight needs p < k and exponent < k, got p={p}, k={k}"
                    )));
                }
                Ok(())
            }
            PotentialSpec::AnnulusSingular { beta } => {
                if *beta >= 1.0 {
                    return Err(CoreError::UnsupportedPotential(format!(
                        "annulus exponent beta={beta} is not integrable against r^{{p-1}}"
                    )));
                }
                Ok(())
            }
            PotentialSpec::Bump { center, radius, .. }
            | PotentialSpec::IndicatorScaled { center, radius, .. } => {
                if center.len() != dim {
                    return Err(CoreError::invalid("center dimension mismatch"));
                }
                if *radius <= 0.0 {
                    return Err(CoreError::invalid("radius must be positive"));
                }
                Ok(())
            }
            PotentialSpec::RadialProfile { cuts, levels } => {
                if levels.len() != cuts.len() + 1 {
                    return Err(CoreError::invalid("radial profile shape mismatch"));
                }
                Ok(())
            }
            PotentialSpec::Sum { terms } => {
                for (_, s) in terms {
                    s.validate(dim, p)?;
                }
                Ok(())
            }
            PotentialSpec::Constant { .. } => Ok(()),
        }
    }

    /// Distance from `x` to the nearest declared singular locus.
    pub fn singular_distance(&self, x: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for s in self.singularities() {
            let d = match s {
                Singularity::Point { at } => x
                    .iter()
                    .zip(&at)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt(),
                Singularity::CylinderAxis { k } => {
                    x.iter().take(k).map(|a| a * a).sum::<f64>().sqrt()
                }
                Singularity::Sphere { radius } => {
                    (x.iter().map(|a| a * a).sum::<f64>().sqrt() - radius).abs()
                }
            };
            best = best.min(d);
        }
        best
    }
}

/// Cell-averaged sampling of a gallery potential onto a grid.
pub fn sample_potential(
    spec: &PotentialSpec,
    domain: &Arc<GridDomain>,
    subsamples: usize,
) -> Result<GridFunction, CoreError> {
    let m = subsamples.max(1);
    let dim = domain.dim;
    spec.validate(dim, 1.5).or_else(|e| match e {
        // p-dependent checks are repeated at solve time; sampling itself
        // only needs local integrability
        CoreError::UnsupportedPotential(_) => Err(e),
        _ => Err(e),
    })?;
    let singularities = spec.singularities();
    let h_min = domain
        .spacing()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let exclusion = h_min / 10.0;

    let mut offsets: Vec<Vec<f64>> = vec![vec![]];
    for k in 0..dim {
        let h = domain.spacing()[k];
        let mut next = Vec::with_capacity(offsets.len() * m);
        for base in &offsets {
            for j in 0..m {
                let mut o = base.clone();
                o.push(((j as f64 + 0.5) / m as f64 - 0.5) * h);
                next.push(o);
            }
        }
        offsets = next;
    }

    let mut values = vec![0.0f64; domain.len()];
    let spec_ref = &*spec;
    let domain_ref = &**domain;
    let offsets_ref = &offsets;
    let singularities_ref = &singularities;
    crate::par::fill_indexed(&mut values, |idx| {
        if !domain_ref.mask[idx] {
            return 0.0;
        }
        let center = domain_ref.cell_center(idx);
        // a point singularity inside the closed cell: radially exact rule
        for s in singularities_ref {
            if let Singularity::Point { at } = s {
                let inside = at.iter().zip(&center).zip(domain_ref.spacing()).all(
                    |((a, c), h)| (a - c).abs() <= 0.5 * h + 1e-14 * h,
                );
                if inside {
                    if let Some(v) = radially_exact_cell_average(spec_ref, at, domain_ref) {
                        return v;
                    }
                }
            }
        }
        let mut acc = 0.0;
        let mut used = 0usize;
        for o in offsets_ref {
            let x: Vec<f64> = center.iter().zip(o).map(|(c, d)| c + d).collect();
            if !singularities_ref.is_empty() && spec_ref.singular_distance(&x) < exclusion {
                continue; // exclude a sub-cell ball around the singular locus
            }
            acc += spec_ref.eval(&x);
            used += 1;
        }
        if used == 0 {
            // every sub-sample sat inside the exclusion ball; fall back to
            // the cell center pushed to the exclusion distance
            let v = spec_ref.eval(&center);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        } else {
            acc / used as f64
        }
    });

    for v in &values {
        if !v.is_finite() {
            return Err(CoreError::UnsupportedPotential(
                "sampling produced non-finite cell averages".into(),
            ));
        }
    }
    GridFunction::new(domain.clone(), values)
}

/// Exact average of `|x-a|^{-q}` over the measure-matched ball around `a`,
/// `(1/vol) ∫_{B_ρ(a)} |x-a|^{-q} dx` with `ω_N ρ^N = vol`; `None` when the
/// potential is not an inverse power at `a` or the integral diverges.
fn radially_exact_cell_average(
    spec: &PotentialSpec,
    at: &[f64],
    domain: &GridDomain,
) -> Option<f64> {
    fn pole_exponent(spec: &PotentialSpec, at: &[f64]) -> Option<(f64, f64, f64)> {
        // returns (coefficient, exponent, smooth_rest_at_a)
        match spec {
            PotentialSpec::InversePower { center, exponent } => {
                let same = center
                    .iter()
                    .zip(at)
                    .all(|(c, a)| (c - a).abs() < 1e-14);
                same.then_some((1.0, *exponent, 0.0))
            }
            PotentialSpec::Sum { terms } => {
                let mut coeff = 0.0;
                let mut expo = None;
                let mut rest = 0.0;
                for (c, s) in terms {
                    match pole_exponent(s, at) {
                        Some((cc, q, _)) => {
                            if let Some(e) = expo {
                                if (q - e as f64).abs() > 1e-12 {
                                    return None; // mixed pole orders
                                }
                            }
                            expo = Some(q);
                            coeff += c * cc;
                        }
                        None => {
                            if s.singular_distance(at) == 0.0 {
                                return None; // non-point singular term at a
                            }
                            rest += c * s.eval(at);
                        }
                    }
                }
                expo.map(|q| (coeff, q, rest))
            }
            _ => None,
        }
    }
    let (coeff, q, rest) = pole_exponent(spec, at)?;
    let n = domain.dim as f64;
    if q >= n {
        return None;
    }
    let vol = domain.cell_volume();
    let omega = unit_ball_volume(domain.dim);
    let rho = (vol / omega).powf(1.0 / n);
    // ∫_{B_ρ} |y|^{-q} dy = N ω_N ρ^{N-q} / (N-q)
    let integral = n * omega * rho.powf(n - q) / (n - q);
    Some(coeff * integral / vol + rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;

    #[test]
    fn constant_sampling_is_exact() {
        let d = Arc::new(GridDomain::full_box(vec![0.0; 2], vec![1.0; 2], vec![5, 5]).unwrap());
        let g = sample_potential(&PotentialSpec::Constant { value: 3.25 }, &d, 3).unwrap();
        assert!(g.values.iter().all(|v| *v == 3.25));
    }

    #[test]
    fn inverse_power_far_cells_match_center_value() {
        let d = Arc::new(GridDomain::full_box(vec![-1.0; 3], vec![1.0; 3], vec![16, 16, 16]).unwrap());
        let spec = PotentialSpec::InversePower {
            center: vec![0.0; 3],
            exponent: 2.0,
        };
        let g = sample_potential(&spec, &d, 3).unwrap();
        // probe a cell far from the origin
        let idx = d.flat_index(&[14, 13, 12]);
        let x = d.cell_center(idx);
        let exact = 1.0 / x.iter().map(|a| a * a).sum::<f64>();
        let rel = (g.values[idx] - exact).abs() / exact;
        assert!(rel < 0.01, "rel error {rel}");
    }

    #[test]
    fn inverse_power_origin_cell_uses_radial_rule() {
        // odd cell count puts the singularity at a cell center
        let d = Arc::new(GridDomain::full_box(vec![-1.0; 3], vec![1.0; 3], vec![15, 15, 15]).unwrap());
        let spec = PotentialSpec::InversePower {
            center: vec![0.0; 3],
            exponent: 2.0,
        };
        let g = sample_potential(&spec, &d, 3).unwrap();
        let origin = d.flat_index(&[7, 7, 7]);
        let vol = d.cell_volume();
        let omega = unit_ball_volume(3);
        let rho = (vol / omega).powf(1.0 / 3.0);
        let expect = 3.0 * omega * rho / vol; // q = 2, N = 3
        assert!((g.values[origin] - expect).abs() < 1e-12 * expect);
        assert!(g.values[origin].is_finite());
        // integral over a ball approximates the analytic 4πr
        let r = 0.5;
        let sum: f64 = (0..d.len())
            .filter(|i| {
                let x = d.cell_center(*i);
                x.iter().map(|a| a * a).sum::<f64>() <= r * r
            })
            .map(|i| g.values[i])
            .sum();
        let integral = sum * vol;
        let exact = 4.0 * std::f64::consts::PI * r;
        assert!(
            (integral - exact).abs() < 0.04 * exact,
            "{integral} vs {exact}"
        );
    }

    #[test]
    fn annulus_sampling_stays_finite() {
        let d = Arc::new(GridDomain::full_box(vec![-2.5; 3], vec![2.5; 3], vec![20, 20, 20]).unwrap());
        for beta in [0.7, 0.9] {
            let g = sample_potential(&PotentialSpec::AnnulusSingular { beta }, &d, 3).unwrap();
            assert!(g.values.iter().all(|v| v.is_finite()));
            assert!(g.values.iter().any(|v| *v > 0.0));
        }
    }

    #[test]
    fn cylindrical_requires_p_below_k() {
        let spec = PotentialSpec::Cylindrical { k: 2, exponent: 2.0 };
        assert!(spec.validate(3, 2.0).is_err());
        let ok = PotentialSpec::Cylindrical { k: 3, exponent: 2.0 };
        assert!(ok.validate(4, 2.0).is_ok());
    }

    #[test]
    fn cylindrical_sampling_finite_on_axis_cells() {
        let d = Arc::new(GridDomain::full_box(vec![-1.0; 4], vec![1.0; 4], vec![8, 8, 8, 8]).unwrap());
        let spec = PotentialSpec::Cylindrical { k: 3, exponent: 2.0 };
        let g = sample_potential(&spec, &d, 3).unwrap();
        assert!(g.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn sum_combines_terms_linearly_away_from_poles() {
        let d = Arc::new(GridDomain::full_box(vec![0.5; 2], vec![1.5; 2], vec![8, 8]).unwrap());
        let a = PotentialSpec::Constant { value: 1.0 };
        let b = PotentialSpec::Bump {
            center: vec![1.0, 1.0],
            radius: 0.4,
            amplitude: 2.0,
        };
        let sum = PotentialSpec::Sum {
            terms: vec![(2.0, a.clone()), (3.0, b.clone())],
        };
        let ga = sample_potential(&a, &d, 3).unwrap();
        let gb = sample_potential(&b, &d, 3).unwrap();
        let gs = sample_potential(&sum, &d, 3).unwrap();
        for i in 0..d.len() {
            let expect = 2.0 * ga.values[i] + 3.0 * gb.values[i];
            assert!((gs.values[i] - expect).abs() < 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn gallery_specs_serde_round_trip() {
        let specs = vec![
            PotentialSpec::Constant { value: 1.0 },
            PotentialSpec::InversePower {
                center: vec![0.0; 3],
                exponent: 2.0,
            },
            PotentialSpec::Cylindrical { k: 3, exponent: 2.0 },
            PotentialSpec::AnnulusSingular { beta: 0.8 },
            PotentialSpec::Sum {
                terms: vec![(1.0, PotentialSpec::Constant { value: 2.0 })],
            },
        ];
        for s in specs {
            let text = serde_json::to_string(&s).unwrap();
            let back: PotentialSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn unknown_kind_rejected_loudly() {
        let text = r#"{"kind":"mystery","value":1.0}"#;
        assert!(serde_json::from_str::<PotentialSpec>(text).is_err());
    }
}
