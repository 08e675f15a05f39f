//! Cell-centered Cartesian grids: domains Ω as boolean masks, functions on
//! them, p-Dirichlet energies and weighted integrals.
//!
//! Conventions shared by every solver in the crate:
//!
//! * values live at cell centers, row-major with the last axis fastest;
//! * masked-false cells are hard zeros (zero extension of `D^{1,p}_0(Ω)`);
//! * the discrete gradient uses forward differences, falling back to the
//!   backward difference at the upper grid edge (interior-only differences —
//!   Dirichlet conditions come from the mask, never from the box edge);
//! * integrals are midpoint sums, `Σ value · h^N`.

use crate::error::CoreError;
use crate::par;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Axis-aligned box in `R^N` with a per-cell inside-Ω mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    pub dim: usize,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub cells_per_axis: Vec<usize>,
    pub mask: Vec<bool>,
    /// Row-major strides, last axis contiguous.
    strides: Vec<usize>,
    spacing: Vec<f64>,
}

impl GridDomain {
    pub fn new(
        box_lo: Vec<f64>,
        box_hi: Vec<f64>,
        cells_per_axis: Vec<usize>,
        mask: Vec<bool>,
    ) -> Result<Self, CoreError> {
        let dim = cells_per_axis.len();
        if dim == 0 || box_lo.len() != dim || box_hi.len() != dim {
            return Err(CoreError::invalid("axis count mismatch"));
        }
        let mut spacing = Vec::with_capacity(dim);
        for k in 0..dim {
            if cells_per_axis[k] == 0 {
                return Err(CoreError::invalid("zero cells on an axis"));
            }
            let h = (box_hi[k] - box_lo[k]) / cells_per_axis[k] as f64;
            if !(h > 0.0) {
                return Err(CoreError::invalid("non-positive spacing"));
            }
            spacing.push(h);
        }
        let n: usize = cells_per_axis.iter().product();
        if mask.len() != n {
            return Err(CoreError::invalid(format!(
                "mask length {} differs from cell count {n}",
                mask.len()
            )));
        }
        let mut strides = vec![1usize; dim];
        for k in (0..dim.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * cells_per_axis[k + 1];
        }
        Ok(GridDomain {
            dim,
            box_lo,
            box_hi,
            cells_per_axis,
            mask,
            strides,
            spacing,
        })
    }

    /// Fully masked box.
    pub fn full_box(
        box_lo: Vec<f64>,
        box_hi: Vec<f64>,
        cells_per_axis: Vec<usize>,
    ) -> Result<Self, CoreError> {
        let n = cells_per_axis.iter().product();
        GridDomain::new(box_lo, box_hi, cells_per_axis, vec![true; n])
    }

    /// Box `(lo, hi)^N` with `n_live` live cells per axis and a one-cell
    /// masked-false margin whose cell centers sit exactly on the nominal
    /// walls. This realizes homogeneous Dirichlet data *on* `∂Ω` (zeros at
    /// the walls), which keeps eigenvalues and capacities `O(h²)` accurate;
    /// masking the outer layer of a plain box instead would move the wall
    /// half a cell inward.
    pub fn dirichlet_box(lo: f64, hi: f64, dim: usize, n_live: usize) -> Result<Self, CoreError> {
        if n_live == 0 {
            return Err(CoreError::invalid("empty interior"));
        }
        let h = (hi - lo) / (n_live + 1) as f64;
        let n = n_live + 2;
        let mut domain = GridDomain::full_box(
            vec![lo - 0.5 * h; dim],
            vec![hi + 0.5 * h; dim],
            vec![n; dim],
        )?;
        let cells = domain.cells_per_axis.clone();
        for idx in 0..domain.len() {
            let mi = domain.multi_index(idx);
            if (0..dim).any(|k| mi[k] == 0 || mi[k] == cells[k] - 1) {
                domain.mask[idx] = false;
            }
        }
        Ok(domain)
    }

    /// Ball-masked domain: live cells are those with center in `B_R(center)`,
    /// inside a box just covering the ball. Used as the finite stage for
    /// free-space capacity problems.
    pub fn ball_domain(center: &[f64], radius: f64, h: f64) -> Result<Self, CoreError> {
        let dim = center.len();
        let n = (2.0 * (radius + h) / h).ceil() as usize;
        let lo: Vec<f64> = center.iter().map(|c| c - 0.5 * n as f64 * h).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + 0.5 * n as f64 * h).collect();
        let mut domain = GridDomain::full_box(lo, hi, vec![n; dim])?;
        let r2 = radius * radius;
        let mask: Vec<bool> = (0..domain.len())
            .map(|idx| {
                let x = domain.cell_center(idx);
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2 < r2
            })
            .collect();
        domain.mask = mask;
        Ok(domain)
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Cell volume `h_1 ··· h_N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut mi = vec![0usize; self.dim];
        for k in 0..self.dim {
            mi[k] = idx / self.strides[k];
            idx %= self.strides[k];
        }
        mi
    }

    pub fn flat_index(&self, mi: &[usize]) -> usize {
        mi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        let mi = self.multi_index(idx);
        (0..self.dim)
            .map(|k| self.box_lo[k] + (mi[k] as f64 + 0.5) * self.spacing[k])
            .collect()
    }

    /// Measure of the masked region, `(live cells) · h^N`.
    pub fn mask_measure(&self) -> f64 {
        self.mask.iter().filter(|m| **m).count() as f64 * self.cell_volume()
    }

    /// Cheap structural compatibility check for functions sharing a domain.
    pub fn same_layout(&self, other: &GridDomain) -> bool {
        self.dim == other.dim
            && self.cells_per_axis == other.cells_per_axis
            && self.box_lo == other.box_lo
            && self.box_hi == other.box_hi
    }
}

/// Real values on the cells of a [`GridDomain`]; masked-false cells are zero.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub domain: Arc<GridDomain>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: Arc<GridDomain>, mut values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() != domain.len() {
            return Err(CoreError::invalid("value length differs from cell count"));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !domain.mask[i] {
                *v = 0.0;
            } else if !v.is_finite() {
                return Err(CoreError::invalid(format!("non-finite value at cell {i}")));
            }
        }
        Ok(GridFunction { domain, values })
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        let n = domain.len();
        GridFunction {
            domain,
            values: vec![0.0; n],
        }
    }

    pub fn constant(domain: Arc<GridDomain>, c: f64) -> Result<Self, CoreError> {
        let n = domain.len();
        GridFunction::new(domain, vec![c; n])
    }

    /// Re-apply the zero-extension invariant after in-place edits.
    pub fn enforce_mask(&mut self) {
        for i in 0..self.values.len() {
            if !self.domain.mask[i] {
                self.values[i] = 0.0;
            }
        }
    }

    pub fn check_finite(&self) -> Result<(), CoreError> {
        for (i, v) in self.values.iter().enumerate() {
            if self.domain.mask[i] && !v.is_finite() {
                return Err(CoreError::invalid(format!("non-finite value at cell {i}")));
            }
        }
        Ok(())
    }

    /// `Σ |f_i|^p h^N` over the mask.
    pub fn lp_sum(&self, p: f64) -> f64 {
        let vol = self.domain.cell_volume();
        let values = &self.values;
        par::sum_indexed(values.len(), |i| values[i].abs().powf(p)) * vol
    }

    pub fn positive_part(&self) -> GridFunction {
        let values = self.values.iter().map(|v| v.max(0.0)).collect();
        GridFunction {
            domain: self.domain.clone(),
            values,
        }
    }

    pub fn abs(&self) -> GridFunction {
        let values = self.values.iter().map(|v| v.abs()).collect();
        GridFunction {
            domain: self.domain.clone(),
            values,
        }
    }
}

/// Compact obstacle `F ⊂⊂ Ω` as a member mask over the same cells.
#[derive(Debug, Clone)]
pub struct CompactSet {
    pub domain: Arc<GridDomain>,
    pub member: Vec<bool>,
}

impl CompactSet {
    pub fn new(domain: Arc<GridDomain>, member: Vec<bool>) -> Result<Self, CoreError> {
        if member.len() != domain.len() {
            return Err(CoreError::invalid("member length differs from cell count"));
        }
        for i in 0..member.len() {
            if member[i] && !domain.mask[i] {
                return Err(CoreError::Geometry(format!(
                    "obstacle cell {i} lies outside the domain mask"
                )));
            }
        }
        Ok(CompactSet { domain, member })
    }

    /// Cells with center in the ball `B_r(center)`.
    pub fn ball(domain: Arc<GridDomain>, center: &[f64], r: f64) -> Result<Self, CoreError> {
        let r2 = r * r;
        let member: Vec<bool> = (0..domain.len())
            .map(|idx| {
                domain.mask[idx] && {
                    let x = domain.cell_center(idx);
                    let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                    d2 <= r2
                }
            })
            .collect();
        let set = CompactSet { domain, member };
        if set.measure() == 0.0 {
            return Err(CoreError::Geometry("ball resolves to no cells".into()));
        }
        Ok(set)
    }

    pub fn measure(&self) -> f64 {
        self.member.iter().filter(|m| **m).count() as f64 * self.domain.cell_volume()
    }

    pub fn is_subset_of(&self, other: &CompactSet) -> bool {
        self.member
            .iter()
            .zip(&other.member)
            .all(|(a, b)| !*a || *b)
    }

    /// Minimum center-to-center distance from member cells to masked-false
    /// cells; `F ⊂⊂ Ω` needs it strictly positive beyond one cell.
    pub fn clearance(&self) -> f64 {
        let d = &self.domain;
        let mut best = f64::INFINITY;
        // cheap axis sweep: nearest false cell along each axis line
        for idx in 0..d.len() {
            if !self.member[idx] {
                continue;
            }
            let mi = d.multi_index(idx);
            for k in 0..d.dim {
                for dir in [-1isize, 1] {
                    let mut step = 1usize;
                    loop {
                        let j = mi[k] as isize + dir * step as isize;
                        if j < 0 || j as usize >= d.cells_per_axis[k] {
                            // beyond-box is masked-false by convention
                            best = best.min(step as f64 * d.spacing[k]);
                            break;
                        }
                        let mut mj = mi.clone();
                        mj[k] = j as usize;
                        if !d.mask[d.flat_index(&mj)] {
                            best = best.min(step as f64 * d.spacing[k]);
                            break;
                        }
                        step += 1;
                        if step as f64 * d.spacing[k] >= best {
                            break;
                        }
                    }
                }
            }
        }
        best
    }
}

/// `∫_Ω |∇u|^p dx` with the forward-difference gradient (backward at the
/// upper edge).
pub fn gradient_p_energy(u: &GridFunction, p: f64) -> Result<f64, CoreError> {
    if !(p > 1.0) {
        return Err(CoreError::invalid("p must exceed 1"));
    }
    u.check_finite()?;
    Ok(p_energy_raw(&u.domain, &u.values, p))
}

/// Energy without validation; shared by the inner solver loops.
pub(crate) fn p_energy_raw(domain: &GridDomain, values: &[f64], p: f64) -> f64 {
    let vol = domain.cell_volume();
    if p == 2.0 {
        return par::sum_indexed(values.len(), |idx| grad_sq_at(domain, values, idx)) * vol;
    }
    let half_p = 0.5 * p;
    par::sum_indexed(values.len(), |idx| {
        let g2 = grad_sq_at(domain, values, idx);
        if g2 == 0.0 {
            0.0
        } else {
            g2.powf(half_p)
        }
    }) * vol
}

/// Squared gradient magnitude at one cell.
#[inline]
pub(crate) fn grad_sq_at(domain: &GridDomain, values: &[f64], idx: usize) -> f64 {
    let mut g2 = 0.0;
    let mut rem = idx;
    for k in 0..domain.dim {
        let stride = domain.strides()[k];
        let i_k = rem / stride;
        rem %= stride;
        let n_k = domain.cells_per_axis[k];
        let h = domain.spacing()[k];
        let d = if i_k + 1 < n_k {
            (values[idx + stride] - values[idx]) / h
        } else if n_k > 1 {
            (values[idx] - values[idx - stride]) / h
        } else {
            0.0
        };
        g2 += d * d;
    }
    g2
}

/// Energy together with the gradient of the ε-regularized energy
/// `Σ (|∇u|² + ε²)^{p/2} vol`. The returned energy is the *unregularized*
/// one. Two passes: per-cell weighted difference fluxes, then a gather.
pub(crate) fn p_energy_and_grad(
    domain: &GridDomain,
    values: &[f64],
    p: f64,
    eps: f64,
    flux: &mut Vec<f64>,
    grad: &mut Vec<f64>,
) -> f64 {
    let n = values.len();
    let dim = domain.dim;
    let vol = domain.cell_volume();
    flux.resize(n * dim, 0.0);
    grad.resize(n, 0.0);
    let eps2 = eps * eps;

    // pass 1: raw energy and w_i * d_{i,k} fluxes, w = (|∇u|² + ε²)^{(p-2)/2}
    let strides = domain.strides().to_vec();
    let cells = domain.cells_per_axis.clone();
    let spacing = domain.spacing().to_vec();
    let quadratic = p == 2.0; // w ≡ 1, no powf in the hot loop
    let energy = par::fill_rows_sum(flux, dim, |idx, row| {
        let mut g2 = 0.0;
        let mut rem = idx;
        for k in 0..dim {
            let stride = strides[k];
            let i_k = rem / stride;
            rem %= stride;
            let h = spacing[k];
            let dk = if i_k + 1 < cells[k] {
                (values[idx + stride] - values[idx]) / h
            } else if cells[k] > 1 {
                (values[idx] - values[idx - stride]) / h
            } else {
                0.0
            };
            row[k] = dk;
            g2 += dk * dk;
        }
        if quadratic {
            return g2;
        }
        let w = (g2 + eps2).powf(0.5 * p - 1.0);
        for r in row.iter_mut() {
            *r *= w;
        }
        if g2 > 0.0 {
            g2.powf(0.5 * p)
        } else {
            0.0
        }
    }) * vol;

    // pass 2: gather dE/du_j from the at most three difference stencils per
    // axis that involve u_j
    let flux_ro: &[f64] = flux;
    par::fill_indexed(grad, |idx| {
        let mut acc = 0.0;
        let mut rem = idx;
        for k in 0..dim {
            let stride = strides[k];
            let i_k = rem / stride;
            rem %= stride;
            let h = spacing[k];
            let n_k = cells[k];
            if n_k == 1 {
                continue;
            }
            let own = flux_ro[idx * dim + k];
            let own_term = if i_k + 1 < n_k { -own } else { own };
            let mut t = own_term;
            if i_k >= 1 {
                // left neighbor always uses a forward difference along k
                t += flux_ro[(idx - stride) * dim + k];
            }
            if i_k + 2 == n_k {
                // right neighbor sits on the upper edge: its backward
                // difference involves u_j with a minus sign
                t -= flux_ro[(idx + stride) * dim + k];
            }
            acc += t / h;
        }
        acc * p * vol
    });
    energy
}

/// `∫_Ω g |u|^p dx` as a midpoint sum.
pub fn integrate_weighted(g: &GridFunction, u: &GridFunction, p: f64) -> Result<f64, CoreError> {
    if !g.domain.same_layout(&u.domain) {
        return Err(CoreError::DomainMismatch(
            "weight and function live on different grids".into(),
        ));
    }
    let vol = g.domain.cell_volume();
    let gv = &g.values;
    let uv = &u.values;
    Ok(par::sum_indexed(gv.len(), |i| gv[i] * uv[i].abs().powf(p)) * vol)
}

// --- file format -----------------------------------------------------------
//
// Grid-function files are one JSON header line followed by raw little-endian
// f64 values in row-major order; the mask travels in a parallel byte file.

#[derive(Serialize, Deserialize)]
struct GridHeader {
    dim: usize,
    cells_per_axis: Vec<usize>,
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
}

pub fn write_grid_function(f: &GridFunction, mut out: impl Write) -> Result<(), CoreError> {
    let header = GridHeader {
        dim: f.domain.dim,
        cells_per_axis: f.domain.cells_per_axis.clone(),
        box_lo: f.domain.box_lo.clone(),
        box_hi: f.domain.box_hi.clone(),
    };
    let mut line = serde_json::to_string(&header)?;
    line.push('\n');
    out.write_all(line.as_bytes())?;
    let mut buf = Vec::with_capacity(f.values.len() * 8);
    for v in &f.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn write_mask(domain: &GridDomain, mut out: impl Write) -> Result<(), CoreError> {
    let bytes: Vec<u8> = domain.mask.iter().map(|m| *m as u8).collect();
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_grid_function(
    mut input: impl BufRead,
    mask: Option<&[u8]>,
) -> Result<GridFunction, CoreError> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: GridHeader = serde_json::from_str(line.trim_end())?;
    let n: usize = header.cells_per_axis.iter().product();
    let mut raw = vec![0u8; n * 8];
    input.read_exact(&mut raw)?;
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let mask_vec = match mask {
        Some(bytes) => {
            if bytes.len() != n {
                return Err(CoreError::invalid("mask byte length mismatch"));
            }
            bytes.iter().map(|b| *b != 0).collect()
        }
        None => vec![true; n],
    };
    let domain = GridDomain::new(header.box_lo, header.box_hi, header.cells_per_axis, mask_vec)?;
    GridFunction::new(Arc::new(domain), values)
}
