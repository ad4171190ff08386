//! The Lipschitz partition of unity, the constant `C_{d,L}` built from it,
//! and the certified spectral-distance bounds.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{cube_offsets, Lattice};
use crate::operators::Hamiltonian;
use crate::symbolic::Distance;

/// Half-width of the plateau of the trapezoid.
pub const PLATEAU: f64 = 0.5;
/// Half-width of the support of the trapezoid.
pub const SUPPORT: f64 = 2.0 / 3.0;

/// Sampling nodes sit at multiples of `1 / (6 m)`, so the kinks at `1/2`
/// and `2/3` are nodes; the step is just under `1e-4`.
const GRID_M: usize = 1667;
/// Cap on the total number of sampled nodes.
const MAX_NODES: f64 = 2e8;
const DIFF_STEP: f64 = 1e-9;
/// Safety inflation applied to sampled Lipschitz constants.
pub const SAMPLE_INFLATION: f64 = 1.01;

/// The 1D trapezoid `φ`: `1` on `|t| <= 1/2`, linear down to `0` at `|t| = 2/3`.
pub fn trapezoid(t: f64) -> f64 {
    let a = t.abs();
    if a <= PLATEAU {
        1.0
    } else if a < SUPPORT {
        (SUPPORT - a) * 6.0
    } else {
        0.0
    }
}

/// `φ(t) / Σ_k φ(t - k)`.
pub fn normalized_trapezoid(t: f64) -> f64 {
    let base = libm::floor(t);
    let mut sum = 0.0;
    for k in -1..=2 {
        sum += trapezoid(t - (base + k as f64));
    }
    trapezoid(t) / sum
}

/// The partition function `qp(x) = ψ(M⁻¹x) / Σ_{z ∈ L} ψ(M⁻¹(x - z))` with
/// `ψ = ⊗ φ`; the normalization factorizes over the axes of `M⁻¹x`.
pub fn bump(lat: &Lattice, x: &[f64]) -> f64 {
    let d = lat.dim();
    let inv = lat.inverse();
    (0..d)
        .map(|i| normalized_trapezoid((0..d).map(|j| inv[i * d + j] * x[j]).sum()))
        .product()
}

/// Constants of the canonical partition for a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConstants {
    /// Lipschitz constant used in certificates: exact where known, otherwise
    /// the grid sample times [`SAMPLE_INFLATION`].
    pub c_l: f64,
    /// The raw grid sample, when one was taken.
    pub c_l_sampled: Option<f64>,
    pub analytic: bool,
    /// Overlap count `𝒩`.
    pub n_overlap: u64,
    /// Nodes per axis of the sampling grid (0 when not sampled).
    pub grid_nodes: usize,
    pub condition: f64,
}

impl PartitionConstants {
    pub fn description(&self) -> String {
        format!(
            "tensor trapezoid, plateau half-width {PLATEAU}, support half-width 2/3; C_L {}",
            if self.analytic {
                String::from("analytic")
            } else {
                format!("grid-sampled ({} nodes/axis, +1%)", self.grid_nodes)
            }
        )
    }
}

/// `𝒩`, `C_L` for the tensor trapezoid partition on `lat`.
///
/// `C_L` is the Lipschitz constant of `qp` with respect to the Euclidean
/// norm. For `d = 1`, `M = I` it is exactly `6`; otherwise the gradient is
/// sampled with one-sided difference quotients on a grid over the support.
pub fn partition_constants(lat: &Lattice) -> PartitionConstants {
    let n_overlap = overlap_count(lat.dim());
    if lat.dim() == 1 && lat.is_identity() {
        return PartitionConstants {
            c_l: 6.0,
            c_l_sampled: None,
            analytic: true,
            n_overlap,
            grid_nodes: 0,
            condition: 1.0,
        };
    }
    let (raw, nodes) = sampled_lipschitz(lat);
    PartitionConstants {
        c_l: raw * SAMPLE_INFLATION,
        c_l_sampled: Some(raw),
        analytic: false,
        n_overlap,
        grid_nodes: nodes,
        condition: lat.condition_max(),
    }
}

/// Number of lattice translates whose closed supports `z + M[-2/3, 2/3]^d`
/// meet the support at the origin. In integer coordinates this is
/// `|n_j| <= 4/3` on every axis, checked exactly as `3|n_j| <= 4`.
pub fn overlap_count(dim: usize) -> u64 {
    cube_offsets(dim, 2).iter().filter(|n| n.iter().all(|&c| 3 * c.abs() <= 4)).count() as u64
}

/// Largest Euclidean gradient norm of `qp` over the sampling grid, and the
/// number of nodes per axis used.
pub fn sampled_lipschitz(lat: &Lattice) -> (f64, usize) {
    let d = lat.dim();
    let mut m = GRID_M;
    while libm::pow((8 * m + 1) as f64, d as f64) > MAX_NODES && m > 1 {
        m = (m * 9) / 10;
    }
    let nodes = 8 * m + 1;
    let scale = (6 * m) as f64;
    let mut q = Vec::with_capacity(nodes);
    let mut dq = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let t = (k as f64 - (4 * m) as f64) / scale;
        let v = normalized_trapezoid(t);
        q.push(v);
        let right = (normalized_trapezoid(t + DIFF_STEP) - v) / DIFF_STEP;
        let left = (v - normalized_trapezoid(t - DIFF_STEP)) / DIFF_STEP;
        dq.push([left, right]);
    }
    // Gradient in x is M^{-T} times the gradient in y = M⁻¹x.
    let inv = lat.inverse();
    let identity = lat.is_identity();
    let mut idx = vec![0usize; d];
    let mut g = vec![0.0; d];
    let mut best: f64 = 0.0;
    loop {
        for sides in 0..(1u32 << d) {
            for j in 0..d {
                let others: f64 = idx.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &i)| q[i]).product();
                g[j] = dq[idx[j]][((sides >> j) & 1) as usize] * others;
            }
            let norm2 = if identity {
                g.iter().map(|x| x * x).sum::<f64>()
            } else {
                (0..d)
                    .map(|i| {
                        let v: f64 = (0..d).map(|j| inv[j * d + i] * g[j]).sum();
                        v * v
                    })
                    .sum()
            };
            best = best.max(norm2);
        }
        let mut j = d;
        loop {
            if j == 0 {
                return (libm::sqrt(best), nodes);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < nodes {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// `C_{d,L} = 16 𝒩 max{‖M⁻¹‖_max ‖M‖_max, C_L, 1}`.
pub fn cdl_constant(pc: &PartitionConstants, lat: &Lattice) -> f64 {
    16.0 * pc.n_overlap as f64 * lat.condition_max().max(pc.c_l).max(1.0)
}

/// A subshift distance fed into a certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceInput {
    pub value: f64,
    /// The value only bounds the distance from above (radius-limited scan).
    pub lower_bound: bool,
}

impl From<f64> for DistanceInput {
    fn from(value: f64) -> Self {
        DistanceInput {
            value,
            lower_bound: false,
        }
    }
}

impl From<Distance> for DistanceInput {
    fn from(d: Distance) -> Self {
        DistanceInput {
            value: d.to_f64(),
            lower_bound: d.lower_bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    FiniteRange,
    InfiniteRange,
    NormFallback,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::FiniteRange => "finite-range",
            Theorem::InfiniteRange => "infinite-range",
            Theorem::NormFallback => "norm-fallback",
        }
    }
}

/// Every constant entering a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateConstants {
    pub c_l: f64,
    pub n_overlap: u64,
    pub c_dl: f64,
    pub c_hop: f64,
    pub schur_beta: f64,
    pub r_h: u32,
    pub beta: f64,
    pub c_h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub constants: CertificateConstants,
    pub d_subshift: DistanceInput,
    /// The theorem's bound.
    pub bound: f64,
    /// `2‖H‖_β`, valid unconditionally.
    pub fallback: f64,
    /// `min(bound, fallback)`.
    pub effective: f64,
    pub partition: String,
    /// Identifiers of the model and subshifts, filled in by the caller.
    pub inputs: String,
}

impl BoundCertificate {
    pub fn with_inputs(mut self, inputs: impl Into<String>) -> Self {
        self.inputs = inputs.into();
        self
    }

    /// Whether a measured spectral distance respects the certificate.
    pub fn admits(&self, d_spectral: f64) -> bool {
        d_spectral <= self.effective
    }
}

fn check_distance(d: DistanceInput) -> Result<()> {
    if !(0.0..=1.0).contains(&d.value) {
        return Err(Error::domain("subshift distance must lie in [0, 1]"));
    }
    Ok(())
}

fn certificate(
    theorem: Theorem,
    h: &Hamiltonian,
    pc: &PartitionConstants,
    d: DistanceInput,
    c_h: Option<f64>,
    bound: f64,
) -> Result<BoundCertificate> {
    let schur = h.schur_norm()?;
    let fallback = 2.0 * schur;
    Ok(BoundCertificate {
        theorem,
        constants: CertificateConstants {
            c_l: pc.c_l,
            n_overlap: pc.n_overlap,
            c_dl: cdl_constant(pc, h.lattice()),
            c_hop: h.c_hop(),
            schur_beta: schur,
            r_h: h.range_radius(),
            beta: h.beta(),
            c_h,
        },
        d_subshift: d,
        bound,
        fallback,
        effective: bound.min(fallback),
        partition: pc.description(),
        inputs: String::new(),
    })
}

/// `C_{d,L} · C_hop · ‖H‖_β · R_H^β · d^β`.
pub fn finite_range_bound(h: &Hamiltonian, d_sub: impl Into<DistanceInput>, pc: &PartitionConstants) -> Result<BoundCertificate> {
    let d = d_sub.into();
    check_distance(d)?;
    let beta = h.beta();
    let bound = cdl_constant(pc, h.lattice())
        * h.c_hop()
        * h.schur_norm()?
        * libm::pow(h.range_radius() as f64, beta)
        * libm::pow(d.value, beta);
    certificate(Theorem::FiniteRange, h, pc, d, None, bound)
}

/// `2 C_{d,L} ‖H‖_β (C_H^β + C_hop) d^β`, after checking the declared
/// linear growth `R_{H|s} <= C_H s` at every integer truncation radius
/// (the truncated radius only changes at integers).
pub fn infinite_range_bound(h: &Hamiltonian, c_h: f64, d_sub: impl Into<DistanceInput>, pc: &PartitionConstants) -> Result<BoundCertificate> {
    let d = d_sub.into();
    check_distance(d)?;
    if !(c_h >= 1.0) || !c_h.is_finite() {
        return Err(Error::domain("growth constant C_H must be finite and >= 1"));
    }
    check_growth(h, c_h)?;
    let beta = h.beta();
    let bound = 2.0
        * cdl_constant(pc, h.lattice())
        * h.schur_norm()?
        * (libm::pow(c_h, beta) + h.c_hop())
        * libm::pow(d.value, beta);
    certificate(Theorem::InfiniteRange, h, pc, d, Some(c_h), bound)
}

fn check_growth(h: &Hamiltonian, c_h: f64) -> Result<()> {
    let mut by_shell: Vec<(u32, u32)> = h
        .terms()
        .iter()
        .map(|t| (crate::lattice::max_norm(&t.h) as u32, t.coef.radius()))
        .collect();
    by_shell.sort_unstable();
    let mut radius = 1u32;
    let mut i = 0;
    for s in 1..=h.hop_shell().max(1) {
        while i < by_shell.len() && by_shell[i].0 <= s {
            radius = radius.max(by_shell[i].1);
            i += 1;
        }
        if radius as f64 > c_h * s as f64 {
            return Err(Error::GrowthViolated { s, radius });
        }
    }
    Ok(())
}

/// `16 𝒩 max{C_L, 1} / (2^β (r - R̃_H)^β) · C_hop ‖H‖_β` with
/// `R̃_H = R_H + ‖M⁻¹‖_max ‖M‖_max + 1`.
pub fn resolvent_gap_threshold(h: &Hamiltonian, r: f64, pc: &PartitionConstants) -> Result<f64> {
    let r_tilde = h.range_radius() as f64 + h.lattice().condition_max() + 1.0;
    if !(r > r_tilde) {
        return Err(Error::Precondition(format!("radius {r} must exceed R̃_H = {r_tilde}")));
    }
    let beta = h.beta();
    Ok(16.0 * pc.n_overlap as f64 * pc.c_l.max(1.0) / (libm::pow(2.0, beta) * libm::pow(r - r_tilde, beta))
        * h.c_hop()
        * h.schur_norm()?)
}

/// `2‖H‖_β`.
pub fn norm_fallback_bound(h: &Hamiltonian) -> Result<f64> {
    Ok(2.0 * h.schur_norm()?)
}

/// A certificate resting on the fallback alone.
pub fn fallback_certificate(h: &Hamiltonian, d_sub: impl Into<DistanceInput>, pc: &PartitionConstants) -> Result<BoundCertificate> {
    let d = d_sub.into();
    check_distance(d)?;
    let f = norm_fallback_bound(h)?;
    certificate(Theorem::NormFallback, h, pc, d, None, f)
}
