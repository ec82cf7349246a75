//! Ground-state structure as a function of the longitudinal field.
//!
//! With `B′ = 0` every sector minimum is `e_m − (N−2m)B` for a field-free
//! constant `e_m`, so the difference between neighbouring sectors is linear
//! in `B` with slope 2. Crossings are still located by bisection on the
//! sector minima; a uniform grid would miss the higher cascade windows,
//! which shrink like `1/N²`.
//!
//! For the XX ring (`J < 0`) the first crossing, `|00…0⟩ → |W_N⟩`, sits at
//! `B = −2J` for every N. (This is the same point as the hard-core boson
//! Mott/superfluid transition; nothing here depends on that mapping.)

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::w_state;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_full, build_sector, ModelParams};
use crate::hilbert::{BasisTag, StateVector};
use crate::spectra::{eigensolve, xx_sector_min, MomentumRule};

/// Target accuracy of crossing bisection in energy.
pub const CROSSING_ENERGY_TOLERANCE: f64 = 1e-10;
/// Golden-section stopping width in field units.
pub const GAP_FIELD_TOLERANCE: f64 = 1e-6;

const GAP_COARSE_POINTS: usize = 33;

/// Which sector holds the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorLabel {
    Sector(usize),
    /// `B′ ≠ 0`: magnetization is not conserved.
    Mixed,
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectorLabel::Sector(m) => write!(f, "{m}"),
            SectorLabel::Mixed => write!(f, "mixed"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub sector: SectorLabel,
    /// The lowest eigenvalues of the full Hamiltonian, ascending.
    pub low_levels: Vec<f64>,
}

impl GroundState {
    /// `E₁ − E₀`.
    pub fn gap(&self) -> f64 {
        self.low_levels.get(1).map_or(f64::INFINITY, |e1| e1 - self.energy)
    }
}

/// Lowest eigenpair of the full Hamiltonian.
///
/// With `B′ = 0` the search runs sector by sector; the reported state is the
/// lowest eigenvector of the lowest sector (ties go to the smaller m), embedded
/// in the full basis. All eigenvalues are kept in `low_levels`.
pub fn ground_state(params: &ModelParams) -> Result<GroundState> {
    let n = params.n_sites();
    if params.conserves_magnetization() {
        let mut best: Option<(f64, usize, StateVector)> = None;
        let mut levels = Vec::with_capacity(1 << n.min(20));
        for m in 0..=n {
            let spec = eigensolve(&build_sector(params, m)?, true)?;
            let e0 = spec.ground_energy();
            levels.extend_from_slice(&spec.eigenvalues);
            if best.as_ref().is_none_or(|(e, _, _)| e0 < *e) {
                let v = spec.eigenvector(0).expect("vectors requested");
                let amps = v.map(|x| Complex64::new(x, 0.0));
                let sector_state = StateVector::new(BasisTag::Sector(n, m), amps)?;
                best = Some((e0, m, sector_state));
            }
        }
        levels.sort_by(f64::total_cmp);
        let (energy, m, state) = best.expect("at least one sector");
        Ok(GroundState {
            energy,
            state: state.to_full()?,
            sector: SectorLabel::Sector(m),
            low_levels: levels,
        })
    } else {
        let spec = eigensolve(&build_full(params)?, true)?;
        let v = spec.eigenvector(0).expect("vectors requested");
        let state = StateVector::new(BasisTag::Full(n), v.map(|x| Complex64::new(x, 0.0)))?;
        Ok(GroundState {
            energy: spec.ground_energy(),
            state,
            sector: SectorLabel::Mixed,
            low_levels: spec.eigenvalues,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub b_field: f64,
    pub ground_energy: f64,
    pub sector: SectorLabel,
    /// `|⟨W_N|ψ₀⟩|²`.
    pub w_fidelity: f64,
    /// `E₁ − E₀`.
    pub gap: f64,
    /// Lowest few levels, if requested.
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    pub params: ModelParams,
    pub rows: Vec<ScanRow>,
}

/// Uniform field grid of `steps ≥ 2` points from `b_from` to `b_to` inclusive.
pub fn field_grid(b_from: f64, b_to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps must be >= 2, got {steps}")));
    }
    if b_from == b_to || !b_from.is_finite() || !b_to.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "field range [{b_from}, {b_to}] must be finite and non-empty"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                b_to
            } else {
                b_from + (b_to - b_from) * i as f64 / last
            }
        })
        .collect())
}

pub fn scan_ground(params: &ModelParams, b_from: f64, b_to: f64, steps: usize) -> Result<PhaseScan> {
    scan_ground_with_levels(params, b_from, b_to, steps, 0)
}

/// Ground-state table over a uniform field grid, optionally with the lowest
/// `n_levels` eigenvalues per row. Rows are computed in parallel on the
/// current rayon pool and returned in grid order.
pub fn scan_ground_with_levels(
    params: &ModelParams,
    b_from: f64,
    b_to: f64,
    steps: usize,
    n_levels: usize,
) -> Result<PhaseScan> {
    let grid = field_grid(b_from, b_to, steps)?;
    let w = w_state(params.n_sites())?;
    let rows = grid
        .par_iter()
        .map(|&b| {
            let p = params.with_b_field(b)?;
            let gs = ground_state(&p)?;
            Ok(ScanRow {
                b_field: b,
                ground_energy: gs.energy,
                sector: gs.sector,
                w_fidelity: w.fidelity(&gs.state)?.clamp(0.0, 1.0),
                gap: gs.gap(),
                levels: gs.low_levels.iter().take(n_levels).copied().collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseScan {
        params: *params,
        rows,
    })
}

/// How sector minima are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimumSource {
    /// Parity-resolved free-fermion minimum (XX model only).
    FreeFermion,
    /// Lowest eigenvalue of the dense sector Hamiltonian.
    SectorEd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingMethod {
    Bisection,
    FormulaPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport {
    pub m_low: usize,
    pub m_high: usize,
    pub b_cross: f64,
    pub method: CrossingMethod,
    pub source: Option<MinimumSource>,
    /// `|E_min^(m_low) − E_min^(m_high)|` at `b_cross`.
    pub residual: f64,
}

/// Lowest energy in sector `m`.
pub fn sector_minimum(params: &ModelParams, m: usize, source: MinimumSource) -> Result<f64> {
    match source {
        MinimumSource::FreeFermion => xx_sector_min(params, m, MomentumRule::ParityResolved),
        MinimumSource::SectorEd => Ok(eigensolve(&build_sector(params, m)?, false)?.ground_energy()),
    }
}

/// A bracket guaranteed to contain every sector crossing of `params`:
/// `±(N(2|J| + |J+Δ|) + 1)`, one more than the field-free norm bound.
pub fn default_bracket(params: &ModelParams) -> (f64, f64) {
    let n = params.n_sites() as f64;
    let l = n * (2.0 * params.j_xy().abs() + params.j_z().abs()) + 1.0;
    (-l, l)
}

/// Field at which the `m` and `m+1` sector minima cross, by bisection.
///
/// Uses free-fermion minima for the XX model and sector ED otherwise.
pub fn find_crossing(params: &ModelParams, m: usize, bracket: (f64, f64)) -> Result<CrossingReport> {
    let source = if params.is_xx() {
        MinimumSource::FreeFermion
    } else {
        MinimumSource::SectorEd
    };
    find_crossing_with(params, m, bracket, source)
}

pub fn find_crossing_with(
    params: &ModelParams,
    m: usize,
    bracket: (f64, f64),
    source: MinimumSource,
) -> Result<CrossingReport> {
    if !params.conserves_magnetization() {
        return Err(Error::SectorBreaking(params.b_perp()));
    }
    if m >= params.n_sites() {
        return Err(Error::SectorOutOfRange {
            n_sites: params.n_sites(),
            m: m + 1,
        });
    }
    let minima = |b: f64| -> Result<(f64, f64)> {
        let p = params.with_b_field(b)?;
        Ok((sector_minimum(&p, m, source)?, sector_minimum(&p, m + 1, source)?))
    };
    let diff = |b: f64| -> Result<f64> {
        let (lo, hi) = minima(b)?;
        Ok(hi - lo)
    };

    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let mut f_lo = diff(lo)?;
    let f_hi = diff(hi)?;
    if f_lo == 0.0 {
        hi = lo;
    } else if f_hi == 0.0 {
        lo = hi;
    } else if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = diff(mid)?;
        if f_mid.abs() <= CROSSING_ENERGY_TOLERANCE || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let (e_lo, e_hi) = minima(mid)?;
    Ok(CrossingReport {
        m_low: m,
        m_high: m + 1,
        b_cross: mid,
        method: CrossingMethod::Bisection,
        source: Some(source),
        residual: (e_hi - e_lo).abs(),
    })
}

/// Published cascade estimate `B_c^(m) = −2J [1 − 2m²π²/N²]`.
pub fn critical_field_cascade_printed(j_xy: f64, n_sites: usize, m: usize) -> f64 {
    let (m, n) = (m as f64, n_sites as f64);
    -2.0 * j_xy * (1.0 - 2.0 * m * m * PI * PI / (n * n))
}

pub fn cascade_printed_report(j_xy: f64, n_sites: usize, m: usize) -> CrossingReport {
    CrossingReport {
        m_low: m,
        m_high: m + 1,
        b_cross: critical_field_cascade_printed(j_xy, n_sites, m),
        method: CrossingMethod::FormulaPrinted,
        source: None,
        residual: f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMinimum {
    pub b_at_min: f64,
    pub gap: f64,
}

fn full_gap(params: &ModelParams, b: f64) -> Result<f64> {
    let spec = eigensolve(&build_full(&params.with_b_field(b)?)?, false)?;
    Ok(spec.eigenvalues[1] - spec.eigenvalues[0])
}

/// Minimum of `E₁ − E₀` of the full Hamiltonian over `window`.
///
/// A coarse grid locates the minimum, which must be interior; golden-section
/// search then refines it to [`GAP_FIELD_TOLERANCE`].
pub fn min_gap(params: &ModelParams, window: (f64, f64)) -> Result<GapMinimum> {
    if params.b_perp() <= 0.0 {
        return Err(Error::InvalidArgument(
            "gap minimization needs b_perp > 0".into(),
        ));
    }
    let grid = field_grid(window.0.min(window.1), window.0.max(window.1), GAP_COARSE_POINTS)?;
    let gaps = grid
        .par_iter()
        .map(|&b| full_gap(params, b))
        .collect::<Result<Vec<_>>>()?;
    let (i_min, _) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("non-empty grid");
    if i_min == 0 || i_min + 1 == grid.len() {
        return Err(Error::GapNotBracketed {
            lo: grid[0],
            hi: grid[grid.len() - 1],
        });
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[i_min - 1], grid[i_min + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = full_gap(params, c)?;
    let mut fd = full_gap(params, d)?;
    while b - a > GAP_FIELD_TOLERANCE {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = full_gap(params, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = full_gap(params, d)?;
        }
    }
    let (b_at_min, gap) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(GapMinimum { b_at_min, gap })
}

/// First-order avoided-crossing gap `2B′√N`.
pub fn gap_first_order(n_sites: usize, b_perp: f64) -> f64 {
    2.0 * b_perp.abs() * (n_sites as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorLowerBound {
    /// `4Jm − (N−2m)B`.
    pub bound: f64,
    /// The same value written as `E^(1)_N + 2(m−1)(2J + B)`.
    pub rewritten: f64,
}

/// Lower bound on every m-excitation energy of the ferromagnetic XX ring.
pub fn sector_min_lower_bound(params: &ModelParams, m: usize) -> Result<SectorLowerBound> {
    if params.j_xy() >= 0.0 {
        return Err(Error::InvalidArgument(
            "lower bound holds for J < 0 only".into(),
        ));
    }
    let n = params.n_sites();
    if m > n {
        return Err(Error::SectorOutOfRange { n_sites: n, m });
    }
    let (j, b) = (params.j_xy(), params.b_field());
    let (mf, nf) = (m as f64, n as f64);
    let e1 = 4.0 * j - (nf - 2.0) * b;
    Ok(SectorLowerBound {
        bound: 4.0 * j * mf - (nf - 2.0 * mf) * b,
        rewritten: e1 + 2.0 * (mf - 1.0) * (2.0 * j + b),
    })
}
