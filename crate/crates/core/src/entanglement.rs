//! W states and the entanglement diagnostics applied to them.
//!
//! * Pairwise concurrence uses the Wootters spin-flip construction,
//!   `C = max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)` with `λᵢ` the descending
//!   eigenvalues of `ρ (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`. Every pair of `|W_N⟩` has
//!   `C = 2/N`.
//! * The W-fidelity witness `(N−1)/N − ⟨W_N|ρ|W_N⟩` is negative only for
//!   genuinely multipartite entangled states. It is strictly weaker than the
//!   range argument behind [`biseparability_scan`]: a mixture
//!   `p|W⟩⟨W| + (1−p)|0…0⟩⟨0…0|` is genuinely multipartite entangled for
//!   every `p > 0`, but the witness fires only for `p > (N−1)/N`.
//! * [`biseparability_scan`] checks numerically that no vector
//!   `α|W_N⟩ + β|0…0⟩` with `α ≠ 0` is a product across any bipartition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_full, ModelParams};
use crate::hilbert::{
    schmidt_values, BasisTag, DensityMatrix, StateVector,
};
use crate::spectra::eigensolve;

/// Largest ring for which every bipartition is enumerated.
pub const MAX_BIPARTITION_SITES: usize = 12;
/// Phases applied to the W component in [`biseparability_scan`].
pub const SCAN_PHASES: [f64; 3] = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4];

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|W_N⟩ = (|10…0⟩ + |01…0⟩ + … + |0…01⟩)/√N` on the full basis.
pub fn w_state(n_sites: usize) -> Result<StateVector> {
    if n_sites < 2 {
        return Err(Error::InvalidArgument(format!(
            "W state needs at least 2 sites, got {n_sites}"
        )));
    }
    crate::hilbert::check_sites(n_sites, crate::hilbert::MAX_STATE_SITES)?;
    let amp = Complex64::new(1.0 / (n_sites as f64).sqrt(), 0.0);
    let mut amps = DVector::from_element(1 << n_sites, C_ZERO);
    for s in 0..n_sites {
        amps[1 << s] = amp;
    }
    StateVector::new(BasisTag::Full(n_sites), amps)
}

fn sigma_y_y() -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(4, 4, C_ZERO);
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m
}

/// Eigenvalues of a density matrix below this are treated as exact zeros.
///
/// Concurrence responds like `√δ` to a spurious eigenvalue `δ`, so solver
/// noise (~1e-17) would otherwise show up at the 1e-9 level.
pub const CONCURRENCE_RANK_TOLERANCE: f64 = 64.0 * f64::EPSILON;

/// Two-qubit concurrence.
///
/// Computed from the singular values of `τ = Wᵀ (σʸ⊗σʸ) W`, where the
/// columns of `W` are `√pᵢ |vᵢ⟩` from the eigendecomposition of `ρ`; these
/// are the square roots of the spin-flip eigenvalues `λᵢ`.
pub fn concurrence(rho2: &DensityMatrix) -> Result<f64> {
    if rho2.tag() != BasisTag::Full(2) {
        return Err(Error::InvalidArgument(format!(
            "concurrence needs a two-qubit state, got {:?}",
            rho2.tag()
        )));
    }
    let eig = SymmetricEigen::new(rho2.entries().clone());
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < -1e-10 {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let kept: Vec<usize> = (0..4)
        .filter(|&i| eig.eigenvalues[i] > CONCURRENCE_RANK_TOLERANCE)
        .collect();
    if kept.is_empty() {
        return Ok(0.0);
    }
    let w = DMatrix::from_fn(4, kept.len(), |r, c| {
        eig.eigenvectors[(r, kept[c])] * eig.eigenvalues[kept[c]].sqrt()
    });
    let tau = w.transpose() * sigma_y_y() * &w;
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = s[1..].iter().sum();
    Ok((s[0] - rest).clamp(0.0, 1.0))
}

/// Concurrence between sites `i` and `j` of a pure state.
pub fn pair_concurrence(psi: &StateVector, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument("pair needs two distinct sites".into()));
    }
    concurrence(&psi.reduced_density(&[i, j])?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub rho: DensityMatrix,
    pub beta: f64,
    pub params: ModelParams,
}

/// `e^{−βH}/Z` via the spectral decomposition, with the ground energy
/// subtracted before exponentiating.
pub fn gibbs_state(params: &ModelParams, beta: f64) -> Result<GibbsState> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let spec = eigensolve(&build_full(params)?, true)?;
    let e0 = spec.ground_energy();
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let v = spec.eigenvectors.as_ref().expect("vectors requested");
    let dim = v.nrows();
    let mut scaled = v.clone();
    for (c, w) in weights.iter().enumerate() {
        scaled.column_mut(c).scale_mut(w / z);
    }
    let rho = &scaled * v.transpose();
    let rho = DMatrix::from_fn(dim, dim, |r, c| {
        Complex64::new(0.5 * (rho[(r, c)] + rho[(c, r)]), 0.0)
    });
    Ok(GibbsState {
        rho: DensityMatrix::from_raw(BasisTag::Full(params.n_sites()), rho),
        beta,
        params: *params,
    })
}

/// `p|W_N⟩⟨W_N| + (1−p)|0…0⟩⟨0…0|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelModel {
    pub p: f64,
    pub rho: DensityMatrix,
}

impl TwoLevelModel {
    pub fn from_weight(n_sites: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
        }
        let w = DensityMatrix::from_pure(&w_state(n_sites)?)?;
        let up = DensityMatrix::from_pure(&StateVector::all_up(n_sites)?)?;
        let rho = DensityMatrix::mixture(&[(p, &w), (1.0 - p, &up)])?;
        Ok(Self { p, rho })
    }
}

/// Low-temperature truncation of the three-site XXZ Gibbs state near
/// `B = 2Δ`, keeping only `|000⟩` and `|W⟩`.
///
/// `p = 1/(1 + exp[−2β(2Δ − B)])` is the Boltzmann ratio of `E_W` and
/// `E_000`; the field and anisotropy enter only through `2Δ − B`.
pub fn two_level_model(delta: f64, b_field: f64, beta: f64) -> Result<TwoLevelModel> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    TwoLevelModel::from_weight(3, two_level_weight(delta, b_field, beta))
}

pub fn two_level_weight(delta: f64, b_field: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * beta * (2.0 * delta - b_field)).exp())
}

/// `⟨W_N|ρ|W_N⟩`.
pub fn w_overlap(rho: &DensityMatrix, n_sites: usize) -> Result<f64> {
    rho.expectation(&w_state(n_sites)?)
}

/// `(N−1)/N − ⟨W_N|ρ|W_N⟩`; negative certifies genuine multipartite entanglement.
pub fn gme_witness_w(rho: &DensityMatrix, n_sites: usize) -> Result<f64> {
    let n = n_sites as f64;
    Ok((n - 1.0) / n - w_overlap(rho, n_sites)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiseparabilityRow {
    pub alpha: f64,
    /// Smallest second Schmidt value over bipartitions and phases.
    pub min_second_schmidt: f64,
    /// Sites of the minimizing part (always contains site 0).
    pub argmin_part: Vec<usize>,
    /// Phase of the W component at the minimum.
    pub argmin_phase: f64,
    /// Smallest `|α|²√(m_A(N−m_A))/N` over bipartitions.
    pub determinant_bound: f64,
    /// Largest `bound(m_A) − s₂(A)` seen; `≤ 0` when the bound holds.
    pub max_bound_violation: f64,
}

/// Bipartitions `A | Ā` with `0 ∈ A`, each listed once.
pub fn bipartitions(n_sites: usize) -> Vec<Vec<usize>> {
    (0u64..(1 << (n_sites - 1)) - 1)
        .map(|rest| {
            let mask = 1 | (rest << 1);
            (0..n_sites).filter(|s| (mask >> s) & 1 == 1).collect()
        })
        .collect()
}

/// Determinant bound on the second Schmidt value of `α|W_N⟩ + β|0…0⟩`
/// across a part of `part_size` sites.
pub fn determinant_bound(n_sites: usize, part_size: usize, alpha: f64) -> f64 {
    let (n, m) = (n_sites as f64, part_size as f64);
    alpha * alpha * (m * (n - m)).sqrt() / n
}

/// For each `α` in `alpha_grid ⊂ [0, 1]`, the smallest second Schmidt value
/// of `α e^{iφ}|W_N⟩ + √(1−α²)|0…0⟩` over all `2^(N−1) − 1` bipartitions and
/// the phases in [`SCAN_PHASES`].
pub fn biseparability_scan(n_sites: usize, alpha_grid: &[f64]) -> Result<Vec<BiseparabilityRow>> {
    if n_sites < 2 {
        return Err(Error::InvalidArgument("need at least 2 sites".into()));
    }
    if n_sites > MAX_BIPARTITION_SITES {
        return Err(Error::Budget(format!(
            "bipartition enumeration limited to {MAX_BIPARTITION_SITES} sites"
        )));
    }
    if let Some(a) = alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidArgument(format!("alpha {a} outside [0, 1]")));
    }
    let w = w_state(n_sites)?;
    let up = StateVector::all_up(n_sites)?;
    let parts = bipartitions(n_sites);

    alpha_grid
        .par_iter()
        .map(|&alpha| {
            let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
            let mut best: Option<(f64, usize, f64)> = None;
            let mut violation = f64::NEG_INFINITY;
            for &phi in &SCAN_PHASES {
                let c = Complex64::from_polar(alpha, phi);
                let amps = w.amplitudes() * c + up.amplitudes() * Complex64::new(beta, 0.0);
                let psi = StateVector::new(BasisTag::Full(n_sites), amps)?;
                for (idx, part) in parts.iter().enumerate() {
                    let s2 = schmidt_values(&psi, part)?.get(1).copied().unwrap_or(0.0);
                    violation = violation.max(determinant_bound(n_sites, part.len(), alpha) - s2);
                    if best.is_none_or(|(v, _, _)| s2 < v) {
                        best = Some((s2, idx, phi));
                    }
                }
            }
            let (min_second_schmidt, idx, argmin_phase) = best.expect("at least one bipartition");
            Ok(BiseparabilityRow {
                alpha,
                min_second_schmidt,
                argmin_part: parts[idx].clone(),
                argmin_phase,
                determinant_bound: (1..n_sites)
                    .map(|m| determinant_bound(n_sites, m, alpha))
                    .fold(f64::INFINITY, f64::min),
                max_bound_violation: violation,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        let v = DVector::from_vec(vec![
            C_ZERO,
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            C_ZERO,
        ]);
        DensityMatrix::from_pure(&StateVector::new(BasisTag::Full(2), v).unwrap()).unwrap()
    }

    #[test]
    fn w_state_shapes() {
        let w3 = w_state(3).unwrap();
        let expected: Vec<usize> = vec![1, 2, 4];
        for (i, a) in w3.amplitudes().iter().enumerate() {
            let want = if expected.contains(&i) { 1.0 / 3f64.sqrt() } else { 0.0 };
            assert_abs_diff_eq!(a.re, want, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(w_state(7).unwrap().norm(), 1.0, epsilon = 1e-15);
        assert!(w_state(1).is_err());
        assert_abs_diff_eq!(concurrence(&DensityMatrix::from_pure(&w_state(2).unwrap()).unwrap()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        let up = DensityMatrix::from_pure(&StateVector::all_up(2).unwrap()).unwrap();
        assert_abs_diff_eq!(concurrence(&up).unwrap(), 0.0, epsilon = 1e-12);
        let red = w_state(3).unwrap().reduced_density(&[0, 1]).unwrap();
        assert_abs_diff_eq!(concurrence(&red).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_of_werner_states() {
        // p|ψ+⟩⟨ψ+| + (1−p)I/4 has C = max(0, (3p − 1)/2).
        let bell = bell();
        let id = DensityMatrix::from_raw(
            BasisTag::Full(2),
            DMatrix::identity(4, 4).map(|x: f64| Complex64::new(x / 4.0, 0.0)),
        );
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let rho = DensityMatrix::mixture(&[(p, &bell), (1.0 - p, &id)]).unwrap();
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert_abs_diff_eq!(concurrence(&rho).unwrap(), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn concurrence_rejects_bad_input() {
        let w = DensityMatrix::from_pure(&w_state(3).unwrap()).unwrap();
        assert!(concurrence(&w).is_err());
        assert!(pair_concurrence(&w_state(3).unwrap(), 1, 1).is_err());
    }

    #[test]
    fn pair_concurrence_of_w() {
        for n in 2..=8 {
            let w = w_state(n).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    assert_abs_diff_eq!(pair_concurrence(&w, i, j).unwrap(), 2.0 / n as f64, epsilon = 1e-9);
                }
            }
            assert_abs_diff_eq!(pair_concurrence(&StateVector::all_up(n).unwrap(), 0, 1).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gibbs_limits() {
        let p = ModelParams::xxz(3, -1.0, 1.0, 1.0).unwrap();
        let cold = gibbs_state(&p, 60.0).unwrap();
        // Gap is 2 at B = 1, so β·gap = 120.
        let w = w_state(3).unwrap();
        assert!(cold.rho.expectation(&w).unwrap() >= 1.0 - 1e-6);

        let hot = gibbs_state(&p, 1e-12).unwrap();
        let id = DMatrix::<Complex64>::identity(8, 8).map(|z| z / 8.0);
        assert!((hot.rho.entries() - id).camax() <= 1e-9);

        assert!(gibbs_state(&p, 0.0).is_err());
        assert!(gibbs_state(&p, -1.0).is_err());
    }

    #[test]
    fn gibbs_at_degeneracy() {
        let p = ModelParams::xxz(3, -1.0, 1.0, 2.0).unwrap();
        let g = gibbs_state(&p, 5.0).unwrap();
        let up = StateVector::all_up(3).unwrap();
        let w = w_state(3).unwrap();
        assert_abs_diff_eq!(g.rho.expectation(&up).unwrap(), 0.5, epsilon = 1e-4);
        assert_abs_diff_eq!(g.rho.expectation(&w).unwrap(), 0.5, epsilon = 1e-4);
        assert_abs_diff_eq!(g.rho.trace().re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn two_level_weights() {
        assert_eq!(two_level_weight(1.0, 2.0, 5.0), 0.5);
        let m = two_level_model(1.0, 1.5, 10.0).unwrap();
        assert_abs_diff_eq!(m.p, 1.0 / (1.0 + (-10f64).exp()), epsilon = 1e-15);
        assert_abs_diff_eq!(m.p, 0.9999546, epsilon = 1e-7);
        assert_abs_diff_eq!(two_level_weight(1.0, 1.5, 1e4), 1.0, epsilon = 1e-15);
        assert!(two_level_model(1.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn witness_values() {
        for n in 3..=6 {
            let nf = n as f64;
            let w = DensityMatrix::from_pure(&w_state(n).unwrap()).unwrap();
            assert_abs_diff_eq!(gme_witness_w(&w, n).unwrap(), -1.0 / nf, epsilon = 1e-12);
            let up = DensityMatrix::from_pure(&StateVector::all_up(n).unwrap()).unwrap();
            assert_abs_diff_eq!(gme_witness_w(&up, n).unwrap(), (nf - 1.0) / nf, epsilon = 1e-12);
        }
        let m = two_level_model(1.0, 1.5, 10.0).unwrap();
        assert_abs_diff_eq!(w_overlap(&m.rho, 3).unwrap(), m.p, epsilon = 1e-15);
        assert!(gme_witness_w(&m.rho, 3).unwrap() < 0.0);
    }

    #[test]
    fn bipartition_enumeration() {
        let parts = bipartitions(4);
        assert_eq!(parts.len(), 7);
        assert!(parts.iter().all(|p| p[0] == 0 && p.len() < 4));
    }

    #[test]
    fn biseparability_examples() {
        let rows = biseparability_scan(4, &[0.0, 0.5, 1.0]).unwrap();
        assert!(rows[0].min_second_schmidt <= 1e-12);
        assert_abs_diff_eq!(rows[2].min_second_schmidt, 0.5, epsilon = 1e-12);
        for row in &rows {
            assert!(row.max_bound_violation <= 1e-9);
            assert!(row.min_second_schmidt + 1e-9 >= row.determinant_bound);
        }
        assert!(biseparability_scan(13, &[0.5]).is_err());
        assert!(biseparability_scan(4, &[1.5]).is_err());
    }
}
