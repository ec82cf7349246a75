//! Field ramps through the avoided crossing.
//!
//! `H(t) = H₀ + B(t)·Z`, where `Z` is the field term per unit `B`. Each step
//! of width `dt` uses `H` frozen at the step midpoint and applies its
//! exponential through the spectral decomposition, so every step is unitary
//! to rounding and the norm drift only measures accumulated roundoff.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::entanglement::w_state;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_full, ModelParams};
use crate::hilbert::{check_sites, BasisTag, StateVector};

/// Largest ring accepted by [`evolve`].
pub const MAX_EVOLVE_SITES: usize = 10;
/// Allowed drift of `‖ψ‖` from 1 over a run.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-8;
/// Allowed deviation of a step propagator from unitarity.
pub const STEP_UNITARITY_TOLERANCE: f64 = 1e-10;
/// Upper limit on the number of steps in one run.
pub const MAX_STEPS: usize = 10_000_000;

/// Piecewise-linear field profile `B(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RampSchedule {
    knots: Vec<(f64, f64)>,
}

impl RampSchedule {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "ramp needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|(t, b)| !t.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidArgument("ramp knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument(
                "ramp knot times must be strictly increasing".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn start_time(&self) -> f64 {
        self.knots[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// `B(t)`, held constant outside the knot range.
    pub fn field_at(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        if t >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|&(tk, _)| tk <= t);
        let (t0, b0) = k[i - 1];
        let (t1, b1) = k[i];
        b0 + (b1 - b0) * (t - t0) / (t1 - t0)
    }

    /// The same profile run backwards over the same time interval.
    pub fn reversed(&self) -> Self {
        let (t0, t1) = (self.start_time(), self.end_time());
        let knots = self.knots.iter().rev().map(|&(t, b)| (t0 + t1 - t, b)).collect();
        Self { knots }
    }
}

/// Two-knot schedule from `b_start` at `t = 0` to `b_end` at `t = T`.
pub fn linear_ramp(b_start: f64, b_end: f64, duration: f64) -> Result<RampSchedule> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ramp duration must be positive, got {duration}"
        )));
    }
    RampSchedule::new(vec![(0.0, b_start), (duration, b_end)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Requested step; the actual step divides the duration evenly.
    pub dt: f64,
    /// Record a sample every this many steps (the final step is always recorded).
    pub record_every: usize,
    pub keep_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt: 0.05, record_every: 100, keep_states: false }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<f64>,
    /// `|⟨W_N|ψ(t)⟩|²` at each sample.
    pub w_fidelity: Vec<f64>,
    pub states: Option<Vec<StateVector>>,
    pub final_state: StateVector,
    /// Largest `|‖ψ‖ − 1|` seen at any step.
    pub max_norm_drift: f64,
    pub steps: usize,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_w_fidelity(&self) -> f64 {
        *self.w_fidelity.last().expect("trajectory has at least one sample")
    }
}

pub fn evolve(
    params: &ModelParams,
    schedule: &RampSchedule,
    dt: f64,
    psi0: &StateVector,
    record_every: usize,
) -> Result<Trajectory> {
    let options = EvolveOptions { dt, record_every, keep_states: false };
    evolve_with(params, schedule, psi0, &options)
}

/// Integrate `i dψ/dt = H(B(t)) ψ`; the field in `params` is ignored.
pub fn evolve_with(
    params: &ModelParams,
    schedule: &RampSchedule,
    psi0: &StateVector,
    options: &EvolveOptions,
) -> Result<Trajectory> {
    let n = params.n_sites();
    check_sites(n, MAX_EVOLVE_SITES)?;
    if psi0.tag() != BasisTag::Full(n) {
        return Err(Error::InvalidArgument(format!(
            "initial state must live on Full({n}), got {:?}",
            psi0.tag()
        )));
    }
    if !psi0.is_normalized() {
        return Err(Error::NotNormalized { trace: psi0.norm() * psi0.norm() });
    }
    if !(options.dt > 0.0) || !options.dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {}", options.dt)));
    }
    if options.record_every == 0 {
        return Err(Error::InvalidArgument("record_every must be at least 1".into()));
    }
    let duration = schedule.duration();
    let steps_f = (duration / options.dt).ceil().max(1.0);
    if steps_f > MAX_STEPS as f64 {
        return Err(Error::Budget(format!(
            "{steps_f} steps exceeds the limit of {MAX_STEPS}"
        )));
    }
    let steps = steps_f as usize;
    let dt = duration / steps as f64;

    let h0 = build_full(&params.clone().with_b_field(0.0)?)?.into_entries();
    let unit = build_full(&params.clone().with_b_field(1.0)?)?.into_entries();
    let field_diag: Vec<f64> = (0..h0.nrows()).map(|i| unit[(i, i)] - h0[(i, i)]).collect();

    let w = w_state(n)?;
    let t0 = schedule.start_time();
    let mut psi = psi0.amplitudes().clone();
    let mut times = vec![t0];
    let mut fields = vec![schedule.field_at(t0)];
    let mut w_fidelity = vec![fidelity_with(&w, &psi)];
    let mut states = options.keep_states.then(|| vec![psi0.clone()]);
    let mut max_norm_drift = (psi.norm() - 1.0).abs();

    let mut h = h0.clone();
    for step in 0..steps {
        let t_mid = t0 + (step as f64 + 0.5) * dt;
        let b = schedule.field_at(t_mid);
        for (i, z) in field_diag.iter().enumerate() {
            h[(i, i)] = h0[(i, i)] + b * z;
        }
        psi = propagate(&h, dt, &psi)?;

        let drift = (psi.norm() - 1.0).abs();
        max_norm_drift = max_norm_drift.max(drift);
        if drift > NORM_DRIFT_TOLERANCE {
            return Err(Error::Contract(format!(
                "norm drift {drift:.3e} at step {step} exceeds {NORM_DRIFT_TOLERANCE:e}"
            )));
        }
        let done = step + 1;
        if done % options.record_every == 0 || done == steps {
            let t = t0 + done as f64 * dt;
            times.push(t);
            fields.push(schedule.field_at(t));
            w_fidelity.push(fidelity_with(&w, &psi));
            if let Some(states) = states.as_mut() {
                states.push(StateVector::new(BasisTag::Full(n), psi.clone())?);
            }
        }
    }

    Ok(Trajectory {
        times,
        fields,
        w_fidelity,
        states,
        final_state: StateVector::new(BasisTag::Full(n), psi)?,
        max_norm_drift,
        steps,
        dt,
    })
}

/// `exp(−iH dt) ψ` for real symmetric `H`.
fn propagate(h: &DMatrix<f64>, dt: f64, psi: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut gram = v.transpose() * v;
    for i in 0..gram.nrows() {
        gram[(i, i)] -= 1.0;
    }
    let deviation = gram.amax();
    if deviation > STEP_UNITARITY_TOLERANCE {
        return Err(Error::Contract(format!(
            "step propagator deviates from unitarity by {deviation:.3e}"
        )));
    }
    let re = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.re));
    let im = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.im));
    let (cre, cim) = (v.tr_mul(&re), v.tr_mul(&im));
    let mut rotated_re = DVector::zeros(psi.len());
    let mut rotated_im = DVector::zeros(psi.len());
    for k in 0..psi.len() {
        let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * dt);
        let c = phase * Complex64::new(cre[k], cim[k]);
        rotated_re[k] = c.re;
        rotated_im[k] = c.im;
    }
    let (out_re, out_im) = (v * rotated_re, v * rotated_im);
    Ok(DVector::from_iterator(
        psi.len(),
        out_re.iter().zip(out_im.iter()).map(|(&r, &i)| Complex64::new(r, i)),
    ))
}

fn fidelity_with(w: &StateVector, psi: &DVector<Complex64>) -> f64 {
    w.amplitudes().dotc(psi).norm_sqr().min(1.0)
}

/// Diabatic probability for a linear sweep at `ramp_rate = |dB/dt|`.
///
/// Two-level estimate with minimum gap `2B′√N` and relative level slope 2:
/// `P = exp(−π N B′² / ramp_rate)`.
pub fn landau_zener_estimate(n_sites: usize, b_perp: f64, ramp_rate: f64) -> Result<f64> {
    if !(ramp_rate > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ramp rate must be positive, got {ramp_rate}"
        )));
    }
    if ramp_rate.is_infinite() {
        return Ok(1.0);
    }
    Ok((-std::f64::consts::PI * n_sites as f64 * b_perp * b_perp / ramp_rate).exp())
}

/// Shortest duration of a linear sweep over `field_span` whose
/// [`landau_zener_estimate`] is at most `p_target`.
pub fn ramp_time_for(n_sites: usize, b_perp: f64, field_span: f64, p_target: f64) -> Result<f64> {
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target probability must lie in (0, 1), got {p_target}"
        )));
    }
    if b_perp == 0.0 {
        return Err(Error::InvalidArgument(
            "no finite sweep is adiabatic through a true crossing (B′ = 0)".into(),
        ));
    }
    let rate = std::f64::consts::PI * n_sites as f64 * b_perp * b_perp / (1.0 / p_target).ln();
    Ok(field_span.abs() / rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    use crate::hilbert::SpinConfiguration;

    #[test]
    fn linear_ramp_examples() {
        let r = linear_ramp(3.0, 1.0, 400.0).unwrap();
        assert_eq!(r.knots(), &[(0.0, 3.0), (400.0, 1.0)]);
        assert_eq!(r.field_at(200.0), 2.0);
        assert_abs_diff_eq!(r.field_at(100.0) - r.field_at(0.0), 100.0 * (1.0 - 3.0) / 400.0, epsilon = 1e-15);
        assert!(linear_ramp(3.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(RampSchedule::new(vec![(0.0, 1.0)]).is_err());
        assert!(RampSchedule::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(RampSchedule::new(vec![(0.0, 1.0), (1.0, f64::NAN)]).is_err());
        let r = RampSchedule::new(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)]).unwrap();
        assert_eq!(r.field_at(2.0), 1.0);
        assert_eq!(r.field_at(-1.0), 0.0);
        let rev = r.reversed();
        assert_eq!(rev.knots(), &[(0.0, 0.0), (2.0, 2.0), (3.0, 0.0)]);
    }

    #[test]
    fn landau_zener_examples() {
        let p = landau_zener_estimate(6, 0.05, 0.005).unwrap();
        assert_abs_diff_eq!(p, (-3.0 * std::f64::consts::PI).exp(), epsilon = 1e-15);
        assert!((p - 8.1e-5).abs() < 1e-6);
        assert_eq!(landau_zener_estimate(6, 0.05, f64::INFINITY).unwrap(), 1.0);
        assert!(landau_zener_estimate(6, 0.05, 1e12).unwrap() > 0.999_999);
        assert_eq!(landau_zener_estimate(6, 0.0, 0.005).unwrap(), 1.0);
        assert!(landau_zener_estimate(6, 0.05, 0.0).is_err());

        let t = ramp_time_for(6, 0.05, 2.0, 1e-3).unwrap();
        assert_abs_diff_eq!(landau_zener_estimate(6, 0.05, 2.0 / t).unwrap(), 1e-3, epsilon = 1e-15);
        assert!(t < 400.0);
    }

    #[test]
    fn all_up_is_stationary_without_transverse_field() {
        let params = ModelParams::xx(5, -1.0, 0.0).unwrap();
        let ramp = linear_ramp(3.0, -2.0, 20.0).unwrap();
        let psi0 = StateVector::all_up(5).unwrap();
        let traj = evolve(&params, &ramp, 0.1, &psi0, 10).unwrap();
        assert_abs_diff_eq!(traj.final_state.fidelity(&psi0).unwrap(), 1.0, epsilon = 1e-8);
        assert!(traj.max_norm_drift <= NORM_DRIFT_TOLERANCE);
    }

    #[test]
    fn sector_populations_are_conserved() {
        let params = ModelParams::xxz(4, -1.0, 0.3, 0.0).unwrap();
        let mut amps = DVector::from_element(16, Complex64::new(0.0, 0.0));
        amps[0b0000] = Complex64::new(0.5, 0.0);
        amps[0b0010] = Complex64::new(0.0, 0.5);
        amps[0b0110] = Complex64::new(0.5, 0.0);
        amps[0b1011] = Complex64::new(-0.5, 0.0);
        let psi0 = StateVector::new(BasisTag::Full(4), amps).unwrap();
        let ramp = linear_ramp(2.0, 0.5, 15.0).unwrap();
        let traj = evolve(&params, &ramp, 0.05, &psi0, 1000).unwrap();
        let before = psi0.sector_populations();
        let after = traj.final_state.sector_populations();
        for (a, b) in before.iter().zip(&after) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn recording_and_states() {
        let params = ModelParams::xx(3, -1.0, 0.0).unwrap().with_b_perp(0.1).unwrap();
        let ramp = linear_ramp(3.0, 1.0, 10.0).unwrap();
        let psi0 = StateVector::all_up(3).unwrap();
        let options = EvolveOptions { dt: 0.1, record_every: 25, keep_states: true };
        let traj = evolve_with(&params, &ramp, &psi0, &options).unwrap();
        assert_eq!(traj.steps, 100);
        assert_eq!(traj.times.len(), 5);
        assert_eq!(traj.states.as_ref().unwrap().len(), 5);
        assert_eq!(*traj.fields.last().unwrap(), 1.0);
        assert!(traj.w_fidelity.iter().all(|f| (0.0..=1.0).contains(f)));
        let w = w_state(3).unwrap();
        assert_abs_diff_eq!(
            traj.final_state.fidelity(&w).unwrap(),
            traj.final_w_fidelity(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let params = ModelParams::xx(4, -1.0, 0.0).unwrap().with_b_perp(0.1).unwrap();
        let ramp = linear_ramp(3.0, 1.0, 30.0).unwrap();
        let psi0 = StateVector::basis_state(SpinConfiguration::from_ket("0100").unwrap()).unwrap();
        let forward = evolve(&params, &ramp, 0.05, &psi0, 1000).unwrap();
        let back = evolve(&params, &ramp.reversed(), 0.05, &forward.final_state.conj(), 1000).unwrap();
        assert!(back.final_state.conj().fidelity(&psi0).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn slower_ramps_prepare_w_better() {
        let params = ModelParams::xx(4, -1.0, 0.0).unwrap().with_b_perp(0.05).unwrap();
        let psi0 = StateVector::all_up(4).unwrap();
        let fidelities: Vec<f64> = [4.0, 40.0, 400.0]
            .iter()
            .map(|&t| {
                let ramp = linear_ramp(3.0, 1.0, t).unwrap();
                evolve(&params, &ramp, 0.05, &psi0, 1_000_000).unwrap().final_w_fidelity()
            })
            .collect();
        assert!(fidelities.windows(2).all(|w| w[1] >= w[0]), "{fidelities:?}");
        assert!(fidelities[2] > 0.85, "{fidelities:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let params = ModelParams::xx(3, -1.0, 0.0).unwrap();
        let ramp = linear_ramp(3.0, 1.0, 1.0).unwrap();
        let psi0 = StateVector::all_up(3).unwrap();
        assert!(evolve(&params, &ramp, 0.0, &psi0, 1).is_err());
        assert!(evolve(&params, &ramp, 0.1, &psi0, 0).is_err());
        assert!(evolve(&params, &ramp, 0.1, &StateVector::all_up(4).unwrap(), 1).is_err());
        let big = ModelParams::xx(11, -1.0, 0.0).unwrap();
        assert!(evolve(&big, &ramp, 0.1, &StateVector::all_up(11).unwrap(), 1).is_err());
    }
}
