//! Linear resolvent dynamics on the embedded trajectory: a discrete
//! one-step propagator for the leading modes, the trailing mode treated
//! as a residual driving force, and the decision signal built from their
//! sum (optionally enveloped with the analytic signal).

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Discrete linear model `s[k+1] = A s[k] + B r[k]` for the first `r-1`
/// trajectory modes, driven by the r-th mode as a scalar residual force.
///
/// The propagator is fitted directly in discrete time (exact for sampled
/// linear systems); the continuous generator `ln(A)/T_s` is only reported
/// as a diagnostic for a scalar positive propagator.
#[derive(Debug, Clone)]
pub struct LinearModel {
    a: DMatrix<f64>,
    b: DVector<f64>,
    order: usize,
    sample_period: f64,
    training_mse: f64,
}

impl LinearModel {
    /// Assemble a model from explicit coefficients (mostly for tests and
    /// simulation). `a` must be square with `b` matching its dimension.
    pub fn from_parts(a: DMatrix<f64>, b: DVector<f64>, sample_period: f64) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::InvalidConfig(format!(
                "propagator must be square and nonempty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.len() != a.nrows() {
            return Err(Error::InvalidConfig(format!(
                "forcing gain has {} entries for a {}-state propagator",
                b.len(),
                a.nrows()
            )));
        }
        let order = a.nrows() + 1;
        Ok(Self {
            a,
            b,
            order,
            sample_period,
            training_mse: 0.0,
        })
    }

    /// One-step propagator, `(r-1) x (r-1)`.
    pub fn propagator(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Forcing gain column, `(r-1) x 1`.
    pub fn forcing_gain(&self) -> &DVector<f64> {
        &self.b
    }

    /// Analysis order r; the state has `r - 1` components and the
    /// residual force lives at zero-based index `r - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn residual_index(&self) -> usize {
        self.order - 1
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// One-step-ahead mean squared error on the training trajectory.
    pub fn training_mse(&self) -> f64 {
        self.training_mse
    }

    /// Continuous-time pole `ln(A)/T_s`, reported only for a scalar
    /// positive propagator.
    pub fn continuous_pole(&self) -> Option<f64> {
        if self.a.nrows() == 1 && self.a[(0, 0)] > 0.0 {
            Some(self.a[(0, 0)].ln() / self.sample_period)
        } else {
            None
        }
    }
}

/// Fit the discrete one-step model to a trajectory of `r` mode series:
/// the first `r - 1` are the state, the last is the residual force.
///
/// A forcing series that is identically zero is dropped from the
/// regression and its gain pinned to exactly zero; a state mode that is
/// identically zero or linearly dependent is an error naming the mode.
pub fn fit_linear_model(traj: &[TimeSeries]) -> Result<LinearModel> {
    let r = traj.len();
    if r < 2 {
        return Err(Error::InvalidConfig(format!(
            "linear model needs at least 2 trajectory modes, got {r}"
        )));
    }
    let p = r - 1;
    let t = traj[0].len();
    if traj.iter().any(|s| s.len() != t) {
        return Err(Error::InvalidConfig(
            "trajectory modes have mismatched lengths".into(),
        ));
    }
    if t < 2 * p + 2 {
        return Err(Error::InvalidConfig(format!(
            "trajectory too short to fit order {r}: {t} < {}",
            2 * p + 2
        )));
    }

    let steps = t - 1;
    let forcing = traj[r - 1].samples();
    let forcing_is_zero = forcing[..steps].iter().all(|v| *v == 0.0);
    for (i, mode) in traj[..p].iter().enumerate() {
        if mode.samples()[..steps].iter().all(|v| *v == 0.0) {
            return Err(Error::Numerical(format!(
                "rank-deficient regression: state mode v{} is identically zero",
                i + 1
            )));
        }
    }

    // regressor columns: [s_k, r_k] (forcing column dropped when zero)
    let q = if forcing_is_zero { p } else { p + 1 };
    let mut x = DMatrix::zeros(steps, q);
    let mut y = DMatrix::zeros(steps, p);
    for k in 0..steps {
        for j in 0..p {
            x[(k, j)] = traj[j].samples()[k];
            y[(k, j)] = traj[j].samples()[k + 1];
        }
        if !forcing_is_zero {
            x[(k, p)] = forcing[k];
        }
    }

    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax <= 0.0 || smin < 1e-12 * smax {
        // name the regressor dominating the null direction
        let v_t = svd
            .v_t
            .as_ref()
            .ok_or_else(|| Error::Numerical("SVD did not return right vectors".into()))?;
        let null_row = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut worst = 0usize;
        let mut worst_abs = f64::NEG_INFINITY;
        for j in 0..q {
            let a = v_t[(null_row, j)].abs();
            if a > worst_abs {
                worst_abs = a;
                worst = j;
            }
        }
        let name = if worst < p {
            format!("state mode v{}", worst + 1)
        } else {
            "forcing mode".to_string()
        };
        return Err(Error::Numerical(format!(
            "rank-deficient regression: {name} is degenerate"
        )));
    }

    // coefficients: solve min ||X Z - Y|| column by column
    let coeff = svd
        .solve(&y, 1e-12 * smax)
        .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;

    let mut a = DMatrix::zeros(p, p);
    let mut b = DVector::zeros(p);
    for out in 0..p {
        for j in 0..p {
            a[(out, j)] = coeff[(j, out)];
        }
        if !forcing_is_zero {
            b[out] = coeff[(p, out)];
        }
    }

    let residual = &x * &coeff - &y;
    let training_mse = residual.iter().map(|v| v * v).sum::<f64>() / (steps * p) as f64;
    if !training_mse.is_finite() {
        return Err(Error::Numerical("training MSE is non-finite".into()));
    }

    Ok(LinearModel {
        a,
        b,
        order: r,
        sample_period: traj[0].sample_period(),
        training_mse,
    })
}

/// Forward-simulate the fitted model from an initial state, driven by
/// the recorded residual force. Returns one series per state component,
/// each as long as the forcing series.
pub fn reconstruct(
    model: &LinearModel,
    r_force: &TimeSeries,
    s0: &[f64],
) -> Result<Vec<TimeSeries>> {
    let p = model.a.nrows();
    if s0.len() != p {
        return Err(Error::InvalidConfig(format!(
            "initial state has {} entries for a {p}-state model",
            s0.len()
        )));
    }
    let forcing = r_force.samples();
    let t = forcing.len();
    let mut states = vec![Vec::with_capacity(t); p];
    let mut current = DVector::from_column_slice(s0);
    for (j, state) in states.iter_mut().enumerate() {
        state.push(current[j]);
    }
    for k in 0..t - 1 {
        current = &model.a * &current + &model.b * forcing[k];
        for (j, state) in states.iter_mut().enumerate() {
            state.push(current[j]);
        }
    }
    states
        .into_iter()
        .map(|s| {
            TimeSeries::with_start_time(s, r_force.sample_period(), r_force.start_time())
        })
        .collect()
}

/// One-step-ahead MSE of the model on a given trajectory; equals the
/// stored training MSE when evaluated on the training data.
pub fn one_step_mse(model: &LinearModel, traj: &[TimeSeries]) -> Result<f64> {
    let p = model.a.nrows();
    if traj.len() != model.order {
        return Err(Error::InvalidConfig(format!(
            "expected {} trajectory modes, got {}",
            model.order,
            traj.len()
        )));
    }
    let t = traj[0].len();
    let forcing = traj[model.residual_index()].samples();
    let mut acc = 0.0;
    let mut state = DVector::zeros(p);
    for k in 0..t - 1 {
        for j in 0..p {
            state[j] = traj[j].samples()[k];
        }
        let pred = &model.a * &state + &model.b * forcing[k];
        for j in 0..p {
            let err = pred[j] - traj[j].samples()[k + 1];
            acc += err * err;
        }
    }
    Ok(acc / ((t - 1) * p) as f64)
}

/// The decision trace: dominant component, residual force, and their
/// combination (optionally enveloped).
#[derive(Debug, Clone)]
pub struct DecisionTrace {
    pub v: TimeSeries,
    pub r_force: TimeSeries,
    pub d: TimeSeries,
    pub hilbert_applied: bool,
}

/// Build the decision signal `d = v + r` where `v` is the first
/// trajectory mode and `r` the residual force (the last mode). With
/// `use_hilbert` the sum is replaced by its analytic-signal envelope.
pub fn decision_signal(
    traj: &[TimeSeries],
    model: &LinearModel,
    use_hilbert: bool,
) -> Result<DecisionTrace> {
    if traj.len() != model.order {
        return Err(Error::InvalidConfig(format!(
            "trajectory has {} modes but the model expects {}",
            traj.len(),
            model.order
        )));
    }
    let v = traj[0].clone();
    let r_force = traj[traj.len() - 1].clone();
    let sum: Vec<f64> = v
        .samples()
        .iter()
        .zip(r_force.samples())
        .map(|(a, b)| a + b)
        .collect();
    let sum = v.like(sum)?;
    let d = if use_hilbert {
        hilbert_envelope(&sum)?
    } else {
        sum
    };
    Ok(DecisionTrace {
        v,
        r_force,
        d,
        hilbert_applied: use_hilbert,
    })
}

/// Analytic-signal envelope `|x + i H[x]|` of the mean-removed input.
///
/// Computed in the frequency domain at the native length (mixed-radix
/// FFT, no padding): negative frequencies are zeroed, positive ones
/// doubled, DC and Nyquist left unchanged.
pub fn hilbert_envelope(x: &TimeSeries) -> Result<TimeSeries> {
    let n = x.len();
    if n < 8 {
        return Err(Error::InvalidConfig(format!(
            "Hilbert envelope needs at least 8 samples, got {n}"
        )));
    }
    let mean = x.samples().iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = x
        .samples()
        .iter()
        .map(|v| Complex64::new(v - mean, 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    for value in buf.iter_mut().take(if n % 2 == 0 { half } else { half + 1 }).skip(1) {
        *value *= 2.0;
    }
    for value in buf.iter_mut().skip(half + 1) {
        *value = Complex64::new(0.0, 0.0);
    }

    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let envelope: Vec<f64> = buf.iter().map(|c| c.norm() * scale).collect();
    x.like(envelope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        }
    }

    fn ts(samples: Vec<f64>) -> TimeSeries {
        TimeSeries::new(samples, 0.5).unwrap()
    }

    #[test]
    fn recovers_scalar_system() {
        let mut rng = lcg(11);
        let (a, b) = (0.9, 0.5);
        let t = 400;
        let mut state = 0.3;
        let mut v = Vec::with_capacity(t);
        let mut force = Vec::with_capacity(t);
        for _ in 0..t {
            let f = rng();
            v.push(state);
            force.push(f);
            state = a * state + b * f;
        }
        let model = fit_linear_model(&[ts(v), ts(force)]).unwrap();
        assert_relative_eq!(model.propagator()[(0, 0)], a, epsilon = 1e-9);
        assert_relative_eq!(model.forcing_gain()[0], b, epsilon = 1e-9);
        assert!(model.training_mse() < 1e-18);
        assert!(model.continuous_pole().is_some());
    }

    #[test]
    fn zero_forcing_pins_gain_to_exact_zero() {
        let mut rng = lcg(5);
        let v: Vec<f64> = (0..100).map(|_| rng()).collect();
        let force = vec![0.0; 100];
        let model = fit_linear_model(&[ts(v), ts(force)]).unwrap();
        assert_eq!(model.forcing_gain()[0], 0.0);
    }

    #[test]
    fn zero_state_mode_is_a_named_error() {
        let force: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let err = fit_linear_model(&[ts(vec![0.0; 50]), ts(force)]).unwrap_err();
        assert!(err.to_string().contains("v1"), "got: {err}");
    }

    #[test]
    fn duplicated_state_modes_are_rank_deficient() {
        let mut rng = lcg(23);
        let v: Vec<f64> = (0..100).map(|_| rng()).collect();
        let force: Vec<f64> = (0..100).map(|_| rng()).collect();
        let err = fit_linear_model(&[ts(v.clone()), ts(v), ts(force)]).unwrap_err();
        assert!(
            err.to_string().contains("rank-deficient"),
            "got: {err}"
        );
    }

    #[test]
    fn reconstruct_geometric_decay() {
        let model = LinearModel::from_parts(
            DMatrix::from_element(1, 1, 0.5),
            DVector::from_element(1, 0.0),
            0.5,
        )
        .unwrap();
        let force = ts(vec![0.0; 6]);
        let states = reconstruct(&model, &force, &[1.0]).unwrap();
        let expect = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125];
        assert_eq!(states.len(), 1);
        for (got, want) in states[0].samples().iter().zip(expect) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn reconstruct_matches_training_data_exactly() {
        // noise-free linear data: the free-run reproduces the trajectory
        let mut rng = lcg(7);
        let (a, b) = (0.8, 0.3);
        let t = 200;
        let mut state = 1.0;
        let mut v = Vec::with_capacity(t);
        let mut force = Vec::with_capacity(t);
        for _ in 0..t {
            let f = rng();
            v.push(state);
            force.push(f);
            state = a * state + b * f;
        }
        let traj = [ts(v.clone()), ts(force)];
        let model = fit_linear_model(&traj).unwrap();
        let recon = reconstruct(&model, &traj[1], &[v[0]]).unwrap();
        for (got, want) in recon[0].samples().iter().zip(&v) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        // definitional consistency of the stored MSE
        let mse = one_step_mse(&model, &traj).unwrap();
        assert_relative_eq!(mse, model.training_mse(), epsilon = 1e-15);
    }

    #[test]
    fn unstable_propagator_diverges_without_error() {
        let model = LinearModel::from_parts(
            DMatrix::from_element(1, 1, 1.1),
            DVector::from_element(1, 0.1),
            1.0,
        )
        .unwrap();
        let force = ts(vec![1.0; 200]);
        let states = reconstruct(&model, &force, &[1.0]).unwrap();
        let max = states[0]
            .samples()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max > 1e6, "expected divergence, max={max}");
    }

    #[test]
    fn random_stable_systems_are_recovered() {
        // generate-and-recover over scalar and 2-D systems
        let mut failures = 0;
        for seed in 0..100u64 {
            let mut rng = lcg(seed + 1);
            let p = if seed % 2 == 0 { 1 } else { 2 };
            let mut a = DMatrix::zeros(p, p);
            for i in 0..p {
                for j in 0..p {
                    a[(i, j)] = 0.7 * rng();
                }
            }
            // keep it comfortably stable
            let scale = a.norm();
            if scale > 0.95 {
                a.scale_mut(0.95 / scale);
            }
            let b = DVector::from_fn(p, |_, _| rng());
            let t = 600;
            let mut state = DVector::from_fn(p, |_, _| rng());
            let mut modes = vec![Vec::with_capacity(t); p];
            let mut force = Vec::with_capacity(t);
            for _ in 0..t {
                let f = rng();
                for j in 0..p {
                    modes[j].push(state[j]);
                }
                force.push(f);
                state = &a * &state + &b * f;
            }
            let mut traj: Vec<TimeSeries> = modes.into_iter().map(ts).collect();
            traj.push(ts(force));
            let model = fit_linear_model(&traj).unwrap();
            let err_a = (model.propagator() - &a).norm() / a.norm().max(1e-12);
            let err_b = (model.forcing_gain() - &b).norm() / b.norm().max(1e-12);
            if err_a > 1e-6 || err_b > 1e-6 {
                failures += 1;
            }
        }
        assert_eq!(failures, 0, "{failures}/100 systems missed the 1e-6 bound");
    }

    #[test]
    fn decision_signal_is_pointwise_sum() {
        let model = LinearModel::from_parts(
            DMatrix::from_element(1, 1, 0.9),
            DVector::from_element(1, 0.1),
            0.5,
        )
        .unwrap();
        let traj = [ts(vec![1.0, 2.0]), ts(vec![0.5, -0.5])];
        let trace = decision_signal(&traj, &model, false).unwrap();
        assert_eq!(trace.d.samples(), &[1.5, 1.5]);
        assert!(!trace.hilbert_applied);
    }

    #[test]
    fn decision_signal_is_linear_in_inputs() {
        let model = LinearModel::from_parts(
            DMatrix::from_element(1, 1, 0.9),
            DVector::from_element(1, 0.1),
            0.5,
        )
        .unwrap();
        let mut rng = lcg(3);
        let v: Vec<f64> = (0..64).map(|_| rng()).collect();
        let r: Vec<f64> = (0..64).map(|_| rng()).collect();
        // power-of-two scale keeps the scaling exact in floating point
        let a = 4.0;
        let base = decision_signal(&[ts(v.clone()), ts(r.clone())], &model, false).unwrap();
        let scaled = decision_signal(
            &[
                ts(v.iter().map(|x| a * x).collect()),
                ts(r.iter().map(|x| a * x).collect()),
            ],
            &model,
            false,
        )
        .unwrap();
        for (s, b) in scaled.d.samples().iter().zip(base.d.samples()) {
            assert_eq!(*s, a * b);
        }
    }

    #[test]
    fn envelope_of_tone_is_flat() {
        for n in [1024usize, 1000] {
            let amp = 2.5;
            let x = ts((0..n)
                .map(|i| amp * (2.0 * PI * 37.0 * i as f64 / n as f64).cos())
                .collect());
            let env = hilbert_envelope(&x).unwrap();
            for i in n / 10..(9 * n) / 10 {
                let rel = (env.samples()[i] - amp).abs() / amp;
                assert!(rel < 0.01, "n={n} i={i} envelope={}", env.samples()[i]);
            }
        }
    }

    #[test]
    fn envelope_of_zero_is_zero() {
        let x = ts(vec![0.0; 64]);
        let env = hilbert_envelope(&x).unwrap();
        for v in env.samples() {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn envelope_tracks_amplitude_ramp() {
        let n = 2048;
        let x = ts((0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let a = 1.0 + 2.0 * t;
                let phase = 2.0 * PI * (40.0 * t + 30.0 * t * t);
                a * phase.cos()
            })
            .collect());
        let env = hilbert_envelope(&x).unwrap();
        for i in n / 8..(7 * n) / 8 {
            let t = i as f64 / n as f64;
            let want = 1.0 + 2.0 * t;
            let rel = (env.samples()[i] - want).abs() / want;
            assert!(rel < 0.05, "i={i} env={} want={want}", env.samples()[i]);
        }
    }

    #[test]
    fn envelope_nonnegative_and_sign_invariant() {
        let mut rng = lcg(17);
        let x: Vec<f64> = (0..256).map(|_| rng()).collect();
        let env = hilbert_envelope(&ts(x.clone())).unwrap();
        let env_neg = hilbert_envelope(&ts(x.iter().map(|v| -v).collect())).unwrap();
        for (a, b) in env.samples().iter().zip(env_neg.samples()) {
            assert!(*a >= 0.0);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_rejects_tiny_inputs() {
        let x = TimeSeries::new(vec![0.0; 7], 1.0).unwrap();
        assert!(hilbert_envelope(&x).is_err());
    }
}
