//! Time-feature Hankel embedding and its singular value decomposition:
//! delay-coordinate trajectories and mode-dominance diagnostics.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::series::{FeatureBank, TimeSeries};

/// Dense multivariate Hankel matrix.
///
/// Feature `i` contributes `M` delay rows: row `i*M + j`, column `k`
/// holds `feature_i[k + j]`. With `F` features of length `N` the shape is
/// `(F*M) x (N - M + 1)`, and construction enforces the tall-in-time
/// regime (strictly more columns than rows).
#[derive(Debug, Clone)]
pub struct HankelMatrix {
    data: DMatrix<f64>,
    memory: usize,
    feature_count: usize,
    sample_period: f64,
    start_time: f64,
}

impl HankelMatrix {
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }
}

/// Stack every feature's delay rows into one Hankel matrix.
pub fn build_hankel(bank: &FeatureBank, memory: usize) -> Result<HankelMatrix> {
    let n = bank.len();
    let f = bank.feature_count();
    if memory == 0 {
        return Err(Error::InvalidConfig("memory M must be positive".into()));
    }
    if n < memory {
        return Err(Error::InvalidConfig(format!(
            "memory M={memory} exceeds the series length {n}"
        )));
    }
    let rows = f * memory;
    let cols = n - memory + 1;
    if cols <= rows {
        return Err(Error::InvalidConfig(format!(
            "memory M={memory} too large: {rows} rows need fewer than {cols} columns (N={n})"
        )));
    }
    let mut data = DMatrix::zeros(rows, cols);
    for (i, feature) in bank.features().iter().enumerate() {
        let x = feature.samples();
        for j in 0..memory {
            let row = i * memory + j;
            for k in 0..cols {
                data[(row, k)] = x[k + j];
            }
        }
    }
    Ok(HankelMatrix {
        data,
        memory,
        feature_count: f,
        sample_period: bank.sample_period(),
        start_time: bank.features()[0].start_time(),
    })
}

/// Thin SVD of a Hankel matrix: `H = U diag(sigma) V^T` with
/// `k = min(rows, cols)` modes, singular values descending, and a fixed
/// sign convention (each U column's largest-magnitude entry is positive).
#[derive(Debug, Clone)]
pub struct ModeDecomposition {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
    memory: usize,
    feature_count: usize,
    sample_period: f64,
    start_time: f64,
}

impl ModeDecomposition {
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Singular values, nonincreasing.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Right singular vectors, one column per retained mode. May hold
    /// fewer columns than `sigma` when built by [`decompose_leading`].
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// Offset that aligns trajectory index 0 to the original series:
    /// column k of the Hankel matrix is centered on sample k + M/2.
    pub fn alignment_offset(&self) -> usize {
        self.memory / 2
    }
}

/// Ratio of the first to the second singular value; infinite when the
/// second one vanishes.
pub fn dominance_ratio(d: &ModeDecomposition) -> f64 {
    let s = d.sigma();
    if s.len() < 2 || s[1] == 0.0 {
        return f64::INFINITY;
    }
    s[0] / s[1]
}

/// Full thin SVD (all `min(rows, cols)` modes).
pub fn decompose(h: &HankelMatrix) -> Result<ModeDecomposition> {
    decompose_leading(h, h.rows())
}

/// Thin SVD keeping only the first `v_modes` right singular vectors.
/// Left vectors and singular values are always complete; this only
/// limits the expensive tall `V` factor.
pub fn decompose_leading(h: &HankelMatrix, v_modes: usize) -> Result<ModeDecomposition> {
    let rows = h.rows();
    let cols = h.cols();
    let v_modes = v_modes.min(rows);
    if h.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("Hankel matrix has non-finite entries".into()));
    }

    // Rows never exceed columns, so the R x R Gram matrix H H^T carries
    // the full spectrum and a symmetric eigendecomposition is much
    // cheaper than bidiagonalizing the wide matrix itself.
    let mut gram = &h.data * h.data.transpose();
    let gram_t = gram.transpose();
    gram += gram_t;
    gram.scale_mut(0.5);

    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Eigenvalues of the Gram matrix resolve zero modes only to about
    // eps * lambda_max; clip that floor so rank-deficient spectra come
    // out exactly zero instead of sqrt(eps)-sized noise.
    let lambda_max = eig.eigenvalues[order[0]].max(0.0);
    let lambda_cut = lambda_max * 1e-13;

    let mut u = DMatrix::zeros(rows, rows);
    let mut sigma = Vec::with_capacity(rows);
    for (dst, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        let lambda = if lambda <= lambda_cut { 0.0 } else { lambda };
        sigma.push(lambda.sqrt());
        let mut col = eig.eigenvectors.column(src).clone_owned();
        fix_sign(&mut col);
        u.set_column(dst, &col);
    }

    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical("singular values are non-finite".into()));
    }

    // V = H^T U / sigma, column by column; tiny modes are re-orthogonalized
    // and exhausted modes completed from the canonical basis so V stays
    // orthonormal even for rank-deficient input.
    let sigma_max = sigma[0];
    let null_tol = sigma_max * 1e-12;
    let polish_tol = sigma_max * 1e-6;
    let mut v = DMatrix::zeros(cols, v_modes);
    if v_modes > 0 {
        let raw = h.data.transpose() * u.columns(0, v_modes);
        let raw = raw.as_slice();
        let vbuf = v.as_mut_slice();
        // canonical completion consumes basis vectors left to right; the
        // cursor never rewinds (a rejected candidate only gets worse as
        // more columns land)
        let mut cursor = 0usize;
        for i in 0..v_modes {
            let (prev, tail) = vbuf.split_at_mut(i * cols);
            let current = &mut tail[..cols];
            let s = sigma[i];
            if s > null_tol {
                for (dst, src) in current.iter_mut().zip(&raw[i * cols..(i + 1) * cols]) {
                    *dst = src / s;
                }
                if s < polish_tol && !reorthogonalize(prev, current, cols) {
                    complete_column(prev, current, cols, &mut cursor)?;
                }
            } else {
                complete_column(prev, current, cols, &mut cursor)?;
            }
        }
    }

    Ok(ModeDecomposition {
        u,
        sigma,
        v,
        memory: h.memory,
        feature_count: h.feature_count,
        sample_period: h.sample_period,
        start_time: h.start_time,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Remove the projections of `current` onto every column packed in
/// `prev` (column-major, `len` rows each).
fn project_out(prev: &[f64], current: &mut [f64], len: usize) {
    for col in prev.chunks_exact(len) {
        let proj = dot(col, current);
        for (c, p) in current.iter_mut().zip(col) {
            *c -= proj * p;
        }
    }
}

/// Flip a vector so that its largest-magnitude entry is positive. Ties
/// resolve to the first maximal entry, keeping the convention exact.
fn fix_sign(col: &mut DVector<f64>) {
    let mut best = 0usize;
    let mut best_abs = f64::NEG_INFINITY;
    for (i, value) in col.iter().enumerate() {
        let a = value.abs();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if col[best] < 0.0 {
        col.neg_mut();
    }
}

/// Two passes of modified Gram-Schmidt against the previous columns,
/// then renormalize. Returns false when the direction collapses and a
/// canonical completion is needed instead.
fn reorthogonalize(prev: &[f64], current: &mut [f64], len: usize) -> bool {
    for _ in 0..2 {
        project_out(prev, current, len);
    }
    let norm = dot(current, current).sqrt();
    if norm > 1e-8 {
        for c in current.iter_mut() {
            *c /= norm;
        }
        true
    } else {
        false
    }
}

/// Fill `current` with the first canonical basis vector (from `cursor`
/// onward) that survives projection against the previous columns.
/// Deterministic by scan order.
fn complete_column(
    prev: &[f64],
    current: &mut [f64],
    len: usize,
    cursor: &mut usize,
) -> Result<()> {
    while *cursor < len {
        let candidate = *cursor;
        *cursor += 1;
        current.fill(0.0);
        current[candidate] = 1.0;
        project_out(prev, current, len);
        let norm = dot(current, current).sqrt();
        if norm > 0.5 {
            for c in current.iter_mut() {
                *c /= norm;
            }
            return Ok(());
        }
    }
    Err(Error::Numerical(
        "could not complete an orthonormal basis for the null modes".into(),
    ))
}

/// Trajectory scaling for the right singular vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeScaling {
    /// Scale each mode by its singular value, putting the trajectory in
    /// observable units (default).
    #[default]
    Sigma,
    /// Raw unit-norm columns of V.
    Unit,
}

/// First `r` delay-coordinate trajectory series `v_i(t)`, each of length
/// `N - M + 1`, sample period inherited, start time shifted by the
/// alignment offset `floor(M/2)` samples.
pub fn trajectory(d: &ModeDecomposition, r: usize) -> Result<Vec<TimeSeries>> {
    trajectory_scaled(d, r, ModeScaling::Sigma)
}

/// Same as [`trajectory`] with an explicit scaling choice.
pub fn trajectory_scaled(
    d: &ModeDecomposition,
    r: usize,
    scaling: ModeScaling,
) -> Result<Vec<TimeSeries>> {
    if r == 0 || r > d.v.ncols() {
        return Err(Error::InvalidConfig(format!(
            "trajectory order r={r} out of range (1..={})",
            d.v.ncols()
        )));
    }
    let start = d.start_time + d.alignment_offset() as f64 * d.sample_period;
    (0..r)
        .map(|i| {
            let scale = match scaling {
                ModeScaling::Sigma => d.sigma[i],
                ModeScaling::Unit => 1.0,
            };
            let samples: Vec<f64> = d.v.column(i).iter().map(|v| v * scale).collect();
            TimeSeries::with_start_time(samples, d.sample_period, start)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::FeatureBank;
    use approx::assert_relative_eq;

    fn bank_from(features: Vec<Vec<f64>>, halfwidth: usize) -> FeatureBank {
        let labels = (0..features.len()).map(|i| format!("f{i}")).collect();
        let series = features
            .into_iter()
            .map(|f| TimeSeries::new(f, 1.0).unwrap())
            .collect();
        FeatureBank::new(series, labels, halfwidth).unwrap()
    }

    fn pseudo_series(n: usize, seed: u64) -> Vec<f64> {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        (0..n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            })
            .collect()
    }

    #[test]
    fn hankel_single_feature_hand_case() {
        // [1,2,3,4], M=2 -> [[1,2,3],[2,3,4]]
        let bank = bank_from(vec![vec![1.0, 2.0, 3.0, 4.0]], 1);
        let h = build_hankel(&bank, 2).unwrap();
        assert_eq!(h.rows(), 2);
        assert_eq!(h.cols(), 3);
        let expect = [[1.0, 2.0, 3.0], [2.0, 3.0, 4.0]];
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(h.data()[(r, c)], expect[r][c]);
            }
        }
    }

    #[test]
    fn hankel_m1_is_feature_stack() {
        let f0 = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let f1 = vec![-1.0, 0.5, 0.0, 2.0, 3.5];
        let bank = bank_from(vec![f0.clone(), f1.clone()], 1);
        let h = build_hankel(&bank, 1).unwrap();
        assert_eq!(h.rows(), 2);
        assert_eq!(h.cols(), 5);
        for k in 0..5 {
            assert_eq!(h.data()[(0, k)], f0[k]);
            assert_eq!(h.data()[(1, k)], f1[k]);
        }
    }

    #[test]
    fn hankel_matches_brute_force_exhaustively() {
        // every (F, M) pair with F <= 4, M <= 8 and a few series lengths
        for f in 1..=4usize {
            for m in 1..=8usize {
                let n_min = f * m + m; // smallest N with cols > rows
                for n in [n_min, n_min + 5, 64] {
                    if n > 64 || n < n_min {
                        continue;
                    }
                    let features: Vec<Vec<f64>> = (0..f)
                        .map(|i| pseudo_series(n, (f * 100 + m * 10 + i) as u64))
                        .collect();
                    let bank = bank_from(features.clone(), 1);
                    let h = build_hankel(&bank, m).unwrap();
                    assert_eq!(h.rows(), f * m);
                    assert_eq!(h.cols(), n - m + 1);
                    for i in 0..f {
                        for j in 0..m {
                            for k in 0..(n - m + 1) {
                                assert_eq!(
                                    h.data()[(i * m + j, k)],
                                    features[i][k + j],
                                    "F={f} M={m} N={n} i={i} j={j} k={k}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hankel_rejects_oversized_memory() {
        let bank = bank_from(vec![pseudo_series(10, 1)], 1);
        // M=6: 6 rows but only 5 columns
        assert!(build_hankel(&bank, 6).is_err());
        // M beyond the series length entirely
        assert!(build_hankel(&bank, 11).is_err());
        assert!(build_hankel(&bank, 0).is_err());
    }

    #[test]
    fn paper_scale_shape() {
        // 4 features, M=4, N=14400 -> 16 x 14397
        let features: Vec<Vec<f64>> = (0..4).map(|i| pseudo_series(14400, i)).collect();
        let bank = bank_from(features, 10);
        let h = build_hankel(&bank, 4).unwrap();
        assert_eq!(h.rows(), 16);
        assert_eq!(h.cols(), 14397);
    }

    fn decompose_random(rows_hint: (usize, usize), n: usize, seed: u64) -> ModeDecomposition {
        let (f, m) = rows_hint;
        let features: Vec<Vec<f64>> = (0..f).map(|i| pseudo_series(n, seed + i as u64)).collect();
        let bank = bank_from(features, 1);
        let h = build_hankel(&bank, m).unwrap();
        decompose(&h).unwrap()
    }

    fn check_orthonormal(m: &DMatrix<f64>, tol: f64) {
        let gram = m.transpose() * m;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[(i, j)] - expect).abs() < tol,
                    "gram[{i},{j}] = {}",
                    gram[(i, j)]
                );
            }
        }
    }

    #[test]
    fn svd_reconstructs_random_hankel() {
        let d = decompose_random((2, 4), 40, 7);
        let features: Vec<Vec<f64>> = (0..2).map(|i| pseudo_series(40, 7 + i as u64)).collect();
        let bank = bank_from(features, 1);
        let h = build_hankel(&bank, 4).unwrap();

        check_orthonormal(&d.u().clone_owned(), 1e-10);
        check_orthonormal(&d.v().clone_owned(), 1e-10);

        let mut recon = DMatrix::zeros(h.rows(), h.cols());
        for i in 0..d.sigma().len() {
            let u = d.u().column(i).clone_owned();
            let v = d.v().column(i).clone_owned();
            recon += u * v.transpose() * d.sigma()[i];
        }
        let err = (h.data() - &recon).norm() / h.data().norm();
        assert!(err < 1e-10, "reconstruction error {err}");

        // nonincreasing sigma
        for w in d.sigma().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn svd_rank_one_case() {
        // geometric sequence: every delay row is a multiple of the first
        let rho: f64 = 0.8;
        let f: Vec<f64> = (0..20).map(|k| rho.powi(k)).collect();
        let bank = bank_from(vec![f], 1);
        let h = build_hankel(&bank, 3).unwrap();
        let d = decompose(&h).unwrap();
        assert_eq!(d.sigma()[1], 0.0);
        assert_relative_eq!(d.sigma()[0], h.data().norm(), epsilon = 1e-10);
        assert!(dominance_ratio(&d).is_infinite());
        // V stays orthonormal even for the null modes
        check_orthonormal(&d.v().clone_owned(), 1e-8);
    }

    #[test]
    fn svd_orthogonal_rows_give_row_norms() {
        let f0 = vec![2.0, 0.0, 0.0, 0.0, 0.0];
        let f1 = vec![0.0, 3.0, 0.0, 0.0, 0.0];
        let bank = bank_from(vec![f0, f1], 1);
        let h = build_hankel(&bank, 1).unwrap();
        let d = decompose(&h).unwrap();
        assert_relative_eq!(d.sigma()[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(d.sigma()[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_matrix_is_handled() {
        let bank = bank_from(vec![vec![0.0; 16]], 1);
        let h = build_hankel(&bank, 2).unwrap();
        let d = decompose(&h).unwrap();
        assert!(d.sigma().iter().all(|s| *s == 0.0));
        check_orthonormal(&d.v().clone_owned(), 1e-12);
        assert!(dominance_ratio(&d).is_infinite());
    }

    #[test]
    fn decompose_is_deterministic() {
        let a = decompose_random((3, 4), 50, 42);
        let b = decompose_random((3, 4), 50, 42);
        assert_eq!(a.sigma(), b.sigma());
        assert_eq!(a.u(), b.u());
        assert_eq!(a.v(), b.v());
    }

    #[test]
    fn single_tone_dominance_is_near_one() {
        // a clean sinusoid embeds as a sine/cosine pair with equal weight
        let n = 512;
        let f: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / 32.0).sin())
            .collect();
        let bank = bank_from(vec![f], 1);
        let h = build_hankel(&bank, 16).unwrap();
        let d = decompose(&h).unwrap();
        let ratio = dominance_ratio(&d);
        assert!(
            (ratio - 1.0).abs() < 0.05,
            "sine pair should split evenly, got {ratio}"
        );
    }

    #[test]
    fn trajectory_orthogonality_and_alignment() {
        let d = decompose_random((2, 4), 60, 3);
        let traj = trajectory(&d, 4).unwrap();
        assert_eq!(traj.len(), 4);
        for t in &traj {
            assert_eq!(t.len(), 60 - 4 + 1);
            assert_eq!(t.sample_period(), 1.0);
            assert_eq!(t.start_time(), 2.0); // floor(M/2) * Ts
        }
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let a = traj[i].samples();
                let b = traj[j].samples();
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(dot.abs() / (na * nb) < 1e-8);
            }
        }
    }

    #[test]
    fn trajectory_full_and_out_of_range() {
        let d = decompose_random((1, 3), 30, 9);
        assert!(trajectory(&d, 3).is_ok());
        assert!(trajectory(&d, 4).is_err());
        assert!(trajectory(&d, 0).is_err());
    }

    #[test]
    fn unscaled_trajectory_is_unit_norm() {
        let d = decompose_random((2, 3), 40, 5);
        let traj = trajectory_scaled(&d, 2, ModeScaling::Unit).unwrap();
        for t in traj {
            let norm: f64 = t.samples().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
        }
    }
}
