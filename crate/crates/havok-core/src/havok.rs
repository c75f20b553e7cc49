//! Intermittently forced linear model on the eigen time-delay
//! coordinates: a linear system on the first `r - 1` coordinates driven
//! by the last coordinate as a forcing input.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative singular-value cutoff for the regression pseudo-inverse.
const PINV_CUTOFF: f64 = 1e-10;

/// State norm above which a simulation is declared divergent.
const DIVERGENCE_GUARD: f64 = 1e12;

/// Snapshot matrix of eigen time-delay coordinates; column `j` is the
/// coordinate `v_{j+1}(t)`, rows are snapshots.
#[derive(Debug, Clone)]
pub struct CoordinateSeries {
    /// `q x r` matrix of coordinates.
    pub v: DMatrix<f64>,
    /// Seconds per snapshot.
    pub dt: f64,
}

/// The forcing coordinate `v_r(t)`.
#[derive(Debug, Clone)]
pub struct ForcingSeries {
    pub vr: Vec<f64>,
    pub dt: f64,
    /// Share of squared singular-value energy carried by this coordinate.
    pub energy_fraction: f64,
}

/// Whether the regression estimates a one-step map or a continuous-time
/// generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// One-step least squares on consecutive snapshot pairs.
    Discrete,
    /// Regression of fourth-order central-difference derivatives on the
    /// coordinates; interior snapshots only.
    Derivative,
}

/// Fitted forced linear model.
#[derive(Debug, Clone)]
pub struct HavokModel {
    /// Dynamics matrix, `(r-1) x (r-1)`.
    pub a: DMatrix<f64>,
    /// Forcing vector, length `r - 1`.
    pub b: DVector<f64>,
    pub mode: FitMode,
    /// Norm of the discarded last regression row (the part that would
    /// predict the forcing itself).
    pub residual_row_norm: f64,
    /// Number of coordinates including the forcing.
    pub r: usize,
    pub dt: f64,
}

impl HavokModel {
    /// Discarded-row norm relative to the full operator norm. Values
    /// well below one indicate the forcing is not linearly predictable
    /// from the retained coordinates, which is the regime the model
    /// assumes.
    pub fn residual_ratio(&self) -> f64 {
        let a_norm = linalg::frobenius(&self.a);
        let full = libm::sqrt(
            a_norm * a_norm
                + self.b.iter().map(|v| v * v).sum::<f64>()
                + self.residual_row_norm * self.residual_row_norm,
        );
        if full > 0.0 {
            self.residual_row_norm / full
        } else {
            0.0
        }
    }
}

/// Fits the forced linear model by least squares.
///
/// In `Discrete` mode the full one-step operator is solved from the
/// snapshot pair `(V_k, V_{k+1})` via the pseudo-inverse; its top-left
/// block is `A`, the top-right column is `B`, and the norm of the last
/// row (which would propagate the forcing) is reported as
/// `residual_row_norm`. In `Derivative` mode the same layout is
/// estimated for the continuous generator using fourth-order central
/// differences, dropping two snapshots at each end.
pub fn fit(coords: &CoordinateSeries, mode: FitMode) -> Result<HavokModel> {
    let (q, r) = coords.v.shape();
    if r < 2 {
        return Err(Error::InvalidRank { rank: r, max: r });
    }
    if q < r + 5 {
        return Err(Error::ShortSeries { needed: r + 5, got: q });
    }
    if coords.v.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "coordinate series" });
    }

    let operator = match mode {
        FitMode::Discrete => {
            // regressors: snapshots 0..q-1, targets: snapshots 1..q
            let cur = coords.v.rows(0, q - 1).transpose(); // r x (q-1)
            let next = coords.v.rows(1, q - 1).transpose();
            let pinv = linalg::pinv(&cur, PINV_CUTOFF)?; // (q-1) x r
            next * pinv // r x r one-step map
        }
        FitMode::Derivative => {
            let interior = q - 4;
            if interior < r + 1 {
                return Err(Error::ShortSeries { needed: r + 5, got: q });
            }
            let inv_12dt = 1.0 / (12.0 * coords.dt);
            let mut deriv = DMatrix::<f64>::zeros(interior, r);
            for k in 0..interior {
                let i = k + 2;
                for j in 0..r {
                    deriv[(k, j)] = (coords.v[(i - 2, j)] - 8.0 * coords.v[(i - 1, j)]
                        + 8.0 * coords.v[(i + 1, j)]
                        - coords.v[(i + 2, j)])
                        * inv_12dt;
                }
            }
            let regress = coords.v.rows(2, interior).into_owned(); // interior x r
            let pinv = linalg::pinv(&regress, PINV_CUTOFF)?; // r x interior
            (pinv * deriv).transpose() // r x r generator
        }
    };

    let a = operator.view((0, 0), (r - 1, r - 1)).into_owned();
    let b = DVector::from_iterator(r - 1, (0..r - 1).map(|i| operator[(i, r - 1)]));
    let last_row: Vec<f64> = (0..r).map(|j| operator[(r - 1, j)]).collect();
    Ok(HavokModel {
        a,
        b,
        mode,
        residual_row_norm: linalg::norm2(&last_row),
        r,
        dt: coords.dt,
    })
}

/// Runs the fitted model forward from `v0` under the recorded forcing.
///
/// Returns a `q x (r-1)` state matrix whose row `k` is the state at
/// snapshot `k`; `q` is the forcing length. Discrete models iterate the
/// one-step map; derivative models integrate the linear ODE with
/// classical fourth-order steps, holding the forcing constant over each
/// step.
pub fn simulate(
    model: &HavokModel,
    v0: &[f64],
    forcing: &ForcingSeries,
) -> Result<DMatrix<f64>> {
    let d = model.r - 1;
    if v0.len() != d {
        return Err(Error::ShapeMismatch { expected: (d, 1), got: (v0.len(), 1) });
    }
    if v0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "initial state" });
    }
    let q = forcing.vr.len();
    if q < 2 {
        return Err(Error::ShortSeries { needed: 2, got: q });
    }

    let mut out = DMatrix::<f64>::zeros(q, d);
    let mut state = DVector::from_column_slice(v0);
    for (i, v) in state.iter().enumerate() {
        out[(0, i)] = *v;
    }
    for k in 1..q {
        let u = forcing.vr[k - 1];
        state = match model.mode {
            FitMode::Discrete => &model.a * &state + &model.b * u,
            FitMode::Derivative => rk4_step(&model.a, &model.b, &state, u, forcing.dt),
        };
        let norm = state.norm();
        if !norm.is_finite() || norm > DIVERGENCE_GUARD {
            return Err(Error::Divergence { index: k, norm });
        }
        for (i, v) in state.iter().enumerate() {
            out[(k, i)] = *v;
        }
    }
    Ok(out)
}

fn rk4_step(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    state: &DVector<f64>,
    u: f64,
    dt: f64,
) -> DVector<f64> {
    let f = |s: &DVector<f64>| a * s + b * u;
    let k1 = f(state);
    let k2 = f(&(state + &k1 * (dt / 2.0)));
    let k3 = f(&(state + &k2 * (dt / 2.0)));
    let k4 = f(&(state + &k3 * dt));
    state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Per-column goodness of fit between a predicted and a reference
/// state matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionScore {
    /// Coefficient of determination `1 - SS_res / SS_tot` per column.
    pub r2: Vec<f64>,
    /// Root-mean-square error normalized by the reference range.
    pub nrmse: Vec<f64>,
}

pub fn reconstruction_score(
    predicted: &DMatrix<f64>,
    actual: &DMatrix<f64>,
) -> Result<ReconstructionScore> {
    if predicted.shape() != actual.shape() {
        return Err(Error::ShapeMismatch { expected: actual.shape(), got: predicted.shape() });
    }
    let (n, cols) = actual.shape();
    let mut r2 = Vec::with_capacity(cols);
    let mut nrmse = Vec::with_capacity(cols);
    for j in 0..cols {
        let col = actual.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let ss_tot: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in col.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if ss_tot <= 0.0 || hi <= lo {
            return Err(Error::ZeroVariance { column: j });
        }
        let ss_res: f64 = (0..n)
            .map(|i| {
                let d = predicted[(i, j)] - actual[(i, j)];
                d * d
            })
            .sum();
        r2.push(1.0 - ss_res / ss_tot);
        nrmse.push(libm::sqrt(ss_res / n as f64) / (hi - lo));
    }
    Ok(ReconstructionScore { r2, nrmse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    /// Random stable 3x3 matrix scaled to the requested spectral radius.
    fn stable_matrix(seed: u64, radius: f64) -> DMatrix<f64> {
        let mut next = lcg(seed);
        let mut a = DMatrix::<f64>::zeros(3, 3);
        for v in a.iter_mut() {
            *v = next();
        }
        // crude spectral radius via power iteration on A^T A pairs
        let mut x = DVector::from_column_slice(&[1.0, 0.3, -0.4]);
        let mut rho = 0.0;
        for _ in 0..200 {
            let y = &a * &x;
            let ny = y.norm();
            rho = ny / x.norm();
            if ny > 0.0 {
                x = y / ny;
            }
        }
        a * (radius / rho)
    }

    fn synthetic_coords(
        a0: &DMatrix<f64>,
        b0: &DVector<f64>,
        v0: &[f64],
        n: usize,
        seed: u64,
    ) -> CoordinateSeries {
        let mut next = lcg(seed);
        let d = v0.len();
        let mut v = DMatrix::<f64>::zeros(n, d + 1);
        let mut state = DVector::from_column_slice(v0);
        for k in 0..n {
            let u = next();
            for i in 0..d {
                v[(k, i)] = state[i];
            }
            v[(k, d)] = u;
            state = a0 * &state + b0 * u;
        }
        CoordinateSeries { v, dt: 0.01 }
    }

    #[test]
    fn discrete_fit_recovers_known_system() {
        let a0 = stable_matrix(7, 0.9);
        let b0 = DVector::from_column_slice(&[0.5, -0.3, 0.8]);
        let coords = synthetic_coords(&a0, &b0, &[0.1, -0.2, 0.3], 2000, 99);
        let model = fit(&coords, FitMode::Discrete).unwrap();
        assert_eq!(model.r, 4);
        assert!(linalg::frobenius(&(&model.a - &a0)) <= 1e-6);
        assert!((&model.b - &b0).norm() <= 1e-6);
        // white-noise forcing is unpredictable, so the discarded row is near zero
        assert!(model.residual_ratio() <= 0.1, "ratio {}", model.residual_ratio());
    }

    #[test]
    fn fit_rejects_zero_coordinates() {
        let coords = CoordinateSeries { v: DMatrix::zeros(50, 3), dt: 1.0 };
        assert!(matches!(fit(&coords, FitMode::Discrete), Err(Error::RankDeficient)));
    }

    #[test]
    fn fit_rejects_short_series() {
        let coords = CoordinateSeries { v: DMatrix::identity(6, 3), dt: 1.0 };
        assert!(matches!(fit(&coords, FitMode::Discrete), Err(Error::ShortSeries { .. })));
    }

    #[test]
    fn simulate_null_dynamics_is_constant() {
        let model = HavokModel {
            a: DMatrix::zeros(2, 2),
            b: DVector::zeros(2),
            mode: FitMode::Discrete,
            residual_row_norm: 0.0,
            r: 3,
            dt: 1.0,
        };
        let forcing = ForcingSeries { vr: vec![1.0; 5], dt: 1.0, energy_fraction: 0.0 };
        let out = simulate(&model, &[2.0, -1.0], &forcing).unwrap();
        for k in 0..5 {
            if k > 0 {
                assert_eq!(out[(k, 0)], 0.0);
                assert_eq!(out[(k, 1)], 0.0);
            }
        }
        assert_eq!(out[(0, 0)], 2.0);
        assert_eq!(out[(0, 1)], -1.0);
    }

    #[test]
    fn simulate_scalar_hand_iteration() {
        let model = HavokModel {
            a: DMatrix::from_element(1, 1, 0.5),
            b: DVector::from_element(1, 1.0),
            mode: FitMode::Discrete,
            residual_row_norm: 0.0,
            r: 2,
            dt: 1.0,
        };
        let forcing = ForcingSeries { vr: vec![1.0, 0.0, 0.0, 0.0, 0.0], dt: 1.0, energy_fraction: 0.0 };
        let out = simulate(&model, &[0.0], &forcing).unwrap();
        let states: Vec<f64> = (0..5).map(|k| out[(k, 0)]).collect();
        assert_eq!(states, vec![0.0, 1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn simulate_reports_divergence_index() {
        let model = HavokModel {
            a: DMatrix::from_element(1, 1, 10.0),
            b: DVector::from_element(1, 0.0),
            mode: FitMode::Discrete,
            residual_row_norm: 0.0,
            r: 2,
            dt: 1.0,
        };
        let forcing = ForcingSeries { vr: vec![0.0; 40], dt: 1.0, energy_fraction: 0.0 };
        let err = simulate(&model, &[1.0], &forcing).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn fit_of_simulated_output_is_a_fixed_point() {
        let a0 = stable_matrix(21, 0.85);
        let b0 = DVector::from_column_slice(&[1.0, 0.2, -0.5]);
        let model = HavokModel {
            a: a0.clone(),
            b: b0.clone(),
            mode: FitMode::Discrete,
            residual_row_norm: 0.0,
            r: 4,
            dt: 0.02,
        };
        let mut next = lcg(5);
        let vr: Vec<f64> = (0..1500).map(|_| next()).collect();
        let forcing = ForcingSeries { vr: vr.clone(), dt: 0.02, energy_fraction: 0.0 };
        let states = simulate(&model, &[0.3, -0.1, 0.2], &forcing).unwrap();
        let mut v = DMatrix::<f64>::zeros(1500, 4);
        for k in 0..1500 {
            for i in 0..3 {
                v[(k, i)] = states[(k, i)];
            }
            v[(k, 3)] = vr[k];
        }
        let refit = fit(&CoordinateSeries { v, dt: 0.02 }, FitMode::Discrete).unwrap();
        assert!(linalg::frobenius(&(&refit.a - &a0)) < 1e-8);
        assert!((&refit.b - &b0).norm() < 1e-8);
    }

    /// Samples an exactly-integrated continuous LTI system and checks the
    /// fourth-order convergence of the derivative-mode fit.
    fn derivative_fit_error(dt: f64) -> f64 {
        let a_c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0, -0.4]);
        let b_c = DVector::from_column_slice(&[0.5, 1.0]);
        let horizon = 40.0;
        let n = (horizon / dt) as usize;
        let substeps = 40usize;
        let h = dt / substeps as f64;
        let u = |t: f64| libm::sin(1.3 * t) + 0.5 * libm::cos(2.9 * t);

        let mut v = DMatrix::<f64>::zeros(n, 3);
        let mut state = DVector::from_column_slice(&[1.0, 0.0]);
        let mut t = 0.0;
        for k in 0..n {
            v[(k, 0)] = state[0];
            v[(k, 1)] = state[1];
            v[(k, 2)] = u(t);
            for _ in 0..substeps {
                // RK4 with the exact time-varying input
                let f = |s: &DVector<f64>, tt: f64| &a_c * s + &b_c * u(tt);
                let k1 = f(&state, t);
                let k2 = f(&(&state + &k1 * (h / 2.0)), t + h / 2.0);
                let k3 = f(&(&state + &k2 * (h / 2.0)), t + h / 2.0);
                let k4 = f(&(&state + &k3 * h), t + h);
                state += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                t += h;
            }
        }
        let model = fit(&CoordinateSeries { v, dt }, FitMode::Derivative).unwrap();
        linalg::frobenius(&(&model.a - &a_c))
    }

    #[test]
    fn derivative_fit_converges_at_fourth_order() {
        let coarse = derivative_fit_error(0.02);
        let fine = derivative_fit_error(0.01);
        assert!(
            coarse / fine >= 8.0,
            "expected >=8x error reduction on dt halving, got {coarse:.3e} -> {fine:.3e}"
        );
    }

    #[test]
    fn score_perfect_and_mean_predictions() {
        let actual = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let perfect = reconstruction_score(&actual.clone(), &actual).unwrap();
        assert_relative_eq!(perfect.r2[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(perfect.nrmse[0], 0.0, epsilon = 1e-15);

        let mean_pred = DMatrix::from_column_slice(3, 1, &[2.0, 2.0, 2.0]);
        let zero = reconstruction_score(&mean_pred, &actual).unwrap();
        assert_relative_eq!(zero.r2[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn score_three_point_arithmetic_case() {
        let actual = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let pred = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 4.0]);
        let score = reconstruction_score(&pred, &actual).unwrap();
        assert_relative_eq!(score.r2[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn score_rejects_constant_reference() {
        let actual = DMatrix::from_column_slice(3, 1, &[2.0, 2.0, 2.0]);
        let pred = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(matches!(
            reconstruction_score(&pred, &actual),
            Err(Error::ZeroVariance { column: 0 })
        ));
    }
}
