//! Zero replacement for rounded zeros: a recorded zero stands for a small
//! unobserved positive value, so it is replaced by a value below a per-part
//! detection limit before any log-ratio computation.
//!
//! Two methods are provided. [`em_impute`] treats additive log-ratio
//! coordinates (reference = a structurally never-zero part) as jointly
//! normal and runs expectation-maximization with the censored coordinates
//! replaced by conditional means of normals truncated above at
//! log(DL_j / reference); [`multiplicative_replace`] is the simple fallback
//! that writes `delta_fraction * DL_j` into every zero cell.
//!
//! Both methods leave every originally positive cell bit-identical and are
//! fully deterministic.

use alloc::format;
use alloc::vec::Vec;

use crate::error::CodaError;
use crate::math;

/// Per-part zero counts and fractions over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPattern {
    pub counts: Vec<usize>,
    pub fractions: Vec<f64>,
    pub rows: usize,
}

impl ZeroPattern {
    pub fn total_zeros(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Per-part positive detection limits DL_j and the percentile that produced
/// them. DL_j bounds imputed values from above, in the units of part j.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionLimits {
    pub limits: Vec<f64>,
    pub percentile: f64,
}

/// Convergence report of one EM run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmReport {
    pub iterations: usize,
    pub converged: bool,
    pub final_delta: f64,
    /// Relative parameter-change norm after each iteration.
    pub delta_history: Vec<f64>,
    pub imputed_cells: usize,
}

/// Imputed rows plus the convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct EmResult {
    pub rows: Vec<Vec<f64>>,
    pub report: EmReport,
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, CodaError> {
    let first = rows
        .first()
        .ok_or_else(|| CodaError::EmptyInput("no rows".into()))?;
    let d = first.len();
    if d < 2 {
        return Err(CodaError::InvalidParameter(format!(
            "rows need at least 2 parts, got {d}"
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(CodaError::DimensionMismatch(format!(
                "row {i} has {} parts, expected {d}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(CodaError::InvalidParameter(format!(
                    "row {i} part {j} is {v}"
                )));
            }
            if v < 0.0 {
                return Err(CodaError::NegativeValue(format!(
                    "row {i} part {j} is {v}; accounting parts must be >= 0"
                )));
            }
        }
    }
    Ok(d)
}

/// Exact zero counts per part. Negative or non-finite entries are an error.
pub fn zero_pattern(rows: &[Vec<f64>]) -> Result<ZeroPattern, CodaError> {
    let d = check_rows(rows)?;
    let mut counts = alloc::vec![0usize; d];
    for row in rows {
        for (c, &v) in counts.iter_mut().zip(row) {
            if v == 0.0 {
                *c += 1;
            }
        }
    }
    let n = rows.len();
    let fractions = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(ZeroPattern {
        counts,
        fractions,
        rows: n,
    })
}

/// DL_j = the given percentile (linear interpolation between order
/// statistics) of the non-zero values of part j. A part with no non-zero
/// values cannot be imputed and is an error; parts without zeros still get a
/// DL, which simply goes unused.
pub fn detection_limits(rows: &[Vec<f64>], percentile: f64) -> Result<DetectionLimits, CodaError> {
    let d = check_rows(rows)?;
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(CodaError::InvalidParameter(format!(
            "percentile must be in (0, 100), got {percentile}"
        )));
    }
    let mut limits = Vec::with_capacity(d);
    for j in 0..d {
        let mut nonzero: Vec<f64> = rows.iter().map(|r| r[j]).filter(|&v| v > 0.0).collect();
        if nonzero.is_empty() {
            return Err(CodaError::UnimputablePart {
                part: j,
                rows: rows.len(),
            });
        }
        nonzero.sort_unstable_by(f64::total_cmp);
        limits.push(math::percentile_sorted(&nonzero, percentile));
    }
    Ok(DetectionLimits { limits, percentile })
}

/// Sets every zero cell to `delta_fraction * DL_j` and leaves everything
/// else untouched. Compositions here are unclosed, so no rescaling of the
/// other parts is needed.
pub fn multiplicative_replace(
    rows: &[Vec<f64>],
    dl: &DetectionLimits,
    delta_fraction: f64,
) -> Result<Vec<Vec<f64>>, CodaError> {
    let d = check_rows(rows)?;
    if dl.limits.len() != d {
        return Err(CodaError::DimensionMismatch(format!(
            "{} detection limits for {d} parts",
            dl.limits.len()
        )));
    }
    if !(delta_fraction > 0.0 && delta_fraction < 1.0) {
        return Err(CodaError::InvalidParameter(format!(
            "delta_fraction must be in (0, 1), got {delta_fraction}"
        )));
    }
    Ok(rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| if v == 0.0 { delta_fraction * dl.limits[j] } else { v })
                .collect()
        })
        .collect())
}

/// Default zero placement used by [`multiplicative_replace`] callers and as
/// the EM starting fill.
pub const DEFAULT_DELTA_FRACTION: f64 = 0.65;

/// Standardized truncation bounds are clamped here to keep the Mills ratio
/// well-conditioned in extreme tails.
const BOUND_CLAMP: f64 = 8.0;

/// Mean of N(mean, sd^2) truncated above at `bound`. The bound clamp keeps
/// the result inside the truncation region even when the standardized bound
/// was clipped.
fn truncated_normal_mean(mean: f64, sd: f64, bound: f64) -> f64 {
    if sd <= 0.0 || !sd.is_finite() {
        return if mean < bound { mean } else { bound };
    }
    let alpha = ((bound - mean) / sd).clamp(-BOUND_CLAMP, BOUND_CLAMP);
    let mills = math::normal_pdf(alpha) / math::normal_cdf(alpha);
    (mean - sd * mills).min(bound)
}

/// Cholesky factor of a symmetric positive-definite matrix (lower
/// triangular), with escalating diagonal jitter if the factorization stalls.
fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, CodaError> {
    let n = a.len();
    let mean_diag = (0..n).map(|i| a[i][i]).sum::<f64>() / n.max(1) as f64;
    let mut jitter = 0.0;
    for _ in 0..4 {
        if let Some(l) = try_cholesky(a, jitter) {
            return Ok(l);
        }
        jitter = if jitter == 0.0 {
            1e-10 * mean_diag.max(1e-300)
        } else {
            jitter * 100.0
        };
    }
    Err(CodaError::Numerical(
        "covariance submatrix is not positive definite".into(),
    ))
}

fn try_cholesky(a: &[Vec<f64>], jitter: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = alloc::vec![alloc::vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j] + if i == j { jitter } else { 0.0 };
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][j] = math::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solves A x = b given the Cholesky factor L of A.
fn chol_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = alloc::vec![0.0f64; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = alloc::vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    x
}

struct CensoredCell {
    row: usize,
    /// Coordinate index in the (d-1)-dimensional log-ratio space.
    coord: usize,
    /// Upper truncation bound in coordinate space: log(DL_j / reference).
    bound: f64,
}

/// Censored-EM zero replacement in log-ratio coordinates.
///
/// Coordinates are log(x_j / x_ref) for every part j != `reference`; a zero
/// in part j makes that coordinate left-censored at log(DL_j / x_ref). The
/// E-step fills each censored coordinate with the conditional mean of a
/// normal truncated above at its bound (conditioning on the row's observed
/// coordinates); the M-step re-estimates the mean vector and covariance.
/// Convergence is declared when the relative change of the stacked
/// (mean, covariance) parameters drops below `tol`.
///
/// On convergence failure the best-effort rows are still returned with
/// `report.converged == false`; the caller chooses a fallback.
pub fn em_impute(
    rows: &[Vec<f64>],
    dl: &DetectionLimits,
    reference: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EmResult, CodaError> {
    let d = check_rows(rows)?;
    if dl.limits.len() != d {
        return Err(CodaError::DimensionMismatch(format!(
            "{} detection limits for {d} parts",
            dl.limits.len()
        )));
    }
    if reference >= d {
        return Err(CodaError::InvalidParameter(format!(
            "reference part {reference} out of range for {d} parts"
        )));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(CodaError::InvalidParameter(format!(
            "tol must be > 0 and max_iter >= 1 (got tol={tol}, max_iter={max_iter})"
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row[reference] <= 0.0 {
            return Err(CodaError::InvalidParameter(format!(
                "row {i}: reference part {reference} is zero; it must never be zero"
            )));
        }
    }

    // Map parts to log-ratio coordinates, skipping the reference.
    let coord_parts: Vec<usize> = (0..d).filter(|&j| j != reference).collect();
    let p = coord_parts.len();
    let n = rows.len();

    let mut censored: Vec<CensoredCell> = Vec::new();
    let mut y = alloc::vec![alloc::vec![0.0f64; p]; n];
    for (i, row) in rows.iter().enumerate() {
        let log_ref = math::ln(row[reference]);
        for (c, &j) in coord_parts.iter().enumerate() {
            if row[j] > 0.0 {
                y[i][c] = math::ln(row[j]) - log_ref;
            } else {
                let bound = math::ln(dl.limits[j]) - log_ref;
                // start below the bound, mirroring the multiplicative fill
                y[i][c] = bound + math::ln(DEFAULT_DELTA_FRACTION);
                censored.push(CensoredCell {
                    row: i,
                    coord: c,
                    bound,
                });
            }
        }
    }

    if censored.is_empty() {
        return Ok(EmResult {
            rows: rows.to_vec(),
            report: EmReport {
                iterations: 0,
                converged: true,
                final_delta: 0.0,
                delta_history: Vec::new(),
                imputed_cells: 0,
            },
        });
    }

    let mut params = estimate_params(&y);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        e_step(&mut y, &censored, &params)?;
        let new_params = estimate_params(&y);
        let delta = relative_change(&params, &new_params);
        history.push(delta);
        params = new_params;
        if delta < tol {
            converged = true;
            break;
        }
    }
    let final_delta = *history.last().unwrap();

    // Back-transform the censored coordinates; observed cells are copied
    // from the input so they stay bit-identical.
    let mut out = rows.to_vec();
    for cell in &censored {
        let j = coord_parts[cell.coord];
        let y_val = y[cell.row][cell.coord].min(cell.bound);
        out[cell.row][j] = math::exp(y_val) * rows[cell.row][reference];
        // containment: (0, DL_j]
        out[cell.row][j] = out[cell.row][j].min(dl.limits[j]);
    }

    Ok(EmResult {
        rows: out,
        report: EmReport {
            iterations,
            converged,
            final_delta,
            delta_history: history,
            imputed_cells: censored.len(),
        },
    })
}

struct Params {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

fn estimate_params(y: &[Vec<f64>]) -> Params {
    let n = y.len();
    let p = y[0].len();
    let mut mean = alloc::vec![0.0f64; p];
    for row in y {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = alloc::vec![alloc::vec![0.0f64; p]; p];
    for row in y {
        for a in 0..p {
            let da = row[a] - mean[a];
            for b in 0..=a {
                cov[a][b] += da * (row[b] - mean[b]);
            }
        }
    }
    for a in 0..p {
        for b in 0..=a {
            cov[a][b] /= n as f64;
            cov[b][a] = cov[a][b];
        }
    }
    Params { mean, cov }
}

fn relative_change(old: &Params, new: &Params) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in old.mean.iter().zip(&new.mean) {
        num += (a - b) * (a - b);
        den += a * a;
    }
    for (ra, rb) in old.cov.iter().zip(&new.cov) {
        for (a, b) in ra.iter().zip(rb) {
            num += (a - b) * (a - b);
            den += a * a;
        }
    }
    math::sqrt(num) / (math::sqrt(den) + 1e-12)
}

fn e_step(y: &mut [Vec<f64>], censored: &[CensoredCell], params: &Params) -> Result<(), CodaError> {
    let p = params.mean.len();
    // group censored cells per row so the observed-block factorization is
    // done once per row
    let mut idx = 0;
    while idx < censored.len() {
        let row = censored[idx].row;
        let mut end = idx;
        while end < censored.len() && censored[end].row == row {
            end += 1;
        }
        let cens_coords: Vec<usize> = censored[idx..end].iter().map(|c| c.coord).collect();
        let obs_coords: Vec<usize> = (0..p).filter(|c| !cens_coords.contains(c)).collect();

        let (chol, resid) = if obs_coords.is_empty() {
            (None, Vec::new())
        } else {
            let m = obs_coords.len();
            let mut sub = alloc::vec![alloc::vec![0.0f64; m]; m];
            for (a, &oa) in obs_coords.iter().enumerate() {
                for (b, &ob) in obs_coords.iter().enumerate() {
                    sub[a][b] = params.cov[oa][ob];
                }
            }
            let l = cholesky(&sub)?;
            let r: Vec<f64> = obs_coords
                .iter()
                .map(|&o| y[row][o] - params.mean[o])
                .collect();
            (Some(l), r)
        };

        for cell in &censored[idx..end] {
            let c = cell.coord;
            let (cond_mean, cond_var) = match &chol {
                None => (params.mean[c], params.cov[c][c]),
                Some(l) => {
                    let cross: Vec<f64> = obs_coords.iter().map(|&o| params.cov[c][o]).collect();
                    let a = chol_solve(l, &resid);
                    let b = chol_solve(l, &cross);
                    let mean = params.mean[c]
                        + cross.iter().zip(&a).map(|(x, w)| x * w).sum::<f64>();
                    let var = params.cov[c][c]
                        - cross.iter().zip(&b).map(|(x, w)| x * w).sum::<f64>();
                    (mean, var)
                }
            };
            let sd = if cond_var > 0.0 { math::sqrt(cond_var) } else { 0.0 };
            y[cell.row][c] = truncated_normal_mean(cond_mean, sd, cell.bound);
        }
        idx = end;
    }
    Ok(())
}
