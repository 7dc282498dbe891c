//! Python bindings for `svst_core`.
//!
//! Matrix classes are passed as `class_="mat"` (with `beta`) or `class_="sym"`.
//! Matrices are plain lists of rows.

use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use svst_core::{ClassKind, Error, FiniteProblem, MatrixClass, SimConfig};

fn to_py(e: Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn class_of(class: &str, beta: f64) -> PyResult<MatrixClass> {
    match class {
        "mat" => MatrixClass::mat(beta).map_err(to_py),
        "sym" => Ok(MatrixClass::Sym),
        other => Err(PyValueError::new_err(format!(
            "class must be 'mat' or 'sym', got {other:?}"
        ))),
    }
}

fn problem(r: usize, m: Option<usize>, n: usize, class: &str) -> PyResult<FiniteProblem> {
    let kind = match class {
        "mat" => ClassKind::Mat,
        "sym" => ClassKind::Sym,
        other => {
            return Err(PyValueError::new_err(format!(
                "class must be 'mat' or 'sym', got {other:?}"
            )))
        }
    };
    FiniteProblem::new(r, m.unwrap_or(n), n, kind).map_err(to_py)
}

fn to_matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("matrix rows must have equal length"));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Minimax point on the AMSE curve.
#[pyclass(frozen, get_all, module = "svst_minimax")]
struct AmsePoint {
    rho: f64,
    class_name: String,
    beta: f64,
    gamma: f64,
    lambda_star: f64,
    amse: f64,
    tuning_scale: f64,
    lower_bound: f64,
}

#[pymethods]
impl AmsePoint {
    fn __repr__(&self) -> String {
        format!(
            "AmsePoint(class={}, beta={}, rho={}, lambda_star={}, amse={})",
            self.class_name, self.beta, self.rho, self.lambda_star, self.amse
        )
    }
}

impl From<svst_core::AmsePoint> for AmsePoint {
    fn from(p: svst_core::AmsePoint) -> Self {
        Self {
            rho: p.rho,
            class_name: p.class.name().to_string(),
            beta: p.class.beta(),
            gamma: p.gamma,
            lambda_star: p.lambda_star,
            amse: p.amse,
            tuning_scale: p.tuning_scale,
            lower_bound: p.lower_bound(),
        }
    }
}

#[pyclass(frozen, get_all, module = "svst_minimax")]
struct FiniteMinimax {
    lambda_star: f64,
    mse: f64,
    std_error: f64,
    data_threshold: f64,
    trials: usize,
    seed: u64,
}

#[pymethods]
impl FiniteMinimax {
    fn __repr__(&self) -> String {
        format!(
            "FiniteMinimax(lambda_star={}, mse={}, std_error={})",
            self.lambda_star, self.mse, self.std_error
        )
    }
}

#[pyclass(frozen, get_all, module = "svst_minimax")]
struct SimStats {
    mean: f64,
    std_error: f64,
    trials: usize,
}

#[pymethods]
impl SimStats {
    fn __repr__(&self) -> String {
        format!(
            "SimStats(mean={}, std_error={}, trials={})",
            self.mean, self.std_error, self.trials
        )
    }
}

impl From<svst_core::SimStats> for SimStats {
    fn from(s: svst_core::SimStats) -> Self {
        Self {
            mean: s.mean,
            std_error: s.std_error,
            trials: s.trials,
        }
    }
}

#[pyclass(frozen, get_all, module = "svst_minimax")]
struct SureCheck {
    sure_mean: f64,
    sure_std_error: f64,
    risk_mean: f64,
    risk_std_error: f64,
    discrepancy_z: f64,
    resampled: usize,
}

#[pymethods]
impl SureCheck {
    fn __repr__(&self) -> String {
        format!(
            "SureCheck(sure_mean={}, risk_mean={}, z={})",
            self.sure_mean, self.risk_mean, self.discrepancy_z
        )
    }
}

/// `∫_x^{γ₊} t^k p_γ(t) dt` for `k ∈ {0, 0.5, 1}`.
#[pyfunction]
fn mp_incomplete_moment(x: f64, k: f64, gamma: f64) -> PyResult<f64> {
    let params = svst_core::MpParams::new(gamma).map_err(to_py)?;
    svst_core::mp_incomplete_moment(x, k, &params).map_err(to_py)
}

#[pyfunction]
fn mp_density(t: f64, gamma: f64) -> PyResult<f64> {
    let params = svst_core::MpParams::new(gamma).map_err(to_py)?;
    Ok(svst_core::mp_density(t, &params))
}

#[pyfunction]
fn qc_moment(k: u32, x: f64) -> PyResult<f64> {
    svst_core::qc_moment(k, x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rho, lam, class_="mat", beta=1.0))]
fn worst_case_amse(rho: f64, lam: f64, class_: &str, beta: f64) -> PyResult<f64> {
    svst_core::worst_case_amse(class_of(class_, beta)?, rho, lam).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rho, class_="mat", beta=1.0))]
fn minimax_threshold(rho: f64, class_: &str, beta: f64) -> PyResult<f64> {
    svst_core::minimax_threshold(class_of(class_, beta)?, rho).map_err(to_py)
}

#[pyfunction]
fn minimax_threshold_square(rho: f64, alpha: f64) -> PyResult<f64> {
    svst_core::minimax_threshold_square(rho, alpha).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rho, class_="mat", beta=1.0))]
fn minimax_amse(rho: f64, class_: &str, beta: f64) -> PyResult<AmsePoint> {
    Ok(svst_core::minimax_amse(class_of(class_, beta)?, rho)
        .map_err(to_py)?
        .into())
}

/// Minimax curve over a strictly increasing `rho` grid.
#[pyfunction]
#[pyo3(signature = (rhos, class_="mat", beta=1.0))]
fn tabulate(py: Python<'_>, rhos: Vec<f64>, class_: &str, beta: f64) -> PyResult<Vec<AmsePoint>> {
    let class = class_of(class_, beta)?;
    py.detach(|| {
        rhos.iter()
            .map(|&rho| svst_core::minimax_amse(class, rho))
            .collect::<Result<Vec<_>, _>>()
    })
    .map(|points| points.into_iter().map(Into::into).collect())
    .map_err(to_py)
}

/// `(rho, amse)` pairs of the square-case angle parametrization, increasing in `rho`.
#[pyfunction]
#[pyo3(signature = (thetas, class_="mat"))]
fn parametric_curve(thetas: Vec<f64>, class_: &str) -> PyResult<Vec<(f64, f64)>> {
    let table = svst_core::parametric_curve(class_of(class_, 1.0)?, &thetas).map_err(to_py)?;
    Ok(table.rows.iter().map(|r| (r.rho, r.amse)).collect())
}

#[pyfunction]
#[pyo3(signature = (class_="mat", beta=1.0))]
fn small_rho_slope(class_: &str, beta: f64) -> PyResult<f64> {
    Ok(svst_core::small_rho_slope(class_of(class_, beta)?))
}

#[pyfunction]
#[pyo3(signature = (class_="mat", beta=1.0))]
fn ratio_bound(class_: &str, beta: f64) -> PyResult<f64> {
    Ok(svst_core::ratio_bound(class_of(class_, beta)?))
}

#[pyfunction]
#[pyo3(signature = (rho, class_="mat", beta=1.0))]
fn global_lower_bound(rho: f64, class_: &str, beta: f64) -> PyResult<f64> {
    Ok(svst_core::global_lower_bound(class_of(class_, beta)?, rho))
}

#[pyfunction]
#[pyo3(signature = (lam, r, n, m=None, class_="mat", trials=1000, seed=0))]
#[allow(clippy::too_many_arguments)]
fn finite_n_mse(
    py: Python<'_>,
    lam: f64,
    r: usize,
    n: usize,
    m: Option<usize>,
    class_: &str,
    trials: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let prob = problem(r, m, n, class_)?;
    let out = py
        .detach(|| svst_core::finite_n_mse(lam, &prob, trials, seed))
        .map_err(to_py)?;
    Ok((out.mse, out.std_error))
}

#[pyfunction]
#[pyo3(signature = (r, n, m=None, class_="mat", trials=1000, seed=0))]
fn finite_n_minimax(
    py: Python<'_>,
    r: usize,
    n: usize,
    m: Option<usize>,
    class_: &str,
    trials: usize,
    seed: u64,
) -> PyResult<FiniteMinimax> {
    let prob = problem(r, m, n, class_)?;
    let f = py
        .detach(|| svst_core::finite_n_minimax(&prob, trials, seed))
        .map_err(to_py)?;
    Ok(FiniteMinimax {
        lambda_star: f.lambda_star,
        mse: f.mse,
        std_error: f.std_error,
        data_threshold: f.data_threshold,
        trials: f.trials,
        seed: f.seed,
    })
}

/// SVST of a matrix given as a list of rows.
#[pyfunction]
#[pyo3(signature = (y, lam, class_="mat"))]
fn svst_denoise(y: Vec<Vec<f64>>, lam: f64, class_: &str) -> PyResult<Vec<Vec<f64>>> {
    let y = to_matrix(y)?;
    let class = class_of(class_, 1.0)?;
    Ok(from_matrix(&svst_core::svst_denoise(&y, lam, class).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (y, lam, class_="mat"))]
fn sure(y: Vec<Vec<f64>>, lam: f64, class_: &str) -> PyResult<f64> {
    let y = to_matrix(y)?;
    match class_ {
        "sym" => svst_core::sure_svst_sym(&y, lam),
        _ => {
            class_of(class_, 1.0)?;
            svst_core::sure_svst(&y, lam)
        }
    }
    .map_err(to_py)
}

/// Empirical risk at the rank-`r` spike of strength `mu`; `lam=None` uses the minimax threshold.
#[pyfunction]
#[pyo3(signature = (r, n, m=None, class_="mat", mu=100.0, lam=None, trials=100, seed=0))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo_risk(
    py: Python<'_>,
    r: usize,
    n: usize,
    m: Option<usize>,
    class_: &str,
    mu: f64,
    lam: Option<f64>,
    trials: usize,
    seed: u64,
) -> PyResult<SimStats> {
    let prob = problem(r, m, n, class_)?;
    let lambda = match lam {
        Some(l) => l,
        None => svst_core::cli::minimax_data_threshold(&prob).map_err(to_py)?,
    };
    let config = SimConfig {
        prob,
        mu,
        lambda,
        trials,
        seed,
    };
    Ok(py
        .detach(|| svst_core::monte_carlo_risk(&config))
        .map_err(to_py)?
        .into())
}

#[pyfunction]
#[pyo3(signature = (r, n, lam, m=None, class_="mat", mu=10.0, trials=2000, seed=0))]
#[allow(clippy::too_many_arguments)]
fn sure_vs_empirical(
    py: Python<'_>,
    r: usize,
    n: usize,
    lam: f64,
    m: Option<usize>,
    class_: &str,
    mu: f64,
    trials: usize,
    seed: u64,
) -> PyResult<SureCheck> {
    let config = SimConfig {
        prob: problem(r, m, n, class_)?,
        mu,
        lambda: lam,
        trials,
        seed,
    };
    let c = py.detach(|| svst_core::sure_vs_empirical(&config)).map_err(to_py)?;
    Ok(SureCheck {
        sure_mean: c.sure.mean,
        sure_std_error: c.sure.std_error,
        risk_mean: c.risk.mean,
        risk_std_error: c.risk.std_error,
        discrepancy_z: c.discrepancy_z,
        resampled: c.resampled,
    })
}

#[pymodule]
fn svst_minimax(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<AmsePoint>()?;
    m.add_class::<FiniteMinimax>()?;
    m.add_class::<SimStats>()?;
    m.add_class::<SureCheck>()?;
    m.add_function(wrap_pyfunction!(mp_incomplete_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mp_density, m)?)?;
    m.add_function(wrap_pyfunction!(qc_moment, m)?)?;
    m.add_function(wrap_pyfunction!(worst_case_amse, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_threshold_square, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_amse, m)?)?;
    m.add_function(wrap_pyfunction!(tabulate, m)?)?;
    m.add_function(wrap_pyfunction!(parametric_curve, m)?)?;
    m.add_function(wrap_pyfunction!(small_rho_slope, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_bound, m)?)?;
    m.add_function(wrap_pyfunction!(global_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(finite_n_mse, m)?)?;
    m.add_function(wrap_pyfunction!(finite_n_minimax, m)?)?;
    m.add_function(wrap_pyfunction!(svst_denoise, m)?)?;
    m.add_function(wrap_pyfunction!(sure, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_risk, m)?)?;
    m.add_function(wrap_pyfunction!(sure_vs_empirical, m)?)?;
    Ok(())
}
