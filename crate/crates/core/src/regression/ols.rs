use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Regression data: named regressor columns and a dependent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Design {
    pub fn new(names: Vec<String>, x: DMatrix<f64>, y: DVector<f64>) -> Self {
        debug_assert_eq!(names.len(), x.ncols());
        debug_assert_eq!(x.nrows(), y.len());
        Design { names, x, y }
    }

    /// Regression of `y` on a constant and the given columns.
    pub fn with_constant(y: &[f64], columns: &[(&str, &[f64])]) -> Result<Self> {
        let n = y.len();
        if columns.iter().any(|(_, c)| c.len() != n) {
            return Err(Error::invalid(
                "regressor length differs from dependent length",
            ));
        }
        let mut x = DMatrix::from_element(n, columns.len() + 1, 1.0);
        for (j, (_, c)) in columns.iter().enumerate() {
            x.set_column(j + 1, &DVector::from_column_slice(c));
        }
        let mut names = vec!["const".to_string()];
        names.extend(columns.iter().map(|(n, _)| n.to_string()));
        Ok(Design::new(names, x, DVector::from_column_slice(y)))
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }
}

/// Newey–West automatic bandwidth, `floor(4 (T/100)^{2/9})`.
pub fn default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Ordinary least squares fit with plain and HAC covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    names: Vec<String>,
    x: DMatrix<f64>,
    y: DVector<f64>,
    coef: DVector<f64>,
    residuals: DVector<f64>,
    xtx_inv: DMatrix<f64>,
    cov: DMatrix<f64>,
    cov_hac: DMatrix<f64>,
    bandwidth: usize,
    ssr: f64,
    tss: f64,
    has_constant: bool,
}

/// OLS with the default Newey–West bandwidth.
pub fn ols(design: &Design) -> Result<OlsFit> {
    ols_with_bandwidth(design, default_bandwidth(design.n()))
}

/// Solves the least-squares problem by Householder QR. A column whose
/// component orthogonal to the preceding columns is negligible is reported as
/// collinear.
pub fn ols_with_bandwidth(design: &Design, bandwidth: usize) -> Result<OlsFit> {
    let (n, k) = (design.n(), design.k());
    if k == 0 {
        return Err(Error::invalid("regression without regressors"));
    }
    if n <= k {
        return Err(Error::invalid(format!(
            "{n} observations for {k} regressors"
        )));
    }
    if design
        .x
        .iter()
        .chain(design.y.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::invalid("non-finite value in regression data"));
    }
    let qr = design.x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = design.x.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() <= 1e-10 * norm {
            let earlier = design.names[..j].join(", ");
            return Err(Error::Numeric(format!(
                "design matrix is rank deficient: column `{}` is collinear with {}",
                design.names[j],
                if earlier.is_empty() {
                    "nothing (all zero)".to_string()
                } else {
                    format!("[{earlier}]")
                }
            )));
        }
    }
    let qty = qr.q().transpose() * &design.y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::numeric("triangular solve failed"))?;
    let residuals = &design.y - &design.x * &coef;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::numeric("triangular inverse failed"))?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let ssr = residuals.norm_squared();
    let has_constant = (0..k).any(|j| {
        let c = design.x.column(j);
        c[0] != 0.0 && c.iter().all(|&v| v == c[0])
    });
    let tss = if has_constant {
        let mean = design.y.mean();
        design.y.iter().map(|v| (v - mean).powi(2)).sum()
    } else {
        design.y.norm_squared()
    };
    let sigma2 = ssr / (n - k) as f64;
    let cov = &xtx_inv * sigma2;
    let cov_hac = hac_sandwich(&design.x, &residuals, &xtx_inv, bandwidth);
    Ok(OlsFit {
        names: design.names.clone(),
        x: design.x.clone(),
        y: design.y.clone(),
        coef,
        residuals,
        xtx_inv,
        cov,
        cov_hac,
        bandwidth,
        ssr,
        tss,
        has_constant,
    })
}

/// `(X'X)⁻¹ S (X'X)⁻¹` with the Bartlett-weighted long-run covariance `S` of
/// the moment contributions `x_t e_t`.
fn hac_sandwich(
    x: &DMatrix<f64>,
    e: &DVector<f64>,
    xtx_inv: &DMatrix<f64>,
    bandwidth: usize,
) -> DMatrix<f64> {
    let n = x.nrows();
    let mut u = x.clone();
    for (t, mut row) in u.row_iter_mut().enumerate() {
        row *= e[t];
    }
    let mut s = u.transpose() * &u;
    for lag in 1..=bandwidth.min(n.saturating_sub(1)) {
        let w = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
        let gamma = u.rows(lag, n - lag).transpose() * u.rows(0, n - lag);
        s += (&gamma + gamma.transpose()) * w;
    }
    let cov = xtx_inv * s * xtx_inv;
    // symmetrize against rounding
    (&cov + cov.transpose()) * 0.5
}

impl OlsFit {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coef
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.coef[i])
    }

    pub fn residuals(&self) -> &DVector<f64> {
        &self.residuals
    }

    pub fn design_matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn dependent(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn xtx_inv(&self) -> &DMatrix<f64> {
        &self.xtx_inv
    }

    /// Homoskedastic covariance `σ̂² (X'X)⁻¹`.
    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// HAC covariance at the bandwidth chosen when fitting.
    pub fn cov_hac(&self) -> &DMatrix<f64> {
        &self.cov_hac
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// HAC covariance at an arbitrary bandwidth; 0 gives White's estimator.
    pub fn hac_cov(&self, bandwidth: usize) -> DMatrix<f64> {
        hac_sandwich(&self.x, &self.residuals, &self.xtx_inv, bandwidth)
    }

    pub fn std_errors(&self) -> Vec<f64> {
        self.cov
            .diagonal()
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    }

    pub fn hac_std_errors(&self) -> Vec<f64> {
        self.cov_hac
            .diagonal()
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn df_resid(&self) -> usize {
        self.n() - self.k()
    }

    pub fn ssr(&self) -> f64 {
        self.ssr
    }

    pub fn has_constant(&self) -> bool {
        self.has_constant
    }

    /// Centered R² when the model has a constant, uncentered otherwise.
    /// A dependent variable without variation gives 0.
    pub fn r_squared(&self) -> f64 {
        if self.tss > 0.0 {
            1.0 - self.ssr / self.tss
        } else {
            0.0
        }
    }

    pub fn adj_r_squared(&self) -> f64 {
        let n = self.n() as f64;
        let k = self.k() as f64;
        let dof_model = if self.has_constant { 1.0 } else { 0.0 };
        1.0 - (1.0 - self.r_squared()) * (n - dof_model) / (n - k)
    }

    /// Residual sum of squares relative to the variation in `y`.
    pub(crate) fn relative_ssr(&self) -> f64 {
        if self.tss > 0.0 {
            self.ssr / self.tss
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = ols(&Design::with_constant(&y, &[("x", &x)]).unwrap()).unwrap();
        assert!((fit.coefficients()[0] - 2.0).abs() < 1e-10);
        assert!((fit.coefficients()[1] - 3.0).abs() < 1e-10);
        assert!((fit.r_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_two_by_two_normal_equations() {
        let x = [1.0, 2.0, 4.0, 5.0, 7.0, 8.0];
        let y = [2.1, 2.9, 5.2, 5.8, 8.3, 8.7];
        // Closed form: slope = Sxy / Sxx, intercept = ȳ − slope x̄.
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let fit = ols(&Design::with_constant(&y, &[("x", &x)]).unwrap()).unwrap();
        assert!((fit.coefficients()[1] - slope).abs() < 1e-12);
        assert!((fit.coefficients()[0] - (my - slope * mx)).abs() < 1e-12);
        // plain SE of the slope: sqrt(σ² / Sxx)
        let se = (fit.ssr() / (n - 2.0) / sxx).sqrt();
        assert!((fit.std_errors()[1] - se).abs() < 1e-12);
    }

    #[test]
    fn residuals_orthogonal_and_self_regression() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let z: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = x
            .iter()
            .zip(&z)
            .map(|(a, b)| {
                1.0 + 0.5 * a - b + Distribution::<f64>::sample(&StandardNormal, &mut rng)
            })
            .collect();
        let fit = ols(&Design::with_constant(&y, &[("x", &x), ("z", &z)]).unwrap()).unwrap();
        let xe = fit.design_matrix().transpose() * fit.residuals();
        let scale = fit.design_matrix().norm() * fit.residuals().norm();
        assert!(xe.amax() <= 1e-8 * scale);

        let own = ols(&Design::with_constant(&y, &[("y", &y)]).unwrap()).unwrap();
        assert!((own.coefficients()[1] - 1.0).abs() < 1e-10);
        assert!((own.r_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rank_deficiency_names_column() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let y = [1.0, 3.0, 2.0, 5.0, 4.0];
        let err =
            ols(&Design::with_constant(&y, &[("x", &x), ("twice_x", &x2)]).unwrap()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("twice_x") && msg.contains("x"), "{msg}");
        assert!(ols(&Design::with_constant(&y[..2], &[("x", &x[..2])]).unwrap()).is_err());
    }

    #[test]
    fn bandwidth_zero_is_white() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<f64> = (0..50).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|a| a * (1.0 + a.abs()) * Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect();
        let fit = ols(&Design::with_constant(&y, &[("x", &x)]).unwrap()).unwrap();
        // White HC0 assembled element by element.
        let xm = fit.design_matrix();
        let mut meat = DMatrix::<f64>::zeros(2, 2);
        for t in 0..50 {
            let row = xm.row(t).transpose();
            meat += &row * row.transpose() * fit.residuals()[t].powi(2);
        }
        let white = fit.xtx_inv() * meat * fit.xtx_inv();
        assert!((fit.hac_cov(0) - white).amax() < 1e-12);
    }

    #[test]
    fn default_bandwidth_rule() {
        assert_eq!(default_bandwidth(100), 4);
        assert_eq!(default_bandwidth(300), 5);
        assert_eq!(default_bandwidth(10), 2);
    }
}
