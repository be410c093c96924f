//! Linear matter power spectrum and the top-hat variance `sigma(M)`.
//!
//! The spectrum is `P(k) = A k^ns T(k)^2` with the BBKS transfer function
//! and a baryon-corrected shape parameter. The amplitude `A` is fixed by
//! requiring `sigma(8/h Mpc) = sigma8`.

use rayon::prelude::*;

use crate::background::CosmologyParams;
use crate::error::{Error, Result};
use crate::numerics::{integrate, NumericsError, Table1D, ToleranceSpec};
use crate::real::Real;

/// Default number of points in a [`SigmaTable`].
pub const SIGMA_TABLE_POINTS: usize = 512;
/// Default `log10(M / M_sun)` span of a [`SigmaTable`].
pub const SIGMA_TABLE_LOG10_RANGE: (f64, f64) = (4.0, 18.0);

// Integration limits in x = kR for the variance integral.
const X_MIN: f64 = 1e-4;
const X_MAX: f64 = 500.0;
const SLOPE_STEP: f64 = 1e-4;

/// Transfer function used by a [`PowerSpectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransferModel {
    /// Bardeen-Bond-Kaiser-Szalay fit.
    #[default]
    Bbks,
    /// `T(k) = 1`, a pure power law. Useful for scale-free checks.
    Unity,
}

/// Spectral shape and normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig<T> {
    pub ns: T,
    pub sigma8: T,
    /// Shape parameter `Gamma`.
    pub gamma: T,
    /// Amplitude `A` of `P(k) = A k^ns T^2`, Mpc^(3+ns).
    pub amplitude: T,
}

/// Top-hat window in Fourier space, `3 (sin x - x cos x) / x^3`.
pub fn top_hat_window<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-3) {
        let x2 = x * x;
        T::one() - x2 / T::lit(10.0) + x2 * x2 / T::lit(280.0)
    } else {
        T::lit(3.0) * (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// `Gamma = omega_m h exp(-omega_b (1 + sqrt(2h)/omega_m))`.
pub fn shape_parameter<T: Real>(params: &CosmologyParams<T>) -> T {
    let correction = T::one() + (T::lit(2.0) * params.h).sqrt() / params.omega_m;
    params.omega_m * params.h * (-params.omega_b * correction).exp()
}

/// Normalised linear power spectrum at `z = 0`.
#[derive(Debug, Clone)]
pub struct PowerSpectrum<T> {
    params: CosmologyParams<T>,
    config: SpectrumConfig<T>,
    transfer: TransferModel,
    tol: ToleranceSpec<T>,
}

impl<T: Real> PowerSpectrum<T> {
    /// BBKS spectrum normalised to `params.sigma8`.
    pub fn new(params: CosmologyParams<T>, tol: ToleranceSpec<T>) -> Result<Self> {
        Self::with_transfer(params, TransferModel::Bbks, tol)
    }

    pub fn with_transfer(params: CosmologyParams<T>, transfer: TransferModel, tol: ToleranceSpec<T>) -> Result<Self> {
        if !(params.sigma8 > T::zero()) {
            return Err(Error::InvalidParam {
                key: "sigma8",
                value: params.sigma8.as_f64(),
                expected: "sigma8 > 0".into(),
            });
        }
        tol.validate()?;
        let spectrum = Self {
            params,
            config: SpectrumConfig {
                ns: params.ns,
                sigma8: params.sigma8,
                gamma: shape_parameter(&params),
                amplitude: T::one(),
            },
            transfer,
            tol,
        };
        spectrum.renormalized()
    }

    /// Recomputes the amplitude so that `sigma(8/h Mpc) = sigma8`.
    pub fn renormalized(&self) -> Result<Self> {
        let current = self.sigma_of_r(self.r8())?;
        let ratio = self.config.sigma8 / current;
        let mut next = self.clone();
        next.config.amplitude = self.config.amplitude * ratio * ratio;
        Ok(next)
    }

    pub fn config(&self) -> &SpectrumConfig<T> {
        &self.config
    }

    pub fn params(&self) -> &CosmologyParams<T> {
        &self.params
    }

    pub fn transfer_model(&self) -> TransferModel {
        self.transfer
    }

    pub fn tolerance(&self) -> &ToleranceSpec<T> {
        &self.tol
    }

    /// `8/h` Mpc.
    pub fn r8(&self) -> T {
        T::lit(8.0) / self.params.h
    }

    fn transfer_unchecked(&self, k: T) -> T {
        match self.transfer {
            TransferModel::Unity => T::one(),
            TransferModel::Bbks => {
                let q = k / (self.config.gamma * self.params.h);
                let a = T::lit(2.34) * q;
                let lead = if a < T::lit(1e-8) {
                    T::one() - a / T::lit(2.0)
                } else {
                    (T::one() + a).ln() / a
                };
                let poly = T::one()
                    + T::lit(3.89) * q
                    + (T::lit(16.1) * q).powi(2)
                    + (T::lit(5.46) * q).powi(3)
                    + (T::lit(6.71) * q).powi(4);
                lead * poly.powf(T::lit(-0.25))
            }
        }
    }

    /// Transfer function at wavenumber `k` (Mpc^-1).
    pub fn transfer(&self, k: T) -> Result<T> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::domain("k", k.as_f64(), "k > 0"));
        }
        Ok(self.transfer_unchecked(k))
    }

    /// Linear power spectrum `P(k)` at `z = 0`, Mpc^3.
    pub fn power(&self, k: T) -> Result<T> {
        let t = self.transfer(k)?;
        Ok(self.config.amplitude * k.powf(self.config.ns) * t * t)
    }

    /// Top-hat variance at radius `r` (Mpc), `z = 0`.
    pub fn sigma_of_r(&self, r: T) -> Result<T> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::domain("R", r.as_f64(), "R > 0"));
        }
        let ns = self.config.ns;
        let kernel = |ln_x: T| {
            let x = ln_x.exp();
            let k = x / r;
            let t = self.transfer_unchecked(k);
            let w = top_hat_window(x);
            k.powi(3) * k.powf(ns) * t * t * w * w
        };
        let integral = integrate(kernel, T::lit(X_MIN).ln(), T::lit(X_MAX).ln(), &self.tol)?;
        let two_pi2 = T::lit(2.0) * T::PI() * T::PI();
        Ok((self.config.amplitude * integral / two_pi2).sqrt())
    }

    /// Lagrangian radius (Mpc) enclosing mass `m` (M_sun) at mean density.
    pub fn radius_of_mass(&self, m: T) -> T {
        let rho = self.params.mean_matter_density0();
        (T::lit(3.0) * m / (T::lit(4.0) * T::PI() * rho)).cbrt()
    }

    pub fn mass_of_radius(&self, r: T) -> T {
        T::lit(4.0) * T::PI() / T::lit(3.0) * self.params.mean_matter_density0() * r * r * r
    }

    /// `sigma(M)` at `z = 0` by direct quadrature.
    pub fn sigma_of_m(&self, m: T) -> Result<T> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::domain("M", m.as_f64(), "M > 0"));
        }
        self.sigma_of_r(self.radius_of_mass(m))
    }

    /// Tabulates `sigma(M)` on `points` log-spaced masses over
    /// `[10^log10_min, 10^log10_max]` M_sun.
    pub fn sigma_table(&self, points: usize, log10_min: T, log10_max: T) -> Result<SigmaTable<T>> {
        if points < 2 || !(log10_min < log10_max) {
            return Err(Error::domain(
                "log10 mass range",
                log10_min.as_f64(),
                format!("at least 2 points with log10_min < log10_max ({})", log10_max.as_f64()),
            ));
        }
        let last = T::from_usize(points - 1).unwrap();
        let log10_masses: Vec<T> = (0..points)
            .map(|i| {
                if i == points - 1 {
                    log10_max
                } else {
                    log10_min + (log10_max - log10_min) * T::from_usize(i).unwrap() / last
                }
            })
            .collect();
        let ten = T::lit(10.0);
        let sigmas = log10_masses
            .par_iter()
            .map(|&lm| self.sigma_of_m(ten.powf(lm)))
            .collect::<Result<Vec<T>>>()?;
        SigmaTable::from_samples(log10_masses, sigmas)
    }

    /// Table over the default 512-point `[10^4, 10^18]` M_sun grid.
    pub fn default_sigma_table(&self) -> Result<SigmaTable<T>> {
        let (lo, hi) = SIGMA_TABLE_LOG10_RANGE;
        self.sigma_table(SIGMA_TABLE_POINTS, T::lit(lo), T::lit(hi))
    }
}

/// Tabulated `sigma(M)` at `z = 0` with its logarithmic slope.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTable<T> {
    pub log10_masses: Vec<T>,
    pub sigmas: Vec<T>,
    pub dln_sigma_dln_m: Vec<T>,
    // ln sigma against ln M
    interp: Table1D<T>,
}

impl<T: Real> SigmaTable<T> {
    pub fn from_samples(log10_masses: Vec<T>, sigmas: Vec<T>) -> Result<Self> {
        if sigmas.iter().any(|s| !(*s > T::zero())) {
            return Err(NumericsError::InvalidTable("sigma must be positive".into()).into());
        }
        if sigmas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(NumericsError::InvalidTable("sigma must decrease with mass".into()).into());
        }
        let ln10 = T::LN_10();
        let interp = Table1D::new(
            log10_masses.iter().map(|&l| l * ln10).collect(),
            sigmas.iter().map(|s| s.ln()).collect(),
        )?;
        let mut table = Self {
            log10_masses,
            sigmas,
            dln_sigma_dln_m: Vec::new(),
            interp,
        };
        table.dln_sigma_dln_m = table
            .interp
            .xs()
            .iter()
            .map(|&ln_m| table.slope_at_ln_m(ln_m))
            .collect();
        Ok(table)
    }

    /// Mass range covered, M_sun.
    pub fn mass_range(&self) -> (T, T) {
        let (lo, hi) = self.interp.x_range();
        (lo.exp(), hi.exp())
    }

    fn ln_m(&self, m: T) -> Result<T> {
        let (lo, hi) = self.interp.x_range();
        if !(m > T::zero()) {
            return Err(Error::domain("M", m.as_f64(), "M > 0"));
        }
        let mut ln_m = m.ln();
        // tolerate exp/ln round-off at the grid edges
        let slack = T::epsilon() * T::lit(8.0) * hi.abs().max(lo.abs());
        if ln_m < lo && lo - ln_m <= slack {
            ln_m = lo;
        }
        if ln_m > hi && ln_m - hi <= slack {
            ln_m = hi;
        }
        if ln_m < lo || ln_m > hi {
            let (m_lo, m_hi) = self.mass_range();
            return Err(Error::domain(
                "M",
                m.as_f64(),
                format!("[{:e}, {:e}] M_sun", m_lo.as_f64(), m_hi.as_f64()),
            ));
        }
        Ok(ln_m)
    }

    /// Interpolated `sigma(M)`.
    pub fn sigma(&self, m: T) -> Result<T> {
        let ln_m = self.ln_m(m)?;
        Ok(self.interp.eval(ln_m)?.exp())
    }

    fn slope_at_ln_m(&self, ln_m: T) -> T {
        let (lo, hi) = self.interp.x_range();
        let step = T::lit(SLOPE_STEP);
        let up = (ln_m + (T::one() + step).ln()).min(hi);
        let down = (ln_m + (T::one() - step).ln()).max(lo);
        let f_up = self.interp.eval(up).expect("within grid");
        let f_down = self.interp.eval(down).expect("within grid");
        (f_up - f_down) / (up - down)
    }

    /// `d ln sigma / d ln M`: central difference with relative mass step
    /// `1e-4` on the interpolant, one-sided at the grid edges.
    pub fn dln_sigma_dln_m(&self, m: T) -> Result<T> {
        let ln_m = self.ln_m(m)?;
        Ok(self.slope_at_ln_m(ln_m))
    }

    /// `sigma` and `d ln sigma / d ln M` at once.
    pub fn sigma_and_slope(&self, m: T) -> Result<(T, T)> {
        let ln_m = self.ln_m(m)?;
        Ok((self.interp.eval(ln_m)?.exp(), self.slope_at_ln_m(ln_m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> PowerSpectrum<f64> {
        PowerSpectrum::new(CosmologyParams::default(), ToleranceSpec::default()).unwrap()
    }

    #[test]
    fn window_limits() {
        assert_eq!(top_hat_window(0.0f64), 1.0);
        let x = 2e-3f64;
        let direct = 3.0 * (x.sin() - x * x.cos()) / x.powi(3);
        assert!((top_hat_window(x) - (1.0 - x * x / 10.0)).abs() < 1e-9);
        assert!((top_hat_window(1e-3 + 1e-12) - direct).abs() < 1e-6);
        assert!((top_hat_window(std::f64::consts::PI) - 3.0 / std::f64::consts::PI.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn shape_parameter_arithmetic() {
        let p = CosmologyParams::<f64>::default();
        let oracle = 0.24 * 0.73 * (-0.04f64 * (1.0 + 1.46f64.sqrt() / 0.24)).exp();
        assert!((shape_parameter(&p) - oracle).abs() < 1e-15);
        assert!((oracle - 0.137_626_580).abs() < 1e-8);
    }

    #[test]
    fn transfer_limits_and_monotonicity() {
        let ps = fig2();
        assert!((ps.transfer(1e-6).unwrap() - 1.0).abs() < 1e-4);
        let mut prev = f64::INFINITY;
        for i in 0..=600 {
            let k = 10f64.powf(-4.0 + 6.0 * i as f64 / 600.0);
            let t = ps.transfer(k).unwrap();
            assert!(t < prev);
            prev = t;
        }
        assert!(ps.transfer(0.0).is_err());
        assert!(ps.transfer(-1.0).is_err());
    }

    #[test]
    fn normalization() {
        let ps = fig2();
        let s8 = ps.sigma_of_r(ps.r8()).unwrap();
        assert!((s8 / 0.76 - 1.0).abs() < 1e-6);
        let m8 = ps.mass_of_radius(ps.r8());
        assert!((ps.sigma_of_m(m8).unwrap() / 0.76 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn renormalization_is_idempotent() {
        let ps = fig2();
        let again = ps.renormalized().unwrap();
        let a0 = ps.config().amplitude;
        let a1 = again.config().amplitude;
        assert!(((a1 - a0) / a0).abs() < 1e-12);
    }

    #[test]
    fn sigma_decreases_with_scale() {
        let ps = fig2();
        let s: Vec<f64> = [1.0, 10.0, 100.0].iter().map(|&r| ps.sigma_of_r(r).unwrap()).collect();
        assert!(s[0] > s[1] && s[1] > s[2]);
        let m: Vec<f64> = [1e6, 1e12, 1e15].iter().map(|&m| ps.sigma_of_m(m).unwrap()).collect();
        assert!(m[0] > m[1] && m[1] > m[2]);
        assert!(ps.sigma_of_r(0.0).is_err());
        assert!(ps.sigma_of_m(-1.0).is_err());
    }

    #[test]
    fn table_slope_negative_and_range_checked() {
        let ps = fig2();
        let table = ps.sigma_table(64, 4.0, 18.0).unwrap();
        assert!(table.dln_sigma_dln_m.iter().all(|&s| s < 0.0));
        assert!(table.sigmas.windows(2).all(|w| w[1] < w[0]));
        assert!(table.sigma(1e3).is_err());
        assert!(table.dln_sigma_dln_m(1e19).is_err());
        assert!(table.sigma(1e18).is_ok());
        assert!(table.sigma(1e4).is_ok());
    }

    #[test]
    fn table_requires_decreasing_sigma() {
        assert!(SigmaTable::from_samples(vec![1.0, 2.0], vec![1.0, 2.0]).is_err());
        assert!(SigmaTable::from_samples(vec![1.0, 2.0], vec![1.0, -2.0]).is_err());
    }
}
