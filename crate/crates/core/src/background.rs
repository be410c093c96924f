//! Flat LCDM background: expansion rate, cosmic time, comoving distance
//! and volume, mean densities, linear growth and the collapse threshold.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_to_infinity, Table1D, ToleranceSpec};
use crate::real::Real;

/// Speed of light in km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 2.997_924_58e5;
/// Hubble time `1/H0` in years for `h = 1`.
pub const HUBBLE_TIME_YR: f64 = 9.778_14e9;
/// Critical density today in M_sun Mpc^-3 for `h = 1`.
pub const CRITICAL_DENSITY: f64 = 2.775_366_27e11;
/// Linear overdensity threshold for spherical collapse.
pub const DELTA_C0: f64 = 1.686;
/// Redshift spacing of the epoch table.
pub const EPOCH_TABLE_DZ: f64 = 0.01;

const FLATNESS_TOL: f64 = 1e-8;

/// Cosmological parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmologyParams<T> {
    pub omega_m: T,
    pub omega_b: T,
    pub omega_lambda: T,
    pub h: T,
    pub sigma8: T,
    pub ns: T,
    pub z_max: T,
}

impl<T: Real> Default for CosmologyParams<T> {
    fn default() -> Self {
        Self {
            omega_m: T::lit(0.24),
            omega_b: T::lit(0.04),
            omega_lambda: T::lit(0.76),
            h: T::lit(0.73),
            sigma8: T::lit(0.76),
            ns: T::lit(1.0),
            z_max: T::lit(20.0),
        }
    }
}

impl<T: Real> CosmologyParams<T> {
    /// Einstein-de Sitter test configuration (`omega_m = 1`, no Lambda).
    ///
    /// Does not satisfy [`validate`](Self::validate); use with
    /// [`Background::new_unchecked`].
    pub fn einstein_de_sitter(h: T) -> Self {
        Self {
            omega_m: T::one(),
            omega_b: T::lit(0.04),
            omega_lambda: T::zero(),
            h,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check<T: Real>(key: &'static str, v: T, ok: bool, expected: &str) -> Result<()> {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParam {
                    key,
                    value: v.as_f64(),
                    expected: expected.to_string(),
                })
            }
        }
        let zero = T::zero();
        let one = T::one();
        check(
            "omega_m",
            self.omega_m,
            self.omega_m > zero && self.omega_m < one,
            "0 < omega_m < 1",
        )?;
        check(
            "omega_b",
            self.omega_b,
            self.omega_b > zero && self.omega_b < self.omega_m,
            "0 < omega_b < omega_m",
        )?;
        check(
            "omega_lambda",
            self.omega_lambda,
            self.omega_lambda > zero && self.omega_lambda < one,
            "0 < omega_lambda < 1",
        )?;
        check(
            "h",
            self.h,
            self.h >= T::lit(0.4) && self.h <= T::lit(1.0),
            "0.4 <= h <= 1.0",
        )?;
        check("sigma8", self.sigma8, self.sigma8 > zero, "sigma8 > 0")?;
        check("ns", self.ns, self.ns.is_finite(), "a finite number")?;
        check("z_max", self.z_max, self.z_max > zero, "z_max > 0")?;
        let flat_tol = T::lit(FLATNESS_TOL).max(T::epsilon() * T::lit(4.0));
        if (self.omega_m + self.omega_lambda - one).abs() > flat_tol {
            return Err(Error::NotFlat {
                omega_m: self.omega_m.as_f64(),
                omega_lambda: self.omega_lambda.as_f64(),
            });
        }
        Ok(())
    }

    /// Hubble time `1/H0` in years.
    pub fn hubble_time_yr(&self) -> T {
        T::lit(HUBBLE_TIME_YR) / self.h
    }

    /// Hubble distance `c/H0` in Mpc.
    pub fn hubble_distance_mpc(&self) -> T {
        T::lit(SPEED_OF_LIGHT_KM_S) / (T::lit(100.0) * self.h)
    }

    /// Critical density today, M_sun Mpc^-3.
    pub fn critical_density0(&self) -> T {
        T::lit(CRITICAL_DENSITY) * self.h * self.h
    }

    /// Mean comoving matter density, M_sun Mpc^-3.
    pub fn mean_matter_density0(&self) -> T {
        self.omega_m * self.critical_density0()
    }

    /// `E(z) = H(z)/H0` without domain checks.
    #[inline]
    pub(crate) fn e_of(&self, z: T) -> T {
        let a = T::one() + z;
        (self.omega_m * a * a * a + self.omega_lambda).sqrt()
    }
}

/// Tabulated background quantities on a uniform redshift grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTable<T> {
    pub zs: Vec<T>,
    /// Cosmic time, years.
    pub ts: Vec<T>,
    /// Comoving distance, Mpc.
    pub dcs: Vec<T>,
    /// Growth factor normalised to unity today.
    pub growths: Vec<T>,
    log_time: Table1D<T>,
    /// `z(ln t)` on ascending `ln t`, so time lookups need no root finding.
    redshift_of_log_time: Table1D<T>,
}

impl<T: Real> EpochTable<T> {
    fn build(bg: &Background<T>) -> Result<Self> {
        let p = &bg.params;
        let step = T::lit(EPOCH_TABLE_DZ);
        let n = (p.z_max / step - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
        let zs: Vec<T> = (0..=n)
            .map(|i| (T::from_usize(i).unwrap() * step).min(p.z_max))
            .collect();
        let tol = &bg.tol;

        let time_kernel = |z: T| T::one() / ((T::one() + z) * p.e_of(z));
        let growth_kernel = |z: T| {
            let e = p.e_of(z);
            (T::one() + z) / (e * e * e)
        };
        let dist_kernel = |z: T| T::one() / p.e_of(z);

        let mut time_int = vec![T::zero(); n + 1];
        let mut growth_int = vec![T::zero(); n + 1];
        time_int[n] = integrate_to_infinity(time_kernel, zs[n], tol)?;
        growth_int[n] = integrate_to_infinity(growth_kernel, zs[n], tol)?;
        for i in (0..n).rev() {
            time_int[i] = time_int[i + 1] + integrate(time_kernel, zs[i], zs[i + 1], tol)?;
            growth_int[i] = growth_int[i + 1] + integrate(growth_kernel, zs[i], zs[i + 1], tol)?;
        }
        let mut dist_int = vec![T::zero(); n + 1];
        for i in 1..=n {
            dist_int[i] = dist_int[i - 1] + integrate(dist_kernel, zs[i - 1], zs[i], tol)?;
        }

        let ts: Vec<T> = time_int.iter().map(|&v| v * p.hubble_time_yr()).collect();
        let dcs: Vec<T> = dist_int.iter().map(|&v| v * p.hubble_distance_mpc()).collect();
        let norm = growth_int[0] * p.e_of(T::zero());
        let growths: Vec<T> = zs
            .iter()
            .zip(&growth_int)
            .map(|(&z, &g)| p.e_of(z) * g / norm)
            .collect();
        let log_ts: Vec<T> = ts.iter().map(|t| t.ln()).collect();
        let log_time = Table1D::new(zs.clone(), log_ts.clone())?;
        let redshift_of_log_time = Table1D::new(
            log_ts.iter().rev().cloned().collect(),
            zs.iter().rev().cloned().collect(),
        )?;
        Ok(Self {
            zs,
            ts,
            dcs,
            growths,
            log_time,
            redshift_of_log_time,
        })
    }

    /// Redshift at cosmic time `t` (years), interpolated in `ln t`.
    pub fn z_of_t(&self, t: T) -> Result<T> {
        let n = self.ts.len();
        let (t_lo, t_hi) = (self.ts[n - 1], self.ts[0]);
        if !(t > T::zero()) {
            return Err(Error::domain(
                "t",
                t.as_f64(),
                format!("[{:e}, {:e}] yr", t_lo.as_f64(), t_hi.as_f64()),
            ));
        }
        let mut log_t = t.ln();
        // absorb ln/exp round-off at the table ends
        let ys = self.log_time.ys();
        let (y_lo, y_hi) = (ys[n - 1], ys[0]);
        let slack = T::epsilon() * T::lit(8.0) * y_lo.abs().max(y_hi.abs());
        if log_t > y_hi && log_t - y_hi <= slack {
            log_t = y_hi;
        }
        if log_t < y_lo && y_lo - log_t <= slack {
            log_t = y_lo;
        }
        if log_t > y_hi || log_t < y_lo {
            return Err(Error::domain(
                "t",
                t.as_f64(),
                format!("[{:e}, {:e}] yr", t_lo.as_f64(), t_hi.as_f64()),
            ));
        }
        Ok(self.redshift_of_log_time.eval(log_t)?)
    }

    /// Interpolated cosmic time at `z`.
    pub fn age_at(&self, z: T) -> Result<T> {
        Ok(self.log_time.eval(z)?.exp())
    }
}

/// Background cosmology evaluator.
///
/// Direct quadrature backs every point query; the [`EpochTable`] is built
/// on first use and serves time-to-redshift inversion and grid lookups.
#[derive(Debug)]
pub struct Background<T> {
    params: CosmologyParams<T>,
    tol: ToleranceSpec<T>,
    growth_norm: T,
    table: OnceLock<std::result::Result<EpochTable<T>, Error>>,
}

impl<T: Real> Background<T> {
    pub fn new(params: CosmologyParams<T>, tol: ToleranceSpec<T>) -> Result<Self> {
        params.validate()?;
        Self::new_unchecked(params, tol)
    }

    /// Skips parameter validation. Intended for analytic test
    /// configurations such as [`CosmologyParams::einstein_de_sitter`].
    pub fn new_unchecked(params: CosmologyParams<T>, tol: ToleranceSpec<T>) -> Result<Self> {
        tol.validate()?;
        let mut bg = Self {
            params,
            tol,
            growth_norm: T::one(),
            table: OnceLock::new(),
        };
        bg.growth_norm = bg.growth_unnormalized(T::zero())?;
        Ok(bg)
    }

    pub fn params(&self) -> &CosmologyParams<T> {
        &self.params
    }

    pub fn tolerance(&self) -> &ToleranceSpec<T> {
        &self.tol
    }

    fn check_z(z: T) -> Result<()> {
        if z >= T::zero() && z.is_finite() {
            Ok(())
        } else {
            Err(Error::domain("z", z.as_f64(), "z >= 0"))
        }
    }

    /// Dimensionless expansion rate `E(z)`.
    pub fn hubble_e(&self, z: T) -> Result<T> {
        Self::check_z(z)?;
        Ok(self.params.e_of(z))
    }

    /// `H(z)` in km s^-1 Mpc^-1.
    pub fn hubble(&self, z: T) -> Result<T> {
        Ok(T::lit(100.0) * self.params.h * self.hubble_e(z)?)
    }

    /// `H(z)` in yr^-1.
    pub fn hubble_per_year(&self, z: T) -> Result<T> {
        Ok(self.hubble_e(z)? / self.params.hubble_time_yr())
    }

    /// Cosmic time at redshift `z`, years.
    pub fn age(&self, z: T) -> Result<T> {
        Self::check_z(z)?;
        let p = &self.params;
        let kernel = |x: T| T::one() / ((T::one() + x) * p.e_of(x));
        Ok(integrate_to_infinity(kernel, z, &self.tol)? * p.hubble_time_yr())
    }

    /// Comoving distance to redshift `z`, Mpc.
    pub fn comoving_distance(&self, z: T) -> Result<T> {
        Self::check_z(z)?;
        let p = &self.params;
        let integral = integrate(|x: T| T::one() / p.e_of(x), T::zero(), z, &self.tol)?;
        Ok(integral * p.hubble_distance_mpc())
    }

    /// All-sky comoving volume out to `z`, Mpc^3.
    pub fn comoving_volume(&self, z: T) -> Result<T> {
        let d = self.comoving_distance(z)?;
        Ok(T::lit(4.0) * T::PI() / T::lit(3.0) * d * d * d)
    }

    /// `dVc/dz` for the full sky, Mpc^3.
    pub fn comoving_volume_derivative(&self, z: T) -> Result<T> {
        let d = self.comoving_distance(z)?;
        Ok(T::lit(4.0) * T::PI() * d * d * self.params.hubble_distance_mpc() / self.params.e_of(z))
    }

    /// Mean comoving-frame physical matter density `rho_m(z)`, M_sun Mpc^-3.
    pub fn matter_density(&self, z: T) -> Result<T> {
        Self::check_z(z)?;
        let a = T::one() + z;
        Ok(self.params.mean_matter_density0() * a * a * a)
    }

    /// Baryonic share of [`matter_density`](Self::matter_density).
    pub fn baryon_density(&self, z: T) -> Result<T> {
        Ok(self.matter_density(z)? * self.params.omega_b / self.params.omega_m)
    }

    fn growth_unnormalized(&self, z: T) -> Result<T> {
        let p = &self.params;
        let kernel = |x: T| {
            let e = p.e_of(x);
            (T::one() + x) / (e * e * e)
        };
        Ok(p.e_of(z) * integrate_to_infinity(kernel, z, &self.tol)?)
    }

    /// Linear growth factor, `D(0) = 1`.
    pub fn growth(&self, z: T) -> Result<T> {
        Self::check_z(z)?;
        Ok(self.growth_unnormalized(z)? / self.growth_norm)
    }

    /// Linearly extrapolated collapse threshold `1.686 / D(z)`.
    pub fn delta_c(&self, z: T) -> Result<T> {
        Ok(T::lit(DELTA_C0) / self.growth(z)?)
    }

    /// Epoch table on the uniform `dz = 0.01` grid over `[0, z_max]`.
    pub fn epoch_table(&self) -> Result<&EpochTable<T>> {
        self.table
            .get_or_init(|| EpochTable::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Redshift at cosmic time `t` (years).
    pub fn z_of_t(&self, t: T) -> Result<T> {
        self.epoch_table()?.z_of_t(t)
    }
}
