//! Press-Schechter halo abundance and the baryons it locks into structures.

use rayon::prelude::*;

use crate::background::{Background, CosmologyParams, DELTA_C0};
use crate::error::{Error, Result};
use crate::numerics::{integrate, Table1D, ToleranceSpec};
use crate::powerspec::{PowerSpectrum, SigmaTable, SIGMA_TABLE_LOG10_RANGE, SIGMA_TABLE_POINTS};
use crate::real::Real;

/// Default halo mass bounds, `log10(M / M_sun)`.
pub const DEFAULT_LOG10_MASS_BOUNDS: (f64, f64) = (6.0, 18.0);

/// One evaluation of the mass function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassFunctionSample<T> {
    /// Halo mass, M_sun.
    pub mass: T,
    pub z: T,
    /// Comoving number density per unit mass, Mpc^-3 M_sun^-1.
    pub dn_dm: T,
    /// Comoving number density of halos heavier than `mass`, Mpc^-3.
    pub n_above: T,
}

/// Press-Schechter evaluator tied to one cosmology.
#[derive(Debug)]
pub struct PressSchechter<T> {
    background: Background<T>,
    spectrum: PowerSpectrum<T>,
    sigma: SigmaTable<T>,
    log10_m_min: T,
    log10_m_max: T,
    tol: ToleranceSpec<T>,
}

impl<T: Real> PressSchechter<T> {
    /// Builds the background, normalised spectrum and a 512-point sigma
    /// table covering at least `[10^4, 10^18]` M_sun and the mass bounds.
    pub fn new(params: CosmologyParams<T>, log10_m_min: T, log10_m_max: T, tol: ToleranceSpec<T>) -> Result<Self> {
        Self::with_table_points(params, log10_m_min, log10_m_max, SIGMA_TABLE_POINTS, tol)
    }

    pub fn with_table_points(
        params: CosmologyParams<T>,
        log10_m_min: T,
        log10_m_max: T,
        points: usize,
        tol: ToleranceSpec<T>,
    ) -> Result<Self> {
        let background = Background::new(params, tol)?;
        let spectrum = PowerSpectrum::new(params, tol)?;
        let (lo, hi) = SIGMA_TABLE_LOG10_RANGE;
        let sigma = spectrum.sigma_table(points, log10_m_min.min(T::lit(lo)), log10_m_max.max(T::lit(hi)))?;
        Self::from_parts(background, spectrum, sigma, log10_m_min, log10_m_max)
    }

    pub fn from_parts(
        background: Background<T>,
        spectrum: PowerSpectrum<T>,
        sigma: SigmaTable<T>,
        log10_m_min: T,
        log10_m_max: T,
    ) -> Result<Self> {
        if !(log10_m_min < log10_m_max) || !log10_m_min.is_finite() || !log10_m_max.is_finite() {
            return Err(Error::InvalidParam {
                key: "mass_min",
                value: log10_m_min.as_f64(),
                expected: format!("mass_min < mass_max ({})", log10_m_max.as_f64()),
            });
        }
        let ten = T::lit(10.0);
        let (t_lo, t_hi) = sigma.mass_range();
        let slack = T::lit(1e-9);
        if ten.powf(log10_m_min) < t_lo * (T::one() - slack) || ten.powf(log10_m_max) > t_hi * (T::one() + slack) {
            return Err(Error::domain(
                "mass bounds",
                log10_m_min.as_f64(),
                format!(
                    "within the sigma table [{}, {}] (log10 M_sun)",
                    t_lo.log10().as_f64(),
                    t_hi.log10().as_f64()
                ),
            ));
        }
        let tol = *background.tolerance();
        Ok(Self {
            background,
            spectrum,
            sigma,
            log10_m_min,
            log10_m_max,
            tol,
        })
    }

    pub fn background(&self) -> &Background<T> {
        &self.background
    }

    pub fn spectrum(&self) -> &PowerSpectrum<T> {
        &self.spectrum
    }

    pub fn sigma_table(&self) -> &SigmaTable<T> {
        &self.sigma
    }

    pub fn mass_bounds(&self) -> (T, T) {
        let ten = T::lit(10.0);
        (ten.powf(self.log10_m_min), ten.powf(self.log10_m_max))
    }

    pub fn log10_mass_bounds(&self) -> (T, T) {
        (self.log10_m_min, self.log10_m_max)
    }

    fn mean_density(&self) -> T {
        self.background.params().mean_matter_density0()
    }

    fn check_z(&self, z: T) -> Result<()> {
        let z_max = self.background.params().z_max;
        if z >= T::zero() && z <= z_max {
            Ok(())
        } else {
            Err(Error::domain("z", z.as_f64(), format!("[0, {}]", z_max.as_f64())))
        }
    }

    /// `M^2 dn/dM / rho_m`, the collapsed-mass density per `ln M`.
    fn mass_weighted_kernel(&self, m: T, delta_c: T) -> Result<T> {
        let (sigma, slope) = self.sigma.sigma_and_slope(m)?;
        let nu = delta_c / sigma;
        let coeff = (T::lit(2.0) / T::PI()).sqrt();
        Ok(coeff * nu * slope.abs() * (-nu * nu / T::lit(2.0)).exp())
    }

    fn dn_dm_at_threshold(&self, m: T, delta_c: T) -> Result<T> {
        Ok(self.mean_density() / (m * m) * self.mass_weighted_kernel(m, delta_c)?)
    }

    /// Press-Schechter `dn/dM` (Mpc^-3 M_sun^-1) at mass `m` and redshift `z`.
    pub fn ps_mass_function(&self, m: T, z: T) -> Result<T> {
        self.check_z(z)?;
        let dc = self.background.delta_c(z)?;
        self.dn_dm_at_threshold(m, dc)
    }

    /// Comoving number density of halos in `[m, M_max]`, Mpc^-3.
    pub fn number_density_above(&self, m: T, z: T) -> Result<T> {
        self.check_z(z)?;
        let dc = self.background.delta_c(z)?;
        self.number_density_above_at_threshold(m, dc)
    }

    fn number_density_above_at_threshold(&self, m: T, delta_c: T) -> Result<T> {
        // validates m against the sigma grid
        self.sigma.sigma(m)?;
        let (_, m_max) = self.mass_bounds();
        if m >= m_max {
            return Ok(T::zero());
        }
        let rho = self.mean_density();
        let kernel = |ln_m: T| {
            let mass = ln_m.exp();
            rho / mass * self.mass_weighted_kernel(mass, delta_c).unwrap_or(T::nan())
        };
        Ok(integrate(kernel, m.ln(), m_max.ln(), &self.tol)?)
    }

    pub fn mass_function_sample(&self, m: T, z: T) -> Result<MassFunctionSample<T>> {
        self.check_z(z)?;
        let dc = self.background.delta_c(z)?;
        Ok(MassFunctionSample {
            mass: m,
            z,
            dn_dm: self.dn_dm_at_threshold(m, dc)?,
            n_above: self.number_density_above_at_threshold(m, dc)?,
        })
    }

    /// Closed-form collapsed mass fraction above `m_min`,
    /// `erfc(delta_c(z) / (sqrt(2) sigma(m_min)))`.
    pub fn collapsed_fraction(&self, z: T, m_min: T) -> Result<T> {
        let sigma = self.sigma.sigma(m_min)?;
        let dc = self.background.delta_c(z)?;
        Ok((dc / (T::SQRT_2() * sigma)).erfc())
    }

    /// `(1/rho_m) * integral of M dn/dM over [m_lo, m_hi]`.
    pub fn collapsed_mass_fraction_between(&self, z: T, m_lo: T, m_hi: T) -> Result<T> {
        let dc = self.background.delta_c(z)?;
        self.collapsed_between_at_threshold(m_lo, m_hi, dc)
    }

    fn collapsed_between_at_threshold(&self, m_lo: T, m_hi: T, delta_c: T) -> Result<T> {
        self.sigma.sigma(m_lo)?;
        self.sigma.sigma(m_hi)?;
        let kernel = |ln_m: T| self.mass_weighted_kernel(ln_m.exp(), delta_c).unwrap_or(T::nan());
        Ok(integrate(kernel, m_lo.ln(), m_hi.ln(), &self.tol)?)
    }

    /// Comoving baryon density inside halos with mass in the configured
    /// bounds, M_sun Mpc^-3.
    pub fn baryon_density_in_structures(&self, z: T) -> Result<T> {
        self.check_z(z)?;
        let dc = self.background.delta_c(z)?;
        self.baryons_at_threshold(dc)
    }

    fn baryons_at_threshold(&self, delta_c: T) -> Result<T> {
        let p = self.background.params();
        let (m_lo, m_hi) = self.mass_bounds();
        let frac = self.collapsed_between_at_threshold(m_lo, m_hi, delta_c)?;
        Ok(p.omega_b / p.omega_m * self.mean_density() * frac)
    }

    /// Tabulates baryons in structures and their accretion rate on the
    /// epoch-table redshift grid.
    pub fn structure_grid(&self) -> Result<StructureGrid<T>> {
        let table = self.background.epoch_table()?;
        let zs = table.zs.clone();
        let rho_b_struct = table
            .growths
            .par_iter()
            .map(|&d| self.baryons_at_threshold(T::lit(DELTA_C0) / d))
            .collect::<Result<Vec<T>>>()?;
        StructureGrid::new(
            *self.background.params(),
            self.log10_m_min,
            self.log10_m_max,
            zs,
            rho_b_struct,
        )
    }
}

/// Baryons locked in structures and their accretion rate against redshift.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureGrid<T> {
    pub log10_m_min: T,
    pub log10_m_max: T,
    pub zs: Vec<T>,
    /// Comoving baryon density in halos, M_sun Mpc^-3.
    pub rho_b_struct: Vec<T>,
    /// Baryon accretion rate, M_sun yr^-1 Mpc^-3.
    pub a_b: Vec<T>,
    params: CosmologyParams<T>,
    spline: Table1D<T>,
}

impl<T: Real> StructureGrid<T> {
    pub fn new(
        params: CosmologyParams<T>,
        log10_m_min: T,
        log10_m_max: T,
        zs: Vec<T>,
        rho_b_struct: Vec<T>,
    ) -> Result<Self> {
        let spline = Table1D::new(zs.clone(), rho_b_struct.clone())?;
        let mut grid = Self {
            log10_m_min,
            log10_m_max,
            zs,
            rho_b_struct,
            a_b: Vec::new(),
            params,
            spline,
        };
        grid.a_b = grid
            .zs
            .iter()
            .map(|&z| grid.accretion_unchecked(z))
            .collect::<Result<Vec<T>>>()?;
        Ok(grid)
    }

    pub fn z_range(&self) -> (T, T) {
        self.spline.x_range()
    }

    pub fn params(&self) -> &CosmologyParams<T> {
        &self.params
    }

    /// Interpolated baryon density in structures at `z`.
    pub fn baryon_density_at(&self, z: T) -> Result<T> {
        Ok(self.spline.eval(z)?)
    }

    /// `max(0, d rho_b / dt)` on the closed grid range.
    pub(crate) fn accretion_unchecked(&self, z: T) -> Result<T> {
        let drho_dz = self.spline.derivative(z)?;
        let dz_dt = -(T::one() + z) * self.params.e_of(z) / self.params.hubble_time_yr();
        Ok((drho_dz * dz_dt).max(T::zero()))
    }

    /// Baryon accretion rate (M_sun yr^-1 Mpc^-3) at interior redshift `z`.
    pub fn baryon_accretion_rate(&self, z: T) -> Result<T> {
        let (lo, hi) = self.z_range();
        if !(z > lo && z < hi) {
            return Err(Error::domain(
                "z",
                z.as_f64(),
                format!("open interval ({}, {})", lo.as_f64(), hi.as_f64()),
            ));
        }
        self.accretion_unchecked(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps() -> PressSchechter<f64> {
        PressSchechter::new(CosmologyParams::default(), 6.0, 18.0, ToleranceSpec::default()).unwrap()
    }

    #[test]
    fn mass_function_nonnegative_on_grid() {
        let ps = ps();
        for i in 0..50 {
            let z = 20.0 * i as f64 / 49.0;
            let dc = ps.background().delta_c(z).unwrap();
            for j in 0..50 {
                let m = 10f64.powf(4.0 + 14.0 * j as f64 / 49.0);
                let v = ps.dn_dm_at_threshold(m, dc).unwrap();
                assert!(v >= 0.0 && v.is_finite());
            }
        }
    }

    #[test]
    fn high_mass_cutoff_with_redshift() {
        let ps = ps();
        let late = ps.ps_mass_function(1e16, 0.0).unwrap();
        let early = ps.ps_mass_function(1e16, 10.0).unwrap();
        assert!(early < late);
    }

    #[test]
    fn number_density_edges() {
        let ps = ps();
        assert_eq!(ps.number_density_above(1e18, 2.0).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        for l in [6.0, 8.0, 10.0, 12.0, 14.0, 16.0] {
            let n = ps.number_density_above(10f64.powf(l), 0.0).unwrap();
            assert!(n <= prev);
            prev = n;
        }
        assert!(ps.number_density_above(1e3, 0.0).is_err());
        assert!(ps.ps_mass_function(1e12, 25.0).is_err());
    }

    #[test]
    fn collapsed_fraction_behaviour() {
        let ps = ps();
        assert!(ps.collapsed_fraction(100.0, 1e6).unwrap() < 1e-30);
        let mut prev = 0.0;
        for i in (0..=20).rev() {
            let f = ps.collapsed_fraction(i as f64, 1e6).unwrap();
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn accretion_endpoints_rejected() {
        let ps = ps();
        let grid = ps.structure_grid().unwrap();
        assert!(grid.baryon_accretion_rate(0.0).is_err());
        assert!(grid.baryon_accretion_rate(20.0).is_err());
        assert!(grid.baryon_accretion_rate(3.0).unwrap() > 0.0);
    }

    #[test]
    fn bad_mass_bounds_rejected() {
        let p = CosmologyParams::default();
        let tol = ToleranceSpec::default();
        assert!(PressSchechter::<f64>::new(p, 12.0, 8.0, tol).is_err());
    }
}
