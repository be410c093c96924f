//! Cosmic star formation rate from a gas reservoir.
//!
//! Structures accrete baryons at the rate `a_b(t)` and turn gas into stars
//! at `rho_g^n / (tau rho_g,init^(n-1))`:
//!
//! ```text
//! d rho_g / dt = -(1 - R) rho_dot_star(rho_g) + a_b(t)
//! ```
//!
//! integrated forward in time from `z_max` to `z = 0`.

use crate::background::Background;
use crate::error::{Error, Result};
use crate::numerics::{solve_ode, NumericsError, Table1D};
use crate::real::Real;
use crate::structure::StructureGrid;

/// Default number of redshift intervals in the output history.
pub const DEFAULT_SAMPLES: usize = 2000;

/// Star formation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SFParams<T> {
    /// Salpeter IMF exponent, `phi(m) ~ m^-(1+x)`.
    pub x: T,
    /// Star formation timescale, years.
    pub tau: T,
    /// Star formation rate exponent.
    pub n: T,
    /// IMF lower mass limit, M_sun.
    pub m_low: T,
    /// IMF upper mass limit, M_sun.
    pub m_high: T,
    /// Fraction of stellar mass returned to the gas.
    pub return_fraction: T,
}

impl<T: Real> Default for SFParams<T> {
    fn default() -> Self {
        Self {
            x: T::lit(1.35),
            tau: T::lit(2.5e9),
            n: T::one(),
            m_low: T::lit(0.1),
            m_high: T::lit(140.0),
            return_fraction: T::zero(),
        }
    }
}

impl<T: Real> SFParams<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &'static str, value: T, expected: &str| Error::InvalidParam {
            key,
            value: value.as_f64(),
            expected: expected.into(),
        };
        let zero = T::zero();
        if !self.x.is_finite() {
            return Err(bad("x", self.x, "a finite number"));
        }
        if !(self.tau > zero) || !self.tau.is_finite() {
            return Err(bad("tau", self.tau, "tau > 0"));
        }
        if !(self.n > zero) || !self.n.is_finite() {
            return Err(bad("n", self.n, "n > 0"));
        }
        if !(self.m_low > zero) || !self.m_low.is_finite() {
            return Err(bad("m_low", self.m_low, "0 < m_low < m_high"));
        }
        if !(self.m_high > self.m_low) || !self.m_high.is_finite() {
            return Err(bad("m_high", self.m_high, "m_high > m_low"));
        }
        if !(self.return_fraction >= zero && self.return_fraction < T::one()) {
            return Err(bad("return_fraction", self.return_fraction, "0 <= return_fraction < 1"));
        }
        Ok(())
    }
}

/// Amplitude `A` of the mass-normalised IMF `A m^-(1+x)`, such that
/// `integral of m phi(m) dm` over `[m_low, m_high]` is one.
pub fn imf_normalization<T: Real>(sf: &SFParams<T>) -> Result<T> {
    sf.validate()?;
    let one_minus_x = T::one() - sf.x;
    if one_minus_x.abs() < T::epsilon() * T::lit(16.0) {
        return Ok(T::one() / (sf.m_high / sf.m_low).ln());
    }
    Ok(one_minus_x / (sf.m_high.powf(one_minus_x) - sf.m_low.powf(one_minus_x)))
}

/// Star formation rate density for gas density `rho_gas`,
/// `rho_gas^n / (tau rho_gas_init^(n-1))`.
pub fn star_formation_rate<T: Real>(rho_gas: T, sf: &SFParams<T>, rho_gas_init: T) -> Result<T> {
    if !(rho_gas >= T::zero()) || !rho_gas.is_finite() {
        return Err(Error::domain("rho_gas", rho_gas.as_f64(), "rho_gas >= 0"));
    }
    if !(rho_gas_init > T::zero()) || !rho_gas_init.is_finite() {
        return Err(Error::domain("rho_gas_init", rho_gas_init.as_f64(), "rho_gas_init > 0"));
    }
    Ok(sfr_unchecked(rho_gas, sf, rho_gas_init))
}

#[inline]
fn sfr_unchecked<T: Real>(rho_gas: T, sf: &SFParams<T>, rho_gas_init: T) -> T {
    if sf.n == T::one() {
        rho_gas / sf.tau
    } else {
        rho_gas.powf(sf.n) / (sf.tau * rho_gas_init.powf(sf.n - T::one()))
    }
}

/// Tabulated star formation history on a uniform redshift grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CSFRHistory<T> {
    /// Ascending redshift grid.
    pub zs: Vec<T>,
    /// Cosmic time, years.
    pub ts: Vec<T>,
    /// Gas density, M_sun Mpc^-3.
    pub rho_gas: Vec<T>,
    /// Star formation rate density, M_sun yr^-1 Mpc^-3.
    pub csfr: Vec<T>,
    /// Number of output steps where negative gas density was clipped to zero.
    pub floor_count: usize,
    curve: Table1D<T>,
}

impl<T: Real> CSFRHistory<T> {
    /// Star formation rate at `z`, monotone cubic between stored samples.
    pub fn csfr_at(&self, z: T) -> Result<T> {
        Ok(self.curve.eval(z)?)
    }

    pub fn len(&self) -> usize {
        self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zs.is_empty()
    }
}

/// Star formation rate of `history` at redshift `z`.
pub fn csfr_at<T: Real>(history: &CSFRHistory<T>, z: T) -> Result<T> {
    history.csfr_at(z)
}

/// Integrates the gas reservoir from `z_max` to today and samples the star
/// formation rate on `samples + 1` uniformly spaced redshifts.
pub fn run_csfr<T: Real>(
    background: &Background<T>,
    sf: &SFParams<T>,
    grid: &StructureGrid<T>,
    samples: usize,
) -> Result<CSFRHistory<T>> {
    sf.validate()?;
    if samples < 1 {
        return Err(Error::domain("samples", 0.0, "samples >= 1"));
    }
    let (z_lo, z_max) = grid.z_range();
    if z_lo != T::zero() || z_max != background.params().z_max {
        return Err(Error::domain(
            "structure grid",
            z_max.as_f64(),
            format!("must span [0, {}]", background.params().z_max.as_f64()),
        ));
    }
    let table = background.epoch_table()?;
    let tol = *background.tolerance();

    let n = samples;
    let nt = T::from_usize(n).unwrap();
    let zs: Vec<T> = (0..=n)
        .map(|i| {
            if i == n {
                z_max
            } else {
                z_max * T::from_usize(i).unwrap() / nt
            }
        })
        .collect();
    let ts = zs.iter().map(|&z| table.age_at(z)).collect::<Result<Vec<T>>>()?;

    let rho_init = grid.rho_b_struct[grid.rho_b_struct.len() - 1];
    if sf.n != T::one() && !(rho_init > T::zero()) {
        return Err(Error::domain("rho_gas_init", rho_init.as_f64(), "rho_gas_init > 0"));
    }
    let keep = T::one() - sf.return_fraction;
    let rhs = |t: T, rho: T| {
        let z = match table.z_of_t(t) {
            Ok(z) => z,
            Err(_) => return T::nan(),
        };
        let accretion = grid.accretion_unchecked(z).unwrap_or(T::nan());
        -keep * sfr_unchecked(rho.max(T::zero()), sf, rho_init) + accretion
    };

    let mut rho_gas = vec![T::zero(); n + 1];
    rho_gas[n] = rho_init;
    let mut floor_count = 0;
    let mut rho = rho_init;
    for i in (0..n).rev() {
        let segment = solve_ode(rhs, rho, ts[i + 1], ts[i], &tol).map_err(|e| {
            let z = match e {
                NumericsError::NonFiniteRhs { t, .. }
                | NumericsError::StepUnderflow { t }
                | NumericsError::StepBudget { t, .. } => {
                    table.z_of_t(T::lit(t)).map(|z| z.as_f64()).unwrap_or(f64::NAN)
                }
                _ => zs[i + 1].as_f64(),
            };
            Error::Ode { z, source: e }
        })?;
        rho = segment.ys()[segment.len() - 1];
        if rho < T::zero() {
            rho = T::zero();
            floor_count += 1;
        }
        rho_gas[i] = rho;
    }

    let csfr: Vec<T> = rho_gas.iter().map(|&r| sfr_unchecked(r, sf, rho_init)).collect();
    let curve = Table1D::new(zs.clone(), csfr.clone())?;
    Ok(CSFRHistory {
        zs,
        ts,
        rho_gas,
        csfr,
        floor_count,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn salpeter_normalization() {
        let sf = SFParams::<f64>::default();
        let a = imf_normalization(&sf).unwrap();
        let oracle = (1.0 - 1.35) / (140f64.powf(-0.35) - 0.1f64.powf(-0.35));
        assert!((a - oracle).abs() < 1e-15);
        assert!((a - 0.1698).abs() < 1e-4, "{a}");
    }

    #[test]
    fn normalised_imf_integrates_to_one() {
        for (x, lo, hi) in [
            (1.35, 0.1, 140.0),
            (0.5, 1.0, 10.0),
            (1.0, 0.1, 100.0),
            (2.3, 0.08, 120.0),
        ] {
            let sf = SFParams {
                x,
                m_low: lo,
                m_high: hi,
                ..SFParams::default()
            };
            let a = imf_normalization(&sf).unwrap();
            // trapezoid in ln m of m * phi(m) * m
            let n = 200_000;
            let (la, lb) = (f64::ln(lo), f64::ln(hi));
            let dx = (lb - la) / n as f64;
            let g = |i: usize| {
                let m = (la + dx * i as f64).exp();
                a * m.powf(-(1.0 + x)) * m * m
            };
            let mut s = 0.5 * (g(0) + g(n));
            for i in 1..n {
                s += g(i);
            }
            assert!((s * dx - 1.0).abs() < 1e-8, "x={x}: {}", s * dx);
        }
    }

    #[test]
    fn high_mass_limit_barely_matters() {
        let sf = SFParams::<f64>::default();
        let doubled = SFParams { m_high: 280.0, ..sf };
        let a = imf_normalization(&sf).unwrap();
        let b = imf_normalization(&doubled).unwrap();
        assert!(((b - a) / a).abs() < 0.05);
    }

    #[test]
    fn rate_examples() {
        let sf = SFParams::<f64>::default();
        assert!((star_formation_rate(1e8, &sf, 1.0).unwrap() - 0.04).abs() < 1e-15);
        assert_eq!(star_formation_rate(0.0, &sf, 5.0).unwrap(), 0.0);
        let other = SFParams { n: 1.5, ..sf };
        assert_eq!(star_formation_rate(0.0, &other, 5.0).unwrap(), 0.0);
        assert_eq!(
            star_formation_rate(3e7, &sf, 1.0).unwrap(),
            star_formation_rate(3e7, &sf, 1e9).unwrap()
        );
        assert!(star_formation_rate(-1.0, &sf, 1.0).is_err());
        assert!(star_formation_rate(1.0, &sf, 0.0).is_err());
    }

    #[test]
    fn super_linear_rate() {
        let sf = SFParams {
            n: 2.0,
            ..SFParams::<f64>::default()
        };
        // rho^2 / (tau rho_init)
        let v = star_formation_rate(2e8, &sf, 1e8).unwrap();
        assert!((v - 4e16 / (2.5e9 * 1e8)).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        let sf = SFParams::<f64>::default();
        assert!(sf.validate().is_ok());
        assert!(SFParams { tau: 0.0, ..sf }.validate().is_err());
        assert!(SFParams { n: -1.0, ..sf }.validate().is_err());
        assert!(SFParams { m_high: 0.05, ..sf }.validate().is_err());
        assert!(SFParams {
            return_fraction: 1.0,
            ..sf
        }
        .validate()
        .is_err());
    }
}
