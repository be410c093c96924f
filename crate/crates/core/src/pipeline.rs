//! End-to-end wiring: cosmology -> sigma table -> structure grid -> CSFR.

use crate::background::{Background, CosmologyParams};
use crate::csfr::{run_csfr, CSFRHistory, SFParams, DEFAULT_SAMPLES};
use crate::error::Result;
use crate::numerics::ToleranceSpec;
use crate::real::Real;
use crate::structure::{PressSchechter, StructureGrid, DEFAULT_LOG10_MASS_BOUNDS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig<T> {
    pub cosmology: CosmologyParams<T>,
    pub star_formation: SFParams<T>,
    /// `log10(M_min / M_sun)` for halos hosting baryons.
    pub log10_mass_min: T,
    pub log10_mass_max: T,
    /// Redshift intervals in tabulated outputs.
    pub samples: usize,
    pub tolerance: ToleranceSpec<T>,
}

impl<T: Real> Default for PipelineConfig<T> {
    fn default() -> Self {
        Self {
            cosmology: CosmologyParams::default(),
            star_formation: SFParams::default(),
            log10_mass_min: T::lit(DEFAULT_LOG10_MASS_BOUNDS.0),
            log10_mass_max: T::lit(DEFAULT_LOG10_MASS_BOUNDS.1),
            samples: DEFAULT_SAMPLES,
            tolerance: ToleranceSpec::default(),
        }
    }
}

/// Fully constructed model for one configuration.
#[derive(Debug)]
pub struct Pipeline<T> {
    config: PipelineConfig<T>,
    press_schechter: PressSchechter<T>,
}

impl<T: Real> Pipeline<T> {
    pub fn new(config: PipelineConfig<T>) -> Result<Self> {
        config.star_formation.validate()?;
        let press_schechter = PressSchechter::new(
            config.cosmology,
            config.log10_mass_min,
            config.log10_mass_max,
            config.tolerance,
        )?;
        Ok(Self {
            config,
            press_schechter,
        })
    }

    pub fn config(&self) -> &PipelineConfig<T> {
        &self.config
    }

    pub fn background(&self) -> &Background<T> {
        self.press_schechter.background()
    }

    pub fn press_schechter(&self) -> &PressSchechter<T> {
        &self.press_schechter
    }

    pub fn structure_grid(&self) -> Result<StructureGrid<T>> {
        self.press_schechter.structure_grid()
    }

    /// Structure grid followed by the gas-reservoir integration.
    pub fn run_csfr(&self) -> Result<(StructureGrid<T>, CSFRHistory<T>)> {
        let grid = self.structure_grid()?;
        let history = run_csfr(
            self.background(),
            &self.config.star_formation,
            &grid,
            self.config.samples,
        )?;
        Ok((grid, history))
    }
}
