//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cfm::CfmConfig;
use crate::fdtd::SchemeKind;
use crate::geometry::Interface;
use crate::grid::BoundaryKind;
use crate::jumpcheck::Regime;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    ScatteringNonmagnetic,
    ScatteringMagnetic,
    Manufactured,
}

impl Problem {
    pub fn is_scattering(self) -> bool {
        !matches!(self, Problem::Manufactured)
    }

    /// Jump-condition set that applies, if any.
    pub fn regime(self) -> Option<Regime> {
        match self {
            Problem::ScatteringNonmagnetic => Some(Regime::NonMagnetic),
            Problem::ScatteringMagnetic => Some(Regime::Magnetic),
            Problem::Manufactured => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "cfm-yee")]
    Yee,
    #[serde(rename = "cfm-4th")]
    Fourth,
}

impl Scheme {
    pub fn kind(self) -> SchemeKind {
        match self {
            Scheme::Yee => SchemeKind::Yee2,
            Scheme::Fourth => SchemeKind::Staggered4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    DirichletExact,
    Periodic,
    Embedded,
}

/// Named interface shapes; `custom` takes the `interface` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Circle,
    FiveStar,
    ThreeStar,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Prefix of snapshot files.
    pub name: String,
    pub problem: Problem,
    /// Manufactured runs only; scattering always uses the cylinder.
    pub geometry: Geometry,
    pub interface: Option<Interface>,
    pub scheme: Scheme,
    pub h: f64,
    /// Time step as a multiple of `h`.
    pub dt_factor: f64,
    pub t_final: f64,
    pub c_p: f64,
    /// Fictitious penalty per unit time step; scheme default when absent.
    pub alpha: Option<f64>,
    /// Patch side in cells; geometry default when absent.
    pub beta: Option<f64>,
    /// Polynomial degree; scheme default when absent.
    pub degree: Option<usize>,
    pub interp_degree: Option<usize>,
    pub boundary: Option<Boundary>,
    pub output_dir: PathBuf,
    /// Snapshot every this many steps (0: never).
    pub snapshot_every: usize,
    /// Long-time error sampling cadence in steps.
    pub error_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "run".into(),
            problem: Problem::ScatteringNonmagnetic,
            geometry: Geometry::Circle,
            interface: None,
            scheme: Scheme::Yee,
            h: 1.0 / 20.0,
            dt_factor: 0.5,
            t_final: 1.0,
            c_p: 1.0,
            alpha: None,
            beta: None,
            degree: None,
            interp_degree: None,
            boundary: None,
            output_dir: PathBuf::from("out"),
            snapshot_every: 0,
            error_every: 10,
        }
    }
}

/// Center of the manufactured geometries.
const UNIT_CENTER: [f64; 2] = [0.5, 0.5];

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::Config(format!("h must lie in (0, 1), got {}", self.h)));
        }
        if !(self.dt_factor > 0.0) || !(self.t_final >= 0.0) {
            return Err(Error::Config("time step factor must be positive and final time non-negative".into()));
        }
        let n = self.extent() / self.h;
        if (n - n.round()).abs() > 1e-6 * n {
            return Err(Error::Config(format!("h = {} does not divide the domain side {}", self.h, self.extent())));
        }
        if self.geometry == Geometry::Custom && self.interface.is_none() {
            return Err(Error::Config("geometry = \"custom\" needs an [interface] table".into()));
        }
        match (self.problem.is_scattering(), self.boundary()) {
            (_, Boundary::Embedded) => {
                return Err(Error::Config("embedded boundaries are not supported; use dirichlet-exact".into()));
            }
            (true, Boundary::Periodic) => {
                return Err(Error::Config("scattering runs need dirichlet-exact boundaries".into()));
            }
            _ => {}
        }
        if self.error_every == 0 {
            return Err(Error::Config("error_every must be at least 1".into()));
        }
        self.cfm().validate(self.dt())
    }

    pub fn bounds(&self) -> [f64; 4] {
        if self.problem.is_scattering() {
            [-1.0, 1.0, -1.0, 1.0]
        } else {
            [0.0, 1.0, 0.0, 1.0]
        }
    }

    fn extent(&self) -> f64 {
        let b = self.bounds();
        b[1] - b[0]
    }

    pub fn cells(&self) -> usize {
        (self.extent() / self.h).round() as usize
    }

    pub fn dt(&self) -> f64 {
        self.dt_factor * self.h
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or(if self.problem.is_scattering() { Boundary::DirichletExact } else { Boundary::Periodic })
    }

    pub fn boundary_kind(&self) -> BoundaryKind {
        match self.boundary() {
            Boundary::Periodic => BoundaryKind::Periodic,
            _ => BoundaryKind::Prescribed,
        }
    }

    /// Interface of the run: the cylinder for scattering, otherwise the
    /// selected shape around the middle of the unit square.
    pub fn interface(&self) -> Interface {
        if let Some(i) = &self.interface {
            if self.geometry == Geometry::Custom || self.problem.is_scattering() {
                return i.clone();
            }
        }
        if self.problem.is_scattering() {
            return Interface::circle([0.0, 0.0], 0.6);
        }
        match self.geometry {
            Geometry::Circle | Geometry::Custom => Interface::circle(UNIT_CENTER, 0.25),
            Geometry::FiveStar => Interface::five_star(),
            Geometry::ThreeStar => Interface::three_star(),
        }
    }

    pub fn cfm(&self) -> CfmConfig {
        let mut c = match self.scheme {
            Scheme::Yee => CfmConfig::yee(),
            Scheme::Fourth => CfmConfig::staggered4(),
        };
        c.c_p = self.c_p;
        c.beta = if self.geometry == Geometry::FiveStar && !self.problem.is_scattering() { 8.0 } else { 7.0 };
        if let Some(a) = self.alpha {
            c.alpha = a;
        }
        if let Some(b) = self.beta {
            c.beta = b;
        }
        if let Some(k) = self.degree {
            c.degree = k;
        }
        if let Some(d) = self.interp_degree {
            c.interp_degree = d;
        }
        c
    }

    /// Configuration echo for output headers.
    pub fn header(&self) -> String {
        self.to_toml()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let c = RunConfig::from_toml("problem = \"manufactured\"\ngeometry = \"five-star\"\nscheme = \"cfm-4th\"\nh = 0.025\n").unwrap();
        assert_eq!(c.cells(), 40);
        assert_eq!(c.boundary(), Boundary::Periodic);
        let cfm = c.cfm();
        assert_eq!((cfm.degree, cfm.beta, cfm.alpha), (3, 8.0, 0.25));
    }

    #[test]
    fn round_trips() {
        let c = RunConfig { problem: Problem::ScatteringMagnetic, h: 1.0 / 28.0, ..RunConfig::default() };
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_toml("h = 0.3\n").is_err());
        assert!(RunConfig::from_toml("bogus = 1\n").is_err());
        assert!(RunConfig::from_toml("boundary = \"embedded\"\n").is_err());
        assert!(RunConfig::from_toml("c_p = 0.01\nh = 0.05\n").is_err());
    }
}
