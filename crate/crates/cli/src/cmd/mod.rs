pub mod analyze;
pub mod estimate;
pub mod limits;
pub mod simulate;
pub mod synth;

use clap::ValueEnum;
use covar_core::{CopulaSpec, Reflection};
use serde::{Deserialize, Serialize};

use crate::config::required;
use crate::error::{usage, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Independence,
    Clayton,
    Gumbel,
    Frank,
    StudentT,
    Ips,
    Gaussian,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReflectionName {
    #[default]
    None,
    Survival,
    Reflect1,
    Reflect2,
}

impl From<ReflectionName> for Reflection {
    fn from(r: ReflectionName) -> Self {
        match r {
            ReflectionName::None => Reflection::None,
            ReflectionName::Survival => Reflection::Survival,
            ReflectionName::Reflect1 => Reflection::Reflect1,
            ReflectionName::Reflect2 => Reflection::Reflect2,
        }
    }
}

/// Copula parameters as given on the command line.
pub struct CopulaParams {
    pub theta: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub nu: Option<f64>,
}

pub fn build_copula(
    family: FamilyName,
    reflection: ReflectionName,
    p: &CopulaParams,
) -> CliResult<CopulaSpec> {
    let spec = match family {
        FamilyName::Independence => CopulaSpec::independence(),
        FamilyName::Clayton => CopulaSpec::clayton(required("theta", p.theta)?).map_err(usage)?,
        FamilyName::Gumbel => CopulaSpec::gumbel(required("delta", p.delta)?).map_err(usage)?,
        FamilyName::Frank => CopulaSpec::frank(required("theta", p.theta)?).map_err(usage)?,
        FamilyName::Ips => CopulaSpec::ips(required("theta", p.theta)?).map_err(usage)?,
        FamilyName::StudentT => {
            CopulaSpec::student_t(required("rho", p.rho)?, required("nu", p.nu)?).map_err(usage)?
        }
        FamilyName::Gaussian => CopulaSpec::gaussian(required("rho", p.rho)?).map_err(usage)?,
    };
    Ok(spec.reflect(reflection.into()))
}
