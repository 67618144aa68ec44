use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::welch::Psd;
use super::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Theta,
    Alpha,
    Beta,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Theta, Band::Alpha, Band::Beta];

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Theta => "theta",
            Band::Alpha => "alpha",
            Band::Beta => "beta",
        }
    }

    pub fn definition(self) -> BandDefinition {
        let (lo, hi) = match self {
            Band::Theta => (4.0, 7.0),
            Band::Alpha => (8.0, 13.0),
            Band::Beta => (13.0, 30.0),
        };
        BandDefinition { band: self, lo, hi }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Band {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "theta" | "θ" => Ok(Band::Theta),
            "alpha" | "α" => Ok(Band::Alpha),
            "beta" | "β" => Ok(Band::Beta),
            other => Err(format!("unknown band {other:?}")),
        }
    }
}

/// Closed frequency interval in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDefinition {
    pub band: Band,
    pub lo: f64,
    pub hi: f64,
}

/// θ, α, β values, either absolute power or relative fractions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BandPowers(pub [f64; 3]);

impl BandPowers {
    pub fn new(theta: f64, alpha: f64, beta: f64) -> Self {
        BandPowers([theta, alpha, beta])
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn get(&self, band: Band) -> f64 {
        self.0[band.index()]
    }
}

impl Index<Band> for BandPowers {
    type Output = f64;

    fn index(&self, band: Band) -> &f64 {
        &self.0[band.index()]
    }
}

/// Absolute power in θ, α and β by trapezoidal integration of the density.
///
/// Each band is integrated over its closed interval, so the shared 13 Hz
/// boundary contributes no mass to either side.
pub fn band_powers(psd: &Psd) -> Result<BandPowers, SpectralError> {
    let mut out = [0.0; 3];
    for band in Band::ALL {
        let def = band.definition();
        out[band.index()] = integrate_checked(psd, def.lo, def.hi)?;
    }
    Ok(BandPowers(out))
}

pub(crate) fn integrate_checked(psd: &Psd, lo: f64, hi: f64) -> Result<f64, SpectralError> {
    let first = psd.frequencies.first().copied().unwrap_or(f64::NAN);
    let last = psd.frequencies.last().copied().unwrap_or(f64::NAN);
    if psd.frequencies.len() < 2 || lo < first || hi > last {
        return Err(SpectralError::BandOutsideGrid { lo, hi });
    }
    Ok(psd.integrate(lo, hi))
}

/// Divides each band by the θ+α+β total.
pub fn normalize_bands(powers: BandPowers) -> Result<BandPowers, SpectralError> {
    normalize_by(powers, powers.sum())
}

pub(crate) fn normalize_by(powers: BandPowers, total: f64) -> Result<BandPowers, SpectralError> {
    if !(total > 0.0) || powers.0.iter().any(|v| *v < 0.0) {
        return Err(SpectralError::ZeroPower);
    }
    Ok(BandPowers(powers.0.map(|v| v / total)))
}
