use serde::{Deserialize, Serialize};

use crate::channels::BETA_OVER_C;
use crate::error::{Error, Result};
use crate::specfun;

/// Largest admissible `c r0`; the three-body range must be short compared
/// with the two-body length `1/c`.
pub const MAX_C_R0: f64 = 0.05;

/// A short-range three-body interaction.
pub trait ThreeBodyPotential: Send + Sync {
    /// Hyperangle-averaged lowest-channel matrix element `U_00(R)`.
    fn averaged(&self, r: f64) -> f64;

    /// `U_3b(R, alpha)`. Defaults to a hyperangle-independent interaction, in
    /// which case every channel sees the averaged value.
    fn value(&self, r: f64, _alpha: f64) -> f64 {
        self.averaged(r)
    }

    /// Hyperradius beyond which the interaction vanishes identically.
    fn range(&self) -> f64;
}

/// Square well plus a `-beta/R` term that cancels the small-`R` adiabatic
/// potential of channel zero:
///
/// `U_00(R) = -q^2 - beta / R` for `R < r0`, zero otherwise, with
/// `beta = 3 sqrt(2) c / pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPotential {
    q: f64,
    r0: f64,
    c: f64,
}

impl ModelPotential {
    pub fn new(q: f64, r0: f64, c: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::invalid(format!("well parameter q = {q} must be > 0")));
        }
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::invalid(format!("range r0 = {r0} must be > 0")));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!("coupling c = {c} must be >= 0")));
        }
        if r0 * c > MAX_C_R0 {
            return Err(Error::invalid(format!(
                "r0*c <= 0.05 violated: r0*c = {}",
                r0 * c
            )));
        }
        Ok(ModelPotential { q, r0, c })
    }

    /// Build from the dimensionless well strength `q r0`.
    pub fn from_qr0(qr0: f64, r0: f64, c: f64) -> Result<Self> {
        ModelPotential::new(qr0 / r0, r0, c)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn qr0(&self) -> f64 {
        self.q * self.r0
    }

    pub fn beta(&self) -> f64 {
        BETA_OVER_C * self.c
    }

    /// `J0(q r0) / [q r0 J1(q r0)]`. Fails at zeros of `J1(q r0)`.
    pub fn j_ratio(&self) -> Result<f64> {
        let x = self.qr0();
        let j = specfun::j_all(x);
        if j[1].abs() < 1e-10 {
            return Err(Error::Resonance(format!(
                "J1(q r0) = {:e} vanishes at q r0 = {x}",
                j[1]
            )));
        }
        Ok(j[0] / (x * j[1]))
    }

    /// Same potential with every length multiplied by `s`.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        ModelPotential::new(self.q / s, self.r0 * s, self.c / s)
    }
}

impl ThreeBodyPotential for ModelPotential {
    fn averaged(&self, r: f64) -> f64 {
        if r < self.r0 {
            -self.q * self.q - self.beta() / r
        } else {
            0.0
        }
    }

    fn range(&self) -> f64 {
        self.r0
    }
}

/// `U_00(R)` of the model potential, `R > 0`.
pub fn potential_value(p: &ModelPotential, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("potential_value", format!("R = {r} must be > 0")));
    }
    Ok(p.averaged(r))
}
