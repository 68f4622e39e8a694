//! Radial pair potentials, the periodic box, periodization and the Mayer
//! function.

mod integrals;
mod periodic;
mod spec;
mod stability;

use crate::error::{Error, Result};

pub use integrals::{c_beta, c_beta_box};
pub(crate) use integrals::{box_integral, radial};
pub use periodic::{periodize, PeriodicPotential, Periodization};
pub use spec::parse_potential_spec;
pub use stability::{configuration_energy, stability_check, StabilityReport, MAX_STABILITY_PARTICLES};

/// Energy of a pair: finite, or the hard-core sentinel standing for `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Energy {
    Finite(f64),
    HardCore,
}

impl Energy {
    pub fn is_hard_core(self) -> bool {
        matches!(self, Energy::HardCore)
    }

    /// `e^{-βV} - 1`, exactly `-1` inside a hard core.
    pub fn mayer_f(self, beta: f64) -> f64 {
        match self {
            Energy::HardCore => -1.0,
            Energy::Finite(v) => (-beta * v).exp_m1(),
        }
    }

    /// `e^{-βV}`, exactly 0 inside a hard core.
    pub fn boltzmann(self, beta: f64) -> f64 {
        match self {
            Energy::HardCore => 0.0,
            Energy::Finite(v) => (-beta * v).exp(),
        }
    }
}

impl std::ops::Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        match (self, rhs) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::Finite(a + b),
            _ => Energy::HardCore,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialKind {
    /// `V = 0`.
    Zero,
    /// Hard rod (d = 1) or hard sphere: `+inf` below `sigma`, 0 beyond.
    HardCore { sigma: f64 },
    /// Hard core `sigma`, depth `-epsilon` up to `lambda * sigma`.
    SquareWell { sigma: f64, epsilon: f64, lambda: f64 },
    /// `epsilon * exp(-r^2 / width^2)`; `epsilon` may be negative.
    Gaussian { epsilon: f64, width: f64 },
    /// Lennard-Jones truncated at `cutoff` and shifted to vanish there, with
    /// a hard floor below `r_min`.
    LennardJones { epsilon: f64, sigma: f64, cutoff: f64, r_min: f64 },
}

/// A radial pair potential with its declared stability constant `B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairPotential {
    kind: PotentialKind,
    /// Explicit override; otherwise `B` follows from the kind and dimension.
    stability_b: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} must be finite and positive")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} must be finite and nonnegative")))
    }
}

// Neighbours that fit within `reach` of a particle when no two come closer
// than `spacing`, by volume packing in `dim` dimensions.
fn packing_count(reach: f64, spacing: f64, dim: usize) -> f64 {
    (2.0 * reach / spacing + 1.0).powi(dim as i32) - 1.0
}

impl PairPotential {
    pub fn zero() -> Self {
        PairPotential {
            kind: PotentialKind::Zero,
            stability_b: None,
        }
    }

    pub fn hard_core(sigma: f64) -> Result<Self> {
        Ok(PairPotential {
            kind: PotentialKind::HardCore {
                sigma: positive("sigma", sigma)?,
            },
            stability_b: None,
        })
    }

    /// Declared `B = epsilon * n / 2` with `n` a packing bound on the
    /// neighbours inside the well.
    pub fn square_well(sigma: f64, epsilon: f64, lambda: f64) -> Result<Self> {
        let sigma = positive("sigma", sigma)?;
        let epsilon = nonnegative("epsilon", epsilon)?;
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(Error::invalid("lambda", format!("{lambda} must be at least 1")));
        }
        Ok(PairPotential {
            kind: PotentialKind::SquareWell { sigma, epsilon, lambda },
            stability_b: None,
        })
    }

    /// Declared `B = 0`, which is correct for `epsilon >= 0`; a negative
    /// amplitude needs an explicit [`with_stability_b`](Self::with_stability_b).
    pub fn gaussian(epsilon: f64, width: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        Ok(PairPotential {
            kind: PotentialKind::Gaussian {
                epsilon,
                width: positive("width", width)?,
            },
            stability_b: None,
        })
    }

    pub fn lennard_jones(epsilon: f64, sigma: f64, cutoff: f64, r_min: f64) -> Result<Self> {
        let epsilon = nonnegative("epsilon", epsilon)?;
        let sigma = positive("sigma", sigma)?;
        let cutoff = positive("cutoff", cutoff)?;
        let r_min = positive("r_min", r_min)?;
        if r_min >= cutoff {
            return Err(Error::invalid("r_min", "must be below the cutoff"));
        }
        Ok(PairPotential {
            kind: PotentialKind::LennardJones {
                epsilon,
                sigma,
                cutoff,
                r_min,
            },
            stability_b: None,
        })
    }

    /// Overrides the declared stability constant.
    pub fn with_stability_b(self, b: f64) -> Result<Self> {
        Ok(PairPotential {
            stability_b: Some(nonnegative("stability_b", b)?),
            ..self
        })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// `B` valid in every dimension up to 3.
    pub fn stability_b(&self) -> f64 {
        self.stability_b_in(3)
    }

    /// `B` with `V(q_1..q_n) >= -B n` in `dim` dimensions: the override if
    /// set, else half the well depth times the neighbours that fit in range.
    pub fn stability_b_in(&self, dim: usize) -> f64 {
        if let Some(b) = self.stability_b {
            return b;
        }
        match self.kind {
            PotentialKind::SquareWell { sigma, epsilon, lambda } => epsilon * packing_count(lambda * sigma, sigma, dim) / 2.0,
            PotentialKind::LennardJones { epsilon, cutoff, r_min, .. } => epsilon * packing_count(cutoff, r_min, dim) / 2.0,
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            PotentialKind::Zero => true,
            PotentialKind::Gaussian { epsilon, .. } => epsilon == 0.0,
            _ => false,
        }
    }

    /// `V(r)` at distance `r >= 0`.
    pub fn energy(&self, r: f64) -> Energy {
        match self.kind {
            PotentialKind::Zero => Energy::Finite(0.0),
            PotentialKind::HardCore { sigma } => {
                if r < sigma {
                    Energy::HardCore
                } else {
                    Energy::Finite(0.0)
                }
            }
            PotentialKind::SquareWell { sigma, epsilon, lambda } => {
                if r < sigma {
                    Energy::HardCore
                } else if r < lambda * sigma {
                    Energy::Finite(-epsilon)
                } else {
                    Energy::Finite(0.0)
                }
            }
            PotentialKind::Gaussian { epsilon, width } => {
                Energy::Finite(epsilon * (-(r / width).powi(2)).exp())
            }
            PotentialKind::LennardJones {
                epsilon,
                sigma,
                cutoff,
                r_min,
            } => {
                if r < r_min {
                    Energy::HardCore
                } else if r < cutoff {
                    Energy::Finite(lj(epsilon, sigma, r) - lj(epsilon, sigma, cutoff))
                } else {
                    Energy::Finite(0.0)
                }
            }
        }
    }

    /// `V` at a displacement vector.
    pub fn energy_at(&self, x: &[f64]) -> Energy {
        self.energy(x.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// `e^{-βV(r)} - 1`.
    pub fn mayer_f(&self, beta: f64, r: f64) -> f64 {
        self.energy(r).mayer_f(beta)
    }

    pub fn hard_core_radius(&self) -> f64 {
        match self.kind {
            PotentialKind::HardCore { sigma } | PotentialKind::SquareWell { sigma, .. } => sigma,
            PotentialKind::LennardJones { r_min, .. } => r_min,
            _ => 0.0,
        }
    }

    /// Radius beyond which `V` vanishes identically; infinite for the
    /// Gaussian.
    pub fn range(&self) -> f64 {
        match self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::HardCore { sigma } => sigma,
            PotentialKind::SquareWell { sigma, lambda, .. } => sigma * lambda,
            PotentialKind::Gaussian { epsilon, .. } if epsilon == 0.0 => 0.0,
            PotentialKind::Gaussian { .. } => f64::INFINITY,
            PotentialKind::LennardJones { cutoff, .. } => cutoff,
        }
    }

    /// Radii where `V` jumps or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            PotentialKind::Zero | PotentialKind::Gaussian { .. } => Vec::new(),
            PotentialKind::HardCore { sigma } => vec![sigma],
            PotentialKind::SquareWell { sigma, lambda, .. } if lambda > 1.0 => vec![sigma, lambda * sigma],
            PotentialKind::SquareWell { sigma, .. } => vec![sigma],
            PotentialKind::LennardJones { cutoff, r_min, .. } => vec![r_min, cutoff],
        }
    }

    /// True if `V` is constant between breakpoints, so that quadrature with
    /// one panel per piece is exact.
    pub fn is_piecewise_constant(&self) -> bool {
        matches!(
            self.kind,
            PotentialKind::Zero | PotentialKind::HardCore { .. } | PotentialKind::SquareWell { .. }
        ) || self.is_zero()
    }

    /// Decreasing envelope `ψ` with `V >= -ψ` everywhere and `V <= ψ`
    /// beyond [`envelope_radius`](Self::envelope_radius).
    pub fn psi(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Zero | PotentialKind::HardCore { .. } => 0.0,
            PotentialKind::SquareWell { sigma, epsilon, lambda } => {
                if r < lambda * sigma {
                    epsilon
                } else {
                    0.0
                }
            }
            PotentialKind::Gaussian { epsilon, width } => epsilon.abs() * (-(r / width).powi(2)).exp(),
            PotentialKind::LennardJones { epsilon, cutoff, .. } => {
                if r < cutoff {
                    epsilon
                } else {
                    0.0
                }
            }
        }
    }

    /// `r_V`.
    pub fn envelope_radius(&self) -> f64 {
        match self.kind {
            PotentialKind::Gaussian { .. } | PotentialKind::Zero => 0.0,
            _ => self.range(),
        }
    }

    /// Radius beyond which `|e^{-βV} - 1|` stays below `1e-17` relative to
    /// the unit scale; the range itself for finite-range potentials.
    pub fn support_radius(&self, beta: f64) -> f64 {
        match self.kind {
            PotentialKind::Gaussian { epsilon, width } if epsilon != 0.0 => {
                let scale = beta * epsilon.abs();
                let ratio = scale / 1e-17;
                if ratio <= 1.0 {
                    0.0
                } else {
                    width * ratio.ln().sqrt()
                }
            }
            _ => self.range(),
        }
    }
}

fn lj(epsilon: f64, sigma: f64, r: f64) -> f64 {
    let s6 = (sigma / r).powi(6);
    4.0 * epsilon * (s6 * s6 - s6)
}

/// The periodic box `(-L/2, L/2]^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxGeometry {
    dim: usize,
    side: f64,
}

impl BoxGeometry {
    pub fn new(dim: usize, side: f64) -> Result<Self> {
        crate::error::check_range("dimension", dim, 1, 3)?;
        Ok(BoxGeometry {
            dim,
            side: positive("side", side)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// `|Λ| = L^d`.
    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Maps a coordinate into `(-L/2, L/2]`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.side;
        let mut y = x - l * (x / l).round();
        if y <= -l / 2.0 {
            y += l;
        } else if y > l / 2.0 {
            y -= l;
        }
        y
    }

    /// Length of the minimum-image displacement.
    pub fn minimum_image_distance(&self, x: &[f64]) -> f64 {
        x.iter().map(|&c| self.wrap(c).powi(2)).sum::<f64>().sqrt()
    }
}
