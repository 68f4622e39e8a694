use super::{BoxGeometry, Energy, PairPotential};
use crate::error::{Error, Result};

const MAX_TAIL_SHELLS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Periodization {
    /// Only the nearest image can interact; exact.
    NearestImage,
    /// Images with `‖n‖∞ <= cutoff`, the rest bounded by the envelope.
    LatticeSum { cutoff: usize },
}

/// `V^per` on a box, with a bound on the neglected images.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPotential {
    potential: PairPotential,
    geometry: BoxGeometry,
    mode: Periodization,
    tail: f64,
}

/// Builds `V^per(x) = Σ_{‖n‖∞ <= cutoff} V(x + nL)`.
///
/// When the range is below `L/2` only the nearest image contributes and the
/// tail is 0. Otherwise the images beyond the cutoff are bounded shell by
/// shell: the `(2k+1)^d - (2k-1)^d` images with `‖n‖∞ = k` sit at distance
/// at least `kL - L√d/2` from any point of the box.
pub fn periodize(potential: &PairPotential, geometry: &BoxGeometry, cutoff: usize) -> Result<PeriodicPotential> {
    if cutoff == 0 {
        return Err(Error::invalid("lattice_cutoff", "must be at least 1"));
    }
    let l = geometry.side();
    let h = potential.hard_core_radius();
    if h > 0.0 && l <= 2.0 * h {
        return Err(Error::invalid("side", format!("L = {l} must exceed twice the hard-core radius {h}")));
    }
    if potential.range() < l / 2.0 {
        return Ok(PeriodicPotential {
            potential: *potential,
            geometry: *geometry,
            mode: Periodization::NearestImage,
            tail: 0.0,
        });
    }
    let d = geometry.dim() as i32;
    let offset = l * (d as f64).sqrt() / 2.0;
    let first = (cutoff + 1) as f64 * l - offset;
    if first < potential.envelope_radius() {
        return Err(Error::TailNotCertifiable(format!(
            "first neglected image at distance {first} lies inside the envelope radius {}",
            potential.envelope_radius()
        )));
    }
    let mut tail = 0.0;
    let mut converged = false;
    for k in cutoff + 1..cutoff + 1 + MAX_TAIL_SHELLS {
        let kf = k as f64;
        let count = (2.0 * kf + 1.0).powi(d) - (2.0 * kf - 1.0).powi(d);
        let term = count * potential.psi(kf * l - offset);
        if !term.is_finite() {
            break;
        }
        tail += term;
        if term == 0.0 || term <= tail * 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged || !tail.is_finite() {
        return Err(Error::NonConvergent("envelope sum over lattice images".into()));
    }
    Ok(PeriodicPotential {
        potential: *potential,
        geometry: *geometry,
        mode: Periodization::LatticeSum { cutoff },
        tail,
    })
}

impl PeriodicPotential {
    pub fn potential(&self) -> &PairPotential {
        &self.potential
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    pub fn mode(&self) -> Periodization {
        self.mode
    }

    /// Bound on `|V^per - Σ_{‖n‖∞ <= cutoff}|`; 0 for nearest image.
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    /// `V^per(x)` for a displacement with `dim` coordinates.
    pub fn energy(&self, x: &[f64]) -> Energy {
        debug_assert_eq!(x.len(), self.geometry.dim());
        let g = &self.geometry;
        match self.mode {
            Periodization::NearestImage => self.potential.energy(g.minimum_image_distance(x)),
            Periodization::LatticeSum { cutoff } => {
                let mut y = [0.0; 3];
                for (slot, &c) in y.iter_mut().zip(x) {
                    *slot = g.wrap(c);
                }
                let c = cutoff as i64;
                let l = g.side();
                let span = |active: bool| if active { -c..=c } else { 0..=0 };
                let d = g.dim();
                let mut total = Energy::Finite(0.0);
                for n0 in -c..=c {
                    for n1 in span(d > 1) {
                        for n2 in span(d > 2) {
                            let shift = [n0, n1, n2];
                            let r2: f64 = (0..d).map(|i| (y[i] + shift[i] as f64 * l).powi(2)).sum();
                            total = total + self.potential.energy(r2.sqrt());
                            if total.is_hard_core() {
                                return total;
                            }
                        }
                    }
                }
                total
            }
        }
    }

    /// `f(x) = e^{-βV^per(x)} - 1`.
    pub fn mayer_f(&self, beta: f64, x: &[f64]) -> f64 {
        self.energy(x).mayer_f(beta)
    }


    /// Points of the box `[-L/2, L/2]` (one coordinate) where an image of a
    /// breakpoint of `V` lands, i.e. where the one-dimensional `f^per` jumps.
    pub fn breakpoints_1d(&self) -> Vec<f64> {
        let l = self.geometry.side();
        let c = match self.mode {
            Periodization::NearestImage => 1,
            Periodization::LatticeSum { cutoff } => cutoff as i64,
        };
        let mut out = Vec::new();
        for b in self.potential.breakpoints() {
            for n in -c..=c {
                for p in [b + n as f64 * l, -b + n as f64 * l] {
                    if p > -l / 2.0 && p < l / 2.0 {
                        out.push(p);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}
