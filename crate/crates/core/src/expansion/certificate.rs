//! Convergence certificate on the vertex-subset polymers of `{1, …, N}`
//! with `a(V) = a|V|` and `c(V) = c|V|`.

use crate::error::{check_range, Error, Result};
use crate::polymer::l_factor;

/// Largest particle number the certificate handles.
pub const MAX_CERTIFIED_PARTICLES: usize = 4096;

/// How `|ζ_Λ(V)|` was obtained for one size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaSource {
    /// Computed value plus its error estimate.
    Computed,
    /// The tree-graph bound.
    TreeGraphBound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexZeta {
    pub size: usize,
    /// Upper bound used for `|ζ_Λ(V)|`, `|V| = size`.
    pub magnitude: f64,
    pub source: ZetaSource,
}

/// Both convergence hypotheses evaluated on all of `V(N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCertificate {
    pub particles: usize,
    pub a: f64,
    pub c: f64,
    /// `max_V |ζ(V)| e^{a|V|}`.
    pub delta: f64,
    pub l_factor: f64,
    pub zeta: Vec<VertexZeta>,
    /// `a j / L - Σ_{V ∩ V' ≠ ∅} |ζ(V)| e^{(a+c)|V|}` for `|V'| = j`,
    /// `j = 1..=N`.
    pub margins: Vec<f64>,
    pub holds: bool,
}

impl VertexCertificate {
    pub fn alpha(&self) -> f64 {
        self.a + self.c
    }

    /// `L e^α`, the constant of the decay bound.
    pub fn decay_constant(&self) -> f64 {
        self.l_factor * self.alpha().exp()
    }

    /// `L e^α e^{-cn}`.
    pub fn decay_bound(&self, n: usize) -> f64 {
        self.decay_constant() * (-self.c * n as f64).exp()
    }

    /// `L e^α e^{-c(n+M)/2}`.
    pub fn truncation_bound(&self, n: usize, max_norm: usize) -> f64 {
        self.decay_constant() * (-self.c * (n + max_norm) as f64 / 2.0).exp()
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn failed_hypothesis(&self) -> Option<&'static str> {
        if self.delta >= 1.0 {
            Some("smallness: max |zeta(V)| e^(a|V|) < 1")
        } else if !self.holds {
            Some("incompatible sum: sum |zeta(V)| e^((a+c)|V|) <= a|V'|/L")
        } else {
            None
        }
    }
}

fn validate(particles: usize, zeta: &[VertexZeta]) -> Result<()> {
    check_range("particle number", particles, 1, MAX_CERTIFIED_PARTICLES)?;
    let sizes: Vec<usize> = zeta.iter().map(|z| z.size).collect();
    let want: Vec<usize> = (2..=particles).collect();
    if sizes != want {
        return Err(Error::invalid("zeta", format!("need one entry per size 2..={particles}")));
    }
    if zeta.iter().any(|z| !(z.magnitude >= 0.0 && z.magnitude.is_finite())) {
        return Err(Error::invalid("zeta", "magnitudes must be finite and nonnegative"));
    }
    Ok(())
}

/// `ln C(N, k)` for every `k`, and `C(N-j, k)/C(N, k)`.
struct Binomials {
    log_choose: Vec<f64>,
}

impl Binomials {
    fn new(n: usize) -> Self {
        let mut log_choose = vec![0.0; n + 1];
        for k in 1..=n {
            log_choose[k] = log_choose[k - 1] + ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        Binomials { log_choose }
    }

    /// `C(N, k) - C(N - j, k)`, the number of `k`-sets meeting a fixed
    /// `j`-set, as `ln`.
    fn log_meeting(&self, n: usize, j: usize, k: usize) -> f64 {
        let mut ratio = 1.0;
        for i in 0..k {
            if n - i <= j {
                ratio = 0.0;
                break;
            }
            ratio *= (n - j - i) as f64 / (n - i) as f64;
        }
        self.log_choose[k] + (-ratio).ln_1p()
    }
}

/// Evaluates the certificate at given `a`, `c`.
pub fn vertex_certificate(particles: usize, zeta: &[VertexZeta], a: f64, c: f64) -> Result<VertexCertificate> {
    validate(particles, zeta)?;
    for (name, v) in [("a", a), ("c", c)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("{v} must be finite and positive")));
        }
    }
    let delta = zeta
        .iter()
        .map(|z| z.magnitude * (a * z.size as f64).exp())
        .fold(0.0f64, f64::max);
    let l = if delta == 0.0 {
        1.0
    } else if delta < 1.0 {
        l_factor(delta)?
    } else {
        f64::INFINITY
    };
    let binomials = Binomials::new(particles);
    let margins: Vec<f64> = (1..=particles)
        .map(|j| {
            let load: f64 = zeta
                .iter()
                .filter(|z| z.magnitude > 0.0)
                .map(|z| {
                    let k = z.size;
                    (binomials.log_meeting(particles, j, k) + z.magnitude.ln() + (a + c) * k as f64).exp()
                })
                .sum();
            a * j as f64 / l - load
        })
        .collect();
    let holds = delta < 1.0 && margins.iter().all(|&m| m >= 0.0);
    Ok(VertexCertificate {
        particles,
        a,
        c,
        delta,
        l_factor: l,
        zeta: zeta.to_vec(),
        margins,
        holds,
    })
}

const C_CAP: f64 = 20.0;

/// Scans `a` on a grid and, for each, bisects for the largest `c` that
/// certifies. Returns the certificate with the largest `c`.
pub fn search_vertex_parameters(particles: usize, zeta: &[VertexZeta]) -> Result<Option<VertexCertificate>> {
    validate(particles, zeta)?;
    let mut best: Option<VertexCertificate> = None;
    for step in 1..=200 {
        let a = step as f64 * 0.02;
        let ok = |c: f64| vertex_certificate(particles, zeta, a, c).map(|cert| cert.holds);
        if !ok(1e-9)? {
            continue;
        }
        let c = if ok(C_CAP)? {
            C_CAP
        } else {
            let (mut lo, mut hi) = (1e-9, C_CAP);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if ok(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if best.as_ref().is_none_or(|b| c > b.c) {
            best = Some(vertex_certificate(particles, zeta, a, c)?);
        }
    }
    Ok(best)
}
