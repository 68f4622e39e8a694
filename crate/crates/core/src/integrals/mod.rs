//! Graph activities `ζ̃_Λ(g)`, vertex activities `ζ_Λ(V)`, the connected
//! coefficients `b_n(Λ)` and the irreducible coefficients `β_n`.
//!
//! In one dimension every integral is an iterated quadrature whose panels
//! follow the jumps of the Mayer function, exact for piecewise-constant
//! potentials. In two and three dimensions the single-edge integral is a
//! radial or box quadrature and everything else is Monte Carlo, sampling
//! points along a spanning tree of the graph.

pub mod mc;
mod nested;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_range, Error, Result};
use crate::estimate::{IntegralResult, Method};
use crate::graph::{connected_graphs, two_connected_graphs, CanonicalForm, LabeledGraph};
use crate::potential::{
    box_integral, c_beta_box, periodize, radial, BoxGeometry, PairPotential, PeriodicPotential, Periodization,
};
use nested::{Domain, Integrand, Nested};

pub use mc::derive_seed;

/// Largest graph accepted by [`zeta_tilde`] and [`zeta_vertex`].
pub const MAX_ZETA_ORDER: usize = 6;
/// Largest reduced dimension `d (|g| - 1)` handled by quadrature.
pub const MAX_QUADRATURE_DIMENSION: usize = 12;
pub const MAX_BETA_ORDER: usize = 4;
pub const MAX_B_ORDER: usize = 5;

/// Proposal used by the Monte Carlo estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Each point uniform in a cube around its parent in a spanning tree of
    /// the graph, the cube covering the support of `f`.
    Tree,
    /// Every point uniform over the whole domain.
    Uniform,
}

/// How to evaluate an integral. Quadrature falls back to Monte Carlo with
/// the given sample count and seed where no quadrature route exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrator {
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub sampling: Sampling,
}

impl Integrator {
    pub fn quadrature() -> Self {
        Integrator {
            method: Method::Quadrature,
            samples: 1 << 18,
            seed: 0,
            sampling: Sampling::Tree,
        }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Integrator {
            method: Method::MonteCarlo,
            samples,
            seed,
            sampling: Sampling::Tree,
        }
    }

    pub fn with_sampling(self, sampling: Sampling) -> Self {
        Integrator { sampling, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Integrator { seed, ..self }
    }

    fn wants_quadrature(&self) -> bool {
        self.method != Method::MonteCarlo
    }
}

/// A potential periodized on a box at inverse temperature `β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxModel {
    periodic: PeriodicPotential,
    beta: f64,
    lattice_cutoff: usize,
}

impl BoxModel {
    pub fn new(potential: &PairPotential, geometry: &BoxGeometry, beta: f64, lattice_cutoff: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("{beta} must be finite and positive")));
        }
        Ok(BoxModel {
            periodic: periodize(potential, geometry, lattice_cutoff)?,
            beta,
            lattice_cutoff,
        })
    }

    pub fn potential(&self) -> &PairPotential {
        self.periodic.potential()
    }

    pub fn geometry(&self) -> &BoxGeometry {
        self.periodic.geometry()
    }

    pub fn periodic(&self) -> &PeriodicPotential {
        &self.periodic
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lattice_cutoff(&self) -> usize {
        self.lattice_cutoff
    }

    pub fn dim(&self) -> usize {
        self.geometry().dim()
    }

    pub fn volume(&self) -> f64 {
        self.geometry().volume()
    }

    /// `f^per` at a displacement.
    pub fn mayer_f(&self, x: &[f64]) -> f64 {
        self.periodic.mayer_f(self.beta, x)
    }

    /// `C_Λ(β)`.
    pub fn c_lambda(&self) -> Result<IntegralResult> {
        c_beta_box(self.potential(), self.beta, self.geometry(), self.lattice_cutoff)
    }

    /// `∫_Λ f^per(y) dy`.
    pub fn edge_integral(&self) -> Result<IntegralResult> {
        if self.periodic.mode() == Periodization::NearestImage {
            radial(self.potential(), self.beta, self.dim(), |f| f)
        } else {
            Ok(box_integral(&self.periodic, |f| f, self.beta))
        }
    }
}

/// Where points live during an integration.
enum Space<'a> {
    Box(&'a BoxModel),
    Free {
        potential: &'a PairPotential,
        beta: f64,
        dim: usize,
        radius: f64,
    },
}

impl Space<'_> {
    fn dim(&self) -> usize {
        match self {
            Space::Box(m) => m.dim(),
            Space::Free { dim, .. } => *dim,
        }
    }

    fn f(&self, x: &[f64]) -> f64 {
        match self {
            Space::Box(m) => m.mayer_f(x),
            Space::Free { potential, beta, .. } => {
                potential.mayer_f(*beta, x.iter().map(|c| c * c).sum::<f64>().sqrt())
            }
        }
    }

    fn potential(&self) -> &PairPotential {
        match self {
            Space::Box(m) => m.potential(),
            Space::Free { potential, .. } => potential,
        }
    }

    fn beta(&self) -> f64 {
        match self {
            Space::Box(m) => m.beta(),
            Space::Free { beta, .. } => *beta,
        }
    }

    /// Half-width of the whole domain.
    fn half_domain(&self) -> f64 {
        match self {
            Space::Box(m) => m.geometry().side() / 2.0,
            Space::Free { radius, .. } => *radius,
        }
    }

    /// Half-width of a cube around a point outside which `f` vanishes.
    fn half_kernel(&self) -> f64 {
        let reach = self.potential().support_radius(self.beta());
        match self {
            Space::Box(m) if m.periodic().mode() != Periodization::NearestImage => self.half_domain(),
            _ => reach.min(self.half_domain()),
        }
    }

    /// Measure each free point is normalized by.
    fn norm(&self) -> f64 {
        match self {
            Space::Box(m) => m.volume(),
            Space::Free { .. } => 1.0,
        }
    }

    fn place(&self, x: f64) -> f64 {
        match self {
            Space::Box(m) => m.geometry().wrap(x),
            Space::Free { .. } => x,
        }
    }

    fn domain_1d(&self) -> Domain {
        match self {
            Space::Box(m) => Domain::Periodic {
                side: m.geometry().side(),
            },
            Space::Free { radius, .. } => Domain::Free { radius: *radius },
        }
    }

    /// Jumps of the one-dimensional `f`, plus a few soft cuts around the
    /// support of a smooth one.
    fn breakpoints_1d(&self) -> Vec<f64> {
        let p = self.potential();
        let mut base = match self {
            Space::Box(m) => m.periodic().breakpoints_1d(),
            Space::Free { .. } => p.breakpoints().iter().flat_map(|&b| [-b, b]).collect(),
        };
        if !p.is_piecewise_constant() {
            let reach = p.support_radius(self.beta());
            for s in [1.0, 0.5, 0.25] {
                let x = s * reach;
                if x > 0.0 && x < self.half_domain() {
                    base.push(x);
                    base.push(-x);
                }
            }
        }
        base.sort_by(f64::total_cmp);
        base.dedup();
        base
    }
}

/// Vertices of `g` reordered breadth-first from the lowest label, with the
/// earlier neighbours and the tree parent of each position.
struct Layout {
    order: usize,
    earlier: Vec<Vec<usize>>,
    parent: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Layout {
    fn new(g: &LabeledGraph) -> Layout {
        let n = g.order();
        let nb = g.neighbours();
        let mut seq = vec![0usize];
        let mut pos = vec![usize::MAX; n];
        pos[0] = 0;
        let mut parent = vec![0usize; n];
        let mut head = 0;
        while head < seq.len() {
            let v = seq[head];
            head += 1;
            for &w in &nb[v] {
                if pos[w] == usize::MAX {
                    pos[w] = seq.len();
                    parent[seq.len()] = pos[v];
                    seq.push(w);
                }
            }
        }
        let mut earlier = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for (a, b) in g.index_edges() {
            let (x, y) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
            earlier[y].push(x);
            edges.push((x, y));
        }
        Layout {
            order: n,
            earlier,
            parent,
            edges,
        }
    }
}

fn nested_graph(space: &Space<'_>, layout: &Layout) -> IntegralResult {
    let f = |x: f64| space.f(&[x]);
    let nested = Nested {
        n: layout.order,
        domain: space.domain_1d(),
        base: space.breakpoints_1d(),
        exact: space.potential().is_piecewise_constant(),
        f: &f,
    };
    let out = nested.run(&Integrand::Graph {
        earlier: &layout.earlier,
    });
    let scale = space.norm().powi(layout.order as i32 - 1);
    IntegralResult::quadrature(out.value / scale, out.error / scale, out.nodes)
}

fn mc_graph(space: &Space<'_>, layout: &Layout, integrator: &Integrator) -> Result<IntegralResult> {
    let d = space.dim();
    let k = layout.order;
    let (half, tree) = match integrator.sampling {
        Sampling::Tree => (space.half_kernel(), true),
        Sampling::Uniform => (space.half_domain(), false),
    };
    let weight = ((2.0 * half).powi(d as i32) / space.norm()).powi(k as i32 - 1);
    mc::estimate(integrator.samples, integrator.seed, |rng: &mut ChaCha8Rng| {
        let mut q = [[0.0f64; 3]; 8];
        for m in 1..k {
            let from = if tree { q[layout.parent[m]] } else { [0.0; 3] };
            for c in 0..d {
                q[m][c] = space.place(from[c] + rng.gen_range(-half..half));
            }
        }
        let mut p = weight;
        for &(a, b) in &layout.edges {
            let mut x = [0.0; 3];
            for c in 0..d {
                x[c] = q[b][c] - q[a][c];
            }
            p *= space.f(&x[..d]);
            if p == 0.0 {
                break;
            }
        }
        p
    })
}

fn graph_integral(space: &Space<'_>, g: &LabeledGraph, integrator: &Integrator) -> Result<IntegralResult> {
    let k = g.order();
    if k == 1 {
        return Ok(IntegralResult::exact(1.0));
    }
    if space.potential().is_zero() {
        return Ok(IntegralResult::exact(0.0));
    }
    let d = space.dim();
    let layout = Layout::new(g);
    if integrator.wants_quadrature() && d * (k - 1) <= MAX_QUADRATURE_DIMENSION {
        if d == 1 {
            return Ok(nested_graph(space, &layout));
        }
        if k == 2 {
            return match space {
                Space::Box(m) => Ok(m.edge_integral()?.scaled(1.0 / m.volume())),
                Space::Free { potential, beta, dim, .. } => radial(potential, *beta, *dim, |f| f),
            };
        }
    }
    mc_graph(space, &layout, integrator)
}

fn check_connected(g: &LabeledGraph) -> Result<()> {
    check_range("graph order", g.order(), 1, MAX_ZETA_ORDER)?;
    if !g.is_connected()? {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// `ζ̃_Λ(g) = ∫_{Λ^{|g|}} Π_{{i,j} ∈ E(g)} f_{ij} Π dq_i/|Λ|`, with the lowest
/// vertex pinned at the origin.
pub fn zeta_tilde(g: &LabeledGraph, model: &BoxModel, integrator: &Integrator) -> Result<IntegralResult> {
    check_connected(g)?;
    graph_integral(&Space::Box(model), g, integrator)
}

/// `ζ̃_Λ(T) = (|Λ|^{-1} ∫_Λ f^per)^{|T|-1}` for a tree.
pub fn tree_weight_closed_form(tree: &LabeledGraph, model: &BoxModel) -> Result<f64> {
    if !tree.is_tree()? {
        return Err(Error::NotATree);
    }
    let edge = model.edge_integral()?.value / model.volume();
    Ok(edge.powi(tree.order() as i32 - 1))
}

#[derive(Clone, Debug)]
pub(crate) struct GraphClass {
    pub form: CanonicalForm,
    pub representative: LabeledGraph,
    pub count: u64,
}

/// Isomorphism classes of connected (or 2-connected) graphs on `1..=n`,
/// ordered by canonical form.
pub(crate) fn graph_classes(n: usize, two_connected: bool) -> Result<Arc<Vec<GraphClass>>> {
    static CACHE: OnceLock<Mutex<BTreeMap<(usize, bool), Arc<Vec<GraphClass>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(n, two_connected)) {
        return Ok(hit.clone());
    }
    let graphs: Vec<LabeledGraph> = if two_connected {
        two_connected_graphs(n)?.collect()
    } else {
        connected_graphs(n)?.collect()
    };
    let mut classes: BTreeMap<CanonicalForm, GraphClass> = BTreeMap::new();
    for g in graphs {
        let form = g.canonical_form();
        classes
            .entry(form)
            .or_insert_with(|| GraphClass {
                form,
                representative: g,
                count: 0,
            })
            .count += 1;
    }
    let list = Arc::new(classes.into_values().collect::<Vec<_>>());
    cache.lock().unwrap().insert((n, two_connected), list.clone());
    Ok(list)
}

fn class_tag(form: CanonicalForm) -> u64 {
    (form.order as u64) << 32 | form.bits as u64
}

/// `Σ c_i r_i` with Monte Carlo errors added in quadrature and the others
/// linearly.
pub(crate) fn weighted_sum(parts: &[(f64, IntegralResult)], seed: Option<u64>) -> IntegralResult {
    let mut value = 0.0;
    let (mut lin, mut sq) = (0.0, 0.0);
    let mut samples = 0;
    let mut method = Method::Exact;
    for (c, r) in parts {
        value += c * r.value;
        samples += r.samples;
        match r.method {
            Method::MonteCarlo => {
                sq += (c * r.error).powi(2);
                method = Method::MonteCarlo;
            }
            Method::Quadrature => {
                lin += (c * r.error).abs();
                if method == Method::Exact {
                    method = Method::Quadrature;
                }
            }
            Method::Exact => {}
        }
    }
    IntegralResult {
        value,
        error: lin + sq.sqrt(),
        method,
        samples,
        seed: if method == Method::MonteCarlo { seed } else { None },
    }
}

/// Per-class integrals over a class list, in parallel, each Monte Carlo run
/// on a seed derived from the class.
fn class_integrals(
    space: &Space<'_>,
    classes: &[GraphClass],
    integrator: &Integrator,
) -> Result<Vec<(f64, IntegralResult)>> {
    classes
        .par_iter()
        .map(|c| {
            let local = integrator.with_seed(derive_seed(integrator.seed, class_tag(c.form)));
            Ok((c.count as f64, graph_integral(space, &c.representative, &local)?))
        })
        .collect()
}

/// Memo of `ζ̃_Λ` by isomorphism class.
pub struct ZetaTable<'a> {
    model: &'a BoxModel,
    integrator: Integrator,
    cache: Mutex<BTreeMap<CanonicalForm, IntegralResult>>,
}

impl<'a> ZetaTable<'a> {
    pub fn new(model: &'a BoxModel, integrator: Integrator) -> Self {
        ZetaTable {
            model,
            integrator,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn model(&self) -> &BoxModel {
        self.model
    }

    pub fn integrator(&self) -> &Integrator {
        &self.integrator
    }

    /// Computes every class among `graphs` not yet known, in parallel.
    pub fn prefill<'g>(&self, graphs: impl IntoIterator<Item = &'g LabeledGraph>) -> Result<()> {
        let mut todo: BTreeMap<CanonicalForm, &LabeledGraph> = BTreeMap::new();
        {
            let cache = self.cache.lock().unwrap();
            for g in graphs {
                let form = g.canonical_form();
                if !cache.contains_key(&form) {
                    todo.entry(form).or_insert(g);
                }
            }
        }
        let done: Vec<(CanonicalForm, IntegralResult)> = todo
            .into_par_iter()
            .map(|(form, g)| Ok((form, self.compute(form, g)?)))
            .collect::<Result<_>>()?;
        self.cache.lock().unwrap().extend(done);
        Ok(())
    }

    fn compute(&self, form: CanonicalForm, g: &LabeledGraph) -> Result<IntegralResult> {
        let local = self
            .integrator
            .with_seed(derive_seed(self.integrator.seed, class_tag(form)));
        zeta_tilde(g, self.model, &local)
    }

    pub fn get(&self, g: &LabeledGraph) -> Result<IntegralResult> {
        let form = g.canonical_form();
        if let Some(r) = self.cache.lock().unwrap().get(&form) {
            return Ok(*r);
        }
        let r = self.compute(form, g)?;
        self.cache.lock().unwrap().insert(form, r);
        Ok(r)
    }
}

/// The two ways of summing graphs in [`zeta_vertex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRoute {
    /// `Σ_{g ∈ C_n} ζ̃_Λ(g)`, one integral per isomorphism class.
    GraphSum,
    /// One integral of the connected part of `Π_{i<j} (1 + f_ij)`.
    InclusionExclusion,
}

/// `ζ_Λ(V)` for `|V| = n`.
pub fn zeta_vertex(n: usize, model: &BoxModel, integrator: &Integrator, route: VertexRoute) -> Result<IntegralResult> {
    check_range("polymer size", n, 1, MAX_ZETA_ORDER)?;
    if n == 1 {
        return Ok(IntegralResult::exact(1.0));
    }
    if model.potential().is_zero() {
        return Ok(IntegralResult::exact(0.0));
    }
    let space = Space::Box(model);
    match route {
        VertexRoute::GraphSum => {
            let classes = graph_classes(n, false)?;
            let parts = class_integrals(&space, &classes, integrator)?;
            Ok(weighted_sum(&parts, Some(integrator.seed)))
        }
        VertexRoute::InclusionExclusion => {
            let d = model.dim();
            if integrator.wants_quadrature() && d == 1 {
                let f = |x: f64| model.mayer_f(&[x]);
                let nested = Nested {
                    n,
                    domain: space.domain_1d(),
                    base: space.breakpoints_1d(),
                    exact: model.potential().is_piecewise_constant(),
                    f: &f,
                };
                let out = nested.run(&Integrand::Connected);
                let scale = model.volume().powi(n as i32 - 1);
                return Ok(IntegralResult::quadrature(out.value / scale, out.error / scale, out.nodes));
            }
            let half = match integrator.sampling {
                Sampling::Tree => ((n - 1) as f64 * space.half_kernel()).min(space.half_domain()),
                Sampling::Uniform => space.half_domain(),
            };
            let weight = ((2.0 * half).powi(d as i32) / model.volume()).powi(n as i32 - 1);
            mc::estimate(integrator.samples, integrator.seed, |rng: &mut ChaCha8Rng| {
                let mut q = [[0.0f64; 3]; 8];
                for point in q.iter_mut().take(n).skip(1) {
                    for c in point.iter_mut().take(d) {
                        *c = rng.gen_range(-half..half);
                    }
                }
                let mut fm = [[0.0; 8]; 8];
                for i in 0..n {
                    for j in i + 1..n {
                        let mut x = [0.0; 3];
                        for c in 0..d {
                            x[c] = q[j][c] - q[i][c];
                        }
                        let v = model.mayer_f(&x[..d]);
                        fm[i][j] = v;
                        fm[j][i] = v;
                    }
                }
                weight * nested::connected_from_matrix(n, &fm)
            })
        }
    }
}

/// Largest size accepted by [`tree_graph_bound`].
pub const MAX_TREE_BOUND_SIZE: usize = 4096;

/// `n^{n-2} |Λ|^{-(n-1)} e^{(2βB + a) n} C_Λ(β)^{n-1}`, formed in logs.
pub fn tree_graph_bound(n: usize, model: &BoxModel, a: f64) -> Result<f64> {
    check_range("polymer size", n, 1, MAX_TREE_BOUND_SIZE)?;
    let c = model.c_lambda()?;
    Ok(tree_graph_bound_from(n, model.volume(), c.value + c.error, model.beta() * model.potential().stability_b_in(model.dim()), a))
}

pub(crate) fn tree_graph_bound_from(n: usize, volume: f64, c_lambda: f64, beta_b: f64, a: f64) -> f64 {
    let nf = n as f64;
    if n == 1 {
        return ((2.0 * beta_b + a) * nf).exp();
    }
    if c_lambda == 0.0 {
        return 0.0;
    }
    let log = (nf - 2.0) * nf.ln() - (nf - 1.0) * (volume.ln() - c_lambda.ln()) + (2.0 * beta_b + a) * nf;
    log.exp()
}

/// Both sides of the tree-graph inequality at one size.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeGraphCheck {
    pub n: usize,
    pub zeta: IntegralResult,
    /// `|ζ_Λ(V)| e^{a n}`.
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn tree_graph_check(n: usize, model: &BoxModel, a: f64, integrator: &Integrator) -> Result<TreeGraphCheck> {
    let zeta = zeta_vertex(n, model, integrator, VertexRoute::GraphSum)?;
    let lhs = zeta.value.abs() * (a * n as f64).exp();
    let bound = tree_graph_bound(n, model, a)?;
    // allow the statistical or quadrature error on the computed side
    let slack = 3.0 * zeta.error * (a * n as f64).exp() + 1e-12 * bound;
    Ok(TreeGraphCheck {
        n,
        zeta,
        lhs,
        bound,
        holds: lhs <= bound + slack,
    })
}

/// `b_n(Λ) = |Λ|^{n-1}/n! Σ_{g ∈ C_n} ζ̃_Λ(g)`.
pub fn b_n_connected(n: usize, model: &BoxModel, integrator: &Integrator) -> Result<IntegralResult> {
    check_range("order", n, 1, MAX_B_ORDER)?;
    if n == 1 {
        return Ok(IntegralResult::exact(1.0));
    }
    let z = zeta_vertex(n, model, integrator, VertexRoute::GraphSum)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(z.scaled(model.volume().powi(n as i32 - 1) / fact))
}

/// Smallest free-space radius at which truncating `β_n` loses nothing the
/// envelope can see: `n` times the support radius of `f`.
pub fn minimal_domain_radius(n: usize, potential: &PairPotential, beta: f64) -> f64 {
    n as f64 * potential.support_radius(beta)
}

/// `β_n = (1/n!) Σ_{g ∈ B_{n+1}} ∫ Π_{{i,j} ∈ E(g)} f(q_i - q_j) dq_2 … dq_{n+1}`
/// with `q_1 = 0`, over the cube `[-R, R]^d`.
pub fn beta_n(
    n: usize,
    potential: &PairPotential,
    beta: f64,
    dim: usize,
    integrator: &Integrator,
    domain_radius: Option<f64>,
) -> Result<IntegralResult> {
    check_range("order", n, 1, MAX_BETA_ORDER)?;
    check_range("dimension", dim, 1, 3)?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("{beta} must be finite and positive")));
    }
    if potential.is_zero() {
        return Ok(IntegralResult::exact(0.0));
    }
    let needed = minimal_domain_radius(n, potential, beta);
    let radius = domain_radius.unwrap_or(needed);
    if !(radius >= needed) || !radius.is_finite() {
        return Err(Error::TailNotCertifiable(format!(
            "domain radius {radius} is below n times the support radius, {needed}"
        )));
    }
    let space = Space::Free {
        potential,
        beta,
        dim,
        radius,
    };
    let classes = graph_classes(n + 1, true)?;
    let parts = class_integrals(&space, &classes, integrator)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(weighted_sum(&parts, Some(integrator.seed)).scaled(1.0 / fact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rods(sigma: f64, l: f64) -> BoxModel {
        let p = PairPotential::hard_core(sigma).unwrap();
        BoxModel::new(&p, &BoxGeometry::new(1, l).unwrap(), 1.0, 1).unwrap()
    }

    #[test]
    fn single_edge_and_path() {
        let m = rods(0.1, 10.0);
        let q = Integrator::quadrature();
        let k2 = LabeledGraph::path(2).unwrap();
        assert!((zeta_tilde(&k2, &m, &q).unwrap().value + 0.02).abs() < 1e-15);
        let p3 = LabeledGraph::path(3).unwrap();
        assert!((zeta_tilde(&p3, &m, &q).unwrap().value - 4e-4).abs() < 1e-16);
    }

    #[test]
    fn trees_match_closed_form() {
        let m = rods(0.1, 10.0);
        let q = Integrator::quadrature();
        for t in crate::graph::enumerate_trees(4).unwrap() {
            let direct = zeta_tilde(&t, &m, &q).unwrap().value;
            let closed = tree_weight_closed_form(&t, &m).unwrap();
            assert!((direct - closed).abs() < 1e-15, "{t}");
            assert!((closed + 8e-6).abs() < 1e-18);
        }
    }

    #[test]
    fn zero_potential_vanishes() {
        let p = PairPotential::zero();
        let m = BoxModel::new(&p, &BoxGeometry::new(2, 3.0).unwrap(), 1.0, 1).unwrap();
        let q = Integrator::quadrature();
        assert_eq!(zeta_tilde(&LabeledGraph::complete(1..=3).unwrap(), &m, &q).unwrap().value, 0.0);
        assert_eq!(zeta_vertex(4, &m, &q, VertexRoute::GraphSum).unwrap().value, 0.0);
        assert_eq!(b_n_connected(2, &m, &q).unwrap().value, 0.0);
    }

    #[test]
    fn vertex_routes_agree() {
        let m = rods(0.1, 10.0);
        let q = Integrator::quadrature();
        for n in 2..=5 {
            let a = zeta_vertex(n, &m, &q, VertexRoute::GraphSum).unwrap().value;
            let b = zeta_vertex(n, &m, &q, VertexRoute::InclusionExclusion).unwrap().value;
            assert!((a - b).abs() < 1e-10 * a.abs().max(1e-300), "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn hard_rod_irreducible_coefficients() {
        let rod = PairPotential::hard_core(0.1).unwrap();
        let q = Integrator::quadrature();
        let b1 = beta_n(1, &rod, 1.0, 1, &q, None).unwrap();
        assert!((b1.value + 0.2).abs() < 1e-15);
        let b2 = beta_n(2, &rod, 1.0, 1, &q, None).unwrap();
        assert!((b2.value + 1.5 * 0.01).abs() < 1e-15, "{}", b2.value);
        let b3 = beta_n(3, &rod, 1.0, 1, &q, None).unwrap();
        assert!((b3.value + 4.0 / 3.0 * 1e-3).abs() < 1e-15, "{}", b3.value);
        assert!(matches!(
            beta_n(2, &rod, 1.0, 1, &q, Some(0.15)),
            Err(Error::TailNotCertifiable(_))
        ));
    }

    #[test]
    fn connected_coefficients() {
        let m = rods(0.1, 10.0);
        let q = Integrator::quadrature();
        assert_eq!(b_n_connected(1, &m, &q).unwrap().value, 1.0);
        assert!((b_n_connected(2, &m, &q).unwrap().value + 0.1).abs() < 1e-14);
    }

    #[test]
    fn tree_graph_inequality() {
        let m = rods(0.1, 10.0);
        let q = Integrator::quadrature();
        let b2 = tree_graph_bound(2, &m, 1.0).unwrap();
        assert!((b2 - 0.02 * 1f64.exp().powi(2)).abs() < 1e-15);
        let c2 = tree_graph_check(2, &m, 1.0, &q).unwrap();
        assert!(c2.holds && (c2.lhs - c2.bound).abs() < 1e-15);
        let c3 = tree_graph_check(3, &m, 1.0, &q).unwrap();
        assert!(c3.holds && c3.lhs < c3.bound);
    }
}
