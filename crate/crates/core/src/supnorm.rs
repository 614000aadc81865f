//! Certified two-sided estimation of ‖P‖_∞, the sup norm of a polynomial
//! over the unit ball of ℓ∞ⁿ: the torus/polydisc for complex scalars (by
//! the maximum principle the sup over the closed polydisc is attained on
//! the torus), the cube [-1,1]ⁿ for real scalars.
//!
//! The lower bound is the best value found by a covering grid, a vertex
//! sweep (real case), and multi-start projected gradient ascent on the
//! squared modulus; it is certified by its witness point. The upper bound
//! comes from a Lipschitz certificate: |P| is L-Lipschitz in the ℓ∞ metric
//! of the search coordinates with L = m·‖P‖₁ (the coordinate-wise partial
//! bounds Σ_α α_j|a_α| sum to m·‖P‖₁ over j), so a cell of radius h centered
//! at a point with value v bounds the sup on that cell by v + L·h. Cells
//! whose bound cannot beat the running maximum are discarded; the rest are
//! bisected best-first until the gap target or the evaluation cap is hit.
//! The trivial bound ‖P‖₁ caps the result in every mode.

use crate::error::{Error, Result};
use crate::norm::NormOrder;
use crate::parallel::par_map;
use crate::poly::{HomogeneousPolynomial, ScalarField};
use crate::rng::{derive_seed, CounterRng};
use num_complex::Complex64;
use std::collections::BinaryHeap;

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

/// |z| as sqrt(re² + im²). Unlike hypot this commutes exactly with scaling
/// by powers of two, which keeps estimates exactly scale-equivariant.
#[inline]
fn modulus(z: Complex64) -> f64 {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Vertex sweeps run whenever 2^n is at most this; they are cheap and make
/// the lower bound exact for sign-pattern maxima.
const VERTEX_SWEEP_CAP: u64 = 65_536;

/// Stream tag for ascent start points.
const ASCENT_STREAM: u64 = 0x4153_4345;

/// Search budget and reproducibility knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    /// Points per axis of the initial covering grid. 0 disables the grid:
    /// ascent-only mode, whose upper bound falls back to ‖P‖₁.
    pub grid_resolution: u32,
    /// Number of random multi-start ascent runs.
    pub restarts: u32,
    /// Iteration cap per ascent run.
    pub ascent_iters: u32,
    /// Initial backtracking step (radians on the torus, coordinate units on
    /// the cube).
    pub ascent_step: f64,
    /// Backtracking shrink factor, in (0, 1).
    pub ascent_shrink: f64,
    /// Armijo sufficient-increase fraction.
    pub ascent_armijo: f64,
    /// An ascent run stops once backtracking pushes the step below this.
    pub ascent_min_step: f64,
    /// Cap on covering + refinement evaluations. Requesting an initial grid
    /// larger than this is a budget error, never a silent truncation.
    pub grid_cap: u64,
    /// Refinement stops once upper - lower <= gap_target·‖P‖₁. The target
    /// is relative to the trivial norm so the whole search commutes with
    /// rescaling the polynomial.
    pub gap_target: f64,
    /// Seed for the ascent start points.
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            grid_resolution: 32,
            restarts: 64,
            ascent_iters: 200,
            ascent_step: 0.5,
            ascent_shrink: 0.5,
            ascent_armijo: 1e-4,
            ascent_min_step: 1e-12,
            grid_cap: 2_000_000,
            gap_target: 0.005,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Ascent-only variant of this budget (no grid, trivial upper bound).
    pub fn ascent_only(&self) -> Self {
        Self {
            grid_resolution: 0,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ascent_step.is_finite() && self.ascent_step > 0.0) {
            return Err(Error::domain("ascent step must be positive"));
        }
        if !(self.ascent_shrink > 0.0 && self.ascent_shrink < 1.0) {
            return Err(Error::domain("ascent shrink factor must be in (0, 1)"));
        }
        if !(self.ascent_armijo >= 0.0 && self.ascent_armijo < 1.0) {
            return Err(Error::domain("Armijo fraction must be in [0, 1)"));
        }
        if !(self.ascent_min_step > 0.0) {
            return Err(Error::domain("minimum ascent step must be positive"));
        }
        if !(self.gap_target >= 0.0 && self.gap_target.is_finite()) {
            return Err(Error::domain("gap target must be finite and non-negative"));
        }
        if self.grid_cap == 0 {
            return Err(Error::domain("grid cap must be at least 1"));
        }
        Ok(())
    }
}

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Exact vertex enumeration (real multilinear polynomials).
    VertexExact,
    /// Covering grid + ascent + certified cell refinement.
    GridRefine,
    /// Multi-start ascent only; upper bound is the trivial ‖P‖₁.
    AscentOnly,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::VertexExact => "vertex-exact",
            Strategy::GridRefine => "grid-refine",
            Strategy::AscentOnly => "ascent-only",
        }
    }
}

/// Method descriptor attached to every estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodInfo {
    pub strategy: Strategy,
    pub grid_resolution: u32,
    pub restarts: u32,
    pub seed: u64,
    /// Covering + refinement evaluations spent (ascent excluded).
    pub evaluations: u64,
}

/// Certified bracket lower <= ‖P‖_∞ <= upper.
///
/// `lower` is the compensated |P(witness)|; `upper` is a Lipschitz covering
/// certificate (or ‖P‖₁ in ascent-only mode).
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: Vec<Complex64>,
    pub gap: f64,
    pub method: MethodInfo,
}

/// Estimates ‖P‖_∞ over the unit polydisc (complex scalars only).
pub fn supnorm_complex(p: &HomogeneousPolynomial, budget: &Budget) -> Result<SupNormEstimate> {
    if p.field() != ScalarField::Complex {
        return Err(Error::domain(
            "supnorm_complex requires a complex polynomial",
        ));
    }
    estimate(p, budget, Space::Torus)
}

/// Estimates ‖P‖_∞ over the cube [-1,1]ⁿ (real scalars only).
///
/// Multilinear polynomials take an exact vertex-enumeration path: a
/// function affine in each coordinate attains its maximum modulus at a
/// vertex of the box.
pub fn supnorm_real(p: &HomogeneousPolynomial, budget: &Budget) -> Result<SupNormEstimate> {
    if p.field() != ScalarField::Real {
        return Err(Error::domain("supnorm_real requires a real polynomial"));
    }
    budget.validate()?;
    let n = p.nvars();
    if p.is_multilinear() && n < 64 && (1u128 << n) <= budget.grid_cap as u128 {
        return vertex_exact(p, budget);
    }
    estimate(p, budget, Space::Cube)
}

/// Dispatches on the polynomial's scalar field.
pub fn supnorm(p: &HomogeneousPolynomial, budget: &Budget) -> Result<SupNormEstimate> {
    match p.field() {
        ScalarField::Real => supnorm_real(p, budget),
        ScalarField::Complex => supnorm_complex(p, budget),
    }
}

/// Result of the complexification inequality check
/// ‖P_C‖_∞ <= 2^{m-1}·‖P‖_∞ for real P.
#[derive(Debug, Clone, PartialEq)]
pub struct VisserCheck {
    /// Certified lower bound of ‖P_C‖_∞.
    pub lhs: f64,
    /// 2^{m-1} times the certified upper bound of ‖P‖_∞.
    pub rhs: f64,
    pub ok: bool,
    pub complex_estimate: SupNormEstimate,
    pub real_estimate: SupNormEstimate,
}

/// Checks ‖P_C‖_∞ <= 2^{m-1}·‖P‖_∞ with certified brackets on both sides:
/// a correct pair of estimates can never report a violation beyond
/// floating-point evaluation error, so `ok` allows 1e-12 relative slack
/// (the accuracy contract of polynomial evaluation; at equality cases the
/// two sides can differ by an ulp).
pub fn visser_check(p: &HomogeneousPolynomial, budget: &Budget) -> Result<VisserCheck> {
    if p.field() != ScalarField::Real {
        return Err(Error::domain("visser_check requires a real polynomial"));
    }
    if p.is_zero() {
        return Err(Error::domain("visser_check requires a nonzero polynomial"));
    }
    let pc = p.complexify()?;
    let complex_estimate = supnorm_complex(&pc, budget)?;
    let real_estimate = supnorm_real(p, budget)?;
    let lhs = complex_estimate.lower;
    let rhs = 2f64.powi(p.degree() as i32 - 1) * real_estimate.upper;
    Ok(VisserCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-12),
        complex_estimate,
        real_estimate,
    })
}

// ---------------------------------------------------------------------------
// internals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Space {
    /// Angle coordinates θ ∈ Rⁿ, point on the torus is e^{iθ}.
    Torus,
    /// Coordinates in the cube [-1,1]ⁿ.
    Cube,
}

struct Term {
    coeff: Complex64,
    /// (variable, exponent) with exponent >= 1.
    factors: Vec<(usize, u32)>,
}

struct Compiled {
    nvars: usize,
    degree: usize,
    terms: Vec<Term>,
    l1: f64,
    /// m·‖P‖₁, the ℓ∞ Lipschitz constant of |P| in search coordinates.
    lipschitz: f64,
}

impl Compiled {
    fn from_poly(p: &HomogeneousPolynomial) -> Self {
        let terms: Vec<Term> = p
            .terms()
            .map(|(alpha, &coeff)| Term {
                coeff,
                factors: alpha
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| (j, e))
                    .collect(),
            })
            .collect();
        let l1 = p.coeff_norm(NormOrder::one());
        Self {
            nvars: p.nvars() as usize,
            degree: p.degree() as usize,
            terms,
            l1,
            lipschitz: p.degree() as f64 * l1,
        }
    }

    fn fill_pow(&self, space: Space, x: &[f64], s: &mut Scratch) {
        let m = self.degree;
        match space {
            Space::Torus => {
                for (j, &theta) in x.iter().enumerate() {
                    let base = Complex64::from_polar(1.0, theta);
                    let row = j * (m + 1);
                    s.powc[row] = Complex64::new(1.0, 0.0);
                    for k in 1..=m {
                        s.powc[row + k] = s.powc[row + k - 1] * base;
                    }
                }
            }
            Space::Cube => {
                for (j, &xj) in x.iter().enumerate() {
                    let row = j * (m + 1);
                    s.powr[row] = 1.0;
                    for k in 1..=m {
                        s.powr[row + k] = s.powr[row + k - 1] * xj;
                    }
                }
            }
        }
    }

    /// |P| at a search point.
    fn abs_value(&self, space: Space, x: &[f64], s: &mut Scratch) -> f64 {
        self.fill_pow(space, x, s);
        let m = self.degree;
        match space {
            Space::Torus => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &self.terms {
                    let mut v = t.coeff;
                    for &(j, e) in &t.factors {
                        v *= s.powc[j * (m + 1) + e as usize];
                    }
                    acc += v;
                }
                modulus(acc)
            }
            Space::Cube => {
                let mut acc = 0.0f64;
                for t in &self.terms {
                    let mut v = t.coeff.re;
                    for &(j, e) in &t.factors {
                        v *= s.powr[j * (m + 1) + e as usize];
                    }
                    acc += v;
                }
                acc.abs()
            }
        }
    }

    /// Squared modulus at a search point (ascent objective).
    fn sq_value(&self, space: Space, x: &[f64], s: &mut Scratch) -> f64 {
        let v = self.abs_value(space, x, s);
        v * v
    }

    /// Squared modulus and its gradient with respect to the search
    /// coordinates.
    fn sq_and_grad(&self, space: Space, x: &[f64], grad: &mut [f64], s: &mut Scratch) -> f64 {
        self.fill_pow(space, x, s);
        let m = self.degree;
        match space {
            Space::Torus => {
                // P = Σ a_α e^{i<α,θ>}; ∂_j P = i·S_j with S_j = Σ α_j a_α e^{i<α,θ>}
                for v in s.svec.iter_mut() {
                    *v = Complex64::new(0.0, 0.0);
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &self.terms {
                    let mut v = t.coeff;
                    for &(j, e) in &t.factors {
                        v *= s.powc[j * (m + 1) + e as usize];
                    }
                    acc += v;
                    for &(j, e) in &t.factors {
                        s.svec[j] += e as f64 * v;
                    }
                }
                let conj = acc.conj();
                for (g, &sj) in grad.iter_mut().zip(s.svec.iter()) {
                    // ∂_j |P|² = 2·Re(conj(P)·i·S_j) = -2·Im(conj(P)·S_j)
                    *g = -2.0 * (conj * sj).im;
                }
                acc.norm_sqr()
            }
            Space::Cube => {
                let mut acc = 0.0f64;
                for g in grad.iter_mut() {
                    *g = 0.0;
                }
                for t in &self.terms {
                    let mut v = t.coeff.re;
                    for &(j, e) in &t.factors {
                        v *= s.powr[j * (m + 1) + e as usize];
                    }
                    acc += v;
                    // ∂_j of the term: a·e_j·x_j^{e_j-1}·Π_{k≠j} x_k^{e_k}
                    for (fi, &(j, e)) in t.factors.iter().enumerate() {
                        let mut d = t.coeff.re * e as f64 * s.powr[j * (m + 1) + (e - 1) as usize];
                        for (fk, &(j2, e2)) in t.factors.iter().enumerate() {
                            if fk != fi {
                                d *= s.powr[j2 * (m + 1) + e2 as usize];
                            }
                        }
                        grad[j] += d;
                    }
                }
                for g in grad.iter_mut() {
                    *g *= 2.0 * acc;
                }
                acc * acc
            }
        }
    }
}

struct Scratch {
    powc: Vec<Complex64>,
    powr: Vec<f64>,
    svec: Vec<Complex64>,
}

impl Scratch {
    fn new(nvars: usize, degree: usize) -> Self {
        Self {
            powc: vec![Complex64::new(0.0, 0.0); nvars * (degree + 1)],
            powr: vec![0.0; nvars * (degree + 1)],
            svec: vec![Complex64::new(0.0, 0.0); nvars],
        }
    }
}

/// Refinement cell: center, ℓ∞ radius, certified local bound.
struct Cell {
    bound: f64,
    seq: u64,
    radius: f64,
    center: Box<[f64]>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq && self.bound.total_cmp(&other.bound).is_eq()
    }
}
impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on bound; FIFO among equal bounds keeps pops deterministic
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn grid_coordinate(space: Space, digit: u64, g: u32) -> f64 {
    match space {
        Space::Torus => TAU * digit as f64 / g as f64,
        Space::Cube => -1.0 + (2 * digit + 1) as f64 / g as f64,
    }
}

fn cell_radius(space: Space, g: u32) -> f64 {
    match space {
        Space::Torus => PI / g as f64,
        Space::Cube => 1.0 / g as f64,
    }
}

fn default_point(space: Space, n: usize) -> Vec<f64> {
    match space {
        Space::Torus => vec![0.0; n],
        Space::Cube => vec![1.0; n],
    }
}

fn project(space: Space, x: &mut [f64]) {
    if space == Space::Cube {
        for v in x.iter_mut() {
            *v = v.clamp(-1.0, 1.0);
        }
    }
}

fn to_unit_point(space: Space, x: &[f64]) -> Vec<Complex64> {
    match space {
        Space::Torus => x
            .iter()
            .map(|&theta| Complex64::from_polar(1.0, theta))
            .collect(),
        Space::Cube => x.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One projected gradient ascent run with normalized direction and Armijo
/// backtracking. Returns the final point and its |P| value.
fn ascend(
    compiled: &Compiled,
    space: Space,
    mut x: Vec<f64>,
    budget: &Budget,
    scratch: &mut Scratch,
) -> (Vec<f64>, f64) {
    let n = x.len();
    project(space, &mut x);
    let mut grad = vec![0.0; n];
    let mut fx = compiled.sq_and_grad(space, &x, &mut grad, scratch);
    let mut cand = vec![0.0; n];
    for _ in 0..budget.ascent_iters {
        // on the cube, components pointing out of the box at an active
        // bound contribute nothing to any feasible step; masking them keeps
        // the Armijo requirement commensurate with what projection allows
        if space == Space::Cube {
            for (gj, &xj) in grad.iter_mut().zip(x.iter()) {
                if (xj >= 1.0 && *gj > 0.0) || (xj <= -1.0 && *gj < 0.0) {
                    *gj = 0.0;
                }
            }
        }
        let gnorm = l2_norm(&grad);
        // a gradient negligible relative to the objective is numerical
        // noise at a flat or critical region; following it would wander
        // (the relative test keeps trajectories scale-invariant)
        if gnorm <= 1e-12 * fx || !gnorm.is_finite() {
            break;
        }
        let mut t = budget.ascent_step;
        let mut accepted = false;
        while t >= budget.ascent_min_step {
            for j in 0..n {
                cand[j] = x[j] + t * grad[j] / gnorm;
            }
            project(space, &mut cand);
            let fc = compiled.sq_value(space, &cand, scratch);
            if fc >= fx + budget.ascent_armijo * t * gnorm {
                x.copy_from_slice(&cand);
                fx = compiled.sq_and_grad(space, &x, &mut grad, scratch);
                accepted = true;
                break;
            }
            t *= budget.ascent_shrink;
        }
        if !accepted {
            break;
        }
    }
    let v = compiled.abs_value(space, &x, scratch);
    (x, v)
}

/// Grid + vertex sweep + ascent + certified refinement.
fn estimate(p: &HomogeneousPolynomial, budget: &Budget, space: Space) -> Result<SupNormEstimate> {
    budget.validate()?;
    let compiled = Compiled::from_poly(p);
    let n = compiled.nvars;
    let m = compiled.degree;
    let g = budget.grid_resolution;
    let mut evals: u64 = 0;

    // Candidates merge in a fixed scan order (default point, grid by index,
    // vertices by index, ascent runs by start index, refinement by pop
    // order); only strictly greater values replace, so the witness is the
    // first maximizer in that order.
    let mut best_point = default_point(space, n);
    let mut best_val = {
        let mut s = Scratch::new(n, m);
        compiled.abs_value(space, &best_point, &mut s)
    };
    evals += 1;

    let mut grid_values: Option<Vec<f64>> = None;
    let mut strategy = Strategy::AscentOnly;

    if g >= 1 {
        let total_wide = (g as u128).pow(n as u32);
        if total_wide > budget.grid_cap as u128 {
            return Err(Error::Budget {
                estimated: total_wide.min(u64::MAX as u128) as u64,
                cap: budget.grid_cap,
            });
        }
        let total = total_wide as u64;
        // all axes share one coordinate table, so grid evaluation needs no
        // trigonometry per point
        let values = grid_eval(&compiled, space, g, total);
        evals += total;
        let mut point = vec![0.0; n];
        for (i, &v) in values.iter().enumerate() {
            if v > best_val {
                decode_grid(space, i as u64, g, &mut point);
                best_val = v;
                best_point.copy_from_slice(&point);
            }
        }
        strategy = Strategy::GridRefine;
        grid_values = Some(values);
    }

    if space == Space::Cube && n < 64 && (1u64 << n) <= VERTEX_SWEEP_CAP {
        let mut s = Scratch::new(n, m);
        let mut x = vec![0.0; n];
        for mask in 0u64..(1 << n) {
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = if mask >> j & 1 == 0 { 1.0 } else { -1.0 };
            }
            let v = compiled.abs_value(space, &x, &mut s);
            if v > best_val {
                best_val = v;
                best_point.copy_from_slice(&x);
            }
        }
        evals += 1 << n;
    }

    // multi-start ascent: polish the current best, then random restarts
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(budget.restarts as usize + 1);
    starts.push(best_point.clone());
    for k in 0..budget.restarts {
        let mut rng = CounterRng::new(derive_seed(budget.seed, &[ASCENT_STREAM, k as u64]));
        let start: Vec<f64> = match space {
            Space::Torus => (0..n).map(|_| rng.next_range(0.0, TAU)).collect(),
            Space::Cube => (0..n).map(|_| rng.next_range(-1.0, 1.0)).collect(),
        };
        starts.push(start);
    }
    let ascent_results = par_map(starts, |start| {
        let mut s = Scratch::new(n, m);
        ascend(&compiled, space, start, budget, &mut s)
    });
    for (point, v) in ascent_results {
        if v > best_val {
            best_val = v;
            best_point = point;
        }
    }

    // certified refinement of the covering
    let mut upper = compiled.l1;
    let gap_slack = budget.gap_target * compiled.l1;
    if let Some(values) = grid_values {
        let mut scratch = Scratch::new(n, m);
        let mut heap: BinaryHeap<Cell> = BinaryHeap::new();
        let mut seq = 0u64;
        let mut discarded_max = f64::NEG_INFINITY;
        let h0 = cell_radius(space, g);
        let mut point = vec![0.0; n];
        for (i, &v) in values.iter().enumerate() {
            let bound = v + compiled.lipschitz * h0;
            if bound > best_val + gap_slack {
                decode_grid(space, i as u64, g, &mut point);
                heap.push(Cell {
                    bound,
                    seq,
                    radius: h0,
                    center: point.clone().into_boxed_slice(),
                });
                seq += 1;
            } else if bound > discarded_max {
                discarded_max = bound;
            }
        }
        drop(values);

        let children: u64 = 1 << n;
        loop {
            let Some(top) = heap.peek() else { break };
            if top.bound <= best_val + gap_slack {
                break;
            }
            if evals.saturating_add(children) > budget.grid_cap {
                break;
            }
            let cell = heap.pop().expect("peeked");
            let r = cell.radius * 0.5;
            let mut child = vec![0.0; n];
            for corner in 0..children {
                for j in 0..n {
                    let off = if corner >> j & 1 == 0 { -r } else { r };
                    child[j] = cell.center[j] + off;
                }
                let v = compiled.abs_value(space, &child, &mut scratch);
                if v > best_val {
                    best_val = v;
                    best_point.copy_from_slice(&child);
                }
                let bound = v + compiled.lipschitz * r;
                if bound > best_val + gap_slack {
                    heap.push(Cell {
                        bound,
                        seq,
                        radius: r,
                        center: child.clone().into_boxed_slice(),
                    });
                    seq += 1;
                } else if bound > discarded_max {
                    discarded_max = bound;
                }
            }
            evals += children;
        }
        // every leaf cell is on the heap or was discarded below a running
        // lower bound plus the gap target, so this majorizes the sup
        let cell_upper = heap
            .peek()
            .map(|c| c.bound)
            .unwrap_or(f64::NEG_INFINITY)
            .max(discarded_max)
            .max(best_val);
        upper = upper.min(cell_upper);
    }

    // the reported lower bound is the compensated value at the witness
    let witness = to_unit_point(space, &best_point);
    let lower = modulus(p.evaluate(&witness)?);
    let upper = upper.max(lower);
    Ok(SupNormEstimate {
        lower,
        upper,
        gap: upper - lower,
        witness,
        method: MethodInfo {
            strategy,
            grid_resolution: g,
            restarts: budget.restarts,
            seed: budget.seed,
            evaluations: evals,
        },
    })
}

fn decode_grid(space: Space, idx: u64, g: u32, out: &mut [f64]) {
    let g64 = g as u64;
    let mut rem = idx;
    for slot in out.iter_mut() {
        let d = rem % g64;
        rem /= g64;
        *slot = grid_coordinate(space, d, g);
    }
}

/// Evaluates |P| on the full covering grid. Shared per-axis power tables
/// replace per-point trigonometry.
fn grid_eval(compiled: &Compiled, space: Space, g: u32, total: u64) -> Vec<f64> {
    let m = compiled.degree;
    let g64 = g as u64;
    match space {
        Space::Torus => {
            let mut table = vec![Complex64::new(0.0, 0.0); g as usize * (m + 1)];
            for d in 0..g {
                let base = Complex64::from_polar(1.0, grid_coordinate(space, d as u64, g));
                let row = d as usize * (m + 1);
                table[row] = Complex64::new(1.0, 0.0);
                for k in 1..=m {
                    table[row + k] = table[row + k - 1] * base;
                }
            }
            crate::parallel::par_values(total, move |idx| {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &compiled.terms {
                    let mut v = t.coeff;
                    for &(j, e) in &t.factors {
                        let d = (idx / g64.pow(j as u32)) % g64;
                        v *= table[d as usize * (m + 1) + e as usize];
                    }
                    acc += v;
                }
                modulus(acc)
            })
        }
        Space::Cube => {
            let mut table = vec![0.0f64; g as usize * (m + 1)];
            for d in 0..g {
                let x = grid_coordinate(space, d as u64, g);
                let row = d as usize * (m + 1);
                table[row] = 1.0;
                for k in 1..=m {
                    table[row + k] = table[row + k - 1] * x;
                }
            }
            crate::parallel::par_values(total, move |idx| {
                let mut acc = 0.0f64;
                for t in &compiled.terms {
                    let mut v = t.coeff.re;
                    for &(j, e) in &t.factors {
                        let d = (idx / g64.pow(j as u32)) % g64;
                        v *= table[d as usize * (m + 1) + e as usize];
                    }
                    acc += v;
                }
                acc.abs()
            })
        }
    }
}

/// Exact path for real multilinear polynomials: scan all sign vertices.
fn vertex_exact(p: &HomogeneousPolynomial, budget: &Budget) -> Result<SupNormEstimate> {
    let compiled = Compiled::from_poly(p);
    let n = compiled.nvars;
    let mut s = Scratch::new(n, compiled.degree);
    let mut best_val = f64::NEG_INFINITY;
    let mut best = vec![1.0; n];
    let mut x = vec![0.0; n];
    let total: u64 = 1 << n;
    for mask in 0..total {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = if mask >> j & 1 == 0 { 1.0 } else { -1.0 };
        }
        let v = compiled.abs_value(Space::Cube, &x, &mut s);
        if v > best_val {
            best_val = v;
            best.copy_from_slice(&x);
        }
    }
    let witness = to_unit_point(Space::Cube, &best);
    let lower = modulus(p.evaluate(&witness)?);
    Ok(SupNormEstimate {
        lower,
        upper: lower,
        gap: 0.0,
        witness,
        method: MethodInfo {
            strategy: Strategy::VertexExact,
            grid_resolution: 0,
            restarts: 0,
            seed: budget.seed,
            evaluations: total,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::rng::CounterRng;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn poly(
        field: ScalarField,
        m: u32,
        n: u32,
        terms: &[(&[u32], f64)],
    ) -> HomogeneousPolynomial {
        HomogeneousPolynomial::new(
            field,
            m,
            n,
            terms.iter().map(|(a, c)| (idx(a), re(*c))),
        )
        .unwrap()
    }

    fn bernoulli(m: u32, n: u32, seed: u64, field: ScalarField) -> HomogeneousPolynomial {
        crate::ksz::sample(m, n, seed, field).unwrap().polynomial
    }

    /// Independent fine-grid oracle (no ascent, no refinement).
    fn oracle_max(p: &HomogeneousPolynomial, points_per_axis: u32) -> f64 {
        let n = p.nvars() as usize;
        let g = points_per_axis as u64;
        let total = g.pow(n as u32);
        let mut best = 0.0f64;
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for idx in 0..total {
            let mut rem = idx;
            for zj in z.iter_mut().take(n) {
                let d = rem % g;
                rem /= g;
                *zj = match p.field() {
                    ScalarField::Complex => Complex64::from_polar(1.0, TAU * d as f64 / g as f64),
                    ScalarField::Real => {
                        Complex64::new(-1.0 + 2.0 * d as f64 / (g - 1) as f64, 0.0)
                    }
                };
            }
            let v = p.evaluate(&z).unwrap().norm();
            if v > best {
                best = v;
            }
        }
        best
    }

    #[test]
    fn product_monomial_on_torus() {
        let p = poly(ScalarField::Complex, 2, 2, &[(&[1, 1], 1.0)]);
        let est = supnorm_complex(&p, &Budget::with_seed(1)).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-12);
        assert!(est.upper >= est.lower);
        assert!(est.gap <= 0.01 + 1e-9, "gap {}", est.gap);
        // the witness attains the bound on the torus (any maximizer may win;
        // |P| is constant here)
        assert!(est.witness.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        let v = p.evaluate(&est.witness).unwrap().norm();
        assert!((v - est.lower).abs() <= 1e-12);
    }

    #[test]
    fn difference_of_squares_complexified_reaches_two() {
        let p = poly(ScalarField::Real, 2, 2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]);
        let pc = p.complexify().unwrap();
        let est = supnorm_complex(&pc, &Budget::with_seed(7)).unwrap();
        assert!((est.lower - 2.0).abs() < 1e-9, "lower {}", est.lower);
        assert!(est.upper >= 2.0 - 1e-12);
        // fine-grid oracle agrees
        let oracle = oracle_max(&pc, 1000);
        assert!(est.lower <= oracle + 2.0 * p.degree() as f64 * PI / 1000.0 + 1e-9);
        assert!(oracle <= est.upper + 1e-9);
    }

    #[test]
    fn unimodular_powers_have_unit_norm() {
        for m in 1..=8u32 {
            let p = poly(ScalarField::Complex, m, 1, &[(&[m], 1.0)]);
            let est = supnorm_complex(&p, &Budget::with_seed(3)).unwrap();
            assert!((est.lower - 1.0).abs() < 1e-12, "m={m} lower {}", est.lower);
            assert!(est.upper - 1.0 <= 0.02, "m={m} upper {}", est.upper);
        }
    }

    #[test]
    fn multilinear_product_is_exact() {
        let p = poly(ScalarField::Real, 2, 2, &[(&[1, 1], 1.0)]);
        let est = supnorm_real(&p, &Budget::with_seed(5)).unwrap();
        assert_eq!(est.method.strategy, Strategy::VertexExact);
        assert_eq!(est.lower, 1.0);
        assert_eq!(est.upper, 1.0);
        assert_eq!(est.gap, 0.0);
    }

    #[test]
    fn difference_of_squares_on_cube_is_one() {
        let p = poly(ScalarField::Real, 2, 2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]);
        let est = supnorm_real(&p, &Budget::with_seed(5)).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-9, "lower {}", est.lower);
        assert!(est.upper >= 1.0 - 1e-12);
        assert!(est.gap <= 0.011, "gap {}", est.gap);
    }

    #[test]
    fn random_bernoulli_bracket_contains_dense_grid_oracle() {
        let p = bernoulli(2, 3, 404, ScalarField::Real);
        let est = supnorm_real(&p, &Budget::with_seed(11)).unwrap();
        // 100 points per axis = 10^6-point oracle
        let oracle = oracle_max(&p, 100);
        let oracle_slack = p.degree() as f64 * p.coeff_norm(NormOrder::one()) / 99.0;
        assert!(est.lower <= oracle + oracle_slack + 1e-9);
        assert!(oracle <= est.upper + 1e-9);
        assert!(est.gap <= 0.05, "gap {}", est.gap);
    }

    #[test]
    fn wrong_field_is_a_domain_error() {
        let p = poly(ScalarField::Real, 2, 2, &[(&[1, 1], 1.0)]);
        assert!(matches!(
            supnorm_complex(&p, &Budget::default()),
            Err(Error::Domain(_))
        ));
        let pc = p.complexify().unwrap();
        assert!(matches!(
            supnorm_real(&pc, &Budget::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn oversized_grid_is_a_budget_error_not_a_truncation() {
        let p = bernoulli(2, 5, 1, ScalarField::Complex);
        let err = supnorm_complex(&p, &Budget::with_seed(1)).unwrap_err();
        match err {
            Error::Budget { estimated, cap } => {
                assert_eq!(estimated, 32u64.pow(5));
                assert_eq!(cap, Budget::default().grid_cap);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        // ascent-only mode handles the same polynomial
        let est = supnorm_complex(&p, &Budget::with_seed(1).ascent_only()).unwrap();
        assert_eq!(est.method.strategy, Strategy::AscentOnly);
        assert!(est.lower > 0.0);
        assert_eq!(est.upper, p.coeff_norm(NormOrder::one()));
    }

    #[test]
    fn witness_reproduces_lower_bound() {
        for seed in [1u64, 2, 3] {
            let p = bernoulli(3, 2, seed, ScalarField::Complex);
            let est = supnorm_complex(&p, &Budget::with_seed(seed)).unwrap();
            let v = p.evaluate(&est.witness).unwrap().norm();
            assert!((v - est.lower).abs() <= 1e-10 * est.lower.max(1e-30));
            assert!(est.witness.iter().all(|z| z.norm() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn estimates_are_deterministic() {
        let p = bernoulli(2, 3, 77, ScalarField::Complex);
        let b = Budget::with_seed(5);
        let a = supnorm_complex(&p, &b).unwrap();
        let c = supnorm_complex(&p, &b).unwrap();
        assert_eq!(a, c);
    }

    #[cfg(not(target_arch = "wasm32"))]
    #[test]
    fn estimates_do_not_depend_on_worker_count() {
        let p = bernoulli(2, 3, 99, ScalarField::Complex);
        let b = Budget::with_seed(9);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| supnorm_complex(&p, &b).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| supnorm_complex(&p, &b).unwrap());
        assert_eq!(one, four);
    }

    #[test]
    fn gap_shrinks_as_resolution_grows() {
        // pure covering certificates (no refinement budget): nested grids
        // and halved slack must tighten the bracket on fixed seeds
        for seed in [10u64, 11, 12, 13, 14] {
            let p = bernoulli(2, 2, seed, ScalarField::Complex);
            let mut last_gap = f64::INFINITY;
            for g in [8u32, 16, 32] {
                let budget = Budget {
                    grid_resolution: g,
                    grid_cap: (g as u64).pow(2) + 1,
                    gap_target: 0.0,
                    ..Budget::with_seed(seed)
                };
                let est = supnorm_complex(&p, &budget).unwrap();
                assert!(
                    est.gap <= last_gap + 1e-12,
                    "gap grew at g={g}: {} -> {}",
                    last_gap,
                    est.gap
                );
                last_gap = est.gap;
            }
        }
    }

    #[test]
    fn scale_equivariance_is_exact_for_power_of_two_factors() {
        let p = bernoulli(2, 2, 21, ScalarField::Complex);
        let b = Budget::with_seed(4);
        let base = supnorm_complex(&p, &b).unwrap();
        for c in [2.0f64, 4.0, 0.5] {
            let q = p.scaled(re(c)).unwrap();
            let est = supnorm_complex(&q, &b).unwrap();
            assert_eq!(est.lower, c * base.lower, "lower not exact at c={c}");
            assert_eq!(est.upper, c * base.upper, "upper not exact at c={c}");
            assert_eq!(est.witness, base.witness);
        }
    }

    #[test]
    fn evaluations_at_unit_points_stay_below_upper() {
        let mut rng = CounterRng::new(31);
        for seed in 0..10u64 {
            let p = bernoulli(2, 3, seed, ScalarField::Complex);
            let est = supnorm_complex(&p, &Budget::with_seed(seed)).unwrap();
            for _ in 0..50 {
                let z: Vec<Complex64> = (0..3)
                    .map(|_| Complex64::from_polar(1.0, rng.next_range(0.0, TAU)))
                    .collect();
                let v = p.evaluate(&z).unwrap().norm();
                assert!(v <= est.upper + 1e-9);
            }
        }
    }

    #[test]
    fn visser_equality_case() {
        let p = poly(ScalarField::Real, 2, 2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]);
        let budget = Budget {
            grid_resolution: 64,
            gap_target: 1e-4,
            ..Budget::with_seed(2)
        };
        let check = visser_check(&p, &budget).unwrap();
        assert!(check.ok);
        assert!((check.lhs - 2.0).abs() <= 1e-3, "lhs {}", check.lhs);
        assert!((check.rhs - 2.0).abs() <= 1e-3, "rhs {}", check.rhs);
    }

    #[test]
    fn visser_strict_case() {
        let p = poly(ScalarField::Real, 2, 2, &[(&[1, 1], 1.0)]);
        let check = visser_check(&p, &Budget::with_seed(3)).unwrap();
        assert!(check.ok);
        assert!((check.lhs - 1.0).abs() < 1e-6);
        assert!((check.rhs - 2.0).abs() < 0.05);
    }

    #[test]
    fn visser_rejects_zero_and_complex_inputs() {
        let z = HomogeneousPolynomial::zero(ScalarField::Real, 2, 2).unwrap();
        assert!(matches!(
            visser_check(&z, &Budget::default()),
            Err(Error::Domain(_))
        ));
        let p = poly(ScalarField::Real, 2, 2, &[(&[1, 1], 1.0)])
            .complexify()
            .unwrap();
        assert!(matches!(
            visser_check(&p, &Budget::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn visser_holds_on_random_bernoulli_sweep() {
        let budget = Budget {
            grid_resolution: 12,
            gap_target: 0.2,
            grid_cap: 300_000,
            restarts: 24,
            ..Budget::with_seed(17)
        };
        for seed in 0..25u64 {
            let m = 1 + (seed % 3) as u32;
            let n = 2 + (seed % 3) as u32;
            let p = bernoulli(m, n, seed, ScalarField::Real);
            let check = visser_check(&p, &budget).unwrap();
            assert!(check.ok, "violation at m={m} n={n} seed={seed}");
        }
    }

    #[test]
    fn zero_polynomial_has_zero_bracket() {
        let p = HomogeneousPolynomial::zero(ScalarField::Complex, 2, 2).unwrap();
        let est = supnorm_complex(&p, &Budget::with_seed(1)).unwrap();
        assert_eq!(est.lower, 0.0);
        assert_eq!(est.upper, 0.0);
    }

    #[test]
    fn budget_validation_rejects_nonsense() {
        let p = poly(ScalarField::Complex, 1, 1, &[(&[1], 1.0)]);
        let mut b = Budget::default();
        b.ascent_shrink = 1.5;
        assert!(matches!(supnorm_complex(&p, &b), Err(Error::Domain(_))));
        let mut b = Budget::default();
        b.grid_cap = 0;
        assert!(matches!(supnorm_complex(&p, &b), Err(Error::Domain(_))));
    }
}
