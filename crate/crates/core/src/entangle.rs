//! Entanglement measures, Bell-time search and schedule optimization.
//!
//! The optimizer treats a schedule as a list of segments, each with a
//! canonical coupling and a duration that is fixed, a free parameter, or
//! whatever is left of a total-time budget. Every free parameter is scanned
//! on a regular grid, each discrete local maximum is refined by golden-section
//! search, and all refined points whose value ties with the best (to
//! [`OPTIMUM_TOL`]) are reported.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evolution::{evolve_tensor, CanonicalCoupling, Schedule, Segment};
use crate::pauli::{product_tensor, purity_global, reduced_bloch, BlochVector, CoefficientTensor, Side};
use crate::search::{golden_section_max, grid_points, local_maxima, unflatten};

/// Global purity must be within this of 1 for the linear entropy to apply.
pub const PURE_TOL: f64 = 1e-8;
/// Grid spacing per free parameter.
pub const GRID_STEP: f64 = 1e-3;
/// Upper limit on grid size; wider or higher-dimensional problems get a
/// coarser grid.
pub const MAX_GRID_POINTS: usize = 2_000_000;
pub const MAX_FREE_PARAMETERS: usize = 4;
/// Golden-section stopping width.
pub const REFINE_TOL: f64 = 1e-9;
/// Refined points whose value is within this of the best are reported.
pub const OPTIMUM_TOL: f64 = 1e-9;
/// A grid whose values span less than this is flat.
pub const FLAT_TOL: f64 = 1e-12;

const MAX_REFINED: usize = 64;
const SAME_POINT_TOL: f64 = 1e-6;
const TAIL_STEP: f64 = 1e-2;

/// A quantity to maximize over pure two-qubit states.
pub trait EntanglementMeasure: Send + Sync {
    /// Registry key.
    fn id(&self) -> &'static str;

    fn value(&self, e: &CoefficientTensor) -> Result<f64>;

    /// Any function that orders states the same way as [`value`](Self::value).
    /// Searches compare scores, so a measure that loses resolution near its
    /// maximum can supply a better-conditioned one here.
    fn score(&self, e: &CoefficientTensor) -> Result<f64> {
        self.value(e)
    }
}

impl fmt::Debug for dyn EntanglementMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EntanglementMeasure({})", self.id())
    }
}

/// `ℰ = 1 − Tr(ρ_A²)`, ranging over `[0, 1/2]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinearEntropy;

impl EntanglementMeasure for LinearEntropy {
    fn id(&self) -> &'static str {
        "linear_entropy"
    }

    fn value(&self, e: &CoefficientTensor) -> Result<f64> {
        entanglement_linear(e)
    }

    /// `−|a|²`. Near a maximally entangled state `ℰ = (1 − |a|²)/2` is
    /// quadratic in the time offset and loses half its digits; `|a|²` itself
    /// does not.
    fn score(&self, e: &CoefficientTensor) -> Result<f64> {
        check_pure(e)?;
        Ok(-reduced_bloch(e, Side::A).norm_sqr())
    }
}

/// Identifiers accepted by [`measure_by_id`].
pub const MEASURE_IDS: &[&str] = &["linear_entropy"];

pub fn measure_by_id(id: &str) -> Result<Arc<dyn EntanglementMeasure>> {
    match id {
        "linear_entropy" => Ok(Arc::new(LinearEntropy)),
        other => Err(Error::UnknownMeasure(other.to_string())),
    }
}

fn check_pure(e: &CoefficientTensor) -> Result<()> {
    let p = purity_global(e);
    if (p - 1.0).abs() > PURE_TOL {
        return Err(Error::GloballyMixed(p));
    }
    Ok(())
}

/// Linear entropy of a globally pure state.
pub fn entanglement_linear(e: &CoefficientTensor) -> Result<f64> {
    check_pure(e)?;
    Ok((1.0 - reduced_bloch(e, Side::A).norm_sqr()) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellTime {
    pub t_bell: f64,
    pub e_max: f64,
}

/// Earliest time in `window` at which the linear entropy of the product
/// start `(a, b)` peaks under a single segment of `coupling`.
pub fn find_bell_time(
    a: &BlochVector,
    b: &BlochVector,
    coupling: &CanonicalCoupling,
    window: (f64, f64),
) -> Result<BellTime> {
    for v in [a, b] {
        if (v.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::NotPure(v.norm_sqr()));
        }
    }
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidProblem(format!("empty time window [{lo}, {hi}]")));
    }
    let start = product_tensor(a, b);
    let problem = OptimizationProblem::new(start, vec![SegmentTemplate::free(*coupling, 0)], vec![(lo, hi)]);
    let res = optimize_schedule(&problem)?;
    if res.flat {
        return Err(Error::FlatObjective);
    }
    let t_bell = res.optima.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    Ok(BellTime { t_bell, e_max: res.best_value })
}

/// How long a segment lasts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DurationSpec {
    Fixed(f64),
    /// Index into the problem's free parameters.
    Free(usize),
    /// Total time minus every other segment.
    Remainder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentTemplate {
    pub coupling: CanonicalCoupling,
    pub duration: DurationSpec,
}

impl SegmentTemplate {
    pub fn fixed(coupling: CanonicalCoupling, duration: f64) -> Self {
        SegmentTemplate { coupling, duration: DurationSpec::Fixed(duration) }
    }

    pub fn free(coupling: CanonicalCoupling, index: usize) -> Self {
        SegmentTemplate { coupling, duration: DurationSpec::Free(index) }
    }

    pub fn remainder(coupling: CanonicalCoupling) -> Self {
        SegmentTemplate { coupling, duration: DurationSpec::Remainder }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Measure at the end of the schedule.
    #[default]
    FinalTime,
    /// Largest measure reached at any time during the last segment.
    MaxOverTail,
}

#[derive(Clone, Debug)]
pub struct OptimizationProblem {
    pub initial: CoefficientTensor,
    pub segments: Vec<SegmentTemplate>,
    /// Closed interval per free parameter.
    pub bounds: Vec<(f64, f64)>,
    /// Required when a segment uses [`DurationSpec::Remainder`].
    pub total_time: Option<f64>,
    pub measure: Arc<dyn EntanglementMeasure>,
    pub objective: ObjectiveMode,
}

impl OptimizationProblem {
    /// Linear entropy at the final time, no total-time budget.
    pub fn new(initial: CoefficientTensor, segments: Vec<SegmentTemplate>, bounds: Vec<(f64, f64)>) -> Self {
        OptimizationProblem {
            initial,
            segments,
            bounds,
            total_time: None,
            measure: Arc::new(LinearEntropy),
            objective: ObjectiveMode::FinalTime,
        }
    }

    pub fn with_total_time(mut self, total: f64) -> Self {
        self.total_time = Some(total);
        self
    }

    pub fn with_measure(mut self, measure: Arc<dyn EntanglementMeasure>) -> Self {
        self.measure = measure;
        self
    }

    pub fn with_objective(mut self, objective: ObjectiveMode) -> Self {
        self.objective = objective;
        self
    }

    pub fn free_parameters(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.bounds.len();
        if n == 0 {
            return Err(Error::InvalidProblem("no free parameters".into()));
        }
        if n > MAX_FREE_PARAMETERS {
            return Err(Error::UnsupportedFreeParameters { supported: MAX_FREE_PARAMETERS, found: n });
        }
        for &(lo, hi) in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidProblem(format!("empty or non-finite bound [{lo}, {hi}]")));
            }
        }
        let mut used = vec![false; n];
        let mut remainders = 0;
        for seg in &self.segments {
            match seg.duration {
                DurationSpec::Fixed(d) if !(d.is_finite() && d >= 0.0) => return Err(Error::InvalidDuration(d)),
                DurationSpec::Fixed(_) => {}
                DurationSpec::Free(i) if i >= n => {
                    return Err(Error::InvalidProblem(format!(
                        "segment refers to free parameter {i}, only {n} bounded"
                    )))
                }
                DurationSpec::Free(i) => used[i] = true,
                DurationSpec::Remainder => remainders += 1,
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidProblem(format!("free parameter {i} is not used by any segment")));
        }
        if remainders > 1 {
            return Err(Error::InvalidProblem("at most one segment may take the remaining time".into()));
        }
        match self.total_time {
            Some(t) if !(t.is_finite() && t >= 0.0) => return Err(Error::InvalidDuration(t)),
            None if remainders == 1 => {
                return Err(Error::InvalidProblem("a remainder segment needs a total time".into()))
            }
            _ => {}
        }
        self.measure.value(&self.initial)?;
        Ok(())
    }

    /// Concrete schedule for a parameter point, or `None` when some duration
    /// would be negative or the total-time budget is exceeded.
    pub fn schedule(&self, params: &[f64]) -> Option<Schedule> {
        let mut durations: Vec<Option<f64>> = self
            .segments
            .iter()
            .map(|s| match s.duration {
                DurationSpec::Fixed(d) => Some(d),
                DurationSpec::Free(i) => Some(params[i]),
                DurationSpec::Remainder => None,
            })
            .collect();
        let used: f64 = durations.iter().flatten().sum();
        if let Some(slot) = durations.iter_mut().find(|d| d.is_none()) {
            *slot = Some(self.total_time? - used);
        } else if let Some(total) = self.total_time {
            if used > total + 1e-12 {
                return None;
            }
        }
        let segments = self
            .segments
            .iter()
            .zip(durations)
            .map(|(s, d)| Segment { coupling: s.coupling, duration: d.unwrap_or(0.0) })
            .collect();
        Schedule::new(segments).ok()
    }

    /// Measure value at a parameter point; `None` if infeasible.
    pub fn evaluate(&self, params: &[f64]) -> Option<f64> {
        self.best_along(params).map(|e| self.measure.value(&e)).and_then(|v| v.ok())
    }

    fn score(&self, params: &[f64]) -> f64 {
        self.best_along(params).and_then(|e| self.measure.score(&e).ok()).unwrap_or(f64::NEG_INFINITY)
    }

    /// State whose measure is the objective at `params`.
    fn best_along(&self, params: &[f64]) -> Option<CoefficientTensor> {
        let schedule = self.schedule(params)?;
        match self.objective {
            ObjectiveMode::FinalTime => Some(schedule.apply(&self.initial)),
            ObjectiveMode::MaxOverTail => {
                let segs = schedule.segments();
                let Some((last, head)) = segs.split_last() else {
                    return Some(self.initial);
                };
                let before = Schedule::new(head.to_vec()).ok()?.apply(&self.initial);
                Some(self.best_in_segment(&before, last))
            }
        }
    }

    fn best_in_segment(&self, start: &CoefficientTensor, seg: &Segment) -> CoefficientTensor {
        let score_at =
            |t: f64| self.measure.score(&evolve_tensor(start, &seg.coupling, t)).unwrap_or(f64::NEG_INFINITY);
        let ts = grid_points(0.0, seg.duration, TAIL_STEP);
        let scores: Vec<f64> = ts.iter().map(|&t| score_at(t)).collect();
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in local_maxima(&scores, &[ts.len()]) {
            let lo = ts[k.saturating_sub(1)];
            let hi = ts[(k + 1).min(ts.len() - 1)];
            let cand = golden_section_max(score_at, lo, hi, REFINE_TOL);
            if cand.1 > best.1 {
                best = cand;
            }
        }
        evolve_tensor(start, &seg.coupling, best.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    /// Lexicographically smallest of [`optima`](Self::optima).
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Grid samples `(parameter, value)`, single-parameter problems only.
    pub curve: Vec<(f64, f64)>,
    /// Every refined maximum within [`OPTIMUM_TOL`] of the best, sorted.
    pub optima: Vec<Vec<f64>>,
    /// The objective did not vary over the grid.
    pub flat: bool,
}

impl OptResult {
    /// Optima other than `best_params`.
    pub fn degenerate_optima(&self) -> &[Vec<f64>] {
        self.optima.get(1..).unwrap_or(&[])
    }
}

struct Grid {
    axes: Vec<Vec<f64>>,
    shape: Vec<usize>,
}

impl Grid {
    fn new(bounds: &[(f64, f64)]) -> Self {
        let mut step = GRID_STEP;
        loop {
            let axes: Vec<Vec<f64>> = bounds.iter().map(|&(lo, hi)| grid_points(lo, hi, step)).collect();
            let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
            if shape.iter().product::<usize>() <= MAX_GRID_POINTS {
                return Grid { axes, shape };
            }
            step *= 1.25;
        }
    }

    fn point(&self, idx: usize) -> Vec<f64> {
        unflatten(idx, &self.shape).iter().zip(&self.axes).map(|(&k, ax)| ax[k]).collect()
    }

    /// Box spanned by the neighbours of a grid point.
    fn cell(&self, idx: usize) -> Vec<(f64, f64)> {
        unflatten(idx, &self.shape)
            .iter()
            .zip(&self.axes)
            .map(|(&k, ax)| (ax[k.saturating_sub(1)], ax[(k + 1).min(ax.len() - 1)]))
            .collect()
    }
}

/// Cyclic coordinate golden-section search inside `cell`.
fn refine(problem: &OptimizationProblem, mut x: Vec<f64>, cell: &[(f64, f64)]) -> (Vec<f64>, f64) {
    let mut fx = problem.score(&x);
    for _ in 0..50 {
        let mut moved: f64 = 0.0;
        for d in 0..x.len() {
            let (lo, hi) = cell[d];
            let mut probe = x.clone();
            let (xd, fd) = golden_section_max(
                |v| {
                    probe[d] = v;
                    problem.score(&probe)
                },
                lo,
                hi,
                REFINE_TOL,
            );
            if fd >= fx {
                moved = moved.max((xd - x[d]).abs());
                x[d] = xd;
                fx = fd;
            }
        }
        if x.len() == 1 || moved <= REFINE_TOL {
            break;
        }
    }
    (x, fx)
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

/// Grid search plus golden-section refinement over the free parameters.
pub fn optimize_schedule(problem: &OptimizationProblem) -> Result<OptResult> {
    problem.validate()?;
    let grid = Grid::new(&problem.bounds);
    let total: usize = grid.shape.iter().product();
    let scores: Vec<f64> = (0..total).map(|i| problem.score(&grid.point(i))).collect();

    let feasible = scores.iter().filter(|s| s.is_finite());
    let (lo, hi) = feasible.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if !hi.is_finite() {
        return Err(Error::Infeasible);
    }

    let curve = if grid.shape.len() == 1 {
        grid.axes[0].iter().filter_map(|&t| problem.evaluate(&[t]).map(|v| (t, v))).collect()
    } else {
        Vec::new()
    };

    if hi - lo <= FLAT_TOL {
        let first = scores.iter().position(|s| s.is_finite()).expect("feasible point exists");
        let p = grid.point(first);
        let v = problem.evaluate(&p).expect("feasible");
        return Ok(OptResult { best_params: p.clone(), best_value: v, curve, optima: vec![p], flat: true });
    }

    let mut peaks = local_maxima(&scores, &grid.shape);
    peaks.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    peaks.truncate(MAX_REFINED);

    let mut refined: Vec<(Vec<f64>, f64)> = peaks
        .iter()
        .filter_map(|&k| {
            let (x, _) = refine(problem, grid.point(k), &grid.cell(k));
            problem.evaluate(&x).map(|v| (x, v))
        })
        .collect();
    let best_value = refined.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    refined.retain(|r| r.1 >= best_value - OPTIMUM_TOL);
    refined.sort_by(|a, b| lexicographic(&a.0, &b.0));

    let mut optima: Vec<Vec<f64>> = Vec::new();
    for (x, _) in refined {
        let dup = optima.iter().any(|o| o.iter().zip(&x).all(|(p, q)| (p - q).abs() < SAME_POINT_TOL));
        if !dup {
            optima.push(x);
        }
    }
    Ok(OptResult { best_params: optima[0].clone(), best_value, curve, optima, flat: false })
}

/// Objective sampled with spacing at most `resolution` across the single
/// free parameter's bounds. Infeasible points are skipped.
pub fn objective_curve(problem: &OptimizationProblem, resolution: f64) -> Result<Vec<(f64, f64)>> {
    let n = problem.free_parameters();
    if n != 1 {
        return Err(Error::UnsupportedFreeParameters { supported: 1, found: n });
    }
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidProblem(format!("resolution must be positive, got {resolution}")));
    }
    problem.validate()?;
    let (lo, hi) = problem.bounds[0];
    Ok(grid_points(lo, hi, resolution).into_iter().filter_map(|t| problem.evaluate(&[t]).map(|v| (t, v))).collect())
}

/// Least-squares fit `y ≈ c0 + c1·cos(ω t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineFit {
    pub c0: f64,
    pub c1: f64,
    pub max_residual: f64,
}

pub fn fit_cosine(curve: &[(f64, f64)], omega: f64) -> CosineFit {
    let n = curve.len() as f64;
    let (mut sc, mut scc, mut sy, mut scy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in curve {
        let c = (omega * t).cos();
        sc += c;
        scc += c * c;
        sy += y;
        scy += c * y;
    }
    let det = n * scc - sc * sc;
    let c1 = (n * scy - sc * sy) / det;
    let c0 = (sy - c1 * sc) / n;
    let max_residual = curve.iter().map(|&(t, y)| (y - c0 - c1 * (omega * t).cos()).abs()).fold(0.0, f64::max);
    CosineFit { c0, c1, max_residual }
}
