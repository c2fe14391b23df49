//! Brute-force grid search used to cross-check the closed-form solvers.
//!
//! The search runs over `x` directly, independently of the `u`
//! parametrization of the solution sets. Grid coordinates are ordinary
//! rationals mapped into the semifield with [`Semifield::from_scale`], so for
//! the multiplicative semifields the grid is logarithmic.

use std::fmt::{self, Display};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::optimizer::{membership, OptimizationOutcome, Problem};
use crate::semifield::{Rational, Semifield};

/// Hard cap on the number of grid points.
pub const MAX_GRID_POINTS: usize = 5_000_000;

const SAMPLE_SEED: u64 = 0x7472_6f70_6963_616c;

/// Counterexamples of each kind printed by the report's `Display`.
const SHOWN_COUNTEREXAMPLES: usize = 10;

/// Number of sampled members checked by [`verify_solution_set`].
pub const DEFAULT_SAMPLES: usize = 50;

/// Rectangular grid `[lo_i, hi_i]` with a common step.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    bounds: Vec<(Rational, Rational)>,
    step: Rational,
}

impl GridSpec {
    pub fn new(bounds: Vec<(Rational, Rational)>, step: Rational) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidGrid("no coordinates".into()));
        }
        if step <= Rational::from_integer(0) {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::InvalidGrid(format!("empty interval [{lo}, {hi}]")));
        }
        let grid = GridSpec { bounds, step };
        let total = grid
            .axis_lengths()
            .iter()
            .try_fold(1usize, |acc, &len| acc.checked_mul(len))
            .filter(|&t| t <= MAX_GRID_POINTS);
        if total.is_none() {
            return Err(Error::InvalidGrid(format!(
                "more than {MAX_GRID_POINTS} grid points"
            )));
        }
        Ok(grid)
    }

    /// The same interval `[lo, hi]` on each of `n` coordinates.
    pub fn uniform(n: usize, lo: Rational, hi: Rational, step: Rational) -> Result<Self> {
        GridSpec::new(vec![(lo, hi); n], step)
    }

    /// Parses `lo:hi:step`, e.g. `-2:4:0.5` or `0:8:1/2`.
    pub fn parse_uniform(n: usize, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!(
                "expected lo:hi:step, got `{text}`"
            )));
        }
        let parse = |s: &str| {
            crate::semifield::parse_rational(s)
                .map_err(|_| Error::InvalidGrid(format!("bad number `{s}` in `{text}`")))
        };
        GridSpec::uniform(n, parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn step(&self) -> Rational {
        self.step
    }

    fn axis_lengths(&self) -> Vec<usize> {
        self.bounds
            .iter()
            .map(|(lo, hi)| ((hi - lo) / self.step).floor().to_integer() as usize + 1)
            .collect()
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axis_lengths().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether `coords` lies on the grid.
    pub fn contains(&self, coords: &[Rational]) -> bool {
        coords.len() == self.bounds.len()
            && coords
                .iter()
                .zip(&self.bounds)
                .all(|(c, (lo, hi))| c >= lo && c <= hi && ((c - lo) / self.step).is_integer())
    }

    /// Visits every grid point in lexicographic order.
    pub fn for_each_point(&self, mut visit: impl FnMut(&[Rational])) {
        let lengths = self.axis_lengths();
        let mut index = vec![0usize; lengths.len()];
        let mut coords: Vec<Rational> = self.bounds.iter().map(|(lo, _)| *lo).collect();
        loop {
            visit(&coords);
            let mut axis = lengths.len();
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                index[axis] += 1;
                if index[axis] < lengths[axis] {
                    coords[axis] = self.bounds[axis].0
                        + self.step * Rational::from_integer(index[axis] as i64);
                    break;
                }
                index[axis] = 0;
                coords[axis] = self.bounds[axis].0;
            }
        }
    }
}

fn embed<S: Semifield>(coords: &[Rational]) -> Vector<S> {
    Matrix::column(coords.iter().map(|&c| S::from_scale(c)).collect())
        .expect("grid has at least one coordinate")
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMinimum<S> {
    pub min: S,
    /// All feasible grid points attaining `min`, in lexicographic order.
    pub argmins: Vec<Vector<S>>,
    pub feasible_points: usize,
}

/// Exact minimum of the objective over the feasible grid points.
pub fn grid_minimize<S: Semifield>(
    problem: &Problem<S>,
    grid: &GridSpec,
) -> Result<GridMinimum<S>> {
    let n = problem.validate()?;
    if grid.dimension() != n {
        return Err(Error::DimensionMismatch {
            op: "grid search",
            left: (n, 1),
            right: (grid.dimension(), 1),
        });
    }
    let mut best: Option<GridMinimum<S>> = None;
    let mut feasible = 0usize;
    let mut failure = None;
    grid.for_each_point(|coords| {
        if failure.is_some() {
            return;
        }
        let x = embed::<S>(coords);
        if !problem.is_feasible(&x) {
            return;
        }
        feasible += 1;
        let value = match problem.objective(&x) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        match &mut best {
            None => {
                best = Some(GridMinimum {
                    min: value,
                    argmins: vec![x],
                    feasible_points: 0,
                })
            }
            Some(b) if value.approx_eq(b.min) => b.argmins.push(x),
            Some(b) if value < b.min => {
                b.min = value;
                b.argmins = vec![x];
            }
            Some(_) => {}
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut best = best.ok_or(Error::EmptyGrid)?;
    best.feasible_points = feasible;
    Ok(best)
}

/// Outcome of [`verify_solution_set`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport<S> {
    pub claimed_optimum: S,
    /// `None` when no grid point is feasible.
    pub grid_min: Option<S>,
    pub grid_points: usize,
    pub feasible_points: usize,
    /// Feasible grid points whose objective is strictly below the claimed optimum.
    pub beating_points: Vec<(Vector<S>, S)>,
    /// Grid minimizers that fail membership although the grid minimum does
    /// not exceed the claimed optimum.
    pub rejected_argmins: Vec<Vector<S>>,
    pub samples_checked: usize,
    /// Sampled set members that are infeasible or miss the optimum.
    pub bad_samples: Vec<(Vector<S>, Option<S>)>,
}

impl<S: Semifield> VerificationReport<S> {
    pub fn passed(&self) -> bool {
        self.beating_points.is_empty()
            && self.rejected_argmins.is_empty()
            && self.bad_samples.is_empty()
    }

    /// Whether the grid contains a point attaining the claimed optimum.
    pub fn grid_attains_optimum(&self) -> bool {
        self.grid_min
            .is_some_and(|m| m.approx_eq(self.claimed_optimum))
    }
}

fn render_vector<S: Semifield>(v: &Vector<S>) -> String {
    let parts: Vec<String> = v.entries().iter().map(|a| a.render()).collect();
    format!("({})", parts.join(", "))
}

impl<S: Semifield> Display for VerificationReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claimed optimum: {}", self.claimed_optimum.render())?;
        match self.grid_min {
            Some(m) => writeln!(
                f,
                "grid minimum: {} ({} of {} points feasible)",
                m.render(),
                self.feasible_points,
                self.grid_points
            )?,
            None => writeln!(f, "grid minimum: none (no feasible grid point)")?,
        }
        writeln!(
            f,
            "optimum attained on grid: {}",
            self.grid_attains_optimum()
        )?;
        let more = |f: &mut fmt::Formatter<'_>, total: usize| {
            if total > SHOWN_COUNTEREXAMPLES {
                writeln!(f, "  ... and {} more", total - SHOWN_COUNTEREXAMPLES)
            } else {
                Ok(())
            }
        };
        for (x, value) in self.beating_points.iter().take(SHOWN_COUNTEREXAMPLES) {
            writeln!(
                f,
                "counterexample: {} has objective {}",
                render_vector(x),
                value.render()
            )?;
        }
        more(f, self.beating_points.len())?;
        for x in self.rejected_argmins.iter().take(SHOWN_COUNTEREXAMPLES) {
            writeln!(
                f,
                "counterexample: grid minimizer {} fails membership",
                render_vector(x)
            )?;
        }
        more(f, self.rejected_argmins.len())?;
        for (x, value) in self.bad_samples.iter().take(SHOWN_COUNTEREXAMPLES) {
            let shown = value.map_or_else(|| "infeasible".to_string(), |v| v.render());
            writeln!(
                f,
                "counterexample: set member {} evaluates to {shown}",
                render_vector(x)
            )?;
        }
        more(f, self.bad_samples.len())?;
        writeln!(f, "sampled set members: {}", self.samples_checked)?;
        write!(f, "result: {}", if self.passed() { "pass" } else { "fail" })
    }
}

fn sample_parameters<S: Semifield>(
    outcome: &OptimizationOutcome<S>,
    count: usize,
) -> Vec<Vector<S>> {
    let set = &outcome.solutions;
    let n = set.dimension();
    let mut out = vec![set.canonical_parameter()];
    if let Some(upper) = set.upper() {
        out.push(upper.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    while out.len() < count {
        let entries = (0..n)
            .map(|i| {
                let lower = set.lower().get(i, 0);
                let value = if lower.is_zero() {
                    S::from_scale(Rational::new(rng.gen_range(-8..=8), 2))
                } else {
                    lower.otimes(S::from_scale(Rational::new(rng.gen_range(0..=8), 2)))
                };
                set.upper().map_or(value, |h| value.meet(h.get(i, 0)))
            })
            .collect();
        out.push(Matrix::column(entries).expect("non-empty"));
    }
    out
}

/// Checks a claimed outcome against the grid and against sampled members:
///
/// * no feasible grid point beats the claimed optimum;
/// * when the grid reaches the claimed optimum, every grid minimizer passes
///   [`membership`];
/// * sampled members `G ⊗ u` of the solution set are feasible and attain the
///   claimed optimum.
pub fn verify_solution_set<S: Semifield>(
    problem: &Problem<S>,
    outcome: &OptimizationOutcome<S>,
    grid: &GridSpec,
) -> Result<VerificationReport<S>> {
    let n = problem.validate()?;
    if outcome.solutions.dimension() != n {
        return Err(Error::DimensionMismatch {
            op: "verification",
            left: (n, n),
            right: outcome.solutions.generator().shape(),
        });
    }
    let optimum = outcome.optimum;
    let (grid_min, argmins, feasible_points) = match grid_minimize(problem, grid) {
        Ok(m) => (Some(m.min), m.argmins, m.feasible_points),
        Err(Error::EmptyGrid) => (None, Vec::new(), 0),
        Err(e) => return Err(e),
    };
    let mut beating_points = Vec::new();
    grid.for_each_point(|coords| {
        let x = embed::<S>(coords);
        if problem.is_feasible(&x) {
            if let Ok(value) = problem.objective(&x) {
                if value < optimum && !value.approx_eq(optimum) {
                    beating_points.push((x, value));
                }
            }
        }
    });
    let rejected_argmins = match grid_min {
        Some(m) if m.approx_le(optimum) => argmins
            .into_iter()
            .filter(|x| !membership(problem, outcome, x))
            .collect(),
        _ => Vec::new(),
    };
    let samples = sample_parameters(outcome, DEFAULT_SAMPLES);
    let mut bad_samples = Vec::new();
    for u in &samples {
        let x = outcome.solutions.point(u)?;
        let value = if x.is_regular() && problem.is_feasible(&x) {
            problem.objective(&x).ok()
        } else {
            None
        };
        if !value.is_some_and(|v| v.approx_eq(optimum)) {
            bad_samples.push((x, value));
        }
    }
    Ok(VerificationReport {
        claimed_optimum: optimum,
        grid_min,
        grid_points: grid.len(),
        feasible_points,
        beating_points,
        rejected_argmins,
        samples_checked: samples.len(),
        bad_samples,
    })
}
