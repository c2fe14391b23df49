//! Flow-time project scheduling on top of the max-plus solvers.
//!
//! Two project flavors are supported:
//!
//! * [`Flavor::Window`]: start-finish lags `a_ij`, late start times `q_i` and
//!   early finish times `p_i`. Initiation is adjusted to `s_i = min(x_i, q_i)`,
//!   completion to `t_i = max(y_i, p_i)` with `y_i = max_j(a_ij + x_j)`, and the
//!   maximum of `t_i − s_i` is minimized.
//! * [`Flavor::Constrained`]: start-finish lags, start-start lags `b_ij`, early
//!   start times `g_i` and early finish times `p_i`. Completion is
//!   `y_i = max(max_j(a_ij + x_j), p_i)`, initiation must satisfy
//!   `x_i ≥ max(max_j(b_ij + x_j), g_i)`, and the maximum of `y_i − x_i` is
//!   minimized.
//!
//! Lags and times that are not given are the max-plus zero (−∞).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::optimizer::{
    minimize_constrained, minimize_extended, ConstrainedInstance, OptimizationOutcome, Problem,
    UnconstrainedInstance,
};
use crate::semifield::{MaxPlus, Rational, Semifield};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// Start-finish, late start and early finish constraints.
    Window,
    /// Start-finish, start-start, early start and early finish constraints.
    Constrained,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Project {
    activities: Vec<String>,
    flavor: Flavor,
    start_finish: Matrix<MaxPlus>,
    start_start: Matrix<MaxPlus>,
    late_start: Vector<MaxPlus>,
    early_finish: Vector<MaxPlus>,
    early_start: Vector<MaxPlus>,
}

impl Project {
    pub fn new(activities: Vec<String>, flavor: Flavor) -> Result<Self> {
        let n = activities.len();
        if n == 0 {
            return Err(Error::InvalidProject(
                "a project needs at least one activity".into(),
            ));
        }
        Ok(Project {
            activities,
            flavor,
            start_finish: Matrix::zeros(n, n),
            start_start: Matrix::zeros(n, n),
            late_start: Matrix::zeros(n, 1),
            early_finish: Matrix::zeros(n, 1),
            early_start: Matrix::zeros(n, 1),
        })
    }

    /// Project with unnamed activities `1..=n` built from its max-plus data.
    ///
    /// `q` is only used by the window flavor, `b` and `g` only by the
    /// constrained flavor.
    pub fn from_matrices(
        flavor: Flavor,
        a: Matrix<MaxPlus>,
        b: Option<Matrix<MaxPlus>>,
        p: Option<Vector<MaxPlus>>,
        q: Option<Vector<MaxPlus>>,
        g: Option<Vector<MaxPlus>>,
    ) -> Result<Self> {
        let n = a.rows();
        let mut project = Project::new((1..=n).map(|i| i.to_string()).collect(), flavor)?;
        let check = |m: &Matrix<MaxPlus>, shape: (usize, usize), what: &'static str| {
            if m.shape() == shape {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    op: what,
                    left: shape,
                    right: m.shape(),
                })
            }
        };
        check(&a, (n, n), "project start-finish lags")?;
        project.start_finish = a;
        if let Some(b) = b {
            check(&b, (n, n), "project start-start lags")?;
            project.start_start = b;
        }
        if let Some(p) = p {
            check(&p, (n, 1), "project early finish times")?;
            project.early_finish = p;
        }
        if let Some(q) = q {
            check(&q, (n, 1), "project late start times")?;
            project.late_start = q;
        }
        if let Some(g) = g {
            check(&g, (n, 1), "project early start times")?;
            project.early_start = g;
        }
        Ok(project)
    }

    pub fn activities(&self) -> &[String] {
        &self.activities
    }

    pub fn len(&self) -> usize {
        self.activities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn start_finish(&self) -> &Matrix<MaxPlus> {
        &self.start_finish
    }

    pub fn start_start(&self) -> &Matrix<MaxPlus> {
        &self.start_start
    }

    pub fn late_start(&self) -> &Vector<MaxPlus> {
        &self.late_start
    }

    pub fn early_finish(&self) -> &Vector<MaxPlus> {
        &self.early_finish
    }

    pub fn early_start(&self) -> &Vector<MaxPlus> {
        &self.early_start
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::InvalidProject(format!(
                "activity index {index} out of range (project has {} activities)",
                self.len()
            )));
        }
        Ok(())
    }

    fn tighten(m: &mut Matrix<MaxPlus>, i: usize, j: usize, lag: Rational) {
        let v = m.get(i, j).oplus(MaxPlus::Finite(lag));
        m.set(i, j, v);
    }

    /// Activity `to` cannot complete earlier than `lag` after `from` starts.
    pub fn add_start_finish(&mut self, from: usize, to: usize, lag: Rational) -> Result<()> {
        self.check_index(from)?;
        self.check_index(to)?;
        Self::tighten(&mut self.start_finish, to, from, lag);
        Ok(())
    }

    /// Activity `to` cannot start earlier than `lag` after `from` starts.
    pub fn add_start_start(&mut self, from: usize, to: usize, lag: Rational) -> Result<()> {
        self.check_index(from)?;
        self.check_index(to)?;
        Self::tighten(&mut self.start_start, to, from, lag);
        Ok(())
    }

    pub fn set_late_start(&mut self, activity: usize, time: Rational) -> Result<()> {
        self.check_index(activity)?;
        self.late_start.set(activity, 0, MaxPlus::Finite(time));
        Ok(())
    }

    pub fn set_early_finish(&mut self, activity: usize, time: Rational) -> Result<()> {
        self.check_index(activity)?;
        self.early_finish.set(activity, 0, MaxPlus::Finite(time));
        Ok(())
    }

    pub fn set_early_start(&mut self, activity: usize, time: Rational) -> Result<()> {
        self.check_index(activity)?;
        self.early_start.set(activity, 0, MaxPlus::Finite(time));
        Ok(())
    }

    /// The optimization problem this project reduces to.
    pub fn to_problem(&self) -> Result<Problem<MaxPlus>> {
        match self.flavor {
            Flavor::Window => build_flowtime_instance(self).map(Problem::Extended),
            Flavor::Constrained => build_constrained_instance(self).map(Problem::Constrained),
        }
    }

    /// Completion and adjusted times for given initiation times `x`.
    pub fn schedule_for(&self, x: &Vector<MaxPlus>) -> Result<Schedule> {
        if x.shape() != (self.len(), 1) {
            return Err(Error::DimensionMismatch {
                op: "schedule",
                left: (self.len(), 1),
                right: x.shape(),
            });
        }
        if let Some(index) = x.first_zero() {
            return Err(Error::NotRegular { name: "x", index });
        }
        let ax = self.start_finish.otimes(x)?;
        match self.flavor {
            Flavor::Window => {
                let s = x
                    .conjugate()?
                    .oplus(&self.late_start.conjugate()?)?
                    .conjugate()?;
                let t = ax.oplus(&self.early_finish)?;
                let flow = s.conjugate()?.otimes(&t)?.to_scalar()?;
                Ok(Schedule {
                    initiation: x.clone(),
                    completion: ax,
                    adjusted_start: Some(s),
                    adjusted_finish: Some(t),
                    max_flow_time: flow,
                })
            }
            Flavor::Constrained => {
                let y = ax.oplus(&self.early_finish)?;
                let flow = x.conjugate()?.otimes(&y)?.to_scalar()?;
                Ok(Schedule {
                    initiation: x.clone(),
                    completion: y,
                    adjusted_start: None,
                    adjusted_finish: None,
                    max_flow_time: flow,
                })
            }
        }
    }

    /// Whether initiation times `x` respect the start-start and early start
    /// constraints (always true for the window flavor).
    pub fn respects_constraints(&self, x: &Vector<MaxPlus>) -> bool {
        match self.flavor {
            Flavor::Window => true,
            Flavor::Constrained => self
                .start_start
                .otimes(x)
                .and_then(|bx| bx.oplus(&self.early_start))
                .is_ok_and(|lhs| lhs.le(x)),
        }
    }
}

/// Initiation, completion and adjusted times of every activity.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    /// Initiation times `x`.
    pub initiation: Vector<MaxPlus>,
    /// Completion times `y`: `Ax` for the window flavor, `Ax ⊕ p` for the
    /// constrained flavor.
    pub completion: Vector<MaxPlus>,
    /// `s = min(x, q)`; window flavor only.
    pub adjusted_start: Option<Vector<MaxPlus>>,
    /// `t = max(Ax, p)`; window flavor only.
    pub adjusted_finish: Option<Vector<MaxPlus>>,
    pub max_flow_time: MaxPlus,
}

/// Reduces a window project to the extended unconstrained problem.
///
/// The objective `x⁻Ax ⊕ q⁻Ax ⊕ x⁻p ⊕ q⁻p` is the extended objective with the
/// `q` slot set to `(q⁻A)⁻` and `c = q⁻p`.
pub fn build_flowtime_instance(project: &Project) -> Result<UnconstrainedInstance<MaxPlus>> {
    if project.flavor != Flavor::Window {
        return Err(Error::InvalidProject(
            "flow-time window reduction needs a window project".into(),
        ));
    }
    let q = &project.late_start;
    if let Some(index) = q.first_zero() {
        return Err(Error::NotRegular {
            name: "late_start",
            index,
        });
    }
    let q_conj = q.conjugate()?;
    let q_a = q_conj.otimes(&project.start_finish)?;
    if let Some(column) = q_a.first_zero() {
        return Err(Error::NotColumnRegular { column });
    }
    Ok(UnconstrainedInstance {
        a: project.start_finish.clone(),
        p: project.early_finish.clone(),
        q: q_a.conjugate()?,
        c: q_conj.otimes(&project.early_finish)?.to_scalar()?,
    })
}

pub fn build_constrained_instance(project: &Project) -> Result<ConstrainedInstance<MaxPlus>> {
    if project.flavor != Flavor::Constrained {
        return Err(Error::InvalidProject(
            "constrained reduction needs a constrained project".into(),
        ));
    }
    Ok(ConstrainedInstance {
        a: project.start_finish.clone(),
        b: project.start_start.clone(),
        p: project.early_finish.clone(),
        g: project.early_start.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectSolution {
    pub outcome: OptimizationOutcome<MaxPlus>,
    /// Earliest schedule of the optimal family.
    pub schedule: Schedule,
    pub family: SolutionFamily<MaxPlus>,
}

/// Solves the project and derives the canonical (earliest) optimal schedule.
pub fn solve_project(project: &Project) -> Result<ProjectSolution> {
    let outcome = match project.flavor {
        Flavor::Window => minimize_extended(&build_flowtime_instance(project)?)?,
        Flavor::Constrained => minimize_constrained(&build_constrained_instance(project)?)?,
    };
    let schedule = project.schedule_for(&outcome.canonical())?;
    debug_assert_eq!(schedule.max_flow_time, outcome.optimum);
    let family = describe_solution_family(&outcome);
    Ok(ProjectSolution {
        outcome,
        schedule,
        family,
    })
}

/// Per-component range `[G ⊗ u_low, G ⊗ upper]` of an optimal family, where
/// `u_low` is the canonical parameter. `upper` is `None` when unbounded.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFamily<S> {
    pub lower: Vector<S>,
    pub upper: Option<Vector<S>>,
}

impl<S: Semifield> SolutionFamily<S> {
    pub fn is_point(&self, i: usize) -> bool {
        self.upper
            .as_ref()
            .is_some_and(|u| u.get(i, 0).approx_eq(self.lower.get(i, 0)))
    }

    /// Plain-text table, one line per component.
    pub fn render_table(&self, names: &[String]) -> String {
        let width = names.iter().map(String::len).max().unwrap_or(1).max(8);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  initiation", "activity");
        for i in 0..self.lower.len() {
            let fallback = (i + 1).to_string();
            let name = names.get(i).unwrap_or(&fallback);
            let low = self.lower.get(i, 0).render();
            let range = match &self.upper {
                _ if self.is_point(i) => format!("= {low}"),
                Some(upper) => format!("in [{low}, {}]", upper.get(i, 0).render()),
                None => format!(">= {low} (family unbounded above)"),
            };
            let _ = writeln!(out, "{name:<width$}  {range}");
        }
        out
    }
}

pub fn describe_solution_family<S: Semifield>(
    outcome: &OptimizationOutcome<S>,
) -> SolutionFamily<S> {
    let set = &outcome.solutions;
    let lower = set.canonical();
    let upper = set.upper().map(|h| {
        set.point(h)
            .expect("generated set shapes are validated on construction")
    });
    SolutionFamily { lower, upper }
}
