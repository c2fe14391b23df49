//! Closed-form solvers for the spectral optimization problems.
//!
//! Every solver returns the optimal value together with the complete family of
//! regular optimizers as a [`GeneratedSet`].
//!
//! | problem             | objective                     | constraints              |
//! |---------------------|-------------------------------|--------------------------|
//! | rayleigh            | `x⁻Ax`                        | none                     |
//! | extended            | `x⁻Ax ⊕ x⁻p ⊕ q⁻x ⊕ c`        | none                     |
//! | constrained         | `x⁻Ax ⊕ x⁻p`                  | `Bx ⊕ g ≤ x`             |
//! | doubly-constrained  | `x⁻Ax`                        | `Bx ⊕ g ≤ x`, `Cx ≤ h`   |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::GeneratedSet;
use crate::linalg::{Matrix, Vector};
use crate::semifield::{exponent, Semifield};

/// Largest order for which the exponent-tuple enumeration in the
/// constrained problems is attempted by default.
pub const DEFAULT_ORDER_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Rayleigh,
    Extended,
    Constrained,
    DoublyConstrained,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Rayleigh => "rayleigh",
            ProblemKind::Extended => "extended",
            ProblemKind::Constrained => "constrained",
            ProblemKind::DoublyConstrained => "doubly-constrained",
        }
    }
}

/// Minimize `x⁻Ax ⊕ x⁻p ⊕ q⁻x ⊕ c` over regular `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnconstrainedInstance<S> {
    pub a: Matrix<S>,
    pub p: Vector<S>,
    pub q: Vector<S>,
    pub c: S,
}

/// Minimize `x⁻Ax ⊕ x⁻p` subject to `Bx ⊕ g ≤ x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedInstance<S> {
    pub a: Matrix<S>,
    pub b: Matrix<S>,
    pub p: Vector<S>,
    pub g: Vector<S>,
}

/// Minimize `x⁻Ax` subject to `Bx ⊕ g ≤ x` and `Cx ≤ h`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublyConstrainedInstance<S> {
    pub a: Matrix<S>,
    pub b: Matrix<S>,
    pub c: Matrix<S>,
    pub g: Vector<S>,
    pub h: Vector<S>,
}

/// Optimal value and the set of all regular optimizers.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationOutcome<S> {
    pub optimum: S,
    pub solutions: GeneratedSet<S>,
}

impl<S: Semifield> OptimizationOutcome<S> {
    /// See [`canonical_solution`].
    pub fn canonical(&self) -> Vector<S> {
        self.solutions.canonical()
    }
}

/// Any of the four problems, with its data.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem<S> {
    Rayleigh { a: Matrix<S> },
    Extended(UnconstrainedInstance<S>),
    Constrained(ConstrainedInstance<S>),
    DoublyConstrained(DoublyConstrainedInstance<S>),
}

fn square_order<S: Semifield>(a: &Matrix<S>, op: &'static str) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(a.rows())
}

fn check_shape<S: Semifield>(m: &Matrix<S>, shape: (usize, usize), op: &'static str) -> Result<()> {
    if m.shape() != shape {
        return Err(Error::DimensionMismatch {
            op,
            left: shape,
            right: m.shape(),
        });
    }
    Ok(())
}

impl<S: Semifield> UnconstrainedInstance<S> {
    fn validate(&self) -> Result<usize> {
        let n = square_order(&self.a, "extended problem")?;
        check_shape(&self.p, (n, 1), "extended problem: p")?;
        check_shape(&self.q, (n, 1), "extended problem: q")?;
        Ok(n)
    }
}

impl<S: Semifield> ConstrainedInstance<S> {
    fn validate(&self) -> Result<usize> {
        let n = square_order(&self.a, "constrained problem")?;
        check_shape(&self.b, (n, n), "constrained problem: B")?;
        check_shape(&self.p, (n, 1), "constrained problem: p")?;
        check_shape(&self.g, (n, 1), "constrained problem: g")?;
        Ok(n)
    }
}

impl<S: Semifield> DoublyConstrainedInstance<S> {
    fn validate(&self) -> Result<usize> {
        let n = square_order(&self.a, "doubly constrained problem")?;
        check_shape(&self.b, (n, n), "doubly constrained problem: B")?;
        if self.c.cols() != n {
            return Err(Error::DimensionMismatch {
                op: "doubly constrained problem: C",
                left: (self.c.rows(), n),
                right: self.c.shape(),
            });
        }
        check_shape(&self.g, (n, 1), "doubly constrained problem: g")?;
        check_shape(&self.h, (self.c.rows(), 1), "doubly constrained problem: h")?;
        Ok(n)
    }
}

impl<S: Semifield> Problem<S> {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Rayleigh { .. } => ProblemKind::Rayleigh,
            Problem::Extended(_) => ProblemKind::Extended,
            Problem::Constrained(_) => ProblemKind::Constrained,
            Problem::DoublyConstrained(_) => ProblemKind::DoublyConstrained,
        }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        match self {
            Problem::Rayleigh { a } => a,
            Problem::Extended(inst) => &inst.a,
            Problem::Constrained(inst) => &inst.a,
            Problem::DoublyConstrained(inst) => &inst.a,
        }
    }

    /// Checks shapes and returns the number of unknowns.
    pub fn validate(&self) -> Result<usize> {
        match self {
            Problem::Rayleigh { a } => square_order(a, "rayleigh problem"),
            Problem::Extended(inst) => inst.validate(),
            Problem::Constrained(inst) => inst.validate(),
            Problem::DoublyConstrained(inst) => inst.validate(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.matrix().rows()
    }

    pub fn solve(&self) -> Result<OptimizationOutcome<S>> {
        match self {
            Problem::Rayleigh { a } => minimize_rayleigh(a),
            Problem::Extended(inst) => minimize_extended(inst),
            Problem::Constrained(inst) => minimize_constrained(inst),
            Problem::DoublyConstrained(inst) => minimize_doubly_constrained(inst),
        }
    }

    /// Objective value at a regular `x`. See [`evaluate_objective`].
    pub fn objective(&self, x: &Vector<S>) -> Result<S> {
        let n = self.validate()?;
        check_shape(x, (n, 1), "objective evaluation")?;
        if let Some(index) = x.first_zero() {
            return Err(Error::NotRegular { name: "x", index });
        }
        let xc = x.conjugate()?;
        let quadratic = xc.otimes(self.matrix())?.otimes(x)?.to_scalar()?;
        let value = match self {
            Problem::Rayleigh { .. } | Problem::DoublyConstrained(_) => quadratic,
            Problem::Extended(inst) => {
                let xp = xc.otimes(&inst.p)?.to_scalar()?;
                let qx = inst.q.conjugate()?.otimes(x)?.to_scalar()?;
                quadratic.oplus(xp).oplus(qx).oplus(inst.c)
            }
            Problem::Constrained(inst) => quadratic.oplus(xc.otimes(&inst.p)?.to_scalar()?),
        };
        Ok(value)
    }

    /// Whether `x` satisfies the constraints of the problem (always true for
    /// the unconstrained kinds).
    pub fn is_feasible(&self, x: &Vector<S>) -> bool {
        let lower_ok = |b: &Matrix<S>, g: &Vector<S>| {
            b.otimes(x)
                .and_then(|bx| bx.oplus(g))
                .is_ok_and(|lhs| lhs.approx_le(x))
        };
        match self {
            Problem::Rayleigh { .. } | Problem::Extended(_) => true,
            Problem::Constrained(inst) => lower_ok(&inst.b, &inst.g),
            Problem::DoublyConstrained(inst) => {
                lower_ok(&inst.b, &inst.g) && inst.c.otimes(x).is_ok_and(|cx| cx.approx_le(&inst.h))
            }
        }
    }
}

fn positive_spectral_radius<S: Semifield>(a: &Matrix<S>) -> Result<S> {
    let lambda = a.spectral_radius()?;
    if lambda.is_zero() {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok(lambda)
}

/// Minimizes `x⁻Ax`: the minimum is the spectral radius `λ` and the optimizers
/// are `x = (λ⁻¹A)* u` for arbitrary `u`.
pub fn minimize_rayleigh<S: Semifield>(a: &Matrix<S>) -> Result<OptimizationOutcome<S>> {
    let n = square_order(a, "rayleigh problem")?;
    let lambda = positive_spectral_radius(a)?;
    let generator = a.scale(lambda.inverse()?).kleene_star()?;
    Ok(OptimizationOutcome {
        optimum: lambda,
        solutions: GeneratedSet::new(generator, Matrix::zeros(n, 1), None)?,
    })
}

/// `μ = λ ⊕ ⊕_{m=1..n} (q⁻A^{m−1}p)^{1/(m+1)} ⊕ c`.
pub fn extended_optimum<S: Semifield>(inst: &UnconstrainedInstance<S>) -> Result<S> {
    let n = inst.validate()?;
    if let Some(index) = inst.q.first_zero() {
        return Err(Error::NonRegularQ { index });
    }
    let lambda = positive_spectral_radius(&inst.a)?;
    let mut mu = lambda.oplus(inst.c);
    let mut row = inst.q.conjugate()?;
    for m in 1..=n {
        if m > 1 {
            row = row.otimes(&inst.a)?;
        }
        let term = row.otimes(&inst.p)?.to_scalar()?;
        mu = mu.oplus(term.power(exponent(1, m as i64 + 1))?);
    }
    Ok(mu)
}

/// Minimizes `x⁻Ax ⊕ x⁻p ⊕ q⁻x ⊕ c` for `λ > 𝟘` and regular `q`.
///
/// The optimizers are `x = (μ⁻¹A)* u` with `μ⁻¹p ≤ u ≤ μ(q⁻(μ⁻¹A)*)⁻`.
pub fn minimize_extended<S: Semifield>(
    inst: &UnconstrainedInstance<S>,
) -> Result<OptimizationOutcome<S>> {
    let mu = extended_optimum(inst)?;
    let mu_inv = mu.inverse()?;
    let generator = inst.a.scale(mu_inv).kleene_star()?;
    let lower = inst.p.scale(mu_inv);
    let upper = inst
        .q
        .conjugate()?
        .otimes(&generator)?
        .conjugate()?
        .scale(mu);
    Ok(OptimizationOutcome {
        optimum: mu,
        solutions: GeneratedSet::new(generator, lower, Some(upper))?,
    })
}

/// Products of the form `P · A B^{i₁} ⋯ A B^{i_k}` visited depth first.
///
/// Each visited word carries `k` and the exponent total (including the prefix
/// exponent when a `B^{i₀}` prefix is used). Words are extended only while the
/// total stays within `n − k`.
struct WordEnumerator<'a, S> {
    n: usize,
    max_k: usize,
    a_b_powers: &'a [Matrix<S>],
}

/// Callback receiving `(k, total exponent, word)`.
type WordVisitor<'v, S> = dyn FnMut(usize, usize, &Matrix<S>) -> Result<()> + 'v;

impl<S: Semifield> WordEnumerator<'_, S> {
    fn walk(
        &self,
        prefix: &Matrix<S>,
        k: usize,
        total: usize,
        visit: &mut WordVisitor<'_, S>,
    ) -> Result<()> {
        if k == self.max_k {
            return Ok(());
        }
        let k_next = k + 1;
        if total + k_next > self.n {
            return Ok(());
        }
        for i in 0..=(self.n - k_next - total) {
            let word = prefix.otimes(&self.a_b_powers[i])?;
            visit(k_next, total + i, &word)?;
            self.walk(&word, k_next, total + i, visit)?;
        }
        Ok(())
    }
}

fn check_order_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OrderTooLarge { order: n, limit });
    }
    Ok(())
}

fn b_powers<S: Semifield>(b: &Matrix<S>, n: usize) -> Result<Vec<Matrix<S>>> {
    let mut out = vec![Matrix::identity(n)];
    for i in 1..n {
        let next = out[i - 1].otimes(b)?;
        out.push(next);
    }
    Ok(out)
}

/// `θ = λ ⊕ ⊕_{k=1..n−1} ⊕_{1 ≤ i₁+…+i_k ≤ n−k} tr^{1/k}(A B^{i₁} ⋯ A B^{i_k})`.
pub fn constrained_optimum<S: Semifield>(a: &Matrix<S>, b: &Matrix<S>, limit: usize) -> Result<S> {
    let n = square_order(a, "constrained optimum")?;
    check_shape(b, (n, n), "constrained optimum: B")?;
    check_order_limit(n, limit)?;
    let lambda = positive_spectral_radius(a)?;
    let bp = b_powers(b, n)?;
    let a_b_powers = bp.iter().map(|m| a.otimes(m)).collect::<Result<Vec<_>>>()?;
    let walker = WordEnumerator {
        n,
        max_k: n.saturating_sub(1),
        a_b_powers: &a_b_powers,
    };
    let mut theta = lambda;
    walker.walk(&Matrix::identity(n), 0, 0, &mut |k, total, word| {
        if total >= 1 {
            theta = theta.oplus(word.trace()?.power(exponent(1, k as i64))?);
        }
        Ok(())
    })?;
    Ok(theta)
}

/// Minimizes `x⁻Ax ⊕ x⁻p` subject to `Bx ⊕ g ≤ x`, for `λ > 𝟘` and `Tr(B) ≤ 𝟙`.
///
/// The optimizers are `x = (θ⁻¹A ⊕ B)* u` with `u ≥ θ⁻¹p ⊕ g`.
pub fn minimize_constrained<S: Semifield>(
    inst: &ConstrainedInstance<S>,
) -> Result<OptimizationOutcome<S>> {
    minimize_constrained_with_limit(inst, DEFAULT_ORDER_LIMIT)
}

pub fn minimize_constrained_with_limit<S: Semifield>(
    inst: &ConstrainedInstance<S>,
    limit: usize,
) -> Result<OptimizationOutcome<S>> {
    inst.validate()?;
    positive_spectral_radius(&inst.a)?;
    let trace_b = inst.b.tr_cumulative()?;
    if !trace_b.approx_le(S::one()) {
        return Err(Error::InfeasibleConstraints {
            trace: trace_b.render(),
        });
    }
    let theta = constrained_optimum(&inst.a, &inst.b, limit)?;
    let theta_inv = theta.inverse()?;
    let generator = inst.a.scale(theta_inv).oplus(&inst.b)?.kleene_star()?;
    let lower = inst.p.scale(theta_inv).oplus(&inst.g)?;
    Ok(OptimizationOutcome {
        optimum: theta,
        solutions: GeneratedSet::new(generator, lower, None)?,
    })
}

/// `θ = ⊕_{k=1..n} ⊕_{0 ≤ i₀+i₁+…+i_k ≤ n−k} tr^{1/k}(B^{i₀} A B^{i₁} ⋯ A B^{i_k} (I ⊕ g h⁻ C))`.
///
/// Preconditions are not checked here; see [`minimize_doubly_constrained`].
pub fn doubly_constrained_optimum<S: Semifield>(
    inst: &DoublyConstrainedInstance<S>,
    limit: usize,
) -> Result<S> {
    let n = inst.validate()?;
    check_order_limit(n, limit)?;
    let tail = Matrix::identity(n).oplus(&inst.g.otimes(&inst.h.conjugate()?)?.otimes(&inst.c)?)?;
    let bp = b_powers(&inst.b, n)?;
    let a_b_powers = bp
        .iter()
        .map(|m| inst.a.otimes(m))
        .collect::<Result<Vec<_>>>()?;
    let walker = WordEnumerator {
        n,
        max_k: n,
        a_b_powers: &a_b_powers,
    };
    let mut theta = S::zero();
    for (i0, prefix) in bp.iter().enumerate() {
        walker.walk(prefix, 0, i0, &mut |k, _, word| {
            let closed = word.otimes(&tail)?;
            theta = theta.oplus(closed.trace()?.power(exponent(1, k as i64))?);
            Ok(())
        })?;
    }
    Ok(theta)
}

/// Minimizes `x⁻Ax` subject to `Bx ⊕ g ≤ x` and `Cx ≤ h`.
///
/// Requires `λ > 𝟘`, `Tr(B) ≤ 𝟙`, column-regular `C`, regular `h` and
/// `h⁻ C B* g ≤ 𝟙`. The optimizers are `x = (θ⁻¹A ⊕ B)* u` with
/// `g ≤ u ≤ (h⁻ C (θ⁻¹A ⊕ B)*)⁻`.
pub fn minimize_doubly_constrained<S: Semifield>(
    inst: &DoublyConstrainedInstance<S>,
) -> Result<OptimizationOutcome<S>> {
    inst.validate()?;
    positive_spectral_radius(&inst.a)?;
    let trace_b = inst.b.tr_cumulative()?;
    if !trace_b.approx_le(S::one()) {
        return Err(Error::InfeasibleConstraints {
            trace: trace_b.render(),
        });
    }
    if let Some(column) = inst.c.first_zero_column() {
        return Err(Error::NotColumnRegular { column });
    }
    if let Some(index) = inst.h.first_zero() {
        return Err(Error::NotRegular { name: "h", index });
    }
    let h_conj = inst.h.conjugate()?;
    let reach = h_conj
        .otimes(&inst.c)?
        .otimes(&inst.b.kleene_star()?)?
        .otimes(&inst.g)?
        .to_scalar()?;
    if !reach.approx_le(S::one()) {
        return Err(Error::UpperConstraintViolated {
            value: reach.render(),
        });
    }
    let theta = doubly_constrained_optimum(inst, DEFAULT_ORDER_LIMIT)?;
    let generator = inst
        .a
        .scale(theta.inverse()?)
        .oplus(&inst.b)?
        .kleene_star()?;
    let upper = h_conj.otimes(&inst.c)?.otimes(&generator)?.conjugate()?;
    Ok(OptimizationOutcome {
        optimum: theta,
        solutions: GeneratedSet::new(generator, inst.g.clone(), Some(upper))?,
    })
}

/// Direct evaluation of the objective of `problem` at a regular `x`.
pub fn evaluate_objective<S: Semifield>(problem: &Problem<S>, x: &Vector<S>) -> Result<S> {
    problem.objective(x)
}

/// `true` iff `x` is regular, feasible for `problem` and attains `outcome.optimum`.
pub fn membership<S: Semifield>(
    problem: &Problem<S>,
    outcome: &OptimizationOutcome<S>,
    x: &Vector<S>,
) -> bool {
    problem.is_feasible(x)
        && problem
            .objective(x)
            .is_ok_and(|value| value.approx_eq(outcome.optimum))
}

/// Representative optimizer `G ⊗ u` with `u = lower`, zero components of
/// `lower` replaced by `𝟙` (capped by the upper bound).
pub fn canonical_solution<S: Semifield>(outcome: &OptimizationOutcome<S>) -> Vector<S> {
    outcome.canonical()
}
