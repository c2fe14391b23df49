//! Complete solutions of the linear inequalities `Ax ≤ d`, `Ax ≤ x` and `Ax ⊕ b ≤ x`.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::semifield::Semifield;

/// The solution family `{x = G ⊗ u : lower ≤ u ≤ upper}`.
///
/// A missing upper bound means `u` is unbounded above. Zero components of
/// `lower` leave the corresponding component of `u` unrestricted from below.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedSet<S> {
    generator: Matrix<S>,
    lower: Vector<S>,
    upper: Option<Vector<S>>,
}

impl<S: Semifield> GeneratedSet<S> {
    /// Builds the set, rejecting inconsistent shapes and empty boxes.
    pub fn new(generator: Matrix<S>, lower: Vector<S>, upper: Option<Vector<S>>) -> Result<Self> {
        let n = generator.cols();
        if !generator.is_square() {
            return Err(Error::NotSquare {
                op: "generated set",
                rows: generator.rows(),
                cols: generator.cols(),
            });
        }
        for v in std::iter::once(&lower).chain(upper.as_ref()) {
            if v.shape() != (n, 1) {
                return Err(Error::DimensionMismatch {
                    op: "generated set bounds",
                    left: (n, 1),
                    right: v.shape(),
                });
            }
        }
        if let Some(upper) = &upper {
            if let Some(index) = upper.first_zero() {
                return Err(Error::NotRegular {
                    name: "upper",
                    index,
                });
            }
            for (k, (l, u)) in lower.entries().iter().zip(upper.entries()).enumerate() {
                if !l.approx_le(*u) {
                    return Err(Error::EmptySolutionBox {
                        component: k,
                        lower: l.render(),
                        upper: u.render(),
                    });
                }
            }
        }
        Ok(GeneratedSet {
            generator,
            lower,
            upper,
        })
    }

    pub fn generator(&self) -> &Matrix<S> {
        &self.generator
    }

    pub fn lower(&self) -> &Vector<S> {
        &self.lower
    }

    pub fn upper(&self) -> Option<&Vector<S>> {
        self.upper.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    /// `G ⊗ u`.
    pub fn point(&self, u: &Vector<S>) -> Result<Vector<S>> {
        self.generator.otimes(u)
    }

    /// `lower ≤ u ≤ upper`.
    pub fn admits_parameter(&self, u: &Vector<S>) -> bool {
        u.shape() == self.lower.shape()
            && self.lower.approx_le(u)
            && self.upper.as_ref().is_none_or(|h| u.approx_le(h))
    }

    /// The parameter used for the canonical member: `u = lower` on finite
    /// components, and `𝟙` (capped by `upper`) on zero components.
    pub fn canonical_parameter(&self) -> Vector<S> {
        let mut u = self.lower.clone();
        for k in 0..u.len() {
            if u.get(k, 0).is_zero() {
                let cap = self.upper.as_ref().map_or(S::one(), |h| h.get(k, 0));
                u.set(k, 0, S::one().meet(cap));
            }
        }
        u
    }

    /// The canonical member `G ⊗ canonical_parameter()`.
    pub fn canonical(&self) -> Vector<S> {
        self.generator
            .otimes(&self.canonical_parameter())
            .expect("generated set shapes are validated on construction")
    }

    /// Decides whether `x = G ⊗ u` for some admissible `u`.
    ///
    /// Uses the greatest `û ≤ upper` with `G ⊗ û ≤ x`; `x` belongs to the set
    /// exactly when `G ⊗ û = x` and `lower ≤ û`.
    pub fn contains(&self, x: &Vector<S>) -> bool {
        let n = self.dimension();
        if x.shape() != (n, 1) {
            return false;
        }
        let mut u = Vec::with_capacity(n);
        for j in 0..n {
            let mut bound: Option<S> = self.upper.as_ref().map(|h| h.get(j, 0));
            for i in 0..n {
                let g = self.generator.get(i, j);
                if g.is_zero() {
                    continue;
                }
                let ratio = x.get(i, 0).divide(g).expect("finite divisor");
                bound = Some(bound.map_or(ratio, |b| b.meet(ratio)));
            }
            let lower = self.lower.get(j, 0);
            match bound {
                Some(b) if !lower.approx_le(b) => return false,
                Some(b) => u.push(b),
                None => u.push(lower),
            }
        }
        let u = Matrix::column(u).expect("non-empty");
        self.point(&u).is_ok_and(|y| y.approx_eq(x))
    }
}

/// Upper bound `x ≤ bound` describing all solutions of `A ⊗ x ≤ d`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxBound<S> {
    pub bound: Vector<S>,
}

impl<S: Semifield> BoxBound<S> {
    pub fn contains(&self, x: &Vector<S>) -> bool {
        x.approx_le(&self.bound)
    }
}

fn require_column_vector<S: Semifield>(v: &Vector<S>, n: usize, op: &'static str) -> Result<()> {
    if v.shape() != (n, 1) {
        return Err(Error::DimensionMismatch {
            op,
            left: (n, 1),
            right: v.shape(),
        });
    }
    Ok(())
}

/// All solutions of `A ⊗ x ≤ d` are `x ≤ (d⁻ ⊗ A)⁻`.
///
/// `A` must be column-regular and `d` regular.
pub fn solve_upper_bounded<S: Semifield>(a: &Matrix<S>, d: &Vector<S>) -> Result<BoxBound<S>> {
    require_column_vector(d, a.rows(), "upper-bounded inequality")?;
    if let Some(column) = a.first_zero_column() {
        return Err(Error::NotColumnRegular { column });
    }
    if let Some(index) = d.first_zero() {
        return Err(Error::NotRegular { name: "d", index });
    }
    let bound = d.conjugate()?.otimes(a)?.conjugate()?;
    Ok(BoxBound { bound })
}

/// All solutions of `A ⊗ x ≤ x` are `x = A* ⊗ u` for arbitrary `u`,
/// provided `Tr(A) ≤ 𝟙`.
pub fn solve_subinvariant<S: Semifield>(a: &Matrix<S>) -> Result<GeneratedSet<S>> {
    let trace = a.tr_cumulative()?;
    if !trace.approx_le(S::one()) {
        return Err(Error::NoSolution {
            trace: trace.render(),
        });
    }
    let n = a.rows();
    GeneratedSet::new(a.kleene_star()?, Matrix::zeros(n, 1), None)
}

/// All regular solutions of `A ⊗ x ⊕ b ≤ x` are `x = A* ⊗ u` with regular
/// `u ≥ b`, provided `Tr(A) ≤ 𝟙`; otherwise there is no regular solution.
pub fn solve_affine_subinvariant<S: Semifield>(
    a: &Matrix<S>,
    b: &Vector<S>,
) -> Result<GeneratedSet<S>> {
    let trace = a.tr_cumulative()?;
    require_column_vector(b, a.rows(), "affine subinvariant inequality")?;
    if !trace.approx_le(S::one()) {
        return Err(Error::NoRegularSolution {
            trace: trace.render(),
        });
    }
    GeneratedSet::new(a.kleene_star()?, b.clone(), None)
}
