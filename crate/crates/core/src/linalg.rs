//! Dense matrices and vectors over an idempotent semifield.
//!
//! Vectors are matrices with a single column (or row). All operations are pure
//! and return fresh matrices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::{self, Display};
use std::ops::Range;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::semifield::{exponent, Semifield};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Column (or row) vector; a matrix with one column (row).
pub type Vector<S> = Matrix<S>;

/// Regularity flags of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regularity {
    /// No zero entries at all.
    pub regular: bool,
    /// No all-zero rows.
    pub row_regular: bool,
    /// No all-zero columns.
    pub column_regular: bool,
}

impl<S: Semifield> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "matrix construction",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                op: "matrix construction",
                left: (n, cols),
                right: (1, bad.len()),
            });
        }
        Matrix::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn filled(rows: usize, cols: usize, value: S) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// The zero matrix 𝟎.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, S::zero())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn column(entries: Vec<S>) -> Result<Self> {
        let n = entries.len();
        Matrix::new(n, 1, entries)
    }

    pub fn row(entries: Vec<S>) -> Result<Self> {
        let n = entries.len();
        Matrix::new(1, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.cols + j] = value;
    }

    /// Row-major entries. For vectors this is the list of components.
    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn row_entries(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.cols).map(<[S]>::to_vec).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_vector(&self) -> bool {
        self.rows == 1 || self.cols == 1
    }

    pub fn is_column(&self) -> bool {
        self.cols == 1
    }

    /// Number of components of a vector (or entries of a matrix).
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    /// The single entry of a 1×1 matrix.
    pub fn to_scalar(&self) -> Result<S> {
        if self.shape() != (1, 1) {
            return Err(Error::DimensionMismatch {
                op: "scalar extraction",
                left: self.shape(),
                right: (1, 1),
            });
        }
        Ok(self.data[0])
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    fn require_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn require_square(&self, op: &'static str) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Entrywise ⊕.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "matrix addition")?;
        Ok(self.zip_with(other, S::oplus))
    }

    /// Entrywise meet (greatest lower bound).
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "matrix meet")?;
        Ok(self.zip_with(other, S::meet))
    }

    /// Matrix product `(A ⊗ B)_ij = ⊕_k a_ik ⊗ b_kj`.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matrix multiplication",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = vec![S::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let slot = &mut data[i * other.cols + j];
                    *slot = slot.oplus(a.otimes(other.get(k, j)));
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Scalar multiple `x ⊗ A`.
    pub fn scale(&self, x: S) -> Self {
        self.map(|a| x.otimes(a))
    }

    /// `A^p` with `A^0 = I`.
    pub fn power(&self, p: usize) -> Result<Self> {
        let n = self.require_square("matrix power")?;
        let mut result = Matrix::identity(n);
        for _ in 0..p {
            result = result.otimes(self)?;
        }
        Ok(result)
    }

    /// `[A, A², …, A^count]`.
    pub fn powers(&self, count: usize) -> Result<Vec<Self>> {
        self.require_square("matrix powers")?;
        let mut out: Vec<Self> = Vec::with_capacity(count);
        for m in 0..count {
            let next = match m {
                0 => self.clone(),
                _ => out[m - 1].otimes(self)?,
            };
            out.push(next);
        }
        Ok(out)
    }

    /// `tr A = a_11 ⊕ … ⊕ a_nn`.
    pub fn trace(&self) -> Result<S> {
        let n = self.require_square("trace")?;
        Ok((0..n).fold(S::zero(), |acc, i| acc.oplus(self.get(i, i))))
    }

    /// Cumulative trace `Tr(A) = tr A ⊕ tr A² ⊕ … ⊕ tr Aⁿ`.
    pub fn tr_cumulative(&self) -> Result<S> {
        let n = self.require_square("cumulative trace")?;
        self.powers(n)?
            .iter()
            .try_fold(S::zero(), |acc, p| Ok(acc.oplus(p.trace()?)))
    }

    /// Kleene star `A* = I ⊕ A ⊕ … ⊕ A^(n−1)`, the exact finite sum.
    pub fn kleene_star(&self) -> Result<Self> {
        let n = self.require_square("Kleene star")?;
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for _ in 1..n {
            term = term.otimes(self)?;
            sum = sum.oplus(&term)?;
        }
        Ok(sum)
    }

    /// The terms `tr^{1/m}(A^m)` for `m = 1..n`.
    pub fn spectral_terms(&self) -> Result<Vec<S>> {
        let n = self.require_square("spectral radius")?;
        self.powers(n)?
            .iter()
            .enumerate()
            .map(|(m, p)| p.trace()?.power(exponent(1, m as i64 + 1)))
            .collect()
    }

    /// Spectral radius `λ = ⊕_{m=1..n} tr^{1/m}(A^m)`.
    pub fn spectral_radius(&self) -> Result<S> {
        Ok(self.spectral_terms()?.into_iter().fold(S::zero(), S::oplus))
    }

    /// Multiplicative conjugate transpose `x⁻` of a nonzero vector.
    ///
    /// Finite components are inverted and zero components stay zero; a column
    /// becomes a row and vice versa.
    pub fn conjugate(&self) -> Result<Self> {
        if !self.is_vector() {
            return Err(Error::NotVector {
                expected: "row or column",
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let data = self
            .data
            .iter()
            .map(|&a| a.inverse().unwrap_or_else(|_| S::zero()))
            .collect();
        Ok(Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        })
    }

    pub fn regularity(&self) -> Regularity {
        let row_regular = (0..self.rows).all(|i| self.row_entries(i).iter().any(|a| !a.is_zero()));
        let column_regular =
            (0..self.cols).all(|j| (0..self.rows).any(|i| !self.get(i, j).is_zero()));
        Regularity {
            regular: self.data.iter().all(|a| !a.is_zero()),
            row_regular,
            column_regular,
        }
    }

    /// `true` when there are no zero entries.
    pub fn is_regular(&self) -> bool {
        self.data.iter().all(|a| !a.is_zero())
    }

    /// Index of the first zero entry, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.data.iter().position(|a| a.is_zero())
    }

    pub fn first_zero_column(&self) -> Option<usize> {
        (0..self.cols).find(|&j| (0..self.rows).all(|i| self.get(i, j).is_zero()))
    }

    /// Entrywise `self ≤ other` (exact).
    pub fn le(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.data.iter().zip(&other.data).all(|(a, b)| a <= b)
    }

    /// Entrywise `self ≤ other` up to the semifield tolerance.
    pub fn approx_le(&self, other: &Self) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_le(*b))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(*b))
    }

    /// Lower block-triangular normal form of a square matrix.
    pub fn normal_form(&self) -> Result<NormalForm> {
        let n = self.require_square("normal form")?;
        let mut graph = DiGraph::<usize, ()>::with_capacity(n, n * n);
        let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.get(i, j).is_zero() {
                    graph.add_edge(nodes[j], nodes[i], ());
                }
            }
        }
        let mut components: Vec<Vec<usize>> = tarjan_scc(&graph)
            .into_iter()
            .map(|scc| {
                let mut members: Vec<usize> = scc.into_iter().map(|v| graph[v]).collect();
                members.sort_unstable();
                members
            })
            .collect();
        components.sort_unstable_by_key(|c| c[0]);

        let mut component_of = vec![0; n];
        for (c, members) in components.iter().enumerate() {
            for &v in members {
                component_of[v] = c;
            }
        }
        let count = components.len();
        let mut successors = vec![Vec::new(); count];
        let mut indegree = vec![0usize; count];
        for i in 0..n {
            for j in 0..n {
                let (from, to) = (component_of[j], component_of[i]);
                if from != to && !self.get(i, j).is_zero() && !successors[from].contains(&to) {
                    successors[from].push(to);
                    indegree[to] += 1;
                }
            }
        }

        // Kahn's algorithm; among ready components the one with the smallest
        // member index goes first.
        let mut ready: BinaryHeap<Reverse<usize>> = (0..count)
            .filter(|&c| indegree[c] == 0)
            .map(Reverse)
            .collect();
        let mut permutation = Vec::with_capacity(n);
        let mut blocks = Vec::with_capacity(count);
        while let Some(Reverse(c)) = ready.pop() {
            let start = permutation.len();
            permutation.extend_from_slice(&components[c]);
            blocks.push(start..permutation.len());
            for &next in &successors[c] {
                indegree[next] -= 1;
                if indegree[next] == 0 {
                    ready.push(Reverse(next));
                }
            }
        }
        debug_assert_eq!(permutation.len(), n);
        Ok(NormalForm {
            block_sizes: blocks.iter().map(|r| r.len()).collect(),
            permutation,
            blocks,
        })
    }
}

/// Symmetric permutation bringing a matrix to lower block-triangular form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    /// `permutation[k]` is the original index placed at position `k`.
    pub permutation: Vec<usize>,
    pub block_sizes: Vec<usize>,
    /// Index ranges of the diagonal blocks in the permuted matrix.
    pub blocks: Vec<Range<usize>>,
}

impl NormalForm {
    pub fn is_irreducible(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Applies the permutation to rows and columns of `a`.
    pub fn apply<S: Semifield>(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        let n = self.permutation.len();
        if a.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                op: "normal form permutation",
                left: (n, n),
                right: a.shape(),
            });
        }
        let mut out = Matrix::zeros(n, n);
        for (r, &i) in self.permutation.iter().enumerate() {
            for (c, &j) in self.permutation.iter().enumerate() {
                out.set(r, c, a.get(i, j));
            }
        }
        Ok(out)
    }
}

impl<S: Semifield> Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|a| a.render()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.chunks(self.cols).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            write!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}
