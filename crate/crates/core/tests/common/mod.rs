//! Shared strategies and independent reference implementations.
//!
//! The reference code below works on `Option<Rational>` (None is −∞) with
//! plain loops, graph searches and brute force, and never calls into the
//! matrix routines it is used to check.

#![allow(dead_code)]

use num_rational::Rational64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tropical::optimizer::{ConstrainedInstance, UnconstrainedInstance};
use tropical::{Matrix, MaxPlus, Semifield, Vector};

pub type Q = Rational64;
pub type Ref = Option<Q>;

/// Cases per property; above the required minimum of 200.
pub const CASES: u32 = 256;

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

pub fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    )
}

pub fn q(v: i64) -> Q {
    Q::from_integer(v)
}

pub fn mp(v: i64) -> MaxPlus {
    MaxPlus::int(v)
}

pub fn col(v: &[i64]) -> Vector<MaxPlus> {
    Matrix::column(v.iter().map(|&x| mp(x)).collect()).unwrap()
}

pub fn mat(rows: &[&[MaxPlus]]) -> Matrix<MaxPlus> {
    Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

// ---------------------------------------------------------------------------
// Strategies

/// Half-integers in [−5, 5].
pub fn finite_value() -> impl Strategy<Value = Q> {
    (-10i64..=10).prop_map(|k| Q::new(k, 2))
}

/// Integers in [−5, 5].
pub fn integer_value() -> impl Strategy<Value = Q> {
    (-5i64..=5).prop_map(Q::from_integer)
}

pub fn finite_scalar() -> impl Strategy<Value = MaxPlus> {
    finite_value().prop_map(MaxPlus::Finite)
}

/// Finite half-integers, with 𝟘 about a fifth of the time.
pub fn scalar() -> impl Strategy<Value = MaxPlus> {
    prop_oneof![1 => Just(MaxPlus::Bottom), 4 => finite_scalar()]
}

fn build(n: usize, m: usize, entries: Vec<MaxPlus>) -> Matrix<MaxPlus> {
    Matrix::new(n, m, entries).unwrap()
}

pub fn matrix(n: usize, m: usize) -> impl Strategy<Value = Matrix<MaxPlus>> {
    prop::collection::vec(scalar(), n * m).prop_map(move |e| build(n, m, e))
}

/// Integer entries in [−5, 5] with occasional 𝟘.
pub fn integer_matrix(n: usize, m: usize) -> impl Strategy<Value = Matrix<MaxPlus>> {
    let entry =
        prop_oneof![1 => Just(MaxPlus::Bottom), 4 => integer_value().prop_map(MaxPlus::Finite)];
    prop::collection::vec(entry, n * m).prop_map(move |e| build(n, m, e))
}

pub fn square() -> impl Strategy<Value = Matrix<MaxPlus>> {
    (2usize..=4).prop_flat_map(|n| matrix(n, n))
}

/// Two square matrices of the same order in 1..=4.
pub fn square_pair() -> impl Strategy<Value = (Matrix<MaxPlus>, Matrix<MaxPlus>)> {
    (1usize..=4).prop_flat_map(|n| (matrix(n, n), matrix(n, n)))
}

pub fn regular_vector(n: usize) -> impl Strategy<Value = Vector<MaxPlus>> {
    prop::collection::vec(finite_scalar(), n).prop_map(|e| Matrix::column(e).unwrap())
}

pub fn vector(n: usize) -> impl Strategy<Value = Vector<MaxPlus>> {
    prop::collection::vec(scalar(), n).prop_map(|e| Matrix::column(e).unwrap())
}

/// Scales a matrix so that its cumulative trace is at most 𝟙.
pub fn normalize(a: Matrix<MaxPlus>) -> Matrix<MaxPlus> {
    match ref_max_cycle_mean(&to_ref(&a)) {
        Some(lambda) if lambda > q(0) => a.scale(MaxPlus::Finite(-lambda)),
        _ => a,
    }
}

/// Square matrices with `Tr(A) ≤ 𝟙`: half are rescaled, half drawn as is and
/// kept only when they already qualify.
pub fn subunit_square(n: usize) -> impl Strategy<Value = Matrix<MaxPlus>> {
    prop_oneof![
        matrix(n, n).prop_map(normalize),
        matrix(n, n).prop_filter("Tr(A) ≤ 𝟙", |a| ref_max_cycle_mean(&to_ref(a))
            .is_none_or(|l| l <= q(0))),
    ]
}

/// Matrices with at least one cycle, so that `λ > 𝟘`.
pub fn cyclic_matrix(n: usize) -> impl Strategy<Value = Matrix<MaxPlus>> {
    matrix(n, n).prop_filter("λ > 𝟘", |a| ref_max_cycle_mean(&to_ref(a)).is_some())
}

pub fn extended_instance(n: usize) -> impl Strategy<Value = UnconstrainedInstance<MaxPlus>> {
    (cyclic_matrix(n), vector(n), regular_vector(n), scalar())
        .prop_map(|(a, p, q, c)| UnconstrainedInstance { a, p, q, c })
}

pub fn constrained_instance(n: usize) -> impl Strategy<Value = ConstrainedInstance<MaxPlus>> {
    (cyclic_matrix(n), subunit_square(n), vector(n), vector(n))
        .prop_map(|(a, b, p, g)| ConstrainedInstance { a, b, p, g })
}

/// Lifts a max-plus value into any semifield through the order-preserving
/// embedding of the rationals.
pub fn lift<S: Semifield>(a: MaxPlus) -> S {
    match a {
        MaxPlus::Bottom => S::zero(),
        MaxPlus::Finite(v) => S::from_scale(v),
    }
}

pub fn lift_matrix<S: Semifield>(a: &Matrix<MaxPlus>) -> Matrix<S> {
    Matrix::new(
        a.rows(),
        a.cols(),
        a.entries().iter().map(|&x| lift(x)).collect(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Reference max-plus arithmetic

pub fn to_ref(a: &Matrix<MaxPlus>) -> Vec<Vec<Ref>> {
    a.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.value()).collect())
        .collect()
}

pub fn from_ref(a: &[Vec<Ref>]) -> Matrix<MaxPlus> {
    Matrix::from_rows(
        a.iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.map_or(MaxPlus::Bottom, MaxPlus::Finite))
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

pub fn ref_add(a: Ref, b: Ref) -> Ref {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub fn ref_mul(a: Ref, b: Ref) -> Ref {
    Some(a? + b?)
}

pub fn ref_matmul(a: &[Vec<Ref>], b: &[Vec<Ref>]) -> Vec<Vec<Ref>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![None; m]; n];
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i][j] = ref_add(out[i][j], ref_mul(a[i][l], b[l][j]));
            }
        }
    }
    out
}

pub fn ref_identity(n: usize) -> Vec<Vec<Ref>> {
    (0..n)
        .map(|i| (0..n).map(|j| (i == j).then(|| q(0))).collect())
        .collect()
}

pub fn ref_power(a: &[Vec<Ref>], k: usize) -> Vec<Vec<Ref>> {
    (0..k).fold(ref_identity(a.len()), |acc, _| ref_matmul(&acc, a))
}

pub fn ref_trace(a: &[Vec<Ref>]) -> Ref {
    (0..a.len()).fold(None, |acc, i| ref_add(acc, a[i][i]))
}

/// Maximum mean weight over all elementary cycles, found by depth-first
/// search; `None` for an acyclic graph.
pub fn ref_max_cycle_mean(a: &[Vec<Ref>]) -> Ref {
    let n = a.len();
    let mut best: Ref = None;
    fn walk(
        a: &[Vec<Ref>],
        start: usize,
        node: usize,
        weight: Q,
        len: i64,
        seen: &mut Vec<bool>,
        best: &mut Ref,
    ) {
        for next in 0..a.len() {
            let Some(w) = a[node][next] else { continue };
            if next == start {
                *best = ref_add(*best, Some((weight + w) / Q::from_integer(len + 1)));
            } else if next > start && !seen[next] {
                seen[next] = true;
                walk(a, start, next, weight + w, len + 1, seen, best);
                seen[next] = false;
            }
        }
    }
    for start in 0..n {
        let mut seen = vec![false; n];
        seen[start] = true;
        walk(a, start, start, q(0), 0, &mut seen, &mut best);
    }
    best
}

/// Longest-path closure with zero-length paths on the diagonal
/// (Floyd–Warshall). Only meaningful without positive cycles.
pub fn ref_closure(a: &[Vec<Ref>]) -> Vec<Vec<Ref>> {
    let n = a.len();
    let mut d = a.to_vec();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = ref_add(row[i], Some(q(0)));
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = ref_add(d[i][j], ref_mul(d[i][k], d[k][j]));
            }
        }
    }
    d
}

/// All tuples of length `k` with entries in `0..=max`, in lexicographic order.
pub fn tuples(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = vec![0usize; k];
    loop {
        out.push(t.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if t[i] < max {
                t[i] += 1;
                break;
            }
            t[i] = 0;
        }
    }
}

/// `a^(1/k)` in max-plus.
pub fn ref_root(a: Ref, k: usize) -> Ref {
    a.map(|v| v / Q::from_integer(k as i64))
}

/// Optimum of the constrained problem by exhaustive enumeration of every
/// exponent tuple.
pub fn ref_theta(a: &[Vec<Ref>], b: &[Vec<Ref>]) -> Ref {
    let n = a.len();
    let mut theta = ref_max_cycle_mean(a);
    for k in 1..n {
        for t in tuples(k, n - k) {
            let total: usize = t.iter().sum();
            if total < 1 || total > n - k {
                continue;
            }
            let word = t.iter().fold(ref_identity(n), |acc, &i| {
                ref_matmul(&ref_matmul(&acc, a), &ref_power(b, i))
            });
            theta = ref_add(theta, ref_root(ref_trace(&word), k));
        }
    }
    theta
}

/// `x⁻ ⊗ A ⊗ x` for regular `x`.
pub fn ref_quadratic(a: &[Vec<Ref>], x: &[Q]) -> Ref {
    let mut out = None;
    for (i, row) in a.iter().enumerate() {
        for (j, &aij) in row.iter().enumerate() {
            out = ref_add(out, aij.map(|v| v + x[j] - x[i]));
        }
    }
    out
}

/// `y ≤ x` componentwise with −∞ below everything.
pub fn ref_le(y: &[Ref], x: &[Ref]) -> bool {
    y.iter().zip(x).all(|(a, b)| match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a <= b,
    })
}

pub fn ref_apply(a: &[Vec<Ref>], x: &[Q]) -> Vec<Ref> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(None, |acc, (&aij, &xj)| ref_add(acc, aij.map(|v| v + xj)))
        })
        .collect()
}

pub fn values(x: &Vector<MaxPlus>) -> Vec<Q> {
    x.entries()
        .iter()
        .map(|v| v.value().expect("regular"))
        .collect()
}

pub fn refs(x: &Vector<MaxPlus>) -> Vec<Ref> {
    x.entries().iter().map(|v| v.value()).collect()
}

pub fn vector_of(x: &[Q]) -> Vector<MaxPlus> {
    Matrix::column(x.iter().map(|&v| MaxPlus::Finite(v)).collect()).unwrap()
}

/// Defines `pub fn $name() -> Result<(), String>` that runs a property over
/// [`CASES`] inputs with a deterministic seed.
macro_rules! property {
    ($(#[$meta:meta])* $name:ident, $strategy:expr, |$arg:pat_param| $body:block) => {
        $(#[$meta])*
        pub fn $name() -> Result<(), String> {
            $crate::common::runner()
                .run(&$strategy, |$arg| -> Result<(), proptest::test_runner::TestCaseError> {
                    $body
                    Ok(())
                })
                .map_err(|e| e.to_string())
        }
    };
}

pub mod solvers;
