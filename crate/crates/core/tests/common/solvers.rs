//! Properties of the inequality solvers, optimizers, scheduler and oracle.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use tropical::inequalities::{solve_affine_subinvariant, solve_subinvariant, solve_upper_bounded};
use tropical::optimizer::{
    constrained_optimum, doubly_constrained_optimum, membership, minimize_constrained,
    minimize_doubly_constrained, minimize_extended, minimize_rayleigh, ConstrainedInstance,
    DoublyConstrainedInstance, UnconstrainedInstance, DEFAULT_ORDER_LIMIT,
};
use tropical::oracle::grid_minimize;
use tropical::scheduler::{Flavor, Project};
use tropical::{
    solve_project, GeneratedSet, GridSpec, Matrix, MaxPlus, OptimizationOutcome, Problem,
    Semifield, Vector,
};

use super::*;

// ---------------------------------------------------------------------------
// Helpers

/// A parameter in the box of `set`, read from the leading offsets: finite lower components are raised by
/// `|offset|`, zero components take `offset` itself, and the result is capped
/// by the upper bound.
pub fn parameter_in_box(set: &GeneratedSet<MaxPlus>, offsets: &[Q]) -> Vector<MaxPlus> {
    let entries = offsets[..set.dimension()]
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let value = match set.lower().get(i, 0) {
                MaxPlus::Finite(l) => {
                    MaxPlus::Finite(l + if d < Q::from_integer(0) { -d } else { d })
                }
                MaxPlus::Bottom => MaxPlus::Finite(d),
            };
            set.upper().map_or(value, |h| value.meet(h.get(i, 0)))
        })
        .collect();
    Matrix::column(entries).unwrap()
}

fn offsets(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(finite_value(), n)
}

fn offset_samples(n: usize) -> impl Strategy<Value = Vec<Vec<Q>>> {
    prop::collection::vec(offsets(n), 4)
}

/// Objective of any problem kind, recomputed from the raw data.
pub fn ref_objective(problem: &Problem<MaxPlus>, x: &[Q]) -> Ref {
    let a = to_ref(problem.matrix());
    let mut value = ref_quadratic(&a, x);
    let x_minus_p = |p: &Vector<MaxPlus>| {
        refs(p)
            .iter()
            .zip(x)
            .fold(None, |acc, (&pi, &xi)| ref_add(acc, pi.map(|v| v - xi)))
    };
    match problem {
        Problem::Rayleigh { .. } | Problem::DoublyConstrained(_) => {}
        Problem::Extended(inst) => {
            value = ref_add(value, x_minus_p(&inst.p));
            for (xi, qi) in x.iter().zip(values(&inst.q)) {
                value = ref_add(value, Some(xi - qi));
            }
            value = ref_add(value, inst.c.value());
        }
        Problem::Constrained(inst) => value = ref_add(value, x_minus_p(&inst.p)),
    }
    value
}

/// Constraint check recomputed from the raw data.
pub fn ref_feasible(problem: &Problem<MaxPlus>, x: &[Q]) -> bool {
    let lower = |b: &Matrix<MaxPlus>, g: &Vector<MaxPlus>| {
        let bx = ref_apply(&to_ref(b), x);
        let lhs: Vec<Ref> = bx
            .iter()
            .zip(refs(g))
            .map(|(&u, v)| ref_add(u, v))
            .collect();
        let xs: Vec<Ref> = x.iter().map(|&v| Some(v)).collect();
        ref_le(&lhs, &xs)
    };
    match problem {
        Problem::Rayleigh { .. } | Problem::Extended(_) => true,
        Problem::Constrained(inst) => lower(&inst.b, &inst.g),
        Problem::DoublyConstrained(inst) => {
            lower(&inst.b, &inst.g) && ref_le(&ref_apply(&to_ref(&inst.c), x), &refs(&inst.h))
        }
    }
}

/// Attainment, set soundness and the lower bound for one solved instance.
pub fn check_outcome(
    problem: &Problem<MaxPlus>,
    outcome: &OptimizationOutcome<MaxPlus>,
    samples: &[Vec<Q>],
    probes: &[Vector<MaxPlus>],
) -> Result<(), TestCaseError> {
    let optimum = outcome.optimum.value();
    let canonical = outcome.canonical();
    prop_assert!(canonical.is_regular());
    prop_assert!(ref_feasible(problem, &values(&canonical)));
    prop_assert_eq!(ref_objective(problem, &values(&canonical)), optimum);
    prop_assert!(membership(problem, outcome, &canonical));
    for offsets in samples {
        let u = parameter_in_box(&outcome.solutions, offsets);
        prop_assert!(outcome.solutions.admits_parameter(&u));
        let x = outcome.solutions.point(&u).unwrap();
        prop_assert!(x.is_regular());
        prop_assert!(
            ref_feasible(problem, &values(&x)),
            "sample {} infeasible",
            x
        );
        prop_assert_eq!(ref_objective(problem, &values(&x)), optimum, "sample {}", x);
        prop_assert!(outcome.solutions.contains(&x));
    }
    for x in probes {
        let xs = values(x);
        if !ref_feasible(problem, &xs) {
            continue;
        }
        let value = problem.objective(x).unwrap();
        prop_assert_eq!(value.value(), ref_objective(problem, &xs));
        prop_assert!(
            value >= outcome.optimum,
            "{} beats the optimum at {}",
            value,
            x
        );
        prop_assert_eq!(membership(problem, outcome, x), value == outcome.optimum);
    }
    Ok(())
}

fn probes(n: usize) -> impl Strategy<Value = Vec<Vector<MaxPlus>>> {
    prop::collection::vec(regular_vector(n), 8)
}

/// Makes `x` satisfy `Bx ⊕ g ≤ x` by closing `x ⊕ g` under `B`.
fn make_feasible(b: &Matrix<MaxPlus>, g: &Vector<MaxPlus>, x: &Vector<MaxPlus>) -> Vector<MaxPlus> {
    from_ref(&ref_matmul(
        &ref_closure(&to_ref(b)),
        &to_ref(&x.oplus(g).unwrap()),
    ))
}

// ---------------------------------------------------------------------------
// Linear inequalities

fn column_regular(n: usize, m: usize) -> impl Strategy<Value = Matrix<MaxPlus>> {
    matrix(n, m).prop_filter("column-regular", |a| a.first_zero_column().is_none())
}

fn lemma1_case() -> impl Strategy<Value = (Matrix<MaxPlus>, Vector<MaxPlus>, Vec<Q>, Q)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            column_regular(n, m),
            regular_vector(n),
            prop::collection::vec((0i64..=6).prop_map(|k| Q::new(k, 2)), m),
            (1i64..=6).prop_map(|k| Q::new(k, 2)),
        )
    })
}

property!(
    /// `A ⊗ x ≤ d` exactly when `x ≤ (d⁻A)⁻`, and the bound is tight in every component.
    upper_bounded_solutions,
    lemma1_case(),
    |(a, d, slack, delta)| {
        let bound = solve_upper_bounded(&a, &d).unwrap().bound;
        let ra = to_ref(&a);
        let dv = values(&d);
        for j in 0..a.cols() {
            let expected = ra
                .iter()
                .zip(&dv)
                .filter_map(|(row, di)| row[j].map(|aij| di - aij))
                .min();
            prop_assert_eq!(bound.get(j, 0).value(), expected);
        }
        prop_assert!(a.otimes(&bound).unwrap().le(&d));
        let below: Vec<Q> = values(&bound).iter().zip(&slack).map(|(b, s)| b - s).collect();
        prop_assert!(a.otimes(&vector_of(&below)).unwrap().le(&d));
        for j in 0..a.cols() {
            let mut above = values(&bound);
            above[j] += delta;
            prop_assert!(!a.otimes(&vector_of(&above)).unwrap().le(&d), "component {}", j);
        }
    }
);

property!(
    /// Solutions of `A ⊗ x ≤ x` are exactly the vectors `A* ⊗ u`.
    subinvariant_solutions,
    (1usize..=4).prop_flat_map(|n| (subunit_square(n), vector(n), regular_vector(n))),
    |(a, u, x)| {
        let set = solve_subinvariant(&a).unwrap();
        let star = set.generator().clone();
        let y = star.otimes(&u).unwrap();
        prop_assert!(a.otimes(&y).unwrap().le(&y));
        let solution = if a.otimes(&x).unwrap().le(&x) { x } else { star.otimes(&x).unwrap() };
        prop_assert!(a.otimes(&solution).unwrap().le(&solution));
        prop_assert_eq!(star.otimes(&solution).unwrap(), solution.clone());
        prop_assert!(set.contains(&solution));
    }
);

property!(
    /// Every `A* ⊗ u` with regular `u ≥ b` solves `A ⊗ x ⊕ b ≤ x`.
    affine_solutions_are_sound,
    (1usize..=4).prop_flat_map(|n| (subunit_square(n), vector(n), regular_vector(n))),
    |(a, b, w)| {
        let set = solve_affine_subinvariant(&a, &b).unwrap();
        let u = b.oplus(&w).unwrap();
        prop_assert!(set.admits_parameter(&u));
        let x = set.point(&u).unwrap();
        prop_assert!(x.is_regular());
        prop_assert!(a.otimes(&x).unwrap().oplus(&b).unwrap().le(&x));
        prop_assert!(set.contains(&x));
    }
);

fn integer_subunit(n: usize) -> impl Strategy<Value = Matrix<MaxPlus>> {
    integer_matrix(n, n).prop_filter("Tr(A) ≤ 𝟙", |a| {
        ref_max_cycle_mean(&to_ref(a)).is_none_or(|l| l <= q(0))
    })
}

fn integer_vector(n: usize) -> impl Strategy<Value = Vector<MaxPlus>> {
    prop::collection::vec(
        prop_oneof![1 => Just(MaxPlus::Bottom), 4 => integer_value().prop_map(MaxPlus::Finite)],
        n,
    )
    .prop_map(|e| Matrix::column(e).unwrap())
}

property!(
    /// On a grid, the regular solutions of `A ⊗ x ⊕ b ≤ x` are exactly the set members.
    affine_solutions_are_complete,
    (integer_subunit(3), integer_vector(3)),
    |(a, b)| {
        let set = solve_affine_subinvariant(&a, &b).unwrap();
        let grid = GridSpec::uniform(3, q(-4), q(4), q(1)).unwrap();
        let mut failure = None;
        grid.for_each_point(|coords| {
            if failure.is_some() {
                return;
            }
            let x = vector_of(coords);
            let solves = ref_le(
                &ref_apply(&to_ref(&a), coords)
                    .iter()
                    .zip(refs(&b))
                    .map(|(&u, v)| ref_add(u, v))
                    .collect::<Vec<_>>(),
                &coords.iter().map(|&c| Some(c)).collect::<Vec<_>>(),
            );
            if solves != set.contains(&x) {
                failure = Some(format!("{x}: solves = {solves}"));
            }
        });
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }
);

// ---------------------------------------------------------------------------
// Optimizers

property!(
    /// Rayleigh solutions: attainment, soundness, lower bound and scaling closure.
    rayleigh_solutions,
    (2usize..=4).prop_flat_map(|n| (cyclic_matrix(n), offset_samples(n), probes(n), finite_value())),
    |(a, samples, probes, alpha)| {
        let outcome = minimize_rayleigh(&a).unwrap();
        prop_assert_eq!(outcome.optimum.value(), ref_max_cycle_mean(&to_ref(&a)));
        let problem = Problem::Rayleigh { a };
        check_outcome(&problem, &outcome, &samples, &probes)?;
        for offsets in &samples {
            let x = outcome.solutions.point(&parameter_in_box(&outcome.solutions, offsets)).unwrap();
            let scaled = x.scale(MaxPlus::Finite(alpha));
            prop_assert!(membership(&problem, &outcome, &scaled));
        }
    }
);

fn ref_mu(inst: &UnconstrainedInstance<MaxPlus>) -> Ref {
    let a = to_ref(&inst.a);
    let n = a.len();
    let qv = values(&inst.q);
    let p = refs(&inst.p);
    let mut mu = ref_add(ref_max_cycle_mean(&a), inst.c.value());
    for m in 1..=n {
        let am = ref_power(&a, m - 1);
        let mut term = None;
        for i in 0..n {
            for j in 0..n {
                term = ref_add(term, ref_mul(am[i][j], p[j]).map(|v| v - qv[i]));
            }
        }
        mu = ref_add(mu, ref_root(term, m + 1));
    }
    mu
}

property!(
    /// Extended problem: optimum formula, attainment, soundness and lower bound.
    extended_solutions,
    (2usize..=4).prop_flat_map(|n| (extended_instance(n), offset_samples(n), probes(n))),
    |(inst, samples, probes)| {
        let outcome = minimize_extended(&inst).unwrap();
        prop_assert_eq!(outcome.optimum.value(), ref_mu(&inst));
        let problem = Problem::Extended(inst.clone());
        check_outcome(&problem, &outcome, &samples, &probes)?;

        let plain = UnconstrainedInstance {
            p: Matrix::zeros(inst.a.rows(), 1),
            c: MaxPlus::Bottom,
            ..inst.clone()
        };
        let reduced = minimize_extended(&plain).unwrap();
        let lambda = minimize_rayleigh(&inst.a).unwrap();
        prop_assert_eq!(reduced.optimum, lambda.optimum);
        prop_assert!(reduced.solutions.lower().is_zero());
        prop_assert_eq!(reduced.solutions.generator(), lambda.solutions.generator());
    }
);

property!(
    /// θ equals exhaustive enumeration and makes `θ⁻¹A ⊕ B` have trace at most 𝟙.
    constrained_theta_enumeration,
    (1usize..=4).prop_flat_map(|n| (cyclic_matrix(n), subunit_square(n))),
    |(a, b)| {
        let theta = constrained_optimum(&a, &b, DEFAULT_ORDER_LIMIT).unwrap();
        prop_assert_eq!(theta.value(), ref_theta(&to_ref(&a), &to_ref(&b)));
        let combined = a.scale(theta.inverse().unwrap()).oplus(&b).unwrap();
        prop_assert!(ref_max_cycle_mean(&to_ref(&combined)).is_none_or(|l| l <= q(0)));
    }
);

property!(
    /// Constrained problem: attainment, exact constraint satisfaction and lower bound.
    constrained_solutions,
    (2usize..=4).prop_flat_map(|n| (constrained_instance(n), offset_samples(n), probes(n))),
    |(inst, samples, probes)| {
        let outcome = minimize_constrained(&inst).unwrap();
        let feasible: Vec<_> = probes.iter().map(|x| make_feasible(&inst.b, &inst.g, x)).collect();
        let problem = Problem::Constrained(inst);
        check_outcome(&problem, &outcome, &samples, &feasible)?;
    }
);

/// `θ` of the doubly constrained problem by exhaustive enumeration.
pub fn ref_double_theta(inst: &DoublyConstrainedInstance<MaxPlus>) -> Ref {
    let a = to_ref(&inst.a);
    let b = to_ref(&inst.b);
    let n = a.len();
    let g = to_ref(&inst.g);
    let h_inv: Vec<Vec<Ref>> = vec![refs(&inst.h).iter().map(|v| v.map(|x| -x)).collect()];
    let ghc = ref_matmul(&ref_matmul(&g, &h_inv), &to_ref(&inst.c));
    let mut tail = ref_identity(n);
    for i in 0..n {
        for j in 0..n {
            tail[i][j] = ref_add(tail[i][j], ghc[i][j]);
        }
    }
    let mut theta = None;
    for k in 1..=n {
        for t in tuples(k + 1, n - k) {
            if t.iter().sum::<usize>() > n - k {
                continue;
            }
            let word = t[1..].iter().fold(ref_power(&b, t[0]), |acc, &i| {
                ref_matmul(&ref_matmul(&acc, &a), &ref_power(&b, i))
            });
            theta = ref_add(theta, ref_root(ref_trace(&ref_matmul(&word, &tail)), k));
        }
    }
    theta
}

/// Doubly constrained instances whose upper bound `h` clears `C B* g` by a
/// random margin.
pub fn doubly_instance(n: usize) -> impl Strategy<Value = DoublyConstrainedInstance<MaxPlus>> {
    (
        cyclic_matrix(n),
        subunit_square(n),
        column_regular(n, n),
        vector(n),
        prop::collection::vec((0i64..=6).prop_map(|k| Q::new(k, 2)), n),
        regular_vector(n),
    )
        .prop_map(move |(a, b, c, g, margin, fallback)| {
            let reach = ref_matmul(
                &ref_matmul(&to_ref(&c), &ref_closure(&to_ref(&b))),
                &to_ref(&g),
            );
            let h = (0..n)
                .map(|i| match reach[i][0] {
                    Some(r) => MaxPlus::Finite(r + margin[i]),
                    None => fallback.get(i, 0),
                })
                .collect();
            DoublyConstrainedInstance {
                a,
                b,
                c,
                g,
                h: Matrix::column(h).unwrap(),
            }
        })
}

property!(
    /// Doubly constrained problem: θ by enumeration, attainment, both constraints, lower bound.
    doubly_constrained_solutions,
    (2usize..=3).prop_flat_map(|n| (doubly_instance(n), offset_samples(n), probes(n))),
    |(inst, samples, probes)| {
        let theta = doubly_constrained_optimum(&inst, DEFAULT_ORDER_LIMIT).unwrap();
        prop_assert_eq!(theta.value(), ref_double_theta(&inst));
        let outcome = minimize_doubly_constrained(&inst).unwrap();
        prop_assert_eq!(outcome.optimum, theta);
        let feasible: Vec<_> = probes.iter().map(|x| make_feasible(&inst.b, &inst.g, x)).collect();
        let problem = Problem::DoublyConstrained(inst);
        check_outcome(&problem, &outcome, &samples, &feasible)?;
    }
);

property!(
    /// No point of a half-step grid beats the doubly constrained optimum.
    doubly_constrained_grid_bound,
    doubly_instance(2),
    |inst| {
        let outcome = minimize_doubly_constrained(&inst).unwrap();
        let problem = Problem::DoublyConstrained(inst);
        let centre = values(&outcome.canonical());
        let bounds = centre
            .iter()
            .map(|c| {
                let c = (c * q(2)).floor() / q(2);
                (c - q(4), c + q(4))
            })
            .collect();
        let grid = GridSpec::new(bounds, Q::new(1, 2)).unwrap();
        match grid_minimize(&problem, &grid) {
            Ok(found) => prop_assert!(found.min >= outcome.optimum),
            Err(tropical::Error::EmptyGrid) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
);

fn check_lifted<S: Semifield>(
    problem: &Problem<MaxPlus>,
    optimum: MaxPlus,
) -> Result<(), TestCaseError> {
    let lifted: Problem<S> = match problem {
        Problem::Rayleigh { a } => Problem::Rayleigh { a: lift_matrix(a) },
        Problem::Extended(inst) => Problem::Extended(UnconstrainedInstance {
            a: lift_matrix(&inst.a),
            p: lift_matrix(&inst.p),
            q: lift_matrix(&inst.q),
            c: lift(inst.c),
        }),
        Problem::Constrained(inst) => Problem::Constrained(ConstrainedInstance {
            a: lift_matrix(&inst.a),
            b: lift_matrix(&inst.b),
            p: lift_matrix(&inst.p),
            g: lift_matrix(&inst.g),
        }),
        Problem::DoublyConstrained(_) => unreachable!("not lifted"),
    };
    let outcome = lifted.solve().unwrap();
    prop_assert!(
        outcome.optimum.approx_eq(lift(optimum)),
        "{} vs {}",
        outcome.optimum,
        optimum
    );
    prop_assert!(membership(&lifted, &outcome, &outcome.canonical()));
    Ok(())
}

property!(
    /// Solvers in the other three semifields agree with max-plus through the embedding.
    solvers_commute_with_embedding,
    (2usize..=3).prop_flat_map(|n| (extended_instance(n), constrained_instance(n))),
    |(ext, con)| {
        for problem in [
            Problem::Rayleigh { a: ext.a.clone() },
            Problem::Extended(ext.clone()),
            Problem::Constrained(con.clone()),
        ] {
            let optimum = problem.solve().unwrap().optimum;
            check_lifted::<tropical::MinPlus>(&problem, optimum)?;
            check_lifted::<tropical::MaxTimes>(&problem, optimum)?;
            check_lifted::<tropical::MinTimes>(&problem, optimum)?;
        }
    }
);

// ---------------------------------------------------------------------------
// Scheduling

fn window_case() -> impl Strategy<Value = (Matrix<MaxPlus>, Vector<MaxPlus>, Vector<MaxPlus>, Q)> {
    (2usize..=4).prop_flat_map(|n| {
        (
            column_regular(n, n),
            regular_vector(n),
            regular_vector(n),
            finite_value(),
        )
    })
}

fn window_project(a: &Matrix<MaxPlus>, p: &Vector<MaxPlus>, q: &Vector<MaxPlus>) -> Project {
    Project::from_matrices(
        Flavor::Window,
        a.clone(),
        None,
        Some(p.clone()),
        Some(q.clone()),
        None,
    )
    .unwrap()
}

property!(
    /// Shifting early finish and late start times together shifts the schedule only.
    window_shift_equivariance,
    window_case(),
    |(a, p, qv, delta)| {
        let base = solve_project(&window_project(&a, &p, &qv)).unwrap();
        let shift = MaxPlus::Finite(delta);
        let moved = solve_project(&window_project(&a, &p.scale(shift), &qv.scale(shift))).unwrap();
        prop_assert_eq!(moved.outcome.optimum, base.outcome.optimum);
        prop_assert_eq!(moved.schedule.max_flow_time, base.schedule.max_flow_time);
        prop_assert_eq!(moved.schedule.initiation, base.schedule.initiation.scale(shift));
    }
);

/// `max_i (t_i − s_i)` with `s = min(x, q)` and `t = max(Ax, p)`.
fn direct_window_flow(
    a: &Matrix<MaxPlus>,
    p: &Vector<MaxPlus>,
    qv: &Vector<MaxPlus>,
    x: &[Q],
) -> Q {
    let ax = ref_apply(&to_ref(a), x);
    let (pv, qs) = (values(p), values(qv));
    (0..x.len())
        .map(|i| {
            let t = ax[i].map_or(pv[i], |v| v.max(pv[i]));
            let s = x[i].min(qs[i]);
            t - s
        })
        .max()
        .unwrap()
}

property!(
    /// The reduced window objective equals the flow time computed from the schedule.
    window_reduction_is_faithful,
    window_case().prop_flat_map(|(a, p, qv, _)| {
        let n = a.rows();
        (Just(a), Just(p), Just(qv), regular_vector(n))
    }),
    |(a, p, qv, x)| {
        let project = window_project(&a, &p, &qv);
        let problem = project.to_problem().unwrap();
        let direct = direct_window_flow(&a, &p, &qv, &values(&x));
        prop_assert_eq!(problem.objective(&x).unwrap(), MaxPlus::Finite(direct));
        let schedule = project.schedule_for(&x).unwrap();
        prop_assert_eq!(schedule.max_flow_time, MaxPlus::Finite(direct));
        prop_assert_eq!(schedule.completion, a.otimes(&x).unwrap());
    }
);

fn constrained_project_case(
) -> impl Strategy<Value = (ConstrainedInstance<MaxPlus>, Vector<MaxPlus>, Vec<Vec<Q>>)> {
    (2usize..=4).prop_flat_map(|n| {
        (
            (
                column_regular(n, n),
                subunit_square(n),
                regular_vector(n),
                vector(n),
            )
                .prop_map(|(a, b, p, g)| ConstrainedInstance { a, b, p, g }),
            regular_vector(n),
            offset_samples(4),
        )
    })
}

fn constrained_project(inst: &ConstrainedInstance<MaxPlus>) -> Project {
    Project::from_matrices(
        Flavor::Constrained,
        inst.a.clone(),
        Some(inst.b.clone()),
        Some(inst.p.clone()),
        None,
        Some(inst.g.clone()),
    )
    .unwrap()
}

property!(
    /// The reduced constrained objective equals `max_i (y_i − x_i)` with `y = max(Ax, p)`.
    constrained_reduction_is_faithful,
    constrained_project_case(),
    |(inst, x, _)| {
        let project = constrained_project(&inst);
        let problem = project.to_problem().unwrap();
        let xs = values(&x);
        let ax = ref_apply(&to_ref(&inst.a), &xs);
        let pv = values(&inst.p);
        let direct = (0..xs.len())
            .map(|i| ax[i].map_or(pv[i], |v| v.max(pv[i])) - xs[i])
            .max()
            .unwrap();
        prop_assert_eq!(problem.objective(&x).unwrap(), MaxPlus::Finite(direct));
        prop_assert_eq!(project.schedule_for(&x).unwrap().max_flow_time, MaxPlus::Finite(direct));
        prop_assert_eq!(project.respects_constraints(&x), ref_feasible(&problem, &xs));
    }
);

property!(
    /// Every sampled optimal schedule meets all constraints and the optimal flow time.
    sampled_schedules_are_optimal,
    (window_case(), constrained_project_case()),
    |((a, p, qv, _), (inst, _, samples))| {
        let window = window_project(&a, &p, &qv);
        let constrained = constrained_project(&inst);
        for project in [window, constrained] {
            let solution = solve_project(&project).unwrap();
            for offsets in &samples {
                let u = parameter_in_box(&solution.outcome.solutions, offsets);
                let x = solution.outcome.solutions.point(&u).unwrap();
                let schedule = project.schedule_for(&x).unwrap();
                prop_assert_eq!(schedule.max_flow_time, solution.outcome.optimum);
                prop_assert!(project.respects_constraints(&x));
                match project.flavor() {
                    Flavor::Window => {
                        let s = schedule.adjusted_start.unwrap();
                        let t = schedule.adjusted_finish.unwrap();
                        prop_assert_eq!(schedule.completion.clone(), project.start_finish().otimes(&x).unwrap());
                        prop_assert!(s.le(&x) && s.le(project.late_start()));
                        prop_assert!(project.early_finish().le(&t) && schedule.completion.le(&t));
                    }
                    Flavor::Constrained => {
                        let y = project.start_finish().otimes(&x).unwrap().oplus(project.early_finish()).unwrap();
                        prop_assert_eq!(schedule.completion, y);
                    }
                }
            }
        }
    }
);

// ---------------------------------------------------------------------------
// Oracle

/// Random extended instances with integer data in [−5, 5] and regular `q`.
pub fn integer_extended_instance() -> impl Strategy<Value = UnconstrainedInstance<MaxPlus>> {
    (
        integer_matrix(3, 3).prop_filter("λ > 𝟘", |a| ref_max_cycle_mean(&to_ref(a)).is_some()),
        integer_vector(3),
        prop::collection::vec(integer_value().prop_map(MaxPlus::Finite), 3)
            .prop_map(|e| Matrix::column(e).unwrap()),
        prop_oneof![1 => Just(MaxPlus::Bottom), 2 => integer_value().prop_map(MaxPlus::Finite)],
    )
        .prop_map(|(a, p, q, c)| UnconstrainedInstance { a, p, q, c })
}

/// Grid search over a half-step box of radius 3 around the canonical
/// solution. Returns whether the canonical solution lies on the grid.
pub fn check_oracle_agreement(problem: &Problem<MaxPlus>) -> Result<bool, TestCaseError> {
    let outcome = problem.solve().unwrap();
    let canonical = values(&outcome.canonical());
    let half = Q::new(1, 2);
    let bounds = canonical
        .iter()
        .map(|c| {
            let c = (c / half).floor() * half;
            (c - q(3), c + q(3))
        })
        .collect();
    let grid = GridSpec::new(bounds, half).unwrap();
    let on_grid = grid.contains(&canonical);
    let found = match grid_minimize(problem, &grid) {
        Ok(found) => found,
        Err(tropical::Error::EmptyGrid) => {
            prop_assert!(!on_grid);
            return Ok(false);
        }
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    prop_assert!(
        found.min >= outcome.optimum,
        "grid beats the optimum: {}",
        found.min
    );
    if on_grid {
        prop_assert_eq!(found.min, outcome.optimum);
        for x in &found.argmins {
            prop_assert!(membership(problem, &outcome, x), "argmin {} rejected", x);
        }
    }
    Ok(on_grid)
}

property!(
    /// Grid search never beats the closed-form optimum and reaches it when it can.
    oracle_agreement,
    integer_extended_instance(),
    |inst| {
        check_oracle_agreement(&Problem::Extended(inst))?;
    }
);

property!(
    /// Same agreement for constrained instances.
    constrained_oracle_agreement,
    (integer_matrix(3, 3).prop_filter("λ > 𝟘", |a| ref_max_cycle_mean(&to_ref(a)).is_some()),
     integer_subunit(3), integer_vector(3), integer_vector(3))
        .prop_map(|(a, b, p, g)| ConstrainedInstance { a, b, p, g }),
    |inst| {
        check_oracle_agreement(&Problem::Constrained(inst))?;
    }
);
