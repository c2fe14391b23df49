//! JSON documents for matrices, problems, outcomes, projects and schedules.
//!
//! Scalars are JSON numbers, `"p/q"` strings or the string `"zero"` for 𝟘.
//! Output is canonical: exact integers are numbers, other rationals are
//! reduced `"p/q"` strings, and object keys keep a fixed order.

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::inequalities::GeneratedSet;
use crate::linalg::{Matrix, Vector};
use crate::optimizer::{
    ConstrainedInstance, DoublyConstrainedInstance, OptimizationOutcome, Problem, ProblemKind,
    UnconstrainedInstance,
};
use crate::scheduler::{Flavor, Project, ProjectSolution};
use crate::semifield::{MaxPlus, Rational, Semifield, SemifieldId};

/// JSON spelling of 𝟘.
pub const ZERO: &str = "zero";

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

pub fn scalar_from_json<S: Semifield>(value: &Value) -> Result<S> {
    match value {
        Value::String(s) if s.trim() == ZERO => Ok(S::zero()),
        Value::String(s) => S::parse_value(s),
        Value::Number(n) => S::parse_value(&n.to_string()),
        other => Err(Error::ParseScalar(other.to_string())),
    }
}

pub fn scalar_to_json<S: Semifield>(a: S) -> Value {
    if a.is_zero() {
        return Value::String(ZERO.into());
    }
    if S::EXACT {
        let text = a.render();
        return match text.parse::<i64>() {
            Ok(i) => Value::Number(i.into()),
            Err(_) => Value::String(text),
        };
    }
    a.to_f64()
        .and_then(Number::from_f64)
        .map_or_else(|| Value::String(a.render()), Value::Number)
}

fn rows_from_json<S: Semifield>(data: &Value) -> Result<Vec<Vec<S>>> {
    let rows = data
        .as_array()
        .ok_or_else(|| malformed("matrix data must be an array of rows"))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| malformed("matrix row must be an array"))?
                .iter()
                .map(scalar_from_json)
                .collect()
        })
        .collect()
}

fn declared_size(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>> {
    obj.get(key)
        .map(|v| {
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| malformed(format!("`{key}` must be a non-negative integer")))
        })
        .transpose()
}

/// Reads `{"rows": n, "cols": m, "data": [[...]]}` or a bare array of rows.
pub fn matrix_from_json<S: Semifield>(value: &Value) -> Result<Matrix<S>> {
    let (rows, declared) = match value {
        Value::Object(obj) => {
            let data = obj
                .get("data")
                .ok_or_else(|| malformed("matrix object needs a `data` field"))?;
            let rows = declared_size(obj, "rows")?;
            let cols = declared_size(obj, "cols")?;
            (rows_from_json::<S>(data)?, Some((rows, cols)))
        }
        Value::Array(_) => (rows_from_json::<S>(value)?, None),
        _ => return Err(malformed("matrix must be an object or an array of rows")),
    };
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Empty);
    }
    if let Some(len) = rows.iter().map(Vec::len).find(|&l| l != rows[0].len()) {
        return Err(malformed(format!(
            "ragged matrix: rows of length {} and {len}",
            rows[0].len()
        )));
    }
    if let Some((r, c)) = declared {
        if r.is_some_and(|r| r != rows.len()) || c.is_some_and(|c| c != rows[0].len()) {
            return Err(malformed(format!(
                "declared size {}x{} does not match data {}x{}",
                r.map_or("?".into(), |r| r.to_string()),
                c.map_or("?".into(), |c| c.to_string()),
                rows.len(),
                rows[0].len()
            )));
        }
    }
    Matrix::from_rows(rows)
}

/// Reads a flat array of scalars, or a matrix document with one column.
pub fn vector_from_json<S: Semifield>(value: &Value) -> Result<Vector<S>> {
    match value {
        Value::Array(items) if items.iter().all(|v| !v.is_array()) => {
            let entries = items
                .iter()
                .map(scalar_from_json)
                .collect::<Result<Vec<S>>>()?;
            if entries.is_empty() {
                return Err(Error::Empty);
            }
            Matrix::column(entries)
        }
        _ => {
            let m = matrix_from_json::<S>(value)?;
            if m.cols() != 1 {
                return Err(Error::NotVector {
                    expected: "column",
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            Ok(m)
        }
    }
}

pub fn matrix_to_json<S: Semifield>(m: &Matrix<S>) -> Value {
    let data: Vec<Value> = m
        .to_rows()
        .into_iter()
        .map(|row| Value::Array(row.into_iter().map(scalar_to_json).collect()))
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "data": data })
}

/// A column or row vector as a flat array.
pub fn vector_to_json<S: Semifield>(v: &Vector<S>) -> Value {
    Value::Array(v.entries().iter().map(|&a| scalar_to_json(a)).collect())
}

fn object(value: &Value, what: &str) -> Result<Map<String, Value>> {
    value
        .as_object()
        .cloned()
        .ok_or_else(|| malformed(format!("{what} must be a JSON object")))
}

/// The `"semifield"` field of a document, if present.
pub fn document_semifield(value: &Value) -> Result<Option<SemifieldId>> {
    match value.get("semifield") {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => s.parse().map(Some),
        Some(other) => Err(malformed(format!("bad semifield {other}"))),
    }
}

pub fn document_kind(value: &Value) -> Result<ProblemKind> {
    let kind = value
        .get("problem")
        .ok_or_else(|| malformed("problem document needs a `problem` field"))?;
    serde_json::from_value(kind.clone())
        .map_err(|_| malformed(format!("unknown problem kind {kind}")))
}

struct Fields<'a> {
    obj: &'a Map<String, Value>,
}

impl Fields<'_> {
    fn matrix<S: Semifield>(&self, key: &str) -> Result<Option<Matrix<S>>> {
        self.obj.get(key).map(matrix_from_json).transpose()
    }

    fn vector<S: Semifield>(&self, key: &str) -> Result<Option<Vector<S>>> {
        self.obj.get(key).map(vector_from_json).transpose()
    }

    fn require<T>(&self, value: Option<T>, key: &str) -> Result<T> {
        value.ok_or_else(|| malformed(format!("missing field `{key}`")))
    }
}

/// Reads a problem document. Optional vectors and matrices default to 𝟘.
pub fn problem_from_json<S: Semifield>(value: &Value) -> Result<Problem<S>> {
    let obj = object(value, "problem document")?;
    let fields = Fields { obj: &obj };
    let kind = document_kind(value)?;
    let a: Matrix<S> = fields.require(fields.matrix("A")?, "A")?;
    let n = a.rows();
    let vector_or_zero = |key: &str| -> Result<Vector<S>> {
        Ok(fields.vector(key)?.unwrap_or_else(|| Matrix::zeros(n, 1)))
    };
    let problem = match kind {
        ProblemKind::Rayleigh => Problem::Rayleigh { a },
        ProblemKind::Extended => {
            let c = obj
                .get("c")
                .map(scalar_from_json)
                .transpose()?
                .unwrap_or(S::zero());
            let p = vector_or_zero("p")?;
            let q = fields.require(fields.vector("q")?, "q")?;
            Problem::Extended(UnconstrainedInstance { a, p, q, c })
        }
        ProblemKind::Constrained => Problem::Constrained(ConstrainedInstance {
            b: fields.matrix("B")?.unwrap_or_else(|| Matrix::zeros(n, n)),
            p: vector_or_zero("p")?,
            g: vector_or_zero("g")?,
            a,
        }),
        ProblemKind::DoublyConstrained => Problem::DoublyConstrained(DoublyConstrainedInstance {
            b: fields.matrix("B")?.unwrap_or_else(|| Matrix::zeros(n, n)),
            c: fields.require(fields.matrix("C")?, "C")?,
            g: vector_or_zero("g")?,
            h: fields.require(fields.vector("h")?, "h")?,
            a,
        }),
    };
    problem.validate()?;
    Ok(problem)
}

pub fn problem_to_json<S: Semifield>(problem: &Problem<S>) -> Value {
    let mut obj = Map::new();
    obj.insert("semifield".into(), json!(S::ID.as_str()));
    obj.insert("problem".into(), json!(problem.kind().as_str()));
    obj.insert("A".into(), matrix_to_json(problem.matrix()));
    match problem {
        Problem::Rayleigh { .. } => {}
        Problem::Extended(inst) => {
            obj.insert("p".into(), vector_to_json(&inst.p));
            obj.insert("q".into(), vector_to_json(&inst.q));
            obj.insert("c".into(), scalar_to_json(inst.c));
        }
        Problem::Constrained(inst) => {
            obj.insert("B".into(), matrix_to_json(&inst.b));
            obj.insert("p".into(), vector_to_json(&inst.p));
            obj.insert("g".into(), vector_to_json(&inst.g));
        }
        Problem::DoublyConstrained(inst) => {
            obj.insert("B".into(), matrix_to_json(&inst.b));
            obj.insert("C".into(), matrix_to_json(&inst.c));
            obj.insert("g".into(), vector_to_json(&inst.g));
            obj.insert("h".into(), vector_to_json(&inst.h));
        }
    }
    Value::Object(obj)
}

pub fn outcome_to_json<S: Semifield>(outcome: &OptimizationOutcome<S>) -> Value {
    let set = &outcome.solutions;
    json!({
        "optimum": scalar_to_json(outcome.optimum),
        "generator": matrix_to_json(set.generator()),
        "lower": vector_to_json(set.lower()),
        "upper": set.upper().map_or(Value::Null, vector_to_json),
        "canonical": vector_to_json(&set.canonical()),
    })
}

/// Reads an outcome document. The `canonical` field is derived data and is
/// not read back.
pub fn outcome_from_json<S: Semifield>(value: &Value) -> Result<OptimizationOutcome<S>> {
    let obj = object(value, "outcome document")?;
    let fields = Fields { obj: &obj };
    let optimum = scalar_from_json(
        obj.get("optimum")
            .ok_or_else(|| malformed("missing field `optimum`"))?,
    )?;
    let generator = fields.require(fields.matrix("generator")?, "generator")?;
    let lower = fields.require(fields.vector("lower")?, "lower")?;
    let upper = match obj.get("upper") {
        None | Some(Value::Null) => None,
        Some(v) => Some(vector_from_json(v)?),
    };
    Ok(OptimizationOutcome {
        optimum,
        solutions: GeneratedSet::new(generator, lower, upper)?,
    })
}

fn rational_from_json(value: &Value) -> Result<Rational> {
    match scalar_from_json::<MaxPlus>(value)? {
        MaxPlus::Finite(r) => Ok(r),
        MaxPlus::Bottom => Err(Error::InvalidProject(
            "times and lags must be finite".into(),
        )),
    }
}

fn activity_index(names: &[String], value: &Value) -> Result<usize> {
    let index = match value {
        Value::Number(n) => n.as_u64().map(|i| i as usize),
        Value::String(s) => names.iter().position(|name| name == s),
        _ => None,
    };
    index
        .filter(|&i| i < names.len())
        .ok_or_else(|| Error::InvalidProject(format!("unknown activity {value}")))
}

fn activity_key(names: &[String], key: &str) -> Result<usize> {
    names
        .iter()
        .position(|name| name == key)
        .or_else(|| key.parse::<usize>().ok().filter(|&i| i < names.len()))
        .ok_or_else(|| Error::InvalidProject(format!("unknown activity `{key}`")))
}

/// Reads a project document.
///
/// Activities are referenced by name or by 0-based index. A start-finish entry
/// `{"from": j, "to": i, "lag": a}` means `i` completes at least `a` after `j`
/// starts; repeated entries keep the largest lag.
pub fn project_from_json(value: &Value) -> Result<Project> {
    let obj = object(value, "project document")?;
    let names: Vec<String> = obj
        .get("activities")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("project needs an `activities` array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(_) => Ok(v.to_string()),
            _ => Err(malformed(format!("activity {i} must be a name"))),
        })
        .collect::<Result<_>>()?;
    let flavor: Flavor = match obj.get("flavor") {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|_| malformed(format!("unknown project flavor {v}")))?,
        None => Flavor::Window,
    };
    let mut project = Project::new(names.clone(), flavor)?;

    type AddLag = fn(&mut Project, usize, usize, Rational) -> Result<()>;
    let lag_lists: [(&str, AddLag); 2] = [
        ("start_finish", Project::add_start_finish),
        ("start_start", Project::add_start_start),
    ];
    for (key, add) in lag_lists {
        let Some(list) = obj.get(key) else { continue };
        let list = list
            .as_array()
            .ok_or_else(|| malformed(format!("`{key}` must be an array")))?;
        for entry in list {
            let field = |name: &str| {
                entry
                    .get(name)
                    .ok_or_else(|| malformed(format!("`{key}` entry needs `{name}`")))
            };
            let from = activity_index(&names, field("from")?)?;
            let to = activity_index(&names, field("to")?)?;
            add(&mut project, from, to, rational_from_json(field("lag")?)?)?;
        }
    }

    type SetTime = fn(&mut Project, usize, Rational) -> Result<()>;
    let time_maps: [(&str, SetTime); 3] = [
        ("late_start", Project::set_late_start),
        ("early_finish", Project::set_early_finish),
        ("early_start", Project::set_early_start),
    ];
    for (key, set) in time_maps {
        let Some(map) = obj.get(key) else { continue };
        let map = map
            .as_object()
            .ok_or_else(|| malformed(format!("`{key}` must be an object keyed by activity")))?;
        for (name, time) in map {
            if time.as_str() == Some(ZERO) {
                continue;
            }
            set(
                &mut project,
                activity_key(&names, name)?,
                rational_from_json(time)?,
            )?;
        }
    }
    Ok(project)
}

/// Schedule document: the earliest optimal schedule, the per-activity
/// initiation ranges of the optimal family and the underlying outcome.
pub fn schedule_to_json(project: &Project, solution: &ProjectSolution) -> Value {
    let schedule = &solution.schedule;
    let family = &solution.family;
    let names = project.activities();
    let intervals: Vec<Value> = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            json!({
                "activity": name,
                "earliest": scalar_to_json(family.lower.get(i, 0)),
                "latest": family.upper.as_ref().map_or(Value::Null, |u| scalar_to_json(u.get(i, 0))),
            })
        })
        .collect();
    let optional = |v: &Option<Vector<MaxPlus>>| v.as_ref().map_or(Value::Null, vector_to_json);
    json!({
        "flavor": project.flavor(),
        "activities": names,
        "max_flow_time": scalar_to_json(schedule.max_flow_time),
        "initiation": vector_to_json(&schedule.initiation),
        "completion": vector_to_json(&schedule.completion),
        "adjusted_start": optional(&schedule.adjusted_start),
        "adjusted_finish": optional(&schedule.adjusted_finish),
        "intervals": intervals,
        "outcome": outcome_to_json(&solution.outcome),
    })
}
