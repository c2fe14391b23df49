pub mod error;
pub mod inequalities;
pub mod json;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod scheduler;
pub mod semifield;

pub use error::{Error, ErrorCategory, Result};
pub use inequalities::{BoxBound, GeneratedSet};
pub use linalg::{Matrix, NormalForm, Regularity, Vector};
pub use optimizer::{OptimizationOutcome, Problem, ProblemKind};
pub use oracle::{grid_minimize, verify_solution_set, GridMinimum, GridSpec, VerificationReport};
pub use scheduler::{solve_project, Flavor, Project, Schedule};
pub use semifield::{MaxPlus, MaxTimes, MinPlus, MinTimes, Semifield, SemifieldId};
