//! NSGA-II with an innovation-protecting age objective.
//!
//! Two objectives per individual: `age` (minimized) and accumulated reward
//! (maximized). Under the protection policies, mutating a protected component
//! resets the child's age to zero, so a freshly perturbed encoder or memory
//! does not immediately compete on equal footing with well-adapted lineages.

mod pareto;
mod population;
mod protection;
mod selection;
mod step;

pub use pareto::{
    crowding_distance, dominates_point, nondominated_sort, ObjectivePoint, ObjectiveSet,
};
pub use population::{dominates, Individual, Population};
pub use protection::{apply_protection, ProtectionKind, ProtectionPolicy};
pub use selection::{crowded_order, eligible_pool, select_parents};
pub use step::{
    evaluate_genomes, generation_step, initialize_population, EvalContext, EvalFailure,
    EvalPurpose, Evaluator, StepReport,
};
