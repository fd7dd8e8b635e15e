//! Problem and solution data model: instances, pattern trees, metrics,
//! coordinate realization and independent validation.

mod instance;
mod layout;
mod solution;
mod tree;
mod validate;

pub use instance::{
    Area, BinId, BinSpec, CopyId, Dim, Instance, InstanceError, ItemId, ItemSpec,
};
pub use layout::{layout, PlacedRect};
pub use solution::{leftover_value, MetricError, Solution};
pub use tree::{CuttingPattern, Node, NodeId, NodeKind, NodeShape, Orientation, PatternId};
pub use validate::{validate, ValidationReport, Violation};
