//! Building-function classification: a typed-edge building graph, a
//! relational graph convolutional classifier for level-2 types, and the
//! level-1 / level-3 hierarchy rules.

pub mod checkpoint;
pub mod graph;
pub mod hierarchy;
pub mod matrix;
pub mod model;
pub mod predict;
pub mod synth;
pub mod train;

pub use checkpoint::Checkpoint;
pub use graph::{build_relgraph, build_relgraph_with, RelGraph, Relation};
pub use hierarchy::{derive_level1, refine_level3, Mapping};
pub use model::Rgcn;
pub use predict::{merge_predictions, predict_level2, Prediction};
pub use train::{train, TrainError, TrainParams, TrainReport};
