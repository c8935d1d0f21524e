//! A finite-model workbench for epistemic logic with quantified public
//! announcements: EL, PAL, APAL, GAL and CAL.
//!
//! The crate is organised by concern:
//!
//! * [`kripke`] — S5 models stored as partitions, restriction, programs.
//! * [`formula`] — abstract syntax, parser and printer.
//! * [`bisim`] — bounded bisimulation, distinguishing formulas and the
//!   bisimulation-closed sets that stand in for announcements.
//! * [`mcheck`] — model checking, including the quantified operators.
//! * [`tiling`] — tiles, tilings, and the checkerboard gadgets.
//! * [`random`] — seeded generators for property testing.

pub mod bisim;
pub mod formula;
pub mod kripke;
pub mod mcheck;
pub mod random;
pub mod suite;
pub mod tiling;

/// A set of states, as dense indices into a model's state list.
pub type StateSet = fixedbitset::FixedBitSet;

pub use bisim::{Level, Partition};
pub use formula::{Formula, FormulaError};
pub use kripke::{AgentId, Model, ModelError, PointedModel, Program, PropId, Step};
pub use mcheck::{CheckContext, CheckError, CheckOptions, CheckReport};
pub use tiling::{Colour, Tile, TileGrid, TileSet, TilingError};
