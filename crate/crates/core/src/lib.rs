//! Product Herz and Morrey-Herz norms, strong maximal and bi-parameter singular
//! operators, strong Muckenhoupt weights, and empirical inequality sweeps, all on a
//! piecewise-constant dyadic product grid.

pub mod error;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{
    annulus_restrict, build_function, integrate_over_rectangle, make_grid, AnnulusIndex, DyadicRectangle,
    FunctionSource, FunctionSpec, GridFunction, GridRectangle, GridSpec,
};
