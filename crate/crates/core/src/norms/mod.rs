//! Function-space norms on a [`GridFunction`](crate::grid::GridFunction).

pub mod block;
pub mod bmo;
pub mod family;
pub mod herz;
pub mod params;

pub use block::{block_norm_bracket, block_upper, default_test_family, extremals, pairing, NormBracket};
pub use bmo::{bmo_mk_norm, bmo_norm, mean_oscillation, rect_mean};
pub use family::RectangleFamily;
pub use herz::{
    char_rect_norm_closed_form, herz_norm, lp_norm, morrey_herz_norm, morrey_herz_norm_with, truncated_herz_norm,
    ClassProfile, HerzProfile, Space, Truncation,
};
pub use params::{ExponentParams, Predicate};
