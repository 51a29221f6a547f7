//! Exact arithmetic, Stern–Brocot levels, codings and the Farey and Gauss
//! maps.

mod cf;
mod coding;
mod exact_sum;
mod maps;
mod rational;
mod tree;

pub use cf::{cf_cylinder_interval, cf_digits, tail_cylinder_measure, walk_words, CFWord, Conv};
pub use coding::{
    apply_code, code_of, code_to_cylinder, cylinder_to_farey, cylinder_to_sb, Alphabet,
    BinaryCode,
};
pub use exact_sum::ExactSum;
pub use maps::{farey_map, gauss_map};
pub use rational::{Fraction, Rational};
pub use tree::{
    farey_frontier, farey_level, sb_intervals, sb_intervals_guarded, sb_level, sb_level_guarded,
    FareyNode, Mobius, SBInterval,
};
pub(crate) use tree::visit_leaves;
