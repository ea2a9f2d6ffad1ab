//! Cutting and stacking over exact rational subintervals of `[0, 1]`.
//!
//! [`Gadget`] keeps full supports and is what ε-independence needs;
//! [`LabelGadget`] keeps only pooled label measures and scales to the column
//! counts that repeated independent cutting and stacking produces.

mod format;
mod gadget;
mod interval;
mod label;

pub use format::{parse_gadget, write_gadget};
pub use gadget::{
    block_frequency, concatenated_block_distribution, cut_copies, epsilon_independence,
    epsilon_independence_exact, fractional_ics, gadget_block_distribution,
    independent_cut_stack, m_fold_ics, merge_gadget, normalized_shannon_entropy, self_stack,
    stack, Column, Gadget,
};
pub use interval::{overlap_length, Level, RationalInterval};
pub use label::{LabelDistribution, LabelGadget};

/// Kronecker product of two probability vectors, row-major.
pub fn kronecker(a: &[crate::rational::Rational], b: &[crate::rational::Rational]) -> Vec<crate::rational::Rational> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}
