//! GF(2) primitives: packed bit vectors, polynomial division and the polar
//! transform `G_N`.

mod bitvec;
mod poly;
mod transform;

pub use bitvec::BitVec;
pub use poly::{poly_divmod, poly_mul, Gf2Poly};
pub use transform::{
    combine_rows, polar_transform, polar_transform_u64, row, row_weight, support_excess,
};

pub(crate) use transform::check_length;
