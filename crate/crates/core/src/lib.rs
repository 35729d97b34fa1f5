pub mod coalgebra;
pub mod json;
pub mod length;
pub mod markov;
pub mod newick;
pub mod numeric;
pub mod operad;
pub mod perm;
pub mod random;
pub mod space;
pub mod tree;
