pub mod brute;
pub mod gen;
