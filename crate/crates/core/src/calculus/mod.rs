//! Szlenk-index calculus for symbolic direct sums, and the numeric bounds
//! (σ, the product-step count M, the projection bound) that go with it.

mod bounds;
mod construct;
mod family;
mod profile;
mod space;

pub use bounds::{frount_m, frount_m_qpow, postdoc2_bound, sigma};
pub use construct::{szlenk_space_construct, zero_space, ConstructOptions, Construction};
pub use family::{Family, FamilyProfile, NormSeq};
pub use profile::{EpsProfile, Ladder, Step, Tail};
pub use space::{
    admissible_index_value, c_space_index, direct_sum_index, profile_sup, Admissibility, Atom,
    DirectSum, Evaluation, Rule, SpaceDoc, SpaceExpr, SumExponent, Summands, TrailEntry, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalcError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed expression: {0}")]
    MalformedExpr(String),
    #[error("norm sequence membership in c0 is not decidable: {0}")]
    NormsNotDecidable(String),
    #[error("construction exceeds the node cap of {max_nodes}")]
    DepthCapExceeded { max_nodes: usize },
    #[error("arithmetic overflow")]
    Overflow,
}
