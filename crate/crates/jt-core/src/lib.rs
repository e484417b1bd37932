pub mod algebra;
pub mod analysis;
pub mod combinat;
pub mod layers;
pub mod ordinal;
pub mod terms;
