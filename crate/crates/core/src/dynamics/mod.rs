pub mod coefficients;
pub mod fields;
pub mod integrate;
pub mod loperator;
pub mod multiplets;
