//! Certified local central limit theorems for coefficients of rational
//! generating functions `F(z, t) = G / H`.

pub mod catalog;
pub mod gfparse;
pub mod linfam;
pub mod numfmt;
pub mod oracle;
pub mod polycore;
pub mod realroots;
pub mod smoothacsv;
