//! File formats, experiment runner and verification suite on top of
//! [`fbmre_core`].

pub mod circulant;
pub mod config;
pub mod ensemble;
pub mod experiment;
pub mod figures;
pub mod output;
pub mod verify;
