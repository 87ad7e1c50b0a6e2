//! Exact computation of (twisted) Loday constructions over finite simplicial sets.
//!
//! The pipeline is: build a [`simplicial::TruncatedSimplicialSet`], pick a
//! [`algebra::StructureConstantAlgebra`], assemble the normalized chain complex
//! with [`loday`], and take homology with [`homology`].

pub mod field;
pub mod simplicial;
pub mod algebra;
pub mod homology;
pub mod loday;
pub mod spectral;
pub mod torusdiag;
