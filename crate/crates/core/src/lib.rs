//! Unitals, their confluence graphs, and mechanical checks of the clique
//! theorems for small orders.
//!
//! The crate is organized bottom-up:
//!
//! - [`algebra`]: arithmetic in GF(p^e), including conjugation on GF(q²).
//! - [`incidence`]: incidence structures and the standard constructions
//!   (PG(2,q), AG(2,q), Hermitian unitals, punctured planes), plus the
//!   O'Nan configuration search.
//! - [`confluence`]: block intersection graphs, strongly regular parameters
//!   and the Hoffman ratio bound.
//! - [`cliques`]: maximal clique enumeration and pencil / near pencil
//!   classification.
//! - [`linspace`]: linear spaces on q² points with bounded pencils and
//!   lines, and their embeddings into projective planes.
//! - [`reconstruct`]: recovering a unital from its confluence graph, and
//!   incidence-structure isomorphism.

pub mod algebra;
pub mod cliques;
pub mod confluence;
pub mod incidence;
pub mod linspace;
pub mod reconstruct;

pub use algebra::{FieldElement, FieldError, FieldOp, FieldSpec};
pub use cliques::{CliqueClassification, CliqueError, CliqueTag, StarReport};
pub use confluence::{ConfluenceError, ConfluenceGraph, Eigenvalue, SrgParams};
pub use incidence::{DesignReport, IncidenceError, IncidenceStructure, OnanConfiguration};
pub use linspace::{
    AssumptionReport, EmbeddingWitness, LinSpaceCase, LinSpaceClass, LinSpaceError, OrderTwoClass,
    Violation,
};
pub use reconstruct::{ReconstructError, Reconstruction};
