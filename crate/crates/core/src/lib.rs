//! An RDF data model extended with existential literals ("e-literals")
//! constrained by a pluggable first-order constraint language, a
//! SPARQL-style algebra over conditional mappings, certain-answer
//! computation, and a brute-force possible-worlds oracle that provides
//! ground truth on small instances.

pub mod algebra;
pub mod backend;
pub mod constraint;
pub mod geom;
pub mod model;
pub mod oracle;
pub mod query;
pub mod term;
pub mod text;

pub use model::{e_literals_of, mk_database, ConditionalTriple, Database, ModelError};
pub use term::{ConstValue, Datatype, EName, ETriple, Lang, Term};
