//! Terms, entity–term–year triples and the Sankey stream model.

pub mod sankey;
pub mod streams;
pub mod terms;

pub use sankey::{export_sankey_json, read_sankey_json};
pub use streams::{build_streams, collect_triples, diff_terms, Period, StreamConfig, StreamModel, StreamNode, TermDiff, Triple, Tube};
pub use terms::{extract_terms, TermExtractor, TermRecord};
