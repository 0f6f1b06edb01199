//! Entity co-occurrence networks and temporal entity–term streams.
//!
//! The pipeline runs in stages:
//!
//! 1. [`ingest`]: HTML pages or plain text become a whitespace-normalized
//!    [`ingest::Document`] split into sentences.
//! 2. [`annotation`]: named-entity mentions are loaded from a standoff TSV file
//!    (or produced by a small gazetteer tagger), and years are pulled out of
//!    date mentions.
//! 3. [`normalize`]: organization and person surface forms are clustered by
//!    initials, containment and last-name rules until a fixpoint.
//! 4. [`graph`]: clusters co-occurring in a sentence are linked; the network
//!    gets Louvain communities, betweenness centrality and a ForceAtlas
//!    layout, and is exported as GEXF 1.2.
//! 5. [`temporal`]: relevant terms are extracted and tied to entities and
//!    years, then grouped into periods to form a Sankey stream model.
//!
//! [`pipeline`] wires the stages to files on disk; the `entnet` binary exposes
//! them as subcommands.

pub mod annotation;
pub mod config;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod normalize;
pub mod pipeline;
pub mod temporal;
mod text;

pub use error::{Error, Result};
