//! The entity co-occurrence network and its analyses.

mod build;
pub mod centrality;
pub mod community;
pub mod gexf;
pub mod layout;

pub use build::{build_graph, read_edge_list, write_edge_list, CoocGraph, Edge, GraphNode};
pub use centrality::{betweenness, degree};
pub use community::{louvain, louvain_traced, modularity, LouvainTrace, Partition};
pub use gexf::{export_gexf, read_gexf, validate_gexf, GexfGraph};
pub use layout::{force_atlas, ForceAtlasConfig, Layout};
