//! C interface to `entnet`.
//!
//! Every fallible function returns an [`EntnetStatus`]; on failure a message
//! is available from [`entnet_last_error`] on the same thread. Objects are
//! opaque handles released with their `_free` function, and strings handed
//! out by the library are released with [`entnet_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use entnet::config::PipelineConfig;
use entnet::graph::{betweenness, export_gexf, louvain, modularity, read_gexf, CoocGraph, Layout, Partition};
use entnet::normalize::{normalize, write_cluster_dump, Mode, NormalizationPolicy};
use entnet::pipeline::{run, Stage};
use entnet::temporal::{diff_terms, read_sankey_json, StreamModel};
use entnet::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntnetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    BufferTooSmall = 5,
    MissingPrerequisite = 6,
    Config = 7,
    Io = 8,
    Panic = 9,
}

/// A co-occurrence graph loaded from GEXF, with its stored communities,
/// betweenness scores and positions.
pub struct EntnetGraph {
    graph: CoocGraph,
    partition: Partition,
    betweenness: Vec<f64>,
    positions: Vec<(f64, f64)>,
}

/// A temporal stream model loaded from Sankey JSON.
pub struct EntnetStreams {
    model: StreamModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EntnetStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::MissingPrerequisite { .. } => EntnetStatus::MissingPrerequisite,
            Error::Config(_) => EntnetStatus::Config,
            Error::Io { .. } => EntnetStatus::Io,
            Error::InvalidArgument(_) | Error::UnknownNode(_) => EntnetStatus::InvalidArgument,
            _ => EntnetStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EntnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            EntnetStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(Some(message));
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(Some(format!("internal error: {message}")));
            EntnetStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(EntnetStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EntnetStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn buffer<'a, T>(p: *mut T, len: usize, needed: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < needed {
        return Err(Failure(
            EntnetStatus::BufferTooSmall,
            format!("{what} holds {len} values, {needed} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(EntnetStatus::Parse, "output contains a NUL byte".into()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entnet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn entnet_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a GEXF document produced by the `graph` stage.
///
/// # Safety
/// `gexf` must be a NUL-terminated string and `out_graph` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_from_gexf(gexf: *const c_char, out_graph: *mut *mut EntnetGraph) -> EntnetStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        *slot = ptr::null_mut();
        let (graph, partition, betweenness, positions) = read_gexf(text(gexf, "gexf")?)?.into_parts()?;
        *slot = Box::into_raw(Box::new(EntnetGraph { graph, partition, betweenness, positions }));
        Ok(())
    })
}

/// # Safety
/// `graph` must be NULL or a handle from [`entnet_graph_from_gexf`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_free(graph: *mut EntnetGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle; `nodes` and `edges` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_size(graph: *const EntnetGraph, nodes: *mut usize, edges: *mut usize) -> EntnetStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        *out(nodes, "nodes")? = g.graph.node_count();
        *out(edges, "edges")? = g.graph.edges.len();
        Ok(())
    })
}

/// Recomputes normalized betweenness into `out_scores[0..node_count]`.
///
/// # Safety
/// `graph` must be a live handle and `out_scores` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_betweenness(graph: *const EntnetGraph, out_scores: *mut f64, len: usize) -> EntnetStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let scores = betweenness(&g.graph);
        buffer(out_scores, len, scores.len(), "out_scores")?.copy_from_slice(&scores);
        Ok(())
    })
}

/// Runs Louvain with `seed`, writing one community id per node and the
/// partition's modularity.
///
/// # Safety
/// `graph` must be a live handle, `out_communities` point to `len` values
/// and `out_modularity` be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_louvain(
    graph: *const EntnetGraph,
    seed: u64,
    out_communities: *mut usize,
    len: usize,
    out_modularity: *mut f64,
) -> EntnetStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let p = louvain(&g.graph, seed);
        buffer(out_communities, len, p.assignment.len(), "out_communities")?.copy_from_slice(&p.assignment);
        if let Some(q) = out_modularity.as_mut() {
            *q = modularity(&g.graph, &p)?;
        }
        Ok(())
    })
}

/// Modularity of an arbitrary assignment of the `len` nodes.
///
/// # Safety
/// `graph` must be a live handle, `communities` point to `len` values and
/// `out_modularity` be valid.
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_modularity(
    graph: *const EntnetGraph,
    communities: *const usize,
    len: usize,
    out_modularity: *mut f64,
) -> EntnetStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        if communities.is_null() {
            return Err(null("communities"));
        }
        let assignment = std::slice::from_raw_parts(communities, len).to_vec();
        *out(out_modularity, "out_modularity")? = modularity(&g.graph, &Partition { assignment })?;
        Ok(())
    })
}

/// Writes the graph back out as GEXF with its stored attributes.
///
/// # Safety
/// `graph` must be a live handle and `out_gexf` valid; free the result with
/// [`entnet_string_free`].
#[no_mangle]
pub unsafe extern "C" fn entnet_graph_to_gexf(graph: *const EntnetGraph, out_gexf: *mut *mut c_char) -> EntnetStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let slot = out(out_gexf, "out_gexf")?;
        *slot = ptr::null_mut();
        let layout = Layout { positions: g.positions.clone(), seed: 0, iterations: 0 };
        *slot = into_c_string(export_gexf(&g.graph, &g.partition, &g.betweenness, &layout)?)?;
        Ok(())
    })
}

/// Parses a Sankey JSON document produced by the `temporal` stage.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_streams` valid.
#[no_mangle]
pub unsafe extern "C" fn entnet_streams_from_json(json: *const c_char, out_streams: *mut *mut EntnetStreams) -> EntnetStatus {
    guard(|| {
        let slot = out(out_streams, "out_streams")?;
        *slot = ptr::null_mut();
        let model = read_sankey_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(EntnetStreams { model }));
        Ok(())
    })
}

/// # Safety
/// `streams` must be NULL or a handle from [`entnet_streams_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entnet_streams_free(streams: *mut EntnetStreams) {
    if !streams.is_null() {
        drop(Box::from_raw(streams));
    }
}

/// # Safety
/// `streams` must be a live handle; the out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn entnet_streams_size(
    streams: *const EntnetStreams,
    periods: *mut usize,
    nodes: *mut usize,
    tubes: *mut usize,
) -> EntnetStatus {
    guard(|| {
        let s = streams.as_ref().ok_or_else(|| null("streams"))?;
        *out(periods, "periods")? = s.model.periods.len();
        *out(nodes, "nodes")? = s.model.nodes.len();
        *out(tubes, "tubes")? = s.model.tubes.len();
        Ok(())
    })
}

/// Compares the term sets of two stream nodes, given by id (`p<period>:<entity>`).
/// The result is a JSON object with `common`, `only_a` and `only_b` arrays.
///
/// # Safety
/// `streams` must be a live handle, `a` and `b` NUL-terminated strings and
/// `out_json` valid; free the result with [`entnet_string_free`].
#[no_mangle]
pub unsafe extern "C" fn entnet_streams_diff(
    streams: *const EntnetStreams,
    a: *const c_char,
    b: *const c_char,
    out_json: *mut *mut c_char,
) -> EntnetStatus {
    guard(|| {
        let s = streams.as_ref().ok_or_else(|| null("streams"))?;
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let d = diff_terms(&s.model, text(a, "a")?, text(b, "b")?)?;
        let json = serde_json::json!({ "common": d.common, "only_a": d.only_a, "only_b": d.only_b });
        *slot = into_c_string(json.to_string())?;
        Ok(())
    })
}

/// Clusters the entity mentions of an annotation TSV and returns the cluster
/// dump. `mode` is `"P_MAX"` or `"P_AV"`.
///
/// # Safety
/// `annotations` and `mode` must be NUL-terminated strings and `out_dump`
/// valid; free the result with [`entnet_string_free`].
#[no_mangle]
pub unsafe extern "C" fn entnet_normalize_tsv(
    annotations: *const c_char,
    mode: *const c_char,
    out_dump: *mut *mut c_char,
) -> EntnetStatus {
    guard(|| {
        let slot = out(out_dump, "out_dump")?;
        *slot = ptr::null_mut();
        let mentions = entnet::annotation::parse_annotations(text(annotations, "annotations")?)?;
        let mode: Mode = text(mode, "mode")?.parse()?;
        let clusters = normalize(&mentions, &NormalizationPolicy::new(mode))?;
        *slot = into_c_string(write_cluster_dump(&clusters))?;
        Ok(())
    })
}

/// Runs a pipeline stage (`ingest`, `annotate`, `normalize`, `graph`,
/// `temporal` or `all`) from a TOML config file. A NULL `out_dir` keeps the
/// config's output directory.
///
/// # Safety
/// `config_path` and `stage` must be NUL-terminated strings; `out_dir` NULL
/// or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn entnet_run(config_path: *const c_char, stage: *const c_char, out_dir: *const c_char) -> EntnetStatus {
    guard(|| {
        let mut cfg = PipelineConfig::load(Path::new(text(config_path, "config_path")?))?;
        if !out_dir.is_null() {
            cfg.out = text(out_dir, "out_dir")?.into();
        }
        let stage: Stage = text(stage, "stage")?.parse()?;
        run(&cfg, stage)?;
        Ok(())
    })
}
