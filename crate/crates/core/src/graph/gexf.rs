//! GEXF 1.2 export, import and schema checking.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use super::{degree, CoocGraph, GraphNode, Layout, Partition};
use crate::annotation::EntityType;
use crate::error::{Error, Result};

pub const GEXF_NS: &str = "http://www.gexf.net/1.2draft";
pub const VIZ_NS: &str = "http://www.gexf.net/1.2draft/viz";
const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";

pub const MIN_NODE_SIZE: f64 = 4.0;
pub const MAX_NODE_SIZE: f64 = 40.0;

/// Community colors, cycled by community id.
pub const PALETTE: [(u8, u8, u8); 12] = [
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
    (188, 189, 34),
    (23, 190, 207),
    (174, 199, 232),
    (255, 187, 120),
];

const NODE_ATTRIBUTES: [(&str, &str); 5] = [
    ("community", "integer"),
    ("betweenness", "double"),
    ("degree", "integer"),
    ("entity_type", "string"),
    ("occurrences", "integer"),
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // Characters XML 1.0 cannot carry.
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

/// Affine map of betweenness onto `[MIN_NODE_SIZE, MAX_NODE_SIZE]`.
pub fn node_sizes(bc: &[f64]) -> Vec<f64> {
    let lo = bc.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = bc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    bc.iter()
        .map(|&b| {
            if hi > lo {
                MIN_NODE_SIZE + (MAX_NODE_SIZE - MIN_NODE_SIZE) * (b - lo) / (hi - lo)
            } else {
                MIN_NODE_SIZE
            }
        })
        .collect()
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

/// Serializes the graph with community, betweenness, degree, type and
/// occurrence attributes plus viz position, size and color.
pub fn export_gexf(g: &CoocGraph, p: &Partition, bc: &[f64], layout: &Layout) -> Result<String> {
    let n = g.node_count();
    if p.assignment.len() != n || bc.len() != n || layout.positions.len() != n {
        return Err(Error::InvalidArgument(format!(
            "graph has {n} nodes but partition/centrality/layout cover {}/{}/{}",
            p.assignment.len(),
            bc.len(),
            layout.positions.len()
        )));
    }
    let sizes = node_sizes(bc);
    let degrees = degree(g);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<gexf xmlns=\"{GEXF_NS}\" xmlns:viz=\"{VIZ_NS}\" xmlns:xsi=\"{XSI_NS}\" xsi:schemaLocation=\"{GEXF_NS} http://www.gexf.net/1.2draft/gexf.xsd\" version=\"1.2\">"
    );
    let _ = writeln!(out, "  <meta>");
    let _ = writeln!(out, "    <creator>entnet {}</creator>", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "    <description>entity co-occurrence network</description>");
    let _ = writeln!(out, "  </meta>");
    let _ = writeln!(out, "  <graph mode=\"static\" defaultedgetype=\"undirected\">");
    let _ = writeln!(out, "    <attributes class=\"node\">");
    for (i, (title, ty)) in NODE_ATTRIBUTES.iter().enumerate() {
        let _ = writeln!(out, "      <attribute id=\"{i}\" title=\"{title}\" type=\"{ty}\"/>");
    }
    let _ = writeln!(out, "    </attributes>");
    let _ = writeln!(out, "    <nodes>");
    for node in &g.nodes {
        let i = node.id;
        let community = p.assignment[i];
        let (r, gr, b) = PALETTE[community % PALETTE.len()];
        let (x, y) = layout.positions[i];
        let _ = writeln!(out, "      <node id=\"{i}\" label=\"{}\">", escape(&node.label));
        let _ = writeln!(out, "        <attvalues>");
        let values = [
            community.to_string(),
            finite(bc[i]).to_string(),
            degrees[i].to_string(),
            node.etype.to_string(),
            node.occurrences.to_string(),
        ];
        for (k, v) in values.iter().enumerate() {
            let _ = writeln!(out, "          <attvalue for=\"{k}\" value=\"{v}\"/>");
        }
        let _ = writeln!(out, "        </attvalues>");
        let _ = writeln!(out, "        <viz:color r=\"{r}\" g=\"{gr}\" b=\"{b}\"/>");
        let _ = writeln!(
            out,
            "        <viz:position x=\"{}\" y=\"{}\" z=\"0\"/>",
            finite(x),
            finite(y)
        );
        let _ = writeln!(out, "        <viz:size value=\"{}\"/>", sizes[i]);
        let _ = writeln!(out, "      </node>");
    }
    let _ = writeln!(out, "    </nodes>");
    let _ = writeln!(out, "    <edges>");
    for (k, e) in g.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{k}\" source=\"{}\" target=\"{}\" weight=\"{}\"/>",
            e.source, e.target, e.weight
        );
    }
    let _ = writeln!(out, "    </edges>");
    let _ = writeln!(out, "  </graph>");
    out.push_str("</gexf>\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GexfNode {
    pub id: String,
    pub label: String,
    /// Attribute values keyed by attribute title.
    pub attributes: BTreeMap<String, String>,
    pub position: Option<(f64, f64)>,
    pub size: Option<f64>,
    pub color: Option<(u8, u8, u8)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GexfEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

/// A GEXF document as read back from text.
#[derive(Debug, Clone, PartialEq)]
pub struct GexfGraph {
    pub default_edge_type: String,
    pub nodes: Vec<GexfNode>,
    pub edges: Vec<GexfEdge>,
}

fn xml_error(e: roxmltree::Error) -> Error {
    Error::Gexf(format!("{e}"))
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, ns: &str, name: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name && c.tag_name().namespace() == Some(ns))
}

fn attr_f64(node: roxmltree::Node, name: &str) -> Result<f64> {
    let raw = node
        .attribute(name)
        .ok_or_else(|| Error::Gexf(format!("<{}> lacks `{name}`", node.tag_name().name())))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Gexf(format!("<{}> {name}=`{raw}` is not a number", node.tag_name().name())))
}

pub fn read_gexf(text: &str) -> Result<GexfGraph> {
    let doc = roxmltree::Document::parse(text).map_err(xml_error)?;
    let root = doc.root_element();
    if root.tag_name().name() != "gexf" {
        return Err(Error::Gexf("root element is not <gexf>".into()));
    }
    let graph = child(root, GEXF_NS, "graph").ok_or_else(|| Error::Gexf("missing <graph>".into()))?;
    let default_edge_type = graph.attribute("defaultedgetype").unwrap_or("directed").to_string();

    let mut titles: HashMap<String, String> = HashMap::new();
    for attrs in graph
        .children()
        .filter(|c| c.has_tag_name((GEXF_NS, "attributes")) && c.attribute("class") == Some("node"))
    {
        for a in attrs.children().filter(|c| c.has_tag_name((GEXF_NS, "attribute"))) {
            if let (Some(id), Some(title)) = (a.attribute("id"), a.attribute("title")) {
                titles.insert(id.to_string(), title.to_string());
            }
        }
    }

    let mut nodes = Vec::new();
    if let Some(list) = child(graph, GEXF_NS, "nodes") {
        for n in list.children().filter(|c| c.has_tag_name((GEXF_NS, "node"))) {
            let id = n
                .attribute("id")
                .ok_or_else(|| Error::Gexf("<node> without id".into()))?
                .to_string();
            let mut attributes = BTreeMap::new();
            if let Some(values) = child(n, GEXF_NS, "attvalues") {
                for v in values.children().filter(|c| c.has_tag_name((GEXF_NS, "attvalue"))) {
                    let key = v.attribute("for").unwrap_or_default();
                    let title = titles.get(key).cloned().unwrap_or_else(|| key.to_string());
                    attributes.insert(title, v.attribute("value").unwrap_or_default().to_string());
                }
            }
            let position = match child(n, VIZ_NS, "position") {
                Some(p) => Some((attr_f64(p, "x")?, attr_f64(p, "y")?)),
                None => None,
            };
            let size = child(n, VIZ_NS, "size").map(|s| attr_f64(s, "value")).transpose()?;
            let color = match child(n, VIZ_NS, "color") {
                Some(c) => {
                    let channel = |name| -> Result<u8> {
                        c.attribute(name)
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| Error::Gexf(format!("node {id}: bad color channel `{name}`")))
                    };
                    Some((channel("r")?, channel("g")?, channel("b")?))
                }
                None => None,
            };
            nodes.push(GexfNode {
                label: n.attribute("label").unwrap_or(&id).to_string(),
                id,
                attributes,
                position,
                size,
                color,
            });
        }
    }

    let mut edges = Vec::new();
    if let Some(list) = child(graph, GEXF_NS, "edges") {
        for e in list.children().filter(|c| c.has_tag_name((GEXF_NS, "edge"))) {
            let endpoint = |name| {
                e.attribute(name)
                    .map(str::to_string)
                    .ok_or_else(|| Error::Gexf(format!("<edge> without {name}")))
            };
            let weight = if e.attribute("weight").is_some() {
                attr_f64(e, "weight")?
            } else {
                1.0
            };
            edges.push(GexfEdge {
                source: endpoint("source")?,
                target: endpoint("target")?,
                weight,
            });
        }
    }
    Ok(GexfGraph {
        default_edge_type,
        nodes,
        edges,
    })
}

impl GexfGraph {
    /// Rebuilds the analysis structures from a document written by
    /// [`export_gexf`].
    pub fn into_parts(self) -> Result<(CoocGraph, Partition, Vec<f64>, Vec<(f64, f64)>)> {
        let index: HashMap<&str, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut assignment = Vec::new();
        let mut bc = Vec::new();
        let mut positions = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let attr = |title: &str| {
                n.attributes
                    .get(title)
                    .ok_or_else(|| Error::Gexf(format!("node {}: missing attribute `{title}`", n.id)))
            };
            let parse_err = |title: &str| Error::Gexf(format!("node {}: bad `{title}` value", n.id));
            let etype: EntityType = attr("entity_type")?.parse().map_err(|_| parse_err("entity_type"))?;
            nodes.push(GraphNode {
                id: i,
                label: n.label.clone(),
                etype,
                occurrences: attr("occurrences")?.parse().map_err(|_| parse_err("occurrences"))?,
            });
            assignment.push(attr("community")?.parse().map_err(|_| parse_err("community"))?);
            bc.push(attr("betweenness")?.parse().map_err(|_| parse_err("betweenness"))?);
            positions.push(n.position.unwrap_or((0.0, 0.0)));
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let lookup = |id: &str| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::Gexf(format!("edge references unknown node `{id}`")))
            };
            if e.weight.fract() != 0.0 || e.weight < 1.0 {
                return Err(Error::Gexf(format!("edge weight {} is not a positive integer", e.weight)));
            }
            edges.push((lookup(&e.source)?, lookup(&e.target)?, e.weight as u64));
        }
        let graph = CoocGraph::from_edges(nodes, edges)?;
        Ok((graph, Partition { assignment }, bc, positions))
    }
}

/// Checks a document against the GEXF 1.2 schema: element nesting, required
/// attributes, enumerations, numeric types, id uniqueness and edge
/// references. Returns every violation found.
pub fn validate_gexf(text: &str) -> std::result::Result<(), Vec<String>> {
    let doc = roxmltree::Document::parse(text).map_err(|e| vec![format!("not well-formed XML: {e}")])?;
    let mut v = Validator::default();
    v.root(doc.root_element());
    if v.errors.is_empty() {
        Ok(())
    } else {
        Err(v.errors)
    }
}

#[derive(Default)]
struct Validator {
    errors: Vec<String>,
    /// Attribute id → declared type, per class.
    attribute_types: HashMap<(String, String), String>,
    node_ids: HashSet<String>,
}

const ATTR_TYPES: &[&str] = &["integer", "long", "double", "float", "boolean", "liststring", "string", "anyURI"];

type XmlNode<'a, 'i> = roxmltree::Node<'a, 'i>;

impl Validator {
    fn err(&mut self, node: XmlNode, msg: impl std::fmt::Display) {
        let pos = node.document().text_pos_at(node.range().start);
        self.errors.push(format!("{}:{}: <{}> {msg}", pos.row, pos.col, node.tag_name().name()));
    }

    fn elements<'a, 'i>(node: XmlNode<'a, 'i>) -> impl Iterator<Item = XmlNode<'a, 'i>> {
        node.children().filter(|c| c.is_element())
    }

    fn require<'a>(&mut self, node: XmlNode<'a, '_>, name: &str) -> Option<&'a str> {
        let value = node.attribute(name);
        if value.is_none() {
            self.err(node, format!("missing required attribute `{name}`"));
        }
        value
    }

    fn check_enum(&mut self, node: XmlNode, name: &str, allowed: &[&str]) {
        if let Some(v) = node.attribute(name) {
            if !allowed.contains(&v) {
                self.err(node, format!("`{name}`=`{v}` not one of {allowed:?}"));
            }
        }
    }

    fn check_float(&mut self, node: XmlNode, name: &str, required: bool) -> Option<f64> {
        match node.attribute(name) {
            Some(v) => match v.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => Some(x),
                _ => {
                    self.err(node, format!("`{name}`=`{v}` is not a float"));
                    None
                }
            },
            None => {
                if required {
                    self.err(node, format!("missing required attribute `{name}`"));
                }
                None
            }
        }
    }

    fn only_attributes(&mut self, node: XmlNode, allowed: &[&str]) {
        for a in node.attributes() {
            if a.namespace().is_some() && a.namespace() != Some(GEXF_NS) {
                continue;
            }
            if !allowed.contains(&a.name()) {
                self.err(node, format!("unexpected attribute `{}`", a.name()));
            }
        }
    }

    fn root(&mut self, root: XmlNode) {
        if !root.has_tag_name((GEXF_NS, "gexf")) {
            self.err(root, format!("root must be <gexf> in namespace {GEXF_NS}"));
            return;
        }
        match root.attribute("version") {
            Some("1.2") => {}
            Some(other) => self.err(root, format!("version `{other}` is not 1.2")),
            None => self.err(root, "missing required attribute `version`"),
        }
        self.only_attributes(root, &["version", "variant"]);
        let mut graphs = 0;
        let mut seen_graph = false;
        for (i, c) in Self::elements(root).enumerate() {
            match (c.tag_name().namespace(), c.tag_name().name()) {
                (Some(GEXF_NS), "meta") if i == 0 => self.meta(c),
                (Some(GEXF_NS), "graph") if !seen_graph => {
                    graphs += 1;
                    seen_graph = true;
                    self.graph(c);
                }
                _ => self.err(c, "not allowed here"),
            }
        }
        if graphs != 1 {
            self.err(root, "must contain exactly one <graph>");
        }
    }

    fn meta(&mut self, meta: XmlNode) {
        self.only_attributes(meta, &["lastmodifieddate"]);
        for c in Self::elements(meta) {
            match (c.tag_name().namespace(), c.tag_name().name()) {
                (Some(GEXF_NS), "creator" | "keywords" | "description") => {
                    if Self::elements(c).next().is_some() {
                        self.err(c, "must contain text only");
                    }
                }
                _ => self.err(c, "not allowed in <meta>"),
            }
        }
    }

    fn graph(&mut self, graph: XmlNode) {
        self.only_attributes(graph, &["timeformat", "start", "startopen", "end", "endopen", "defaultedgetype", "idtype", "mode"]);
        self.check_enum(graph, "defaultedgetype", &["directed", "undirected", "mutual"]);
        self.check_enum(graph, "idtype", &["integer", "string"]);
        self.check_enum(graph, "mode", &["static", "dynamic"]);
        // attributes* then at most one nodes and one edges, in that order.
        let mut stage = 0;
        let mut edges_el = None;
        for c in Self::elements(graph) {
            match (c.tag_name().namespace(), c.tag_name().name()) {
                (Some(GEXF_NS), "attributes") if stage == 0 => self.attributes(c),
                (Some(GEXF_NS), "nodes") if stage < 1 => {
                    stage = 1;
                    self.nodes(c);
                }
                (Some(GEXF_NS), "edges") if stage < 2 => {
                    stage = 2;
                    edges_el = Some(c);
                }
                _ => self.err(c, "not allowed here in <graph>"),
            }
        }
        if let Some(e) = edges_el {
            self.edges(e);
        }
    }

    fn attributes(&mut self, attrs: XmlNode) {
        self.only_attributes(attrs, &["class", "mode", "start", "end", "startopen", "endopen"]);
        let class = self.require(attrs, "class").unwrap_or_default().to_string();
        self.check_enum(attrs, "class", &["node", "edge"]);
        self.check_enum(attrs, "mode", &["static", "dynamic"]);
        for a in Self::elements(attrs) {
            if !a.has_tag_name((GEXF_NS, "attribute")) {
                self.err(a, "not allowed in <attributes>");
                continue;
            }
            self.only_attributes(a, &["id", "title", "type"]);
            let id = self.require(a, "id").map(str::to_string);
            self.require(a, "title");
            let ty = self.require(a, "type").map(str::to_string);
            self.check_enum(a, "type", ATTR_TYPES);
            for c in Self::elements(a) {
                if !(c.has_tag_name((GEXF_NS, "default")) || c.has_tag_name((GEXF_NS, "options"))) {
                    self.err(c, "not allowed in <attribute>");
                }
            }
            if let (Some(id), Some(ty)) = (id, ty) {
                if self.attribute_types.insert((class.clone(), id.clone()), ty).is_some() {
                    self.err(a, format!("duplicate attribute id `{id}`"));
                }
            }
        }
    }

    fn attvalues(&mut self, values: XmlNode, class: &str) {
        for v in Self::elements(values) {
            if !v.has_tag_name((GEXF_NS, "attvalue")) {
                self.err(v, "not allowed in <attvalues>");
                continue;
            }
            self.only_attributes(v, &["for", "value", "start", "end", "startopen", "endopen"]);
            let key = self.require(v, "for").map(str::to_string);
            let value = self.require(v, "value").map(str::to_string);
            let (Some(key), Some(value)) = (key, value) else {
                continue;
            };
            let Some(ty) = self.attribute_types.get(&(class.to_string(), key.clone())).cloned() else {
                self.err(v, format!("refers to undeclared attribute `{key}`"));
                continue;
            };
            let ok = match ty.as_str() {
                "integer" => value.parse::<i32>().is_ok(),
                "long" => value.parse::<i64>().is_ok(),
                "double" | "float" => value.parse::<f64>().is_ok(),
                "boolean" => matches!(value.as_str(), "true" | "false" | "1" | "0"),
                _ => true,
            };
            if !ok {
                self.err(v, format!("value `{value}` is not a valid {ty}"));
            }
        }
    }

    fn viz_color(&mut self, c: XmlNode) {
        self.only_attributes(c, &["r", "g", "b", "a"]);
        for ch in ["r", "g", "b"] {
            match c.attribute(ch).map(|v| v.parse::<u8>()) {
                Some(Ok(_)) => {}
                Some(Err(_)) => self.err(c, format!("`{ch}` must be an integer in 0..=255")),
                None => self.err(c, format!("missing required attribute `{ch}`")),
            }
        }
        if let Some(a) = self.check_float(c, "a", false) {
            if !(0.0..=1.0).contains(&a) {
                self.err(c, "`a` must lie in [0, 1]");
            }
        }
    }

    fn nodes(&mut self, nodes: XmlNode) {
        self.only_attributes(nodes, &["count"]);
        for n in Self::elements(nodes) {
            if !n.has_tag_name((GEXF_NS, "node")) {
                self.err(n, "not allowed in <nodes>");
                continue;
            }
            self.only_attributes(n, &["id", "label", "pid", "start", "end", "startopen", "endopen"]);
            if let Some(id) = self.require(n, "id") {
                if !self.node_ids.insert(id.to_string()) {
                    self.err(n, format!("duplicate node id `{id}`"));
                }
            }
            for c in Self::elements(n) {
                match (c.tag_name().namespace(), c.tag_name().name()) {
                    (Some(GEXF_NS), "attvalues") => self.attvalues(c, "node"),
                    (Some(GEXF_NS), "spells" | "parents") => {}
                    (Some(GEXF_NS), "nodes") => self.nodes(c),
                    (Some(VIZ_NS), "color") => self.viz_color(c),
                    (Some(VIZ_NS), "position") => {
                        self.only_attributes(c, &["x", "y", "z"]);
                        self.check_float(c, "x", true);
                        self.check_float(c, "y", true);
                        self.check_float(c, "z", false);
                    }
                    (Some(VIZ_NS), "size") => {
                        self.only_attributes(c, &["value"]);
                        if let Some(s) = self.check_float(c, "value", true) {
                            if s < 0.0 {
                                self.err(c, "size must be non-negative");
                            }
                        }
                    }
                    (Some(VIZ_NS), "shape") => {
                        self.check_enum(c, "value", &["disc", "square", "triangle", "diamond", "image"]);
                    }
                    _ => self.err(c, "not allowed in <node>"),
                }
            }
        }
    }

    fn edges(&mut self, edges: XmlNode) {
        self.only_attributes(edges, &["count"]);
        let mut ids = HashSet::new();
        for e in Self::elements(edges) {
            if !e.has_tag_name((GEXF_NS, "edge")) {
                self.err(e, "not allowed in <edges>");
                continue;
            }
            self.only_attributes(e, &["id", "source", "target", "label", "type", "weight", "start", "end", "startopen", "endopen"]);
            if let Some(id) = e.attribute("id") {
                if !ids.insert(id.to_string()) {
                    self.err(e, format!("duplicate edge id `{id}`"));
                }
            }
            for end in ["source", "target"] {
                if let Some(id) = self.require(e, end) {
                    if !self.node_ids.contains(id) {
                        self.err(e, format!("{end} `{id}` is not a node"));
                    }
                }
            }
            self.check_enum(e, "type", &["directed", "undirected", "mutual"]);
            self.check_float(e, "weight", false);
            for c in Self::elements(e) {
                match (c.tag_name().namespace(), c.tag_name().name()) {
                    (Some(GEXF_NS), "attvalues") => self.attvalues(c, "edge"),
                    (Some(GEXF_NS), "spells") => {}
                    (Some(VIZ_NS), "color") => self.viz_color(c),
                    (Some(VIZ_NS), "thickness") => {
                        self.check_float(c, "value", true);
                    }
                    (Some(VIZ_NS), "shape") => {
                        self.check_enum(c, "value", &["solid", "dotted", "dashed", "double"]);
                    }
                    _ => self.err(c, "not allowed in <edge>"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{betweenness, force_atlas, louvain};

    fn exported(g: &CoocGraph) -> String {
        let p = louvain(g, 1);
        let bc = betweenness(g);
        let layout = force_atlas(g, 1, 20);
        export_gexf(g, &p, &bc, &layout).unwrap()
    }

    #[test]
    fn single_node() {
        let g = CoocGraph::unlabeled(1, []).unwrap();
        let text = exported(&g);
        validate_gexf(&text).unwrap();
        let back = read_gexf(&text).unwrap();
        assert_eq!(back.nodes.len(), 1);
        assert!(back.edges.is_empty());
        assert_eq!(back.default_edge_type, "undirected");
        assert_eq!(back.nodes[0].size, Some(MIN_NODE_SIZE));
    }

    #[test]
    fn roundtrip_structure() {
        let mut g = CoocGraph::unlabeled(4, [(0, 1, 3), (1, 2, 1), (2, 3, 7)]).unwrap();
        g.nodes[2].label = "Standard & Poor's <\"board\">".into();
        g.nodes[3].etype = EntityType::Person;
        let p = louvain(&g, 1);
        let bc = betweenness(&g);
        let layout = force_atlas(&g, 1, 20);
        let text = export_gexf(&g, &p, &bc, &layout).unwrap();
        validate_gexf(&text).unwrap();
        let (g2, p2, bc2, pos2) = read_gexf(&text).unwrap().into_parts().unwrap();
        assert_eq!(g2, g);
        assert_eq!(p2, p);
        assert_eq!(bc2, bc);
        assert_eq!(pos2, layout.positions);
    }

    #[test]
    fn largest_betweenness_gets_largest_size() {
        let g = CoocGraph::unlabeled(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        let back = read_gexf(&exported(&g)).unwrap();
        let sizes: Vec<f64> = back.nodes.iter().map(|n| n.size.unwrap()).collect();
        assert_eq!(sizes[2], MAX_NODE_SIZE);
        assert_eq!(sizes[0], MIN_NODE_SIZE);
        assert!(sizes[1] > sizes[0] && sizes[1] < sizes[2]);
    }

    #[test]
    fn colors_follow_communities() {
        let g = CoocGraph::unlabeled(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        let back = read_gexf(&exported(&g)).unwrap();
        assert_eq!(back.nodes[0].color, back.nodes[1].color);
        assert_ne!(back.nodes[0].color, back.nodes[2].color);
        assert_eq!(back.nodes[0].color, Some(PALETTE[0]));
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let g = CoocGraph::unlabeled(2, [(0, 1, 1)]).unwrap();
        let layout = force_atlas(&g, 0, 0);
        assert!(export_gexf(&g, &Partition::singletons(1), &[0.0, 0.0], &layout).is_err());
    }

    #[test]
    fn validator_catches_violations() {
        let cases = [
            ("<gexf version=\"1.2\"/>", "root must be"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.3"><graph/></gexf>"#, "version"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"></gexf>"#, "exactly one"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph defaultedgetype="sideways"/></gexf>"#, "defaultedgetype"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><nodes><node label="x"/></nodes></graph></gexf>"#, "`id`"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><nodes><node id="a"/><node id="a"/></nodes></graph></gexf>"#, "duplicate node"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><nodes><node id="a"/></nodes><edges><edge source="a" target="b"/></edges></graph></gexf>"#, "is not a node"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><nodes><node id="a"/></nodes><edges><edge source="a" target="a" weight="heavy"/></edges></graph></gexf>"#, "not a float"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" xmlns:viz="http://www.gexf.net/1.2draft/viz" version="1.2"><graph><nodes><node id="a"><viz:color r="300" g="0" b="0"/></node></nodes></graph></gexf>"#, "0..=255"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><attributes class="node"><attribute id="0" title="c" type="integer"/></attributes><nodes><node id="a"><attvalues><attvalue for="0" value="x"/></attvalues></node></nodes></graph></gexf>"#, "valid integer"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><nodes><node id="a"><attvalues><attvalue for="9" value="1"/></attvalues></node></nodes></graph></gexf>"#, "undeclared"),
            (r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2"><graph><edges/><nodes/></graph></gexf>"#, "not allowed"),
            ("<gexf", "well-formed"),
        ];
        for (doc, needle) in cases {
            let errs = validate_gexf(doc).unwrap_err();
            assert!(errs.iter().any(|e| e.contains(needle)), "{doc}: {errs:?}");
        }
    }
}
