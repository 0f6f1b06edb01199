//! Sankey JSON: `{"periods":[…],"nodes":[…],"tubes":[…]}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::streams::{Period, StreamModel, StreamNode, Tube};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModel {
    periods: Vec<JsonPeriod>,
    nodes: Vec<JsonNode>,
    tubes: Vec<JsonTube>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPeriod {
    index: usize,
    start_year: i32,
    end_year: i32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: String,
    period: usize,
    entity: String,
    terms: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTube {
    from: String,
    to: String,
    weight: usize,
    shared_terms: Vec<String>,
}

pub fn export_sankey_json(model: &StreamModel) -> Result<String> {
    for t in &model.tubes {
        if t.shared_terms.len() != t.weight {
            return Err(Error::Sankey(format!(
                "tube {} -> {} has weight {} but {} shared terms",
                t.from,
                t.to,
                t.weight,
                t.shared_terms.len()
            )));
        }
    }
    let json = JsonModel {
        periods: model
            .periods
            .iter()
            .map(|p| JsonPeriod {
                index: p.index,
                start_year: p.start_year,
                end_year: p.end_year,
            })
            .collect(),
        nodes: model
            .nodes
            .iter()
            .map(|n| JsonNode {
                id: n.id(),
                period: n.period,
                entity: n.entity.clone(),
                terms: n.terms.clone(),
            })
            .collect(),
        tubes: model
            .tubes
            .iter()
            .map(|t| JsonTube {
                from: t.from.clone(),
                to: t.to.clone(),
                weight: t.weight,
                shared_terms: t.shared_terms.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&json).map_err(|e| Error::Sankey(e.to_string()))
}

/// Parses and validates a Sankey document.
pub fn read_sankey_json(text: &str) -> Result<StreamModel> {
    let json: JsonModel = serde_json::from_str(text)
        .map_err(|e| Error::Sankey(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let mut nodes = Vec::with_capacity(json.nodes.len());
    for n in json.nodes {
        let node = StreamNode {
            period: n.period,
            entity: n.entity,
            terms: n.terms,
        };
        if node.id() != n.id {
            return Err(Error::Sankey(format!("node id `{}` should be `{}`", n.id, node.id())));
        }
        nodes.push(node);
    }
    let model = StreamModel {
        periods: json
            .periods
            .into_iter()
            .map(|p| Period {
                index: p.index,
                start_year: p.start_year,
                end_year: p.end_year,
            })
            .collect(),
        nodes,
        tubes: json
            .tubes
            .into_iter()
            .map(|t| Tube {
                from: t.from,
                to: t.to,
                weight: t.weight,
                shared_terms: t.shared_terms,
            })
            .collect(),
    };
    model.validate()?;
    Ok(model)
}
