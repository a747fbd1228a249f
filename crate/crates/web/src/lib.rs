//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every entry point takes the group either as a built-in name (`z2z3`) or
//! as the text of a signature file, and returns JSON.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fpfix::analysis::{image_chain, ChainParams};
use fpfix::{catalog, formats, Signature, SubgroupGraph};

const MAX_CHAIN_K: usize = 30;
const MAX_DEMO_VERTICES: usize = 20_000;

fn signature(group: &str) -> Result<Signature, String> {
    let name = group.trim();
    if let Some(sig) = catalog::by_name(name) {
        return Ok(sig);
    }
    formats::parse_signature(group).map_err(|e| format!("signature: {e}"))
}

#[derive(Serialize)]
pub struct Normalized {
    pub word: String,
    pub syllables: usize,
    pub elliptic: bool,
}

pub fn normalize_json(group: &str, word: &str) -> Result<String, String> {
    let sig = signature(group)?;
    let w = sig.parse_word(word).map_err(|e| format!("word: {e}"))?;
    let out = Normalized {
        word: sig.format_word(&w),
        syllables: w.len(),
        elliptic: sig.is_elliptic(&w),
    };
    Ok(serde_json::to_string(&out).unwrap())
}

#[derive(Serialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: String,
}

#[derive(Serialize)]
pub struct Component {
    pub factor: String,
    pub stabilizer_order: usize,
    pub members: Vec<usize>,
}

#[derive(Serialize)]
pub struct GraphView {
    pub vertices: usize,
    pub edges: Vec<Edge>,
    pub components: Vec<Component>,
    pub kurosh_rank: usize,
    pub instances: usize,
    pub free_rank: usize,
    pub index: Option<usize>,
    pub euler: String,
    pub basis: Vec<String>,
}

pub fn subgroup_graph_json(group: &str, generators: &str) -> Result<String, String> {
    let sig = signature(group)?;
    let gens = formats::parse_generators(&sig, generators).map_err(|e| format!("generators: {e}"))?;
    let graph = SubgroupGraph::from_generators_capped(&sig, &gens, MAX_DEMO_VERTICES).map_err(|e| e.to_string())?;
    let kd = graph.kurosh_decomposition().map_err(|e| e.to_string())?;
    let view = GraphView {
        vertices: graph.num_vertices(),
        edges: graph
            .free_edges()
            .iter()
            .map(|e| Edge {
                src: e.src,
                dst: e.dst,
                label: format!("x{}", e.letter + 1),
            })
            .collect(),
        components: graph
            .components()
            .iter()
            .map(|c| Component {
                factor: sig.factor(c.factor).name().to_string(),
                stabilizer_order: c.stabilizer.len(),
                members: c.members.iter().map(|m| m.0).collect(),
            })
            .collect(),
        kurosh_rank: kd.kurosh_rank(),
        instances: kd.instances.len(),
        free_rank: kd.free_rank,
        index: graph.completeness_and_index().map_err(|e| e.to_string())?,
        euler: graph.euler_characteristic().map_err(|e| e.to_string())?.to_string(),
        basis: graph
            .basis()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|w| sig.format_word(w))
            .collect(),
    };
    Ok(serde_json::to_string(&view).unwrap())
}

#[derive(Serialize)]
pub struct Level {
    pub k: usize,
    pub kurosh_rank: usize,
    pub free_rank: usize,
}

#[derive(Serialize)]
pub struct ChainView {
    pub levels: Vec<Level>,
    pub stabilized_at: Option<usize>,
    pub truncated_at: Option<usize>,
    pub stable_basis: Vec<String>,
}

pub fn image_chain_json(group: &str, endomorphism: &str, max_k: usize) -> Result<String, String> {
    let sig = signature(group)?;
    let phi = formats::parse_endomorphism(&sig, endomorphism).map_err(|e| format!("endomorphism: {e}"))?;
    let params = ChainParams {
        max_k: max_k.clamp(1, MAX_CHAIN_K),
        max_weight: 4096,
        max_vertices: MAX_DEMO_VERTICES,
    };
    let chain = image_chain(&phi, &params).map_err(|e| e.to_string())?;
    let stable_basis = match chain.stable() {
        Some(g) => g
            .basis()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|w| sig.format_word(w))
            .collect(),
        None => Vec::new(),
    };
    let view = ChainView {
        levels: chain
            .levels
            .iter()
            .map(|l| Level {
                k: l.k,
                kurosh_rank: l.decomposition.kurosh_rank(),
                free_rank: l.decomposition.free_rank,
            })
            .collect(),
        stabilized_at: chain.stabilized_at,
        truncated_at: chain.truncated_at,
        stable_basis,
    };
    Ok(serde_json::to_string(&view).unwrap())
}

#[wasm_bindgen]
pub fn normalize(group: &str, word: &str) -> Result<String, JsError> {
    normalize_json(group, word).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn subgroup_graph(group: &str, generators: &str) -> Result<String, JsError> {
    subgroup_graph_json(group, generators).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn chain(group: &str, endomorphism: &str, max_k: usize) -> Result<String, JsError> {
    image_chain_json(group, endomorphism, max_k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn catalog_names() -> String {
    catalog::NAMES.join(",")
}

#[wasm_bindgen]
pub fn signature_text(name: &str) -> Option<String> {
    catalog::by_name(name).map(|s| formats::format_signature(&s))
}
