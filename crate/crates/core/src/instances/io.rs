//! Versioned JSON documents for instances and solutions.

use serde::{Deserialize, Serialize};

use crate::instances::{DapInstance, DspInstance, Solution};
use crate::plane::{edge_of, PlaneGraph};
use crate::{Error, Rational, Result};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub edge: usize,
    pub tail: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub format: String,
    pub version: u32,
    pub vertices: usize,
    pub edges: Vec<EdgeRecord>,
    pub rotations: Vec<Vec<usize>>,
    pub outer_face_hint: Option<usize>,
    pub terminals: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Vec<Vec<ArcRecord>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub format: String,
    pub version: u32,
    pub paths: Vec<Vec<usize>>,
}

fn graph_doc(g: &PlaneGraph<Rational>, pairs: &[(usize, usize)], format: &str) -> InstanceDoc {
    InstanceDoc {
        format: format.into(),
        version: VERSION,
        vertices: g.n(),
        edges: (0..g.m())
            .map(|e| {
                let (u, v) = g.ends(e);
                EdgeRecord { u, v, num: *g.weight(e).numer(), den: *g.weight(e).denom() }
            })
            .collect(),
        rotations: (0..g.n()).map(|v| g.rot(v).iter().map(|&d| edge_of(d)).collect()).collect(),
        outer_face_hint: g.outer_hint(),
        terminals: pairs.iter().map(|&(s, t)| [s, t]).collect(),
        annotations: None,
    }
}

fn doc_graph(doc: &InstanceDoc) -> Result<(PlaneGraph<Rational>, Vec<(usize, usize)>)> {
    if doc.version != VERSION {
        return Err(Error::Parse(format!("unsupported version {}", doc.version)));
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for r in &doc.edges {
        if r.den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        edges.push((r.u, r.v, Rational::new(r.num, r.den)));
    }
    let g = PlaneGraph::new(doc.vertices, &edges, &doc.rotations, doc.outer_face_hint)?;
    let pairs = doc.terminals.iter().map(|p| (p[0], p[1])).collect();
    Ok((g, pairs))
}

fn to_string<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn dsp_to_json(inst: &DspInstance<Rational>) -> String {
    to_string(&graph_doc(&inst.graph, &inst.pairs, "pdsp"))
}

pub fn dsp_from_json(text: &str) -> Result<DspInstance<Rational>> {
    let doc: InstanceDoc = parse(text)?;
    if doc.format != "pdsp" && doc.format != "pdap" {
        return Err(Error::Parse(format!("unexpected format {}", doc.format)));
    }
    let (graph, pairs) = doc_graph(&doc)?;
    let inst = DspInstance { graph, pairs };
    inst.validate()?;
    Ok(inst)
}

pub fn dap_to_json(inst: &DapInstance<Rational>) -> String {
    let mut doc = graph_doc(&inst.graph, &inst.pairs, "pdap");
    let g = &inst.graph;
    doc.annotations = Some(
        inst.ann
            .iter()
            .map(|m| (0..g.num_darts()).filter(|&d| m[d]).map(|d| ArcRecord { edge: edge_of(d), tail: g.tail(d) }).collect())
            .collect(),
    );
    to_string(&doc)
}

pub fn dap_from_json(text: &str) -> Result<DapInstance<Rational>> {
    let doc: InstanceDoc = parse(text)?;
    if doc.format != "pdap" {
        return Err(Error::Parse(format!("unexpected format {}", doc.format)));
    }
    let (graph, pairs) = doc_graph(&doc)?;
    let lists = doc.annotations.as_ref().ok_or_else(|| Error::Parse("missing annotations".into()))?;
    if lists.len() != pairs.len() {
        return Err(Error::Parse("one annotation list per pair expected".into()));
    }
    let mut ann = vec![vec![false; graph.num_darts()]; pairs.len()];
    for (i, list) in lists.iter().enumerate() {
        for a in list {
            if a.edge >= graph.m() {
                return Err(Error::Parse(format!("arc on unknown edge {}", a.edge)));
            }
            let d = if graph.tail(2 * a.edge) == a.tail {
                2 * a.edge
            } else if graph.tail(2 * a.edge + 1) == a.tail {
                2 * a.edge + 1
            } else {
                return Err(Error::Parse(format!("tail {} not on edge {}", a.tail, a.edge)));
            };
            ann[i][d] = true;
        }
    }
    Ok(DapInstance { graph, pairs, ann })
}

pub fn solution_to_json(sol: &Solution) -> String {
    to_string(&SolutionDoc { format: "sol".into(), version: VERSION, paths: sol.paths.clone() })
}

pub fn solution_from_json(text: &str) -> Result<Solution> {
    let doc: SolutionDoc = parse(text)?;
    if doc.format != "sol" || doc.version != VERSION {
        return Err(Error::Parse("not a version-1 solution document".into()));
    }
    Ok(Solution { paths: doc.paths })
}
