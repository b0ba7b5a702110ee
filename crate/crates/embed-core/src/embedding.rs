use std::collections::BTreeMap;

use graph_core::{DistanceMatrix, Graph};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::EmbedError;

/// Injective map from guest vertices to host vertices, possibly partial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Embedding {
    guest_n: usize,
    map: BTreeMap<usize, usize>,
}

impl Embedding {
    pub fn new(guest_n: usize, map: BTreeMap<usize, usize>) -> Self {
        Embedding { guest_n, map }
    }

    /// Total embedding from an image vector indexed by guest vertex.
    pub fn from_images(images: &[usize]) -> Self {
        Embedding { guest_n: images.len(), map: images.iter().copied().enumerate().collect() }
    }

    pub fn guest_n(&self) -> usize {
        self.guest_n
    }

    pub fn map(&self) -> &BTreeMap<usize, usize> {
        &self.map
    }

    pub fn get(&self, u: usize) -> Option<usize> {
        self.map.get(&u).copied()
    }

    pub fn is_total(&self) -> bool {
        self.map.len() == self.guest_n
    }

    /// First pair of guest vertices sharing an image, if any.
    pub fn injectivity_violation(&self) -> Option<(usize, usize, usize)> {
        let mut owner = BTreeMap::new();
        for (&u, &h) in &self.map {
            if let Some(&prev) = owner.get(&h) {
                return Some((prev, u, h));
            }
            owner.insert(h, u);
        }
        None
    }

    /// Image vector of a total embedding.
    pub fn images(&self) -> Vec<usize> {
        (0..self.guest_n).map(|u| self.map[&u]).collect()
    }

    fn check_total_injective(&self) -> Result<(), EmbedError> {
        if let Some((a, b, host)) = self.injectivity_violation() {
            return Err(EmbedError::NotInjective { a, b, host });
        }
        if let Some(missing) = (0..self.guest_n).find(|u| !self.map.contains_key(u)) {
            return Err(EmbedError::Partial { missing });
        }
        Ok(())
    }
}

/// Exact expansion, contraction and distortion of a total embedding, with
/// the guest pairs attaining each extremum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistortionReport {
    pub expansion: Ratio<u64>,
    pub contraction: Ratio<u64>,
    pub distortion: Ratio<u64>,
    pub expansion_witness: Option<(usize, usize)>,
    pub contraction_witness: Option<(usize, usize)>,
}

impl DistortionReport {
    pub fn is_non_contracting(&self) -> bool {
        self.contraction <= Ratio::from_integer(1)
    }
}

/// Formats a ratio as `a/b`, keeping the denominator even when it is 1.
pub fn fmt_ratio(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn pair_distances(
    dg: &DistanceMatrix,
    dh: &DistanceMatrix,
    f: &Embedding,
    u: usize,
    v: usize,
) -> Result<(u64, u64), EmbedError> {
    let (fu, fv) = (f.map[&u], f.map[&v]);
    let a = dg.get(u, v);
    let b = dh.get(fu, fv);
    if a == DistanceMatrix::INF || b == DistanceMatrix::INF {
        return Err(EmbedError::InfiniteDistance { u, v });
    }
    Ok((a as u64, b as u64))
}

pub fn distortion_report(
    _g: &Graph,
    _h: &Graph,
    dg: &DistanceMatrix,
    dh: &DistanceMatrix,
    f: &Embedding,
) -> Result<DistortionReport, EmbedError> {
    f.check_total_injective()?;
    let n = f.guest_n;
    let mut expansion = Ratio::from_integer(0u64);
    let mut contraction = Ratio::from_integer(0u64);
    let (mut ew, mut cw) = (None, None);
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = pair_distances(dg, dh, f, u, v)?;
            let e = Ratio::new(b, a);
            let c = Ratio::new(a, b);
            if ew.is_none() || e > expansion {
                expansion = e;
                ew = Some((u, v));
            }
            if cw.is_none() || c > contraction {
                contraction = c;
                cw = Some((u, v));
            }
        }
    }
    if ew.is_none() {
        expansion = Ratio::from_integer(1);
        contraction = Ratio::from_integer(1);
    }
    Ok(DistortionReport {
        expansion,
        contraction,
        distortion: expansion * contraction,
        expansion_witness: ew,
        contraction_witness: cw,
    })
}

/// Which inequality a pair breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `D_H(F(u),F(v)) < D_G(u,v)`.
    Contraction,
    /// `D_H(F(u),F(v)) > d * D_G(u,v)`.
    Expansion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Ok,
    Violation { u: usize, v: usize, guest_dist: u32, host_dist: u32, kind: ViolationKind },
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verification::Ok)
    }
}

/// Checks `D_G(u,v) <= D_H(F(u),F(v)) <= d * D_G(u,v)` for every pair and
/// reports the lexicographically first violating pair.
pub fn verify_nc_distortion(
    g: &Graph,
    h: &Graph,
    dg: &DistanceMatrix,
    dh: &DistanceMatrix,
    f: &Embedding,
    d: u32,
) -> Result<Verification, EmbedError> {
    verify_nc_ratio(g, h, dg, dh, f, Ratio::from_integer(d as u64))
}

/// [`verify_nc_distortion`] with a rational expansion bound.
pub fn verify_nc_ratio(
    _g: &Graph,
    _h: &Graph,
    dg: &DistanceMatrix,
    dh: &DistanceMatrix,
    f: &Embedding,
    d: Ratio<u64>,
) -> Result<Verification, EmbedError> {
    f.check_total_injective()?;
    let n = f.guest_n;
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = pair_distances(dg, dh, f, u, v)?;
            let kind = if b < a {
                Some(ViolationKind::Contraction)
            } else if b * d.denom() > a * d.numer() {
                Some(ViolationKind::Expansion)
            } else {
                None
            };
            if let Some(kind) = kind {
                return Ok(Verification::Violation { u, v, guest_dist: a as u32, host_dist: b as u32, kind });
            }
        }
    }
    Ok(Verification::Ok)
}

/// Union of partial maps that agree on shared vertices.
pub fn union_embedding(guest_n: usize, parts: &[BTreeMap<usize, usize>]) -> Result<Embedding, EmbedError> {
    let mut map = BTreeMap::new();
    for part in parts {
        for (&u, &h) in part {
            match map.insert(u, h) {
                Some(prev) if prev != h => return Err(EmbedError::Conflict { vertex: u, first: prev, second: h }),
                _ => {}
            }
        }
    }
    Ok(Embedding { guest_n, map })
}

/// Serialized form of an embedding with its distortion figures.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EmbeddingJson {
    pub map: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expansion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contraction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distortion: Option<String>,
}

impl EmbeddingJson {
    pub fn new(f: &Embedding, report: Option<&DistortionReport>) -> Self {
        EmbeddingJson {
            map: f.map.clone(),
            expansion: report.map(|r| fmt_ratio(&r.expansion)),
            contraction: report.map(|r| fmt_ratio(&r.contraction)),
            distortion: report.map(|r| fmt_ratio(&r.distortion)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("embedding serializes")
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn embedding(&self, guest_n: usize) -> Embedding {
        Embedding::new(guest_n, self.map.clone())
    }
}

/// DOT rendering of a host. Vertices with a preimage are filled and labelled
/// `host:guest`; when a red set is given, red vertices are drawn red and the
/// rest blue.
pub fn host_dot(h: &Graph, f: Option<&Embedding>, red: Option<&[bool]>) -> String {
    let mut preimage = vec![None; h.n()];
    if let Some(f) = f {
        for (&u, &x) in f.map() {
            preimage[x] = Some(u);
        }
    }
    let mut out = String::from("graph host {\n");
    for v in 0..h.n() {
        let color = match red {
            Some(r) if r[v] => "red",
            Some(_) => "blue",
            None => "black",
        };
        match preimage[v] {
            Some(u) => {
                out.push_str(&format!("  {v} [label=\"{v}:{u}\", color={color}, style=filled, fillcolor=lightgray];\n"))
            }
            None => out.push_str(&format!("  {v} [label=\"{v}\", color={color}];\n")),
        }
    }
    for (u, v) in h.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}
