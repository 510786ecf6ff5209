//! Line-oriented `key = value` files with bracketed sections.
//!
//! ```text
//! [variety]
//! name = F1
//! dim = 2
//! rank = 2
//! basis = H, E
//! nef_tangent_bundle = false
//! [intersection]
//! 0,0 = 1
//! 1,1 = -1
//! [cones]
//! nef = [[1,0],[1,-1]]
//! psef = [[0,1],[1,-1]]
//! [negative_curves]
//! E = [0,1]
//! ```
//!
//! Unknown sections and keys are rejected. `[variety]` also accepts
//! `big_volume_oracle = nef-only | surface-zariski`; the default is
//! `surface-zariski` for surfaces and `nef-only` otherwise.

use std::collections::BTreeMap;
use std::path::Path;

use crate::algebra::{format_rat, parse_rat, Rat, SymmetricForm};
use crate::error::{Error, Result};
use crate::toric::ToricFan;

use super::{BigVolumeOracle, NegativeCurve, NumericalVariety, VarietyData};

struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn at(line: usize, message: impl Into<String>) -> Error {
    Error::ParseAt { line, message: message.into() }
}

/// Splits the text into sections of entries, rejecting unknown section names.
fn sections(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, Vec<Entry>>> {
    let mut out: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !allowed.contains(&name.as_str()) {
                return Err(at(line, format!("unknown section [{name}]")));
            }
            if out.contains_key(&name) {
                return Err(at(line, format!("duplicate section [{name}]")));
            }
            out.insert(name.clone(), Vec::new());
            current = Some(name);
            continue;
        }
        let Some(section) = &current else {
            return Err(at(line, "entry outside of any section"));
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| at(line, format!("expected `key = value`, found {content:?}")))?;
        out.get_mut(section).unwrap().push(Entry {
            line,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }
    if out.is_empty() {
        return Err(Error::Parse("empty file".into()));
    }
    Ok(out)
}

fn keyed<'a>(entries: &'a [Entry], allowed: &[&str], section: &str) -> Result<BTreeMap<&'a str, &'a Entry>> {
    let mut map = BTreeMap::new();
    for e in entries {
        if !allowed.contains(&e.key.as_str()) {
            return Err(at(e.line, format!("unknown key {:?} in [{section}]", e.key)));
        }
        if map.insert(e.key.as_str(), e).is_some() {
            return Err(at(e.line, format!("duplicate key {:?}", e.key)));
        }
    }
    Ok(map)
}

fn required<'a>(map: &BTreeMap<&str, &'a Entry>, key: &str, section: &str) -> Result<&'a Entry> {
    map.get(key)
        .copied()
        .ok_or_else(|| Error::Parse(format!("missing key {key:?} in [{section}]")))
}

fn parse_usize(e: &Entry) -> Result<usize> {
    e.value
        .parse()
        .map_err(|_| at(e.line, format!("{} must be a nonnegative integer", e.key)))
}

/// Parses `[a, b, ...]` of rationals.
fn parse_vector(s: &str, line: usize) -> Result<Vec<Rat>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| at(line, format!("expected a bracketed list, found {s:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| parse_rat(t).map_err(|e| at(line, e.to_string())))
        .collect()
}

/// Parses `[[...],[...]]`.
fn parse_vector_list(s: &str, line: usize) -> Result<Vec<Vec<Rat>>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| at(line, format!("expected a list of lists, found {s:?}")))?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .ok_or_else(|| at(line, "unbalanced brackets"))?;
        out.push(parse_vector(&rest[..=close], line)?);
        rest = rest[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        } else if !rest.is_empty() {
            return Err(at(line, format!("unexpected text {rest:?}")));
        }
    }
    Ok(out)
}

fn parse_int_vector_list(s: &str, line: usize) -> Result<Vec<Vec<i64>>> {
    parse_vector_list(s, line)?
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| {
                    if x.is_integer() {
                        i64::try_from(x.to_integer()).map_err(|_| at(line, "integer out of range"))
                    } else {
                        Err(at(line, format!("expected an integer, found {x}")))
                    }
                })
                .collect()
        })
        .collect()
}

/// Parses the variety file format; validates all invariants.
pub fn parse_variety(text: &str) -> Result<NumericalVariety> {
    let secs = sections(text, &["variety", "intersection", "cones", "negative_curves"])?;
    let head = secs
        .get("variety")
        .ok_or_else(|| Error::Parse("missing [variety] section".into()))?;
    let head = keyed(
        head,
        &["name", "dim", "rank", "basis", "nef_tangent_bundle", "big_volume_oracle"],
        "variety",
    )?;
    let name = required(&head, "name", "variety")?.value.clone();
    let dim_e = required(&head, "dim", "variety")?;
    let dim = parse_usize(dim_e)?;
    let rank_e = required(&head, "rank", "variety")?;
    let rank = parse_usize(rank_e)?;
    let basis_e = required(&head, "basis", "variety")?;
    let basis: Vec<String> = basis_e.value.split(',').map(|s| s.trim().to_string()).collect();
    if basis.len() != rank || basis.iter().any(|b| b.is_empty()) {
        return Err(at(basis_e.line, format!("basis must list {rank} nonempty labels")));
    }
    let nef_tangent_bundle = match head.get("nef_tangent_bundle") {
        None => false,
        Some(e) => match e.value.as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(at(e.line, "nef_tangent_bundle must be true or false")),
        },
    };
    let oracle = match head.get("big_volume_oracle") {
        None if dim == 2 => BigVolumeOracle::SurfaceZariski,
        None => BigVolumeOracle::NefOnly,
        Some(e) => match e.value.as_str() {
            "nef-only" => BigVolumeOracle::NefOnly,
            "surface-zariski" => BigVolumeOracle::SurfaceZariski,
            "toric-polytope" => {
                return Err(at(e.line, "toric-polytope varieties are read from a fan file (--fan)"))
            }
            other => return Err(at(e.line, format!("unknown oracle {other:?}"))),
        },
    };

    let mut form = SymmetricForm::new(dim, rank);
    for e in secs.get("intersection").map(Vec::as_slice).unwrap_or(&[]) {
        let idx: Vec<usize> = e
            .key
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| at(e.line, format!("bad index list {:?}", e.key)))?;
        if idx.windows(2).any(|w| w[0] > w[1]) {
            return Err(at(e.line, format!("indices {:?} must be sorted", e.key)));
        }
        if form.get(&idx) != Rat::from_integer(0.into()) {
            return Err(at(e.line, format!("duplicate entry {:?}", e.key)));
        }
        let value = parse_rat(&e.value).map_err(|err| at(e.line, err.to_string()))?;
        form.set(&idx, value).map_err(|err| at(e.line, err.to_string()))?;
    }

    let cones = secs
        .get("cones")
        .ok_or_else(|| Error::Parse("missing [cones] section".into()))?;
    let cones = keyed(cones, &["nef", "psef"], "cones")?;
    let nef_e = required(&cones, "nef", "cones")?;
    let psef_e = required(&cones, "psef", "cones")?;
    let nef_generators = parse_vector_list(&nef_e.value, nef_e.line)?;
    let psef_generators = parse_vector_list(&psef_e.value, psef_e.line)?;
    for (e, list) in [(nef_e, &nef_generators), (psef_e, &psef_generators)] {
        if let Some(v) = list.iter().find(|v| v.len() != rank) {
            return Err(at(e.line, format!("generator of length {} in rank {rank}", v.len())));
        }
    }

    let mut negative_curves = Vec::new();
    for e in secs.get("negative_curves").map(Vec::as_slice).unwrap_or(&[]) {
        let class = parse_vector(&e.value, e.line)?;
        if class.len() != rank {
            return Err(at(e.line, format!("curve {} needs {rank} coordinates", e.key)));
        }
        negative_curves.push(NegativeCurve { label: e.key.clone(), class });
    }

    NumericalVariety::new(VarietyData {
        name,
        dim,
        basis,
        intersection: form,
        nef_generators,
        psef_generators,
        negative_curves,
        oracle,
        nef_tangent_bundle,
    })
}

pub fn load_variety(path: impl AsRef<Path>) -> Result<NumericalVariety> {
    parse_variety(&std::fs::read_to_string(path)?)
}

fn list(vs: &[Vec<Rat>]) -> String {
    let inner: Vec<String> = vs
        .iter()
        .map(|v| format!("[{}]", v.iter().map(format_rat).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", inner.join(","))
}

/// Serializes a variety in the file format. Toric oracles are written as `nef-only`.
pub fn write_variety(v: &NumericalVariety) -> String {
    let mut s = String::new();
    s.push_str("[variety]\n");
    s.push_str(&format!("name = {}\n", v.name()));
    s.push_str(&format!("dim = {}\n", v.dim()));
    s.push_str(&format!("rank = {}\n", v.rank()));
    s.push_str(&format!("basis = {}\n", v.basis().join(", ")));
    s.push_str(&format!("nef_tangent_bundle = {}\n", v.nef_tangent_bundle()));
    let oracle = match v.oracle() {
        BigVolumeOracle::SurfaceZariski => "surface-zariski",
        _ => "nef-only",
    };
    s.push_str(&format!("big_volume_oracle = {oracle}\n"));
    s.push_str("[intersection]\n");
    for (k, val) in v.intersection().entries() {
        let idx: Vec<String> = k.iter().map(|i| i.to_string()).collect();
        s.push_str(&format!("{} = {}\n", idx.join(","), format_rat(val)));
    }
    s.push_str("[cones]\n");
    s.push_str(&format!("nef = {}\n", list(v.nef().generators())));
    s.push_str(&format!("psef = {}\n", list(v.psef().generators())));
    if !v.negative_curves().is_empty() {
        s.push_str("[negative_curves]\n");
        for c in v.negative_curves() {
            let coords: Vec<String> = c.class.iter().map(format_rat).collect();
            s.push_str(&format!("{} = [{}]\n", c.label, coords.join(",")));
        }
    }
    s
}

/// Parses a fan file:
///
/// ```text
/// [fan]
/// dim = 2
/// rays = [[1,0],[0,1],[-1,1],[0,-1]]
/// max_cones = [[0,1],[1,2],[2,3],[3,0]]
/// ```
pub fn parse_fan(text: &str) -> Result<ToricFan> {
    let secs = sections(text, &["fan"])?;
    let fan = secs.get("fan").ok_or_else(|| Error::Parse("missing [fan] section".into()))?;
    let fan = keyed(fan, &["dim", "rays", "max_cones"], "fan")?;
    let dim = parse_usize(required(&fan, "dim", "fan")?)?;
    let rays_e = required(&fan, "rays", "fan")?;
    let rays = parse_int_vector_list(&rays_e.value, rays_e.line)?;
    let cones_e = required(&fan, "max_cones", "fan")?;
    let cones = parse_int_vector_list(&cones_e.value, cones_e.line)?
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|i| usize::try_from(i).map_err(|_| at(cones_e.line, "negative ray index")))
                .collect()
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    ToricFan::new(dim, rays, cones)
}

pub fn load_fan(path: impl AsRef<Path>) -> Result<ToricFan> {
    parse_fan(&std::fs::read_to_string(path)?)
}
