//! The JSON instance format and report serialization shared with the
//! command line tool.
//!
//! An instance file is one JSON object with a `field`, `dims`, and exactly
//! one payload: `vectors` (a product-vector set, listed factor by factor),
//! `entries` (one dense tensor, row-major with the first mode slowest), or
//! `tensors` (several dense tensors, same layout). Finite-field values are
//! written as integers, rationals as `"num/den"` strings; the parser also
//! accepts strings for residues and plain integers for rationals.
//!
//! All user-facing indices are 1-based here; the library itself is
//! 0-based throughout. Serialized maps keep alphabetical key order, so
//! documents diff cleanly.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::kruskal::{GeneralPositionReport, NotCertifiedReason, UniquenessCertificate};
use crate::oracle::{DecompositionUniqueness, PairSum, RankMethod, RankResult, SubspaceCategory};
use crate::scalar::{FieldSpec, Scalar};
use crate::search::{SearchReport, SearchSpace, SearchTarget};
use crate::tensor::{DenseTensor, ModeSignature, ProductVector, ProductVectorSet};
use crate::verify::{PairingOutcome, Verdict, VerdictStatus};
use crate::zerosum::{Chain, ChainOrigin, ChainProblem, LemmaCheck, Partition};

/// What an instance file can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedInstance {
    Vectors(ProductVectorSet),
    Tensor(DenseTensor),
    Tensors(Vec<DenseTensor>),
}

fn bad(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn parse_field(root: &Map<String, Value>) -> Result<FieldSpec> {
    let field = root
        .get("field")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("/field", "expected an object with a \"kind\""))?;
    match field.get("kind").and_then(Value::as_str) {
        Some("rationals") => Ok(FieldSpec::Rationals),
        Some("prime_field") => {
            let p = field
                .get("p")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("/field/p", "expected a prime"))?;
            FieldSpec::prime(p).map_err(|e| bad("/field/p", e.to_string()))
        }
        _ => Err(bad("/field/kind", "expected \"prime_field\" or \"rationals\"")),
    }
}

fn parse_scalar(field: FieldSpec, v: &Value, location: &str) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| bad(location, "expected an integer, not a float"))?;
            Ok(Scalar::from_integer(field, i))
        }
        Value::String(s) => Scalar::parse(field, s).map_err(|e| bad(location, e.to_string())),
        _ => Err(bad(location, "expected a number or a string")),
    }
}

fn parse_dims(root: &Map<String, Value>) -> Result<Vec<usize>> {
    let dims = root
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("/dims", "expected an array of mode sizes"))?;
    dims.iter()
        .enumerate()
        .map(|(j, v)| {
            v.as_u64()
                .map(|d| d as usize)
                .ok_or_else(|| bad(format!("/dims/{}", j), "expected a positive integer"))
        })
        .collect()
}

fn parse_entry_list(field: FieldSpec, v: &Value, location: &str) -> Result<Vec<Scalar>> {
    let entries =
        v.as_array().ok_or_else(|| bad(location, "expected an array of field elements"))?;
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| parse_scalar(field, e, &format!("{}/{}", location, i)))
        .collect()
}

fn parse_vector(signature: &ModeSignature, a: usize, v: &Value) -> Result<ProductVector> {
    let location = format!("/vectors/{}", a);
    let factors = v.as_array().ok_or_else(|| bad(&location, "expected an array of factors"))?;
    let parsed: Vec<Vec<Scalar>> = factors
        .iter()
        .enumerate()
        .map(|(j, f)| parse_entry_list(signature.field(), f, &format!("{}/{}", location, j)))
        .collect::<Result<_>>()?;
    match ProductVector::new(signature.clone(), parsed) {
        Ok(pv) => Ok(pv),
        // Re-address the zero-factor report to this vector's position.
        Err(Error::ZeroFactor { mode, .. }) => Err(Error::ZeroFactor { vector: a, mode }),
        Err(e) => Err(bad(&location, e.to_string())),
    }
}

fn parse_dense(signature: &ModeSignature, v: &Value, location: &str) -> Result<DenseTensor> {
    let entries = parse_entry_list(signature.field(), v, location)?;
    DenseTensor::new(signature.clone(), entries).map_err(|e| bad(location, e.to_string()))
}

/// Parse one instance document.
pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad("/", e.to_string()))?;
    let root = root.as_object().ok_or_else(|| bad("/", "expected a JSON object"))?;
    let field = parse_field(root)?;
    let dims = parse_dims(root)?;
    let signature = ModeSignature::new(field, dims).map_err(|e| bad("/dims", e.to_string()))?;

    let payloads = ["vectors", "entries", "tensors"];
    let present: Vec<&str> = payloads.iter().copied().filter(|k| root.contains_key(*k)).collect();
    if present.len() != 1 {
        return Err(bad("/", "expected exactly one of \"vectors\", \"entries\" or \"tensors\""));
    }
    match present[0] {
        "vectors" => {
            let vs = root["vectors"]
                .as_array()
                .ok_or_else(|| bad("/vectors", "expected an array of product vectors"))?;
            let vectors: Vec<ProductVector> = vs
                .iter()
                .enumerate()
                .map(|(a, v)| parse_vector(&signature, a, v))
                .collect::<Result<_>>()?;
            let set = ProductVectorSet::new(signature, vectors)
                .map_err(|e| bad("/vectors", e.to_string()))?;
            Ok(ParsedInstance::Vectors(set))
        }
        "entries" => {
            Ok(ParsedInstance::Tensor(parse_dense(&signature, &root["entries"], "/entries")?))
        }
        _ => {
            let ts = root["tensors"]
                .as_array()
                .ok_or_else(|| bad("/tensors", "expected an array of entry arrays"))?;
            let tensors: Vec<DenseTensor> = ts
                .iter()
                .enumerate()
                .map(|(i, t)| parse_dense(&signature, t, &format!("/tensors/{}", i)))
                .collect::<Result<_>>()?;
            Ok(ParsedInstance::Tensors(tensors))
        }
    }
}

/// Parse a chain problem: `{"n": 5, "s_blocks": [[1,2],[3,4,5]],
/// "t_blocks": [[1],[2,3],[4,5]]}` with 1-based indices.
pub fn parse_chain_problem(text: &str) -> Result<ChainProblem> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad("/", e.to_string()))?;
    let root = root.as_object().ok_or_else(|| bad("/", "expected a JSON object"))?;
    let n = root
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("/n", "expected a positive integer"))? as usize;
    let blocks_of = |key: &str| -> Result<Vec<Vec<usize>>> {
        let blocks = root
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| bad(format!("/{}", key), "expected an array of index arrays"))?;
        blocks
            .iter()
            .enumerate()
            .map(|(b, block)| {
                let ids = block.as_array().ok_or_else(|| {
                    bad(format!("/{}/{}", key, b), "expected an array of indices")
                })?;
                ids.iter()
                    .enumerate()
                    .map(|(i, v)| match v.as_u64() {
                        Some(x) if x >= 1 => Ok(x as usize - 1),
                        _ => Err(bad(format!("/{}/{}/{}", key, b, i), "expected a 1-based index")),
                    })
                    .collect()
            })
            .collect()
    };
    ChainProblem::new(n, blocks_of("s_blocks")?, blocks_of("t_blocks")?)
}

fn one_based(indices: &[usize]) -> Value {
    Value::from(indices.iter().map(|&i| i + 1).collect::<Vec<usize>>())
}

pub fn field_to_value(field: FieldSpec) -> Value {
    match field {
        FieldSpec::Rationals => json!({ "kind": "rationals" }),
        FieldSpec::PrimeField(p) => json!({ "kind": "prime_field", "p": p }),
    }
}

fn scalar_to_value(s: &Scalar) -> Value {
    match s {
        Scalar::Residue { value, .. } => Value::from(*value),
        Scalar::Rational(_) => Value::from(s.to_string()),
    }
}

fn factors_to_value(v: &ProductVector) -> Value {
    Value::from(
        v.factors()
            .iter()
            .map(|f| Value::from(f.iter().map(scalar_to_value).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
    )
}

/// Serialize a set in the instance file format.
pub fn set_to_value(s: &ProductVectorSet) -> Value {
    json!({
        "field": field_to_value(s.signature().field()),
        "dims": s.signature().dims(),
        "vectors": s.vectors().iter().map(factors_to_value).collect::<Vec<_>>(),
    })
}

/// Serialize a dense tensor in the instance file format.
pub fn tensor_to_value(t: &DenseTensor) -> Value {
    json!({
        "field": field_to_value(t.signature().field()),
        "dims": t.signature().dims(),
        "entries": t.entries().iter().map(scalar_to_value).collect::<Vec<_>>(),
    })
}

pub fn general_position_to_value(r: &GeneralPositionReport) -> Value {
    json!({
        "requested": r.requested,
        "holds": r.holds,
        "witness": r.witness.as_ref().map(|w| json!({
            "mode": w.mode + 1,
            "indices": one_based(&w.indices),
        })),
    })
}

pub fn certificate_to_value(c: &UniquenessCertificate) -> Value {
    json!({
        "n": c.n,
        "m": c.m,
        "kruskal_ranks": c.kruskal_ranks,
        "inequality": { "lhs": c.inequality_lhs, "rhs": c.inequality_rhs },
        "certified": c.certified,
        "reason": c.reason.as_ref().map(|r| match r {
            NotCertifiedReason::TooFewModes => "too_few_modes",
            NotCertifiedReason::InequalityFails => "inequality_fails",
        }),
    })
}

pub fn rank_result_to_value(r: &RankResult) -> Value {
    json!({
        "rank": r.rank,
        "method": match r.method {
            RankMethod::FlatteningBoundMet => "flattening_bound",
            RankMethod::Exhaustive => "exhaustive",
        },
        "witness": r.witness.iter().map(factors_to_value).collect::<Vec<_>>(),
    })
}

pub fn uniqueness_to_value(u: &DecompositionUniqueness) -> Value {
    match u {
        DecompositionUniqueness::Unique { decomposition } => json!({
            "unique": true,
            "decomposition": decomposition.iter().map(factors_to_value).collect::<Vec<_>>(),
        }),
        DecompositionUniqueness::Multiple { decompositions } => json!({
            "unique": false,
            "decompositions": decompositions
                .iter()
                .map(|d| d.iter().map(factors_to_value).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
    }
}

pub fn pair_sum_to_value(p: &PairSum) -> Value {
    match p {
        PairSum::Product(v) => json!({ "kind": "product", "vector": factors_to_value(v) }),
        PairSum::Entangled => json!({ "kind": "entangled" }),
        PairSum::Zero => json!({ "kind": "zero" }),
    }
}

pub fn subspace_to_value(c: &SubspaceCategory) -> Value {
    json!({
        "category": c.category,
        "product_lines": c.product_lines.iter().map(factors_to_value).collect::<Vec<_>>(),
    })
}

pub fn subsets_to_value(subsets: &[Vec<usize>]) -> Value {
    json!({
        "count": subsets.len(),
        "subsets": subsets.iter().map(|s| one_based(s)).collect::<Vec<_>>(),
    })
}

pub fn partition_to_value(p: &Partition) -> Value {
    json!({
        "blocks": p.blocks().iter().map(|b| one_based(b)).collect::<Vec<_>>(),
    })
}

pub fn lemma_check_to_value(c: &LemmaCheck) -> Value {
    match c {
        LemmaCheck::Ok => json!({ "ok": true }),
        LemmaCheck::Violation { s_subfamily, t_subfamily, union } => json!({
            "ok": false,
            "s_subfamily": one_based(s_subfamily),
            "t_subfamily": one_based(t_subfamily),
            "union": one_based(union),
        }),
    }
}

pub fn chain_to_value(c: &Chain) -> Value {
    json!({
        "links": c.links.iter().map(|l| json!({
            "origin": match l.origin {
                ChainOrigin::S => "S",
                ChainOrigin::T => "T",
            },
            "indices": one_based(&l.indices),
        })).collect::<Vec<_>>(),
    })
}

pub fn verdict_to_value(v: &Verdict) -> Value {
    let mut out = Map::new();
    out.insert(
        "status".into(),
        Value::from(match v.status {
            VerdictStatus::Holds => "holds",
            VerdictStatus::NotApplicable => "not_applicable",
            VerdictStatus::Counterexample => "COUNTEREXAMPLE",
        }),
    );
    out.insert("n".into(), Value::from(v.n));
    out.insert("m".into(), Value::from(v.m));
    out.insert(
        "premises".into(),
        Value::from(
            v.premises
                .iter()
                .map(|p| json!({ "name": p.name, "held": p.held }))
                .collect::<Vec<_>>(),
        ),
    );
    if let Some(subset) = &v.subset_witness {
        out.insert("subset".into(), one_based(subset));
    }
    if let Some((lhs, rhs)) = v.inequality {
        out.insert("inequality".into(), json!({ "lhs": lhs, "rhs": rhs }));
    }
    Value::Object(out)
}

/// Wire token for a search or verify target.
pub fn target_token(target: SearchTarget) -> &'static str {
    match target {
        SearchTarget::Subset => "conj13",
        SearchTarget::TwoDim => "thm32",
        SearchTarget::RankModeCount => "thm41",
        SearchTarget::RankSpanSum => "conj52",
    }
}

/// Inverse of [`target_token`].
pub fn parse_target(token: &str) -> Option<SearchTarget> {
    match token {
        "conj13" => Some(SearchTarget::Subset),
        "thm32" => Some(SearchTarget::TwoDim),
        "thm41" => Some(SearchTarget::RankModeCount),
        "conj52" => Some(SearchTarget::RankSpanSum),
        _ => None,
    }
}

pub fn search_report_to_value(r: &SearchReport, space: &SearchSpace) -> Value {
    json!({
        "target": target_token(r.target),
        "space": {
            "field": field_to_value(space.field()),
            "dims_template": space.dims_template(),
            "m_range": [space.m_range().0, space.m_range().1],
            "n_range": [space.n_range().0, space.n_range().1],
            "orbit_reduction": space.symmetry().fix_first_vector_orbit,
        },
        "scanned": r.scanned,
        "holds": r.holds,
        "not_applicable": r.not_applicable,
        "counterexamples": r.counterexamples.iter().map(|(s, v)| json!({
            "instance": set_to_value(s),
            "verdict": verdict_to_value(v),
        })).collect::<Vec<_>>(),
    })
}

pub fn pairing_to_value(p: &PairingOutcome) -> Value {
    match p {
        PairingOutcome::Pairing(sigma) => json!({
            "kind": "pairing",
            "sigma": one_based(sigma),
        }),
        PairingOutcome::Obstruction(partition) => json!({
            "kind": "obstruction",
            "blocks": partition.blocks().iter().map(|b| one_based(b)).collect::<Vec<_>>(),
        }),
    }
}

/// Error document for the command line: `{"error": …}` plus a `location`
/// when the failure points into an input file.
pub fn error_to_value(e: &Error) -> Value {
    match e {
        Error::Parse { location, message } => json!({
            "error": message,
            "location": location,
        }),
        other => json!({ "error": other.to_string() }),
    }
}
