//! JSON instance files and solution output.
//!
//! ```json
//! { "m": 1, "n": 2, "W": [[1, 2]], "c": ["1/1", "1"],
//!   "lower": [0, "-inf"], "upper": [10, "+inf"],
//!   "objective": { "type": "equality_indicator", "target": [4] } }
//! ```
//!
//! Objective types and their fields:
//! - `equality_indicator`: `target` (integers)
//! - `quadratic_distance`: `target` (rationals)
//! - `separable_convex_pwl`: `pieces`, one `{breakpoints, slopes, value_at_zero}` per row
//! - `knapsack_penalty`: `penalty`, either `{kind: "quadratic", a, b, c}` or
//!   `{kind: "pwl", breakpoints, slopes, value_at_zero}`
//!
//! Application shorthands replace the body with `"application"` and the
//! builder's arguments:
//! - `knapsack`: `profit`, `weight`, `upper`, `penalty`
//! - `equality_ilp`: `A`, `b`, `c`, `lower`, `upper`
//! - `compressed_sensing`: `W`, `b`, optional relaxed point `z`
//!
//! Any document may carry a relaxed point `z` for the unknown-W solver.
//! Rationals are strings `"p/q"` (or `"p"`, or a JSON integer).

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::applications::{build_compressed_sensing, build_equality_ilp, build_knapsack};
use crate::error::{Error, Result};
use crate::model::{ConvexPwl, Instance, ObjValue, Objective, Penalty, Solution};
use crate::numeric::{parse_rat, rat_to_string, IntMat, Rat};

/// A parsed input file.
#[derive(Clone, Debug)]
pub struct Document {
    pub instance: Instance,
    /// Relaxed point for the unknown-W solver, when given.
    pub relaxed: Option<Vec<Rat>>,
    /// Shorthand the document used, if any.
    pub application: Option<String>,
}

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(format!("missing field `{key}`")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(format!("`{what}` must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(format!("`{what}` must be an array")))
}

fn as_int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| err(format!("`{what}` must hold integers")))
}

fn as_rat(v: &Value, what: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s).map_err(|e| err(format!("`{what}`: {e}"))),
        Value::Number(_) => Ok(Rat::from_integer(as_int(v, what)?.into())),
        _ => Err(err(format!("`{what}` must hold rational strings"))),
    }
}

fn int_vec(v: &Value, what: &str) -> Result<Vec<i64>> {
    as_array(v, what)?.iter().map(|x| as_int(x, what)).collect()
}

fn rat_vec(v: &Value, what: &str) -> Result<Vec<Rat>> {
    as_array(v, what)?.iter().map(|x| as_rat(x, what)).collect()
}

fn bound_vec(v: &Value, what: &str, infinite: &str) -> Result<Vec<Option<i64>>> {
    as_array(v, what)?
        .iter()
        .map(|x| match x {
            Value::String(s) if s == infinite => Ok(None),
            Value::String(s) if s == "inf" && infinite == "+inf" => Ok(None),
            _ => as_int(x, what).map(Some).map_err(|_| err(format!("`{what}` entries are integers or \"{infinite}\""))),
        })
        .collect()
}

fn matrix(v: &Value, what: &str) -> Result<IntMat> {
    let rows = as_array(v, what)?
        .iter()
        .map(|r| int_vec(r, what))
        .collect::<Result<Vec<_>>>()?;
    IntMat::from_rows(rows)
}

fn pwl(v: &Value, what: &str) -> Result<ConvexPwl> {
    let o = as_object(v, what)?;
    Ok(ConvexPwl::new(
        int_vec(field(o, "breakpoints")?, "breakpoints")?,
        rat_vec(field(o, "slopes")?, "slopes")?,
        match o.get("value_at_zero") {
            Some(z) => as_rat(z, "value_at_zero")?,
            None => Rat::from_integer(0.into()),
        },
    ))
}

fn penalty(v: &Value) -> Result<Penalty> {
    let o = as_object(v, "penalty")?;
    let kind = field(o, "kind")?.as_str().unwrap_or_default();
    match kind {
        "quadratic" => {
            let get = |k: &str| match o.get(k) {
                Some(x) => as_rat(x, k),
                None => Ok(Rat::from_integer(0.into())),
            };
            Ok(Penalty::Quadratic {
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
            })
        }
        "pwl" => Ok(Penalty::Pwl(pwl(v, "penalty")?)),
        other => Err(err(format!("unknown penalty kind `{other}`"))),
    }
}

fn objective(v: &Value) -> Result<Objective> {
    let o = as_object(v, "objective")?;
    let ty = field(o, "type")?
        .as_str()
        .ok_or_else(|| err("`objective.type` must be a string"))?;
    match ty {
        "equality_indicator" => Ok(Objective::EqualityIndicator {
            target: int_vec(field(o, "target")?, "target")?,
        }),
        "quadratic_distance" => Ok(Objective::QuadraticDistance {
            target: rat_vec(field(o, "target")?, "target")?,
        }),
        "separable_convex_pwl" => Ok(Objective::SeparableConvexPwl {
            pieces: as_array(field(o, "pieces")?, "pieces")?
                .iter()
                .map(|p| pwl(p, "pieces"))
                .collect::<Result<_>>()?,
        }),
        "knapsack_penalty" => Ok(Objective::KnapsackPenalty(penalty(field(o, "penalty")?)?)),
        other => Err(err(format!("unknown objective type `{other}`"))),
    }
}

fn check_dim(o: &Map<String, Value>, key: &str, actual: usize) -> Result<()> {
    if let Some(v) = o.get(key) {
        let declared = v.as_u64().ok_or_else(|| err(format!("`{key}` must be a non-negative integer")))?;
        if declared != actual as u64 {
            return Err(Error::Invalid(vec![crate::error::Violation::new(
                key,
                None,
                format!("declared {declared} but W gives {actual}"),
            )]));
        }
    }
    Ok(())
}

fn plain_instance(o: &Map<String, Value>) -> Result<Instance> {
    let w = matrix(field(o, "W")?, "W")?;
    check_dim(o, "m", w.rows())?;
    check_dim(o, "n", w.cols())?;
    Instance::new(
        w,
        rat_vec(field(o, "c")?, "c")?,
        bound_vec(field(o, "lower")?, "lower", "-inf")?,
        bound_vec(field(o, "upper")?, "upper", "+inf")?,
        objective(field(o, "objective")?)?,
    )
}

/// Parses an instance file or application shorthand.
pub fn parse_document(text: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
    let o = as_object(&v, "document")?;
    let relaxed = o.get("z").map(|z| rat_vec(z, "z")).transpose()?;
    let application = o.get("application").and_then(Value::as_str).map(str::to_owned);
    let instance = match application.as_deref() {
        None => plain_instance(o)?,
        Some("knapsack") => build_knapsack(
            &rat_vec(field(o, "profit")?, "profit")?,
            &int_vec(field(o, "weight")?, "weight")?,
            &bound_vec(field(o, "upper")?, "upper", "+inf")?,
            penalty(field(o, "penalty")?)?,
        )?,
        Some("equality_ilp") => build_equality_ilp(
            matrix(field(o, "A")?, "A")?,
            int_vec(field(o, "b")?, "b")?,
            rat_vec(field(o, "c")?, "c")?,
            bound_vec(field(o, "lower")?, "lower", "-inf")?,
            bound_vec(field(o, "upper")?, "upper", "+inf")?,
        )?,
        Some("compressed_sensing") => {
            build_compressed_sensing(matrix(field(o, "W")?, "W")?, rat_vec(field(o, "b")?, "b")?)?.1
        }
        Some(other) => return Err(err(format!("unknown application `{other}`"))),
    };
    Ok(Document {
        instance,
        relaxed,
        application,
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_document(text).map(|d| d.instance)
}

fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_to_string(r))).collect())
}

fn pwl_json(p: &ConvexPwl) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("breakpoints".into(), json!(p.breakpoints));
    o.insert("slopes".into(), rats(&p.slopes));
    o.insert("value_at_zero".into(), json!(rat_to_string(&p.value_at_zero)));
    o
}

/// Instance in the plain file format. External objectives have no file
/// representation.
pub fn instance_to_json(inst: &Instance) -> Result<Value> {
    let objective = match &inst.objective {
        Objective::EqualityIndicator { target } => json!({"type": "equality_indicator", "target": target}),
        Objective::QuadraticDistance { target } => json!({"type": "quadratic_distance", "target": rats(target)}),
        Objective::SeparableConvexPwl { pieces } => json!({
            "type": "separable_convex_pwl",
            "pieces": pieces.iter().map(|p| Value::Object(pwl_json(p))).collect::<Vec<_>>(),
        }),
        Objective::KnapsackPenalty(Penalty::Quadratic { a, b, c }) => json!({
            "type": "knapsack_penalty",
            "penalty": {"kind": "quadratic", "a": rat_to_string(a), "b": rat_to_string(b), "c": rat_to_string(c)},
        }),
        Objective::KnapsackPenalty(Penalty::Pwl(p)) => {
            let mut o = pwl_json(p);
            o.insert("kind".into(), json!("pwl"));
            json!({"type": "knapsack_penalty", "penalty": o})
        }
        Objective::External(_) => return Err(err("external objectives cannot be serialized")),
    };
    let bounds = |b: &[Option<i64>], inf: &str| -> Vec<Value> {
        b.iter().map(|x| x.map_or_else(|| json!(inf), |v| json!(v))).collect()
    };
    Ok(json!({
        "m": inst.m(),
        "n": inst.n(),
        "W": inst.w.to_rows(),
        "c": rats(&inst.c),
        "lower": bounds(&inst.lower, "-inf"),
        "upper": bounds(&inst.upper, "+inf"),
        "objective": objective,
    }))
}

/// The CLI's `solve` output, fields in output order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub status: String,
    pub x: Option<Vec<i64>>,
    pub value: String,
    pub guesses_explored: u64,
    pub oracle_calls: u64,
    pub radius_used: u64,
}

impl SolveOutput {
    pub fn new(solution: &Solution, guesses_explored: u64, oracle_calls: u64, radius_used: u64) -> Self {
        Self {
            status: solution.status.as_str().to_owned(),
            x: solution.x.clone(),
            value: solution.value.to_string(),
            guesses_explored,
            oracle_calls,
            radius_used,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| err(format!("invalid solution JSON: {e}")))
    }

    pub fn objective_value(&self) -> Result<ObjValue> {
        if self.value == "+inf" {
            Ok(ObjValue::Infinite)
        } else {
            parse_rat(&self.value).map(ObjValue::Finite)
        }
    }
}
