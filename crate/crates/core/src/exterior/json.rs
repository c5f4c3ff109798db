//! Form literals: `{"degree": p, "terms": [{"indices": [i₁,…,i_p], "coeff": c}]}`.
//!
//! Indices are one-based and strictly increasing. `coeff` is a JSON number or a
//! string such as `"-3/4"`, which parses exactly.

use serde_json::{json, Value};

use super::{mask, Form};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn form_to_json<S: Scalar>(a: &Form<S>) -> Value {
    let terms: Vec<Value> = a
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| json!({"indices": mask::to_one_based(m), "coeff": c.to_json()}))
        .collect();
    json!({"degree": a.degree(), "terms": terms})
}

pub fn form_from_json<S: Scalar>(v: &Value) -> Result<Form<S>> {
    let bad = |s: &str| Error::Invalid(format!("form literal: {s}"));
    let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing degree"))?;
    if degree > 7 {
        return Err(bad("degree above 7"));
    }
    let degree = degree as usize;
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
    let mut out = Form::zero(degree);
    for t in terms {
        let idx: Vec<usize> = t
            .get("indices")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing indices"))?
            .iter()
            .map(|x| x.as_u64().map(|u| u as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| bad("indices must be integers"))?;
        if idx.len() != degree || idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadIndex(idx));
        }
        let (m, _) = mask::from_indices(&idx).ok_or_else(|| Error::BadIndex(idx.clone()))?;
        let c = t
            .get("coeff")
            .and_then(S::from_json)
            .ok_or_else(|| bad("coeff must be a number or \"n/d\" string"))?;
        out = out + Form::from_terms(degree, [(m, c)]);
    }
    Ok(out)
}
