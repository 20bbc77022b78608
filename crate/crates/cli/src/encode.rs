//! JSON encodings: polynomials as ascending coefficient arrays (bare
//! integers when e = 1, arrays of e residues otherwise), matrices as nested
//! row-major arrays, reports as {claim, params, computed, bound, verdict}
//! objects. The encodings are bit-exact across platforms; round-tripping a
//! dumped matrix reproduces the in-memory object.

use drinfeld_core::algebra::matrix::PolyMatrix;
use drinfeld_core::algebra::poly::Poly;
use drinfeld_core::slopes::{Report, SlopeTable};
use drinfeld_core::{FieldElem, FieldSpec};
use serde_json::{json, Value};

pub fn poly_to_json(p: &Poly, f: &FieldSpec) -> Value {
    let coeffs: Vec<Value> = p.coeffs().iter().map(|c| elem_to_json(c, f)).collect();
    Value::Array(coeffs)
}

fn elem_to_json(c: &FieldElem, f: &FieldSpec) -> Value {
    if f.e() == 1 {
        json!(c.coord(0))
    } else {
        Value::Array((0..f.e()).map(|i| json!(c.coord(i))).collect())
    }
}

/// An outer-variable polynomial as an array of coefficient polynomials.
pub fn xpoly_to_json(p: &drinfeld_core::algebra::xpoly::XPoly, f: &FieldSpec) -> Value {
    Value::Array(p.coeffs().iter().map(|c| poly_to_json(c, f)).collect())
}

pub fn matrix_to_json(m: &PolyMatrix, f: &FieldSpec) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| poly_to_json(m.at(i, j), f))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn poly_from_json(v: &Value, f: &FieldSpec) -> Option<Poly> {
    let arr = v.as_array()?;
    let mut coeffs = Vec::with_capacity(arr.len());
    for c in arr {
        coeffs.push(elem_from_json(c, f)?);
    }
    Some(Poly::from_coeffs(coeffs))
}

#[cfg_attr(not(test), allow(dead_code))]
fn elem_from_json(v: &Value, f: &FieldSpec) -> Option<FieldElem> {
    if f.e() == 1 {
        let n = v.as_i64()?;
        Some(f.from_int(n))
    } else {
        let arr = v.as_array()?;
        let coords: Option<Vec<u16>> = arr.iter().map(|x| x.as_u64().map(|u| u as u16)).collect();
        Some(f.from_coords(&coords?))
    }
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn matrix_from_json(v: &Value, f: &FieldSpec) -> Option<PolyMatrix> {
    let rows = v.as_array()?;
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.as_array().map(|a| a.len()))??;
    let mut m = PolyMatrix::zero(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array()?;
        if row.len() != ncols {
            return None;
        }
        for (j, entry) in row.iter().enumerate() {
            *m.at_mut(i, j) = poly_from_json(entry, f)?;
        }
    }
    Some(m)
}

pub fn report_to_json(report: &Report) -> Value {
    let params: serde_json::Map<String, Value> = report
        .params
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    let items: Vec<Value> = report
        .items
        .iter()
        .map(|i| {
            json!({
                "claim": i.claim,
                "computed": i.computed,
                "bound": i.bound,
                "verdict": if i.pass { "PASS" } else { "FAIL" },
            })
        })
        .collect();
    json!({
        "name": report.name,
        "params": Value::Object(params),
        "items": items,
        "verdict": if report.pass() { "PASS" } else { "FAIL" },
    })
}

pub fn slope_table_to_json(t: &SlopeTable) -> Value {
    let entries: Vec<Value> = t
        .entries
        .iter()
        .map(|(a, m)| json!({"slope_num": a.num(), "slope_den": a.den(), "mult": m}))
        .collect();
    let mut obj = serde_json::Map::new();
    obj.insert("k".into(), json!(t.k));
    if let Some(chi) = t.chi {
        obj.insert("chi".into(), json!(chi));
    }
    obj.insert("entries".into(), Value::Array(entries));
    if t.complete {
        obj.insert("deficiency".into(), json!(t.deficiency));
    } else if let Some(b) = t.bound {
        obj.insert("below".into(), json!(format!("{}", b)));
    }
    Value::Object(obj)
}

/// CSV rows (k, chi, slope_num, slope_den, mult).
pub fn slope_table_to_csv(t: &SlopeTable, out: &mut String) {
    let chi = t
        .chi
        .map(|c| c.to_string())
        .unwrap_or_else(|| "-".to_string());
    for (a, m) in &t.entries {
        out.push_str(&format!("{},{},{},{},{}\n", t.k, chi, a.num(), a.den(), m));
    }
}
