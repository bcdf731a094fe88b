//! JSON encoding of scalars, Laurent polynomials and matrices.
//!
//! Rationals are strings `"n"` or `"n/d"`. A residue is the array of its
//! coordinates in `1, t, t², …` with trailing zeros dropped (`["0"]` for
//! zero); a bare rational string is also accepted as a constant. A Laurent
//! polynomial is an object from degree strings to coefficients, keys in
//! increasing numeric order, zero terms omitted. Matrices are arrays of rows.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::algebra::{format_rational, parse_rational, CoeffRing, Coeff, LaurentPoly, Matrix, MatrixK, Rational, Residue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct DecodeError(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, DecodeError> {
    Err(DecodeError(msg.into()))
}

pub fn encode_rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn decode_rational(v: &Value) -> Result<Rational, DecodeError> {
    match v {
        Value::String(s) => match parse_rational(s) {
            Some(r) => Ok(r),
            None => fail(format!("not a rational: {:?}", s)),
        },
        other => fail(format!("expected a rational string, got {}", other)),
    }
}

pub trait ScalarCodec: Coeff {
    fn encode(&self) -> Value;

    fn decode(v: &Value, ring: &CoeffRing) -> Result<Self, DecodeError>;
}

impl ScalarCodec for Rational {
    fn encode(&self) -> Value {
        encode_rational(self)
    }

    fn decode(v: &Value, _ring: &CoeffRing) -> Result<Self, DecodeError> {
        decode_rational(v)
    }
}

impl ScalarCodec for Residue {
    fn encode(&self) -> Value {
        if self.coeffs().is_empty() {
            return Value::Array(vec![Value::String("0".into())]);
        }
        Value::Array(self.coeffs().iter().map(encode_rational).collect())
    }

    fn decode(v: &Value, ring: &CoeffRing) -> Result<Self, DecodeError> {
        let CoeffRing::Quotient(r) = ring else {
            return fail("residue scalars need a quotient coefficient ring");
        };
        let coords = match v {
            Value::String(_) => vec![decode_rational(v)?],
            Value::Array(items) if !items.is_empty() => items.iter().map(decode_rational).collect::<Result<_, _>>()?,
            other => fail(format!("expected a rational string or a non-empty array, got {}", other))?,
        };
        if coords.len() > r.degree() {
            return fail(format!(
                "a scalar of {} has at most {} coordinates, got {}",
                r,
                r.degree(),
                coords.len()
            ));
        }
        Ok(Residue::new(r, coords))
    }
}

pub fn encode_poly<C: ScalarCodec>(p: &LaurentPoly<C>) -> Value {
    let mut m = Map::new();
    for (d, c) in p.terms() {
        m.insert(d.to_string(), c.encode());
    }
    Value::Object(m)
}

pub fn decode_poly<C: ScalarCodec>(v: &Value, ring: &CoeffRing) -> Result<LaurentPoly<C>, DecodeError> {
    let Value::Object(m) = v else {
        return fail(format!("expected a Laurent polynomial object, got {}", v));
    };
    let mut terms = BTreeMap::new();
    for (k, c) in m {
        let d: i64 = match k.parse() {
            Ok(d) if k.trim() == k => d,
            _ => return fail(format!("degree key {:?} is not an integer", k)),
        };
        if terms.insert(d, C::decode(c, ring)?).is_some() {
            return fail(format!("degree {} appears twice", d));
        }
    }
    Ok(LaurentPoly::from_terms(terms))
}

fn encode_rows<T>(m: &Matrix<T>, f: impl Fn(&T) -> Value) -> Value
where
    T: crate::algebra::Ring,
{
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| f(m.get(i, j))).collect()))
            .collect(),
    )
}

fn decode_rows<T: crate::algebra::Ring>(
    v: &Value,
    f: impl Fn(&Value) -> Result<T, DecodeError>,
) -> Result<Matrix<T>, DecodeError> {
    let Value::Array(rows) = v else {
        return fail(format!("expected a matrix (array of rows), got {}", v));
    };
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let Value::Array(cells) = row else {
            return fail(format!("expected a matrix row, got {}", row));
        };
        out.push(cells.iter().map(&f).collect::<Result<Vec<_>, _>>()?);
    }
    if out.is_empty() || out[0].is_empty() {
        return fail("matrices must be non-empty");
    }
    Matrix::from_rows(out).map_err(|e| DecodeError(e.to_string()))
}

pub fn encode_matrix<C: ScalarCodec>(m: &Matrix<C>) -> Value {
    encode_rows(m, C::encode)
}

pub fn decode_matrix<C: ScalarCodec>(v: &Value, ring: &CoeffRing) -> Result<Matrix<C>, DecodeError> {
    decode_rows(v, |c| C::decode(c, ring))
}

pub fn encode_matrix_k<C: ScalarCodec>(m: &MatrixK<C>) -> Value {
    encode_rows(m, encode_poly)
}

pub fn decode_matrix_k<C: ScalarCodec>(v: &Value, ring: &CoeffRing) -> Result<MatrixK<C>, DecodeError> {
    decode_rows(v, |p| decode_poly(p, ring))
}

/// `"i,j"` (1-based) to a 0-based index pair.
pub fn decode_block_key(k: &str) -> Result<(usize, usize), DecodeError> {
    let parsed = k.split_once(',').and_then(|(i, j)| {
        let i: usize = i.parse().ok()?;
        let j: usize = j.parse().ok()?;
        (i >= 1 && j >= 1).then(|| (i - 1, j - 1))
    });
    match parsed {
        Some(p) => Ok(p),
        None => fail(format!("block key {:?} is not of the form \"i,j\" with i, j ≥ 1", k)),
    }
}

pub fn encode_block_key((i, j): (usize, usize)) -> String {
    format!("{},{}", i + 1, j + 1)
}

/// Block maps are emitted in lexicographic index order.
pub fn encode_blocks<C: ScalarCodec>(blocks: &BTreeMap<(usize, usize), MatrixK<C>>) -> Value {
    let mut m = Map::new();
    for (&k, b) in blocks {
        m.insert(encode_block_key(k), encode_matrix_k(b));
    }
    Value::Object(m)
}

pub fn decode_blocks<C: ScalarCodec>(
    v: &Value,
    ring: &CoeffRing,
) -> Result<BTreeMap<(usize, usize), MatrixK<C>>, DecodeError> {
    let Value::Object(m) = v else {
        return fail(format!("expected a block map, got {}", v));
    };
    let mut out = BTreeMap::new();
    for (k, b) in m {
        let key = decode_block_key(k)?;
        let mat = decode_matrix_k(b, ring).map_err(|e| DecodeError(format!("block {}: {}", k, e)))?;
        if out.insert(key, mat).is_some() {
            return fail(format!("block {} appears twice", k));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat, QuotientRing};
    use serde_json::json;
    use std::sync::Arc;

    #[test]
    fn polynomials() {
        let p: LaurentPoly<Rational> = LaurentPoly::from_terms([(-2, rat(1, 2)), (10, int(3)), (1, int(-1))]);
        let v = encode_poly(&p);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"-2":"1/2","1":"-1","10":"3"}"#);
        assert_eq!(decode_poly::<Rational>(&v, &CoeffRing::Rationals).unwrap(), p);
        assert!(decode_poly::<Rational>(&json!({"x": "1"}), &CoeffRing::Rationals).is_err());
        assert!(decode_poly::<Rational>(&json!({"1": 1}), &CoeffRing::Rationals).is_err());
        assert!(decode_poly::<Rational>(&json!({"1": "1/0"}), &CoeffRing::Rationals).is_err());
        let zero = decode_poly::<Rational>(&json!({"3": "0"}), &CoeffRing::Rationals).unwrap();
        assert!(zero.is_empty());
    }

    #[test]
    fn residues() {
        let r = Arc::new(QuotientRing::new(vec![int(0), int(0), int(1)]).unwrap());
        let ring = CoeffRing::Quotient(r.clone());
        let x = Residue::new(&r, vec![int(2), rat(1, 3)]);
        assert_eq!(x.encode(), json!(["2", "1/3"]));
        assert_eq!(Residue::decode(&x.encode(), &ring).unwrap(), x);
        assert_eq!(Residue::decode(&json!("5"), &ring).unwrap(), Residue::new(&r, vec![int(5)]));
        assert_eq!(Residue::new(&r, vec![]).encode(), json!(["0"]));
        assert!(Residue::decode(&json!(["1", "2", "3"]), &ring).is_err());
        assert!(Residue::decode(&json!("1"), &CoeffRing::Rationals).is_err());
    }

    #[test]
    fn matrices_and_blocks() {
        let v = json!([[{"0": "1"}, {}], [{}, {"2": "1"}]]);
        let m: MatrixK<Rational> = decode_matrix_k(&v, &CoeffRing::Rationals).unwrap();
        assert_eq!(encode_matrix_k(&m), v);
        assert!(decode_matrix_k::<Rational>(&json!([[{}], [{}, {}]]), &CoeffRing::Rationals).is_err());
        assert!(decode_matrix_k::<Rational>(&json!([]), &CoeffRing::Rationals).is_err());
        assert_eq!(decode_block_key("2,3").unwrap(), (1, 2));
        assert!(decode_block_key("0,1").is_err());
        assert!(decode_block_key("12").is_err());
        let mut blocks = BTreeMap::new();
        blocks.insert((0, 9), m.clone());
        blocks.insert((0, 1), m);
        let keys: Vec<String> = match encode_blocks(&blocks) {
            Value::Object(o) => o.keys().cloned().collect(),
            _ => unreachable!(),
        };
        assert_eq!(keys, ["1,2", "1,10"]);
    }
}
