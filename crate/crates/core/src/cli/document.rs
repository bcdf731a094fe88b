//! Problem documents: the on-disk JSON schema and its typed form.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::algebra::{format_rational, CoeffRing, Dilation, QuotientRing, Rational, Residue};
use crate::codec::{decode_blocks, decode_matrix, decode_rational, encode_blocks, encode_matrix, ScalarCodec};
use crate::diffmod::PureModule;
use crate::moduli::{FilteredPresentation, GradedSpec, UnipotentGauge};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub q: String,
    pub coeff_ring: RingSpec,
    pub graded: Vec<GradedEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RingSpec {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "quotient")]
    Quotient { modulus: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedEntry {
    pub rank: usize,
    pub slope: i64,
    #[serde(rename = "A0")]
    pub a0: Value,
}

impl RingSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("ring spec: {}", e)))
    }

    pub fn to_ring(&self) -> Result<CoeffRing, CliError> {
        match self {
            RingSpec::Rationals => Ok(CoeffRing::Rationals),
            RingSpec::Quotient { modulus } => {
                let coeffs = modulus
                    .iter()
                    .map(|s| decode_rational(&Value::String(s.clone())))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::parse(format!("modulus: {}", e)))?;
                let ring = QuotientRing::new(coeffs).map_err(CliError::invalid)?;
                Ok(CoeffRing::Quotient(Arc::new(ring)))
            }
        }
    }

    pub fn from_ring(ring: &CoeffRing) -> Self {
        match ring {
            CoeffRing::Rationals => RingSpec::Rationals,
            CoeffRing::Quotient(r) => RingSpec::Quotient {
                modulus: r.modulus().iter().map(format_rational).collect(),
            },
        }
    }
}

/// A validated document over the constants `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<C> {
    pub spec: Arc<GradedSpec<C>>,
    pub blocks: Option<FilteredPresentation<C>>,
    pub gauge: Option<UnipotentGauge<C>>,
    pub verified: Option<bool>,
}

impl<C: ScalarCodec> Loaded<C> {
    pub fn from_document(doc: &ProblemDocument, ring: CoeffRing) -> Result<Self, CliError> {
        let q = decode_rational(&Value::String(doc.q.clone())).map_err(|e| CliError::parse(format!("q: {}", e)))?;
        let dilation = Dilation::new(q).map_err(CliError::invalid)?;
        let mut blocks = Vec::with_capacity(doc.graded.len());
        for (idx, entry) in doc.graded.iter().enumerate() {
            let a0 = decode_matrix::<C>(&entry.a0, &ring)
                .map_err(|e| CliError::parse(format!("graded[{}].A0: {}", idx, e)))?;
            if a0.shape() != (entry.rank, entry.rank) {
                return Err(CliError::parse(format!(
                    "graded[{}].A0 must be {}x{}, got {}x{}",
                    idx,
                    entry.rank,
                    entry.rank,
                    a0.rows(),
                    a0.cols()
                )));
            }
            let p = PureModule::new(dilation.clone(), ring.clone(), entry.slope, a0).map_err(CliError::invalid)?;
            blocks.push(p);
        }
        let spec = Arc::new(GradedSpec::new(dilation, ring.clone(), blocks).map_err(CliError::invalid)?);
        let blocks = match &doc.blocks {
            Some(v) => {
                let map = decode_blocks::<C>(v, &ring).map_err(|e| CliError::parse(format!("blocks: {}", e)))?;
                Some(FilteredPresentation::new(spec.clone(), map).map_err(CliError::invalid)?)
            }
            None => None,
        };
        let gauge = match &doc.gauge {
            Some(v) => Some(decode_gauge(&spec, v)?),
            None => None,
        };
        Ok(Self {
            spec,
            blocks,
            gauge,
            verified: doc.verified,
        })
    }

    pub fn to_document(&self) -> ProblemDocument {
        ProblemDocument {
            q: format_rational(self.spec.dilation().q()),
            coeff_ring: RingSpec::from_ring(self.spec.ring()),
            graded: self
                .spec
                .blocks()
                .iter()
                .map(|b| GradedEntry {
                    rank: b.rank(),
                    slope: b.slope(),
                    a0: encode_matrix(b.leading()),
                })
                .collect(),
            blocks: self.blocks.as_ref().map(|p| encode_blocks(p.blocks())),
            gauge: self.gauge.as_ref().map(|g| encode_blocks(g.blocks())),
            verified: self.verified,
        }
    }

    /// The presentation, zero blocks when the document has none.
    pub fn presentation(&self) -> FilteredPresentation<C> {
        self.blocks
            .clone()
            .unwrap_or_else(|| FilteredPresentation::split(self.spec.clone()))
    }

    pub fn with(&self, blocks: Option<FilteredPresentation<C>>, gauge: Option<UnipotentGauge<C>>) -> Self {
        Self {
            spec: self.spec.clone(),
            blocks,
            gauge,
            verified: None,
        }
    }
}

pub fn decode_gauge<C: ScalarCodec>(spec: &Arc<GradedSpec<C>>, v: &Value) -> Result<UnipotentGauge<C>, CliError> {
    let map = decode_blocks::<C>(v, spec.ring()).map_err(|e| CliError::parse(format!("gauge: {}", e)))?;
    UnipotentGauge::new(spec.clone(), map).map_err(CliError::invalid)
}

/// A loaded document, tagged by its kind of constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Rational(Loaded<Rational>),
    Residue(Loaded<Residue>),
}

impl Problem {
    pub fn from_document(doc: &ProblemDocument) -> Result<Self, CliError> {
        let ring = doc.coeff_ring.to_ring()?;
        Ok(match ring {
            CoeffRing::Rationals => Problem::Rational(Loaded::from_document(doc, ring)?),
            CoeffRing::Quotient(_) => Problem::Residue(Loaded::from_document(doc, ring)?),
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::from_document(&parse_document(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_file(path)?)
    }

    pub fn to_document(&self) -> ProblemDocument {
        match self {
            Problem::Rational(l) => l.to_document(),
            Problem::Residue(l) => l.to_document(),
        }
    }
}

pub fn parse_document(text: &str) -> Result<ProblemDocument, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::parse(e.to_string()))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {}", path.display(), e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc(v: Value) -> Result<Problem, CliError> {
        Problem::parse(&v.to_string())
    }

    #[test]
    fn parses_and_round_trips() {
        let v = json!({
            "q": "2",
            "coeff_ring": {"kind": "Q"},
            "graded": [
                {"rank": 1, "slope": 0, "A0": [["1"]]},
                {"rank": 1, "slope": 2, "A0": [["3/2"]]}
            ],
            "blocks": {"1,2": [[{"3": "1", "-1": "2"}]]}
        });
        let p = doc(v).unwrap();
        let again = Problem::from_document(&p.to_document()).unwrap();
        assert_eq!(p, again);
        let text = serde_json::to_string(&p.to_document()).unwrap();
        assert!(text.contains(r#"{"-1":"2","3":"1"}"#), "{}", text);
    }

    #[test]
    fn quotient_documents() {
        let v = json!({
            "q": "-1/3",
            "coeff_ring": {"kind": "quotient", "modulus": ["-4", "0", "2"]},
            "graded": [
                {"rank": 1, "slope": -1, "A0": [[["1", "1"]]]},
                {"rank": 1, "slope": 1, "A0": [["2"]]}
            ],
            "gauge": {"1,2": [[{"0": ["0", "1"]}]]}
        });
        let p = doc(v).unwrap();
        let Problem::Residue(l) = &p else { panic!() };
        assert!(l.gauge.is_some());
        assert_eq!(
            p.to_document().coeff_ring,
            RingSpec::Quotient { modulus: vec!["-2".into(), "0".into(), "1".into()] }
        );
        assert_eq!(Problem::from_document(&p.to_document()).unwrap(), p);
    }

    #[test]
    fn rejects_bad_documents() {
        let base = |graded: Value| {
            json!({"q": "2", "coeff_ring": {"kind": "Q"}, "graded": graded})
        };
        let err = doc(base(json!([{"rank": 1, "slope": 2, "A0": [["1"]]}, {"rank": 1, "slope": 2, "A0": [["1"]]}])));
        assert_eq!(err.unwrap_err().code, "module");
        let err = doc(base(json!([{"rank": 2, "slope": 0, "A0": [["1", "1"], ["1", "1"]]}])));
        assert_eq!(err.unwrap_err().code, "not-invertible");
        let err = doc(base(json!([{"rank": 2, "slope": 0, "A0": [["1"]]}])));
        assert_eq!(err.unwrap_err().code, "parse");
        let err = doc(json!({"q": "1", "coeff_ring": {"kind": "Q"}, "graded": []}));
        assert_eq!(err.unwrap_err().code, "dilation");
        let err = doc(json!({"q": "2", "coeff_ring": {"kind": "Q"}, "graded": [], "extra": 1}));
        assert_eq!(err.unwrap_err().code, "parse");
        let err = doc(json!({"q": "2", "coeff_ring": {"kind": "quotient", "modulus": ["3"]}, "graded": []}));
        assert_eq!(err.unwrap_err().code, "coeff-ring");
    }
}
