//! Command bodies. Each returns the JSON result and the exit code.

use std::path::Path;

use serde_json::{json, Map, Value};

use super::document::{decode_gauge, read_file, Loaded, Problem, RingSpec};
use super::CliError;
use crate::algebra::{CoeffRing, Rational, Residue};
use crate::basechange::{check_ext_basechange, check_hom_basechange, CheckReport, Extend, RingMorphism};
use crate::codec::{encode_blocks, encode_matrix_k, ScalarCodec};
use crate::diffmod::{default_hom_window, hom_space};
use crate::ext::ExtClass;
use crate::moduli::{act, equivalent, normal_form, verify_gauge};

/// Result of a command: the JSON value and the process exit code.
pub struct Outcome {
    pub value: Value,
    pub exit: i32,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Self { value, exit: 0 }
    }

    /// Exit code 3 when `passed` is false.
    fn check(value: Value, passed: bool) -> Self {
        Self {
            value,
            exit: if passed { 0 } else { 3 },
        }
    }
}

macro_rules! with_problem {
    ($p:expr, $l:ident => $body:expr) => {
        match $p {
            Problem::Rational($l) => $body,
            Problem::Residue($l) => $body,
        }
    };
}

macro_rules! with_pair {
    ($a:expr, $b:expr, $x:ident, $y:ident => $body:expr) => {
        match ($a, $b) {
            (Problem::Rational($x), Problem::Rational($y)) => $body,
            (Problem::Residue($x), Problem::Residue($y)) => $body,
            _ => Err(CliError::math(crate::Error::SpecMismatch(
                "documents use different kinds of coefficient ring".into(),
            ))),
        }
    };
}

fn same_spec<C: ScalarCodec>(a: &Loaded<C>, b: &Loaded<C>) -> Result<(), CliError> {
    if a.spec != b.spec {
        return Err(CliError::math(crate::Error::SpecMismatch(
            "documents have different graded parts".into(),
        )));
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn dim(p: &Problem) -> Result<Outcome, CliError> {
    with_problem!(p, l => {
        let spec = &l.spec;
        let pairs: Vec<Value> = spec
            .pairs()
            .map(|(i, j)| json!({"i": i + 1, "j": j + 1, "delta": spec.delta(i, j)}))
            .collect();
        Ok(Outcome::ok(json!({"dimension": spec.dimension(), "pairs": pairs})))
    })
}

pub fn normalize(p: &Problem) -> Result<Outcome, CliError> {
    with_problem!(p, l => {
        let nf = normal_form(&l.presentation());
        if !nf.verify() {
            return Err(CliError::verification("normal-form certificate failed to re-verify"));
        }
        let mut out = l.with(Some(nf.presentation), Some(nf.gauge));
        out.verified = Some(true);
        Ok(Outcome::ok(to_value(&out.to_document())))
    })
}

/// Re-checks a `normalize` output against its source.
pub fn verify_normal_form(source: &Problem, cert: &Problem) -> Result<Outcome, CliError> {
    with_pair!(source, cert, s, c => {
        same_spec(s, c)?;
        let gauge = c.gauge.as_ref().ok_or_else(|| CliError::parse("certificate has no gauge"))?;
        let target = c.presentation();
        let ok = target.is_window_supported() && verify_gauge(gauge, &s.presentation(), &target);
        Ok(Outcome::check(json!({"verified": ok}), ok))
    })
}

pub fn equiv(a: &Problem, b: &Problem) -> Result<Outcome, CliError> {
    with_pair!(a, b, x, y => {
        same_spec(x, y)?;
        let verdict = equivalent(&x.presentation(), &y.presentation()).map_err(CliError::math)?;
        let mut out = Map::new();
        out.insert("equivalent".into(), Value::Bool(verdict.is_some()));
        if let Some(w) = verdict {
            out.insert("witness".into(), encode_blocks(w.blocks()));
        }
        Ok(Outcome::ok(Value::Object(out)))
    })
}

fn class_json<C: ScalarCodec>(class: &ExtClass<C>) -> Value {
    let pair = class.pair();
    let (lo, hi) = pair.window();
    json!({
        "delta": pair.delta(),
        "window": [lo, hi],
        "rep": encode_matrix_k(class.rep()),
        "reduced": encode_matrix_k(class.reduced()),
        "certificate": encode_matrix_k(class.certificate()),
        "coordinates": class.coordinates().iter().map(ScalarCodec::encode).collect::<Vec<_>>(),
        "split": class.is_split(),
        "verified": class.verify(),
    })
}

fn two_blocks<C: ScalarCodec>(l: &Loaded<C>) -> Result<(), CliError> {
    if l.spec.k() != 2 {
        return Err(CliError::math(crate::Error::SpecMismatch(format!(
            "extension classes need exactly two graded blocks, got {}",
            l.spec.k()
        ))));
    }
    Ok(())
}

fn class_of<C: ScalarCodec>(l: &Loaded<C>) -> Result<ExtClass<C>, CliError> {
    two_blocks(l)?;
    l.spec.pair(0, 1).reduce(l.presentation().block(0, 1)).map_err(CliError::math)
}

pub fn ext(p: &Problem) -> Result<Outcome, CliError> {
    with_problem!(p, l => {
        two_blocks(l)?;
        let pair = l.spec.pair(0, 1);
        let (lo, hi) = pair.window();
        let mut out = Map::new();
        out.insert("delta".into(), json!(pair.delta()));
        out.insert("window".into(), json!([lo, hi]));
        out.insert(
            "basis".into(),
            Value::Array(pair.ext_basis().iter().map(encode_matrix_k).collect()),
        );
        if l.blocks.is_some() {
            let class = class_of(l)?;
            let Value::Object(c) = class_json(&class) else { unreachable!() };
            for key in ["reduced", "certificate", "coordinates", "split", "verified"] {
                out.insert(key.into(), c[key].clone());
            }
        }
        Ok(Outcome::ok(Value::Object(out)))
    })
}

pub fn hom(a: &Problem, b: Option<&Problem>, window: Option<(i64, i64)>) -> Result<Outcome, CliError> {
    let b = b.unwrap_or(a);
    with_pair!(a, b, m, n => {
        let window = match window {
            Some(w) => w,
            None if m.spec.k() == 1 && n.spec.k() == 1 => default_hom_window(m.spec.block(0), n.spec.block(0)),
            None => {
                return Err(CliError::usage(
                    "--window is required unless both documents have a single graded block",
                ))
            }
        };
        let space = hom_space(&m.presentation().assemble(), &n.presentation().assemble(), window)
            .map_err(CliError::math)?;
        Ok(Outcome::ok(json!({
            "window": [window.0, window.1],
            "basis": space.basis.iter().map(encode_matrix_k).collect::<Vec<_>>(),
            "rational_dim": space.rational_dim,
            "free": space.free,
        })))
    })
}

pub fn act_cmd(p: &Problem) -> Result<Outcome, CliError> {
    with_problem!(p, l => {
        let gauge = l.gauge.as_ref().ok_or_else(|| CliError::parse("act needs a \"gauge\" in the document"))?;
        let moved = act(gauge, &l.presentation()).map_err(CliError::math)?;
        let out = l.with(Some(moved), Some(gauge.clone()));
        Ok(Outcome::ok(to_value(&out.to_document())))
    })
}

pub fn sum(a: &Problem, b: &Problem) -> Result<Outcome, CliError> {
    with_pair!(a, b, x, y => {
        let (cx, cy) = (class_of(x)?, class_of(y)?);
        let total = cx.add(&cy).map_err(CliError::math)?;
        Ok(Outcome::ok(class_json(&total)))
    })
}

fn scalar_value(text: &str) -> Result<Value, CliError> {
    if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("scalar: {}", e)))
    } else {
        Ok(Value::String(text.to_string()))
    }
}

pub fn scale(lambda: &str, p: &Problem) -> Result<Outcome, CliError> {
    let v = scalar_value(lambda)?;
    with_problem!(p, l => {
        let c = ScalarCodec::decode(&v, l.spec.ring()).map_err(|e| CliError::parse(format!("scalar: {}", e)))?;
        let class = class_of(l)?;
        Ok(Outcome::ok(class_json(&class.scale(&c))))
    })
}

const BASECHANGE_SEED: u64 = 0x5eed;
const BASECHANGE_SAMPLES: usize = 12;

fn basechange_report<S: ScalarCodec, T: ScalarCodec>(
    l: &Loaded<S>,
    phi: &RingMorphism<S, T>,
) -> Result<CheckReport, crate::Error> {
    let mut report = CheckReport::default();
    let spec = &l.spec;
    for (i, j) in spec.pairs() {
        let r = check_ext_basechange(phi, &spec.pair(i, j), BASECHANGE_SAMPLES, BASECHANGE_SEED)?;
        for mut c in r.checks {
            c.name = format!("ext {},{}: {}", i + 1, j + 1, c.name);
            report.checks.push(c);
        }
    }
    for i in 0..spec.k() {
        let b = spec.block(i);
        let window = default_hom_window(b, b);
        let m = b.as_diffmodule();
        let r = check_hom_basechange(phi, &m, &m, window)?;
        for mut c in r.checks {
            c.name = format!("hom {},{}: {}", i + 1, i + 1, c.name);
            report.checks.push(c);
        }
    }
    if let Some(p) = &l.blocks {
        let before = normal_form(p).presentation.extend(phi)?;
        let after = normal_form(&p.extend(phi)?).presentation;
        report.checks.push(crate::basechange::Check {
            name: "normal form commutes".into(),
            passed: before == after,
            detail: String::new(),
        });
    }
    Ok(report)
}

pub fn basechange(p: &Problem, ring: &str, image: Option<&str>) -> Result<Outcome, CliError> {
    let target_spec = RingSpec::parse(ring)?;
    let target = target_spec.to_ring()?;
    let image = image.map(scalar_value).transpose()?;
    let report = match (p, &target) {
        (Problem::Rational(l), CoeffRing::Rationals) => {
            no_image(&image)?;
            basechange_report(l, &RingMorphism::<Rational, Rational>::identity(CoeffRing::Rationals))
        }
        (Problem::Rational(l), CoeffRing::Quotient(_)) => {
            no_image(&image)?;
            basechange_report(l, &RingMorphism::<Rational, Residue>::structural(target.clone()))
        }
        (Problem::Residue(l), CoeffRing::Rationals) => {
            let tau = decode_image::<Rational>(&image, &target)?;
            let phi = RingMorphism::new(l.spec.ring().clone(), target.clone(), Some(tau)).map_err(CliError::math)?;
            basechange_report(l, &phi)
        }
        (Problem::Residue(l), CoeffRing::Quotient(_)) => {
            let tau = decode_image::<Residue>(&image, &target)?;
            let phi = RingMorphism::new(l.spec.ring().clone(), target.clone(), Some(tau)).map_err(CliError::math)?;
            basechange_report(l, &phi)
        }
    }
    .map_err(CliError::math)?;
    let source = with_problem!(p, l => RingSpec::from_ring(l.spec.ring()));
    let passed = report.all_passed();
    Ok(Outcome::check(
        json!({
            "source": to_value(&source),
            "target": to_value(&RingSpec::from_ring(&target)),
            "all_passed": passed,
            "checks": to_value(&report.checks),
        }),
        passed,
    ))
}

fn no_image(image: &Option<Value>) -> Result<(), CliError> {
    if image.is_some() {
        return Err(CliError::usage("--image only applies to documents over a quotient ring"));
    }
    Ok(())
}

fn decode_image<T: ScalarCodec>(image: &Option<Value>, target: &CoeffRing) -> Result<T, CliError> {
    let v = image
        .as_ref()
        .ok_or_else(|| CliError::usage("a quotient source ring needs --image (the image of t)"))?;
    T::decode(v, target).map_err(|e| CliError::parse(format!("image: {}", e)))
}

/// `verify SOURCE CERT [TARGET]`: `CERT` is a document carrying a `gauge`
/// (output of `normalize` or `act`) or an `equiv` verdict with a `witness`.
/// The gauge must take the presentation in `SOURCE` to the one in `TARGET`,
/// or to the blocks of `CERT` itself when `TARGET` is omitted.
pub fn verify(source: &Problem, cert_path: &Path, target: Option<&Problem>) -> Result<Outcome, CliError> {
    let text = read_file(cert_path)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::parse(e.to_string()))?;
    let is_verdict = raw.as_object().is_some_and(|o| o.contains_key("equivalent"));
    if is_verdict {
        let witness = raw
            .get("witness")
            .ok_or_else(|| CliError::parse("the verdict carries no witness"))?;
        let target = target.ok_or_else(|| CliError::usage("verifying an equivalence witness needs TARGET"))?;
        return with_pair!(source, target, s, t => {
            same_spec(s, t)?;
            let gauge = decode_gauge(&s.spec, witness)?;
            let ok = verify_gauge(&gauge, &s.presentation(), &t.presentation());
            Ok(Outcome::check(json!({"verified": ok}), ok))
        });
    }
    let cert = Problem::parse(&text)?;
    let target = target.unwrap_or(&cert);
    match (source, &cert, target) {
        (Problem::Rational(s), Problem::Rational(c), Problem::Rational(t)) => check_certificate(s, c, t),
        (Problem::Residue(s), Problem::Residue(c), Problem::Residue(t)) => check_certificate(s, c, t),
        _ => Err(CliError::math(crate::Error::SpecMismatch(
            "documents use different kinds of coefficient ring".into(),
        ))),
    }
}

fn check_certificate<C: ScalarCodec>(s: &Loaded<C>, c: &Loaded<C>, t: &Loaded<C>) -> Result<Outcome, CliError> {
    same_spec(s, c)?;
    same_spec(s, t)?;
    let gauge = c.gauge.as_ref().ok_or_else(|| CliError::parse("certificate has no gauge"))?;
    let ok = verify_gauge(gauge, &s.presentation(), &t.presentation());
    Ok(Outcome::check(json!({"verified": ok}), ok))
}
