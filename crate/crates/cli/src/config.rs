//! JSON run configuration. Every accessor reports failures with the JSON
//! pointer of the offending value.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde_json::Value;
use thetalift::domain::{DomainPoint, IsotropicFrame};
use thetalift::examples;
use thetalift::field::{FieldElement, FieldSpec};
use thetalift::green::GreenParams;
use thetalift::lattice::{OFLattice, QuadraticSpace};
use thetalift::qmat::{self, QMat, Rat};
use thetalift::specfun::EvalPolicy;
use thetalift::theta::SiegelPoint;
use thetalift::weilrep::{GeneratorWord, Letter};

use crate::error::CliError;

pub type Result<T> = std::result::Result<T, CliError>;

/// A value together with its JSON pointer.
#[derive(Clone)]
pub struct Node<'a> {
    pub value: &'a Value,
    path: String,
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

impl<'a> Node<'a> {
    pub fn root(value: &'a Value) -> Self {
        Node { value, path: String::new() }
    }

    pub fn pointer(&self) -> &str {
        if self.path.is_empty() {
            "/"
        } else {
            &self.path
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Config {
            pointer: self.pointer().to_string(),
            message: msg.into(),
        }
    }

    pub fn opt(&self, key: &str) -> Option<Node<'a>> {
        self.value.get(key).filter(|v| !v.is_null()).map(|value| Node {
            value,
            path: format!("{}/{}", self.path, escape(key)),
        })
    }

    pub fn get(&self, key: &str) -> Result<Node<'a>> {
        self.opt(key).ok_or_else(|| self.err(format!("missing key \"{key}\"")))
    }

    pub fn items(&self) -> Result<Vec<Node<'a>>> {
        let arr = self.value.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, value)| Node {
                value,
                path: format!("{}/{i}", self.path),
            })
            .collect())
    }

    pub fn f64(&self) -> Result<f64> {
        let x = self.value.as_f64().ok_or_else(|| self.err("expected a number"))?;
        if !x.is_finite() {
            return Err(self.err("expected a finite number"));
        }
        Ok(x)
    }

    pub fn usize(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    pub fn i64(&self) -> Result<i64> {
        self.value.as_i64().ok_or_else(|| self.err("expected an integer"))
    }

    pub fn bool(&self) -> Result<bool> {
        self.value.as_bool().ok_or_else(|| self.err("expected true or false"))
    }

    pub fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    pub fn f64s(&self) -> Result<Vec<f64>> {
        self.items()?.iter().map(|n| n.f64()).collect()
    }

    /// A rational given as a string "p/q" (or an integer literal).
    pub fn rat(&self) -> Result<Rat> {
        match self.value {
            Value::String(s) => {
                qmat::parse_rat(s).ok_or_else(|| self.err(format!("\"{s}\" is not a rational \"p/q\"")))
            }
            Value::Number(n) if n.is_i64() => Ok(qmat::rat(n.as_i64().unwrap())),
            _ => Err(self.err("expected a rational as a string \"p/q\"")),
        }
    }

    pub fn bigint(&self) -> Result<BigInt> {
        let q = self.rat()?;
        if !q.is_integer() {
            return Err(self.err("expected an integer"));
        }
        Ok(q.to_integer())
    }

    /// A field element: a rational "p/q" or a list of coordinates in the
    /// integral basis.
    pub fn element(&self, field: &FieldSpec) -> Result<FieldElement> {
        if self.value.is_array() {
            let coords: Vec<Rat> = self.items()?.iter().map(|n| n.rat()).collect::<Result<_>>()?;
            if coords.len() != field.degree() {
                return Err(self.err(format!(
                    "expected {} integral-basis coordinates, got {}",
                    field.degree(),
                    coords.len()
                )));
            }
            Ok(FieldElement(coords))
        } else {
            Ok(field.from_rational(&self.rat()?))
        }
    }

    pub fn complex(&self) -> Result<Complex64> {
        let v = self.f64s()?;
        match v.as_slice() {
            [re, im] => Ok(Complex64::new(*re, *im)),
            _ => Err(self.err("expected a complex number [re, im]")),
        }
    }

    pub fn complexes(&self) -> Result<Vec<Complex64>> {
        self.items()?.iter().map(|n| n.complex()).collect()
    }

    pub fn rat_matrix(&self) -> Result<QMat> {
        self.items()?
            .iter()
            .map(|row| row.items()?.iter().map(|n| n.rat()).collect())
            .collect()
    }

    /// Attach a library error to this location.
    pub fn lib<T>(&self, r: thetalift::error::Result<T>) -> Result<T> {
        r.map_err(|e| {
            if e.is_numerical() {
                CliError::Numeric(e)
            } else {
                self.err(e.to_string())
            }
        })
    }
}

/// Parsed configuration with the pieces every subcommand needs.
pub struct RunConfig {
    pub raw: Value,
    pub policy: EvalPolicy,
}

impl RunConfig {
    pub fn parse(text: &str, tol: Option<f64>) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Config {
            pointer: "/".into(),
            message: format!("invalid JSON: {e}"),
        })?;
        if !raw.is_object() {
            return Err(CliError::Config {
                pointer: "/".into(),
                message: "the configuration must be a JSON object".into(),
            });
        }
        let mut policy = EvalPolicy::default();
        let root = Node::root(&raw);
        if let Some(p) = root.opt("policy") {
            if let Some(x) = p.opt("rel_tol") {
                policy.rel_tol = x.f64()?;
            }
            if let Some(x) = p.opt("max_terms") {
                policy.max_terms = x.usize()?;
            }
            if let Some(x) = p.opt("near_one_threshold") {
                policy.near_one_threshold = x.f64()?;
            }
            if let Some(x) = p.opt("max_points") {
                policy.max_points = x.f64()?;
            }
        }
        if let Some(t) = tol {
            policy.rel_tol = t;
        }
        let node = root.opt("policy").unwrap_or_else(|| root.clone());
        node.lib(policy.validate())?;
        Ok(RunConfig { raw, policy })
    }

    pub fn root(&self) -> Node<'_> {
        Node::root(&self.raw)
    }

    pub fn block(&self, key: &str) -> Result<Node<'_>> {
        self.root().get(key)
    }

    /// The field: from the lattice example if one is named, otherwise the
    /// `field` block (rationals by default).
    pub fn field(&self) -> Result<Arc<FieldSpec>> {
        if let Some(l) = self.root().opt("lattice") {
            if let Some(ex) = l.opt("example") {
                return Ok(self.example_lattice(ex)?.field().clone());
            }
        }
        match self.root().opt("field") {
            None => Ok(Arc::new(FieldSpec::rationals())),
            Some(f) => parse_field(f),
        }
    }

    fn example_lattice(&self, ex: Node<'_>) -> Result<OFLattice> {
        let name = ex.str()?;
        let r = match name {
            "split_rank3" => examples::split_rank3(),
            "sqrt3_l0" => examples::sqrt3_l0(),
            "sqrt3_l1" => examples::sqrt3_l1(),
            _ => match name.strip_prefix("sqrt3_lattice:").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) => examples::sqrt3_lattice(k),
                None => {
                    return Err(ex.err(format!(
                        "unknown example \"{name}\" (split_rank3, sqrt3_l0, sqrt3_l1, sqrt3_lattice:K)"
                    )))
                }
            },
        };
        ex.lib(r)
    }

    pub fn lattice(&self) -> Result<OFLattice> {
        let l = self.block("lattice")?;
        if let Some(ex) = l.opt("example") {
            return self.example_lattice(ex);
        }
        let field = self.field()?;
        let gram_node = l.get("gram")?;
        let gram: Vec<Vec<FieldElement>> = gram_node
            .items()?
            .iter()
            .map(|row| row.items()?.iter().map(|n| n.element(&field)).collect())
            .collect::<Result<_>>()?;
        let admissible = match l.opt("admissible") {
            Some(a) => a.bool()?,
            None => false,
        };
        let space = Arc::new(gram_node.lib(QuadraticSpace::new(field, gram, admissible))?);
        match l.opt("basis") {
            None => Ok(OFLattice::standard(space)),
            Some(b) => {
                let basis = b.rat_matrix()?;
                b.lib(OFLattice::new(space, basis))
            }
        }
    }

    pub fn tau(&self) -> Result<SiegelPoint> {
        let n = self.block("points")?.get("tau")?;
        n.lib(SiegelPoint::new(n.complexes()?))
    }

    /// All `points.z` entries (a single point or a list), or `None` when the
    /// block has no `z`.
    pub fn z(&self, frame: &Arc<IsotropicFrame>) -> Result<Option<DomainPoint>> {
        match self.root().opt("points").and_then(|p| p.opt("z")) {
            None => Ok(None),
            Some(n) => parse_point(n, frame).map(Some),
        }
    }

    pub fn green_params(&self, node: Node<'_>) -> Result<GreenParams> {
        let s = node.get("s")?.f64()?;
        let r = node.get("truncation_radius")?.f64()?;
        let mut p = GreenParams::new(s, r);
        if let Some(x) = node.opt("singular_threshold") {
            p.singular_threshold = x.f64()?;
        }
        if let Some(x) = node.opt("pole_steps") {
            p.pole_steps = x.f64s()?;
        }
        if let Some(x) = node.opt("fit_tolerance") {
            p.fit_tolerance = x.f64()?;
        }
        Ok(p)
    }
}

pub fn parse_field(f: Node<'_>) -> Result<Arc<FieldSpec>> {
    if let Some(name) = f.opt("name") {
        return match name.str()? {
            "rationals" => Ok(Arc::new(FieldSpec::rationals())),
            "sqrt3" => Ok(examples::sqrt3_field()),
            "cubic49" => Ok(examples::cubic_field()),
            other => Err(name.err(format!("unknown field \"{other}\" (rationals, sqrt3, cubic49)"))),
        };
    }
    let poly_node = f.get("polynomial")?;
    let poly: Vec<BigInt> = poly_node.items()?.iter().map(|n| n.bigint()).collect::<Result<_>>()?;
    let d = poly.len().saturating_sub(1);
    let basis = match f.opt("integral_basis") {
        Some(b) => b.rat_matrix()?,
        None => qmat::identity(d),
    };
    let sigma1 = match f.opt("sigma1_root_index") {
        Some(n) => n.usize()?,
        None => d.saturating_sub(1),
    };
    let digits = match f.opt("precision_digits") {
        Some(n) => n.usize()? as u32,
        None => 50,
    };
    Ok(Arc::new(poly_node.lib(FieldSpec::new(&poly, &basis, sigma1, digits))?))
}

/// A point of the domain: V₀-coordinates `[[re, im], ...]`, a reference-ray
/// point `{"ray": {"x": [...], "t": T}}`, or the point with negative plane
/// `{"plane": {"x": [...], "y": [...]}}`. The object forms accept an
/// `"offset"` added to the V₀-coordinates.
pub fn parse_point(n: Node<'_>, frame: &Arc<IsotropicFrame>) -> Result<DomainPoint> {
    let base = parse_base_point(n.clone(), frame)?;
    match n.opt("offset") {
        None => Ok(base),
        Some(o) => {
            let off = o.complexes()?;
            if off.len() != base.z().len() {
                return Err(o.err(format!("expected {} coordinates", base.z().len())));
            }
            let z = base.z().iter().zip(&off).map(|(a, b)| a + b).collect();
            o.lib(DomainPoint::new(frame.clone(), z))
        }
    }
}

fn parse_base_point(n: Node<'_>, frame: &Arc<IsotropicFrame>) -> Result<DomainPoint> {
    if n.value.is_array() {
        return n.lib(DomainPoint::new(frame.clone(), n.complexes()?));
    }
    if let Some(ray) = n.opt("ray") {
        let x = ray.get("x")?.f64s()?;
        let t = ray.get("t")?.f64()?;
        return ray.lib(DomainPoint::on_reference_ray(frame.clone(), &x, t));
    }
    if let Some(plane) = n.opt("plane") {
        let x = plane.get("x")?.f64s()?;
        let y = plane.get("y")?.f64s()?;
        if x.len() != y.len() {
            return Err(plane.err("x and y must have the same length"));
        }
        let mut last = None;
        for sign in [1.0, -1.0] {
            let w: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| Complex64::new(*a, sign * b)).collect();
            match frame.point_from_line(&w) {
                Ok(z) => return Ok(z),
                Err(e) => last = Some(e),
            }
        }
        return plane.lib(Err(last.expect("two attempts")));
    }
    Err(n.err("expected [[re, im], ...], {\"ray\": ...} or {\"plane\": ...}"))
}

/// A generator letter: "S", "N", "Z", "T1", {"T": b} or {"M": ε}.
pub fn parse_letter(n: Node<'_>, field: &FieldSpec) -> Result<Letter> {
    if let Value::String(s) = n.value {
        return match s.as_str() {
            "S" => Ok(Letter::S),
            "N" => Ok(Letter::N),
            "Z" => Ok(Letter::Z),
            "T1" | "T" => Ok(Letter::T(field.one())),
            other => Err(n.err(format!("unknown letter \"{other}\""))),
        };
    }
    if let Some(b) = n.opt("T") {
        return Ok(Letter::T(b.element(field)?));
    }
    if let Some(e) = n.opt("M") {
        return Ok(Letter::M(e.element(field)?));
    }
    Err(n.err("expected \"S\", \"N\", \"Z\", \"T1\", {\"T\": b} or {\"M\": eps}"))
}

pub fn parse_word(n: Node<'_>, field: &FieldSpec) -> Result<GeneratorWord> {
    let letters = n.items()?.iter().map(|l| parse_letter(l.clone(), field)).collect::<Result<Vec<_>>>()?;
    let word = GeneratorWord::new(letters);
    n.lib(word.validate(field))?;
    Ok(word)
}
