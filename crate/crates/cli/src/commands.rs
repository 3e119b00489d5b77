//! One function per subcommand. Each returns the JSON result and whether the
//! checks it performs passed.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};
use thetalift::domain::{DomainPoint, IsotropicFrame};
use thetalift::examples;
use thetalift::field::{FieldElement, FieldSpec};
use thetalift::green::{GreenSum, GreenValue, RegularizedValue, SingularTerm};
use thetalift::lattice::enumerate::enumerate_majorant;
use thetalift::lattice::{DiscriminantGroup, OFLattice};
use thetalift::qmat::{self, QMat, Rat};
use thetalift::specfun;
use thetalift::theta::{siegel_theta, transform_residual, ThetaValue};
use thetalift::weilrep::{relation_report, word_matrix};
use thetalift::whittaker::{
    a_of_f, b_of_f, pairing, weak_holomorphy_obstruction, CuspFormData, DiscriminantForm, EisensteinData,
    WeightVector, WhittakerForm, WhittakerTerm,
};

use crate::config::{parse_point, parse_word, Node, Result, RunConfig};
use crate::error::CliError;

pub struct Outcome {
    pub result: Value,
    pub passed: bool,
    /// Rows for a CSV artifact, if the command produces one.
    pub table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, passed: true, table: None }
    }

    fn check(result: Value, passed: bool) -> Self {
        Outcome { result, passed, table: None }
    }
}

fn numeric<T>(r: thetalift::error::Result<T>) -> Result<T> {
    r.map_err(|e| {
        if e.is_numerical() {
            CliError::Numeric(e)
        } else {
            CliError::Config { pointer: "/".into(), message: e.to_string() }
        }
    })
}

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cs(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| c(*z)).collect())
}

fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|q| json!(q.to_string())).collect())
}

fn mat(m: &QMat) -> Value {
    Value::Array(m.iter().map(|r| rats(r)).collect())
}

fn elem(x: &FieldElement) -> Value {
    rats(&x.0)
}

fn lattice_and_group(cfg: &RunConfig) -> Result<(OFLattice, DiscriminantGroup)> {
    let l = cfg.lattice()?;
    let dg = cfg.block("lattice")?.lib(l.discriminant_group())?;
    Ok((l, dg))
}

/// The domain point of `points.z`, required when the lattice is indefinite
/// at σ₁.
fn domain_point(cfg: &RunConfig, l: &OFLattice, required: bool) -> Result<Option<DomainPoint>> {
    let indefinite = l.space().signatures()[0].1 > 0;
    if !indefinite && !required {
        return Ok(None);
    }
    let frame = Arc::new(cfg.block("lattice")?.lib(IsotropicFrame::find(l.space()))?);
    match cfg.z(&frame)? {
        Some(z) => Ok(Some(z)),
        None => Err(cfg.block("points")?.err("missing key \"z\" (the lattice is indefinite)")),
    }
}

fn frame(cfg: &RunConfig, l: &OFLattice) -> Result<Arc<IsotropicFrame>> {
    Ok(Arc::new(cfg.block("lattice")?.lib(IsotropicFrame::find(l.space()))?))
}

pub fn field_info(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.field()?;
    let d = f.degree();
    let codiff = f.codifferent_basis();
    let mut duality = true;
    for i in 0..d {
        for (j, w) in codiff.iter().enumerate() {
            let t = f.trace(&f.mul(&f.basis_element(i), w));
            duality &= t == qmat::rat(i64::from(i == j));
        }
    }
    Ok(Outcome::check(
        json!({
            "degree": d,
            "polynomial": f.polynomial().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "integral_basis": mat(f.integral_basis()),
            "discriminant": f.discriminant().to_string(),
            "roots": (0..d).map(|k| f.root(k)).collect::<Vec<_>>(),
            "trace_matrix": mat(f.trace_matrix()),
            "codifferent_basis": codiff.iter().map(elem).collect::<Vec<_>>(),
            "trace_duality_exact": duality,
        }),
        duality,
    ))
}

pub fn lattice_info(cfg: &RunConfig) -> Result<Outcome> {
    let l = cfg.lattice()?;
    let node = cfg.block("lattice")?;
    let p = node.lib(l.properties())?;
    let det = qmat::det(l.tr_gram());
    let det_abs = if det < qmat::rat(0) { -det } else { det };
    let order_matches = Rat::from_integer(p.discriminant_order.clone()) == det_abs;
    let passed = p.o_module && p.even && p.dual_pairing_ok && order_matches;
    Ok(Outcome::check(
        json!({
            "rank": l.space().rank(),
            "rank_z": p.rank_z,
            "o_module": p.o_module,
            "even": p.even,
            "dual_pairing_ok": p.dual_pairing_ok,
            "discriminant_order": p.discriminant_order.to_string(),
            "abs_det_trace_gram": det_abs.to_string(),
            "unimodular": p.discriminant_order == 1.into(),
            "signatures": p.signatures,
            "trace_signature": l.space().trace_signature(),
            "admissible": l.space().is_admissible(),
        }),
        passed,
    ))
}

pub fn lattice_dual(cfg: &RunConfig) -> Result<Outcome> {
    let l = cfg.lattice()?;
    let dual = cfg.block("lattice")?.lib(l.z_dual())?;
    let ok = l.check_dual_pairing(&dual);
    Ok(Outcome::check(
        json!({ "basis": mat(l.basis()), "dual_basis": mat(dual.basis()), "dual_pairing_ok": ok }),
        ok,
    ))
}

pub fn lattice_disc(cfg: &RunConfig) -> Result<Outcome> {
    let (_, dg) = lattice_and_group(cfg)?;
    let cosets: Vec<Value> = (0..dg.order())
        .map(|i| {
            json!({
                "index": i,
                "representative": rats(dg.rep_coords(i)),
                "q": elem(dg.q_value(i)),
                "negative": dg.neg(i),
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "order": dg.order(),
        "invariant_factors": dg.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "cosets": cosets,
    })))
}

pub fn weil_gen(cfg: &RunConfig) -> Result<Outcome> {
    let (l, dg) = lattice_and_group(cfg)?;
    let node = cfg.block("weil")?.get("word")?;
    let word = parse_word(node.clone(), l.field())?;
    let m = node.lib(word_matrix(&dg, &word))?;
    let entries: Vec<Value> = m.entries.iter().map(|r| cs(r)).collect();
    Ok(Outcome::ok(json!({
        "dim": m.dim,
        "indexing": "entries[nu][mu]",
        "entries": entries,
        "unitarity_defect": m.unitarity_defect(),
    })))
}

pub fn weil_check(cfg: &RunConfig) -> Result<Outcome> {
    let (_, dg) = lattice_and_group(cfg)?;
    let tol = match cfg.root().opt("weil").and_then(|w| w.opt("tolerance")) {
        Some(t) => t.f64()?,
        None => 1e-12,
    };
    let rep = numeric(relation_report(&dg, tol))?;
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "deviation": c.deviation, "passed": c.passed }))
        .collect();
    Ok(Outcome::check(
        json!({
            "order": rep.order,
            "tolerance": tol,
            "max_deviation": rep.max_deviation(),
            "all_passed": rep.all_passed(),
            "checks": checks,
        }),
        rep.all_passed(),
    ))
}

pub fn specfun_eval(cfg: &RunConfig) -> Result<Outcome> {
    let node = cfg.block("specfun")?;
    let name_node = node.get("function")?;
    let name = name_node.str()?;
    let p = &cfg.policy;
    let args = || -> Result<Vec<f64>> { node.get("args")?.f64s() };
    let want = |k: usize| -> Result<Vec<f64>> {
        let a = args()?;
        if a.len() != k {
            return Err(node.get("args")?.err(format!("{name} takes {k} arguments, got {}", a.len())));
        }
        Ok(a)
    };
    let svk = || -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let s = match node.opt("s") {
            Some(s) => s.f64()?,
            None => 0.0,
        };
        Ok((s, node.get("v")?.f64s()?, node.get("k")?.f64s()?))
    };
    let value = match name {
        "gamma" => specfun::gamma(want(1)?[0]),
        "digamma" => specfun::digamma(want(1)?[0]),
        "kummer_m" => {
            let a = want(3)?;
            numeric(specfun::kummer_m(a[0], a[1], a[2], p))?
        }
        "tricomi_u" => {
            let a = want(3)?;
            numeric(specfun::tricomi_u(a[0], a[1], a[2], p))?
        }
        "whittaker_m" => {
            let a = want(3)?;
            numeric(specfun::whittaker_m(a[0], a[1], a[2], p))?
        }
        "whittaker_w" => {
            let a = want(3)?;
            numeric(specfun::whittaker_w(a[0], a[1], a[2], p))?
        }
        "upper_gamma" => {
            let a = want(2)?;
            numeric(specfun::upper_gamma(a[0], a[1], p))?
        }
        "gauss_2f1" => {
            let a = want(4)?;
            numeric(specfun::gauss_2f1(a[0], a[1], a[2], a[3], p))?
        }
        "reglift_g" => {
            let a = want(2)?;
            if a[0] < 1.0 || a[0].fract() != 0.0 {
                return Err(node.get("args")?.err("n must be a positive integer"));
            }
            numeric(specfun::reglift_g(a[0] as u32, a[1]))?
        }
        "m_cal" => {
            let (s, v, k) = svk()?;
            numeric(specfun::m_cal(s, &v, &k, p))?
        }
        "w_cal" => {
            let (s, v, k) = svk()?;
            numeric(specfun::w_cal(s, &v, &k, p))?
        }
        "m_special" => {
            let (_, v, k) = svk()?;
            numeric(specfun::m_special(&v, &k, p))?
        }
        "w_special" => {
            let (_, v, k) = svk()?;
            numeric(specfun::w_special(&v, &k, p))?
        }
        other => return Err(name_node.err(format!("unknown function \"{other}\""))),
    };
    Ok(Outcome::ok(json!({ "function": name, "value": value })))
}

fn theta_json(t: &ThetaValue) -> Value {
    json!({
        "components": cs(&t.components),
        "tail_estimate": t.tail_estimate,
        "truncation_radius": t.truncation_radius,
        "points": t.points,
    })
}

pub fn theta_eval(cfg: &RunConfig) -> Result<Outcome> {
    let (l, dg) = lattice_and_group(cfg)?;
    let tau = cfg.tau()?;
    let z = domain_point(cfg, &l, false)?;
    let t = numeric(siegel_theta(&dg, z.as_ref(), &tau, &cfg.policy))?;
    Ok(Outcome::ok(theta_json(&t)))
}

pub fn theta_check(cfg: &RunConfig) -> Result<Outcome> {
    let (l, dg) = lattice_and_group(cfg)?;
    let tau = cfg.tau()?;
    let z = domain_point(cfg, &l, false)?;
    let node = cfg.block("theta")?;
    let word = parse_word(node.get("word")?, l.field())?;
    let tol = match node.opt("tolerance") {
        Some(t) => t.f64()?,
        None => 1e-7,
    };
    let chk = numeric(transform_residual(&dg, &word, z.as_ref(), &tau, &cfg.policy))?;
    Ok(Outcome::check(
        json!({
            "residual": chk.residual,
            "tolerance": tol,
            "passed": chk.residual <= tol,
            "at_point": theta_json(&chk.at_point),
            "at_image": theta_json(&chk.at_image),
            "predicted": cs(&chk.predicted),
        }),
        chk.residual <= tol,
    ))
}

fn weight(node: &Node<'_>, disc: &DiscriminantForm) -> Result<WeightVector> {
    if let Some(w) = node.opt("weight_twice") {
        let twice: Vec<i64> = w.items()?.iter().map(|n| n.i64()).collect::<Result<_>>()?;
        return w.lib(WeightVector::from_twice(twice));
    }
    if let Some(n) = node.opt("lift_n") {
        return Ok(WeightVector::for_lift(n.usize()?, disc.field().degree()));
    }
    Err(node.err("missing key \"weight_twice\" (or \"lift_n\")"))
}

fn disc_form(cfg: &RunConfig, node: &Node<'_>) -> Result<DiscriminantForm> {
    if let Some(r) = node.opt("unimodular_rank") {
        return Ok(DiscriminantForm::unimodular(cfg.field()?, r.usize()?));
    }
    let (_, dg) = lattice_and_group(cfg)?;
    Ok(DiscriminantForm::from_group(&dg))
}

fn index_list<'a>(node: Node<'a>, field: &FieldSpec, value_key: &str) -> Result<Vec<(FieldElement, usize, Node<'a>)>> {
    node.items()?
        .into_iter()
        .map(|t| Ok((t.get("m")?.element(field)?, t.get("mu")?.usize()?, t.get(value_key)?)))
        .collect()
}

fn whittaker_form(cfg: &RunConfig) -> Result<(Node<'_>, WhittakerForm)> {
    let node = cfg.block("whittaker")?;
    let disc = disc_form(cfg, &node)?;
    let k = weight(&node, &disc)?;
    let field = disc.field().clone();
    let terms_node = node.get("terms")?;
    let terms = index_list(terms_node.clone(), &field, "c")?
        .into_iter()
        .map(|(m, mu, c)| Ok(WhittakerTerm { m, mu, c: c.complex()? }))
        .collect::<Result<Vec<_>>>()?;
    let form = terms_node.lib(WhittakerForm::new(disc, k, terms))?;
    Ok((node, form))
}

fn cusp_forms(node: &Node<'_>, form: &WhittakerForm) -> Result<Vec<CuspFormData>> {
    let Some(list) = node.opt("cusp_forms") else { return Ok(Vec::new()) };
    let field = form.disc().field().clone();
    list.items()?
        .into_iter()
        .map(|g| {
            let w = weight(&g, form.disc())?;
            let coeffs = index_list(g.get("coeffs")?, &field, "b")?
                .into_iter()
                .map(|(m, mu, b)| Ok((m, mu, b.complex()?)))
                .collect::<Result<Vec<_>>>()?;
            g.lib(CuspFormData::new(form.disc(), w, coeffs))
        })
        .collect()
}

pub fn whittaker_eval(cfg: &RunConfig) -> Result<Outcome> {
    let (node, form) = whittaker_form(cfg)?;
    let tau = cfg.tau()?;
    let s = match node.opt("s") {
        Some(s) => s.f64()?,
        None => form.weight().s0(),
    };
    let value = numeric(form.eval(&tau, s, &cfg.policy))?;
    let delta = numeric(form.delta(&tau))?;
    Ok(Outcome::ok(json!({
        "s": s,
        "weight": form.weight().k(),
        "value": cs(&value),
        "delta": cs(&delta),
    })))
}

pub fn whittaker_pair(cfg: &RunConfig) -> Result<Outcome> {
    let (node, form) = whittaker_form(cfg)?;
    let basis = cusp_forms(&node, &form)?;
    let pairings = basis
        .iter()
        .map(|g| node.lib(pairing(g, &form)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(json!({ "pairings": cs(&pairings) })))
}

pub fn whittaker_obstruct(cfg: &RunConfig) -> Result<Outcome> {
    let (node, form) = whittaker_form(cfg)?;
    let basis = cusp_forms(&node, &form)?;
    let ob = node.lib(weak_holomorphy_obstruction(&form, &basis))?;
    Ok(Outcome::ok(json!({
        "pairings": cs(&ob.pairings),
        "weakly_holomorphic": ob.weakly_holomorphic,
        "empty_basis_certificate": basis.is_empty(),
        "assumption": ob.assumption,
    })))
}

pub fn whittaker_bf(cfg: &RunConfig) -> Result<Outcome> {
    let (node, form) = whittaker_form(cfg)?;
    let field = form.disc().field().clone();
    let real = |list: Node<'_>, key: &str| -> Result<Vec<(FieldElement, usize, f64)>> {
        index_list(list, &field, key)?
            .into_iter()
            .map(|(m, mu, x)| Ok((m, mu, x.f64()?)))
            .collect()
    };
    let eis = node.opt("eisenstein");
    let res = node.opt("residues");
    let residues = match &res {
        Some(r) => Some(real(r.clone(), "a")?),
        None => None,
    };
    let data = match (&eis, &residues) {
        (Some(e), _) => EisensteinData::new(real(e.clone(), "b")?),
        (None, Some(a)) => EisensteinData::from_residues(a),
        (None, None) => return Err(node.err("missing key \"eisenstein\" (or \"residues\")")),
    };
    let b = node.lib(b_of_f(&form, &data))?;
    let mut out = json!({ "b_of_f": b, "lift_weight": -b });
    let mut passed = true;
    if let Some(a) = &residues {
        let af = res.as_ref().expect("residues present").lib(a_of_f(&form, a))?;
        let consistent = af == -2.0 * b;
        passed = consistent;
        out["a_of_f"] = json!(af);
        out["a_equals_minus_two_b"] = json!(consistent);
    }
    Ok(Outcome::check(out, passed))
}

fn singular_json(s: &SingularTerm) -> Value {
    json!({
        "lambda": rats(&s.lambda),
        "w": s.w,
        "one_minus_w": s.one_minus_w,
        "q_perp": s.q_perp,
        "q_neg": s.q_neg,
        "contribution": s.contribution,
    })
}

fn green_value_json(v: &GreenValue) -> Value {
    json!({
        "value": v.value,
        "truncated_sum": v.truncated_sum,
        "tail_estimate": v.tail_estimate,
        "truncation_radius": v.truncation_radius,
        "terms": v.terms,
        "density": v.density,
        "regularization_applied": v.regularization_applied,
        "singular_terms": v.singular_terms.iter().map(singular_json).collect::<Vec<_>>(),
    })
}

fn regularized_json(r: &RegularizedValue) -> Value {
    json!({
        "regular_part": r.regular_part,
        "raw": r.raw,
        "log_terms": r.log_terms,
        "residue": r.residue,
        "singular_terms": r.singular_terms.iter().map(singular_json).collect::<Vec<_>>(),
    })
}

struct GreenSetup<'a> {
    node: Node<'a>,
    lattice: OFLattice,
    dg: DiscriminantGroup,
    mu: usize,
    m: FieldElement,
}

fn green_setup(cfg: &RunConfig) -> Result<GreenSetup<'_>> {
    let (lattice, dg) = lattice_and_group(cfg)?;
    let node = cfg.block("green")?;
    let mu = match node.opt("mu") {
        Some(n) => n.usize()?,
        None => 0,
    };
    let m = node.get("m")?.element(lattice.field())?;
    Ok(GreenSetup { node, lattice, dg, mu, m })
}

fn green_sum(cfg: &RunConfig, g: &GreenSetup<'_>, z: &DomainPoint) -> Result<GreenSum> {
    let params = cfg.green_params(g.node.clone())?;
    g.node.lib(GreenSum::new(&g.dg, g.mu, &g.m, z, &params, &cfg.policy))
}

pub fn green_eval(cfg: &RunConfig) -> Result<Outcome> {
    let g = green_setup(cfg)?;
    let z = domain_point(cfg, &g.lattice, true)?.expect("required point");
    let params = cfg.green_params(g.node.clone())?;
    let sum = green_sum(cfg, &g, &z)?;
    let value = g.node.lib(sum.at(params.s, &cfg.policy))?;
    let reg = g.node.lib(sum.regularized(&cfg.policy))?;
    Ok(Outcome::ok(json!({
        "n": sum.n(),
        "s0": sum.s0(),
        "s": params.s,
        "max_w": sum.max_w(),
        "at_s": green_value_json(&value),
        "at_s0": regularized_json(&reg),
    })))
}

pub fn green_pole(cfg: &RunConfig) -> Result<Outcome> {
    let g = green_setup(cfg)?;
    let z = domain_point(cfg, &g.lattice, true)?.expect("required point");
    let params = cfg.green_params(g.node.clone())?;
    let sum = green_sum(cfg, &g, &z)?;
    let fit = g.node.lib(sum.pole_fit(&params.pole_steps, params.fit_tolerance, &cfg.policy))?;
    let reg = g.node.lib(sum.regularized(&cfg.policy))?;
    Ok(Outcome::ok(json!({
        "s0": sum.s0(),
        "pole_steps": params.pole_steps,
        "truncation_radius": params.truncation_radius,
        "fit": { "constant": fit.constant, "residue": fit.residue, "residual": fit.residual },
        "analytic": { "constant": reg.raw, "residue": sum.residue() },
        "density": sum.density(),
    })))
}

fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn green_scan(cfg: &RunConfig) -> Result<Outcome> {
    let g = green_setup(cfg)?;
    let frame = frame(cfg, &g.lattice)?;
    let scan = cfg.block("scan")?;
    let from = parse_point(scan.get("from")?, &frame)?;
    let to = parse_point(scan.get("to")?, &frame)?;
    let steps = scan.get("steps")?.usize()?;
    if steps == 0 {
        return Err(scan.get("steps")?.err("steps must be positive"));
    }
    let params = cfg.green_params(g.node.clone())?;
    let ts: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let path = |t: f64| {
        let z: Vec<Complex64> = from.z().iter().zip(to.z()).map(|(a, b)| a + (b - a) * t).collect();
        DomainPoint::new(frame.clone(), z)
    };
    let rows = g.node.lib(thetalift::green::green_scan(&g.dg, g.mu, &g.m, path, &ts, &params, &cfg.policy))?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt(r.t),
                fmt(r.s),
                fmt(r.value),
                fmt(r.regular_part),
                fmt(r.tail_estimate),
                r.n_singular_terms.to_string(),
            ]
        })
        .collect();
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "t": r.t,
                "s": r.s,
                "value": r.value,
                "regular_part": r.regular_part,
                "tail_estimate": r.tail_estimate,
                "n_singular_terms": r.n_singular_terms,
            })
        })
        .collect();
    Ok(Outcome {
        result: json!({ "truncation_radius": params.truncation_radius, "rows": json_rows }),
        passed: true,
        table: Some((
            vec!["t", "s", "value", "regular_part", "tail_estimate", "n_singular_terms"],
            table,
        )),
    })
}

fn lattice_summary(l: &OFLattice) -> Result<Value> {
    let p = numeric(l.properties())?;
    Ok(json!({
        "even": p.even,
        "o_module": p.o_module,
        "unimodular": p.discriminant_order == 1.into(),
        "discriminant_order": p.discriminant_order.to_string(),
        "signatures": p.signatures,
        "rank_z": p.rank_z,
    }))
}

pub fn examples_sqrt3(_cfg: &RunConfig) -> Result<Outcome> {
    let l0 = numeric(examples::sqrt3_l0())?;
    let l1 = numeric(examples::sqrt3_l1())?;
    let sum = numeric(examples::sqrt3_lattice(1))?;
    let dg0 = numeric(l0.discriminant_group())?;
    let form = qmat::mat_to_f64(l0.tr_gram());
    let pts = numeric(enumerate_majorant(&dg0, 0, &form, 2.0))?;
    let roots = pts
        .iter()
        .filter(|p| l0.space().trace_q(&l0.vector(p)) == qmat::rat(1))
        .count();
    let tr_det = qmat::det(l0.tr_gram());
    let p0 = numeric(l0.properties())?;
    let ps = numeric(sum.properties())?;
    let tr_even = p0.even;
    let passed = p0.even
        && p0.discriminant_order == 1.into()
        && ps.even
        && ps.discriminant_order == 1.into()
        && ps.signatures == vec![(4, 2), (6, 0)]
        && p0.rank_z == 8
        && roots == 240;
    Ok(Outcome::check(
        json!({
            "field_discriminant": l0.field().discriminant().to_string(),
            "L0": lattice_summary(&l0)?,
            "L1": lattice_summary(&l1)?,
            "L0+L1": lattice_summary(&sum)?,
            "trace_form_L0": {
                "rank": p0.rank_z,
                "even": tr_even,
                "det": tr_det.to_string(),
                "norm_two_vectors": roots,
            },
            "passed": passed,
        }),
        passed,
    ))
}

pub fn examples_shimura_curve(_cfg: &RunConfig) -> Result<Outcome> {
    let f = examples::cubic_field();
    let disc = DiscriminantForm::unimodular(f.clone(), 4);
    let k = WeightVector::for_lift(2, 3);
    let delta = f
        .codifferent_basis()
        .into_iter()
        .chain([f.one()])
        .find(|x| f.is_totally_positive(x).unwrap_or(false))
        .unwrap_or_else(|| f.one());
    let form = numeric(WhittakerForm::new(
        disc,
        k.clone(),
        vec![WhittakerTerm { m: delta.clone(), mu: 0, c: Complex64::new(1.0, 0.0) }],
    ))?;
    let ob = numeric(weak_holomorphy_obstruction(&form, &[]))?;
    let is_49 = *f.discriminant() == 49.into();
    let passed = is_49 && ob.weakly_holomorphic;
    Ok(Outcome::check(
        json!({
            "field_polynomial": f.polynomial().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "field_discriminant": f.discriminant().to_string(),
            "weight": k.k(),
            "dual_weight": k.dual().k(),
            "principal_part": { "m": elem(&delta), "mu": 0, "c": [1.0, 0.0] },
            "cusp_form_basis": "empty: the space of dual weight is zero",
            "weakly_holomorphic": ob.weakly_holomorphic,
            "assumption": ob.assumption,
            "passed": passed,
        }),
        passed,
    ))
}
