use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thetalift::examples;
use thetalift::field::{FieldElement, FieldSpec};
use thetalift::qmat;
use thetalift::specfun::EvalPolicy;
use thetalift::theta::SiegelPoint;
use thetalift::whittaker::*;

fn q() -> Arc<FieldSpec> {
    Arc::new(FieldSpec::rationals())
}

fn q3(a: i64, b: i64) -> FieldElement {
    FieldElement(vec![qmat::rat(a), qmat::rat(b)])
}

fn shifted(tau: &SiegelPoint, j: usize, du: f64, dv: f64) -> SiegelPoint {
    let mut t = tau.tau().to_vec();
    t[j] += Complex64::new(du, dv);
    SiegelPoint::new(t).unwrap()
}

/// Cases (field, weight, index) used across the checks.
fn cases() -> Vec<(Arc<FieldSpec>, WeightVector, FieldElement)> {
    let f1 = q();
    let f2 = examples::sqrt3_field();
    vec![
        (f1.clone(), WeightVector::from_twice(vec![0]).unwrap(), f1.from_int(1)),
        (f1.clone(), WeightVector::from_twice(vec![1]).unwrap(), FieldElement(vec![qmat::ratio(3, 4)])),
        (f1.clone(), WeightVector::from_twice(vec![-1]).unwrap(), f1.from_int(2)),
        (f2.clone(), WeightVector::from_twice(vec![0, 4]).unwrap(), q3(2, 1)),
        (f2.clone(), WeightVector::from_twice(vec![-1, 5]).unwrap(), q3(3, 1)),
    ]
}

#[test]
fn harmonic_value_two_ways() {
    let p = EvalPolicy::default();
    let mut count = 0;
    for (f, w, m) in cases() {
        for i in 0..20 {
            let d = f.degree();
            let v1 = 0.05 + 0.15 * i as f64;
            let mut u = vec![0.3; d];
            u[0] = -0.2 + 0.03 * i as f64;
            let mut v = vec![0.8; d];
            v[0] = v1;
            let tau = SiegelPoint::from_parts(&u, &v).unwrap();
            let a = eval_f(&f, &w, &m, &tau, w.s0(), &p).unwrap();
            let b = eval_f_harmonic(&f, &w, &m, &tau, &p).unwrap();
            assert!((a - b).norm() <= 1e-10 * b.norm(), "{:?} {m} v1={v1}: {a} vs {b}", w.k());
            count += 1;
        }
    }
    assert_eq!(count, 100);
}

/// v_1^{k_1−2} conj(−2i v_1² ∂f/∂τ̄_1) by central differences. The
/// holomorphic factor e(−m_1τ_1) is divided out first (∂/∂τ̄ commutes with
/// multiplication by a holomorphic function), which removes the fast
/// oscillation from the differenced function.
fn delta_numeric(f: &FieldSpec, w: &WeightVector, m: &FieldElement, tau: &SiegelPoint) -> Complex64 {
    let p = EvalPolicy::default();
    let h = 1e-5;
    let m1 = f.embed(m)[0];
    let hol = |t: Complex64| (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * m1 * t).exp();
    let e = |du: f64, dv: f64| {
        let pt = shifted(tau, 0, du, dv);
        eval_f(f, w, m, &pt, w.s0(), &p).unwrap() * hol(pt.tau()[0])
    };
    let du = (e(h, 0.0) - e(-h, 0.0)) / (2.0 * h);
    let dv = (e(0.0, h) - e(0.0, -h)) / (2.0 * h);
    let dbar = (du + Complex64::i() * dv) * 0.5 / hol(tau.tau()[0]);
    let v1 = tau.v()[0];
    let lowered = Complex64::new(0.0, -2.0) * v1 * v1 * dbar;
    lowered.conj() * v1.powf(w.k()[0] - 2.0)
}

#[test]
fn delta_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let cs = cases();
        let (f, w, m) = &cs[i % cs.len()];
        let d = f.degree();
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(0.3..1.5)).collect();
        // keep 4πm_1v_1 in [0.2, 4], where the τ̄-dependence is not
        // exponentially small against the value
        let m1 = f.embed(m)[0];
        v[0] = rng.gen_range(0.2..4.0) / (4.0 * std::f64::consts::PI * m1);
        let tau = SiegelPoint::from_parts(&u, &v).unwrap();
        let closed = delta_k_closed(f, w, m, &tau).unwrap();
        let num = delta_numeric(f, w, m, &tau);
        assert!((closed - num).norm() <= 1e-6 * closed.norm(), "{:?}: {closed} vs {num}", w.k());
    }
}

#[test]
fn delta_is_holomorphic_and_decays() {
    for (f, w, m) in cases() {
        let d = f.degree();
        let tau = SiegelPoint::from_parts(&vec![0.1; d], &vec![0.9; d]).unwrap();
        let h = 1e-5;
        let g = |du: f64, dv: f64| delta_k_closed(&f, &w, &m, &shifted(&tau, 0, du, dv)).unwrap();
        let du = (g(h, 0.0) - g(-h, 0.0)) / (2.0 * h);
        let dv = (g(0.0, h) - g(0.0, -h)) / (2.0 * h);
        let cr = (du + Complex64::i() * dv) * 0.5;
        assert!(cr.norm() <= 1e-6 * du.norm());
        // log-linear decay along v ↦ v + t·1
        let mut last = f64::INFINITY;
        let mut slopes = Vec::new();
        for t in 0..6 {
            let pt = SiegelPoint::from_parts(&vec![0.1; d], &vec![0.9 + t as f64; d]).unwrap();
            let val = delta_k_closed(&f, &w, &m, &pt).unwrap().norm().ln();
            if last.is_finite() {
                slopes.push(val - last);
            }
            last = val;
        }
        assert!(slopes.iter().all(|s| *s < 0.0));
        assert!(slopes.windows(2).all(|p| (p[0] - p[1]).abs() < 1e-9));
    }
}

#[test]
fn harmonic_and_antiholomorphic() {
    let p = EvalPolicy::default();
    for (f, w, m) in cases() {
        let d = f.degree();
        let k1 = w.k()[0];
        let tau = SiegelPoint::from_parts(&vec![0.2; d], &vec![0.7; d]).unwrap();
        let e = |j: usize, du: f64, dv: f64| eval_f(&f, &w, &m, &shifted(&tau, j, du, dv), w.s0(), &p).unwrap();
        let h = 1e-4;
        let f0 = e(0, 0.0, 0.0);
        let fuu = (e(0, h, 0.0) - f0 * 2.0 + e(0, -h, 0.0)) / (h * h);
        let fvv = (e(0, 0.0, h) - f0 * 2.0 + e(0, 0.0, -h)) / (h * h);
        let fu = (e(0, h, 0.0) - e(0, -h, 0.0)) / (2.0 * h);
        let fv = (e(0, 0.0, h) - e(0, 0.0, -h)) / (2.0 * h);
        let v1 = tau.v()[0];
        let lap = -(fuu + fvv) * v1 * v1 + Complex64::i() * k1 * v1 * (fu + Complex64::i() * fv);
        let scale = (fuu.norm() + fvv.norm()) * v1 * v1;
        assert!(lap.norm() <= 1e-4 * scale, "{:?}: Δf = {lap} against {scale}", w.k());
        for j in 1..d {
            let h = 1e-5;
            let du = (e(j, h, 0.0) - e(j, -h, 0.0)) / (2.0 * h);
            let dv = (e(j, 0.0, h) - e(j, 0.0, -h)) / (2.0 * h);
            let dtau = (du - Complex64::i() * dv) * 0.5;
            assert!(dtau.norm() <= 1e-6 * du.norm());
        }
    }
}

#[test]
fn translation_phase() {
    let p = EvalPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (f, w, m) in cases() {
        let d = f.degree();
        let tau = SiegelPoint::from_parts(&vec![0.13; d], &vec![0.6; d]).unwrap();
        let base = eval_f(&f, &w, &m, &tau, w.s0() + 0.7, &p).unwrap();
        for _ in 0..20 {
            let b = FieldElement((0..d).map(|_| qmat::rat(rng.gen_range(-5..=5))).collect());
            let bj = f.embed(&b);
            let moved: Vec<Complex64> = tau.tau().iter().zip(&bj).map(|(t, x)| t + x).collect();
            let val = eval_f(&f, &w, &m, &SiegelPoint::new(moved).unwrap(), w.s0() + 0.7, &p).unwrap();
            let tr = thetalift::qmat::to_f64(&f.trace(&f.mul(&m, &b)));
            let expect = base * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * tr);
            assert!((val - expect).norm() <= 1e-12 * base.norm().max(1e-300));
        }
    }
}

#[test]
fn growth_along_v1() {
    // |f| / (e^{2πm_1v_1} e^{−2π Σ_{i≥2} m_i v_i}) stays bounded as v_1 grows
    let p = EvalPolicy::default();
    for (f, w, m) in cases() {
        let d = f.degree();
        let mj = f.embed(&m);
        let mut ratios = Vec::new();
        for t in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let mut v = vec![0.7; d];
            v[0] = t;
            let tau = SiegelPoint::from_parts(&vec![0.0; d], &v).unwrap();
            let val = eval_f(&f, &w, &m, &tau, w.s0() + 0.5, &p).unwrap().norm();
            let rest: f64 = (1..d).map(|i| mj[i] * v[i]).sum();
            ratios.push(val / (2.0 * std::f64::consts::PI * (mj[0] * t - rest)).exp());
        }
        let last = ratios[ratios.len() - 1];
        assert!(ratios.iter().all(|r| r.is_finite() && *r < 2.0 * ratios[0].max(last)));
    }
}

#[test]
fn pairing_identities() {
    let f = q();
    let disc = DiscriminantForm::unimodular(f.clone(), 4);
    let k = WeightVector::for_lift(2, 1);
    let m0 = f.from_int(3);
    let g = CuspFormData::new(
        &disc,
        k.dual(),
        vec![(m0.clone(), 0, Complex64::new(1.0, 0.0)), (f.from_int(5), 0, Complex64::new(-2.0, 0.5))],
    )
    .unwrap();
    let single = WhittakerForm::new(
        disc.clone(),
        k.clone(),
        vec![WhittakerTerm { m: m0.clone(), mu: 0, c: Complex64::new(1.0, 0.0) }],
    )
    .unwrap();
    assert_eq!(pairing(&g, &single).unwrap(), Complex64::new(1.0, 0.0));
    let zero = WhittakerForm::zero(disc.clone(), k.clone()).unwrap();
    assert_eq!(pairing(&g, &zero).unwrap(), Complex64::new(0.0, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut random_form = || {
        let terms = (1..=6)
            .map(|n| WhittakerTerm {
                m: f.from_int(n),
                mu: 0,
                c: Complex64::new(rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64),
            })
            .collect();
        WhittakerForm::new(disc.clone(), k.clone(), terms).unwrap()
    };
    let (f1, f2) = (random_form(), random_form());
    let lhs = pairing(&g, &f1.add(&f2).unwrap()).unwrap();
    assert_eq!(lhs, pairing(&g, &f1).unwrap() + pairing(&g, &f2).unwrap());

    let wrong = CuspFormData::new(&disc, k.clone(), vec![]).unwrap();
    assert!(pairing(&wrong, &single).is_err());

    let ob = weak_holomorphy_obstruction(&single.scale(Complex64::new(7.0, 0.0)), std::slice::from_ref(&g)).unwrap();
    assert_eq!(ob.pairings, vec![Complex64::new(7.0, 0.0)]);
    assert!(!ob.weakly_holomorphic);
    let ob2 = weak_holomorphy_obstruction(&single.scale(Complex64::new(14.0, 0.0)), std::slice::from_ref(&g)).unwrap();
    assert_eq!(ob2.pairings[0], ob.pairings[0] * 2.0);
}

#[test]
fn shimura_curve_certificate() {
    // Cubic field of discriminant 49, trivial discriminant form of rank 4,
    // weight (0, 2, 2): the space of dual weight (2, 2, 2) is zero.
    let f = examples::cubic_field();
    assert_eq!(f.discriminant(), &num_bigint::BigInt::from(49));
    let disc = DiscriminantForm::unimodular(f.clone(), 4);
    let k = WeightVector::for_lift(2, 3);
    assert_eq!(k.k(), vec![0.0, 2.0, 2.0]);
    // a totally positive element of the inverse different
    let delta = f
        .codifferent_basis()
        .into_iter()
        .chain([f.one()])
        .find(|x| f.is_totally_positive(x).unwrap())
        .unwrap_or_else(|| f.one());
    let form = WhittakerForm::new(
        disc,
        k,
        vec![WhittakerTerm { m: delta, mu: 0, c: Complex64::new(1.0, 0.0) }],
    )
    .unwrap();
    let ob = weak_holomorphy_obstruction(&form, &[]).unwrap();
    assert!(ob.pairings.is_empty());
    assert!(ob.weakly_holomorphic);
}

#[test]
fn eisenstein_sums() {
    let f = q();
    let l = examples::split_rank3().unwrap();
    let dg = l.discriminant_group().unwrap();
    let disc = DiscriminantForm::from_group(&dg);
    let k = WeightVector::for_lift(1, 1);
    let m1 = FieldElement(vec![qmat::ratio(3, 4)]);
    let m2 = f.from_int(1);
    assert!(disc.check_index(&m1, 1).is_ok());
    assert!(disc.check_index(&m1, 0).is_err());
    let form = WhittakerForm::new(
        disc.clone(),
        k.clone(),
        vec![
            WhittakerTerm { m: m1.clone(), mu: 1, c: Complex64::new(3.0, 0.0) },
            WhittakerTerm { m: m2.clone(), mu: 0, c: Complex64::new(-2.0, 0.0) },
        ],
    )
    .unwrap();
    let single = WhittakerForm::new(disc.clone(), k.clone(), vec![form.terms()[0].clone()]).unwrap();
    let e = EisensteinData::new(vec![(m1.clone(), 1, -0.5), (m2.clone(), 0, -1.25)]);
    assert_eq!(b_of_f(&single, &e).unwrap(), -1.5);
    assert_eq!(b_of_f(&WhittakerForm::zero(disc.clone(), k.clone()).unwrap(), &e).unwrap(), 0.0);
    let a = vec![(m1.clone(), 1, 1.0), (m2.clone(), 0, 2.5)];
    let from_a = EisensteinData::from_residues(&a);
    assert_eq!(a_of_f(&form, &a).unwrap(), -2.0 * b_of_f(&form, &from_a).unwrap());
    let partial = EisensteinData::new(vec![(m1, 1, -0.5)]);
    assert!(b_of_f(&form, &partial).is_err());
}
