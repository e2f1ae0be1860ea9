//! Acceptance suite: one pass/fail line per criterion, exact equality only.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wkb_cli::doc::{from_json, RecordDoc, SymbolDoc};
use wkb_cli::{parse_symbol, run, EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION};
use wkb_core::descent::{
    all_trivial, compute_lien_3cocycle, triple_defect, verify_covering, verify_w_cocycle, CoveringSpec, LienData,
    Report,
};
use wkb_core::quantize::{
    ad_automorphism, apply_automorphism, quantize_map, recognize_inner, AutomorphismRecord, SymplecticMapSpec,
};
use wkb_core::symbol::commutant_basis;
use wkb_core::{int, rat, MultiPoly, Order, Rational, Var, WkbSymbol};

const DEPTH: u32 = 6;
const FLOOR: i64 = -(DEPTH as i64);

type Check = Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng) -> Check>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_poly(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32, terms: usize) -> MultiPoly {
    let mut p = MultiPoly::zero(dim);
    for _ in 0..terms {
        let mut e = vec![0u32; 2 * dim];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            e[rng.gen_range(0..2 * dim)] += 1;
        }
        let c = Rational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=3).into());
        p = &p + &MultiPoly::monomial(dim, e, c);
    }
    p
}

/// Orders `top, top-1, .., top-len+1` with random coefficients.
fn random_symbol(rng: &mut ChaCha8Rng, dim: usize, top: i64, len: i64) -> WkbSymbol {
    let terms: Vec<_> = (0..len)
        .map(|k| (top - k, random_poly(rng, dim, 3, 3)))
        .collect();
    WkbSymbol::from_terms(dim, FLOOR, terms).unwrap()
}

fn random_graded(rng: &mut ChaCha8Rng, dim: usize, lo: i64, hi: i64, len: i64) -> WkbSymbol {
    let top = rng.gen_range(lo..=hi);
    random_symbol(rng, dim, top, len)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> WkbSymbol {
    let mut terms = vec![(0, MultiPoly::one(dim))];
    for k in 1..=3 {
        terms.push((-k, random_poly(rng, dim, 3, 2)));
    }
    WkbSymbol::from_terms(dim, FLOOR, terms).unwrap()
}

fn principal(s: &WkbSymbol) -> (Order, MultiPoly) {
    let info = s.order_and_principal();
    (info.order, info.principal)
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Check {
    for t in 0..100 {
        let dim = 1 + t % 2;
        let p = random_graded(rng, dim, -1, 1, 3);
        let q = random_graded(rng, dim, -1, 1, 3);
        let r = random_graded(rng, dim, -1, 1, 3);
        let left = p.star(&q).unwrap().star(&r).unwrap();
        let right = p.star(&q.star(&r).unwrap()).unwrap();
        ensure(left == right, || format!("associativity fails on triple {t}"))?;
        let pq = p.star(&q).unwrap();
        let (mp, sp) = principal(&p);
        let (mq, sq) = principal(&q);
        let (mpq, spq) = principal(&pq);
        if let (Order::Finite(a), Order::Finite(b)) = (mp, mq) {
            ensure(mpq == Order::Finite(a + b) && spq == &sp * &sq, || {
                format!("principal symbols not multiplicative on pair {t}")
            })?;
        }
    }
    for dim in 1..=2 {
        for i in 0..dim {
            for j in 0..dim {
                let u = WkbSymbol::u(dim, i, FLOOR);
                let x = WkbSymbol::x(dim, j, FLOOR);
                let c = u.star(&x).unwrap().try_sub(&x.star(&u).unwrap()).unwrap();
                let want = if i == j {
                    WkbSymbol::tau_power(dim, -1, FLOOR)
                } else {
                    WkbSymbol::zero(dim, FLOOR)
                };
                ensure(c == want, || format!("[u{},x{}] wrong in dim {dim}", i + 1, j + 1))?;
            }
        }
    }
    Ok("100 associative triples, canonical commutation, multiplicative principal symbols".into())
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Check {
    for t in 0..50 {
        let dim = 1 + t % 2;
        let p = random_unit(rng, dim);
        let inv = p.invert().unwrap();
        ensure(p.star(&inv).unwrap().is_one() && inv.star(&p).unwrap().is_one(), || {
            format!("inverse fails on input {t}")
        })?;
        let q = p.square_root(1).unwrap();
        ensure(q.star(&q).unwrap() == p, || format!("Q*Q != P on input {t}"))?;
        let neg = p.square_root(-1).unwrap();
        ensure(neg == -&q && neg.star(&neg).unwrap() == p, || format!("roots differ beyond sign on input {t}"))?;
        // a self-adjoint order-0 unit with σ_0 = 1
        let h = p.try_add(&p.adjoint()).unwrap().scale(&rat(1, 2));
        let qh = h.square_root(1).unwrap();
        ensure(h.adjoint() == h && qh.adjoint() == qh, || format!("root of self-adjoint input {t} is not self-adjoint"))?;
    }
    Ok("50 inverses and square roots exact, sign-unique, star-preserving".into())
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Check {
    for t in 0..100 {
        let dim = 1 + t % 2;
        let p = random_graded(rng, dim, -1, 1, 3);
        let q = random_graded(rng, dim, -1, 1, 3);
        let lhs = p.star(&q).unwrap().adjoint();
        let rhs = q.adjoint().star(&p.adjoint()).unwrap();
        ensure(lhs == rhs, || format!("(PQ)* != Q*P* on pair {t}"))?;
        ensure(p.adjoint().adjoint() == p, || format!("** != id on pair {t}"))?;
    }
    for dim in 1..=2 {
        let tau = WkbSymbol::tau_power(dim, 1, FLOOR);
        ensure(tau.adjoint() == -&tau, || "tau* != -tau".into())?;
        for s in 0..2 * dim {
            let g = WkbSymbol::var(dim, Var::from_slot(s, dim), FLOOR);
            ensure(g.adjoint() == g, || format!("generator {} not fixed", Var::from_slot(s, dim)))?;
        }
    }
    Ok("100 anti-involution pairs, tau* = -tau, generators fixed".into())
}

fn x1() -> MultiPoly {
    MultiPoly::x(1, 0)
}
fn u1() -> MultiPoly {
    MultiPoly::u(1, 0)
}

fn rotation() -> SymplecticMapSpec {
    SymplecticMapSpec::new(1, vec![u1(), -&x1()], vec![-&u1(), x1()], int(0)).unwrap()
}

/// `(x, u) ↦ (x, u + a x^k)`.
fn shear(a: i64, k: u32) -> SymplecticMapSpec {
    let s = x1().pow(k).scale(&int(a));
    SymplecticMapSpec::new(1, vec![x1(), &u1() + &s], vec![x1(), &u1() - &s], int(0)).unwrap()
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Check {
    for (name, spec) in [
        ("identity", SymplecticMapSpec::identity(1)),
        ("identity dim 2", SymplecticMapSpec::identity(2)),
        ("rotation", rotation()),
        ("shear", shear(3, 2)),
    ] {
        let rec = quantize_map(&spec, 8).map_err(|e| format!("{name}: {e}"))?;
        ensure(rec.defects_vanish(), || format!("{name} has defects"))?;
    }
    let composite = shear(1, 3).then(&rotation()).unwrap().then(&shear(1, 3)).unwrap();
    let rec = quantize_map(&composite, 6).map_err(|e| format!("composite: {e}"))?;
    ensure(rec.defects_vanish(), || "composite has defects".into())?;
    let corrected = rec.images().any(|s| s.to_weyl().terms().any(|(j, p)| j < 0 && !p.is_zero()));
    ensure(corrected, || "composite needed no corrections; test map is too tame".into())?;
    for t in 0..50 {
        let p = random_symbol(rng, 1, 0, 3);
        let q = random_symbol(rng, 1, 0, 3);
        let lhs = apply_automorphism(&rec, &p.star(&q).unwrap()).unwrap();
        let rhs = apply_automorphism(&rec, &p)
            .unwrap()
            .star(&apply_automorphism(&rec, &q).unwrap())
            .unwrap();
        ensure(lhs.eq_within(&rhs), || format!("apply not multiplicative on pair {t}"))?;
    }
    Ok("identity/rotation/shear defect-free to depth 8, cubic shear∘rotation∘shear to depth 6, 50 homomorphism pairs".into())
}

/// `P = sqrt(Q ⋆ Q*)^{-1} ⋆ Q`, star-unitary with `σ_0 = 1`.
fn random_star_unitary(rng: &mut ChaCha8Rng, dim: usize) -> WkbSymbol {
    let q = random_unit(rng, dim);
    let h = q.star(&q.adjoint()).unwrap().square_root(1).unwrap();
    h.invert().unwrap().star(&q).unwrap()
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Check {
    for t in 0..25 {
        let dim = 1 + t % 2;
        let p = random_star_unitary(rng, dim);
        ensure(p.is_star_unitary(), || format!("generated P {t} is not star-unitary"))?;
        let rec = ad_automorphism(&p, int(0)).unwrap();
        let found = recognize_inner(&rec).map_err(|e| format!("input {t}: {e}"))?;
        let unitary = found.unitary.ok_or_else(|| format!("no unitary representative for input {t}"))?;
        let zeta = p.invert().unwrap().star(&unitary).unwrap();
        let (central, residual) = zeta.central_part();
        ensure(residual.is_zero(), || format!("recovered P {t} differs by a non-central factor"))?;
        ensure(central.star(&central.flip_tau()).unwrap().is_one(), || {
            format!("zeta(tau) zeta(-tau) != 1 on input {t}")
        })?;
        let back = ad_automorphism(&found.inner, int(0)).unwrap();
        ensure(back.same_images(&rec), || format!("canonical P {t} does not reproduce the images"))?;
    }
    let translation = ad_automorphism(&WkbSymbol::one(2, FLOOR), rat(7, 3)).unwrap();
    let r = recognize_inner(&translation).map_err(|e| e.to_string())?;
    ensure(r.inner.is_one(), || "translation-only record is not P = 1".into())?;
    Ok("25 star-unitary round trips up to central unitary zeta; translation gives P = 1".into())
}

fn chart_maps() -> Vec<SymplecticMapSpec> {
    vec![
        SymplecticMapSpec::identity(1),
        rotation(),
        shear(2, 3),
        shear(-1, 2).then(&rotation()).unwrap(),
    ]
}

/// `exp(τ^{-1})` truncated; star-unitary in `k_*`.
fn exp_series(depth: i64) -> WkbSymbol {
    let mut c = Rational::from_integer(1.into());
    let mut terms = Vec::new();
    for k in 0..=depth {
        terms.push((-k, MultiPoly::constant(0, c.clone())));
        c /= Rational::from_integer((k + 1).into());
    }
    WkbSymbol::from_terms(0, -depth, terms).unwrap()
}

fn criterion_6() -> Check {
    let depth = 5;
    let cov = CoveringSpec::coboundary(1, depth, &chart_maps(), &BTreeMap::new()).map_err(|e| e.to_string())?;
    let report = verify_covering(&cov).map_err(|e| e.to_string())?;
    ensure(report.triples.iter().all(|t| t.inner.is_one() && t.c == int(0)), || {
        "coboundary triple defects not trivial".into()
    })?;
    ensure(report.quadruples.iter().all(|q| q.zeta_is_one() && q.additive_holds()), || {
        "coboundary zeta not 1".into()
    })?;
    ensure(all_trivial(&report.reports()), || "coboundary reports not all pass".into())?;

    let s = exp_series(depth as i64);
    let twisted = cov.clone().with_twist([0, 1, 2], s.clone()).map_err(|e| e.to_string())?;
    let q = verify_w_cocycle(&twisted, [0, 1, 2, 3]).map_err(|e| e.to_string())?;
    ensure(q.zeta_central() && !q.zeta_is_one() && q.zeta_star_unitary(), || {
        "perturbed zeta is not central, nontrivial and star-unitary".into()
    })?;
    ensure(q.zeta.eq_within(&s), || "perturbed zeta differs from the twist".into())?;
    ensure(q.additive_holds(), || "additive identity broken by the twist".into())?;

    let shifts: BTreeMap<_, _> = [((0, 1), rat(2, 5)), ((1, 2), int(-3)), ((0, 2), rat(1, 7))].into();
    let three = CoveringSpec::coboundary(1, 4, &chart_maps()[..3], &shifts).map_err(|e| e.to_string())?;
    let t = triple_defect(&three, 0, 1, 2).map_err(|e| e.to_string())?;
    let want = &(&shifts[&(0, 1)] + &shifts[&(1, 2)]) - &shifts[&(0, 2)];
    ensure(t.c == want, || format!("c_012 = {} but shifts telescope to {want}", t.c))?;
    Ok("coboundary 4-chart covering trivial; twisted zeta central, unitary, != 1; shifts telescope".into())
}

/// Truncated series in `τ^{-1}`: coefficient `k` multiplies `τ^{-k}`.
#[derive(Clone, Debug, PartialEq)]
struct Series(Vec<Rational>);

impl Series {
    fn mul(&self, o: &Series) -> Series {
        let n = self.0.len();
        let mut c = vec![Rational::from_integer(0.into()); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += &self.0[i] * &o.0[j];
            }
        }
        Series(c)
    }

    fn inv(&self) -> Series {
        let n = self.0.len();
        let mut c = vec![Rational::from_integer(0.into()); n];
        c[0] = Rational::from_integer(1.into()) / &self.0[0];
        for k in 1..n {
            let mut s = Rational::from_integer(0.into());
            for i in 1..=k {
                s += &self.0[i] * &c[k - i];
            }
            c[k] = -s * &c[0];
        }
        Series(c)
    }

    fn to_symbol(&self, dim: usize) -> WkbSymbol {
        let terms = self
            .0
            .iter()
            .enumerate()
            .map(|(k, c)| (-(k as i64), MultiPoly::constant(dim, c.clone())));
        WkbSymbol::from_terms(dim, -(self.0.len() as i64 - 1), terms).unwrap()
    }
}

fn random_series(rng: &mut ChaCha8Rng, len: usize) -> Series {
    let mut c: Vec<Rational> = (0..len)
        .map(|_| Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into()))
        .collect();
    c[0] = Rational::new(rng.gen_range(1i64..=5).into(), rng.gen_range(1i64..=3).into());
    Series(c)
}

fn delta(s: &BTreeMap<[usize; 3], Series>, [i, j, k, l]: [usize; 4]) -> Series {
    s[&[i, j, k]]
        .mul(&s[&[i, k, l]])
        .mul(&s[&[j, k, l]].mul(&s[&[i, j, l]]).inv())
}

fn triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Check {
    let depth = 4usize;
    // commutative instance: dim 0, f_ij = id, c = δa
    let a: BTreeMap<_, _> = triples(5).into_iter().map(|t| (t, random_series(rng, depth + 1))).collect();
    let mut isos = BTreeMap::new();
    for i in 0..5 {
        for j in i + 1..5 {
            isos.insert((i, j), AutomorphismRecord::identity(0, depth as u32));
        }
    }
    let scalar = LienData {
        dim: 0,
        size: 5,
        isos,
        sections: a.iter().map(|(k, v)| (*k, v.to_symbol(0))).collect(),
    };
    let cocycle = compute_lien_3cocycle(&scalar).map_err(|e| e.to_string())?;
    for (q, c) in &cocycle.values {
        ensure(c.eq_within(&delta(&a, *q).to_symbol(0)), || format!("scalar c{q:?} is not the coboundary of a"))?;
    }
    ensure(cocycle.quintuples.len() == 1 && cocycle.quintuples.iter().all(|q| q.holds()), || {
        "scalar 3-cocycle identity fails".into()
    })?;

    // noncommutative instance: quantized 5-chart coboundary lien, sections rescaled by central series
    let mut charts = chart_maps();
    charts.push(shear(1, 2).then(&shear(2, 3)).unwrap());
    let cov = CoveringSpec::coboundary(1, depth as u32, &charts, &BTreeMap::new()).map_err(|e| e.to_string())?;
    let mut lien = LienData::from_covering(&cov).map_err(|e| e.to_string())?;
    let s: BTreeMap<_, _> = triples(5).into_iter().map(|t| (t, random_series(rng, depth + 1))).collect();
    for (k, sec) in lien.sections.iter_mut() {
        *sec = sec.star(&s[k].to_symbol(1)).unwrap();
    }
    let cocycle = compute_lien_3cocycle(&lien).map_err(|e| e.to_string())?;
    for (q, c) in &cocycle.values {
        ensure(c.eq_within(&delta(&s, *q).to_symbol(0)), || format!("c{q:?} is not the coboundary of the rescaling"))?;
    }
    ensure(cocycle.quintuples.iter().all(|q| q.holds()), || "3-cocycle identity fails".into())?;
    Ok("3-cocycle identity exact on 5 indices; scalar and quantized instances match the coboundary oracle".into())
}

fn criterion_8() -> Check {
    let mut count = 0;
    for (dim, degree) in [(1, 4), (2, 2)] {
        let basis = commutant_basis(dim, FLOOR, 1, degree);
        ensure(!basis.is_empty(), || "empty commutant".into())?;
        for b in &basis {
            ensure(b.central_part().1.is_zero(), || format!("non-central commutant element {b}"))?;
            for s in 0..2 * dim {
                let g = WkbSymbol::var(dim, Var::from_slot(s, dim), FLOOR);
                ensure(b.commutator(&g).unwrap().is_zero(), || format!("{b} does not commute with generators"))?;
            }
        }
        // one scalar per surviving order
        let orders = 1 - basis[0].floor() + 1;
        ensure(basis.len() as i64 == orders, || {
            format!("commutant of dim {dim} has rank {}, expected one per order", basis.len())
        })?;
        count += basis.len();
    }
    Ok(format!("{count} commutant basis elements, all central"))
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Check {
    let mut corpus: Vec<WkbSymbol> = Vec::new();
    for t in 0..60 {
        let dim = 1 + t % 2;
        corpus.push(random_graded(rng, dim, -1, 2, 4));
        corpus.push(random_unit(rng, dim).invert().unwrap());
    }
    corpus.push(WkbSymbol::zero(1, FLOOR));
    for s in &corpus {
        let text = s.to_string();
        let back = parse_symbol(&text, s.dim(), DEPTH).map_err(|e| format!("'{text}': {e}"))?;
        ensure(back == *s, || format!("parse(print(P)) != P for {text}"))?;
        ensure(back.to_string() == text, || format!("print is not a fixed point for {text}"))?;
        let json = serde_json::to_string(&SymbolDoc::from_symbol(s)).unwrap();
        let doc: SymbolDoc = from_json(&json, "symbol").map_err(|e| e.to_string())?;
        ensure(doc.to_symbol().map_err(|e| e.to_string())? == *s, || format!("JSON round trip fails for {text}"))?;
    }
    for spec in [rotation(), shear(2, 3), shear(1, 2).then(&rotation()).unwrap()] {
        let rec = quantize_map(&spec, DEPTH).unwrap();
        let json = serde_json::to_string(&RecordDoc::from_record(&rec)).unwrap();
        let back = from_json::<RecordDoc>(&json, "record")
            .and_then(|d| d.to_record())
            .map_err(|e| e.to_string())?;
        ensure(back == rec, || "record JSON round trip fails".into())?;
    }
    let cov = CoveringSpec::coboundary(1, 4, &chart_maps(), &BTreeMap::new()).unwrap();
    let reports = verify_covering(&cov).unwrap().reports();
    let json = serde_json::to_string(&reports).unwrap();
    let back: Vec<Report> = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    ensure(back == reports, || "report JSON round trip fails".into())?;

    let cases: Vec<(Vec<String>, i32, Option<&str>)> = vec![
        (vec!["star".into(), "u1".into(), "x1".into(), "--dim".into(), "1".into()], EXIT_OK, Some("x1*u1 + tau^-1\n")),
        (vec!["order".into(), "x2".into()], EXIT_INPUT, None),
        (vec!["quantize".into(), data("scaling.json"), "--depth".into(), "6".into()], EXIT_INPUT, None),
        (vec!["quantize".into(), data("composite.json")], EXIT_OK, None),
        (vec!["descent".into(), data("cover_coboundary.json")], EXIT_OK, Some("all defects trivial\n")),
        (vec!["descent".into(), data("cover_twisted.json")], EXIT_OK, None),
        (vec!["descent".into(), data("cover_inconsistent.json")], EXIT_VERIFICATION, None),
        (vec!["lien3".into(), data("lien_scalar.json")], EXIT_OK, None),
        (vec!["invert".into(), "x1".into()], EXIT_INPUT, None),
        (vec!["descent".into(), data("missing.json")], EXIT_INPUT, None),
    ];
    for (args, code, tail) in cases {
        let mut argv = vec!["wkb".to_string()];
        argv.extend(args.iter().cloned());
        let out = run(&argv);
        ensure(out.code == code, || format!("{args:?} exited {} (expected {code}): {}", out.code, out.stderr))?;
        if let Some(t) = tail {
            ensure(out.stdout.ends_with(t), || format!("{args:?} printed {:?}", out.stdout))?;
        }
    }
    Ok(format!("{} symbols print/parse fixed points, JSON exact, exit codes as documented", corpus.len()))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("star-algebra suite", Box::new(criterion_1)),
        ("inversion and square roots", Box::new(criterion_2)),
        ("anti-involution", Box::new(criterion_3)),
        ("quantization", Box::new(criterion_4)),
        ("inner recognition", Box::new(criterion_5)),
        ("descent", Box::new(|_: &mut ChaCha8Rng| criterion_6())),
        ("lien 3-cocycle", Box::new(criterion_7)),
        ("center", Box::new(|_: &mut ChaCha8Rng| criterion_8())),
        ("cli", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check(&mut rng);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("criterion {} PASS {name} ({secs:.2}s): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name} ({secs:.2}s): {msg}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
