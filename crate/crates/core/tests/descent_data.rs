use std::collections::BTreeMap;

use wkb_core::descent::{
    all_trivial, check_lien_isomorphism, compute_lien_3cocycle, verify_covering, CoveringSpec, LienData,
    LienIsoSpec,
};
use wkb_core::quantize::{
    ad_automorphism, apply_automorphism, compose_automorphisms, quantize_map, SymplecticMapSpec,
};
use wkb_core::{int, rat, MultiPoly, WkbSymbol};

fn x(d: usize, i: usize) -> MultiPoly {
    MultiPoly::x(d, i)
}
fn u(d: usize, i: usize) -> MultiPoly {
    MultiPoly::u(d, i)
}

/// `(x1, x2, u1, u2) ↦ (x1, x2, u1 + a x1 x2^2, u2 + a x1^2 x2)`, the
/// cotangent lift of a gradient shear.
fn gradient_shear(a: i64) -> SymplecticMapSpec {
    let d = 2;
    let g1 = &x(d, 0) * &x(d, 1).pow(2);
    let g2 = &x(d, 0).pow(2) * &x(d, 1);
    let (ga, gb) = (g1.scale(&int(a)), g2.scale(&int(a)));
    SymplecticMapSpec::new(
        d,
        vec![x(d, 0), x(d, 1), &u(d, 0) + &ga, &u(d, 1) + &gb],
        vec![x(d, 0), x(d, 1), &u(d, 0) - &ga, &u(d, 1) - &gb],
        int(0),
    )
    .unwrap()
}

/// Swap of the two coordinate pairs.
fn swap() -> SymplecticMapSpec {
    let d = 2;
    let f = vec![x(d, 1), x(d, 0), u(d, 1), u(d, 0)];
    SymplecticMapSpec::new(d, f.clone(), f, int(0)).unwrap()
}

#[test]
fn two_dimensional_coboundary_covering() {
    let charts = vec![
        SymplecticMapSpec::identity(2),
        gradient_shear(1),
        swap(),
        gradient_shear(-2).then(&swap()).unwrap(),
    ];
    let cov = CoveringSpec::coboundary(2, 4, &charts, &BTreeMap::new()).unwrap();
    let report = verify_covering(&cov).unwrap();
    assert!(all_trivial(&report.reports()));
}

#[test]
fn quantized_records_compose_like_maps() {
    let a = quantize_map(&gradient_shear(1), 5).unwrap();
    let b = quantize_map(&swap(), 5).unwrap();
    let ab = compose_automorphisms(&a, &b).unwrap();
    let direct = quantize_map(&gradient_shear(1).then(&swap()).unwrap(), 5).unwrap();
    assert!(ab.same_images(&direct));
    assert_eq!(ab.map, direct.map);
}

/// Lien data on five indices from a coboundary covering, with every
/// section rescaled by a distinct central constant: the 3-cocycle is the
/// coboundary of those constants.
#[test]
fn rescaled_sections_give_coboundary_cocycle() {
    let x1 = x(1, 0);
    let u1 = u(1, 0);
    let shear = |a: i64| {
        let s = x1.pow(2).scale(&int(a));
        SymplecticMapSpec::new(1, vec![x1.clone(), &u1 + &s], vec![x1.clone(), &u1 - &s], int(0)).unwrap()
    };
    let rot = SymplecticMapSpec::new(1, vec![u1.clone(), -&x1], vec![-&u1, x1.clone()], int(0)).unwrap();
    let charts = vec![SymplecticMapSpec::identity(1), rot.clone(), shear(1), shear(2), rot.then(&shear(1)).unwrap()];
    let cov = CoveringSpec::coboundary(1, 4, &charts, &BTreeMap::new()).unwrap();
    let mut lien = LienData::from_covering(&cov).unwrap();
    let t = |i: usize, j: usize, k: usize| int((2 + i + 3 * j + 5 * k) as i64);
    for (&[i, j, k], s) in lien.sections.iter_mut() {
        *s = s.scale(&t(i, j, k));
    }
    let cocycle = compute_lien_3cocycle(&lien).unwrap();
    assert_eq!(cocycle.values.len(), 5);
    for (&[i, j, k, l], c) in &cocycle.values {
        let want = t(i, j, k) * t(i, k, l) / (t(j, k, l) * t(i, j, l));
        assert!(c.eq_within(&WkbSymbol::constant(0, want, c.floor())));
    }
    assert!(cocycle.quintuples.iter().all(|q| q.holds()));
}

/// Twisting a lien by a coboundary: `g_ij = Ad(q_i) f_ij Ad(q_j)^{-1}`,
/// `b_ijk = q_i a_ijk q_i^{-1}`, `l_ij = q_i f_ij(q_j^{-1})`.
#[test]
fn coboundary_twist_is_an_effective_isomorphism() {
    let depth = 4;
    let x1 = x(1, 0);
    let rot = SymplecticMapSpec::new(1, vec![u(1, 0), -&x1], vec![-&u(1, 0), x1.clone()], int(0)).unwrap();
    let charts = vec![SymplecticMapSpec::identity(1), rot, SymplecticMapSpec::identity(1)];
    let cov = CoveringSpec::coboundary(1, depth, &charts, &BTreeMap::new()).unwrap();
    let a = LienData::from_covering(&cov).unwrap();
    let q: Vec<WkbSymbol> = (0..3)
        .map(|i| {
            let p = &x1.scale(&int(i + 1)) + &MultiPoly::u(1, 0).pow(2).scale(&rat(1, 2));
            WkbSymbol::from_terms(1, -(depth as i64), [(0, MultiPoly::one(1)), (-1, p)]).unwrap()
        })
        .collect();
    let ad_q: Vec<_> = q.iter().map(|s| ad_automorphism(s, int(0)).unwrap()).collect();
    let ad_q_inv: Vec<_> = q
        .iter()
        .map(|s| ad_automorphism(&s.invert().unwrap(), int(0)).unwrap())
        .collect();
    let mut b = a.clone();
    let mut iso = LienIsoSpec::identity(1, 3, depth);
    for (&(i, j), f) in &a.isos {
        let g = compose_automorphisms(&compose_automorphisms(&ad_q[i], f).unwrap(), &ad_q_inv[j]).unwrap();
        b.isos.insert((i, j), g);
        let l = q[i].star(&apply_automorphism(f, &q[j].invert().unwrap()).unwrap()).unwrap();
        iso.sections.insert((i, j), l);
    }
    for (&key, s) in &a.sections {
        let qi = &q[key[0]];
        b.sections.insert(key, qi.star(s).unwrap().star(&qi.invert().unwrap()).unwrap());
    }
    let check = check_lien_isomorphism(&a, &b, &iso).unwrap();
    assert!(check.is_isomorphism());
    assert!(check.effective());
}
