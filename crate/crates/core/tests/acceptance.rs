//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ordspace::abelian::{dense_approximation, discrete_approximation, flag_cone, is_discrete, rat, FlagOrder, QuadField};
use ordspace::braid::dehornoy_cone;
use ordspace::cones::{
    check_axioms, check_biinvariance_on_ball, check_conradian_on_ball, check_convex,
    density_witness, least_positive_on_ball, BallCertificate,
};
use ordspace::realization::{dense_approximation_free, finfty_approximation, magnus_cone, magnus_cone_on, DEFAULT_MAGNUS_DEGREE};
use ordspace::tower::{ball_cone_census, check_all_discrete_at, enumerate_tower_cones, SignVector};
use ordspace::{Ball, Cone, Element, Family, FreeRank, Result, Sign};

type Outcome = Result<(bool, String)>;

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let (ok, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {}", e)),
    };
    println!("{} {:<20} {} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, name, detail, start.elapsed().as_secs_f64());
    ok
}

fn verified(c: &BallCertificate) -> bool {
    c.is_verified()
}

fn refuted_and_rechecks(cone: &Cone, c: &BallCertificate) -> Result<bool> {
    Ok(!c.is_verified() && !c.witness().is_empty() && c.recheck(cone.as_ref(), None)?)
}

fn q2(a: i64, b: i64, d: i64) -> QuadField {
    QuadField::new(rat(a, d), rat(b, d))
}

fn irrational_functional(rng: &mut ChaCha8Rng, dim: usize) -> Vec<QuadField> {
    let mut v = vec![QuadField::one()];
    for _ in 1..dim {
        let b = [-3i64, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        v.push(q2(rng.gen_range(-6..=6), b, rng.gen_range(1..=3)));
    }
    v
}

/// A random dense flag. On `Z^2` the first functional is irrational; on
/// `Z^3` an integer functional is followed by an irrational one, since a
/// single functional over `Q(√2)` always has a nonzero kernel there.
fn random_dense_flag(rng: &mut ChaCha8Rng, dim: usize) -> FlagOrder {
    for _ in 0..1000 {
        let mut rows = Vec::new();
        if dim == 3 {
            rows.push((0..dim).map(|_| QuadField::from_int(rng.gen_range(-2..=2))).collect());
        }
        rows.push(irrational_functional(rng, dim));
        rows.extend(FlagOrder::lex(dim).functionals().iter().cloned());
        let f = FlagOrder::new(rows).expect("lex rows make any flag total");
        if is_discrete(&f).is_none() {
            return f;
        }
    }
    panic!("no dense flag in 1000 draws");
}

fn random_integer_flag(rng: &mut ChaCha8Rng, dim: usize) -> FlagOrder {
    let mut rows: Vec<Vec<i64>> = vec![(0..dim).map(|_| rng.gen_range(-3..=3)).collect()];
    rows.extend((0..dim).map(|i| (0..dim).map(|j| if i == j { if rng.gen() { 1 } else { -1 } } else { 0 }).collect()));
    FlagOrder::from_integer_rows(&rows).unwrap()
}

/// Positive-oriented nonzero vectors from the box `[-3, 3]^dim`.
fn random_positives(rng: &mut ChaCha8Rng, f: &FlagOrder, count: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    while out.len() < count {
        let v: Vec<i64> = (0..f.dim()).map(|_| rng.gen_range(-3..=3)).collect();
        match f.classify(&v).unwrap() {
            Sign::Positive => out.push(v),
            Sign::Negative => out.push(v.iter().map(|x| -x).collect()),
            Sign::Identity => {}
        }
    }
    out
}

/// Sign of the first functional that is not numerically zero on `g`,
/// evaluated in `f64`.
fn float_sign(f: &FlagOrder, g: &[i64]) -> Option<f64> {
    f.functionals()
        .iter()
        .map(|v| v.iter().zip(g).map(|(a, &x)| a.to_f64() * x as f64).sum::<f64>())
        .find(|s| s.abs() > 1e-9)
}

fn axiom_suite() -> Outcome {
    let mut cases: Vec<(String, Cone, Ball)> = Vec::new();
    let z2 = Family::Abelian(2);
    let z3 = Family::Abelian(3);
    let r2 = QuadField::sqrt2;
    let flags = vec![
        FlagOrder::lex(2),
        FlagOrder::new(vec![vec![QuadField::one(), r2()]]).unwrap(),
        FlagOrder::new(vec![vec![QuadField::one(), -r2()]]).unwrap(),
        FlagOrder::from_integer_rows(&[vec![1, 1], vec![1, 0]]).unwrap(),
        FlagOrder::lex(3),
        FlagOrder::new(vec![vec![QuadField::one(), r2(), QuadField::zero()], vec![QuadField::zero(), QuadField::zero(), QuadField::one()]])
            .unwrap(),
        FlagOrder::new(vec![vec![r2(), QuadField::one(), QuadField::from_int(3)], vec![QuadField::zero(), QuadField::zero(), QuadField::one()]])
            .unwrap(),
    ];
    for f in flags {
        let fam = if f.dim() == 2 { &z2 } else { &z3 };
        cases.push((format!("flag {}", f), flag_cone(f.clone()), Ball::enumerate(fam, 5)?));
    }
    cases.push(("magnus F2".into(), magnus_cone(2)?, Ball::enumerate(&Family::free(2), 3)?));
    cases.push(("dehornoy B3".into(), dehornoy_cone(3)?, Ball::enumerate(&Family::Braid(3), 4)?));
    cases.push(("dehornoy B4".into(), dehornoy_cone(4)?, Ball::enumerate(&Family::Braid(4), 3)?));
    for n in 1..=3 {
        for (s, c) in enumerate_tower_cones(n)? {
            cases.push((format!("tower {}", s), c, Ball::enumerate(&Family::Tower(n), 4)?));
        }
    }
    let req = vec![Element::free(&[1]), Element::free(&[1, 2])];
    let out = dense_approximation_free(magnus_cone(2)?, &req, 2)?;
    let f2_ball = Ball::enumerate(&Family::free(2), 3)?;
    cases.push(("realization homeo-lex".into(), out.homeo_cone.clone(), f2_ball.clone()));
    cases.push(("realization surgery".into(), out.cone.clone(), f2_ball));
    let finf = Family::Free(FreeRank::Countable);
    let p = magnus_cone_on(finf.clone(), DEFAULT_MAGNUS_DEGREE)?;
    let ex = finfty_approximation(p, &[Element::free(&[1, -2]), Element::free(&[2])])?;
    let window = Ball::enumerate_window(&finf, 3, ex.split + 1)?;
    cases.push(("F_inf flip".into(), ex.flip.clone(), window.clone()));
    cases.push(("F_inf dense".into(), ex.dense.clone(), window));

    let mut failed = Vec::new();
    for (name, cone, ball) in &cases {
        if !verified(&check_axioms(cone.as_ref(), ball)?) {
            failed.push(name.clone());
        }
    }
    Ok((failed.is_empty(), format!("{}/{} cones verified; failed: {:?}", cases.len() - failed.len(), cases.len(), failed)))
}

fn tararin_census() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 1..=3usize {
        let census = ball_cone_census(n, 2)?;
        let matched: BTreeSet<String> =
            census.survivors.iter().filter_map(|s| s.matches.as_ref().map(|m| m.to_string())).collect();
        let all: BTreeSet<String> = SignVector::all(n).iter().map(|s| s.to_string()).collect();
        let unmatched = census.survivors.iter().filter(|s| s.matches.is_none()).count();
        ok &= census.count() == 1 << n && unmatched == 0 && matched == all;
        let reports = check_all_discrete_at(n, 6)?;
        let certified = reports.iter().filter(|r| r.certified).count();
        ok &= reports.len() == 1 << n && certified == reports.len();
        for r in &reports {
            let tc = ordspace::tower::tower_cone(&r.signs)?;
            ok &= density_witness(tc.as_ref(), &r.least, 6)?.is_none();
        }
        detail.push(format!("n={}: {} survivors, {}/{} discrete at r=6", n, census.count(), certified, reports.len()));
    }
    Ok((ok, detail.join("; ")))
}

fn discrete_zk() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut successes = 0;
    let mut failures = Vec::new();
    for run in 0..50 {
        let dim = if run % 2 == 0 { 2 } else { 3 };
        let f = random_dense_flag(&mut rng, dim);
        let count = rng.gen_range(1..=4);
        let gs = random_positives(&mut rng, &f, count);
        let out = discrete_approximation(&f, &gs)?;
        let cone = flag_cone(out.clone());
        let mut why = Vec::new();
        let least = is_discrete(&out);
        if least.is_none() {
            why.push("dense output");
        }
        for g in &gs {
            if cone.classify(&Element::vector(g))? != Sign::Positive {
                why.push("required element lost");
            }
            if float_sign(&out, g).map_or(false, |s| s < 0.0) {
                why.push("float evaluation disagrees");
            }
        }
        if let Some(c) = &least {
            let norm: i64 = c.iter().map(|x| x.abs()).sum();
            let c = Element::vector(c);
            // brute force: nothing positive below c in ball(6), and c is the
            // minimum of the smallest ball containing it
            if density_witness(cone.as_ref(), &c, 6)?.is_some() {
                why.push("element below the least one");
            }
            if least_positive_on_ball(cone.as_ref(), norm.max(1) as usize)?.element.as_ref() != Some(&c) {
                why.push("ball minimum differs");
            }
        }
        if why.is_empty() {
            successes += 1;
        } else {
            failures.push((run, out.to_string(), why));
        }
    }
    Ok((successes == 50, format!("{}/50 discrete outputs; failed runs {:?}", successes, failures)))
}

fn dense_zk() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut successes = 0;
    let mut failures = Vec::new();
    for run in 0..50 {
        let dim = if run % 2 == 0 { 2 } else { 3 };
        let f = random_integer_flag(&mut rng, dim);
        let count = rng.gen_range(1..=4);
        let gs = random_positives(&mut rng, &f, count);
        let out = dense_approximation(&f, &gs)?;
        let cone = flag_cone(out.clone());
        let mut ok = is_discrete(&out).is_none();
        for g in &gs {
            let g = Element::vector(g);
            ok &= cone.classify(&g)? == Sign::Positive;
            for r in [2, 4, 6] {
                ok &= density_witness(cone.as_ref(), &g, r)?.is_some();
            }
        }
        if ok {
            successes += 1;
        } else {
            failures.push(run);
        }
    }
    Ok((successes == 50, format!("{}/50 dense outputs; failed runs {:?}", successes, failures)))
}

fn magnus_g_list(rng: &mut ChaCha8Rng, p: &Cone) -> Result<Vec<Element>> {
    let ball = Ball::enumerate(&Family::free(2), 2)?;
    let mut positives = Vec::new();
    for g in ball.iter() {
        if p.classify(g)? == Sign::Positive {
            positives.push(g.clone());
        }
    }
    let count = rng.gen_range(1..=4);
    Ok(positives.choose_multiple(rng, count).cloned().collect())
}

fn free_perturbation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = magnus_cone(2)?;
    let mut successes = 0;
    let mut failures = Vec::new();
    for run in 0..20 {
        let k = if run % 2 == 0 { 2 } else { 3 };
        let gs = magnus_g_list(&mut rng, &p)?;
        let out = dense_approximation_free(p.clone(), &gs, k)?;
        let pert = &out.perturbation;
        let real = &pert.realization;
        let mut ok = true;
        // the perturbed maps still realize t on ball(k)
        for w in Ball::enumerate(&Family::free(2), k)?.iter() {
            let t = real.t(w).expect("ball(k) lies in the t-domain");
            ok &= pert.rep.eval_at_zero(w.as_free().unwrap()) == num_rational::BigRational::from_integer(t.into());
        }
        ok &= pert.rep.eval_at_zero(pert.h1.as_free().unwrap()) == num_rational::BigRational::from_integer(0.into());
        ok &= pert.rep.eval_at_zero(pert.h2.as_free().unwrap()) == num_rational::BigRational::from_integer(0.into());
        let fam = Family::free(2);
        ok &= fam.commutator(&pert.h1, &pert.h2)? != Element::free(&[]);
        for g in &gs {
            ok &= out.homeo_cone.classify(g)? == Sign::Positive;
        }
        let ball3 = Ball::enumerate(&fam, 3)?;
        ok &= check_convex(out.homeo_cone.as_ref(), out.stab0.as_ref(), &ball3)?.is_verified();
        if ok {
            successes += 1;
        } else {
            failures.push(run);
        }
    }
    Ok((successes == 20, format!("{}/20 runs; failed runs {:?}", successes, failures)))
}

fn soul_surgery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = magnus_cone(2)?;
    let mut successes = 0;
    let mut failures = Vec::new();
    let mut checked_in_c = 0;
    let mut in_ball = 0;
    for run in 0..20 {
        let k = if run % 2 == 0 { 2 } else { 3 };
        let gs = magnus_g_list(&mut rng, &p)?;
        let out = dense_approximation_free(p.clone(), &gs, k)?;
        let q = &out.cone;
        let mut ok = true;
        for g in &gs {
            ok &= q.classify(g)? == Sign::Positive;
        }
        let in_c = out.stab0_density(4, 2)?;
        checked_in_c += in_c.len();
        in_ball += in_c.iter().filter(|(g, _)| g.length() <= 4).count();
        ok &= !in_c.is_empty() && in_c.iter().all(|(_, w)| w.is_some());
        for r in 2..=5 {
            match least_positive_on_ball(q.as_ref(), r)?.element {
                Some(m) => ok &= density_witness(q.as_ref(), &m, r)?.is_some(),
                None => ok = false,
            }
        }
        if ok {
            successes += 1;
        } else {
            failures.push(run);
        }
    }
    Ok((
        successes == 20,
        format!(
            "{}/20 runs ({} positive C-elements witnessed, {} of them in ball(4)); failed runs {:?}",
            successes, checked_in_c, in_ball, failures
        ),
    ))
}

fn negative_controls() -> Outcome {
    let mut ok = true;
    let b3 = dehornoy_cone(3)?;
    let conradian = check_conradian_on_ball(b3.as_ref(), 3)?;
    ok &= refuted_and_rechecks(&b3, &conradian)?;
    let bi = check_biinvariance_on_ball(b3.as_ref(), 2)?;
    ok &= refuted_and_rechecks(&b3, &bi)?;
    let mut towers = 0;
    for n in 2..=3 {
        for (_, c) in enumerate_tower_cones(n)? {
            let cert = check_biinvariance_on_ball(c.as_ref(), 2)?;
            ok &= refuted_and_rechecks(&c, &cert)?;
            towers += 1;
        }
    }
    // positive control: Magnus is bi-invariant and Conradian on the ball
    let m = magnus_cone(2)?;
    ok &= check_biinvariance_on_ball(m.as_ref(), 3)?.is_verified();
    ok &= check_conradian_on_ball(m.as_ref(), 3)?.is_verified();
    Ok((ok, format!("Dehornoy B3 conradian+bi-invariance refuted, {} tower cones refuted", towers)))
}

fn retract(w: &[i32], split: i32) -> Element {
    Element::free(&w.iter().copied().filter(|l| l.abs() < split).collect::<Vec<_>>())
}

fn finfty_flip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let finf = Family::Free(FreeRank::Countable);
    let magnus = magnus_cone_on(finf.clone(), DEFAULT_MAGNUS_DEGREE)?;
    let mut successes = 0;
    let mut failures = Vec::new();
    let mut witnessed = 0;
    for run in 0..10 {
        let p = if run % 2 == 0 { magnus.clone() } else { ordspace::realization::flip_cone(magnus.clone(), 1)? };
        let count = rng.gen_range(1..=4);
        let gs: Vec<Element> = (0..count)
            .map(|_| {
                let len = rng.gen_range(1..=3);
                let letters: Vec<i32> =
                    (0..len).map(|_| rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }).collect();
                Element::free(&letters)
            })
            .filter(|g| g.length() > 0)
            .collect();
        let out = finfty_approximation(p.clone(), &gs)?;
        let k = out.split as i32;
        let xk = Element::free(&[k]);
        let mut ok = out.flip.classify(&xk)? == p.classify(&xk)?.flip();
        ok &= gs.iter().all(|g| g.as_free().unwrap().letters().iter().all(|l| l.abs() < k));
        for g in &gs {
            let s = p.classify(g)?;
            ok &= out.flip.classify(g)? == s;
            if s == Sign::Positive {
                ok &= out.dense.classify(g)? == Sign::Positive;
            }
        }
        let ball = Ball::enumerate_window(&finf, 3, out.split + 1)?;
        let mut kernel_positive = 0;
        for g in ball.iter() {
            let w = g.as_free().unwrap();
            if w.letters().is_empty() || retract(w.letters(), k) != Element::free(&[]) {
                continue;
            }
            if out.dense.classify(g)? != Sign::Positive {
                continue;
            }
            kernel_positive += 1;
            ok &= density_witness(out.dense.as_ref(), g, 3)?.is_some();
        }
        ok &= kernel_positive > 0;
        witnessed += kernel_positive;
        if ok {
            successes += 1;
        } else {
            failures.push(run);
        }
    }
    Ok((successes == 10, format!("{}/10 runs ({} kernel elements witnessed); failed runs {:?}", successes, witnessed, failures)))
}

fn main() {
    let start = Instant::now();
    let results = [
        run("axiom-suite", axiom_suite),
        run("tararin-census", tararin_census),
        run("discrete-zk", discrete_zk),
        run("dense-zk", dense_zk),
        run("free-perturbation", free_perturbation),
        run("soul-surgery", soul_surgery),
        run("negative-controls", negative_controls),
        run("finfty-flip", finfty_flip),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {}/{} criteria passed in {:.1}s", passed, results.len(), start.elapsed().as_secs_f64());
    if passed != results.len() {
        std::process::exit(1);
    }
}
