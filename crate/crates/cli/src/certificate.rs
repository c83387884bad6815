//! Certificates: the inputs of a pipeline run, its stage outputs, the oracle
//! answers it relied on and its ball certificates. `verify` re-runs the
//! pipeline and re-asks every recorded oracle call.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use ordspace::abelian::{dense_approximation, discrete_approximation, flag_cone, is_discrete, FlagOrder};
use ordspace::cones::{
    check_axioms, check_biinvariance, check_conradian, check_convex, density_witness, BallCertificate, ConeDescriptor,
    ConeDocument, Property, SubgroupDescriptor,
};
use ordspace::realization::{
    dense_approximation_free, finfty_approximation, homeo_lex_decision, BentMaps, LexDecision,
};
use ordspace::tower::{ball_cone_census, check_all_discrete_at, tower_cone};
use ordspace::{Ball, Cone, Element, Error, Family, FreeRank, Result, Sign, Subgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Check,
    Approximate,
    Densify,
    Finfty,
    Tower,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<Property>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupDescriptor>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub required: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub census_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete_radius: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCall {
    pub cone: String,
    pub element: String,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub cone: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<String>,
    pub certificate: BallCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub pipeline: Pipeline,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<ConeDescriptor>,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<ConeDescriptor>,
    pub stages: Vec<Stage>,
    pub calls: Vec<OracleCall>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| {
            let offset = text.lines().take(e.line().saturating_sub(1)).map(|l| l.len() + 1).sum::<usize>()
                + e.column().saturating_sub(1);
            Error::parse(offset, e.to_string())
        })
    }

    pub fn stage(&self, name: &str) -> Option<&str> {
        self.stages.iter().find(|s| s.name == name).map(|s| s.value.as_str())
    }
}

/// A finished run: the certificate plus the named cones and subgroups its
/// calls and checks refer to.
pub struct Run {
    pub certificate: Certificate,
    pub cones: BTreeMap<String, Cone>,
    pub subgroups: BTreeMap<String, Subgroup>,
    pub bent: Option<BentMaps>,
}

struct Builder {
    stages: Vec<Stage>,
    calls: Vec<OracleCall>,
    checks: Vec<CheckRecord>,
    cones: BTreeMap<String, Cone>,
    subgroups: BTreeMap<String, Subgroup>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            stages: Vec::new(),
            calls: Vec::new(),
            checks: Vec::new(),
            cones: BTreeMap::new(),
            subgroups: BTreeMap::new(),
        }
    }

    fn stage(&mut self, name: &str, value: impl ToString) {
        self.stages.push(Stage { name: name.into(), value: value.to_string() });
    }

    fn cone(&mut self, role: &str, cone: Cone) {
        self.cones.insert(role.into(), cone);
    }

    fn call(&mut self, role: &str, g: &Element) -> Result<Sign> {
        let sign = self.cones[role].classify(g)?;
        self.calls.push(OracleCall { cone: role.into(), element: g.to_string(), sign });
        Ok(sign)
    }

    fn calls_on_ball(&mut self, role: &str, ball: &Ball) -> Result<()> {
        for g in ball.iter() {
            self.call(role, g)?;
        }
        Ok(())
    }

    fn check(&mut self, role: &str, subgroup: Option<&str>, certificate: BallCertificate) -> bool {
        let ok = certificate.is_verified();
        self.checks.push(CheckRecord { cone: role.into(), subgroup: subgroup.map(String::from), certificate });
        ok
    }

    fn finish(
        self,
        pipeline: Pipeline,
        family: Family,
        input: Option<ConeDescriptor>,
        parameters: Parameters,
        output: Option<ConeDescriptor>,
        passed: bool,
        bent: Option<BentMaps>,
    ) -> Run {
        Run {
            certificate: Certificate {
                pipeline,
                family,
                input,
                parameters,
                output,
                stages: self.stages,
                calls: self.calls,
                checks: self.checks,
                passed,
            },
            cones: self.cones,
            subgroups: self.subgroups,
            bent,
        }
    }
}

fn descriptor_of(cone: &Cone) -> Result<ConeDescriptor> {
    Ok(ConeDocument::of(cone)?.cone)
}

fn ball_for(family: &Family, radius: usize, window: u32) -> Result<Ball> {
    match family {
        Family::Free(FreeRank::Countable) => Ball::enumerate_window(family, radius, window),
        f => Ball::enumerate(f, radius),
    }
}

fn parse_all(family: &Family, items: &[String]) -> Result<Vec<Element>> {
    items.iter().map(|s| family.parse_element(s)).collect()
}

pub fn run_check(input: Cone, parameters: Parameters) -> Result<Run> {
    let family = input.family().clone();
    let radius = parameters.radius.unwrap_or(3);
    let property = parameters.property.unwrap_or(Property::Axioms);
    let mut b = Builder::new();
    b.cone("input", input.clone());
    let ball = ball_for(&family, radius, 2)?;
    b.stage("ball-size", ball.len());
    let small = ball_for(&family, radius.min(2), 2)?;
    b.calls_on_ball("input", &small)?;
    let cert = match property {
        Property::Axioms => check_axioms(input.as_ref(), &ball)?,
        Property::Conradian => check_conradian(input.as_ref(), &ball)?,
        Property::BiInvariance => check_biinvariance(input.as_ref(), &ball)?,
        Property::Convex => {
            let d = parameters
                .subgroup
                .as_ref()
                .ok_or_else(|| Error::Precondition("convexity needs --subgroup".into()))?;
            let c = d.build()?;
            b.subgroups.insert("subgroup".into(), c.clone());
            check_convex(input.as_ref(), c.as_ref(), &ball)?
        }
        Property::LeastPositive => {
            let lp = ordspace::cones::least_positive_on_ball_in(input.as_ref(), &ball)?;
            b.stage("least-positive", lp.element.as_ref().map_or("none".into(), |g| g.to_string()));
            b.stage("certification", format!("{:?}", lp.certification));
            lp.certificate
        }
    };
    let subgroup = (property == Property::Convex).then_some("subgroup");
    let passed = b.check("input", subgroup, cert);
    let input_d = descriptor_of(&input)?;
    Ok(b.finish(Pipeline::Check, family, Some(input_d), parameters, None, passed, None))
}

pub fn run_approximate(input: Cone, parameters: Parameters) -> Result<Run> {
    let family = input.family().clone();
    let flag = match input.as_any_flag() {
        Some(f) => f,
        None => return Err(Error::Precondition("approximate needs a flag order on Z^k".into())),
    };
    let required = parse_all(&family, &parameters.required)?;
    let gs: Vec<Vec<i64>> = required.iter().map(|g| g.as_vector().unwrap().coords.clone()).collect();
    let target = parameters.target.clone().unwrap_or_else(|| "discrete".into());
    let out_flag = match target.as_str() {
        "discrete" => discrete_approximation(&flag, &gs)?,
        "dense" => dense_approximation(&flag, &gs)?,
        other => return Err(Error::Precondition(format!("unknown target `{}`", other))),
    };
    let mut b = Builder::new();
    b.cone("input", input.clone());
    let output = flag_cone(out_flag.clone());
    b.cone("output", output.clone());
    b.stage("flag", &out_flag);
    let least = is_discrete(&out_flag);
    b.stage("least-positive", least.as_ref().map_or("none".into(), |v| Element::vector(v).to_string()));
    let mut passed = (target == "discrete") == least.is_some();
    for g in &required {
        passed &= b.call("input", g)? == Sign::Positive;
        passed &= b.call("output", g)? == Sign::Positive;
    }
    if target == "dense" {
        for g in &required {
            for r in [2usize, 4, 6] {
                let w = density_witness(output.as_ref(), g, r)?;
                passed &= w.is_some();
                b.stage(
                    &format!("density-witness {} r={}", g, r),
                    w.map_or("none".into(), |w| format!("{} ({:?})", w.element, w.source)),
                );
            }
        }
    }
    let radius = parameters.radius.unwrap_or(3);
    passed &= b.check("output", None, check_axioms(output.as_ref(), &Ball::enumerate(&family, radius)?)?);
    let input_d = descriptor_of(&input)?;
    let output_d = descriptor_of(&output)?;
    Ok(b.finish(Pipeline::Approximate, family, Some(input_d), parameters, Some(output_d), passed, None))
}

fn decision_text(d: &LexDecision) -> String {
    match d {
        LexDecision::Moved { r_index, at, sign } => format!("{} at r_{} = {}", sign, r_index, at),
        LexDecision::Kernel(s) => format!("{} by the kernel cone", s),
    }
}

pub fn run_densify(input: Cone, parameters: Parameters) -> Result<Run> {
    let family = input.family().clone();
    if family == Family::Free(FreeRank::Countable) {
        return run_finfty(input, parameters);
    }
    let required = parse_all(&family, &parameters.required)?;
    let k = parameters.k.unwrap_or_else(|| required.iter().map(|g| g.length()).max().unwrap_or(1).max(1));
    let out = dense_approximation_free(input.clone(), &required, k)?;
    let pert = &out.perturbation;
    let r = &pert.realization;
    let c = &pert.choice;
    let mut b = Builder::new();
    b.cone("input", input.clone());
    b.cone("homeo", out.homeo_cone.clone());
    b.cone("output", out.cone.clone());
    b.subgroups.insert("stab0".into(), out.stab0.clone());
    b.stage("k", k);
    b.stage("g-minus", &c.g_minus);
    b.stage("g-plus", &c.g_plus);
    b.stage("epsilons", format!("{:?}", c.epsilons));
    b.stage("a", &c.a);
    b.stage("b", &c.b);
    b.stage("t(g+)", &pert.bent.p);
    b.stage("t(ag+)", &pert.bent.ap);
    b.stage("t(bg+)", &pert.bent.bp);
    b.stage("f1", &pert.bent.f1);
    b.stage("f2", &pert.bent.f2);
    b.stage("h1", &pert.h1);
    b.stage("h2", &pert.h2);
    b.stage("rho_k(h1)(0)", pert.rep.eval_at_zero(pert.h1.as_free().unwrap()));
    b.stage("rho_k(h2)(0)", pert.rep.eval_at_zero(pert.h2.as_free().unwrap()));
    b.stage("condition-1", out.report.agrees_on_ball);
    b.stage("commutator-nontrivial", out.report.commutator_nontrivial);
    b.stage("moved-witness", out.report.moved_witness.as_ref().map_or("none".into(), |g| g.to_string()));
    b.stage("t-domain-size", r.sorted().len());
    b.stage("h1-decided", decision_text(&homeo_lex_decision(pert, input.as_ref(), &pert.h1)?));
    let mut passed = out.report.holds();
    for g in &required {
        passed &= b.call("output", g)? == Sign::Positive;
        passed &= b.call("homeo", g)? == Sign::Positive;
    }
    b.call("output", &pert.h1)?;
    b.call("output", &pert.h2)?;
    b.calls_on_ball("output", &Ball::enumerate(&family, 2)?)?;
    let radius = parameters.radius.unwrap_or(2);
    let ball = Ball::enumerate(&family, radius)?;
    passed &= b.check("output", None, check_axioms(out.cone.as_ref(), &ball)?);
    passed &= b.check("homeo", Some("stab0"), check_convex(out.homeo_cone.as_ref(), out.stab0.as_ref(), &ball)?);
    let density = out.stab0_density(radius + 1, 1)?;
    let found = density.iter().filter(|(_, w)| w.is_some()).count();
    passed &= found == density.len();
    b.stage("stab0-density", format!("{}/{}", found, density.len()));
    let input_d = descriptor_of(&input)?;
    let output_d = descriptor_of(&out.cone)?;
    let bent = pert.bent.clone();
    Ok(b.finish(Pipeline::Densify, family, Some(input_d), parameters, Some(output_d), passed, Some(bent)))
}

pub fn run_finfty(input: Cone, parameters: Parameters) -> Result<Run> {
    let family = input.family().clone();
    let required = parse_all(&family, &parameters.required)?;
    let out = finfty_approximation(input.clone(), &required)?;
    let mut b = Builder::new();
    b.cone("input", input.clone());
    b.cone("flip", out.flip.clone());
    b.cone("dense", out.dense.clone());
    b.stage("split", out.split);
    let xk = Element::free(&[out.split as i32]);
    let before = b.call("input", &xk)?;
    let after = b.call("flip", &xk)?;
    let mut passed = after == before.flip();
    for g in &required {
        let p = b.call("input", g)?;
        passed &= b.call("flip", g)? == p;
        if p == Sign::Positive {
            passed &= b.call("dense", g)? == Sign::Positive;
        }
    }
    let window = out.split + 1;
    let radius = parameters.radius.unwrap_or(2);
    let ball = Ball::enumerate_window(&family, radius, window)?;
    passed &= b.check("dense", None, check_axioms(out.dense.as_ref(), &ball)?);
    passed &= b.check("flip", None, check_axioms(out.flip.as_ref(), &ball)?);
    let input_d = descriptor_of(&input)?;
    let output_d = descriptor_of(&out.dense)?;
    Ok(b.finish(Pipeline::Finfty, family, Some(input_d), parameters, Some(output_d), passed, None))
}

pub fn run_tower(rank: usize, parameters: Parameters) -> Result<Run> {
    let census_radius = parameters.census_radius.unwrap_or(2);
    let discrete_radius = parameters.discrete_radius.unwrap_or(6);
    let census = ball_cone_census(rank, census_radius)?;
    let mut b = Builder::new();
    b.stage("ball-size", census.ball_size);
    b.stage("partial-cones", census.raw_count);
    b.stage("count", census.count());
    let mut passed = census.count() == 1 << rank;
    for (i, s) in census.survivors.iter().enumerate() {
        let signs: Vec<String> = s.generator_signs.iter().map(|x| x.to_string()).collect();
        let m = s.matches.as_ref().map_or("none".into(), |m| m.to_string());
        passed &= s.matches.is_some();
        b.stage(&format!("survivor {}", i), format!("generators [{}] matches {}", signs.join(" "), m));
    }
    for rep in check_all_discrete_at(rank, discrete_radius)? {
        let role = format!("tower:{}", rep.signs);
        b.cone(&role, tower_cone(&rep.signs)?);
        b.stage(&format!("least {}", rep.signs), format!("{} certified={}", rep.least, rep.certified));
        passed &= rep.certified;
        passed &= b.check(&role, None, rep.certificate);
        for g in Family::Tower(rank).generators()? {
            b.call(&role, &g)?;
        }
    }
    Ok(b.finish(Pipeline::Tower, Family::Tower(rank), None, parameters, None, passed, None))
}

/// Re-runs a certificate's pipeline from its recorded inputs.
pub fn rerun(cert: &Certificate) -> Result<Run> {
    let input = match &cert.input {
        Some(d) => {
            let cone = d.build()?;
            if *cone.family() != cert.family {
                return Err(Error::mismatch(&cert.family, cone.family()));
            }
            Some(cone)
        }
        None => None,
    };
    let need = || input.clone().ok_or_else(|| Error::Precondition("certificate has no input cone".into()));
    match cert.pipeline {
        Pipeline::Check => run_check(need()?, cert.parameters.clone()),
        Pipeline::Approximate => run_approximate(need()?, cert.parameters.clone()),
        Pipeline::Densify => run_densify(need()?, cert.parameters.clone()),
        Pipeline::Finfty => run_finfty(need()?, cert.parameters.clone()),
        Pipeline::Tower => match cert.family {
            Family::Tower(n) => run_tower(n, cert.parameters.clone()),
            ref other => Err(Error::mismatch("a tower family", other)),
        },
    }
}

/// Every disagreement between a certificate and a fresh evaluation.
pub fn verify(cert: &Certificate) -> Result<Vec<String>> {
    let run = rerun(cert)?;
    let fresh = &run.certificate;
    let mut problems = Vec::new();
    if fresh.output != cert.output {
        problems.push("output descriptor differs from a fresh run".to_string());
    }
    for (i, s) in cert.stages.iter().enumerate() {
        match fresh.stages.iter().find(|f| f.name == s.name) {
            Some(f) if f.value == s.value => {}
            Some(f) => problems.push(format!("stages[{}] `{}`: recorded {}, fresh run gives {}", i, s.name, s.value, f.value)),
            None => problems.push(format!("stages[{}] `{}` is not produced by the pipeline", i, s.name)),
        }
    }
    if cert.stages.len() != fresh.stages.len() {
        problems.push(format!("{} stages recorded, {} produced", cert.stages.len(), fresh.stages.len()));
    }
    for (i, call) in cert.calls.iter().enumerate() {
        let cone = match run.cones.get(&call.cone) {
            Some(c) => c,
            None => {
                problems.push(format!("calls[{}]: unknown cone `{}`", i, call.cone));
                continue;
            }
        };
        let g = cone.family().parse_element(&call.element)?;
        let s = cone.classify(&g)?;
        if s != call.sign {
            problems.push(format!("calls[{}]: {} on {} recorded {}, oracle says {}", i, call.element, call.cone, call.sign, s));
        }
    }
    for (i, check) in cert.checks.iter().enumerate() {
        let cone = match run.cones.get(&check.cone) {
            Some(c) => c,
            None => {
                problems.push(format!("checks[{}]: unknown cone `{}`", i, check.cone));
                continue;
            }
        };
        let subgroup = check.subgroup.as_ref().and_then(|s| run.subgroups.get(s)).map(Arc::as_ref);
        if !check.certificate.recheck(cone.as_ref(), subgroup)? {
            problems.push(format!("checks[{}]: {:?} certificate on {} does not recheck", i, check.certificate.property, check.cone));
        }
        if fresh.checks.get(i).map(|f| &f.certificate) != Some(&check.certificate) {
            problems.push(format!("checks[{}]: differs from a fresh run", i));
        }
    }
    if fresh.passed != cert.passed {
        problems.push(format!("recorded passed = {}, fresh run gives {}", cert.passed, fresh.passed));
    }
    Ok(problems)
}

/// The flag behind a cone built by `flag_cone`, if any.
trait AsFlag {
    fn as_any_flag(&self) -> Option<FlagOrder>;
}

impl AsFlag for Cone {
    fn as_any_flag(&self) -> Option<FlagOrder> {
        match self.descriptor()? {
            ConeDescriptor::ZkFlag { functionals } => FlagOrder::new(functionals).ok(),
            _ => None,
        }
    }
}
