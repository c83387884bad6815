//! Least positive elements on balls and witnesses of density.

use rayon::prelude::*;

use super::checks::{classify_all, least_positive_certificate};
use super::constructions::is_between;
use super::{compare, BallCertificate, ConeOracle, OrderType, Sign};
use crate::elements::{Ball, Element, Family, FreeRank};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    /// The ball minimum is the least positive element of the whole group.
    Global { reason: String },
    /// The order is dense, so no ball minimum is global.
    NoGlobalMinimum { reason: String },
    /// Nothing is known beyond the ball.
    BallOnly,
}

#[derive(Debug, Clone)]
pub struct LeastPositive {
    pub element: Option<Element>,
    pub certification: Certification,
    pub certificate: BallCertificate,
}

pub fn least_positive_on_ball(cone: &dyn ConeOracle, radius: usize) -> Result<LeastPositive> {
    let ball = match cone.family() {
        Family::Free(FreeRank::Countable) => Ball::enumerate_window(cone.family(), radius, 2)?,
        fam => Ball::enumerate(fam, radius)?,
    };
    least_positive_on_ball_in(cone, &ball)
}

/// The minimum of `P ∩ ball`, with global certification when the cone's
/// order type is known analytically.
pub fn least_positive_on_ball_in(cone: &dyn ConeOracle, ball: &Ball) -> Result<LeastPositive> {
    super::same_family(cone.family(), ball.family())?;
    let signs = classify_all(cone, ball.members())?;
    let mut min: Option<&Element> = None;
    for (g, s) in ball.iter().zip(&signs) {
        if *s == Sign::Positive && min.map_or(Ok(true), |m| compare(cone, g, m).map(|o| o.is_lt()))? {
            min = Some(g);
        }
    }
    let certification = match (cone.order_type(), min) {
        (OrderType::Discrete { least, reason }, Some(m)) if cone.family().equal(&least, m)? => {
            Certification::Global { reason }
        }
        (OrderType::Dense { reason }, _) => Certification::NoGlobalMinimum { reason },
        _ => Certification::BallOnly,
    };
    let certificate = least_positive_certificate(ball, min, ball.len() as u64);
    Ok(LeastPositive { element: min.cloned(), certification, certificate })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSource {
    Ball,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWitness {
    pub element: Element,
    pub source: WitnessSource,
}

/// Searches for `h` with `1 < h < g`, first in the ball of the given radius,
/// then among the cone's analytic candidates. Every returned witness has been
/// checked with the oracle. `None` does not prove discreteness.
pub fn density_witness(cone: &dyn ConeOracle, g: &Element, radius: usize) -> Result<Option<DensityWitness>> {
    let fam = cone.family();
    if cone.classify(g)? != Sign::Positive {
        return Err(Error::Precondition(format!("{} is not positive", g)));
    }
    let ball = match fam {
        Family::Free(FreeRank::Countable) => {
            let w = g.as_free().map_or(1, |w| w.max_index()).max(1) + 1;
            Ball::enumerate_window(fam, radius, w)?
        }
        _ => Ball::enumerate(fam, radius)?,
    };
    let hit = ball
        .members()
        .par_iter()
        .map(|h| is_between(cone, h, g).map(|b| b.then(|| h.clone())).transpose())
        .find_map_first(|x| x)
        .transpose()?;
    if let Some(h) = hit {
        return Ok(Some(DensityWitness { element: h, source: WitnessSource::Ball }));
    }
    if let Some(h) = cone.analytic_witness(g) {
        if fam.check(&h).is_ok() && is_between(cone, &h, g)? {
            return Ok(Some(DensityWitness { element: h, source: WitnessSource::Analytic }));
        }
    }
    Ok(None)
}
