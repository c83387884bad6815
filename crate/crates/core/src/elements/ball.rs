use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::{invert_unchecked, Element, Family};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: usize = 1_000_000;

static BUDGET: AtomicUsize = AtomicUsize::new(DEFAULT_BUDGET);

/// Element budget used by ball enumeration when none is given explicitly.
pub fn default_budget() -> usize {
    BUDGET.load(Ordering::Relaxed)
}

pub fn set_default_budget(limit: usize) {
    BUDGET.store(limit.max(1), Ordering::Relaxed);
}

/// The elements of word length at most `radius`, one representative per
/// group element, listed by increasing length. Closed under inversion.
#[derive(Debug, Clone)]
pub struct Ball {
    family: Family,
    radius: usize,
    generators: Vec<Element>,
    members: Vec<Element>,
    index: HashMap<Element, usize>,
}

type BraidKey = (i64, Vec<usize>);

impl Ball {
    pub fn enumerate(family: &Family, radius: usize) -> Result<Ball> {
        let gens = family.generators()?;
        Ball::with_generators(family, radius, gens, default_budget())
    }

    /// Ball in the countable free group over the generators `x_1..x_window`.
    pub fn enumerate_window(family: &Family, radius: usize, window: u32) -> Result<Ball> {
        let gens = family.generators_window(window);
        Ball::with_generators(family, radius, gens, default_budget())
    }

    pub fn with_generators(family: &Family, radius: usize, generators: Vec<Element>, budget: usize) -> Result<Ball> {
        for g in &generators {
            family.check(g)?;
        }
        let mut letters: Vec<Element> = Vec::new();
        for g in &generators {
            letters.push(g.clone());
            letters.push(invert_unchecked(g));
        }
        let braid = matches!(family, Family::Braid(_));
        let mut members = vec![family.identity()];
        let mut seen: HashSet<Element> = HashSet::new();
        let mut buckets: HashMap<BraidKey, Vec<usize>> = HashMap::new();
        if braid {
            buckets.entry(braid_key(&members[0])).or_default().push(0);
        } else {
            seen.insert(members[0].clone());
        }
        let mut frontier = vec![0usize];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for s in &letters {
                    let g = family.multiply(s, &members[u])?;
                    let fresh = if braid {
                        let key = braid_key(&g);
                        let bucket = buckets.entry(key).or_default();
                        let mut found = false;
                        for &j in bucket.iter() {
                            if family.equal(&members[j], &g)? {
                                found = true;
                                break;
                            }
                        }
                        if !found {
                            bucket.push(members.len());
                        }
                        !found
                    } else {
                        seen.insert(g.clone())
                    };
                    if fresh {
                        if members.len() >= budget {
                            return Err(Error::budget(format!("ball of radius {} in {}", radius, family), budget));
                        }
                        next.push(members.len());
                        members.push(g);
                    }
                }
            }
            frontier = next;
        }
        let index = if braid {
            HashMap::new()
        } else {
            members.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect()
        };
        Ok(Ball { family: family.clone(), radius, generators, members, index })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.members.iter()
    }

    /// Position of `g` in the ball, comparing as group elements.
    pub fn position(&self, g: &Element) -> Result<Option<usize>> {
        if let Family::Braid(_) = self.family {
            for (i, m) in self.members.iter().enumerate() {
                if braid_key(m) == braid_key(g) && self.family.equal(m, g)? {
                    return Ok(Some(i));
                }
            }
            Ok(None)
        } else {
            Ok(self.index.get(g).copied())
        }
    }

    pub fn contains(&self, g: &Element) -> Result<bool> {
        Ok(self.position(g)?.is_some())
    }
}

fn braid_key(g: &Element) -> BraidKey {
    let b = g.as_braid().expect("braid ball holds braids");
    (b.exponent_sum(), b.permutation())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_ball_size(n: u64, k: u32) -> u64 {
        1 + (1..=k).map(|j| 2 * n * (2 * n - 1).pow(j - 1)).sum::<u64>()
    }

    #[test]
    fn free_ball_sizes() {
        let f2 = Family::free(2);
        let b1 = Ball::enumerate(&f2, 1).unwrap();
        assert_eq!(b1.len(), 5);
        assert_eq!(Ball::enumerate(&f2, 2).unwrap().len(), 17);
        for k in 0..5 {
            assert_eq!(Ball::enumerate(&f2, k).unwrap().len() as u64, free_ball_size(2, k as u32));
            assert_eq!(
                Ball::enumerate(&Family::free(3), k).unwrap().len() as u64,
                free_ball_size(3, k as u32)
            );
        }
    }

    #[test]
    fn abelian_unit_ball() {
        let b = Ball::enumerate(&Family::Abelian(2), 1).unwrap();
        let mut got: Vec<String> = b.iter().map(|g| g.to_string()).collect();
        got.sort();
        assert_eq!(got, vec!["(-1,0)", "(0,-1)", "(0,0)", "(0,1)", "(1,0)"]);
    }

    #[test]
    fn balls_are_nested_and_symmetric() {
        for fam in [Family::free(2), Family::Tower(2), Family::Abelian(3), Family::Braid(3)] {
            let small = Ball::enumerate(&fam, 2).unwrap();
            let big = Ball::enumerate(&fam, 3).unwrap();
            for g in small.iter() {
                assert!(big.contains(g).unwrap());
                assert!(small.contains(&fam.invert(g).unwrap()).unwrap());
            }
            assert!(small.contains(&fam.identity()).unwrap());
        }
    }

    #[test]
    fn braid_ball_dedups_relations() {
        // s1 s2 s1 = s2 s1 s2 lands once
        let b3 = Family::Braid(3);
        let ball = Ball::enumerate(&b3, 3).unwrap();
        let hits = ball
            .iter()
            .filter(|g| b3.equal(g, &Element::braid(3, &[1, 2, 1])).unwrap())
            .count();
        assert_eq!(hits, 1);
        // free group on 2 letters would have 53 words of length <= 3
        assert!(ball.len() < 53);
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = Family::free(2);
        let gens = f2.generators().unwrap();
        let err = Ball::with_generators(&f2, 4, gens, 50).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
