//! Maximal operators on spaces described up to symmetry.
//!
//! An [`OrbitSpace`] lists orbits of an isometry group that preserves the
//! measure, with a distance profile from a representative of each orbit
//! to every orbit. For functions constant on orbits the maximal functions
//! are constant on orbits too, and they can be computed from the profiles
//! alone. This is what makes the basic spaces with `τ ≈ 10^16` atoms
//! tractable.
//!
//! The noncentered formula also needs the group to act transitively on
//! each orbit, so that every distance in a profile is realized from every
//! point of the target orbit.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::constructions::basic::BasicParams;
use crate::error::{Error, Result};
use crate::maximal::{check_k, OpKind};
use crate::rational::{from_biguint, int, rat, Rational};
use crate::space::{indexed_label, MetricMeasureSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Label of the representative point in the explicit construction.
    pub label: String,
    pub size: BigUint,
    /// Weight of each atom of the orbit.
    pub weight: Rational,
}

impl Orbit {
    pub fn mass(&self) -> Rational {
        from_biguint(&self.size) * &self.weight
    }
}

/// `(distance, count)` pairs from one representative to one orbit.
pub type Profile = Vec<(Rational, BigUint)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSpace {
    orbits: Vec<Orbit>,
    /// `profile[a][b]`: distances from the representative of `a` to `b`.
    profile: Vec<Vec<Profile>>,
}

impl OrbitSpace {
    pub fn new(orbits: Vec<Orbit>, profile: Vec<Vec<Profile>>) -> Result<Self> {
        let n = orbits.len();
        if n == 0 || profile.len() != n || profile.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension("profile must be square over the orbits".into()));
        }
        for (a, row) in profile.iter().enumerate() {
            for (b, entries) in row.iter().enumerate() {
                let count: BigUint = entries.iter().map(|(_, c)| c).sum();
                if count != orbits[b].size {
                    return Err(Error::InvalidParams(format!(
                        "profile {a}->{b} counts {count} atoms, orbit has {}",
                        orbits[b].size
                    )));
                }
                let zeros: BigUint = entries
                    .iter()
                    .filter(|(d, _)| d.is_zero())
                    .map(|(_, c)| c)
                    .sum();
                let expected = if a == b { BigUint::one() } else { BigUint::zero() };
                if zeros != expected {
                    return Err(Error::InvalidParams(format!(
                        "profile {a}->{b} has {zeros} atoms at distance 0"
                    )));
                }
            }
        }
        Ok(Self { orbits, profile })
    }

    /// Every point its own orbit.
    pub fn from_space(space: &MetricMeasureSpace) -> Self {
        let orbits = (0..space.len())
            .map(|i| Orbit {
                label: space.label(i).to_string(),
                size: BigUint::one(),
                weight: space.weight(i).clone(),
            })
            .collect();
        let profile = (0..space.len())
            .map(|a| {
                (0..space.len())
                    .map(|b| vec![(space.dist(a, b).clone(), BigUint::one())])
                    .collect()
            })
            .collect();
        Self { orbits, profile }
    }

    /// Orbits `x[0]`, `x[1]` and `{x[2], ..., x[τ]}` of the star space.
    pub fn basic_s(params: &BasicParams) -> Result<Self> {
        params.check_s()?;
        let tau = params.tau.clone();
        let rest = &tau - 1u32;
        let one = int(1);
        let d = params.d.clone();
        let c1 = BigUint::one();
        let mut orbits = vec![
            Orbit { label: indexed_label("x", &[0]), size: c1.clone(), weight: int(1) },
            Orbit { label: indexed_label("x", &[1]), size: c1.clone(), weight: params.m.clone() },
        ];
        let mut profile = vec![
            vec![vec![(Rational::zero(), c1.clone())], vec![(one.clone(), c1.clone())]],
            vec![vec![(one.clone(), c1.clone())], vec![(Rational::zero(), c1.clone())]],
        ];
        if !rest.is_zero() {
            orbits.push(Orbit {
                label: indexed_label("x", &[2]),
                size: rest.clone(),
                weight: params.m.clone(),
            });
            profile[0].push(vec![(one.clone(), rest.clone())]);
            profile[1].push(vec![(d.clone(), rest.clone())]);
            profile.push(vec![
                vec![(one, c1.clone())],
                vec![(d.clone(), c1.clone())],
                nonzero(vec![(Rational::zero(), c1), (d, &rest - 1u32)]),
            ]);
        }
        Self::new(orbits, profile)
    }

    /// Orbits `y0`, `yc[1]`, `yp[1]`, `{yc[2..]}`, `{yp[2..]}` of the
    /// two-layer space.
    pub fn basic_t(params: &BasicParams) -> Result<Self> {
        params.check_t()?;
        let tau = params.tau.clone();
        let rest = &tau - 1u32;
        let d = params.d.clone();
        let h = (&d + int(1)) * rat(1, 2);
        let one = int(1);
        let zero = Rational::zero();
        let c1 = BigUint::one();
        let inner = Rational::new(1.into(), tau.clone().into());
        let mut orbits = vec![
            Orbit { label: "y0".into(), size: c1.clone(), weight: int(1) },
            Orbit { label: indexed_label("yc", &[1]), size: c1.clone(), weight: inner.clone() },
            Orbit { label: indexed_label("yp", &[1]), size: c1.clone(), weight: params.m.clone() },
        ];
        let p = |d: &Rational, c: &BigUint| vec![(d.clone(), c.clone())];
        let mut profile = vec![
            vec![p(&zero, &c1), p(&one, &c1), p(&h, &c1)],
            vec![p(&one, &c1), p(&zero, &c1), p(&one, &c1)],
            vec![p(&h, &c1), p(&one, &c1), p(&zero, &c1)],
        ];
        if !rest.is_zero() {
            orbits.push(Orbit {
                label: indexed_label("yc", &[2]),
                size: rest.clone(),
                weight: inner,
            });
            orbits.push(Orbit {
                label: indexed_label("yp", &[2]),
                size: rest.clone(),
                weight: params.m.clone(),
            });
            let others = &rest - 1u32;
            profile[0].extend([p(&one, &rest), p(&h, &rest)]);
            profile[1].extend([p(&h, &rest), p(&d, &rest)]);
            profile[2].extend([p(&d, &rest), p(&h, &rest)]);
            profile.push(vec![
                p(&one, &c1),
                p(&h, &c1),
                p(&d, &c1),
                nonzero(vec![(zero.clone(), c1.clone()), (h.clone(), others.clone())]),
                nonzero(vec![(one.clone(), c1.clone()), (d.clone(), others.clone())]),
            ]);
            profile.push(vec![
                p(&h, &c1),
                p(&d, &c1),
                p(&h, &c1),
                nonzero(vec![(one, c1.clone()), (d, others.clone())]),
                nonzero(vec![(zero, c1), (h, others)]),
            ]);
        }
        Self::new(orbits, profile)
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.orbits
            .iter()
            .position(|o| o.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Measure of each orbit.
    pub fn masses(&self) -> Vec<Rational> {
        self.orbits.iter().map(Orbit::mass).collect()
    }

    pub fn total_measure(&self) -> Rational {
        self.masses().iter().sum()
    }

    fn ball_ratios(&self, a: usize, k: &Rational, f: &[Rational]) -> Vec<(Rational, Rational)> {
        let mut cuts: Vec<Rational> = self.profile[a]
            .iter()
            .flatten()
            .filter(|(d, _)| !d.is_zero())
            .flat_map(|(d, _)| [d.clone(), d / k])
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut radii = Vec::new();
        match (cuts.first(), cuts.last()) {
            (Some(first), Some(last)) => {
                radii.push(first * rat(1, 2));
                radii.extend(cuts.windows(2).map(|w| (&w[0] + &w[1]) * rat(1, 2)));
                radii.push(last + int(1));
            }
            _ => radii.push(int(1)),
        }
        radii
            .into_iter()
            .map(|r| {
                let kr = k * &r;
                let mut top = Rational::zero();
                let mut bottom = Rational::zero();
                for (b, entries) in self.profile[a].iter().enumerate() {
                    let o = &self.orbits[b];
                    for (d, c) in entries {
                        let mass = from_biguint(c) * &o.weight;
                        if *d < r {
                            top += &mass * &f[b];
                        }
                        if *d < kr {
                            bottom += mass;
                        }
                    }
                }
                (r, top / bottom)
            })
            .collect()
    }

    /// Maximal function of an orbit-constant `f`, one value per orbit.
    pub fn evaluate(&self, k: &Rational, op: OpKind, f: &[Rational]) -> Result<Vec<Rational>> {
        check_k(k)?;
        if f.len() != self.len() {
            return Err(Error::Dimension(format!(
                "function has {} values, space has {} orbits",
                f.len(),
                self.len()
            )));
        }
        let tables: Vec<_> = (0..self.len()).map(|a| self.ball_ratios(a, k, f)).collect();
        let best = |it: &mut dyn Iterator<Item = &Rational>| it.max().cloned().expect("nonempty");
        Ok(match op {
            OpKind::Centered => tables
                .iter()
                .map(|t| best(&mut t.iter().map(|(_, v)| v)))
                .collect(),
            OpKind::Noncentered => (0..self.len())
                .map(|a| {
                    let mut it = (0..self.len()).flat_map(|b| {
                        let reach = self.profile[b][a]
                            .iter()
                            .map(|(d, _)| d)
                            .min()
                            .expect("orbits are nonempty")
                            .clone();
                        tables[b]
                            .iter()
                            .filter(move |(r, _)| *r > reach)
                            .map(|(_, v)| v)
                    });
                    best(&mut it)
                })
                .collect(),
        })
    }
}

fn nonzero(entries: Profile) -> Profile {
    entries.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}
