//! The star space `S_{τ,d,m}` and the two-layer space `T_{τ,d,m}`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::constructions::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, rat, serde_q, Rational};
use crate::space::{indexed_label, MetricMeasureSpace};

/// Largest point count the dense explicit builders will materialize.
pub const EXPLICIT_POINT_LIMIT: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicParams {
    #[serde(with = "crate::constructions::serde_biguint")]
    pub tau: BigUint,
    #[serde(with = "serde_q")]
    pub d: Rational,
    #[serde(with = "serde_q")]
    pub m: Rational,
}

impl BasicParams {
    pub fn new(tau: u64, d: Rational, m: Rational) -> Self {
        Self {
            tau: BigUint::from(tau),
            d,
            m,
        }
    }

    pub fn check_s(&self) -> Result<()> {
        self.check(&int(2), "S")
    }

    pub fn check_t(&self) -> Result<()> {
        self.check(&int(3), "T")
    }

    fn check(&self, d_max: &Rational, which: &str) -> Result<()> {
        if self.tau < BigUint::one() {
            return Err(Error::InvalidParams(format!("{which}: tau must be at least 1")));
        }
        if !(self.d > Rational::one() && &self.d <= d_max) {
            return Err(Error::InvalidParams(format!(
                "{which}: d = {} outside (1, {}]",
                format_rational(&self.d),
                format_rational(d_max)
            )));
        }
        if self.m <= Rational::one() {
            return Err(Error::InvalidParams(format!(
                "{which}: m = {} must exceed 1",
                format_rational(&self.m)
            )));
        }
        Ok(())
    }

    fn tau_usize(&self, per_tau: u32) -> Result<usize> {
        let points = &self.tau * per_tau + 1u32;
        match points.to_usize() {
            Some(n) if n <= EXPLICIT_POINT_LIMIT => Ok(self.tau.to_usize().unwrap()),
            _ => Err(Error::TooLarge {
                points: points.to_string(),
                limit: EXPLICIT_POINT_LIMIT,
            }),
        }
    }
}

/// `x[0]` at distance 1 from every `x[i]`; distinct `x[i]`, `x[j]` at
/// distance `d`. Weights: 1 on `x[0]`, `m` elsewhere.
pub fn basic_s(params: &BasicParams) -> Result<MetricMeasureSpace> {
    params.check_s()?;
    let tau = params.tau_usize(1)?;
    let labels = (0..=tau as u64).map(|i| indexed_label("x", &[i])).collect();
    let mut weight = vec![params.m.clone(); tau + 1];
    weight[0] = int(1);
    let one = int(1);
    let provenance = Descriptor::BasicS(params.clone()).to_json();
    MetricMeasureSpace::from_fn(labels, weight, provenance, |i, j| {
        if i == 0 || j == 0 {
            one.clone()
        } else {
            params.d.clone()
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TRole {
    Root,
    Inner(usize),
    Outer(usize),
}

/// Index layout of `basic_t`: `y0`, then `yc[1..τ]`, then `yp[1..τ]`.
pub fn t_role(index: usize, tau: usize) -> TRole {
    match index {
        0 => TRole::Root,
        i if i <= tau => TRole::Inner(i),
        i => TRole::Outer(i - tau),
    }
}

/// Distance in `T_{τ,d,m}` between two distinct roles.
pub fn t_distance(a: TRole, b: TRole, d: &Rational) -> Rational {
    use TRole::*;
    let half = (d + int(1)) * rat(1, 2);
    match (a, b) {
        (Root, Inner(_)) | (Inner(_), Root) => int(1),
        (Inner(i), Outer(j)) | (Outer(j), Inner(i)) if i == j => int(1),
        (Inner(_), Inner(_)) => half,
        (Root, Outer(_)) | (Outer(_), Root) | (Outer(_), Outer(_)) => half,
        _ => d.clone(),
    }
}

/// `y0`, inner layer `yc[i]` (weight `1/τ`) and outer layer `yp[i]`
/// (weight `m`), with the three-valued metric `1`, `(d+1)/2`, `d`.
pub fn basic_t(params: &BasicParams) -> Result<MetricMeasureSpace> {
    params.check_t()?;
    let tau = params.tau_usize(2)?;
    let mut labels = vec!["y0".to_string()];
    labels.extend((1..=tau as u64).map(|i| indexed_label("yc", &[i])));
    labels.extend((1..=tau as u64).map(|i| indexed_label("yp", &[i])));
    let inner = Rational::new(1.into(), params.tau.clone().into());
    let weight = (0..=2 * tau)
        .map(|i| match t_role(i, tau) {
            TRole::Root => int(1),
            TRole::Inner(_) => inner.clone(),
            TRole::Outer(_) => params.m.clone(),
        })
        .collect();
    let provenance = Descriptor::BasicT(params.clone()).to_json();
    MetricMeasureSpace::from_fn(labels, weight, provenance, |i, j| {
        t_distance(t_role(i, tau), t_role(j, tau), &params.d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{diameter, total_measure, validate_metric};

    #[test]
    fn s_example() {
        let s = basic_s(&BasicParams::new(2, rat(3, 2), int(2))).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(0, 1), &int(1));
        assert_eq!(s.dist(1, 2), &rat(3, 2));
        assert_eq!(s.weights(), &[int(1), int(2), int(2)]);
        assert_eq!(total_measure(&s), int(5));
        assert_eq!(diameter(&s), rat(3, 2));
        assert!(validate_metric(&s).ok);
    }

    #[test]
    fn t_example() {
        let t = basic_t(&BasicParams::new(1, int(2), int(3))).unwrap();
        let y0 = t.index_of("y0").unwrap();
        let yc = t.index_of("yc[1]").unwrap();
        let yp = t.index_of("yp[1]").unwrap();
        assert_eq!(t.dist(y0, yc), &int(1));
        assert_eq!(t.dist(yc, yp), &int(1));
        assert_eq!(t.dist(y0, yp), &rat(3, 2));
        assert_eq!(t.weights(), &[int(1), int(1), int(3)]);
        let t2 = basic_t(&BasicParams::new(2, int(2), int(3))).unwrap();
        assert_eq!(total_measure(&t2), int(8));
        assert!(validate_metric(&t2).ok);
    }

    #[test]
    fn ranges_are_enforced() {
        assert!(basic_s(&BasicParams::new(2, int(1), int(2))).is_err());
        assert!(basic_s(&BasicParams::new(2, rat(5, 2), int(2))).is_err());
        assert!(basic_s(&BasicParams::new(2, rat(3, 2), int(1))).is_err());
        assert!(basic_s(&BasicParams::new(0, rat(3, 2), int(2))).is_err());
        assert!(basic_t(&BasicParams::new(2, int(3), int(2))).is_ok());
        assert!(basic_t(&BasicParams::new(2, rat(7, 2), int(2))).is_err());
    }

    #[test]
    fn huge_tau_is_refused_explicitly() {
        let p = BasicParams {
            tau: BigUint::from(10u64).pow(12),
            d: rat(3, 2),
            m: int(2),
        };
        assert!(matches!(basic_s(&p), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn grid_is_valid() {
        for tau in 1..=4 {
            for d in [rat(5, 4), rat(3, 2), int(2)] {
                for m in [rat(3, 2), int(4)] {
                    let p = BasicParams::new(tau, d.clone(), m.clone());
                    assert!(validate_metric(&basic_s(&p).unwrap()).ok);
                    assert!(validate_metric(&basic_t(&p).unwrap()).ok);
                }
            }
            let p = BasicParams::new(tau, rat(5, 2), int(3));
            assert!(validate_metric(&basic_t(&p).unwrap()).ok);
        }
    }
}
