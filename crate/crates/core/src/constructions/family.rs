//! Parameter families of basic spaces indexed by `n`, meant to be glued.
//!
//! Members are returned as parameters rather than built spaces: the
//! divergent families have `τ_n` far beyond anything a dense matrix can
//! hold, and are evaluated through [`crate::maximal::orbit`] instead.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::constructions::basic::{basic_s, basic_t, BasicParams};
use crate::constructions::descriptor::Descriptor;
use crate::constructions::glue::{glue_layout, Glued};
use crate::error::{Error, Result};
use crate::maximal::orbit::OrbitSpace;
use crate::rational::{format_rational, from_biguint, int, pow_ceil, pow_floor, rat, serde_q, Rational};
use crate::space::MetricMeasureSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    S,
    T,
}

impl Variant {
    /// Upper end of the admissible `d` range, 2 for S and 3 for T.
    pub fn d_cap(self) -> Rational {
        match self {
            Variant::S => int(2),
            Variant::T => int(3),
        }
    }

    pub fn build(self, params: &BasicParams) -> Result<MetricMeasureSpace> {
        match self {
            Variant::S => basic_s(params),
            Variant::T => basic_t(params),
        }
    }

    pub fn orbits(self, params: &BasicParams) -> Result<OrbitSpace> {
        match self {
            Variant::S => OrbitSpace::basic_s(params),
            Variant::T => OrbitSpace::basic_t(params),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(with = "serde_q")]
    pub k: Rational,
    #[serde(with = "serde_q")]
    pub p: Rational,
    #[serde(with = "serde_q")]
    pub epsilon: Rational,
    #[serde(with = "serde_q")]
    pub delta: Rational,
    #[serde(rename = "N")]
    pub big_n: u64,
    /// First index; defaults to `N + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_from: Option<u64>,
    pub n_max: u64,
}

impl FamilyParams {
    pub fn first_index(&self) -> u64 {
        self.n_from.unwrap_or(self.big_n + 1)
    }

    fn check(&self, variant: Variant) -> Result<()> {
        let cap = variant.d_cap();
        let bad = |what: String| Err(Error::InvalidParams(what));
        if !(self.k >= int(1) && self.k < cap) {
            return bad(format!("k = {} outside [1, {})", format_rational(&self.k), format_rational(&cap)));
        }
        if self.p < int(1) {
            return bad(format!("p = {} below 1", format_rational(&self.p)));
        }
        if !(self.epsilon > int(0) && self.epsilon <= rat(1, 4)) {
            return bad(format!("epsilon = {} outside (0, 1/4]", format_rational(&self.epsilon)));
        }
        if !(self.delta > int(0) && self.delta < &cap - &self.k) {
            return bad(format!(
                "delta = {} outside (0, {})",
                format_rational(&self.delta),
                format_rational(&(&cap - &self.k))
            ));
        }
        if self.big_n == 0 {
            return bad("N must be positive".into());
        }
        if self.first_index() <= self.big_n {
            return bad(format!("indices must exceed N = {}", self.big_n));
        }
        if self.n_max < self.first_index() {
            return bad(format!("empty index range {}..={}", self.first_index(), self.n_max));
        }
        Ok(())
    }

    /// `τ_n = ⌈N^{2p}⌉·⌊n^{p(p-1)/ε}⌋`, `d_n = k + δ/n`, `m_n = ⌈n^{p/ε}⌉`.
    pub fn member(&self, n: u64) -> BasicParams {
        let big_n = BigUint::from(self.big_n);
        let nn = BigUint::from(n);
        let tau_exp = &self.p * (&self.p - int(1)) / &self.epsilon;
        let tau = pow_ceil(&big_n, &(&self.p * int(2))) * pow_floor(&nn, &tau_exp);
        let m = pow_ceil(&nn, &(&self.p / &self.epsilon));
        BasicParams {
            tau,
            d: &self.k + &self.delta / int(n as i64),
            m: from_biguint(&m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma7Mode {
    /// `d_n = k`.
    Strict,
    /// `d_n = k + (cap - k)/n`.
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma7Params {
    #[serde(with = "serde_q")]
    pub k: Rational,
    pub mode: Lemma7Mode,
    pub n_max: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub n: u64,
    pub params: BasicParams,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub variant: Variant,
    /// Gluing constant the family is meant to be combined with.
    pub k0: Rational,
    pub descriptor: Descriptor,
    pub members: Vec<FamilyMember>,
}

impl Family {
    /// Dense spaces for every member; fails once a member is too large.
    pub fn explicit_spaces(&self) -> Result<Vec<MetricMeasureSpace>> {
        self.members
            .iter()
            .map(|m| self.variant.build(&m.params))
            .collect()
    }

    pub fn orbit_spaces(&self) -> Result<Vec<OrbitSpace>> {
        self.members
            .iter()
            .map(|m| self.variant.orbits(&m.params))
            .collect()
    }

    pub fn glue(&self) -> Result<Glued> {
        glue_layout(&self.k0, &self.explicit_spaces()?)
    }
}

fn lemma6_family(params: &FamilyParams, variant: Variant) -> Result<Family> {
    params.check(variant)?;
    let members = (params.first_index()..=params.n_max)
        .map(|n| FamilyMember {
            n,
            params: params.member(n),
        })
        .collect();
    let descriptor = match variant {
        Variant::S => Descriptor::Lemma6(params.clone()),
        Variant::T => Descriptor::Lemma6p(params.clone()),
    };
    Ok(Family {
        variant,
        k0: &params.k + &params.delta,
        descriptor,
        members,
    })
}

/// S spaces with `k ∈ [1,2)`, `δ ∈ (0, 2-k)`, glued with `k0 = k + δ`.
pub fn family_lemma6(params: &FamilyParams) -> Result<Family> {
    lemma6_family(params, Variant::S)
}

/// T spaces with `k ∈ [1,3)`, `δ ∈ (0, 3-k)`, glued with `k0 = k + δ`.
pub fn family_lemma6p(params: &FamilyParams) -> Result<Family> {
    lemma6_family(params, Variant::T)
}

fn lemma7_family(params: &Lemma7Params, variant: Variant) -> Result<Family> {
    let cap = variant.d_cap();
    let k = &params.k;
    let ok = match params.mode {
        Lemma7Mode::Strict => *k > int(1) && *k <= cap,
        Lemma7Mode::Weak => *k >= int(1) && *k < cap,
    };
    if !ok {
        return Err(Error::InvalidParams(format!(
            "k = {} outside the {:?} range for cap {}",
            format_rational(k),
            params.mode,
            format_rational(&cap)
        )));
    }
    if params.n_max == 0 {
        return Err(Error::InvalidParams("n_max must be positive".into()));
    }
    let members = (1..=params.n_max)
        .map(|n| {
            let d = match params.mode {
                Lemma7Mode::Strict => k.clone(),
                Lemma7Mode::Weak => k + (&cap - k) / int(n as i64),
            };
            FamilyMember {
                n,
                params: BasicParams::new(n, d, int(2)),
            }
        })
        .collect();
    let descriptor = match variant {
        Variant::S => Descriptor::Lemma7(params.clone()),
        Variant::T => Descriptor::Lemma7p(params.clone()),
    };
    Ok(Family {
        variant,
        k0: cap,
        descriptor,
        members,
    })
}

/// S spaces with `τ_n = n`, `m_n = 2`, glued with `k0 = 2`.
pub fn family_lemma7(params: &Lemma7Params) -> Result<Family> {
    lemma7_family(params, Variant::S)
}

/// T spaces with `τ_n = n`, `m_n = 2`, glued with `k0 = 3`.
pub fn family_lemma7p(params: &Lemma7Params) -> Result<Family> {
    lemma7_family(params, Variant::T)
}
