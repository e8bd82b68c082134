//! Branch spaces with two-valued metrics and halving branch measures, and
//! the three-valued modification of the second kind.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constructions::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, rat, Rational};
use crate::space::{indexed_label, MetricMeasureSpace};

/// Positive weight function `F(n, i)` with 1-based `n` and `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightRule {
    Constant(Rational),
    /// `table[n-1][i-1]`.
    Table(Vec<Vec<Rational>>),
}

impl WeightRule {
    pub fn value(&self, n: usize, i: usize) -> Result<Rational> {
        let v = match self {
            WeightRule::Constant(c) => c.clone(),
            WeightRule::Table(rows) => rows
                .get(n - 1)
                .and_then(|row| row.get(i - 1))
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidParams(format!("weight table has no entry for (n={n}, i={i})"))
                })?,
        };
        if !v.is_positive() {
            return Err(Error::InvalidParams(format!(
                "weight F({n},{i}) = {} is not positive",
                format_rational(&v)
            )));
        }
        Ok(v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightRuleJson {
    Constant(String),
    Table(Vec<Vec<String>>),
}

impl Serialize for WeightRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WeightRule::Constant(c) => WeightRuleJson::Constant(format_rational(c)),
            WeightRule::Table(rows) => WeightRuleJson::Table(
                rows.iter()
                    .map(|r| r.iter().map(format_rational).collect())
                    .collect(),
            ),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parse = |t: &str| parse_rational(t).map_err(serde::de::Error::custom);
        match WeightRuleJson::deserialize(d)? {
            WeightRuleJson::Constant(c) => Ok(WeightRule::Constant(parse(&c)?)),
            WeightRuleJson::Table(rows) => Ok(WeightRule::Table(
                rows.iter()
                    .map(|r| r.iter().map(|t| parse(t)).collect())
                    .collect::<std::result::Result<_, _>>()?,
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstGenParams {
    pub tau: Vec<u64>,
    #[serde(rename = "F")]
    pub f: WeightRule,
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondGenParams {
    pub tau_star: Vec<u64>,
    #[serde(rename = "F_star")]
    pub f_star: WeightRule,
    pub n_max: usize,
}

fn check_branches(tau: &[u64], n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    if tau.len() < n_max {
        return Err(Error::InvalidParams(format!(
            "{} branch sizes given for n_max = {n_max}",
            tau.len()
        )));
    }
    if tau[..n_max].contains(&0) {
        return Err(Error::InvalidParams("branch sizes must be positive".into()));
    }
    Ok(())
}

/// Branches `S_n = {x[n], x[n,1..τ_n]}`: distance 1 between `x[n]` and
/// its own leaves, 2 otherwise. `μ(x[n]) = d_n`, `μ(x[n,i]) = d_n F(n,i)`,
/// with `d_1 = 1` and `μ(S_n) = μ(S_{n-1})/2`.
pub fn first_generation(params: &FirstGenParams) -> Result<MetricMeasureSpace> {
    check_branches(&params.tau, params.n_max)?;
    let mut labels = Vec::new();
    let mut weight = Vec::new();
    // (branch, position) with position 0 for the branch center.
    let mut role = Vec::new();
    let mut prev_branch = Rational::zero();
    for n in 1..=params.n_max {
        let tau = params.tau[n - 1] as usize;
        let f: Vec<Rational> = (1..=tau)
            .map(|i| params.f.value(n, i))
            .collect::<Result<_>>()?;
        let relative = f.iter().fold(int(1), |acc, v| acc + v);
        let d_n = if n == 1 {
            int(1)
        } else {
            &prev_branch * rat(1, 2) / &relative
        };
        if !d_n.is_positive() {
            return Err(Error::InvalidParams(format!("solved d_{n} is not positive")));
        }
        prev_branch = &d_n * &relative;
        labels.push(indexed_label("x", &[n as u64]));
        weight.push(d_n.clone());
        role.push((n, 0));
        for (i, fi) in f.iter().enumerate() {
            labels.push(indexed_label("x", &[n as u64, i as u64 + 1]));
            weight.push(&d_n * fi);
            role.push((n, i + 1));
        }
    }
    let provenance = Descriptor::FirstGeneration(params.clone()).to_json();
    MetricMeasureSpace::from_fn(labels, weight, provenance, |a, b| {
        let ((na, ia), (nb, ib)) = (role[a], role[b]);
        if na == nb && (ia == 0 || ib == 0) {
            int(1)
        } else {
            int(2)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SecondRole {
    Center(usize),
    Near(usize, usize),
    Far(usize, usize),
}

/// Branches `T_n = {y[n], y[n,i], yp[n,i]}`: distance 1 for the pairs
/// `{y[n,i], yp[n,i]}` and `{y[n], y[n,i]}`, 2 otherwise.
/// `μ(y[n]) = d*_n`, `μ(y[n,i]) = d*_n/τ*_n`, `μ(yp[n,i]) = d*_n F*(n,i)`,
/// with `d*_1 = 1` and `μ(T_n) = μ(T_{n-1})/2`.
pub fn second_generation(params: &SecondGenParams) -> Result<MetricMeasureSpace> {
    check_branches(&params.tau_star, params.n_max)?;
    let mut labels = Vec::new();
    let mut weight = Vec::new();
    let mut role = Vec::new();
    let mut prev_branch = Rational::zero();
    for n in 1..=params.n_max {
        let tau = params.tau_star[n - 1] as usize;
        let f: Vec<Rational> = (1..=tau)
            .map(|i| params.f_star.value(n, i))
            .collect::<Result<_>>()?;
        let relative = f.iter().fold(int(2), |acc, v| acc + v);
        let d_n = if n == 1 {
            int(1)
        } else {
            &prev_branch * rat(1, 2) / &relative
        };
        if !d_n.is_positive() {
            return Err(Error::InvalidParams(format!("solved d*_{n} is not positive")));
        }
        prev_branch = &d_n * &relative;
        let near = &d_n / int(tau as i64);
        labels.push(indexed_label("y", &[n as u64]));
        weight.push(d_n.clone());
        role.push(SecondRole::Center(n));
        for i in 1..=tau {
            labels.push(indexed_label("y", &[n as u64, i as u64]));
            weight.push(near.clone());
            role.push(SecondRole::Near(n, i));
        }
        for (i, fi) in f.iter().enumerate() {
            labels.push(indexed_label("yp", &[n as u64, i as u64 + 1]));
            weight.push(&d_n * fi);
            role.push(SecondRole::Far(n, i + 1));
        }
    }
    let provenance = Descriptor::SecondGeneration(params.clone()).to_json();
    MetricMeasureSpace::from_fn(labels, weight, provenance, |a, b| {
        use SecondRole::*;
        let unit = match (role[a], role[b]) {
            (Center(n), Near(m, _)) | (Near(m, _), Center(n)) => n == m,
            (Near(n, i), Far(m, j)) | (Far(m, j), Near(n, i)) => n == m && i == j,
            _ => false,
        };
        if unit {
            int(1)
        } else {
            int(2)
        }
    })
}

fn unit_neighbors(space: &MetricMeasureSpace) -> Result<Vec<Vec<usize>>> {
    let n = space.len();
    let (one, two) = (int(1), int(2));
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = space.dist(i, j);
            if *d == one {
                adj[i].push(j);
            } else if *d != two {
                return Err(Error::Precondition(format!(
                    "distance {} between {} and {} is not 1 or 2",
                    format_rational(d),
                    space.label(i),
                    space.label(j)
                )));
            }
        }
    }
    Ok(adj)
}

/// Three unit-distance points that are pairwise at distance 1, if any.
pub fn find_unit_triangle(space: &MetricMeasureSpace) -> Result<Option<[usize; 3]>> {
    let adj = unit_neighbors(space)?;
    for (x, nx) in adj.iter().enumerate() {
        for &y in nx.iter().filter(|&&y| y > x) {
            if let Some(&z) = adj[y].iter().find(|&&z| z > y && nx.contains(&z)) {
                return Ok(Some([x, y, z]));
            }
        }
    }
    Ok(None)
}

/// `ρ'(x,y) = 1` where `ρ = 1`; `2` where some `z` is at unit distance from
/// both; `3` otherwise. Weights unchanged.
pub fn lemma1_modify(space: &MetricMeasureSpace) -> Result<MetricMeasureSpace> {
    if let Some([x, y, z]) = find_unit_triangle(space)? {
        return Err(Error::Precondition(format!(
            "unit triangle {{{}, {}, {}}} makes the modified metric ambiguous",
            space.label(x),
            space.label(y),
            space.label(z)
        )));
    }
    let adj = unit_neighbors(space)?;
    let base = Descriptor::from_provenance(space.provenance());
    let provenance = Descriptor::Lemma1Modify {
        base: Box::new(base),
    }
    .to_json();
    let labels = space.points().iter().map(|p| p.label.clone()).collect();
    MetricMeasureSpace::from_fn(labels, space.weights().to_vec(), provenance, |x, y| {
        if adj[x].contains(&y) {
            int(1)
        } else if adj[x].iter().any(|z| adj[y].contains(z)) {
            int(2)
        } else {
            int(3)
        }
    })
}

/// `μ` of the union of a branch, for checking the halving recursion.
pub fn branch_measure(space: &MetricMeasureSpace, n: u64) -> Rational {
    space
        .points()
        .iter()
        .filter(|p| p.parts().1.first() == Some(&n))
        .fold(Rational::zero(), |acc, p| acc + space.weight(p.index))
}

impl Default for WeightRule {
    fn default() -> Self {
        WeightRule::Constant(Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::validate_metric;

    #[test]
    fn first_generation_two_branches() {
        let s = first_generation(&FirstGenParams {
            tau: vec![1, 1],
            f: WeightRule::Constant(int(1)),
            n_max: 2,
        })
        .unwrap();
        assert_eq!(branch_measure(&s, 1), int(2));
        assert_eq!(s.weight(s.index_of("x[2]").unwrap()), &rat(1, 2));
        assert_eq!(branch_measure(&s, 2), int(1));
        assert!(validate_metric(&s).ok);
    }

    #[test]
    fn first_generation_single_branch() {
        let s = first_generation(&FirstGenParams {
            tau: vec![1],
            f: WeightRule::Constant(int(1)),
            n_max: 1,
        })
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(0, 1), &int(1));
        assert_eq!(s.weights(), &[int(1), int(1)]);
    }

    #[test]
    fn second_generation_examples() {
        let one = second_generation(&SecondGenParams {
            tau_star: vec![1],
            f_star: WeightRule::Constant(int(1)),
            n_max: 1,
        })
        .unwrap();
        let (y, yn, yp) = (
            one.index_of("y[1]").unwrap(),
            one.index_of("y[1,1]").unwrap(),
            one.index_of("yp[1,1]").unwrap(),
        );
        assert_eq!(one.weights(), &[int(1), int(1), int(1)]);
        assert_eq!(one.dist(y, yn), &int(1));
        assert_eq!(one.dist(yn, yp), &int(1));
        assert_eq!(one.dist(y, yp), &int(2));

        let two = second_generation(&SecondGenParams {
            tau_star: vec![1, 2],
            f_star: WeightRule::Constant(int(1)),
            n_max: 2,
        })
        .unwrap();
        assert_eq!(two.weight(two.index_of("y[2]").unwrap()), &rat(3, 8));
        assert!(find_unit_triangle(&two).unwrap().is_none());
        assert!(validate_metric(&two).ok);
    }

    #[test]
    fn modification_cases() {
        let base = second_generation(&SecondGenParams {
            tau_star: vec![1, 1],
            f_star: WeightRule::Constant(int(1)),
            n_max: 2,
        })
        .unwrap();
        let m = lemma1_modify(&base).unwrap();
        let at = |a: &str, b: &str| m.dist(m.index_of(a).unwrap(), m.index_of(b).unwrap()).clone();
        assert_eq!(at("y[1]", "yp[1,1]"), int(2));
        assert_eq!(at("y[1]", "y[1,1]"), int(1));
        assert_eq!(at("y[1]", "y[2]"), int(3));
        assert_eq!(at("yp[1,1]", "y[2,1]"), int(3));
        assert!(validate_metric(&m).ok);
        assert_eq!(m.weights(), base.weights());
    }

    #[test]
    fn modification_rejects_unit_triangle() {
        let tri = MetricMeasureSpace::from_fn(
            vec!["a".into(), "b".into(), "c".into()],
            vec![int(1); 3],
            "",
            |_, _| int(1),
        )
        .unwrap();
        assert!(matches!(lemma1_modify(&tri), Err(Error::Precondition(_))));
        let wrong = MetricMeasureSpace::from_fn(
            vec!["a".into(), "b".into()],
            vec![int(1); 2],
            "",
            |_, _| int(3),
        )
        .unwrap();
        assert!(lemma1_modify(&wrong).is_err());
    }

    #[test]
    fn table_weights_and_errors() {
        let rule = WeightRule::Table(vec![vec![int(2)], vec![rat(1, 3), int(5)]]);
        assert_eq!(rule.value(2, 2).unwrap(), int(5));
        assert!(rule.value(3, 1).is_err());
        assert!(WeightRule::Constant(int(0)).value(1, 1).is_err());
        let json = serde_json::to_string(&rule).unwrap();
        assert_eq!(serde_json::from_str::<WeightRule>(&json).unwrap(), rule);
        assert!(first_generation(&FirstGenParams {
            tau: vec![1],
            f: WeightRule::Constant(int(1)),
            n_max: 2,
        })
        .is_err());
    }
}
