//! Seeded random finite metric measure spaces for randomized testing.
//!
//! Edge lengths come from a small fixed set so that distance ties are
//! common; the metric is the shortest-path closure of the complete graph.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::rational::{int, rat};
use crate::space::{indexed_label, MetricMeasureSpace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomParams {
    pub points: usize,
    pub seed: u64,
}

pub fn random_space(params: &RandomParams) -> Result<MetricMeasureSpace> {
    let n = params.points;
    if n == 0 {
        return Err(Error::InvalidParams("random space needs at least one point".into()));
    }
    let lengths = [int(1), rat(3, 2), int(2), rat(5, 2), int(3), int(4)];
    let weights = [rat(1, 3), rat(1, 2), int(1), int(2), int(5)];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut dist = vec![vec![int(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = lengths.choose(&mut rng).expect("nonempty").clone();
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    for via in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = &dist[i][via] + &dist[via][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    let weight = (0..n).map(|_| weights.choose(&mut rng).expect("nonempty").clone()).collect();
    let labels = (0..n as u64).map(|i| indexed_label("z", &[i])).collect();
    let provenance = Descriptor::Random(params.clone()).to_json();
    MetricMeasureSpace::from_fn(labels, weight, provenance, |i, j| dist[i][j].clone())
}

/// `count` spaces with sizes cycling through `1..=max_points`, seeded
/// from `seed`.
pub fn random_spaces(count: usize, max_points: usize, seed: u64) -> Result<Vec<MetricMeasureSpace>> {
    (0..count)
        .map(|i| {
            random_space(&RandomParams {
                points: 1 + i % max_points.max(1),
                seed: seed.wrapping_add(i as u64),
            })
        })
        .collect()
}
