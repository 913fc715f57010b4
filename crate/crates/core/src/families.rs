//! Seeded instance generators.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha), so a
//! spec reproduces the same matrix and factorization on every platform.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{BlockyCover, Rectangle};
use crate::error::{Error, Result};
use crate::factor::{canonical_blocky_factorization, compress, Factorization, DEFAULT_TOL};
use crate::gamma2::{group_lift, halfgraph_lower_bound, GroupFunction};
use crate::matrix::BooleanMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Identity { n: usize },
    AllOnes { m: usize, n: usize },
    HalfGraph { n: usize },
    /// Up to `blocks` disjoint rectangles; every row and column outside them is zero.
    RandomBlocky { m: usize, n: usize, blocks: usize, seed: u64 },
    /// `B1 - B2` with `B2` a blocky matrix carved out of the blocks of `B1`.
    /// `carve` is a lower bound on the fraction of each block's rows and
    /// columns taken by the carved parts (default: any nonempty proper subset).
    NestedBlockyDifference {
        m: usize,
        n: usize,
        blocks: usize,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carve: Option<f64>,
    },
    /// Translation matrix of a random `f` on `Z_2^k` with `P(f(x) = 1) = density`.
    GroupLiftRandom { k: usize, density: f64, seed: u64 },
    /// The half-graph `G_d` with rows and columns duplicated up to `m x n`
    /// and shuffled.
    StaircasePattern { d: usize, m: usize, n: usize, seed: u64 },
}

/// Known parameters of a generated instance. Absent fields are unknown.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub td: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub td_upper: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: FamilySpec,
    pub matrix: BooleanMatrix,
    pub factorization: Option<Factorization>,
    pub truth: GroundTruth,
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::AllOnes { .. } => "all_ones",
            Self::HalfGraph { .. } => "half_graph",
            Self::RandomBlocky { .. } => "random_blocky",
            Self::NestedBlockyDifference { .. } => "nested_blocky_difference",
            Self::GroupLiftRandom { .. } => "group_lift_random",
            Self::StaircasePattern { .. } => "staircase_pattern",
        }
    }
}

fn blocky_truth(cover: &BlockyCover) -> GroundTruth {
    let nonzero = cover.support_size() > 0;
    GroundTruth {
        gamma2: Some(if nonzero { 1.0 } else { 0.0 }),
        td: Some(usize::from(nonzero)),
        ..GroundTruth::default()
    }
}

fn blocky_instance(spec: &FamilySpec, cover: BlockyCover, m: usize, n: usize) -> Result<Instance> {
    let factorization = canonical_blocky_factorization(&cover, m, n)?;
    Ok(Instance { spec: spec.clone(), matrix: cover.indicator(m, n), truth: blocky_truth(&cover), factorization: Some(factorization) })
}

/// Splits `items` into `parts` nonempty groups plus leftovers (dropped with
/// probability `drop`), in random order.
fn random_groups(rng: &mut ChaCha8Rng, items: &[usize], parts: usize, drop: f64) -> Vec<Vec<usize>> {
    let mut pool = items.to_vec();
    pool.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = pool[..parts].iter().map(|&x| vec![x]).collect();
    for &x in &pool[parts..] {
        if !rng.random_bool(drop) {
            groups[rng.random_range(0..parts)].push(x);
        }
    }
    groups
}

fn random_cover(rng: &mut ChaCha8Rng, m: usize, n: usize, blocks: usize) -> BlockyCover {
    let k = blocks.min(m).min(n);
    if k == 0 {
        return BlockyCover::default();
    }
    let rows = random_groups(rng, &(0..m).collect::<Vec<_>>(), k, 0.2);
    let cols = random_groups(rng, &(0..n).collect::<Vec<_>>(), k, 0.2);
    BlockyCover::new(rows.into_iter().zip(cols).map(|(r, c)| Rectangle::new(r, c)).collect())
}

/// Up to two disjoint sub-rectangles strictly inside each block: their rows
/// never exhaust `S` and their columns never exhaust `T`.
fn carve(rng: &mut ChaCha8Rng, outer: &BlockyCover, min_frac: f64) -> BlockyCover {
    let mut inner = Vec::new();
    for b in &outer.blocks {
        let room = (b.rows.len() - 1).min(b.cols.len() - 1).min(2);
        if room == 0 {
            continue;
        }
        let parts = rng.random_range(0..=room);
        if parts == 0 {
            continue;
        }
        let mut rows = b.rows.clone();
        let mut cols = b.cols.clone();
        rows.shuffle(rng);
        cols.shuffle(rng);
        let floor = |len: usize| ((min_frac * len as f64).ceil() as usize).clamp(parts, len - 1);
        let r_take = rng.random_range(floor(rows.len())..rows.len());
        let c_take = rng.random_range(floor(cols.len())..cols.len());
        let rg = random_groups(rng, &rows[..r_take], parts, 0.0);
        let cg = random_groups(rng, &cols[..c_take], parts, 0.0);
        inner.extend(rg.into_iter().zip(cg).map(|(r, c)| Rectangle::new(r, c)));
    }
    BlockyCover::new(inner)
}

/// `U = [U1/sqrt2 | U2/sqrt2]`, `V = [sqrt2 V1 ; -sqrt2 V2]`, so `UV = B1 - B2`
/// with row norms at most 1 and column norms at most 2.
fn difference_factorization(b1: &Factorization, b2: &Factorization) -> Result<Factorization> {
    let (m, n) = (b1.rows(), b1.cols());
    let (t1, t2) = (b1.dim(), b2.dim());
    let s = std::f64::consts::SQRT_2;
    let mut u = DMatrix::zeros(m, t1 + t2);
    u.columns_mut(0, t1).copy_from(&(b1.u() / s));
    u.columns_mut(t1, t2).copy_from(&(b2.u() / s));
    let mut v = DMatrix::zeros(t1 + t2, n);
    v.rows_mut(0, t1).copy_from(&(b1.v() * s));
    v.rows_mut(t1, t2).copy_from(&(b2.v() * -s));
    let (u, v) = compress(u, v);
    Factorization::new(u, v, 2.0, DEFAULT_TOL)
}

fn blow_up(rng: &mut ChaCha8Rng, d: usize, total: usize) -> Vec<usize> {
    let mut map: Vec<usize> = (0..d).chain((d..total).map(|_| rng.random_range(0..d))).collect();
    map.shuffle(rng);
    map
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

pub fn generate(spec: &FamilySpec) -> Result<Instance> {
    match *spec {
        FamilySpec::Identity { n } => {
            let cover = BlockyCover::new((0..n).map(|i| Rectangle::new(vec![i], vec![i])).collect());
            blocky_instance(spec, cover, n, n)
        }
        FamilySpec::AllOnes { m, n } => {
            let cover = if m > 0 && n > 0 {
                BlockyCover::new(vec![Rectangle::new((0..m).collect(), (0..n).collect())])
            } else {
                BlockyCover::default()
            };
            blocky_instance(spec, cover, m, n)
        }
        FamilySpec::HalfGraph { n } => {
            check(n >= 1, || "half_graph needs n >= 1".into())?;
            Ok(Instance {
                spec: spec.clone(),
                matrix: BooleanMatrix::half_graph(n),
                factorization: None,
                truth: GroundTruth {
                    td: Some(n),
                    gamma2_lower: Some(halfgraph_lower_bound(n)? - 1.0),
                    ..GroundTruth::default()
                },
            })
        }
        FamilySpec::RandomBlocky { m, n, blocks, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cover = random_cover(&mut rng, m, n, blocks);
            blocky_instance(spec, cover, m, n)
        }
        FamilySpec::NestedBlockyDifference { m, n, blocks, seed, carve: min_frac } => {
            let min_frac = min_frac.unwrap_or(0.0);
            check((0.0..=1.0).contains(&min_frac), || format!("carve fraction {min_frac} outside [0, 1]"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let outer = random_cover(&mut rng, m, n, blocks);
            let inner = carve(&mut rng, &outer, min_frac);
            let f1 = canonical_blocky_factorization(&outer, m, n)?;
            let f2 = canonical_blocky_factorization(&inner, m, n)?;
            let (b1, b2) = (outer.indicator(m, n), inner.indicator(m, n));
            let matrix = BooleanMatrix::from_fn(m, n, |i, j| b1.get(i, j) && !b2.get(i, j));
            Ok(Instance {
                spec: spec.clone(),
                matrix,
                factorization: Some(difference_factorization(&f1, &f2)?),
                truth: GroundTruth { gamma2_upper: Some(2.0), ..GroundTruth::default() },
            })
        }
        FamilySpec::GroupLiftRandom { k, density, seed } => {
            check(k <= 12, || format!("group_lift_random needs k <= 12, got {k}"))?;
            check((0.0..=1.0).contains(&density), || format!("density {density} outside [0, 1]"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut values: Vec<bool> = (0..1usize << k).map(|_| rng.random_bool(density)).collect();
            if !values.iter().any(|&b| b) {
                let x = rng.random_range(0..values.len());
                values[x] = true;
            }
            let f = GroupFunction::new(k, values)?;
            let (matrix, factorization) = group_lift(&f)?;
            Ok(Instance {
                spec: spec.clone(),
                matrix,
                truth: GroundTruth { gamma2: Some(factorization.lambda()), ..GroundTruth::default() },
                factorization: Some(factorization),
            })
        }
        FamilySpec::StaircasePattern { d, m, n, seed } => {
            check(d >= 1 && d <= m && d <= n, || format!("staircase_pattern needs 1 <= d <= min(m, n), got d={d}, {m}x{n}"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = blow_up(&mut rng, d, m);
            let cols = blow_up(&mut rng, d, n);
            Ok(Instance {
                spec: spec.clone(),
                matrix: BooleanMatrix::from_fn(m, n, |i, j| rows[i] >= cols[j]),
                factorization: None,
                truth: GroundTruth {
                    td: Some(d),
                    gamma2_lower: Some(halfgraph_lower_bound(d)? - 1.0),
                    ..GroundTruth::default()
                },
            })
        }
    }
}

/// The twenty pinned difference instances (`lambda = 2`, sides at most 64).
pub fn regression_corpus() -> Vec<FamilySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0010);
    (0..20)
        .map(|seed| FamilySpec::NestedBlockyDifference {
            m: rng.random_range(8..=64),
            n: rng.random_range(8..=64),
            blocks: rng.random_range(2..=8),
            seed,
            carve: None,
        })
        .collect()
}

/// `count` blocky specs with sides at most 64.
pub fn blocky_corpus(count: usize, base_seed: u64) -> Vec<FamilySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    (0..count as u64)
        .map(|i| FamilySpec::RandomBlocky {
            m: rng.random_range(1..=64),
            n: rng.random_range(1..=64),
            blocks: rng.random_range(1..=12),
            seed: base_seed.wrapping_add(i),
        })
        .collect()
}

/// Named specs making up the default corpus: small exact families, 300
/// blocky matrices, the pinned differences plus 200 more, 500 group lifts on
/// `Z_2^k` for `k <= 5`, and blown-up staircases.
pub fn standard_corpus() -> Vec<(String, FamilySpec)> {
    let mut out: Vec<(String, FamilySpec)> = Vec::new();
    let mut push = |spec: FamilySpec, tag: String| out.push((format!("{}_{tag}", spec.name()), spec));
    for n in 1..=20 {
        push(FamilySpec::Identity { n }, format!("{n:02}"));
    }
    for m in 1..=6 {
        for n in 1..=6 {
            push(FamilySpec::AllOnes { m, n }, format!("{m}x{n}"));
        }
    }
    for n in 1..=12 {
        push(FamilySpec::HalfGraph { n }, format!("{n:02}"));
    }
    for (i, spec) in blocky_corpus(300, 1000).into_iter().enumerate() {
        push(spec, format!("{i:03}"));
    }
    for (i, spec) in regression_corpus().into_iter().enumerate() {
        push(spec, format!("pinned_{i:02}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0020);
    for i in 0..200u64 {
        let spec = FamilySpec::NestedBlockyDifference {
            m: rng.random_range(2..=40),
            n: rng.random_range(2..=40),
            blocks: rng.random_range(1..=6),
            seed: 2000 + i,
            carve: None,
        };
        push(spec, format!("{i:03}"));
    }
    // wide blocks with few rows, mostly carved away: these exercise the
    // column-projection step
    for i in 0..200u64 {
        let spec = FamilySpec::NestedBlockyDifference {
            m: rng.random_range(2..=6),
            n: rng.random_range(24..=64),
            blocks: rng.random_range(1..=2),
            seed: 2500 + i,
            carve: Some(0.9),
        };
        push(spec, format!("wide_{i:03}"));
    }
    for k in 1..=5 {
        for i in 0..100u64 {
            let density = [0.1, 0.25, 0.5, 0.75][(i % 4) as usize];
            push(FamilySpec::GroupLiftRandom { k, density, seed: 3000 + 100 * k as u64 + i }, format!("k{k}_{i:03}"));
        }
    }
    for d in 2..=6 {
        for i in 0..5u64 {
            let spec = FamilySpec::StaircasePattern { d, m: 4 * d, n: 3 * d + 1, seed: 4000 + 10 * d as u64 + i };
            push(spec, format!("d{d}_{i}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::is_blocky;
    use crate::factor::verify;
    use crate::structure::threshold_dimension;

    #[test]
    fn identity_three() {
        let inst = generate(&FamilySpec::Identity { n: 3 }).unwrap();
        assert_eq!(inst.matrix, BooleanMatrix::identity(3));
        assert_eq!(inst.factorization.as_ref().unwrap().lambda(), 1.0);
        assert_eq!(inst.truth.td, Some(1));
    }

    #[test]
    fn half_graph_four() {
        let inst = generate(&FamilySpec::HalfGraph { n: 4 }).unwrap();
        assert_eq!(inst.matrix, BooleanMatrix::half_graph(4));
        assert_eq!(threshold_dimension(&inst.matrix).value, 4);
        assert!(inst.factorization.is_none());
    }

    #[test]
    fn nested_difference_sixteen_verifies() {
        let spec = FamilySpec::NestedBlockyDifference { m: 16, n: 16, blocks: 4, seed: 7, carve: None };
        let inst = generate(&spec).unwrap();
        let f = inst.factorization.unwrap();
        assert_eq!(f.lambda(), 2.0);
        assert!(verify(&inst.matrix, &f).is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        for (_, spec) in standard_corpus().into_iter().step_by(37) {
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.matrix, b.matrix);
            assert_eq!(a.factorization.map(|f| f.u().clone()), b.factorization.map(|f| f.u().clone()));
        }
    }

    #[test]
    fn every_factorization_verifies_and_truth_holds() {
        for (name, spec) in standard_corpus() {
            let inst = generate(&spec).unwrap();
            if let Some(f) = &inst.factorization {
                assert!(verify(&inst.matrix, f).is_empty(), "{name}");
            }
            if let Some(td) = inst.truth.td {
                let got = threshold_dimension(&inst.matrix);
                if got.exact {
                    assert_eq!(got.value, td, "{name}");
                }
            }
            if matches!(spec, FamilySpec::RandomBlocky { .. }) {
                assert!(is_blocky(&inst.matrix).is_some());
            }
        }
    }

    #[test]
    fn staircase_rejects_oversized_d() {
        assert!(generate(&FamilySpec::StaircasePattern { d: 5, m: 4, n: 9, seed: 0 }).is_err());
    }
}
