//! Instance generators: seeded random graphs, the worst-case tree family,
//! and the named fixtures.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fixtures;
use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),
    #[error("unknown figure fixture `{0}`")]
    UnknownFixture(String),
    #[error("bad parameter `{0}`")]
    BadParameter(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    RandomMinDegree3 { n: u32, seed: u64, density: f64 },
    WorstCaseFamily { trees: usize },
    FigureFixture(String),
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RandomMinDegree3 { n, seed, density } => {
                write!(f, "random-min-degree-3:n={n},seed={seed},density={density}")
            }
            Self::WorstCaseFamily { trees } => write!(f, "worst-case-family:t={trees}"),
            Self::FigureFixture(name) => write!(f, "figure-fixture:{name}"),
        }
    }
}

/// Parses `kind[:key=value,...]`, e.g. `random-min-degree-3:n=30,seed=7`,
/// `worst-case-family:t=3` or `figure-fixture:fig1-right`.
impl FromStr for GeneratorSpec {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let pairs = || {
            params.split(',').filter(|p| !p.is_empty()).map(|p| {
                p.split_once('=').ok_or_else(|| GenerateError::BadParameter(p.to_string()))
            })
        };
        let bad = |p: &str| GenerateError::BadParameter(p.to_string());
        match kind {
            "random-min-degree-3" => {
                let (mut n, mut seed, mut density) = (30, 0, 0.1);
                for pair in pairs() {
                    let (k, val) = pair?;
                    match k {
                        "n" => n = val.parse().map_err(|_| bad(val))?,
                        "seed" => seed = val.parse().map_err(|_| bad(val))?,
                        "density" | "p" => density = val.parse().map_err(|_| bad(val))?,
                        _ => return Err(bad(k)),
                    }
                }
                Ok(Self::RandomMinDegree3 { n, seed, density })
            }
            "worst-case-family" => {
                let mut trees = 1;
                for pair in pairs() {
                    let (k, val) = pair?;
                    match k {
                        "t" | "trees" | "size" => trees = val.parse().map_err(|_| bad(val))?,
                        _ => return Err(bad(k)),
                    }
                }
                Ok(Self::WorstCaseFamily { trees })
            }
            "figure-fixture" => Ok(Self::FigureFixture(params.to_string())),
            other => Err(GenerateError::UnknownKind(other.to_string())),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph, GenerateError> {
    match spec {
        GeneratorSpec::RandomMinDegree3 { n, seed, density } => random_min_degree3(*n, *density, *seed),
        GeneratorSpec::WorstCaseFamily { trees } => worst_case_family(*trees),
        GeneratorSpec::FigureFixture(name) => {
            fixtures::by_name(name).ok_or_else(|| GenerateError::UnknownFixture(name.clone()))
        }
    }
}

/// G(n, p) with a seeded ChaCha8 stream.
pub fn gnp(n: u32, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gnp_with(&mut rng, n, p)
}

pub fn gnp_with<R: Rng>(rng: &mut R, n: u32, p: f64) -> Graph {
    let mut g = Graph::with_vertices(n as usize);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(VertexId(a), VertexId(b)).expect("distinct vertices");
            }
        }
    }
    g
}

/// G(n, p) followed by topping up every vertex of degree < 3 with random
/// edges, lowest id first.
pub fn random_min_degree3(n: u32, p: f64, seed: u64) -> Result<Graph, GenerateError> {
    if n < 4 {
        return Err(GenerateError::Invalid("random-min-degree-3 needs n >= 4".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::Invalid(format!("density {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = gnp_with(&mut rng, n, p);
    for a in 0..n {
        let a = VertexId(a);
        while g.degree(a) < 3 {
            let mut options: Vec<VertexId> =
                g.vertices().filter(|&b| b != a && !g.adjacent(a, b)).collect();
            options.shuffle(&mut rng);
            g.add_edge(a, options[0]).expect("distinct vertices");
        }
    }
    Ok(g)
}

const WORST_CASE_BLOCK: u32 = 23;

/// `trees` copies of the worst-case component: a root with four leaves, six
/// high-magnitude vertices on three of the leaves, two vertices seeing only
/// high-magnitude vertices, and a block of vertices outside the forest.
/// Consecutive copies share an N₂ vertex through their fourth leaves; a
/// single copy closes that leaf with two N₁ vertices instead.
///
/// Roots get ids `0..trees` so that the greedy forest seeds exactly them.
pub fn worst_case_family(trees: usize) -> Result<Graph, GenerateError> {
    if trees == 0 {
        return Err(GenerateError::Invalid("worst-case-family needs t >= 1".into()));
    }
    let t = trees as u32;
    let n = if t == 1 { 21 } else { t + t * WORST_CASE_BLOCK };
    let mut edges = Vec::new();
    for k in 0..t {
        let root = k;
        let base = t + k * WORST_CASE_BLOCK;
        let id = |local: u32| base + local;
        // leaves 0..4, HM 4..10, U' 10..12, U₀ 12..18
        let leaf = |i: u32| id(i);
        let hm = |i: u32| id(4 + i);
        let up = |i: u32| id(10 + i);
        let u0 = |i: u32| id(12 + i);
        for i in 0..4 {
            edges.push((root, leaf(i)));
        }
        for i in 0..6 {
            edges.push((leaf(i / 2), hm(i)));
            edges.push((up(i % 2), hm(i)));
        }
        // each pair of HM vertices on different leaves shares a U' or U₀ neighbor
        let hm_u0 = [(0, 1), (0, 4), (1, 0), (1, 5), (2, 0), (2, 3), (3, 1), (3, 2), (4, 2), (4, 5), (5, 3), (5, 4)];
        for (h, u) in hm_u0 {
            edges.push((hm(h), u0(u)));
        }
        edges.push((u0(0), u0(1)));
        if t == 1 {
            let (x, y) = (id(18), id(19));
            edges.extend([(leaf(3), x), (leaf(3), y), (x, u0(2)), (x, u0(3)), (y, u0(4)), (y, u0(5))]);
        } else {
            let (a, b, c, d, e) = (id(18), id(19), id(20), id(21), id(22));
            let next_leaf = t + ((k + 1) % t) * WORST_CASE_BLOCK + 3;
            edges.extend([(a, leaf(3)), (a, next_leaf), (a, b), (a, c)]);
            edges.extend([(d, e), (d, b), (d, u0(2)), (e, c), (e, u0(3)), (b, u0(4)), (c, u0(5))]);
        }
    }
    Graph::from_edges(n as usize, &edges).map_err(|e| GenerateError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!(
            "worst-case-family:t=3".parse::<GeneratorSpec>().unwrap(),
            GeneratorSpec::WorstCaseFamily { trees: 3 }
        );
        let s: GeneratorSpec = "random-min-degree-3:n=30,seed=7,density=0.2".parse().unwrap();
        assert_eq!(s, GeneratorSpec::RandomMinDegree3 { n: 30, seed: 7, density: 0.2 });
        assert_eq!(s.to_string().parse::<GeneratorSpec>().unwrap(), s);
        assert!("nope".parse::<GeneratorSpec>().is_err());
        assert!("worst-case-family:q=1".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let a = random_min_degree3(30, 0.1, 7).unwrap();
        let b = random_min_degree3(30, 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.min_degree().unwrap() >= 3);
        assert_ne!(a, random_min_degree3(30, 0.1, 8).unwrap());
    }

    #[test]
    fn worst_case_degrees() {
        for t in 1..=4 {
            let g = worst_case_family(t).unwrap();
            assert!(g.min_degree().unwrap() >= 3, "t={t}");
            assert!(g.validate().is_ok());
        }
        assert!(worst_case_family(0).is_err());
    }

    #[test]
    fn fixtures_by_spec() {
        let g = generate(&"figure-fixture:fig1-right".parse().unwrap()).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert!(generate(&GeneratorSpec::FigureFixture("x".into())).is_err());
    }
}
