//! Vectors over a finite index set and norm oracles for every space family
//! used by the witness constructions.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of a finite-dimensional space: a coordinate array of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("vector must have length >= 1".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Vector(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, lambda: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * lambda).collect())
    }

    /// Total order used for deterministic tie-breaking between candidates.
    pub fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// An element of a discretized Bochner space: one block per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BochnerVector {
    pub blocks: Vec<Vector>,
}

impl BochnerVector {
    pub fn new(blocks: Vec<Vector>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Domain("Bochner vector needs at least one block".into()));
        }
        let inner = blocks[0].len();
        if blocks.iter().any(|b| b.len() != inner) {
            return Err(Error::Domain("Bochner blocks must have equal dimension".into()));
        }
        Ok(BochnerVector { blocks })
    }

    /// A constant-block vector: the same inner value on every atom.
    pub fn constant(value: &Vector, atoms: usize) -> Self {
        BochnerVector { blocks: vec![value.clone(); atoms] }
    }

    pub fn flatten(&self) -> Vector {
        let mut coords = Vec::with_capacity(self.blocks.len() * self.blocks[0].len());
        for b in &self.blocks {
            coords.extend_from_slice(b.coords());
        }
        Vector(coords)
    }
}

/// Descriptor of a norm family on a finite index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// Sigma w_i |v_i| with strictly positive weights summing to 1.
    WeightedL1 { weights: Vec<f64> },
    L2 { n: usize },
    Lp { p: f64, n: usize },
    Linf { n: usize },
    /// (||v||_1^2 + ||v||_2^2)^{1/2} with unweighted l1/l2 norms.
    SRenorm { n: usize },
    LpSum { p: f64, left: Box<SpaceSpec>, right: Box<SpaceSpec> },
    /// Sigma w_i ||block_i||_inner on flattened block vectors.
    Bochner { weights: Vec<f64>, inner: Box<SpaceSpec> },
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidSpace("weights must be non-empty".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::InvalidSpace("weights must be strictly positive".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidSpace(format!(
            "weights must sum to 1 within {WEIGHT_SUM_TOL} (got {sum})"
        )));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidSpace(format!("p must lie in (1, inf), got {p}")));
    }
    Ok(())
}

impl SpaceSpec {
    pub fn weighted_l1(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        Ok(SpaceSpec::WeightedL1 { weights })
    }

    /// n equal atoms of weight 1/n; the refinable model of an atomless measure.
    pub fn l1_disc(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("l1disc needs n >= 1".into()));
        }
        Ok(SpaceSpec::WeightedL1 { weights: vec![1.0 / n as f64; n] })
    }

    pub fn lp(p: f64, n: usize) -> Result<Self> {
        check_p(p)?;
        Ok(SpaceSpec::Lp { p, n })
    }

    pub fn lp_sum(p: f64, left: SpaceSpec, right: SpaceSpec) -> Result<Self> {
        check_p(p)?;
        Ok(SpaceSpec::LpSum { p, left: Box::new(left), right: Box::new(right) })
    }

    pub fn bochner(weights: Vec<f64>, inner: SpaceSpec) -> Result<Self> {
        check_weights(&weights)?;
        Ok(SpaceSpec::Bochner { weights, inner: Box::new(inner) })
    }

    /// Coordinate dimension of (flattened) vectors in this space.
    pub fn dim(&self) -> usize {
        match self {
            SpaceSpec::WeightedL1 { weights } => weights.len(),
            SpaceSpec::L2 { n } | SpaceSpec::Lp { n, .. } | SpaceSpec::Linf { n } | SpaceSpec::SRenorm { n } => *n,
            SpaceSpec::LpSum { left, right, .. } => left.dim() + right.dim(),
            SpaceSpec::Bochner { weights, inner } => weights.len() * inner.dim(),
        }
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    fn norm_slice(&self, v: &[f64]) -> f64 {
        match self {
            SpaceSpec::WeightedL1 { weights } => {
                v.iter().zip(weights).map(|(x, w)| w * x.abs()).sum()
            }
            SpaceSpec::L2 { .. } => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            SpaceSpec::Lp { p, .. } => v.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p),
            SpaceSpec::Linf { .. } => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            SpaceSpec::SRenorm { .. } => {
                let l1: f64 = v.iter().map(|x| x.abs()).sum();
                let l2sq: f64 = v.iter().map(|x| x * x).sum();
                (l1 * l1 + l2sq).sqrt()
            }
            SpaceSpec::LpSum { p, left, right } => {
                let k = left.dim();
                let a = left.norm_slice(&v[..k]);
                let b = right.norm_slice(&v[k..]);
                (a.powf(*p) + b.powf(*p)).powf(1.0 / p)
            }
            SpaceSpec::Bochner { weights, inner } => {
                let k = inner.dim();
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * inner.norm_slice(&v[i * k..(i + 1) * k]))
                    .sum()
            }
        }
    }

    pub fn norm(&self, v: &Vector) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.norm_slice(v.coords()))
    }

    pub fn norm_bochner(&self, v: &BochnerVector) -> Result<f64> {
        match self {
            SpaceSpec::Bochner { weights, .. } => {
                if v.blocks.len() != weights.len() {
                    return Err(Error::DimensionMismatch {
                        expected: weights.len(),
                        got: v.blocks.len(),
                    });
                }
                self.norm(&v.flatten())
            }
            _ => Err(Error::Domain("norm_bochner requires a Bochner space".into())),
        }
    }

    pub fn normalize(&self, v: &Vector) -> Result<Vector> {
        let n = self.norm(v)?;
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(v.scale(1.0 / n))
    }

    /// A subgradient of the norm at `v` (any selection from the subdifferential).
    pub fn norm_subgradient(&self, v: &Vector) -> Result<Vector> {
        self.check_dim(v)?;
        Ok(Vector(self.subgrad_slice(v.coords())))
    }

    fn subgrad_slice(&self, v: &[f64]) -> Vec<f64> {
        match self {
            SpaceSpec::WeightedL1 { weights } => {
                v.iter().zip(weights).map(|(x, w)| w * sgn(*x)).collect()
            }
            SpaceSpec::L2 { .. } => {
                let n = self.norm_slice(v);
                if n == 0.0 {
                    vec![0.0; v.len()]
                } else {
                    v.iter().map(|x| x / n).collect()
                }
            }
            SpaceSpec::Lp { p, .. } => {
                let n = self.norm_slice(v);
                if n == 0.0 {
                    vec![0.0; v.len()]
                } else {
                    v.iter().map(|x| sgn(*x) * (x.abs() / n).powf(p - 1.0)).collect()
                }
            }
            SpaceSpec::Linf { .. } => {
                let mut g = vec![0.0; v.len()];
                let mut best = 0.0_f64;
                let mut idx = 0;
                for (i, x) in v.iter().enumerate() {
                    if x.abs() > best {
                        best = x.abs();
                        idx = i;
                    }
                }
                if best > 0.0 {
                    g[idx] = sgn(v[idx]);
                }
                g
            }
            SpaceSpec::SRenorm { .. } => {
                let ns = self.norm_slice(v);
                if ns == 0.0 {
                    return vec![0.0; v.len()];
                }
                let l1: f64 = v.iter().map(|x| x.abs()).sum();
                v.iter().map(|x| (l1 * sgn(*x) + x) / ns).collect()
            }
            SpaceSpec::LpSum { p, left, right } => {
                let k = left.dim();
                let n = self.norm_slice(v);
                if n == 0.0 {
                    return vec![0.0; v.len()];
                }
                let (nl, nr) = (left.norm_slice(&v[..k]), right.norm_slice(&v[k..]));
                let mut g: Vec<f64> = left
                    .subgrad_slice(&v[..k])
                    .into_iter()
                    .map(|gi| (nl / n).powf(p - 1.0) * gi)
                    .collect();
                g.extend(right.subgrad_slice(&v[k..]).into_iter().map(|gi| (nr / n).powf(p - 1.0) * gi));
                g
            }
            SpaceSpec::Bochner { weights, inner } => {
                let k = inner.dim();
                let mut g = Vec::with_capacity(v.len());
                for (i, w) in weights.iter().enumerate() {
                    g.extend(inner.subgrad_slice(&v[i * k..(i + 1) * k]).into_iter().map(|gi| w * gi));
                }
                g
            }
        }
    }

    /// Whether coordinatewise sign changes are isometries of this space.
    pub fn is_coordinate_symmetric(&self) -> bool {
        match self {
            SpaceSpec::LpSum { left, right, .. } => {
                left.is_coordinate_symmetric() && right.is_coordinate_symmetric()
            }
            SpaceSpec::Bochner { inner, .. } => inner.is_coordinate_symmetric(),
            _ => true,
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The coordinatewise sign change `T_eps`.
pub fn sign_change(v: &Vector, eps: &[f64]) -> Result<Vector> {
    if eps.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), got: eps.len() });
    }
    if eps.iter().any(|e| *e != 1.0 && *e != -1.0) {
        return Err(Error::Domain("sign_change entries must be +1 or -1".into()));
    }
    Ok(Vector(v.coords().iter().zip(eps).map(|(x, e)| x * e).collect()))
}

// ---------------------------------------------------------------------------
// Compact string grammar used by the CLI.
// ---------------------------------------------------------------------------

impl SpaceSpec {
    /// Parses `l1:w=0.1,0.2,0.7`, `l1disc:n=200`, `l2:n=3`, `lp:p=3,n=2`,
    /// `linf:n=2`, `srenorm:n=5`,
    /// `lpsum:p=2,left=l1disc:n=4,right=l2:n=2`, `bochner:n=10,inner=linf:n=2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("space spec `{s}` is missing `:`")))?;
        match kind {
            "l1" => {
                let w = strip_key(rest, "w")?;
                let weights = parse_f64_list(w)?;
                SpaceSpec::weighted_l1(weights)
            }
            "l1disc" => SpaceSpec::l1_disc(parse_n(strip_key(rest, "n")?)?),
            "l2" => Ok(SpaceSpec::L2 { n: parse_n(strip_key(rest, "n")?)? }),
            "linf" => Ok(SpaceSpec::Linf { n: parse_n(strip_key(rest, "n")?)? }),
            "srenorm" => Ok(SpaceSpec::SRenorm { n: parse_n(strip_key(rest, "n")?)? }),
            "lp" => {
                let (p_part, n_part) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("lp spec `{s}` needs p and n")))?;
                SpaceSpec::lp(parse_f64(strip_key(p_part, "p")?)?, parse_n(strip_key(n_part, "n")?)?)
            }
            "lpsum" => {
                let (p_part, tail) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("lpsum spec `{s}` needs p, left, right")))?;
                let p = parse_f64(strip_key(p_part, "p")?)?;
                let tail = tail
                    .strip_prefix("left=")
                    .ok_or_else(|| Error::Parse(format!("lpsum spec `{s}` needs left=")))?;
                let (left_s, right_s) = tail
                    .split_once(",right=")
                    .ok_or_else(|| Error::Parse(format!("lpsum spec `{s}` needs right=")))?;
                SpaceSpec::lp_sum(p, SpaceSpec::parse(left_s)?, SpaceSpec::parse(right_s)?)
            }
            "bochner" => {
                let (n_part, inner_part) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bochner spec `{s}` needs n and inner")))?;
                let n = parse_n(strip_key(n_part, "n")?)?;
                let inner_s = inner_part
                    .strip_prefix("inner=")
                    .ok_or_else(|| Error::Parse(format!("bochner spec `{s}` needs inner=")))?;
                SpaceSpec::bochner(vec![1.0 / n as f64; n], SpaceSpec::parse(inner_s)?)
            }
            other => Err(Error::Parse(format!("unknown space kind `{other}`"))),
        }
    }
}

fn strip_key<'a>(part: &'a str, key: &str) -> Result<&'a str> {
    part.trim()
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::Parse(format!("expected `{key}=...` in `{part}`")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")))
}

fn parse_n(s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad count `{s}`")))
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

pub fn parse_vector(s: &str) -> Result<Vector> {
    Vector::new(parse_f64_list(s)?)
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::WeightedL1 { weights } => {
                let n = weights.len();
                if weights.iter().all(|w| (w - 1.0 / n as f64).abs() < 1e-15) {
                    write!(f, "l1disc:n={n}")
                } else {
                    let ws: Vec<String> = weights.iter().map(|w| format!("{w}")).collect();
                    write!(f, "l1:w={}", ws.join(","))
                }
            }
            SpaceSpec::L2 { n } => write!(f, "l2:n={n}"),
            SpaceSpec::Lp { p, n } => write!(f, "lp:p={p},n={n}"),
            SpaceSpec::Linf { n } => write!(f, "linf:n={n}"),
            SpaceSpec::SRenorm { n } => write!(f, "srenorm:n={n}"),
            SpaceSpec::LpSum { p, left, right } => write!(f, "lpsum:p={p},left={left},right={right}"),
            SpaceSpec::Bochner { weights, inner } => {
                write!(f, "bochner:n={},inner={inner}", weights.len())
            }
        }
    }
}
