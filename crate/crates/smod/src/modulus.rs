//! Estimation of the inner supremum U(x,y;a), its p-power variant, and the
//! outer infimum U(d;a), with a small-dimension brute-force oracle.

use crate::error::{Error, Result};
use crate::space::{SpaceSpec, Vector};
use crate::witness;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBound,
    UpperBound,
    Estimate,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::LowerBound => write!(f, "lower_bound"),
            Direction::UpperBound => write!(f, "upper_bound"),
            Direction::Estimate => write!(f, "estimate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Witness,
    Ascent,
    Grid,
    ExactFormula,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Witness => write!(f, "witness"),
            Method::Ascent => write!(f, "ascent"),
            Method::Grid => write!(f, "grid"),
            Method::ExactFormula => write!(f, "exact_formula"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "witness" => Ok(Method::Witness),
            "ascent" => Ok(Method::Ascent),
            "grid" => Ok(Method::Grid),
            "exact_formula" => Ok(Method::ExactFormula),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    pub direction: Direction,
    pub method: Method,
    pub best_z: Vector,
    pub evaluations: u64,
    pub seed: u64,
}

/// A unit pair at separation >= d, fed to the outer infimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSample {
    pub x: Vector,
    pub y: Vector,
    pub separation: f64,
}

pub(crate) fn split_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 on a golden-ratio stream: independent per-index streams
    let mut z = seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct GapEval<'a> {
    space: &'a SpaceSpec,
    x: &'a Vector,
    y: &'a Vector,
    p: f64,
    evaluations: u64,
}

impl<'a> GapEval<'a> {
    fn new(space: &'a SpaceSpec, x: &'a Vector, y: &'a Vector, p: f64) -> Self {
        GapEval { space, x, y, p, evaluations: 0 }
    }

    fn value(&mut self, z: &Vector) -> f64 {
        self.evaluations += 1;
        let nx = self.space.norm_slice_unchecked(&self.x.add(z));
        let ny = self.space.norm_slice_unchecked(&self.y.add(z));
        if self.p == 1.0 {
            (nx - ny).abs()
        } else {
            (nx.powf(self.p) - ny.powf(self.p)).abs()
        }
    }
}

impl SpaceSpec {
    fn norm_slice_unchecked(&self, v: &Vector) -> f64 {
        self.norm(v).expect("dimension already validated")
    }
}

fn validate_inner_inputs(space: &SpaceSpec, x: &Vector, y: &Vector, a: f64, p: f64) -> Result<()> {
    for (name, v) in [("x", x), ("y", y)] {
        let n = space.norm(v)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("{name} must be a unit vector (norm = {n})")));
        }
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    if p < 1.0 {
        return Err(Error::Domain(format!("p must be >= 1, got {p}")));
    }
    Ok(())
}

/// Radial projection onto the ball of radius `a`.
fn clip_to_ball(space: &SpaceSpec, z: &Vector, a: f64) -> Vector {
    let n = space.norm_slice_unchecked(z);
    if n > a {
        z.scale(a / n)
    } else {
        z.clone()
    }
}

/// Deterministic perturbation candidates built only from (space, x, y, a):
/// the paper witnesses where applicable plus a few canonical directions.
/// They map through coordinatewise sign changes and are symmetric in (x, y).
pub fn witness_candidates(space: &SpaceSpec, x: &Vector, y: &Vector, a: f64) -> Vec<Vector> {
    let n = space.dim();
    let mut out: Vec<Vector> = Vec::new();
    let mut push = |z: Vector| {
        let z = clip_to_ball(space, &z, a);
        out.push(z);
    };

    let diff = x.sub(y);
    let d = space.norm_slice_unchecked(&diff);
    if d > 0.0 {
        push(diff.scale(a / d));
        push(diff.scale(-a / d));
    }
    push(x.scale(a));
    push(x.scale(-a));
    push(y.scale(a));
    push(y.scale(-a));
    let sum = x.add(y);
    let ns = space.norm_slice_unchecked(&sum);
    if ns > 0.0 {
        push(sum.scale(a / ns));
        push(sum.scale(-a / ns));
    }
    for i in 0..n.min(16) {
        let e = Vector::unit(n, i);
        let ne = space.norm_slice_unchecked(&e);
        push(e.scale(a / ne));
        push(e.scale(-a / ne));
    }

    // one-sided kills: the Theorem A(i) / Theorem B flavour of candidate
    for (base, other) in [(x, y), (y, x)] {
        let mut kill = vec![0.0; n];
        for i in 0..n {
            if base[i].abs() >= other[i].abs() {
                kill[i] = -base[i];
            }
        }
        if kill.iter().any(|v| *v != 0.0) {
            push(Vector::new(kill).expect("finite"));
        }
    }

    // exact Theorem B witness on weighted-L1 spaces, pulled back to the
    // original atoms (skipped when canonicalization does not apply)
    if let SpaceSpec::WeightedL1 { weights } = space {
        if let Ok(form) = witness::l1_canonicalize(weights, x, y) {
            for aa in [a, a / 2.0] {
                if let Ok(wr) = witness::l1_witness(&form, aa) {
                    if let Some(zo) = wr.trace.get("z_original") {
                        if let Ok(z) = serde_json::from_value::<Vector>(zo.clone()) {
                            if z.len() == n {
                                push(z);
                            }
                        }
                    }
                }
            }
        }
    }

    // Theorem D witness on the S-renorming
    if let SpaceSpec::SRenorm { .. } = space {
        if d > 0.0 {
            if let Ok((wr, _)) = crate::srenorm::srenorm_witness(x, y, a, d) {
                push(wr.z);
            }
        }
    }

    out
}

/// Evaluates a candidate along its radial ray at dyadic fractions of its
/// radius; keeps candidate sets nested across ball radii.
const RADIAL_DEPTH: u32 = 45;

fn best_over_candidates(
    eval: &mut GapEval<'_>,
    candidates: &[Vector],
    zero_dim: usize,
) -> (f64, Vector) {
    let mut best = 0.0_f64;
    let mut best_z = Vector::zeros(zero_dim);
    eval.value(&best_z); // z = 0 is always in the candidate set
    // exact comparisons keep the winner independent of candidate order
    let consider = |v: f64, z: &Vector, best: &mut f64, best_z: &mut Vector| {
        if v > *best || (v == *best && z.lex_cmp(best_z) == std::cmp::Ordering::Less) {
            *best = v;
            *best_z = z.clone();
        }
    };
    for c in candidates {
        for k in 0..=RADIAL_DEPTH {
            let z = c.scale(0.5_f64.powi(k as i32));
            let v = eval.value(&z);
            consider(v, &z, &mut best, &mut best_z);
        }
    }
    (best, best_z)
}

/// Lower-bound estimate of sup_{||z|| <= a} | ||x+z|| - ||y+z|| |.
pub fn inner_sup(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    a: f64,
    method: Method,
    seed: u64,
) -> Result<ModulusEstimate> {
    inner_sup_p(space, x, y, a, 1.0, method, seed)
}

/// p-power variant; p = 1 reduces exactly to [`inner_sup`].
pub fn inner_sup_p(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    a: f64,
    p: f64,
    method: Method,
    seed: u64,
) -> Result<ModulusEstimate> {
    validate_inner_inputs(space, x, y, a, p)?;
    let candidates = witness_candidates(space, x, y, a);
    let mut eval = GapEval::new(space, x, y, p);
    let (mut best, mut best_z) = best_over_candidates(&mut eval, &candidates, space.dim());
    let mut evaluations = eval.evaluations;

    match method {
        Method::Witness | Method::ExactFormula => {}
        Method::Ascent => {
            let est = ascent(space, x, y, a, p, DEFAULT_RESTARTS, seed)?;
            evaluations += est.evaluations;
            if est.value > best
                || (est.value == best && est.best_z.lex_cmp(&best_z) == std::cmp::Ordering::Less)
            {
                best = est.value;
                best_z = est.best_z;
            }
        }
        Method::Grid => {
            let oracle = brute_force_oracle(space, x, y, a, p, 400)?;
            evaluations += oracle.estimate.evaluations;
            if oracle.estimate.value > best {
                best = oracle.estimate.value;
                best_z = oracle.estimate.best_z;
            }
        }
    }

    Ok(ModulusEstimate {
        value: best,
        direction: Direction::LowerBound,
        method,
        best_z,
        evaluations,
        seed,
    })
}

pub const DEFAULT_RESTARTS: usize = 32;
const ASCENT_ITERS: usize = 200;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; rejection on u = 0 is unreachable for gen::<f64>() in [0,1)
    let u: f64 = rng.gen::<f64>().max(1e-300);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

fn random_ball_point(space: &SpaceSpec, a: f64, rng: &mut ChaCha8Rng) -> Vector {
    let n = space.dim();
    let dir: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
    let dir = Vector::new(dir).unwrap_or_else(|_| Vector::zeros(n));
    let norm = space.norm_slice_unchecked(&dir);
    if norm == 0.0 {
        return Vector::zeros(n);
    }
    let r: f64 = rng.gen();
    dir.scale(a * r / norm)
}

/// Multi-start projected subgradient ascent on +/-(||x+z||^p - ||y+z||^p).
/// Deterministic given the seed; per-restart RNG streams.
pub fn ascent(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    a: f64,
    p: f64,
    restarts: usize,
    seed: u64,
) -> Result<ModulusEstimate> {
    validate_inner_inputs(space, x, y, a, p)?;
    let candidates = witness_candidates(space, x, y, a);
    let mut eval = GapEval::new(space, x, y, p);
    let (mut best, mut best_z) = best_over_candidates(&mut eval, &candidates, space.dim());

    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, restart as u64));
        let init = if restart < candidates.len() {
            candidates[restart].clone()
        } else {
            random_ball_point(space, a, &mut rng)
        };
        for sign in [1.0, -1.0] {
            let mut z = init.clone();
            for k in 0..ASCENT_ITERS {
                let v = eval.value(&z);
                if v > best {
                    best = v;
                    best_z = z.clone();
                }
                let xz = x.add(&z);
                let yz = y.add(&z);
                let (nx, ny) = (space.norm_slice_unchecked(&xz), space.norm_slice_unchecked(&yz));
                let sx = space.norm_subgradient(&xz)?;
                let sy = space.norm_subgradient(&yz)?;
                let (cx, cy) = if p == 1.0 {
                    (1.0, 1.0)
                } else {
                    (p * nx.powf(p - 1.0), p * ny.powf(p - 1.0))
                };
                let grad: Vec<f64> = sx
                    .coords()
                    .iter()
                    .zip(sy.coords())
                    .map(|(gx, gy)| sign * (cx * gx - cy * gy))
                    .collect();
                let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if gnorm == 0.0 {
                    break;
                }
                let step = a / (k as f64 + 4.0);
                let moved: Vec<f64> = z
                    .coords()
                    .iter()
                    .zip(&grad)
                    .map(|(zi, gi)| zi + step * gi / gnorm)
                    .collect();
                z = clip_to_ball(space, &Vector::new(moved)?, a);
            }
            let v = eval.value(&z);
            if v > best {
                best = v;
                best_z = z.clone();
            }
        }
    }

    Ok(ModulusEstimate {
        value: best,
        direction: Direction::LowerBound,
        method: Method::Ascent,
        best_z,
        evaluations: eval.evaluations,
        seed,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub estimate: ModulusEstimate,
    /// Lipschitz grid certificate: sup over the ball is at most
    /// `grid best + 4 n a / resolution` (|gap| is 2-Lipschitz in z).
    pub certified_upper: f64,
    pub grid_spacing: f64,
}

/// Exhaustive grid over [-a,a]^n intersected with the ball, with one pass of
/// coordinatewise golden-section refinement around the best cell. Dimension
/// is capped at 3; this is the independent certification oracle.
pub fn brute_force_oracle(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    a: f64,
    p: f64,
    resolution: usize,
) -> Result<BruteForceResult> {
    validate_inner_inputs(space, x, y, a, p)?;
    let n = space.dim();
    if n > 3 {
        return Err(Error::Domain(format!("brute_force_oracle supports dimension <= 3, got {n}")));
    }
    if resolution < 10 {
        return Err(Error::Domain(format!("resolution must be >= 10, got {resolution}")));
    }
    // the ball can poke out of [-a, a]^n when axis vectors have norm < 1
    // (weighted spaces); per-coordinate half-widths a / ||e_i|| contain it
    // for every supported norm, each of which maximizes a coordinate over
    // the ball along that axis
    let axis_norms: Vec<f64> =
        (0..n).map(|i| space.norm_slice_unchecked(&Vector::unit(n, i))).collect();
    let half_widths: Vec<f64> = axis_norms.iter().map(|ni| a / ni).collect();
    let spacings: Vec<f64> =
        half_widths.iter().map(|hw| 2.0 * hw / resolution as f64).collect();
    let mut eval = GapEval::new(space, x, y, p);

    let mut best = 0.0_f64;
    let mut best_z = Vector::zeros(n);
    let mut idx = vec![0usize; n];
    loop {
        let raw: Vec<f64> =
            idx.iter().enumerate().map(|(c, &i)| -half_widths[c] + i as f64 * spacings[c]).collect();
        let z = clip_to_ball(space, &Vector::new(raw)?, a);
        let v = eval.value(&z);
        if v > best || (v == best && z.lex_cmp(&best_z) == std::cmp::Ordering::Less) {
            best = v;
            best_z = z;
        }
        // odometer over the grid
        let mut carry = true;
        for slot in idx.iter_mut() {
            if *slot < resolution {
                *slot += 1;
                carry = false;
                break;
            }
            *slot = 0;
        }
        if carry {
            break;
        }
    }
    let grid_best = best;

    // golden-section polish, one pass per coordinate
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    for i in 0..n {
        let mut lo = best_z[i] - spacings[i];
        let mut hi = best_z[i] + spacings[i];
        let probe = |c: f64, eval: &mut GapEval<'_>| {
            let mut coords = best_z.coords().to_vec();
            coords[i] = c.clamp(-half_widths[i], half_widths[i]);
            let z = clip_to_ball(space, &Vector::new(coords).unwrap(), a);
            (eval.value(&z), z)
        };
        let mut c1 = hi - phi * (hi - lo);
        let mut c2 = lo + phi * (hi - lo);
        let (mut f1, mut z1) = probe(c1, &mut eval);
        let (mut f2, mut z2) = probe(c2, &mut eval);
        for _ in 0..40 {
            if f1 >= f2 {
                hi = c2;
                c2 = c1;
                f2 = f1;
                z2 = z1.clone();
                c1 = hi - phi * (hi - lo);
                let r = probe(c1, &mut eval);
                f1 = r.0;
                z1 = r.1;
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                z1 = z2.clone();
                c2 = lo + phi * (hi - lo);
                let r = probe(c2, &mut eval);
                f2 = r.0;
                z2 = r.1;
            }
        }
        let (fb, zb) = if f1 >= f2 { (f1, z1) } else { (f2, z2) };
        if fb > best {
            best = fb;
            best_z = zb;
        }
    }

    Ok(BruteForceResult {
        estimate: ModulusEstimate {
            value: best,
            direction: Direction::LowerBound,
            method: Method::Grid,
            best_z,
            evaluations: eval.evaluations,
            seed: 0,
        },
        // |gap| is 2-Lipschitz in z; each ball point is within half a cell
        // of a grid node, clipping the node back into the ball at most
        // doubles that distance, and the cell half-diagonal has norm
        // sum_i (h_i / 2) ||e_i|| = n a / resolution
        certified_upper: grid_best + 4.0 * n as f64 * a / resolution as f64,
        grid_spacing: spacings.iter().cloned().fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OuterResult {
    pub estimate: ModulusEstimate,
    pub pair: PairSample,
    pub pairs_evaluated: usize,
}

/// Structured extremal pairs for the outer infimum, evaluated before random
/// sampling: planar distance-d pairs, sphere-segment pairs, canonical L1
/// pairs, axis pairs.
pub fn structured_pairs(space: &SpaceSpec, d: f64) -> Vec<PairSample> {
    let n = space.dim();
    let mut out = Vec::new();
    let mut push = |x: Vector, y: Vector| {
        if let (Ok(nx), Ok(ny)) = (space.norm(&x), space.norm(&y)) {
            if (nx - 1.0).abs() <= UNIT_TOL && (ny - 1.0).abs() <= UNIT_TOL {
                let sep = space.norm_slice_unchecked(&x.sub(&y));
                if sep >= d - UNIT_TOL {
                    out.push(PairSample { x, y, separation: sep });
                }
            }
        }
    };

    // planar pair at separation exactly d, by bisection on the opening angle
    if n >= 2 {
        let pair_at = |theta: f64| -> Option<(Vector, Vector, f64)> {
            let mut cx = vec![0.0; n];
            let mut cy = vec![0.0; n];
            cx[0] = theta.cos();
            cx[1] = theta.sin();
            cy[0] = theta.cos();
            cy[1] = -theta.sin();
            let x = space.normalize(&Vector::new(cx).ok()?).ok()?;
            let y = space.normalize(&Vector::new(cy).ok()?).ok()?;
            let sep = space.norm_slice_unchecked(&x.sub(&y));
            Some((x, y, sep))
        };
        let (mut lo, mut hi) = (0.0_f64, std::f64::consts::FRAC_PI_2);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match pair_at(mid) {
                Some((_, _, sep)) if sep < d => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        if let Some((x, y, _)) = pair_at(hi) {
            push(x, y);
        }
    }

    // sphere-segment pairs where the sphere is flat
    match space {
        SpaceSpec::Linf { n } if *n >= 2 => {
            let v = Vector::new(vec![1.0; *n]).unwrap();
            let mut wc = vec![1.0; *n];
            wc[0] = -1.0;
            let w = Vector::new(wc).unwrap();
            if let Ok(pair) = witness::segment_pair(space, &v, &w, d) {
                push(pair.x, pair.y);
            }
        }
        SpaceSpec::WeightedL1 { weights } if weights.len() >= 2 => {
            let mut vc = vec![0.0; weights.len()];
            let mut wc = vec![0.0; weights.len()];
            vc[0] = 1.0 / weights[0];
            wc[1] = 1.0 / weights[1];
            if let Ok(pair) =
                witness::segment_pair(space, &Vector::new(vc).unwrap(), &Vector::new(wc).unwrap(), d)
            {
                push(pair.x, pair.y);
            }
        }
        _ => {}
    }

    // canonical flat pair on an equal-weight L1 discretization
    if let SpaceSpec::WeightedL1 { weights } = space {
        let nn = weights.len();
        let equal = weights.iter().all(|w| (w - 1.0 / nn as f64).abs() < 1e-12);
        if equal && nn % 2 == 0 && d < 2.0 {
            let c = (2.0 + d) / 2.0;
            let half = nn / 2;
            let mut f = vec![c; nn];
            let mut g = vec![c - d; nn];
            for item in f.iter_mut().skip(half) {
                *item = c - d;
            }
            for item in g.iter_mut().skip(half) {
                *item = c;
            }
            push(Vector::new(f).unwrap(), Vector::new(g).unwrap());
        }
    }

    // axis pairs and the antipodal pair
    for i in 0..n.min(6) {
        for j in (i + 1)..n.min(6) {
            let ei = space.normalize(&Vector::unit(n, i));
            let ej = space.normalize(&Vector::unit(n, j));
            if let (Ok(ei), Ok(ej)) = (ei, ej) {
                push(ei, ej);
            }
        }
    }
    if let Ok(e0) = space.normalize(&Vector::unit(n, 0)) {
        let m = e0.scale(-1.0);
        push(e0, m);
    }

    out
}

fn random_unit(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Option<Vector> {
    let n = space.dim();
    let dir: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
    space.normalize(&Vector::new(dir).ok()?).ok()
}

/// Estimates U(d;a) by minimizing the inner supremum over sampled unit pairs.
pub fn outer_inf(
    space: &SpaceSpec,
    d: f64,
    a: f64,
    p: f64,
    pair_budget: usize,
    seed: u64,
    method: Method,
) -> Result<OuterResult> {
    if !(0.0 < d && d < 2.0) {
        return Err(Error::Domain(format!("outer_inf requires d in (0, 2), got {d}")));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }

    let mut pairs = structured_pairs(space, d);
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, 0xA11CE));
    let mut rejections = 0usize;
    let max_rejections = 50 * pair_budget.max(1);
    while pairs.len() < pair_budget && rejections < max_rejections {
        let (x, y) = match (random_unit(space, &mut rng), random_unit(space, &mut rng)) {
            (Some(x), Some(y)) => (x, y),
            _ => {
                rejections += 1;
                continue;
            }
        };
        let sep = space.norm_slice_unchecked(&x.sub(&y));
        if sep >= d {
            pairs.push(PairSample { x, y, separation: sep });
        } else {
            rejections += 1;
        }
    }
    // rejection stalls for d near 2: push y along the sphere away from x
    while pairs.len() < pair_budget {
        let x = match random_unit(space, &mut rng) {
            Some(x) => x,
            None => break,
        };
        let y0 = match random_unit(space, &mut rng) {
            Some(y) => y,
            None => break,
        };
        let at = |s: f64| -> Option<(Vector, f64)> {
            let blended = y0.scale(1.0 - s).add(&x.scale(-s));
            let y = space.normalize(&blended).ok()?;
            let sep = space.norm_slice_unchecked(&x.sub(&y));
            Some((y, sep))
        };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match at(mid) {
                Some((_, sep)) if sep < d => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        if let Some((y, sep)) = at(hi) {
            if sep >= d - UNIT_TOL {
                pairs.push(PairSample { x, y, separation: sep });
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::PairSearchExhausted { d });
    }

    let mut best: Option<(ModulusEstimate, PairSample)> = None;
    let mut evaluations = 0u64;
    for (i, pair) in pairs.iter().enumerate() {
        let est = inner_sup_p(space, &pair.x, &pair.y, a, p, method, split_seed(seed, i as u64))?;
        evaluations += est.evaluations;
        let better = match &best {
            None => true,
            Some((b, _)) => est.value < b.value,
        };
        if better {
            best = Some((est, pair.clone()));
        }
    }
    let (mut est, pair) = best.expect("at least one pair");
    est.direction = Direction::Estimate;
    est.evaluations = evaluations;
    est.seed = seed;
    let pairs_evaluated = pairs.len();
    Ok(OuterResult { estimate: est, pair, pairs_evaluated })
}

/// Per-candidate mean-value sandwich between the p-power gap and the p = 1
/// gap: p(1-a)^{p-1} |r-s| <= |r^p - s^p| <= p(1+a)^{p-1} |r-s|.
pub fn p_sandwich(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    a: f64,
    p: f64,
) -> Result<(f64, f64, f64)> {
    validate_inner_inputs(space, x, y, a, p)?;
    let r = space.norm(&x.add(z))?;
    let s = space.norm(&y.add(z))?;
    let base = (r - s).abs();
    let mid = (r.powf(p) - s.powf(p)).abs();
    let lower = p * (1.0 - a).powf(p - 1.0) * base;
    let upper = p * (1.0 + a).powf(p - 1.0) * base;
    Ok((lower, mid, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn inner_sup_bounds_and_degenerate() {
        let space = SpaceSpec::L2 { n: 2 };
        let x = v(&[1.0, 0.0]);
        let y = v(&[0.0, 1.0]);
        let est = inner_sup(&space, &x, &y, 0.1, Method::Witness, 7).unwrap();
        assert!(est.value > 0.0);
        assert!(est.value <= 2.0_f64.sqrt() + 1e-12);
        assert_eq!(est.direction, Direction::LowerBound);

        let same = inner_sup(&space, &x, &x, 0.5, Method::Witness, 7).unwrap();
        assert_eq!(same.value, 0.0);

        assert!(inner_sup(&space, &v(&[2.0, 0.0]), &y, 0.1, Method::Witness, 7).is_err());
        assert!(inner_sup(&space, &x, &y, 0.0, Method::Witness, 7).is_err());
    }

    #[test]
    fn inner_sup_p2_matches_closed_form() {
        let space = SpaceSpec::L2 { n: 2 };
        let x = v(&[1.0, 0.0]);
        let y = v(&[0.0, 1.0]);
        let est = inner_sup_p(&space, &x, &y, 0.5, 2.0, Method::Witness, 7).unwrap();
        assert!((est.value - 2.0_f64.sqrt()).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn inner_sup_grid_close_to_oracle() {
        let space = SpaceSpec::L2 { n: 2 };
        let x = v(&[1.0, 0.0]);
        let y = v(&[0.0, 1.0]);
        let est = inner_sup(&space, &x, &y, 0.1, Method::Grid, 7).unwrap();
        let oracle = brute_force_oracle(&space, &x, &y, 0.1, 1.0, 400).unwrap();
        assert!((est.value - oracle.estimate.value).abs() < 1e-3);
    }

    #[test]
    fn oracle_proposition_value() {
        let space = SpaceSpec::L2 { n: 2 };
        let res =
            brute_force_oracle(&space, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 0.5, 2.0, 400).unwrap();
        assert!((res.estimate.value - 2.0_f64.sqrt()).abs() < 5e-3, "{}", res.estimate.value);
        assert!(res.certified_upper >= res.estimate.value);
    }

    #[test]
    fn oracle_rejects_large_dimension() {
        let space = SpaceSpec::L2 { n: 4 };
        let x = space.normalize(&v(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(brute_force_oracle(&space, &x, &x, 0.1, 1.0, 50).is_err());
    }

    #[test]
    fn ascent_dominates_witness_candidates() {
        let space = SpaceSpec::L2 { n: 3 };
        let x = space.normalize(&v(&[1.0, 0.2, -0.3])).unwrap();
        let y = space.normalize(&v(&[0.1, 1.0, 0.4])).unwrap();
        let wit = inner_sup_p(&space, &x, &y, 0.2, 2.0, Method::Witness, 3).unwrap();
        let asc = ascent(&space, &x, &y, 0.2, 2.0, 8, 3).unwrap();
        assert!(asc.value >= wit.value - 1e-12);
        let d = space.norm(&x.sub(&y)).unwrap();
        assert!((asc.value - 2.0 * 0.2 * d).abs() < 1e-4, "{} vs {}", asc.value, 2.0 * 0.2 * d);
    }

    #[test]
    fn outer_inf_hilbert_p2() {
        let space = SpaceSpec::L2 { n: 2 };
        let res = outer_inf(&space, 1.0, 0.4, 2.0, 16, 11, Method::Witness).unwrap();
        assert!((res.estimate.value - 0.8).abs() < 1e-3, "{}", res.estimate.value);
        assert_eq!(res.estimate.direction, Direction::Estimate);
    }

    #[test]
    fn outer_inf_never_exceeds_d() {
        let space = SpaceSpec::L2 { n: 2 };
        let res = outer_inf(&space, 1.0, 10.0, 1.0, 8, 11, Method::Witness).unwrap();
        assert!(res.estimate.value <= 1.0 + 1e-9, "{}", res.estimate.value);
    }

    #[test]
    fn outer_inf_rejects_bad_d() {
        let space = SpaceSpec::L2 { n: 2 };
        assert!(outer_inf(&space, 0.0, 0.1, 1.0, 4, 1, Method::Witness).is_err());
        assert!(outer_inf(&space, 2.0, 0.1, 1.0, 4, 1, Method::Witness).is_err());
    }

    #[test]
    fn symmetry_in_arguments() {
        let space = SpaceSpec::Lp { p: 3.0, n: 2 };
        let x = space.normalize(&v(&[1.0, 0.4])).unwrap();
        let y = space.normalize(&v(&[-0.2, 1.0])).unwrap();
        let e1 = inner_sup(&space, &x, &y, 0.3, Method::Witness, 5).unwrap();
        let e2 = inner_sup(&space, &y, &x, 0.3, Method::Witness, 5).unwrap();
        assert_eq!(e1.value, e2.value);
        assert_eq!(e1.best_z, e2.best_z);
    }
}
