//! Explicit perturbation constructions: each returns a [`WitnessResult`]
//! carrying the perturbation, its evaluated gap and the guaranteed bound.

use crate::error::{Error, Result};
use crate::modulus::PairSample;
use crate::space::{SpaceSpec, Vector};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessResult {
    /// The perturbation, in the coordinates of the pair it was built for
    /// (flattened for Bochner vectors).
    pub z: Vector,
    /// |  ||x+z|| - ||y+z||  | (or the p-power analogue), evaluated directly.
    pub achieved_gap: f64,
    /// The bound this construction guarantees.
    pub guaranteed_gap: f64,
    pub label: String,
    pub trace: serde_json::Value,
}

fn require_unit(space: &SpaceSpec, v: &Vector, name: &str) -> Result<f64> {
    let n = space.norm(v)?;
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("{name} must be a unit vector (norm = {n})")));
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// Inner-product spaces
// ---------------------------------------------------------------------------

/// The maximiser z = a (x-y)/||x-y|| for the p = 2 gap in an inner-product
/// space; attains 2a||x-y||.
pub fn hilbert_witness(x: &Vector, y: &Vector, a: f64) -> Result<WitnessResult> {
    let space = SpaceSpec::L2 { n: x.len() };
    require_unit(&space, x, "x")?;
    require_unit(&space, y, "y")?;
    if a <= 0.0 {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    let diff = x.sub(y);
    let d = space.norm(&diff)?;
    if d == 0.0 {
        return Err(Error::Domain("hilbert_witness requires x != y".into()));
    }
    let z = diff.scale(a / d);
    let nx = space.norm(&x.add(&z))?;
    let ny = space.norm(&y.add(&z))?;
    let achieved = (nx * nx - ny * ny).abs();
    let guaranteed = 2.0 * a * d;
    Ok(WitnessResult {
        z,
        achieved_gap: achieved,
        guaranteed_gap: guaranteed,
        label: "hilbert".into(),
        trace: json!({ "d": d, "a": a, "p": 2.0 }),
    })
}

/// z = (a/d)(y-x) in a uniformly convex space with modulus `delta`;
/// guarantees a p = 1 gap of (4a/d) delta(d). Requires a <= d/2.
pub fn uc_witness(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    a: f64,
    delta: impl Fn(f64) -> f64,
) -> Result<WitnessResult> {
    require_unit(space, x, "x")?;
    require_unit(space, y, "y")?;
    let diff = y.sub(x);
    let d = space.norm(&diff)?;
    if d == 0.0 || d > 2.0 + UNIT_TOL {
        return Err(Error::Domain(format!("need 0 < ||x-y|| <= 2, got {d}")));
    }
    if a <= 0.0 || a > d / 2.0 + 1e-12 {
        return Err(Error::Domain(format!("uc_witness requires 0 < a <= d/2 (a = {a}, d = {d})")));
    }
    let z = diff.scale(a / d);
    let achieved = (space.norm(&y.add(&z))? - space.norm(&x.add(&z))?).abs();
    let guaranteed = (4.0 * a / d) * delta(d);
    Ok(WitnessResult {
        z,
        achieved_gap: achieved,
        guaranteed_gap: guaranteed,
        label: "uc-remark".into(),
        trace: json!({ "d": d, "a": a, "delta_d": delta(d) }),
    })
}

/// Modulus of uniform convexity of a Hilbert space.
pub fn hilbert_delta(d: f64) -> f64 {
    1.0 - (1.0 - d * d / 4.0).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// L1 canonical form and witness (Theorem B machinery)
// ---------------------------------------------------------------------------

/// Where a canonical atom came from, for mapping witnesses back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomOrigin {
    /// Index of the original atom.
    pub orig: usize,
    /// Measure carried from the original atom into this canonical atom,
    /// before the density rescaling.
    pub pre_weight: f64,
    /// Canonical density = original density * scale on this atom.
    pub density_scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomMap {
    /// Sign change applied to the original pair, one entry per original atom.
    pub signs: Vec<f64>,
    pub orig_weights: Vec<f64>,
    /// One entry per canonical atom, in canonical order.
    pub origins: Vec<AtomOrigin>,
}

impl AtomMap {
    /// Maps a canonical-coordinate perturbation back to the original atoms.
    /// Canonical atoms sharing an original atom are merged by weight
    /// averaging, which never increases the L1 norm.
    pub fn pull_back(&self, weights: &[f64], z: &Vector) -> Result<Vector> {
        if z.len() != self.origins.len() || weights.len() != self.origins.len() {
            return Err(Error::DimensionMismatch { expected: self.origins.len(), got: z.len() });
        }
        let mut out = vec![0.0; self.orig_weights.len()];
        for (i, org) in self.origins.iter().enumerate() {
            // density in pre-rescale coordinates, weighted by carried measure
            out[org.orig] += org.pre_weight * (z[i] / org.density_scale);
        }
        for (j, v) in out.iter_mut().enumerate() {
            *v = self.signs[j] * *v / self.orig_weights[j];
        }
        Vector::new(out)
    }
}

/// The reduced pair of Theorem B's proof: f v g constant = C = (2+d)/2,
/// [f >= g] an initial segment of mass b, one-sided gaps both d/2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct L1CanonicalForm {
    pub weights: Vec<f64>,
    pub f: Vector,
    pub g: Vector,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub atom_map: AtomMap,
}

const CANON_TOL: f64 = 1e-9;

impl L1CanonicalForm {
    pub fn space(&self) -> SpaceSpec {
        SpaceSpec::WeightedL1 { weights: self.weights.clone() }
    }
}

/// Canonicalizes a unit pair in a weighted-L1 space: sign change, replacement
/// of opposite-sign mass by disjoint nonnegative blocks, permutation making
/// [f >= g] an initial segment, and the measure rescaling that makes f v g
/// constant.
pub fn l1_canonicalize(weights: &[f64], f: &Vector, g: &Vector) -> Result<L1CanonicalForm> {
    let space = SpaceSpec::weighted_l1(weights.to_vec())?;
    require_unit(&space, f, "f")?;
    require_unit(&space, g, "g")?;
    let n = weights.len();

    // (i) sign change making f >= 0 (g's sign decides where f vanishes)
    let signs: Vec<f64> = (0..n)
        .map(|i| {
            let pivot = if f[i] != 0.0 { f[i] } else { g[i] };
            if pivot < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    let mut atoms: Vec<(usize, f64, f64, f64)> = (0..n)
        .map(|i| (i, weights[i], signs[i] * f[i], signs[i] * g[i]))
        .collect();

    // (i') opposite-sign atoms become two disjoint half-weight blocks of
    // equal L1 mass, one carrying f and one carrying g
    let mut reduced: Vec<(usize, f64, f64, f64)> = Vec::with_capacity(n);
    for (i, w, fi, gi) in atoms.drain(..) {
        if fi > 0.0 && gi < 0.0 {
            reduced.push((i, w / 2.0, 2.0 * fi, 0.0));
            reduced.push((i, w / 2.0, 0.0, 2.0 * gi.abs()));
        } else {
            reduced.push((i, w, fi, gi));
        }
    }

    let d: f64 = reduced.iter().map(|(_, w, fi, gi)| w * (fi - gi).abs()).sum();
    if d <= CANON_TOL {
        return Err(Error::Domain("canonical form is degenerate: ||f-g|| = 0".into()));
    }

    // (ii) drop atoms where both vanish, put [f >= g] first
    reduced.retain(|(_, _, fi, gi)| *fi > 0.0 || *gi > 0.0);
    reduced.sort_by(|a, b| {
        let ka = a.3 > a.2; // g > f goes last
        let kb = b.3 > b.2;
        ka.cmp(&kb).then(a.0.cmp(&b.0))
    });

    // (iii) measure rescaling making f v g constant
    let c: f64 = reduced.iter().map(|(_, w, fi, gi)| w * fi.max(*gi)).sum();
    let mut canon_w = Vec::with_capacity(reduced.len());
    let mut canon_f = Vec::with_capacity(reduced.len());
    let mut canon_g = Vec::with_capacity(reduced.len());
    let mut origins = Vec::with_capacity(reduced.len());
    for (i, w, fi, gi) in &reduced {
        let m = fi.max(*gi);
        let scale = c / m;
        canon_w.push(w * m / c);
        canon_f.push(fi * scale);
        canon_g.push(gi * scale);
        origins.push(AtomOrigin { orig: *i, pre_weight: *w, density_scale: scale });
    }

    let b: f64 = reduced
        .iter()
        .zip(&canon_w)
        .filter(|((_, _, fi, gi), _)| fi >= gi)
        .map(|(_, w)| w)
        .sum();

    let form = L1CanonicalForm {
        weights: canon_w,
        f: Vector::new(canon_f)?,
        g: Vector::new(canon_g)?,
        b,
        c,
        d,
        atom_map: AtomMap { signs, orig_weights: weights.to_vec(), origins },
    };

    // canonical invariants
    let left_gap: f64 = (0..form.weights.len())
        .filter(|&i| form.f[i] >= form.g[i])
        .map(|i| form.weights[i] * (form.f[i] - form.g[i]))
        .sum();
    let right_gap: f64 = (0..form.weights.len())
        .filter(|&i| form.g[i] > form.f[i])
        .map(|i| form.weights[i] * (form.g[i] - form.f[i]))
        .sum();
    let checks = [
        (form.c - (2.0 + form.d) / 2.0).abs(),
        (left_gap - form.d / 2.0).abs(),
        (right_gap - form.d / 2.0).abs(),
        (form.space().norm(&form.f)? - 1.0).abs(),
        (form.space().norm(&form.g)? - 1.0).abs(),
    ];
    if checks.iter().any(|e| *e > CANON_TOL) {
        return Err(Error::Domain(format!("canonical invariants violated: errors {checks:?}")));
    }
    Ok(form)
}

/// The Theorem B witness on a canonical pair. Case 1 kills a whole side and
/// attains d exactly; Case 2 builds the sorted-prefix kills h1, h2 and
/// returns the better one.
pub fn l1_witness(form: &L1CanonicalForm, a: f64) -> Result<WitnessResult> {
    if a <= 0.0 {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    let bc = form.b * form.c;
    let obc = (1.0 - form.b) * form.c;

    if a >= bc.max(obc) - 1e-12 {
        // Case 1: kill the larger side entirely; gap = d, the maximum possible
        let left_is_larger = bc >= obc;
        let mut z = vec![0.0; form.weights.len()];
        for (i, zi) in z.iter_mut().enumerate() {
            let on_left = form.f[i] >= form.g[i];
            if on_left == left_is_larger {
                *zi = -form.c;
            }
        }
        let z = Vector::new(z)?;
        let space = form.space();
        let achieved = (space.norm(&form.f.add(&z))? - space.norm(&form.g.add(&z))?).abs();
        let z_orig = form.atom_map.pull_back(&form.weights, &z)?;
        return Ok(WitnessResult {
            z,
            achieved_gap: achieved,
            guaranteed_gap: form.d,
            label: "l1-case1".into(),
            trace: json!({
                "case": "Case1",
                "side": if left_is_larger { "[0,b]" } else { "(b,1]" },
                "b": form.b, "C": form.c, "d": form.d,
                "z_original": z_orig,
            }),
        });
    }

    // Case 2: prefix kills of mass a on each side, opposing density sorted
    // nondecreasing so the prefix integral is smallest
    let left: Vec<usize> = (0..form.weights.len()).filter(|&i| form.f[i] >= form.g[i]).collect();
    let right: Vec<usize> = (0..form.weights.len()).filter(|&i| form.g[i] > form.f[i]).collect();

    let branch = |side: &[usize], side_mass: f64, kill_f: bool| -> Result<(Vector, Vec<f64>, f64, f64, f64)> {
        // sort by the surviving function, ascending
        let mut order: Vec<usize> = side.to_vec();
        order.sort_by(|&i, &j| {
            let (oi, oj) = if kill_f { (form.g[i], form.g[j]) } else { (form.f[i], form.f[j]) };
            oi.partial_cmp(&oj).unwrap().then(i.cmp(&j))
        });
        let t = (a / form.c).min(side_mass);
        // refined grid: split the atom containing the prefix boundary
        let mut weights = form.weights.clone();
        let mut f = form.f.coords().to_vec();
        let mut g = form.g.coords().to_vec();
        let mut z = vec![0.0; weights.len()];
        let mut remaining = t;
        for &i in &order {
            if remaining <= 1e-15 {
                break;
            }
            if weights[i] <= remaining + 1e-15 {
                z[i] = -form.c;
                remaining -= weights[i];
            } else {
                // split atom i: killed part of weight `remaining`, rest intact
                let rest = weights[i] - remaining;
                weights[i] = remaining;
                z[i] = -form.c;
                weights.push(rest);
                f.push(f[i]);
                g.push(g[i]);
                z.push(0.0);
                remaining = 0.0;
            }
        }
        let space = SpaceSpec::WeightedL1 { weights: weights.clone() };
        let fv = Vector::new(f)?;
        let gv = Vector::new(g)?;
        let zv = Vector::new(z)?;
        let achieved = (space.norm(&fv.add(&zv))? - space.norm(&gv.add(&zv))?).abs();
        let guaranteed = (t / side_mass) * form.d;
        Ok((zv, weights, achieved, guaranteed, t))
    };

    let (z1, w1, a1, g1, t1) = branch(&left, form.b, true)?;
    let (z2, w2, a2, g2, t2) = branch(&right, 1.0 - form.b, false)?;

    let use_h1 = a1 >= a2 - 1e-12; // ties favour h1
    let (z, weights, achieved, t, side) =
        if use_h1 { (z1, w1, a1, t1, "h1") } else { (z2, w2, a2, t2, "h2") };
    let guaranteed = g1.max(g2);

    // map back through the atom map; split atoms introduced above collapse
    // onto their canonical atom first
    let mut z_canon = vec![0.0; form.weights.len()];
    for i in 0..form.weights.len() {
        z_canon[i] += weights[i] * z[i];
    }
    // refined tail atoms (indices >= the canonical count) carry z = 0
    for (i, zc) in z_canon.iter_mut().enumerate() {
        *zc /= form.weights[i];
    }
    let z_orig = form.atom_map.pull_back(&form.weights, &Vector::new(z_canon)?)?;

    Ok(WitnessResult {
        z,
        achieved_gap: achieved,
        guaranteed_gap: guaranteed,
        label: "l1-case2".into(),
        trace: json!({
            "case": "Case2",
            "branch": side,
            "t": t,
            "b": form.b, "C": form.c, "d": form.d,
            "refined_weights": weights,
            "guaranteed_h1": g1, "guaranteed_h2": g2,
            "z_original": z_orig,
        }),
    })
}

// ---------------------------------------------------------------------------
// Bochner spaces (Theorem A(i))
// ---------------------------------------------------------------------------

use crate::space::BochnerVector;

/// z = -x on a prefix atom set of measure a' <= a, for constant-block unit
/// vectors; the gap is a' ||x-y||_inner exactly.
pub fn bochner_witness(
    space: &SpaceSpec,
    x: &BochnerVector,
    y: &BochnerVector,
    a: f64,
) -> Result<WitnessResult> {
    let (weights, inner) = match space {
        SpaceSpec::Bochner { weights, inner } => (weights, inner),
        _ => return Err(Error::Domain("bochner_witness requires a Bochner space".into())),
    };
    if a <= 0.0 {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if v.blocks.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), got: v.blocks.len() });
        }
        if v.blocks.iter().any(|b| b != &v.blocks[0]) {
            return Err(Error::Domain(format!("{name} must have constant blocks")));
        }
        let n = space.norm_bochner(v)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("{name} must be a unit vector (norm = {n})")));
        }
    }

    // largest prefix measure a' <= a
    let mut a_used = 0.0;
    let mut prefix = 0;
    for w in weights {
        if a_used + w <= a + 1e-12 {
            a_used += w;
            prefix += 1;
        } else {
            break;
        }
    }
    let d_inner = inner.norm(&x.blocks[0].sub(&y.blocks[0]))?;
    let mut blocks = Vec::with_capacity(weights.len());
    for i in 0..weights.len() {
        if i < prefix {
            blocks.push(x.blocks[i].scale(-1.0));
        } else {
            blocks.push(Vector::zeros(inner.dim()));
        }
    }
    let z = BochnerVector::new(blocks)?;
    let achieved = (space.norm_bochner(&BochnerVector {
        blocks: x.blocks.iter().zip(&z.blocks).map(|(b, zb)| b.add(zb)).collect(),
    })? - space.norm_bochner(&BochnerVector {
        blocks: y.blocks.iter().zip(&z.blocks).map(|(b, zb)| b.add(zb)).collect(),
    })?)
        .abs();
    Ok(WitnessResult {
        z: z.flatten(),
        achieved_gap: achieved,
        guaranteed_gap: a_used * d_inner,
        label: "bochner-prefix".into(),
        trace: json!({ "a_requested": a, "a_used": a_used, "prefix_atoms": prefix, "d_inner": d_inner }),
    })
}

// ---------------------------------------------------------------------------
// Sphere segments (Theorem C) and the l_p^2 witness (Corollary)
// ---------------------------------------------------------------------------

/// Places x, y on a length-2 sphere segment [v, w] at distance 1 - d/2 from
/// the respective endpoints, so that ||x - y|| = d.
pub fn segment_pair(space: &SpaceSpec, v: &Vector, w: &Vector, d: f64) -> Result<PairSample> {
    if !(0.0 < d && d <= 2.0) {
        return Err(Error::Domain(format!("segment_pair requires d in (0, 2], got {d}")));
    }
    let dist = space.norm(&v.sub(w))?;
    if (dist - 2.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("segment endpoints must satisfy ||v-w|| = 2, got {dist}")));
    }
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = v.scale(lambda).add(&w.scale(1.0 - lambda));
        let n = space.norm(&p)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "segment not contained in the unit sphere: norm {n} at lambda = {lambda}"
            )));
        }
    }
    let tau = (2.0 - d) / 4.0;
    let x = v.scale(1.0 - tau).add(&w.scale(tau));
    let y = w.scale(1.0 - tau).add(&v.scale(tau));
    let separation = space.norm(&x.sub(&y))?;
    if (separation - d).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("segment pair separation {separation} != {d}")));
    }
    Ok(PairSample { x, y, separation })
}

/// min(4a/(2+d), 1) * d — the non-super-reflexive upper bound.
pub fn thmc_bound(d: f64, a: f64) -> Result<f64> {
    if !(0.0 < d && d <= 2.0) {
        return Err(Error::Domain(format!("thmc_bound requires d in (0, 2], got {d}")));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("thmc_bound requires a > 0, got {a}")));
    }
    Ok((4.0 * a / (2.0 + d)).min(1.0) * d)
}

/// The two-point witness in l_p^2 for p > 2: x = (alpha, d/2), y = (alpha,
/// -d/2), z = (0, a); the p-power gap is (d/2+a)^p - (d/2-a)^p <= 2ap d^{p-1}.
pub fn lp2_witness(p: f64, d: f64, a: f64) -> Result<WitnessResult> {
    if p <= 2.0 {
        return Err(Error::Domain(format!("lp2_witness requires p > 2, got {p}")));
    }
    if !(0.0 < d && d <= 2.0) {
        return Err(Error::Domain(format!("lp2_witness requires d in (0, 2], got {d}")));
    }
    if a <= 0.0 || a > d / 2.0 + 1e-12 {
        return Err(Error::Domain(format!("lp2_witness requires 0 < a <= d/2 (a = {a}, d = {d})")));
    }
    let half = d / 2.0;
    let alpha = (1.0 - half.powf(p)).max(0.0).powf(1.0 / p);
    let space = SpaceSpec::lp(p, 2)?;
    let x = Vector::new(vec![alpha, half])?;
    let y = Vector::new(vec![alpha, -half])?;
    let z = Vector::new(vec![0.0, a])?;
    let nx = space.norm(&x.add(&z))?;
    let ny = space.norm(&y.add(&z))?;
    let achieved = (nx.powf(p) - ny.powf(p)).abs();
    let guaranteed = (half + a).powf(p) - (half - a).powf(p);
    let order_bound = 2.0 * a * p * d.powf(p - 1.0);
    if guaranteed > order_bound + 1e-9 {
        return Err(Error::Domain(format!(
            "lp2 gap {guaranteed} exceeds the order bound {order_bound}"
        )));
    }
    Ok(WitnessResult {
        z,
        achieved_gap: achieved,
        guaranteed_gap: guaranteed,
        label: "lp2-two-point".into(),
        trace: json!({ "p": p, "d": d, "a": a, "alpha": alpha, "x": x, "y": y, "order_bound": order_bound }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn hilbert_witness_examples() {
        let w = hilbert_witness(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 0.5).unwrap();
        assert!((w.achieved_gap - 2.0_f64.sqrt()).abs() < 1e-10, "{}", w.achieved_gap);
        assert!((w.achieved_gap - w.guaranteed_gap).abs() < 1e-10);

        let w = hilbert_witness(&v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), 1.0).unwrap();
        assert!((w.achieved_gap - 4.0).abs() < 1e-10);

        let x = v(&[0.6, 0.8]);
        let y = v(&[0.8, 0.6]);
        let w = hilbert_witness(&x, &y, 0.1).unwrap();
        let expect = 2.0 * 0.1 * (0.2_f64 * 0.2 * 2.0).sqrt();
        assert!((w.achieved_gap - expect).abs() < 1e-10);

        assert!(hilbert_witness(&v(&[1.0, 0.0]), &v(&[1.0, 0.0]), 0.5).is_err());
    }

    #[test]
    fn uc_witness_examples() {
        let x = v(&[1.0, 0.0]);
        let y = v(&[0.0, 1.0]);
        let space = SpaceSpec::L2 { n: 2 };
        let w = uc_witness(&space, &x, &y, 0.5, hilbert_delta).unwrap();
        let d = 2.0_f64.sqrt();
        let expect = (4.0 * 0.5 / d) * (1.0 - 1.0 / d);
        assert!((w.guaranteed_gap - expect).abs() < 1e-9);
        assert!(w.achieved_gap >= w.guaranteed_gap - 1e-9);
        assert!((w.achieved_gap - 0.662).abs() < 5e-3, "{}", w.achieved_gap);

        // antipodal: z = -x, achieved = 2
        let w = uc_witness(&space, &v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), 1.0, hilbert_delta).unwrap();
        assert!((w.guaranteed_gap - 2.0).abs() < 1e-12);
        assert!((w.achieved_gap - 2.0).abs() < 1e-12);

        // a > d/2 rejected
        assert!(uc_witness(&space, &x, &y, 1.0, hilbert_delta).is_err());
    }

    #[test]
    fn l1_canonicalize_hand_example() {
        // n = 4 equal atoms, f = (1.5, 1.5, 0.5, 0.5), g = 1: d = 0.5
        let w = vec![0.25; 4];
        let f = v(&[1.5, 1.5, 0.5, 0.5]);
        let g = v(&[1.0, 1.0, 1.0, 1.0]);
        let form = l1_canonicalize(&w, &f, &g).unwrap();
        assert!((form.d - 0.5).abs() < 1e-12);
        assert!((form.c - 1.25).abs() < 1e-12);
        assert!((form.b - 0.5 * 1.5 / 1.25).abs() < 1e-12, "b = {}", form.b);
    }

    #[test]
    fn l1_canonicalize_rejects_equal_pair() {
        let w = vec![0.5, 0.5];
        let f = v(&[1.0, 1.0]);
        assert!(l1_canonicalize(&w, &f, &f).is_err());
    }

    fn flat_form(n: usize, d: f64) -> L1CanonicalForm {
        let c = (2.0 + d) / 2.0;
        let half = n / 2;
        let w = vec![1.0 / n as f64; n];
        let mut f = vec![c; n];
        let mut g = vec![c - d; n];
        for i in half..n {
            f[i] = c - d;
            g[i] = c;
        }
        l1_canonicalize(&w, &v(&f), &v(&g)).unwrap()
    }

    #[test]
    fn l1_witness_case1_attains_d() {
        let form = flat_form(8, 1.0);
        let w = l1_witness(&form, 0.75).unwrap();
        assert_eq!(w.label, "l1-case1");
        assert!((w.achieved_gap - 1.0).abs() < 1e-12, "{}", w.achieved_gap);
        assert!((w.guaranteed_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l1_witness_case2_flat_tightness() {
        // flat g: guaranteed = (t/b) d = 0.4 at a = 0.3, d = 1, b = 1/2
        let form = flat_form(10, 1.0);
        let w = l1_witness(&form, 0.3).unwrap();
        assert_eq!(w.label, "l1-case2");
        assert!((w.guaranteed_gap - 0.4).abs() < 1e-12, "{}", w.guaranteed_gap);
        assert!((w.achieved_gap - 0.4).abs() < 1e-12, "{}", w.achieved_gap);
        let formula = thmc_bound(1.0, 0.3).unwrap();
        assert!((w.guaranteed_gap - formula).abs() < 1e-12);
    }

    #[test]
    fn bochner_witness_examples() {
        let inner = SpaceSpec::Linf { n: 2 };
        let space = SpaceSpec::bochner(vec![0.1; 10], inner).unwrap();
        let x = BochnerVector::constant(&v(&[1.0, 0.0]), 10);
        let y = BochnerVector::constant(&v(&[0.0, 1.0]), 10);
        let w = bochner_witness(&space, &x, &y, 0.3).unwrap();
        assert!((w.achieved_gap - 0.3).abs() < 1e-12, "{}", w.achieved_gap);

        let w = bochner_witness(&space, &x, &x, 0.3).unwrap();
        assert_eq!(w.achieved_gap, 0.0);

        let w = bochner_witness(&space, &x, &y, 1.0).unwrap();
        assert!((w.achieved_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_pair_linf_example() {
        let space = SpaceSpec::Linf { n: 2 };
        let pair =
            segment_pair(&space, &v(&[1.0, 1.0]), &v(&[-1.0, 1.0]), 1.0).unwrap();
        assert_eq!(pair.x.coords(), &[0.5, 1.0]);
        assert_eq!(pair.y.coords(), &[-0.5, 1.0]);
        assert!((pair.separation - 1.0).abs() < 1e-12);

        let pair = segment_pair(&space, &v(&[1.0, 1.0]), &v(&[-1.0, 1.0]), 2.0).unwrap();
        assert_eq!(pair.x.coords(), &[1.0, 1.0]);

        // l2 sphere has no flat segment
        assert!(segment_pair(&SpaceSpec::L2 { n: 2 }, &v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), 1.0).is_err());
    }

    #[test]
    fn segment_pair_l1_positive_face() {
        let space = SpaceSpec::weighted_l1(vec![0.5, 0.5]).unwrap();
        let pair = segment_pair(&space, &v(&[2.0, 0.0]), &v(&[0.0, 2.0]), 1.0).unwrap();
        assert!((pair.separation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thmc_bound_values() {
        assert!((thmc_bound(1.0, 0.25).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((thmc_bound(2.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(thmc_bound(1e-9, 1.0).unwrap() < 1e-8);
        assert!(thmc_bound(0.0, 1.0).is_err());
        assert!(thmc_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn lp2_witness_values() {
        let w = lp2_witness(3.0, 1.0, 0.5).unwrap();
        assert!((w.guaranteed_gap - 1.0).abs() < 1e-12);
        assert!((w.achieved_gap - 1.0).abs() < 1e-12);

        let w = lp2_witness(3.0, 1.0, 1e-9).unwrap();
        assert!(w.guaranteed_gap < 1e-6);

        let w = lp2_witness(4.0, 0.8, 0.2).unwrap();
        assert!((w.guaranteed_gap - (0.6_f64.powi(4) - 0.2_f64.powi(4))).abs() < 1e-12);
        assert!(w.guaranteed_gap <= 2.0 * 0.2 * 4.0 * 0.8_f64.powi(3) + 1e-12);

        assert!(lp2_witness(3.0, 1.0, 0.6).is_err());
    }
}
