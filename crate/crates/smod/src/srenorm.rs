//! The square-sum renorming (||v||_1^2 + ||v||_2^2)^{1/2} of l1: a witness
//! construction with a uniform positive gap guarantee, and the squared-norm
//! transfer inequality that certifies its kill-type branches.

use crate::error::{Error, Result};
use crate::space::{sign_change, SpaceSpec, Vector};
use crate::witness::WitnessResult;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SRenormCase {
    /// Opposite-sign l1 mass exceeds alpha/2: kill part of one vector there.
    Case1,
    /// Same-sign regime, small l2 discrepancy, dominated-coordinate branch.
    Case2aA4,
    /// Same-sign regime, small l2 discrepancy, large-coordinate branch.
    Case2aA5,
    /// Same-sign regime, l2 discrepancy above threshold: push along x - y.
    Case2b,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SRenormTrace {
    /// min{a, d, 1}.
    pub alpha: f64,
    /// ((sqrt 2 - 1)/4) alpha, the relabeled parameter of the Case 2 reduction.
    pub alpha0: f64,
    pub case: SRenormCase,
    /// Coordinates where the sign-normalized pair has opposite signs.
    pub b_set: Vec<usize>,
    /// One-sided set {y < x} inside the same-sign coordinates (final order).
    pub a_set: Vec<usize>,
    pub a3_set: Vec<usize>,
    pub a4_set: Vec<usize>,
    pub a5_set: Vec<usize>,
    /// (x - y) restricted to the one-sided set (Case 2b direction).
    pub u: Vector,
    pub t: f64,
    pub lambda: f64,
    /// Whether the pair order was exchanged (one-sided reduction or the
    /// nonnegative-delta step).
    pub swapped: bool,
    /// ||x||_1 - ||y||_1 after all swaps.
    pub delta: f64,
    /// The stronger per-case bound the proof chain gives for this branch.
    pub case_bound: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Case 1 rate: killed mass alpha/4 converts to a gap of at least alpha/8.
    pub c1: f64,
    /// Case 2a rate in alpha^2: the chain gives
    /// (1/(2(1+alpha/2))) * (2/sqrt 2) * (1/2)(alpha/16)^2, floored at
    /// alpha = 1, i.e. sqrt(2)/1536.
    pub c2: f64,
    /// Case 2b rate in alpha^5/(1+a): 1/(2*16^4).
    pub c3: f64,
    /// alpha0 / alpha = (sqrt 2 - 1)/4.
    pub alpha0_ratio: f64,
    /// min{1/8, c2, c3}; the uniform guarantee is c alpha0^5 / (1+a).
    pub c: f64,
}

pub fn derive_constants() -> DerivedConstants {
    let c1 = 0.125;
    let c2 = 2.0_f64.sqrt() / 1536.0;
    let c3 = 1.0 / (2.0 * 16.0_f64.powi(4));
    DerivedConstants {
        c1,
        c2,
        c3,
        alpha0_ratio: (2.0_f64.sqrt() - 1.0) / 4.0,
        c: c1.min(c2).min(c3),
    }
}

fn l1(v: &Vector) -> f64 {
    v.coords().iter().map(|x| x.abs()).sum()
}

fn l2(v: &Vector) -> f64 {
    v.coords().iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn restrict(v: &Vector, set: &[usize]) -> Vector {
    let mut out = vec![0.0; v.len()];
    for &i in set {
        out[i] = v[i];
    }
    Vector::new(out).expect("finite restriction")
}

fn l1_on(v: &Vector, set: &[usize]) -> f64 {
    set.iter().map(|&i| v[i].abs()).sum()
}

/// Solves ||lambda v||_S = target for lambda in (0, 1] by monotone bisection.
fn solve_lambda(space: &SpaceSpec, v: &Vector, target: f64) -> f64 {
    let full = space.norm(v).unwrap_or(0.0);
    if full <= target {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if space.norm(&v.scale(mid)).unwrap_or(0.0) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Witness for the square-sum renorming. Normalizes signs so x >= 0, splits
/// on the opposite-sign l1 mass (Case 1), then on the l2 size of the
/// one-sided difference (Case 2a/2b), and returns the perturbation the
/// selected branch constructs, with the uniform c alpha0^5/(1+a) guarantee.
pub fn srenorm_witness(
    x: &Vector,
    y: &Vector,
    a: f64,
    d: f64,
) -> Result<(WitnessResult, SRenormTrace)> {
    let n = x.len();
    let space = SpaceSpec::SRenorm { n };
    for (name, v) in [("x", x), ("y", y)] {
        let nv = space.norm(v)?;
        if (nv - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("{name} must be a unit vector (norm = {nv})")));
        }
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    if d <= 0.0 {
        return Err(Error::Domain(format!("d must be positive, got {d}")));
    }
    let sep = space.norm(&x.sub(y))?;
    if sep + UNIT_TOL < d {
        return Err(Error::Domain(format!("||x-y|| = {sep} < d = {d}")));
    }
    if sep <= 1e-12 {
        return Err(Error::Domain("srenorm_witness requires x != y".into()));
    }

    let consts = derive_constants();
    let alpha = a.min(d).min(1.0);
    let alpha0 = consts.alpha0_ratio * alpha;

    // sign change making x >= 0 (coordinates where x vanishes keep their sign)
    let eps: Vec<f64> = x.coords().iter().map(|&xi| if xi < 0.0 { -1.0 } else { 1.0 }).collect();
    let xs = sign_change(x, &eps)?;
    let ys = sign_change(y, &eps)?;

    let b_set: Vec<usize> = (0..n).filter(|&i| ys[i] < 0.0).collect();
    let bc_set: Vec<usize> = (0..n).filter(|&i| ys[i] >= 0.0).collect();
    let opp_mass: f64 = b_set.iter().map(|&i| xs[i] - ys[i]).sum();

    let case;
    let case_bound;
    let z_norm; // perturbation in sign-normalized coordinates
    let mut swapped = false;
    let mut lambda = 0.0;
    let mut t = 0.0;
    let mut a_set: Vec<usize> = Vec::new();
    let mut a3_set: Vec<usize> = Vec::new();
    let mut a4_set: Vec<usize> = Vec::new();
    let mut a5_set: Vec<usize> = Vec::new();
    let mut u = Vector::zeros(n);
    let delta;

    if opp_mass > alpha / 2.0 {
        // Case 1: at least one of the restricted l1 masses exceeds alpha/4;
        // kill that vector on the opposite-sign set down to S-norm alpha/4
        case = SRenormCase::Case1;
        case_bound = alpha / 8.0;
        let x_mass = l1_on(&xs, &b_set);
        let y_mass = l1_on(&ys, &b_set);
        swapped = y_mass > x_mass;
        let v = restrict(if swapped { &ys } else { &xs }, &b_set);
        lambda = solve_lambda(&space, &v, alpha / 4.0);
        z_norm = v.scale(-lambda);
        delta = l1(&xs) - l1(&ys);
    } else {
        // Case 2: both vectors share signs outside a light set; pick the pair
        // order making the one-sided l1 gap large, then make delta >= 0
        let one_sided = |xv: &Vector, yv: &Vector| -> (Vec<usize>, f64) {
            let set: Vec<usize> =
                bc_set.iter().copied().filter(|&i| yv[i] < xv[i]).collect();
            let mass = set.iter().map(|&i| xv[i] - yv[i]).sum();
            (set, mass)
        };
        let (fwd_set, fwd_mass) = one_sided(&xs, &ys);
        let (_, rev_mass) = one_sided(&ys, &xs);
        let mut xc = xs.clone();
        let mut yc = ys.clone();
        if rev_mass > fwd_mass {
            std::mem::swap(&mut xc, &mut yc);
            swapped = true;
        }
        if l1(&xc) < l1(&yc) {
            std::mem::swap(&mut xc, &mut yc);
            swapped = !swapped;
        }
        delta = l1(&xc) - l1(&yc);
        let (set, _) = one_sided(&xc, &yc);
        a_set = if set.is_empty() { fwd_set } else { set };
        u = restrict(&xc.sub(&yc), &a_set);
        let u_l2 = l2(&u);

        if u_l2 > (alpha0 / 16.0) * (alpha0 / 16.0) {
            // Case 2b: push both vectors along u; the squared gap picks up
            // 2t||u||_2^2 plus the nonnegative 2t delta ||u||_1 term
            case = SRenormCase::Case2b;
            let u_s = space.norm(&u)?;
            t = if u_s > 0.0 { (alpha0 / u_s).min(1.0) } else { 0.0 };
            z_norm = u.scale(t);
            let z_s = space.norm(&z_norm)?;
            case_bound = 2.0 * t * u_l2 * u_l2 / (2.0 * (1.0 + z_s));
        } else {
            // Case 2a: the difference is flat; isolate a window of one-sided
            // mass by greedy accumulation in decreasing order
            let threshold = (alpha0 / 16.0) * (alpha0 / 16.0);
            let mut a2: Vec<usize> = a_set
                .iter()
                .copied()
                .filter(|&i| xc[i] - yc[i] > (alpha0 / 16.0) * xc[i])
                .collect();
            a2.sort_by(|&i, &j| {
                (xc[j] - yc[j]).partial_cmp(&(xc[i] - yc[i])).unwrap().then(i.cmp(&j))
            });
            let mut acc = 0.0;
            for &i in &a2 {
                if acc > threshold {
                    break;
                }
                a3_set.push(i);
                acc += xc[i] - yc[i];
            }
            a4_set = a3_set
                .iter()
                .copied()
                .filter(|&i| yc[i] <= xc[i] && xc[i] <= 2.0 * yc[i])
                .collect();
            a5_set = a3_set.iter().copied().filter(|&i| 2.0 * yc[i] < xc[i]).collect();
            let m4: f64 = a4_set.iter().map(|&i| xc[i] - yc[i]).sum();
            let m5: f64 = a5_set.iter().map(|&i| xc[i] - yc[i]).sum();
            // the dominated branch is preferred whenever it carries at least
            // half the window mass
            if m4 >= m5 {
                case = SRenormCase::Case2aA4;
                z_norm = restrict(&yc, &a4_set).scale(-2.0);
                case_bound = 2.0_f64.sqrt() * m4 / (2.0 * (1.0 + alpha0 / 2.0));
            } else {
                case = SRenormCase::Case2aA5;
                z_norm = restrict(&xc, &a5_set).scale(-1.0);
                case_bound = 2.0_f64.sqrt() * m5 / (2.0 * (1.0 + alpha0 / 2.0));
            }
        }
    }

    let z = sign_change(&z_norm, &eps)?;
    let z_s = space.norm(&z)?;
    if z_s > alpha + UNIT_TOL {
        return Err(Error::Domain(format!("constructed ||z||_S = {z_s} exceeds alpha = {alpha}")));
    }
    let achieved = (space.norm(&x.add(&z))? - space.norm(&y.add(&z))?).abs();
    let guaranteed = consts.c * alpha0.powi(5) / (1.0 + a);

    let trace = SRenormTrace {
        alpha,
        alpha0,
        case,
        b_set,
        a_set,
        a3_set,
        a4_set,
        a5_set,
        u,
        t,
        lambda,
        swapped,
        delta,
        case_bound,
    };
    let result = WitnessResult {
        z,
        achieved_gap: achieved,
        guaranteed_gap: guaranteed,
        label: format!("srenorm-{:?}", trace.case).to_lowercase(),
        trace: serde_json::to_value(&trace).unwrap_or_else(|_| json!({})),
    };
    Ok((result, trace))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SquaredTransferCheck {
    /// ||y+z||_S - ||x+z||_S
    pub lhs: f64,
    /// [(||y+z||_1^2 - ||y||_1^2) + (||x||_1^2 - ||x+z||_1^2)] / (2(1+theta))
    pub rhs: f64,
    /// ||y+z||_2 >= ||y||_2, ||x+z||_2 <= ||x||_2, and the transferred
    /// l1-squared increment is nonnegative (the division by the S-norm sum
    /// reverses on a negative numerator, so the scalar form needs it).
    pub hypotheses_hold: bool,
}

/// The transfer inequality behind the kill-type branches: for unit-S x, y
/// and ||z||_S <= theta, whenever z does not shrink y in l2 nor grow x in
/// l2, the square-norm gap dominates the l1-squared increment.
pub fn squared_transfer(
    x: &Vector,
    y: &Vector,
    z: &Vector,
    theta: f64,
) -> Result<SquaredTransferCheck> {
    let n = x.len();
    let space = SpaceSpec::SRenorm { n };
    for (name, v) in [("x", x), ("y", y)] {
        let nv = space.norm(v)?;
        if (nv - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("{name} must be a unit vector (norm = {nv})")));
        }
    }
    if theta < 0.0 {
        return Err(Error::Domain(format!("theta must be nonnegative, got {theta}")));
    }
    let zn = space.norm(z)?;
    if zn > theta + UNIT_TOL {
        return Err(Error::Domain(format!("||z||_S = {zn} exceeds theta = {theta}")));
    }
    let xz = x.add(z);
    let yz = y.add(z);
    let lhs = space.norm(&yz)? - space.norm(&xz)?;
    let increment = (l1(&yz).powi(2) - l1(y).powi(2)) + (l1(x).powi(2) - l1(&xz).powi(2));
    let rhs = increment / (2.0 * (1.0 + theta));
    let hypotheses_hold =
        l2(&yz) >= l2(y) - 1e-12 && l2(&xz) <= l2(x) + 1e-12 && increment >= 0.0;
    Ok(SquaredTransferCheck { lhs, rhs, hypotheses_hold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(c: &[f64]) -> Vector {
        let space = SpaceSpec::SRenorm { n: c.len() };
        space.normalize(&Vector::new(c.to_vec()).unwrap()).unwrap()
    }

    fn sep(x: &Vector, y: &Vector) -> f64 {
        SpaceSpec::SRenorm { n: x.len() }.norm(&x.sub(y)).unwrap()
    }

    #[test]
    fn constants_are_the_documented_values() {
        let k = derive_constants();
        assert!((k.c2 - 2.0_f64.sqrt() / 1536.0).abs() < 1e-18);
        assert!((k.c3 - 1.0 / 131072.0).abs() < 1e-18);
        assert!(k.c2 >= 2.0_f64.sqrt() / 6.0 / 512.0);
        assert_eq!(k.c, k.c3);
        assert!(k.c <= 0.125);
        assert!((k.alpha0_ratio - (2.0_f64.sqrt() - 1.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn case2b_worked_example() {
        let s = 1.0 / 2.0_f64.sqrt();
        let x = Vector::new(vec![s, 0.0]).unwrap();
        let y = Vector::new(vec![0.0, s]).unwrap();
        let d = sep(&x, &y);
        let (w, trace) = srenorm_witness(&x, &y, 1.0, d).unwrap();
        assert_eq!(trace.case, SRenormCase::Case2b);
        assert!((trace.alpha - 1.0).abs() < 1e-15);
        assert!((trace.alpha0 - 0.103553).abs() < 1e-5);
        assert!((trace.t - trace.alpha0).abs() < 1e-12);
        assert_eq!(trace.u.coords()[1], 0.0);
        assert!((trace.u[0] - s).abs() < 1e-12);
        assert!((w.achieved_gap - 0.0479).abs() < 5e-4, "{}", w.achieved_gap);
        assert!((trace.case_bound - 0.0469).abs() < 5e-4, "{}", trace.case_bound);
        assert!(w.achieved_gap >= w.guaranteed_gap);
    }

    #[test]
    fn case1_worked_example() {
        let s = 1.0 / 2.0_f64.sqrt();
        let x = Vector::new(vec![s, 0.0]).unwrap();
        let y = Vector::new(vec![0.0, -s]).unwrap();
        let d = sep(&x, &y);
        let (w, trace) = srenorm_witness(&x, &y, 1.0, d).unwrap();
        assert_eq!(trace.case, SRenormCase::Case1);
        assert_eq!(trace.b_set, vec![1]);
        // the y-side carries the opposite-sign mass, so it gets killed
        assert!(trace.swapped);
        let z_s = SpaceSpec::SRenorm { n: 2 }.norm(&w.z).unwrap();
        assert!((z_s - 0.25).abs() < 1e-9, "||z||_S = {z_s}");
        assert!(w.achieved_gap >= trace.alpha / 8.0 - 1e-9);
        assert!((trace.case_bound - 0.125).abs() < 1e-12);
    }

    #[test]
    fn degenerate_pair_rejected() {
        let x = unit(&[1.0, 0.0]);
        assert!(srenorm_witness(&x, &x, 0.3, 0.1).is_err());
        let y = unit(&[0.0, 1.0]);
        let d = sep(&x, &y);
        assert!(srenorm_witness(&x, &y, 0.0, d).is_err());
        assert!(srenorm_witness(&x, &y, 0.3, d + 1.0).is_err());
        assert!(srenorm_witness(&Vector::new(vec![1.0, 0.0]).unwrap(), &y, 0.3, 0.5).is_err());
    }

    #[test]
    fn case2_reduction_mass_bound() {
        // whenever Case 1 does not fire, the same-sign difference mass is at
        // least ((sqrt 2 - 1)/2) alpha
        let pairs = [
            ([1.0, 0.2, 0.1], [0.3, 1.0, 0.0]),
            ([1.0, 1.0, 0.0], [0.0, 1.0, 1.0]),
            ([0.5, 0.4, 0.3], [0.3, 0.4, 0.5]),
        ];
        for (xc, yc) in pairs {
            let x = unit(&xc);
            let y = unit(&yc);
            let d = sep(&x, &y);
            let (_, trace) = srenorm_witness(&x, &y, 0.7, d).unwrap();
            if trace.case != SRenormCase::Case1 {
                let bc_mass: f64 = (0..3)
                    .filter(|&i| !trace.b_set.contains(&i))
                    .map(|i| (x[i] - y[i]).abs())
                    .sum();
                let floor = (2.0_f64.sqrt() - 1.0) / 2.0 * trace.alpha;
                assert!(bc_mass >= floor - 1e-12, "{bc_mass} < {floor}");
            }
        }
    }

    #[test]
    fn witness_gap_symmetric_in_pair_order() {
        let x = unit(&[1.0, 0.2, 0.1]);
        let y = unit(&[0.3, 1.0, 0.0]);
        let d = sep(&x, &y);
        let (w1, _) = srenorm_witness(&x, &y, 0.4, d).unwrap();
        let (w2, _) = srenorm_witness(&y, &x, 0.4, d).unwrap();
        assert!((w1.achieved_gap - w2.achieved_gap).abs() < 1e-12);
    }

    #[test]
    fn squared_transfer_zero_perturbation() {
        let x = unit(&[1.0, 0.0]);
        let y = unit(&[0.0, 1.0]);
        let chk = squared_transfer(&x, &y, &Vector::zeros(2), 0.0).unwrap();
        assert!(chk.hypotheses_hold);
        assert!(chk.lhs.abs() < 1e-12 && chk.rhs.abs() < 1e-12);
    }

    #[test]
    fn squared_transfer_on_case1_witness() {
        let s = 1.0 / 2.0_f64.sqrt();
        let x = Vector::new(vec![s, 0.0]).unwrap();
        let y = Vector::new(vec![0.0, -s]).unwrap();
        let d = sep(&x, &y);
        let (w, _) = srenorm_witness(&x, &y, 1.0, d).unwrap();
        // the construction kills part of y, so the transfer runs with the
        // roles of x and y exchanged
        let theta = SpaceSpec::SRenorm { n: 2 }.norm(&w.z).unwrap();
        let chk = squared_transfer(&y, &x, &w.z, theta).unwrap();
        assert!(chk.hypotheses_hold);
        assert!(chk.lhs >= chk.rhs - 1e-12, "lhs {} rhs {}", chk.lhs, chk.rhs);
    }

    #[test]
    fn squared_transfer_flags_violated_hypotheses() {
        let x = unit(&[1.0, 0.0]);
        let y = unit(&[0.0, 1.0]);
        let z = Vector::new(vec![0.0, -0.1]).unwrap();
        let chk = squared_transfer(&x, &y, &z, 0.5).unwrap();
        assert!(!chk.hypotheses_hold);
    }
}
