//! Randomized structural properties: norm axioms, isometries, sandwich
//! inequalities and cross-certification against the grid oracle.

use proptest::prelude::*;
use smod::modulus::{brute_force_oracle, inner_sup, p_sandwich, Method};
use smod::space::{sign_change, SpaceSpec, Vector};
use smod::witness::l1_canonicalize;

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0..3.0f64, n)
}

fn space(n: usize) -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        Just(SpaceSpec::L2 { n }),
        (1.2..4.0f64).prop_map(move |p| SpaceSpec::Lp { p, n }),
        Just(SpaceSpec::Linf { n }),
        Just(SpaceSpec::l1_disc(n).unwrap()),
        Just(SpaceSpec::SRenorm { n }),
    ]
}

/// Normalizes, rejecting vectors too close to zero for a stable division.
fn unit(space: &SpaceSpec, c: &[f64]) -> Option<Vector> {
    let v = Vector::new(c.to_vec()).ok()?;
    if space.norm(&v).ok()? < 1e-3 {
        return None;
    }
    space.normalize(&v).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(sp in space(4), u in coords(4), v in coords(4), lambda in -4.0..4.0f64) {
        let u = Vector::new(u).unwrap();
        let v = Vector::new(v).unwrap();
        let nu = sp.norm(&u).unwrap();
        let nv = sp.norm(&v).unwrap();
        prop_assert!(nu >= 0.0);
        let scaled = sp.norm(&u.scale(lambda)).unwrap();
        prop_assert!((scaled - lambda.abs() * nu).abs() <= 1e-12 * (1.0 + nu));
        let sum = sp.norm(&u.add(&v)).unwrap();
        prop_assert!(sum <= nu + nv + 1e-12);
    }

    #[test]
    fn square_sum_renorm_between_l1_and_sqrt2_l1(u in coords(5)) {
        let u = Vector::new(u).unwrap();
        // counting-measure l1, under which l2 <= l1
        let plain = u.coords().iter().map(|c| c.abs()).sum::<f64>();
        let s = SpaceSpec::SRenorm { n: 5 }.norm(&u).unwrap();
        prop_assert!(s >= plain - 1e-12);
        prop_assert!(s <= 2.0_f64.sqrt() * plain + 1e-12);
    }

    #[test]
    fn sign_change_is_an_isometry(sp in space(4), u in coords(4), flips in proptest::collection::vec(prop_oneof![Just(1.0), Just(-1.0)], 4)) {
        let u = Vector::new(u).unwrap();
        let flipped = sign_change(&u, &flips).unwrap();
        let a = sp.norm(&u).unwrap();
        let b = sp.norm(&flipped).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn gap_capped_by_separation_and_p_sandwich(
        sp in space(3),
        xc in coords(3),
        yc in coords(3),
        zc in coords(3),
        a in 0.05..0.9f64,
        p in 1.0..4.0f64,
    ) {
        let (x, y) = match (unit(&sp, &xc), unit(&sp, &yc)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(()),
        };
        let z = Vector::new(zc).unwrap();
        let zn = sp.norm(&z).unwrap();
        let z = if zn > a { z.scale(a / zn) } else { z };

        let gap = (sp.norm(&x.add(&z)).unwrap() - sp.norm(&y.add(&z)).unwrap()).abs();
        let sep = sp.norm(&x.sub(&y)).unwrap();
        prop_assert!(gap <= sep + 1e-12);

        let (lower, mid, upper) = p_sandwich(&sp, &x, &y, &z, a, p).unwrap();
        prop_assert!(lower <= mid + 1e-12);
        prop_assert!(mid <= upper + 1e-12);
    }

    #[test]
    fn witness_estimate_within_oracle_certificate(
        sp in space(2),
        xc in coords(2),
        yc in coords(2),
        a in 0.05..1.5f64,
    ) {
        let (x, y) = match (unit(&sp, &xc), unit(&sp, &yc)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(()),
        };
        let est = inner_sup(&sp, &x, &y, a, Method::Witness, 1).unwrap();
        let oracle = brute_force_oracle(&sp, &x, &y, a, 1.0, 40).unwrap();
        prop_assert!(est.value <= oracle.certified_upper + 1e-9);
        prop_assert!(oracle.estimate.value <= oracle.certified_upper + 1e-9);
    }

    #[test]
    fn estimate_monotone_in_radius(
        sp in prop_oneof![
            Just(SpaceSpec::L2 { n: 3 }),
            (1.2..4.0f64).prop_map(|p| SpaceSpec::Lp { p, n: 3 }),
            Just(SpaceSpec::Linf { n: 3 }),
            Just(SpaceSpec::l1_disc(3).unwrap()),
        ],
        xc in coords(3),
        yc in coords(3),
        a in 0.05..1.0f64,
    ) {
        let (x, y) = match (unit(&sp, &xc), unit(&sp, &yc)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(()),
        };
        let small = inner_sup(&sp, &x, &y, a, Method::Witness, 1).unwrap();
        let large = inner_sup(&sp, &x, &y, 2.0 * a, Method::Witness, 1).unwrap();
        prop_assert!(small.value <= large.value + 1e-9);
    }

    #[test]
    fn canonical_form_is_isometric(
        fc in proptest::collection::vec(0.01..3.0f64, 3),
        gc in proptest::collection::vec(0.01..3.0f64, 3),
        w in proptest::collection::vec(0.1..1.0f64, 3),
        a in 0.1..1.0f64,
    ) {
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|v| v / total).collect();
        let sp = SpaceSpec::weighted_l1(w.clone()).unwrap();
        let (f, g) = match (unit(&sp, &fc), unit(&sp, &gc)) {
            (Some(f), Some(g)) => (f, g),
            _ => return Ok(()),
        };
        let sep = sp.norm(&f.sub(&g)).unwrap();
        if sep < 1e-3 {
            return Ok(());
        }
        let form = l1_canonicalize(&w, &f, &g).unwrap();
        let canon = form.space();

        // the canonicalization is a measure rescale plus permutation, so it
        // preserves distances and the modulus
        prop_assert!((form.d - sep).abs() <= 1e-9);
        prop_assert!((form.c - (2.0 + form.d) / 2.0).abs() <= 1e-9);
        prop_assert!((canon.norm(&form.f).unwrap() - 1.0).abs() <= 1e-9);
        prop_assert!((canon.norm(&form.g).unwrap() - 1.0).abs() <= 1e-9);

        if canon.dim() <= 3 {
            let orig = brute_force_oracle(&sp, &f, &g, a, 1.0, 24).unwrap();
            let mapped = brute_force_oracle(&canon, &form.f, &form.g, a, 1.0, 24).unwrap();
            // each estimate is a true lower bound for the (shared) supremum,
            // so it must sit under the other grid's certificate
            prop_assert!(orig.estimate.value <= mapped.certified_upper + 1e-9);
            prop_assert!(mapped.estimate.value <= orig.certified_upper + 1e-9);
        }
    }
}
