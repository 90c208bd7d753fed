mod common;

use cremona::lattice::{
    canonical_class, effective_multiplicities_oracle, genus, intersect, strict_exceptional_classes, BlowupLattice,
    DivisorClass, Surface,
};
use proptest::prelude::*;

use common::{defects, marked_cluster};

proptest! {
    #[test]
    fn exceptional_classes((c, _) in marked_cluster(8, 1)) {
        let prox = c.proximity().unwrap();
        let lat = BlowupLattice::new(Surface::P2, c);
        let k = canonical_class(&lat);
        for i in 0..prox.len() {
            let z = DivisorClass::basis(lat.dim(), lat.z(i));
            prop_assert_eq!(intersect(&lat, &z, &z).unwrap(), -1);
            prop_assert_eq!(intersect(&lat, &z, &k).unwrap(), -1);
        }
        // strict transforms: e^2 = -1 - r, e.K = r - 1 with r points proximate
        for (i, e) in strict_exceptional_classes(&lat).unwrap().iter().enumerate() {
            let r = prox.iter().filter(|ps| ps.contains(&i)).count() as i64;
            prop_assert_eq!(intersect(&lat, e, e).unwrap(), -1 - r);
            prop_assert_eq!(intersect(&lat, e, &k).unwrap(), r - 1);
            prop_assert_eq!(genus(&lat, e).unwrap(), 0);
        }
    }

    #[test]
    fn oracle_subtracts_strict_classes((c, m) in marked_cluster(8, 10)) {
        let lat = BlowupLattice::new(Surface::P2, c.clone());
        let eff = effective_multiplicities_oracle(&lat, &lat.plane_class(20, &m).unwrap()).unwrap();
        let out: Vec<i64> = eff.0[1..].iter().map(|x| -x).collect();
        prop_assert!(defects(&c, &out).iter().all(|&d| d >= 0));
        // out - m = sum of c_p (E_p - sum over q proximate to p of E_q), c_p >= 0
        let prox = c.proximity().unwrap();
        let mut coef = vec![0i64; m.len()];
        for q in 0..m.len() {
            coef[q] = out[q] - m[q] + prox[q].iter().map(|&p| coef[p]).sum::<i64>();
        }
        prop_assert!(coef.iter().all(|&x| x >= 0), "{:?}", coef);
    }

    #[test]
    fn plane_genus_formula(d in 1i64..15, (c, m) in marked_cluster(6, 5)) {
        let lat = BlowupLattice::new(Surface::P2, c);
        let g = genus(&lat, &lat.plane_class(d, &m).unwrap()).unwrap();
        let want = (d - 1) * (d - 2) / 2 - m.iter().map(|x| x * (x - 1) / 2).sum::<i64>();
        prop_assert_eq!(g, want);
    }

    #[test]
    fn hirzebruch_intersections(n in 0i64..6, k in -3i64..6, h in -3i64..12) {
        let lat = BlowupLattice::new(Surface::Fn { n }, Default::default());
        let d = lat.hirzebruch_class(k, h, &[]).unwrap();
        let e = lat.hirzebruch_class(1, 0, &[]).unwrap();
        let f = lat.hirzebruch_class(0, 1, &[]).unwrap();
        prop_assert_eq!(intersect(&lat, &e, &e).unwrap(), -n);
        prop_assert_eq!(intersect(&lat, &f, &f).unwrap(), 0);
        prop_assert_eq!(intersect(&lat, &d, &d).unwrap(), -n * k * k + 2 * k * h);
        prop_assert_eq!(intersect(&lat, &d, &canonical_class(&lat)).unwrap(), (n - 2) * k - 2 * h);
    }
}
