mod common;

use std::collections::BTreeMap;

use common::{jonquieres, random_net, shape};
use cremona::factorize::{descent_step, nc_factor, replay, replay_steps};
use cremona::systems::PlaneSystem;
use cremona::transforms::{apply_net, simplicity, virtual_image_degree, Simplicity};
use cremona::Error;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Homaloidal identities, computed here rather than through the library.
fn identities_hold(net: &PlaneSystem) -> bool {
    let d = net.degree;
    let sq: i64 = net.mult.iter().map(|a| a * a).sum();
    let lin: i64 = net.mult.iter().sum();
    d * d - 1 == sq && 3 * (d - 1) == lin
}

fn identity_anchor(net: &PlaneSystem) -> BTreeMap<String, String> {
    net.cluster.ids().into_iter().map(|i| (i.clone(), i)).collect()
}

fn net_from_seed(seed: u64) -> Option<PlaneSystem> {
    let mut rng = StdRng::seed_from_u64(seed);
    random_net(&mut rng, 8)
}

#[test]
fn jonquieres_nets_take_d_minus_one_quadratics() {
    for d in 2..=6 {
        let net = jonquieres(d);
        let f = nc_factor(&net).unwrap();
        assert_eq!(f.quadratic_count() as i64, d - 1, "degree {d}");
        assert_eq!(f.certificate[0], Simplicity { k: 1, h: 2 * d - 2, s: 0 });
        assert_eq!(*f.certificate.last().unwrap(), Simplicity::QUADRATIC);
        let end = replay(&net, &f).unwrap();
        assert_eq!(end.degree, 1);
    }
}

#[test]
fn linear_net_has_empty_factorization() {
    let f = nc_factor(&PlaneSystem::general(1, &[])).unwrap();
    assert!(f.steps.is_empty() && f.final_centers.is_none());
}

#[test]
fn non_homaloidal_input_is_rejected() {
    assert!(matches!(nc_factor(&PlaneSystem::general(3, &[1, 1, 1])), Err(Error::NotHomaloidal(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn certificate_descends_to_a_quadratic(seed in any::<u64>()) {
        let Some(net) = net_from_seed(seed) else { return Ok(()) };
        let f = nc_factor(&net).unwrap();
        let first = f.certificate[0];
        let bound = (first.k * (first.h + 1) * (first.s + 1) + first.h) as usize;
        prop_assert!(f.steps.len() <= bound.max(1));
        for w in f.certificate.windows(2) {
            prop_assert!(w[1] < w[0], "{:?} then {:?}", w[0], w[1]);
        }
        prop_assert_eq!(*f.certificate.last().unwrap(), Simplicity::QUADRATIC);
        for s in &f.certificate {
            prop_assert!(s.h >= 2 && s.k >= 1 && 0 <= s.s && s.s <= s.h);
        }
    }

    #[test]
    fn every_intermediate_net_is_homaloidal(seed in any::<u64>()) {
        let Some(net) = net_from_seed(seed) else { return Ok(()) };
        let mut cur = net;
        while cur.degree > 2 {
            prop_assert!(identities_hold(&cur));
            let before = simplicity(&cur).unwrap();
            let (step, next) = descent_step(&cur).unwrap();
            let after = simplicity(&next).unwrap();
            prop_assert!(after < before);
            if !step.aux_general {
                let a = cur.mult_of(&step.centers[1]).unwrap();
                let b = cur.mult_of(&step.centers[2]).unwrap();
                let kept = cur.degree - a - b;
                let top = next.sorted_mults().first().copied().unwrap_or(0);
                if top == kept {
                    prop_assert_eq!(after.h, before.h - 2);
                    prop_assert_eq!(after.k, before.k);
                }
            }
            cur = next;
        }
        prop_assert!(identities_hold(&cur));
    }

    #[test]
    fn replay_matches_apply_net(seed in any::<u64>(), extra in 0i64..4) {
        let Some(net) = net_from_seed(seed) else { return Ok(()) };
        let f = nc_factor(&net).unwrap();
        let mut rng = StdRng::seed_from_u64(seed ^ 0x9e37);
        let mult: Vec<i64> = net.mult.iter().map(|_| rng.gen_range(0..3)).collect();
        let probe = PlaneSystem {
            degree: mult.iter().sum::<i64>() + extra + 1,
            cluster: net.cluster.clone(),
            mult,
            lines: net.lines.clone(),
        }
        .unloaded()
        .unwrap();
        let by_steps = replay(&probe, &f).unwrap();
        let by_net = apply_net(&probe, &net, &identity_anchor(&net)).unwrap();
        prop_assert_eq!(shape(&by_steps), shape(&by_net));
        let expected = virtual_image_degree(&probe, &net, &identity_anchor(&net)).unwrap();
        prop_assert_eq!(by_steps.degree, expected);
    }

    #[test]
    fn descent_steps_leave_a_quadratic_net(seed in any::<u64>()) {
        let Some(net) = net_from_seed(seed) else { return Ok(()) };
        let f = nc_factor(&net).unwrap();
        let q = replay_steps(&net, &f).unwrap();
        prop_assert_eq!(q.degree, 2);
        prop_assert_eq!(q.sorted_mults().into_iter().filter(|&a| a > 0).collect::<Vec<_>>(), vec![1, 1, 1]);
        prop_assert_eq!(replay(&net, &f).unwrap().degree, 1);
    }
}

#[test]
fn generator_reaches_higher_degrees() {
    let nets: Vec<PlaneSystem> = (0..200).filter_map(net_from_seed).collect();
    let deep = nets.iter().filter(|n| n.degree >= 4).count();
    assert!(deep >= 50, "only {deep} nets of degree at least 4");
}
