use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use plwe_core::attack::{algorithm1, algorithm2};
use plwe_core::forge::forge_pattern;
use plwe_core::region::{RegionMode, SmallnessRegion};
use plwe_core::sampler::{uniform_rq, uniform_rq0};
use plwe_core::{FieldParams, Ring, RingElement, Sample};

/// `(q, rho)` pairs with `-rho` a non-residue.
const CASES: &[(u64, u64)] = &[(7, 1), (7, 2), (11, 3), (19, 4), (103, 2), (5003, 1)];

fn ring_for(case: usize, n: usize) -> Ring {
    let (q, rho) = CASES[case];
    Ring::with_zero_trace_root(FieldParams::new(q, rho).unwrap(), forge_pattern(n, rho, q, 3).unwrap()).unwrap()
}

fn element(ring: &Ring, raw: &[u64]) -> RingElement {
    let f = ring.field();
    ring.element(raw.iter().take(ring.degree()).map(|&v| f.elem(v)).collect()).unwrap()
}

fn setup() -> impl Strategy<Value = (usize, usize, Vec<u64>, Vec<u64>, u64)> {
    (0..CASES.len(), 4usize..12).prop_flat_map(|(c, n)| {
        (
            Just(c),
            Just(n),
            prop::collection::vec(any::<u64>(), n),
            prop::collection::vec(any::<u64>(), n),
            any::<u64>(),
        )
    })
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism((c, n, x, y, _) in setup()) {
        let ring = ring_for(c, n);
        let params = *ring.zero_trace().unwrap();
        let (p, r) = (element(&ring, &x), element(&ring, &y));
        let prod = ring.mul(&p, &r).unwrap();
        prop_assert_eq!(ring.eval_at_alpha(&prod), params.mul(ring.eval_at_alpha(&p), ring.eval_at_alpha(&r)));
        let sum = ring.add(&p, &r).unwrap();
        prop_assert_eq!(ring.eval_at_alpha(&sum), params.add(ring.eval_at_alpha(&p), ring.eval_at_alpha(&r)));
    }

    #[test]
    fn multiplication_commutes_and_associates((c, n, x, y, z) in setup()) {
        let ring = ring_for(c, n);
        let (p, r) = (element(&ring, &x), element(&ring, &y));
        let s = ring.from_i64s(&[(z % 1000) as i64, -((z % 77) as i64), 5]).unwrap();
        prop_assert_eq!(ring.mul(&p, &r).unwrap(), ring.mul(&r, &p).unwrap());
        let left = ring.mul(&ring.mul(&p, &r).unwrap(), &s).unwrap();
        let right = ring.mul(&p, &ring.mul(&r, &s).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn trace_is_linear_and_frobenius_involutive((c, n, x, y, z) in setup()) {
        let ring = ring_for(c, n);
        let params = *ring.zero_trace().unwrap();
        let f = ring.field();
        let a = ring.eval_at_alpha(&element(&ring, &x));
        let b = ring.eval_at_alpha(&element(&ring, &y));
        let k = f.elem(z);
        let lhs = params.trace(params.add(params.scale(k, a), b));
        prop_assert_eq!(lhs, f.add(f.mul(k, params.trace(a)), params.trace(b)));
        prop_assert_eq!(params.frobenius(params.frobenius(a)), a);
        prop_assert_eq!(params.trace(a), f.add(params.frobenius(a).c0, a.c0));
        prop_assert_eq!(params.norm(a), params.mul(a, params.frobenius(a)).c0);
    }

    #[test]
    fn alpha_powers_alternate((c, _n, _x, _y, z) in setup()) {
        let (q, rho) = CASES[c];
        let params = FieldParams::new(q, rho).unwrap();
        let j = z % 200;
        let aj = params.pow(params.alpha(), j);
        let base = params.field().pow(params.neg_rho(), j / 2);
        if j % 2 == 0 {
            prop_assert!(aj.is_base());
            prop_assert_eq!(aj.c0, base);
        } else {
            prop_assert!(params.trace(aj).is_zero());
            prop_assert_eq!(aj.c1, base);
        }
    }

    #[test]
    fn rq0_is_a_subring((c, n, _x, _y, z) in setup()) {
        let ring = ring_for(c, n);
        let mut rng = ChaCha20Rng::seed_from_u64(z);
        let u = uniform_rq0(&ring, &mut rng);
        let v = uniform_rq0(&ring, &mut rng);
        prop_assert!(ring.is_in_rq0(&u) && ring.is_in_rq0(&v));
        prop_assert!(ring.is_in_rq0(&ring.mul(&u, &v).unwrap()));
        prop_assert!(ring.is_in_rq0(&ring.add(&u, &v).unwrap()));
        prop_assert!(ring.eval_at_alpha(&u).is_base());
    }

    #[test]
    fn star_evaluates_to_half_trace((c, n, x, _y, _z) in setup()) {
        let ring = ring_for(c, n);
        let f = ring.field();
        let p = element(&ring, &x);
        let (_, rho) = CASES[c];
        prop_assert_eq!(ring.eval_at(&ring.star(&p), f.neg(f.elem(rho))), ring.half_trace(&p));
    }

    #[test]
    fn zero_trace_survivors_are_doubled_root_survivors(
        (c, n, _x, _y, z) in setup(),
        members in prop::collection::btree_set(0u64..7, 1..6),
        m in 1usize..4,
    ) {
        let ring = ring_for(c, n);
        let f = *ring.field();
        let q = f.modulus();
        let region = SmallnessRegion::from_members(q, RegionMode::TableQuadratic, members.iter().copied()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(z);
        let samples: Vec<Sample> = (0..m)
            .map(|_| Sample::new(uniform_rq0(&ring, &mut rng), uniform_rq(&ring, &mut rng)))
            .collect();
        let starred: Vec<Sample> = samples.iter().map(|s| Sample::new(ring.star(&s.a), ring.star(&s.b))).collect();
        let (_, rho) = CASES[c];
        let g1 = algorithm1(&f, &starred, &region, f.neg(f.elem(rho))).unwrap().surviving;
        let mut doubled: Vec<_> = g1.iter().map(|&g| f.add(g, g)).collect();
        doubled.sort();
        prop_assert_eq!(doubled, algorithm2(&ring, &samples, &region).unwrap().surviving);
    }

    #[test]
    fn more_samples_never_add_survivors((c, n, _x, _y, z) in setup(), m in 1usize..5) {
        let ring = ring_for(c, n);
        let q = ring.q();
        let region = SmallnessRegion::from_members(q, RegionMode::Interval, [0, 1, q - 1]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(z);
        let samples: Vec<Sample> = (0..=m)
            .map(|_| Sample::new(uniform_rq0(&ring, &mut rng), uniform_rq(&ring, &mut rng)))
            .collect();
        let fewer = algorithm2(&ring, &samples[..m], &region).unwrap().surviving;
        let more = algorithm2(&ring, &samples, &region).unwrap().surviving;
        prop_assert!(more.iter().all(|g| fewer.contains(g)));
    }
}
