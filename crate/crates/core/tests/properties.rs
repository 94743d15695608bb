mod common;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schur_orbits_core::covers::{enumerate_tuples, EnumOptions};
use schur_orbits_core::group::named::*;
use schur_orbits_core::homology::{h2_group, sch_unbranched};
use schur_orbits_core::linalg::{cokernel, smith_normal_form, IntMatrix};
use schur_orbits_core::mcg::{canonicalize, level_orbits, move_catalog, CatalogOptions, Move, MoveKind, OrbitTable};
use schur_orbits_core::schur::SchurContext;
use schur_orbits_core::stabilization::{dilate, dilated_branch_data, handle_stabilize, puncture_stabilize};
use schur_orbits_core::{BranchData, BranchedTuple, ClassSet, FiniteGroup, Sign};

use common::{find_order, small_groups, try_random_tuple};

fn groups() -> &'static [(&'static str, Arc<FiniteGroup>)] {
    static G: OnceLock<Vec<(&'static str, Arc<FiniteGroup>)>> = OnceLock::new();
    G.get_or_init(small_groups)
}

fn pick(idx: usize) -> (&'static str, Arc<FiniteGroup>) {
    let gs = groups();
    let (n, g) = &gs[idx % gs.len()];
    (n, g.clone())
}

fn sample(g: &Arc<FiniteGroup>, c: &ClassSet, genus: usize, n: usize, seed: u64) -> Option<BranchedTuple> {
    try_random_tuple(g, c, genus, n, &mut ChaCha8Rng::seed_from_u64(seed), 2000)
}

fn big(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
}

fn big_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-20i64..=20, c), r).prop_map(IntMatrix::from_rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_axioms(idx in 0usize..64, x in 0usize..24, y in 0usize..24, z in 0usize..24) {
        let (_, g) = pick(idx);
        let n = g.order();
        let (x, y, z) = (x % n, y % n, z % n);
        prop_assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
        prop_assert_eq!(g.mul(0, x), x);
        prop_assert_eq!(g.mul(x, 0), x);
        prop_assert_eq!(g.mul(x, g.inv(x)), 0);
        prop_assert_eq!(g.class_of(g.conj(y, x)), g.class_of(x));
    }

    #[test]
    fn class_equation(idx in 0usize..64) {
        let (_, g) = pick(idx);
        let sizes: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.size).collect();
        prop_assert_eq!(sizes.iter().sum::<usize>(), g.order());
        for (id, c) in g.conjugacy_classes().iter().enumerate() {
            prop_assert_eq!(g.order() % c.size, 0);
            prop_assert_eq!(c.size * g.centralizer(c.representative).len(), g.order());
            prop_assert_eq!(g.class_of(c.representative), id);
        }
    }

    #[test]
    fn smith_form_is_a_factorization(a in matrix()) {
        let s = smith_normal_form(&a).unwrap();
        // transforms can be large, so the product is formed exactly
        let uav = big_mul(&big_mul(&big(&s.u), &big(&a)), &big(&s.v));
        prop_assert_eq!(uav, big(&s.d));
        let diag = s.diagonal();
        for i in 0..diag.len() {
            prop_assert!(diag[i] >= 0);
            for j in 0..diag.len() {
                if i != j {
                    prop_assert_eq!(s.d.get(i, j), 0);
                }
            }
            if i + 1 < diag.len() && diag[i] != 0 {
                prop_assert_eq!(diag[i + 1] % diag[i], 0);
            }
        }
    }

    #[test]
    fn cokernel_coordinates_round_trip(a in matrix(), raw in proptest::collection::vec(-50i64..=50, 6)) {
        let q = cokernel(&a).unwrap();
        let coords: Vec<i64> = raw.iter().take(q.num_slots()).copied().collect();
        prop_assume!(coords.len() == q.num_slots());
        let reduced = q.reduce(&coords);
        prop_assert_eq!(q.to_coords(&q.lift(&coords)), reduced.clone());
        prop_assert_eq!(q.reduce(&reduced), reduced.clone());
        // image columns are zero in the quotient
        for j in 0..a.cols() {
            prop_assert!(q.is_zero(&q.to_coords(&a.column(j))));
        }
    }

    #[test]
    fn moves_are_sound(idx in 0usize..64, genus in 0usize..=3, n in 0usize..=6, seed in any::<u64>(), mi in any::<usize>()) {
        let (name, g) = pick(idx);
        let c = ClassSet::all_nontrivial(&g);
        let Some(t) = sample(&g, &c, genus, n, seed) else { return Ok(()) };
        let catalog = move_catalog(&g, genus, n, &CatalogOptions::default());
        let m = catalog[mi % catalog.len()];
        let u = m.apply(&t).unwrap();
        prop_assert!(u.relation_holds(), "{} {:?}", name, m.kind);
        prop_assert_eq!(u.branch_data(), t.branch_data());
        prop_assert_eq!(u.is_surjective(), t.is_surjective());
        prop_assert_eq!(m.inverse(&g).apply(&u).unwrap(), t);
    }

    #[test]
    fn canonical_form_is_conjugation_invariant(idx in 0usize..64, genus in 0usize..=2, n in 0usize..=4, seed in any::<u64>(), x in 0usize..24) {
        let (_, g) = pick(idx);
        let c = ClassSet::all_nontrivial(&g);
        let Some(t) = sample(&g, &c, genus, n, seed) else { return Ok(()) };
        let conj = Move::new(MoveKind::GlobalConj(x % g.order())).apply(&t).unwrap();
        let k = canonicalize(&t);
        prop_assert_eq!(&k, &canonicalize(&conj));
        prop_assert_eq!(&canonicalize(&k), &k);
    }

    #[test]
    fn unbranched_class_is_move_invariant(idx in 0usize..64, genus in 1usize..=3, seed in any::<u64>(), mi in any::<usize>()) {
        let (_, g) = pick(idx);
        let h2 = h2_group(&g).unwrap();
        let Some(t) = sample(&g, &ClassSet::empty(), genus, 0, seed) else { return Ok(()) };
        let catalog = move_catalog(&g, genus, 0, &CatalogOptions::default());
        let u = catalog[mi % catalog.len()].apply(&t).unwrap();
        prop_assert_eq!(sch_unbranched(&g, &h2, t.handles()).unwrap(), sch_unbranched(&g, &h2, u.handles()).unwrap());
    }

    #[test]
    fn unbranched_class_is_additive(idx in 0usize..64, g1 in 1usize..=2, g2 in 1usize..=2, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (_, g) = pick(idx);
        let h2 = h2_group(&g).unwrap();
        let (Some(a), Some(b)) = (sample(&g, &ClassSet::empty(), g1, 0, s1), sample(&g, &ClassSet::empty(), g2, 0, s2)) else {
            return Ok(());
        };
        let sum = a.connect_sum(&b).unwrap();
        let lhs = sch_unbranched(&g, &h2, sum.handles()).unwrap();
        let rhs = h2.group().add(
            &sch_unbranched(&g, &h2, a.handles()).unwrap(),
            &sch_unbranched(&g, &h2, b.handles()).unwrap(),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn stabilization_bookkeeping(idx in 0usize..64, genus in 0usize..=2, n in 1usize..=5, seed in any::<u64>(), ci in any::<usize>()) {
        let (_, g) = pick(idx);
        let c = ClassSet::all_nontrivial(&g);
        let Some(t) = sample(&g, &c, genus, n, seed) else { return Ok(()) };
        let v = t.branch_data();
        let cl = c.classes()[ci % c.len()];
        let p = puncture_stabilize(&t, cl, None, &c).unwrap();
        prop_assert!(p.relation_holds());
        prop_assert_eq!(p.genus(), genus);
        prop_assert_eq!(p.branch_data(), v.clone().with(cl, Sign::Pos, 1).with(cl, Sign::Neg, 1));
        let h = handle_stabilize(&t);
        prop_assert_eq!(h.genus(), genus + 1);
        prop_assert_eq!(h.branch_data(), v.clone());
        let d = dilate(&t);
        prop_assert!(d.relation_holds());
        prop_assert!(d.branch_data().is_positive());
        prop_assert_eq!(d.branch_data(), dilated_branch_data(&g, &v));
        let extra: usize = v
            .iter()
            .filter(|e| e.1 == Sign::Neg)
            .map(|(cl, _, k)| (g.elem_order(g.class(cl).representative) - 2) * k)
            .sum();
        prop_assert_eq!(d.num_punctures(), n + extra);
    }
}

struct Level {
    ctx: SchurContext,
    table: OrbitTable,
    tuples: Vec<BranchedTuple>,
}

fn a4_level() -> &'static Level {
    static L: OnceLock<Level> = OnceLock::new();
    L.get_or_init(|| {
        let g = Arc::new(alternating(4));
        let r = find_order(&g, 3);
        let c = ClassSet::from_elements(&g, &[r]).unwrap();
        let v = BranchData::new().with(g.class_of(r), Sign::Pos, 3);
        let table = level_orbits(&g, &c, 1, &v, &CatalogOptions::default(), &EnumOptions::default(), None).unwrap();
        let tuples = enumerate_tuples(&g, &c, 1, &v, &EnumOptions::default()).unwrap();
        Level { ctx: SchurContext::new(g, c).unwrap(), table, tuples }
    })
}

fn klein_level() -> &'static Level {
    static L: OnceLock<Level> = OnceLock::new();
    L.get_or_init(|| {
        let g = Arc::new(klein());
        let c = ClassSet::empty();
        let v = BranchData::new();
        let table = level_orbits(&g, &c, 2, &v, &CatalogOptions::default(), &EnumOptions::default(), None).unwrap();
        let tuples = enumerate_tuples(&g, &c, 2, &v, &EnumOptions::default()).unwrap();
        Level { ctx: SchurContext::new(g, c).unwrap(), table, tuples }
    })
}

fn check_differences(level: &Level, i: usize, j: usize, k: usize, mi: usize) -> Result<(), TestCaseError> {
    let ts = &level.tuples;
    let (a, b, c) = (&ts[i % ts.len()], &ts[j % ts.len()], &ts[k % ts.len()]);
    let m = level.ctx.mgc.group.clone();
    let d = |x: &BranchedTuple, y: &BranchedTuple| level.ctx.schur_diff(x, y).unwrap().coords;
    let ab = d(a, b);
    prop_assert_eq!(d(b, a), m.neg(&ab));
    prop_assert_eq!(d(a, c), m.add(&ab, &d(b, c)));
    let catalog = move_catalog(a.group(), a.genus(), a.num_punctures(), &CatalogOptions::default());
    let moved = catalog[mi % catalog.len()].apply(a).unwrap();
    prop_assert_eq!(d(&moved, b), ab.clone());
    let same_orbit = level.table.orbit_of(a) == level.table.orbit_of(b);
    prop_assert_eq!(m.is_zero(&ab), same_orbit);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differences_form_a_cocycle_a4(i in any::<usize>(), j in any::<usize>(), k in any::<usize>(), mi in any::<usize>()) {
        check_differences(a4_level(), i, j, k, mi)?;
    }

    #[test]
    fn differences_form_a_cocycle_klein(i in any::<usize>(), j in any::<usize>(), k in any::<usize>(), mi in any::<usize>()) {
        check_differences(klein_level(), i, j, k, mi)?;
    }
}

#[test]
fn sampler_covers_nonempty_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (_, s3) = pick(6);
    let c = ClassSet::all_nontrivial(&s3);
    for _ in 0..50 {
        let n = rng.gen_range(2..=5);
        assert!(try_random_tuple(&s3, &c, 1, n, &mut rng, 1000).is_some());
    }
}
