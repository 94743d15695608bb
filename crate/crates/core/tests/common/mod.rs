#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use schur_orbits_core::group::named::*;
use schur_orbits_core::{BranchedTuple, ClassSet, Elem, FiniteGroup, Puncture, Sign};

pub fn small_groups() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    vec![
        ("C2", cyclic(2)),
        ("C3", cyclic(3)),
        ("C4", cyclic(4)),
        ("C5", cyclic(5)),
        ("C6", cyclic(6)),
        ("K4", klein()),
        ("S3", symmetric(3)),
        ("D4", dihedral(4)),
        ("Q8", quaternion()),
        ("C2xC4", abelian(&[2, 4])),
        ("C2^3", abelian(&[2, 2, 2])),
        ("C3xC3", abelian(&[3, 3])),
        ("A4", alternating(4)),
        ("D6", dihedral(6)),
        ("S4", symmetric(4)),
    ]
    .into_iter()
    .map(|(n, g)| (n, Arc::new(g)))
    .collect()
}

pub fn find_order(g: &FiniteGroup, k: usize) -> Elem {
    (1..g.order()).find(|&x| g.elem_order(x) == k).expect("element of the requested order")
}

/// A random valid tuple of shape (genus, n) with branch classes in C (C nonempty when n > 0).
pub fn random_tuple(g: &Arc<FiniteGroup>, c: &ClassSet, genus: usize, n: usize, rng: &mut ChaCha8Rng) -> BranchedTuple {
    try_random_tuple(g, c, genus, n, rng, 100_000).expect("shape has tuples")
}

/// As `random_tuple`, giving up after `attempts` rejected samples (some shapes are empty, e.g. g = 0, n = 1).
pub fn try_random_tuple(
    g: &Arc<FiniteGroup>,
    c: &ClassSet,
    genus: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
    attempts: usize,
) -> Option<BranchedTuple> {
    let letters = c.elements(g);
    for _ in 0..attempts {
        let mut handles: Vec<(Elem, Elem)> =
            (0..genus).map(|_| (rng.gen_range(0..g.order()), rng.gen_range(0..g.order()))).collect();
        let mut punctures = Vec::new();
        for _ in 0..n.saturating_sub(1) {
            let x = *letters.choose(rng).expect("C nonempty");
            punctures.push(if rng.gen() { Puncture::new(x, Sign::Pos) } else { Puncture::new(g.inv(x), Sign::Neg) });
        }
        let rel = |hs: &[(Elem, Elem)], ps: &[Puncture]| {
            let h = hs.iter().fold(0, |acc, &(a, b)| g.mul(acc, g.commutator(a, b)));
            ps.iter().fold(h, |acc, p| g.mul(acc, p.letter))
        };
        if n > 0 {
            let last = g.inv(rel(&handles, &punctures));
            let mut options = Vec::new();
            if last != 0 && c.contains(g, last) {
                options.push(Puncture::new(last, Sign::Pos));
            }
            if last != 0 && c.contains(g, g.inv(last)) {
                options.push(Puncture::new(last, Sign::Neg));
            }
            let Some(&p) = options.choose(rng) else { continue };
            punctures.push(p);
        } else if genus > 0 {
            handles.pop();
            let need = g.inv(rel(&handles, &[]));
            let pairs: Vec<(Elem, Elem)> = (0..g.order())
                .flat_map(|a| (0..g.order()).map(move |b| (a, b)))
                .filter(|&(a, b)| g.commutator(a, b) == need)
                .collect();
            let Some(&pair) = pairs.choose(rng) else { continue };
            handles.push(pair);
        }
        return Some(BranchedTuple::new(g.clone(), handles, punctures, Some(c)).expect("valid by construction"));
    }
    None
}
