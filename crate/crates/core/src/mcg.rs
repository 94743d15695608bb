//! Mapping class group moves on tuples and orbit computation.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::covers::{enumerate_packed, BranchData, BranchedTuple, CoverError, EnumOptions, Puncture, TupleJson};
use crate::group::{ClassSet, Elem, FiniteGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McgError {
    #[error("move {0:?} does not apply to genus {1} with {2} punctures")]
    OutOfRange(MoveKind, usize, usize),
    #[error("tuple set is not closed under the move catalog")]
    NotMoveClosed,
    #[error("tuples in one orbit computation must share genus and branch data")]
    MixedShapes,
    #[error("orbit computations require surjective tuples")]
    NotSurjective,
    #[error("induced map is not well defined on source orbit {0}")]
    IllDefined(usize),
    #[error("induced map leaves the target set")]
    NotInTarget,
    #[error("cache i/o: {0}")]
    Cache(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    Braid(usize),
    BraidInv(usize),
    TwistA(usize),
    TwistAInv(usize),
    TwistB(usize),
    TwistBInv(usize),
    HandleSwap(usize),
    HandleSwapInv(usize),
    HandleMix(usize),
    HandleMixInv(usize),
    HandleBlockTwist(usize),
    HandleBlockTwistInv(usize),
    BoundaryBlockTwist,
    BoundaryBlockTwistInv,
    PuncturePass,
    PuncturePassInv,
    GlobalConj(Elem),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
}

impl Move {
    pub fn new(kind: MoveKind) -> Self {
        Move { kind }
    }

    pub fn inverse(&self, g: &FiniteGroup) -> Move {
        use MoveKind::*;
        Move::new(match self.kind {
            Braid(j) => BraidInv(j),
            BraidInv(j) => Braid(j),
            TwistA(i) => TwistAInv(i),
            TwistAInv(i) => TwistA(i),
            TwistB(i) => TwistBInv(i),
            TwistBInv(i) => TwistB(i),
            HandleSwap(i) => HandleSwapInv(i),
            HandleSwapInv(i) => HandleSwap(i),
            HandleMix(i) => HandleMixInv(i),
            HandleMixInv(i) => HandleMix(i),
            HandleBlockTwist(i) => HandleBlockTwistInv(i),
            HandleBlockTwistInv(i) => HandleBlockTwist(i),
            BoundaryBlockTwist => BoundaryBlockTwistInv,
            BoundaryBlockTwistInv => BoundaryBlockTwist,
            PuncturePass => PuncturePassInv,
            PuncturePassInv => PuncturePass,
            GlobalConj(x) => GlobalConj(g.inv(x)),
        })
    }

    /// The mapping class realizing the move.
    pub fn justification(&self) -> &'static str {
        use MoveKind::*;
        match self.kind {
            Braid(_) | BraidInv(_) => "half-twist exchanging two adjacent punctures",
            TwistA(_) | TwistAInv(_) => "Dehn twist along the a-curve of a handle",
            TwistB(_) | TwistBInv(_) => "Dehn twist along the b-curve of a handle",
            HandleSwap(_) | HandleSwapInv(_) => "handle interchange: half-twist of two adjacent handle blocks",
            HandleMix(_) | HandleMixInv(_) => {
                "Dehn twist along a curve homologous to a_i + a_(i+1); the automorphism fixes the block boundary word, \
                 so it is realized by a mapping class (Dehn-Nielsen-Baer)"
            }
            HandleBlockTwist(_) | HandleBlockTwistInv(_) => "Dehn twist along the boundary of one handle block",
            BoundaryBlockTwist | BoundaryBlockTwistInv => {
                "Dehn twist along the curve enclosing the last handle and the first puncture"
            }
            PuncturePass | PuncturePassInv => {
                "slide of the first puncture through the last handle; fixes the block boundary word and sends the \
                 puncture loop to a conjugate, so it is realized by a mapping class (Dehn-Nielsen-Baer)"
            }
            GlobalConj(_) => "point-push of the basepoint",
        }
    }

    pub fn applies_to(&self, genus: usize, n: usize) -> bool {
        use MoveKind::*;
        match self.kind {
            Braid(j) | BraidInv(j) => j + 1 < n,
            TwistA(i) | TwistAInv(i) | TwistB(i) | TwistBInv(i) | HandleBlockTwist(i) | HandleBlockTwistInv(i) => {
                i < genus
            }
            HandleSwap(i) | HandleSwapInv(i) | HandleMix(i) | HandleMixInv(i) => i + 1 < genus,
            BoundaryBlockTwist | BoundaryBlockTwistInv | PuncturePass | PuncturePassInv => genus >= 1 && n >= 1,
            GlobalConj(_) => true,
        }
    }

    /// Applies the move to a packed tuple; `dst` must have the same length as `src`.
    pub(crate) fn apply_packed(&self, g: &FiniteGroup, genus: usize, src: &[u16], dst: &mut [u16]) {
        use MoveKind::*;
        dst.copy_from_slice(src);
        let m = |x: Elem, y: Elem| g.mul(x, y);
        let inv = |x: Elem| g.inv(x);
        let cj = |x: Elem, y: Elem| g.conj(x, y);
        let get = |k: usize| src[k] as Elem;
        let p0 = 2 * genus;
        match self.kind {
            Braid(j) | BraidInv(j) => {
                let (u, v) = (Puncture::unpack(src[p0 + j]), Puncture::unpack(src[p0 + j + 1]));
                let (x, y) = if matches!(self.kind, Braid(_)) {
                    (Puncture::new(cj(u.letter, v.letter), v.sign), u)
                } else {
                    (v, Puncture::new(cj(inv(v.letter), u.letter), u.sign))
                };
                dst[p0 + j] = x.pack();
                dst[p0 + j + 1] = y.pack();
            }
            TwistA(i) => dst[2 * i + 1] = m(get(2 * i + 1), get(2 * i)) as u16,
            TwistAInv(i) => dst[2 * i + 1] = m(get(2 * i + 1), inv(get(2 * i))) as u16,
            TwistB(i) => dst[2 * i] = m(get(2 * i), get(2 * i + 1)) as u16,
            TwistBInv(i) => dst[2 * i] = m(get(2 * i), inv(get(2 * i + 1))) as u16,
            HandleSwap(i) => {
                let (a, b, a2, b2) = (get(2 * i), get(2 * i + 1), get(2 * i + 2), get(2 * i + 3));
                let u = g.commutator(a, b);
                dst[2 * i] = cj(u, a2) as u16;
                dst[2 * i + 1] = cj(u, b2) as u16;
                dst[2 * i + 2] = a as u16;
                dst[2 * i + 3] = b as u16;
            }
            HandleSwapInv(i) => {
                let (a, b, a2, b2) = (get(2 * i), get(2 * i + 1), get(2 * i + 2), get(2 * i + 3));
                let vi = inv(g.commutator(a2, b2));
                dst[2 * i] = a2 as u16;
                dst[2 * i + 1] = b2 as u16;
                dst[2 * i + 2] = cj(vi, a) as u16;
                dst[2 * i + 3] = cj(vi, b) as u16;
            }
            HandleMix(i) => {
                let (a, b, a2, b2) = (get(2 * i), get(2 * i + 1), get(2 * i + 2), get(2 * i + 3));
                let ci = inv(m(a, a2));
                dst[2 * i] = cj(ci, a) as u16;
                dst[2 * i + 1] = cj(ci, m(m(a2, a), b)) as u16;
                dst[2 * i + 2] = cj(ci, a2) as u16;
                dst[2 * i + 3] = cj(ci, m(m(a, a2), b2)) as u16;
            }
            HandleMixInv(i) => {
                let (a, b, a2, b2) = (get(2 * i), get(2 * i + 1), get(2 * i + 2), get(2 * i + 3));
                let c = m(a, a2);
                let (na, na2) = (cj(c, a), cj(c, a2));
                dst[2 * i] = na as u16;
                dst[2 * i + 1] = m(inv(m(na2, na)), cj(c, b)) as u16;
                dst[2 * i + 2] = na2 as u16;
                dst[2 * i + 3] = m(inv(m(na, na2)), cj(c, b2)) as u16;
            }
            HandleBlockTwist(i) | HandleBlockTwistInv(i) => {
                let (a, b) = (get(2 * i), get(2 * i + 1));
                let mut u = g.commutator(a, b);
                if matches!(self.kind, HandleBlockTwistInv(_)) {
                    u = inv(u);
                }
                dst[2 * i] = cj(u, a) as u16;
                dst[2 * i + 1] = cj(u, b) as u16;
            }
            BoundaryBlockTwist | BoundaryBlockTwistInv => {
                let (a, b) = (get(p0 - 2), get(p0 - 1));
                let w = Puncture::unpack(src[p0]);
                let mut v = m(g.commutator(a, b), w.letter);
                if matches!(self.kind, BoundaryBlockTwistInv) {
                    v = inv(v);
                }
                dst[p0 - 2] = cj(v, a) as u16;
                dst[p0 - 1] = cj(v, b) as u16;
                dst[p0] = Puncture::new(cj(v, w.letter), w.sign).pack();
            }
            PuncturePass => {
                let (a, b) = (get(p0 - 2), get(p0 - 1));
                let w = Puncture::unpack(src[p0]);
                dst[p0 - 2] = cj(a, b) as u16;
                dst[p0 - 1] = m(m(inv(b), w.letter), m(b, inv(a))) as u16;
                dst[p0] = Puncture::new(cj(inv(b), w.letter), w.sign).pack();
            }
            PuncturePassInv => {
                let (a2, b2) = (get(p0 - 2), get(p0 - 1));
                let w2 = Puncture::unpack(src[p0]);
                let a = m(inv(b2), w2.letter);
                let b = cj(inv(a), a2);
                dst[p0 - 2] = a as u16;
                dst[p0 - 1] = b as u16;
                dst[p0] = Puncture::new(cj(b, w2.letter), w2.sign).pack();
            }
            GlobalConj(x) => {
                for k in 0..p0 {
                    dst[k] = cj(x, get(k)) as u16;
                }
                for k in p0..src.len() {
                    let p = Puncture::unpack(src[k]);
                    dst[k] = Puncture::new(cj(x, p.letter), p.sign).pack();
                }
            }
        }
    }

    pub fn apply(&self, t: &BranchedTuple) -> Result<BranchedTuple, McgError> {
        if !self.applies_to(t.genus(), t.num_punctures()) {
            return Err(McgError::OutOfRange(self.kind, t.genus(), t.num_punctures()));
        }
        let src = t.pack();
        let mut dst = vec![0u16; src.len()];
        self.apply_packed(t.group(), t.genus(), &src, &mut dst);
        Ok(BranchedTuple::from_packed(t.group().clone(), t.genus(), &dst))
    }
}

pub fn apply_move(m: &Move, t: &BranchedTuple) -> Result<BranchedTuple, McgError> {
    m.apply(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatalogOptions {
    pub handle_mixing: bool,
    pub puncture_pass: bool,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions { handle_mixing: true, puncture_pass: true }
    }
}

impl CatalogOptions {
    /// Version tag recorded with every orbit table and cache key.
    pub fn tag(&self) -> String {
        let mut s = String::from("mcg-v1");
        if !self.handle_mixing {
            s.push_str("-nomix");
        }
        if !self.puncture_pass {
            s.push_str("-nopass");
        }
        s
    }
}

/// Generators (with inverses) for the action on tuples of shape (g, n).
pub fn move_catalog(group: &FiniteGroup, genus: usize, n: usize, opts: &CatalogOptions) -> Vec<Move> {
    use MoveKind::*;
    let mut out = Vec::new();
    for j in 0..n.saturating_sub(1) {
        out.push(Braid(j));
        out.push(BraidInv(j));
    }
    for i in 0..genus {
        out.extend([TwistA(i), TwistAInv(i), TwistB(i), TwistBInv(i)]);
    }
    for i in 0..genus.saturating_sub(1) {
        out.extend([HandleSwap(i), HandleSwapInv(i)]);
        if opts.handle_mixing {
            out.extend([HandleMix(i), HandleMixInv(i)]);
        }
    }
    for i in 0..genus {
        out.extend([HandleBlockTwist(i), HandleBlockTwistInv(i)]);
    }
    if genus >= 1 && n >= 1 {
        out.extend([BoundaryBlockTwist, BoundaryBlockTwistInv]);
        if opts.puncture_pass {
            out.extend([PuncturePass, PuncturePassInv]);
        }
    }
    for &x in group.generators() {
        out.push(GlobalConj(x));
    }
    out.into_iter().map(Move::new).collect()
}

/// Lexicographically minimal conjugate of packed tuples.
#[derive(Debug, Clone)]
pub struct Canonicalizer {
    genus: usize,
    /// conjugation tables for a transversal of G / Z(G), identity first
    tables: Vec<Vec<u16>>,
}

impl Canonicalizer {
    pub fn new(g: &FiniteGroup, genus: usize) -> Self {
        let center: Vec<bool> = (0..g.order()).map(|z| g.centralizer(z).len() == g.order()).collect();
        let mut seen = vec![false; g.order()];
        let mut tables = Vec::new();
        for x in 0..g.order() {
            if seen[x] {
                continue;
            }
            for z in (0..g.order()).filter(|&z| center[z]) {
                seen[g.mul(x, z)] = true;
            }
            tables.push((0..g.order()).map(|y| g.conj(x, y) as u16).collect());
        }
        Canonicalizer { genus, tables }
    }

    #[inline]
    fn image(&self, t: &[u16], k: usize, x: u16) -> u16 {
        if k < 2 * self.genus {
            t[x as usize]
        } else {
            (t[(x >> 1) as usize] << 1) | (x & 1)
        }
    }

    pub fn canonical(&self, key: &[u16]) -> Box<[u16]> {
        let mut best: Vec<u16> = key.to_vec();
        for t in &self.tables[1..] {
            // compare lazily; build the candidate only while it can still win
            let mut k = 0;
            while k < key.len() {
                let v = self.image(t, k, key[k]);
                if v != best[k] {
                    if v < best[k] {
                        for (j, b) in best.iter_mut().enumerate().skip(k) {
                            *b = self.image(t, j, key[j]);
                        }
                    }
                    break;
                }
                k += 1;
            }
        }
        best.into_boxed_slice()
    }
}

pub fn canonicalize(t: &BranchedTuple) -> BranchedTuple {
    let c = Canonicalizer::new(t.group(), t.genus());
    BranchedTuple::from_packed(t.group().clone(), t.genus(), &c.canonical(&t.pack()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitInfo {
    pub rep: Box<[u16]>,
    pub size: u64,
}

/// Partition of a tuple set into orbits, keyed by canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub move_set: String,
    pub genus: usize,
    pub branch: BranchData,
    keys: Vec<Box<[u16]>>,
    orbit_of_key: Vec<u32>,
    multiplicity: Vec<u32>,
    pub orbits: Vec<OrbitInfo>,
    #[serde(skip)]
    index: HashMap<Box<[u16]>, u32>,
}

#[derive(Serialize)]
struct OrbitJson {
    rep: TupleJson,
    size: u64,
}

#[derive(Serialize)]
pub struct OrbitTableJson {
    move_set: String,
    orbits: Vec<OrbitJson>,
}

impl OrbitTable {
    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn total(&self) -> u64 {
        self.orbits.iter().map(|o| o.size).sum()
    }

    pub fn num_keys(&self) -> usize {
        self.keys.len()
    }

    fn rebuild_index(&mut self) {
        self.index = self.keys.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect();
    }

    /// Orbit id of a canonical packed key.
    pub fn orbit_of_canonical(&self, key: &[u16]) -> Option<usize> {
        self.index.get(key).map(|&i| self.orbit_of_key[i as usize] as usize)
    }

    pub fn orbit_of(&self, t: &BranchedTuple) -> Option<usize> {
        let c = Canonicalizer::new(t.group(), t.genus());
        self.orbit_of_canonical(&c.canonical(&t.pack()))
    }

    pub fn rep_tuple(&self, group: &Arc<FiniteGroup>, orbit: usize) -> BranchedTuple {
        BranchedTuple::from_packed(group.clone(), self.genus, &self.orbits[orbit].rep)
    }

    pub fn reps(&self, group: &Arc<FiniteGroup>) -> Vec<BranchedTuple> {
        (0..self.orbits.len()).map(|i| self.rep_tuple(group, i)).collect()
    }

    /// Canonical keys with their orbit ids.
    pub fn keys(&self) -> impl Iterator<Item = (&[u16], usize)> {
        self.keys.iter().zip(&self.orbit_of_key).map(|(k, &o)| (&k[..], o as usize))
    }

    pub fn to_json(&self) -> OrbitTableJson {
        OrbitTableJson {
            move_set: self.move_set.clone(),
            orbits: self
                .orbits
                .iter()
                .map(|o| OrbitJson { rep: packed_json(self.genus, &o.rep), size: o.size })
                .collect(),
        }
    }
}

pub(crate) fn packed_json(genus: usize, key: &[u16]) -> TupleJson {
    TupleJson {
        g: genus,
        handles: (0..genus).map(|i| [key[2 * i] as Elem, key[2 * i + 1] as Elem]).collect(),
        punctures: key[2 * genus..]
            .iter()
            .map(|&x| {
                let p = Puncture::unpack(x);
                (p.letter, p.sign)
            })
            .collect(),
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Keeps the smaller index as the root.
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

const CHUNK: usize = 1 << 15;

/// Orbits of a move-closed set of packed surjective tuples of one shape.
///
/// Tuples are first identified up to conjugation; the remaining moves are
/// applied to every canonical form in parallel and merged with a union-find
/// whose roots are the smallest canonical forms, so the result does not depend
/// on scheduling.
pub fn orbits(
    group: &FiniteGroup,
    genus: usize,
    branch: &BranchData,
    tuples: &[Box<[u16]>],
    catalog: &[Move],
    move_set: &str,
) -> Result<OrbitTable, McgError> {
    let n = branch.cardinality();
    if tuples.iter().any(|t| t.len() != 2 * genus + n) {
        return Err(McgError::MixedShapes);
    }
    let canon = Canonicalizer::new(group, genus);
    let mut canon_keys: Vec<Box<[u16]>> = tuples.par_iter().map(|t| canon.canonical(t)).collect();
    canon_keys.par_sort_unstable();
    let mut keys: Vec<Box<[u16]>> = Vec::new();
    let mut multiplicity: Vec<u32> = Vec::new();
    for k in canon_keys {
        if keys.last() == Some(&k) {
            *multiplicity.last_mut().expect("nonempty") += 1;
        } else {
            keys.push(k);
            multiplicity.push(1);
        }
    }
    let shape_ok = keys.par_iter().all(|k| {
        let t = BranchedTuple::from_packed(Arc::new(group.clone()), genus, k);
        t.relation_holds() && t.branch_data() == *branch
    });
    if !shape_ok {
        return Err(McgError::MixedShapes);
    }
    let surjective = keys.par_iter().all(|k| {
        let letters: Vec<Elem> = k[..2 * genus]
            .iter()
            .map(|&x| x as Elem)
            .chain(k[2 * genus..].iter().map(|&x| Puncture::unpack(x).letter))
            .collect();
        group.generates(&letters)
    });
    if !surjective {
        return Err(McgError::NotSurjective);
    }
    let index: HashMap<Box<[u16]>, u32> = keys.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect();
    let moves: Vec<Move> = catalog
        .iter()
        .filter(|m| !matches!(m.kind, MoveKind::GlobalConj(_)) && m.applies_to(genus, n))
        .copied()
        .collect();
    let mut uf = UnionFind::new(keys.len());
    for start in (0..keys.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(keys.len());
        let edges: Result<Vec<Vec<u32>>, McgError> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut buf = vec![0u16; keys[i].len()];
                let mut out = Vec::with_capacity(moves.len());
                for mv in &moves {
                    mv.apply_packed(group, genus, &keys[i], &mut buf);
                    let c = canon.canonical(&buf);
                    match index.get(&c) {
                        Some(&j) => out.push(j),
                        None => return Err(McgError::NotMoveClosed),
                    }
                }
                Ok(out)
            })
            .collect();
        for (off, targets) in edges?.into_iter().enumerate() {
            for j in targets {
                uf.union((start + off) as u32, j);
            }
        }
    }
    let mut orbit_of_root: HashMap<u32, u32> = HashMap::new();
    let mut orbits: Vec<OrbitInfo> = Vec::new();
    let mut orbit_of_key = vec![0u32; keys.len()];
    for i in 0..keys.len() {
        let r = uf.find(i as u32);
        let id = *orbit_of_root.entry(r).or_insert_with(|| {
            orbits.push(OrbitInfo { rep: keys[r as usize].clone(), size: 0 });
            (orbits.len() - 1) as u32
        });
        orbit_of_key[i] = id;
        orbits[id as usize].size += multiplicity[i] as u64;
    }
    Ok(OrbitTable {
        move_set: move_set.to_string(),
        genus,
        branch: branch.clone(),
        keys,
        orbit_of_key,
        multiplicity,
        orbits,
        index,
    })
}

/// Orbit map induced by a tuple map between two levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedMap {
    pub map: Vec<usize>,
    pub injective: bool,
    pub surjective: bool,
}

impl InducedMap {
    pub fn bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Checks that `f` sends each source orbit into a single target orbit.
///
/// With `exhaustive` every conjugate of every canonical key is pushed through
/// `f`; otherwise one tuple per conjugacy class is used.
pub fn induced_orbit_map(
    group: &Arc<FiniteGroup>,
    src: &OrbitTable,
    dst: &OrbitTable,
    f: &(dyn Fn(&BranchedTuple) -> BranchedTuple + Sync),
    exhaustive: bool,
) -> Result<InducedMap, McgError> {
    let canon = Canonicalizer::new(group, dst.genus);
    let conjugators: Vec<Elem> = if exhaustive { (0..group.order()).collect() } else { vec![0] };
    let images: Result<Vec<(usize, usize)>, McgError> = src
        .keys
        .par_iter()
        .zip(src.orbit_of_key.par_iter())
        .map(|(k, &o)| {
            let t = BranchedTuple::from_packed(group.clone(), src.genus, k);
            let mut target = None;
            for &x in &conjugators {
                let tx = if x == 0 { t.clone() } else { Move::new(MoveKind::GlobalConj(x)).apply(&t)? };
                let img = f(&tx);
                let c = canon.canonical(&img.pack());
                let d = dst.orbit_of_canonical(&c).ok_or(McgError::NotInTarget)?;
                if target.is_some_and(|t| t != d) {
                    return Err(McgError::IllDefined(o as usize));
                }
                target = Some(d);
            }
            Ok((o as usize, target.expect("at least one conjugator")))
        })
        .collect();
    let mut map = vec![usize::MAX; src.num_orbits()];
    for (o, d) in images? {
        if map[o] != usize::MAX && map[o] != d {
            return Err(McgError::IllDefined(o));
        }
        map[o] = d;
    }
    let mut hit = vec![false; dst.num_orbits()];
    for &d in &map {
        hit[d] = true;
    }
    let mut sorted = map.clone();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(InducedMap {
        injective: sorted.len() == map.len(),
        surjective: hit.iter().all(|&h| h),
        map,
    })
}

/// On-disk store of orbit tables keyed by content digests.
#[derive(Debug, Clone)]
pub struct OrbitCache {
    dir: PathBuf,
}

impl OrbitCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        OrbitCache { dir: dir.as_ref().to_path_buf() }
    }

    pub fn key(group: &FiniteGroup, c: &ClassSet, genus: usize, v: &BranchData, move_set: &str) -> String {
        let mut h = Sha256::new();
        h.update(group.digest().as_bytes());
        h.update(serde_json::to_vec(c.classes()).expect("serializable"));
        h.update((genus as u64).to_le_bytes());
        h.update(serde_json::to_vec(v).expect("serializable"));
        h.update(move_set.as_bytes());
        h.update(crate::CODE_VERSION.as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("orbits-{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<OrbitTable> {
        let bytes = fs::read(self.path(key)).ok()?;
        let mut t: OrbitTable = serde_json::from_slice(&bytes).ok()?;
        t.rebuild_index();
        Some(t)
    }

    pub fn store(&self, key: &str, table: &OrbitTable) -> Result<(), McgError> {
        fs::create_dir_all(&self.dir).map_err(|e| McgError::Cache(e.to_string()))?;
        let tmp = self.dir.join(format!(".orbits-{key}.{}.tmp", std::process::id()));
        let bytes = serde_json::to_vec(table).map_err(|e| McgError::Cache(e.to_string()))?;
        fs::write(&tmp, bytes).map_err(|e| McgError::Cache(e.to_string()))?;
        fs::rename(&tmp, self.path(key)).map_err(|e| McgError::Cache(e.to_string()))
    }
}

/// Enumerates R_{g,v} and computes its orbits, consulting the cache when given.
pub fn level_orbits(
    group: &FiniteGroup,
    c: &ClassSet,
    genus: usize,
    v: &BranchData,
    catalog_opts: &CatalogOptions,
    enum_opts: &EnumOptions,
    cache: Option<&OrbitCache>,
) -> Result<OrbitTable, McgError> {
    let tag = catalog_opts.tag();
    let key = OrbitCache::key(group, c, genus, v, &tag);
    if let Some(t) = cache.and_then(|cache| cache.load(&key)) {
        return Ok(t);
    }
    let opts = EnumOptions { surjective_only: true, ..*enum_opts };
    let tuples = enumerate_packed(group, c, genus, v, &opts)?;
    let catalog = move_catalog(group, genus, v.cardinality(), catalog_opts);
    let table = orbits(group, genus, v, &tuples, &catalog, &tag)?;
    if let Some(cache) = cache {
        cache.store(&key, &table)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{enumerate_tuples, Sign};
    use crate::group::named::*;

    fn check_move(m: &Move, t: &BranchedTuple) {
        let u = m.apply(t).unwrap();
        assert!(u.relation_holds(), "{:?} broke the relation", m.kind);
        assert_eq!(u.branch_data(), t.branch_data(), "{:?} changed branch data", m.kind);
        assert_eq!(&m.inverse(t.group()).apply(&u).unwrap(), t, "{:?} inverse failed", m.kind);
    }

    #[test]
    fn catalog_sizes() {
        let s3 = symmetric(3);
        let gens = s3.generators().len();
        assert_eq!(move_catalog(&s3, 0, 4, &CatalogOptions::default()).len(), 6 + gens);
        assert_eq!(move_catalog(&s3, 0, 0, &CatalogOptions::default()).len(), gens);
        let plain = CatalogOptions { handle_mixing: false, puncture_pass: false };
        // twists (4 per handle), swap pair, block twists (2 per handle)
        assert_eq!(move_catalog(&s3, 2, 0, &plain).len(), 8 + 2 + 4 + gens);
        assert_eq!(move_catalog(&s3, 2, 0, &CatalogOptions::default()).len(), 8 + 4 + 4 + gens);
    }

    #[test]
    fn every_move_is_sound_on_small_tuples() {
        let g = Arc::new(symmetric(3));
        let c = ClassSet::all_nontrivial(&g);
        let t = g.class(1).representative;
        let cl = g.class_of(t);
        let v = BranchData::new().with(cl, Sign::Pos, 2).with(cl, Sign::Neg, 1);
        let opts = EnumOptions { surjective_only: false, ..Default::default() };
        for genus in 0..=2 {
            let tuples = enumerate_tuples(&g, &c, genus, &v, &opts).unwrap();
            for tup in tuples.iter().step_by(7) {
                for m in move_catalog(&g, genus, 3, &CatalogOptions::default()) {
                    check_move(&m, tup);
                }
            }
        }
    }

    #[test]
    fn braid_example() {
        let g = Arc::new(symmetric(3));
        let ts: Vec<Elem> = (1..6).filter(|&x| g.elem_order(x) == 2).collect();
        let (s, t) = (ts[0], ts[1]);
        let u = g.inv(g.mul(s, t));
        let x = g.conj(s, t);
        // s t u with u = (st)^{-1}: a 3-cycle, so use an unconstrained relation check instead
        let tup = BranchedTuple::new(
            g.clone(),
            vec![],
            vec![Puncture::new(s, Sign::Pos), Puncture::new(t, Sign::Pos), Puncture::new(u, Sign::Pos)],
            None,
        )
        .unwrap();
        let out = Move::new(MoveKind::Braid(0)).apply(&tup).unwrap();
        assert_eq!(out.punctures()[0], Puncture::new(x, Sign::Pos));
        assert_eq!(out.punctures()[1], Puncture::new(s, Sign::Pos));
    }

    #[test]
    fn canonical_forms() {
        let g = Arc::new(symmetric(3));
        let c = ClassSet::all_nontrivial(&g);
        let cl = g.class_of((1..6).find(|&x| g.elem_order(x) == 2).unwrap());
        let v = BranchData::new().with(cl, Sign::Pos, 4);
        let tuples = enumerate_tuples(&g, &c, 0, &v, &EnumOptions::default()).unwrap();
        for t in &tuples {
            let k = canonicalize(t);
            assert_eq!(canonicalize(&k), k);
            for &x in g.generators() {
                let u = Move::new(MoveKind::GlobalConj(x)).apply(t).unwrap();
                assert_eq!(canonicalize(&u), k);
            }
        }
    }

    #[test]
    fn s3_transpositions_form_one_orbit() {
        let g = symmetric(3);
        let c = ClassSet::all_nontrivial(&g);
        let cl = g.class_of((1..6).find(|&x| g.elem_order(x) == 2).unwrap());
        let v = BranchData::new().with(cl, Sign::Pos, 4);
        let t = level_orbits(&g, &c, 0, &v, &CatalogOptions::default(), &EnumOptions::default(), None).unwrap();
        assert_eq!(t.num_orbits(), 1);
        assert_eq!(t.total(), 24);
    }

    #[test]
    fn trivial_group_singleton() {
        let g = FiniteGroup::trivial();
        let t = level_orbits(&g, &ClassSet::empty(), 2, &BranchData::new(), &CatalogOptions::default(), &EnumOptions::default(), None)
            .unwrap();
        assert_eq!((t.num_orbits(), t.total()), (1, 1));
    }

    #[test]
    fn non_closed_sets_are_rejected() {
        let g = klein();
        let keys: Vec<Box<[u16]>> = vec![vec![1u16, 2].into_boxed_slice()];
        let catalog = move_catalog(&g, 1, 0, &CatalogOptions::default());
        let r = orbits(&g, 1, &BranchData::new(), &keys, &catalog, "t");
        assert_eq!(r.unwrap_err(), McgError::NotMoveClosed);
    }

    #[test]
    fn identity_induced_map_is_bijective() {
        let g = Arc::new(klein());
        let t = level_orbits(&g, &ClassSet::empty(), 2, &BranchData::new(), &CatalogOptions::default(), &EnumOptions::default(), None)
            .unwrap();
        let m = induced_orbit_map(&g, &t, &t, &|x: &BranchedTuple| x.clone(), true).unwrap();
        assert!(m.bijective());
        assert_eq!(m.map, (0..t.num_orbits()).collect::<Vec<_>>());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = OrbitCache::new(dir.path());
        let g = klein();
        let args = (&ClassSet::empty(), 2usize, &BranchData::new());
        let cold = level_orbits(&g, args.0, args.1, args.2, &CatalogOptions::default(), &EnumOptions::default(), Some(&cache))
            .unwrap();
        let warm = level_orbits(&g, args.0, args.1, args.2, &CatalogOptions::default(), &EnumOptions::default(), Some(&cache))
            .unwrap();
        assert_eq!(cold, warm);
    }
}
