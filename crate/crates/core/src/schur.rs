//! Relative branched Schur invariants: differences of two covers with the
//! same branch data, valued in M(G)_C.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::covers::{BranchedTuple, CoverError, Puncture, TupleJson};
use crate::group::{ClassSet, Elem, FiniteGroup};
use crate::homology::{
    handle_correction, handle_word, m_g_c, sch_unbranched, telescoping_chain, HomologyError, ReducedMultiplier,
};
use crate::mcg::{move_catalog, CatalogOptions, McgError, Move, MoveKind};
use crate::stabilization::{handle_stabilize, puncture_stabilize};

/// Orientation reversal used by `double`: t′'s handles in reverse order, each pair swapped.
pub const DOUBLE_CONVENTION: &str = "t # reverse(t'): handles of t, then (b'_i, a'_i) for i = g..1, then tubes";

pub const DEFAULT_NORMALIZE_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchurError {
    #[error("puncture letters differ")]
    LetterMismatch,
    #[error("tuples differ in group, genus or branch data")]
    ShapeMismatch,
    #[error("cannot double a genus-0 tuple without punctures")]
    Degenerate,
    #[error("tuple is not surjective")]
    NotSurjective,
    #[error("letter normalization exceeded its budget of {0} states")]
    Budget(usize),
    #[error("the two chain-level routes disagree: {double:?} vs {oracle:?}")]
    RouteMismatch { double: Vec<i64>, oracle: Vec<i64> },
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Mcg(#[from] McgError),
}

/// Closed tuple of genus 2g + n − 1 (2g when n = 0) obtained by gluing t to
/// the orientation reversal of t′ along the branch disks.
///
/// With Z_k = w_{k+1}⋯w_n, the tube handles for k = n..2 are (1, Z_k⁻¹ w_k⁻¹ Z_k).
pub fn double(t: &BranchedTuple, t2: &BranchedTuple) -> Result<BranchedTuple, SchurError> {
    if !t.same_group(t2) || t.genus() != t2.genus() {
        return Err(SchurError::ShapeMismatch);
    }
    if t.punctures() != t2.punctures() {
        return Err(SchurError::LetterMismatch);
    }
    let n = t.num_punctures();
    if n == 0 && t.genus() == 0 {
        return Err(SchurError::Degenerate);
    }
    let g = t.group();
    let mut handles: Vec<(Elem, Elem)> = t.handles().to_vec();
    handles.extend(t2.handles().iter().rev().map(|&(a, b)| (b, a)));
    let w: Vec<Elem> = t.punctures().iter().map(|p| p.letter).collect();
    for k in (1..n).rev() {
        let z = g.product(w[k + 1..].iter().copied());
        handles.push((0, g.mul(g.inv(z), g.mul(g.inv(w[k]), z))));
    }
    Ok(BranchedTuple::closed(g.clone(), handles)?)
}

/// Chain P(t) = telescope(full relator word) − handle corrections; ∂P(t) = Σ [w_j].
fn p_chain(t: &BranchedTuple) -> crate::homology::BarChain2 {
    let g = t.group();
    let mut word = handle_word(g, t.handles());
    word.extend(t.punctures().iter().map(|p| p.letter));
    let mut z = telescoping_chain(g, &word);
    z.add_chain(&handle_correction(g, t.handles()), -1);
    z
}

/// A move path from t to a tuple whose punctures equal `target`.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub tuple: BranchedTuple,
    pub path: Vec<Move>,
}

enum Search {
    Found(Vec<Move>),
    Exhausted,
    OutOfBudget,
}

fn bfs(
    g: &FiniteGroup,
    genus: usize,
    start: &[u16],
    moves: &[Move],
    goal: impl Fn(&[u16]) -> bool,
    budget: usize,
    project: impl Fn(&[u16]) -> Box<[u16]>,
) -> Search {
    let start_key = project(start);
    let mut parent: HashMap<Box<[u16]>, Option<(Box<[u16]>, usize)>> = HashMap::new();
    parent.insert(start_key.clone(), None);
    let mut queue = VecDeque::from([start.to_vec().into_boxed_slice()]);
    let mut buf = vec![0u16; start.len()];
    while let Some(s) = queue.pop_front() {
        if goal(&s) {
            let mut path = Vec::new();
            let mut k = project(&s);
            while let Some(Some((prev, mi))) = parent.get(&k) {
                path.push(moves[*mi]);
                k = prev.clone();
            }
            path.reverse();
            return Search::Found(path);
        }
        let sk = project(&s);
        for (mi, m) in moves.iter().enumerate() {
            m.apply_packed(g, genus, &s, &mut buf);
            let k = project(&buf);
            if parent.contains_key(&k) {
                continue;
            }
            if parent.len() >= budget {
                return Search::OutOfBudget;
            }
            parent.insert(k, Some((sk.clone(), mi)));
            queue.push_back(buf.clone().into_boxed_slice());
        }
    }
    Search::Exhausted
}

/// Fixes target letters from the last puncture backwards; each step moves only
/// the handles and the punctures not yet fixed.
fn match_suffixwise(g: &FiniteGroup, genus: usize, start: &[u16], catalog: &[Move], goal: &[u16], budget: usize) -> Option<Vec<Move>> {
    let p0 = 2 * genus;
    let mut cur = start.to_vec();
    let mut buf = vec![0u16; cur.len()];
    let mut path = Vec::new();
    for k in (1..=goal.len()).rev() {
        if cur[p0 + k - 1] == goal[k - 1] {
            continue;
        }
        let moves: Vec<Move> = catalog
            .iter()
            .filter(|m| match m.kind {
                MoveKind::Braid(j) | MoveKind::BraidInv(j) => j + 1 < k,
                MoveKind::GlobalConj(_) => false,
                _ => true,
            })
            .copied()
            .collect();
        let want = goal[k - 1];
        let Search::Found(step) = bfs(g, genus, &cur, &moves, |s| s[p0 + k - 1] == want, budget, |s| s.to_vec().into_boxed_slice())
        else {
            return None;
        };
        for m in &step {
            m.apply_packed(g, genus, &cur, &mut buf);
            cur.copy_from_slice(&buf);
        }
        path.extend(step);
    }
    (cur[p0..] == *goal).then_some(path)
}

/// Searches the orbit of `t` for a tuple with exactly the punctures `target`.
///
/// Braids and global conjugations are tried first on the puncture list alone.
/// With handles present the letters are then matched one position at a time, and
/// as a last resort the full catalog is searched breadth-first over whole tuples.
pub fn normalize_letters(
    t: &BranchedTuple,
    target: &[Puncture],
    opts: &CatalogOptions,
    budget: usize,
) -> Result<Normalized, SchurError> {
    if t.branch_data() != crate::covers::BranchData::from_punctures(t.group(), target) {
        return Err(SchurError::ShapeMismatch);
    }
    let g = t.group();
    let genus = t.genus();
    let start = t.pack();
    let goal: Vec<u16> = target.iter().map(|p| p.pack()).collect();
    let catalog = move_catalog(g, genus, target.len(), opts);
    let cheap: Vec<Move> = catalog
        .iter()
        .filter(|m| matches!(m.kind, MoveKind::Braid(_) | MoveKind::BraidInv(_) | MoveKind::GlobalConj(_)))
        .copied()
        .collect();
    let p0 = 2 * genus;
    let is_goal = |s: &[u16]| s[p0..] == *goal;
    let path = match bfs(g, genus, &start, &cheap, is_goal, budget, |s| s[p0..].to_vec().into_boxed_slice()) {
        Search::Found(path) => Some(path),
        // without handles the catalog is exactly the cheap moves
        _ if genus == 0 => None,
        _ => match_suffixwise(g, genus, &start, &catalog, &goal, budget).or_else(|| {
            match bfs(g, genus, &start, &catalog, is_goal, budget, |s| s.to_vec().into_boxed_slice()) {
                Search::Found(path) => Some(path),
                _ => None,
            }
        }),
    }
    .ok_or(SchurError::Budget(budget))?;
    let mut cur = t.clone();
    for m in &path {
        cur = m.apply(&cur)?;
    }
    debug_assert_eq!(cur.punctures(), target);
    Ok(Normalized { tuple: cur, path })
}

/// sch(t) − sch(t′) in M(G)_C.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffClass {
    pub coords: Vec<i64>,
    pub invariant_factors: Vec<i64>,
    /// the doubled closed tuple whose Schur class was reduced
    pub provenance: TupleJson,
    /// number of stabilizations applied to both tuples before normalization succeeded
    pub stabilizations: usize,
    pub move_set: String,
    pub convention: &'static str,
}

/// Fixed (G, C) data shared by many difference computations.
#[derive(Debug, Clone)]
pub struct SchurContext {
    pub group: Arc<FiniteGroup>,
    pub classes: ClassSet,
    pub mgc: ReducedMultiplier,
    pub catalog: CatalogOptions,
    pub normalize_budget: usize,
    pub max_stabilizations: usize,
}

impl SchurContext {
    pub fn new(group: Arc<FiniteGroup>, classes: ClassSet) -> Result<Self, SchurError> {
        let mgc = m_g_c(&group, &classes)?;
        Ok(SchurContext {
            group,
            classes,
            mgc,
            catalog: CatalogOptions::default(),
            normalize_budget: DEFAULT_NORMALIZE_BUDGET,
            max_stabilizations: 3,
        })
    }

    pub fn m_order(&self) -> u128 {
        self.mgc.order()
    }

    fn reduce_closed(&self, closed: &BranchedTuple) -> Result<Vec<i64>, SchurError> {
        let h2 = sch_unbranched(&self.group, &self.mgc.h2, closed.handles())?;
        Ok(self.mgc.projection.apply(&h2))
    }

    /// Difference of two tuples whose puncture letters already agree, by both routes.
    fn diff_matched(&self, t: &BranchedTuple, t2: &BranchedTuple) -> Result<(Vec<i64>, BranchedTuple), SchurError> {
        let d = double(t, t2)?;
        let via_double = self.reduce_closed(&d)?;
        let mut z = p_chain(t);
        z.add_chain(&p_chain(t2), -1);
        let via_chain = self.mgc.cycle_class(&self.group, &z)?;
        if via_double != via_chain {
            return Err(SchurError::RouteMismatch { double: via_double, oracle: via_chain });
        }
        Ok((via_double, d))
    }

    pub fn schur_diff(&self, t: &BranchedTuple, t2: &BranchedTuple) -> Result<DiffClass, SchurError> {
        if !t.same_group(t2) || !Arc::ptr_eq(t.group(), &self.group) && **t.group() != *self.group {
            return Err(SchurError::ShapeMismatch);
        }
        if t.genus() != t2.genus() || t.branch_data() != t2.branch_data() {
            return Err(SchurError::ShapeMismatch);
        }
        if !t.is_surjective() || !t2.is_surjective() {
            return Err(SchurError::NotSurjective);
        }
        let (mut a, mut b) = (t.clone(), t2.clone());
        if a.genus() == 0 && a.num_punctures() == 0 {
            a = handle_stabilize(&a);
            b = handle_stabilize(&b);
        }
        let mut stabilizations = 0;
        loop {
            match normalize_letters(&b, a.punctures(), &self.catalog, self.normalize_budget) {
                Ok(nb) => {
                    let (coords, d) = self.diff_matched(&a, &nb.tuple)?;
                    return Ok(DiffClass {
                        coords,
                        invariant_factors: self.mgc.group.torsion().to_vec(),
                        provenance: d.to_json(),
                        stabilizations,
                        move_set: self.catalog.tag(),
                        convention: DOUBLE_CONVENTION,
                    });
                }
                Err(SchurError::Budget(n)) => {
                    if stabilizations >= self.max_stabilizations {
                        return Err(SchurError::Budget(n));
                    }
                    // even attempts add a trivial handle, odd ones a cancelling puncture pair
                    if stabilizations % 2 == 0 || a.num_punctures() == 0 {
                        a = handle_stabilize(&a);
                        b = handle_stabilize(&b);
                    } else {
                        let cl = self.group.class_of(a.punctures()[0].branch_elem(&self.group));
                        a = puncture_stabilize(&a, cl, None, &self.classes)?;
                        b = puncture_stabilize(&b, cl, None, &self.classes)?;
                    }
                    stabilizations += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Pairwise differences diff(reps[i], reps[j]).
    pub fn diff_matrix(&self, reps: &[BranchedTuple]) -> Result<Vec<Vec<Vec<i64>>>, SchurError> {
        let n = reps.len();
        let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let diffs: Result<Vec<Vec<i64>>, SchurError> =
            cells.par_iter().map(|&(i, j)| self.schur_diff(&reps[i], &reps[j]).map(|d| d.coords)).collect();
        let diffs = diffs?;
        Ok(diffs.chunks(n.max(1)).map(|c| c.to_vec()).collect())
    }

    /// Checks that M(G)_C acts freely and transitively on the given orbit representatives.
    pub fn torsor_check(&self, reps: &[BranchedTuple]) -> Result<TorsorReport, SchurError> {
        let m = &self.mgc.group;
        let n = reps.len();
        let diffs = if n == 0 { Vec::new() } else { self.diff_matrix(reps)? };
        let mut cocycle = true;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if diffs[x][z] != m.add(&diffs[x][y], &diffs[y][z]) {
                        cocycle = false;
                    }
                }
            }
        }
        let separation = (0..n).all(|x| (0..n).all(|y| m.is_zero(&diffs[x][y]) == (x == y)));
        let m_order = self.m_order();
        let mut from_first: Vec<Vec<i64>> = if n > 0 { diffs[0].clone() } else { Vec::new() };
        from_first.sort();
        from_first.dedup();
        let enumeration = n > 0 && from_first.len() == n && n as u128 == m_order;
        Ok(TorsorReport {
            orbits: n,
            m_order,
            invariant_factors: m.torsion().to_vec(),
            differences_from_first: if n > 0 { diffs[0].clone() } else { Vec::new() },
            cocycle,
            separation,
            enumeration,
            passed: cocycle && separation && enumeration,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsorReport {
    pub orbits: usize,
    pub m_order: u128,
    pub invariant_factors: Vec<i64>,
    pub differences_from_first: Vec<Vec<i64>>,
    pub cocycle: bool,
    pub separation: bool,
    pub enumeration: bool,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{enumerate_tuples, BranchData, EnumOptions, Sign};
    use crate::group::named::*;
    use crate::homology::h2_group;
    use crate::mcg::level_orbits;

    #[test]
    fn self_double_is_null() {
        let g = Arc::new(klein());
        let t = BranchedTuple::closed(g.clone(), vec![(1, 2), (0, 0)]).unwrap();
        let d = double(&t, &t).unwrap();
        assert_eq!(d.genus(), 4);
        let h2 = h2_group(&g).unwrap();
        assert!(h2.group().is_zero(&sch_unbranched(&g, &h2, d.handles()).unwrap()));
    }

    #[test]
    fn degenerate_double_is_rejected() {
        let g = Arc::new(FiniteGroup::trivial());
        let t = BranchedTuple::closed(g, vec![]).unwrap();
        assert_eq!(double(&t, &t).unwrap_err(), SchurError::Degenerate);
    }

    #[test]
    fn braid_normalization_in_one_move() {
        let g = Arc::new(symmetric(3));
        let ts: Vec<Elem> = (1..6).filter(|&x| g.elem_order(x) == 2).collect();
        let (s, t) = (ts[0], ts[1]);
        let u = g.inv(g.mul(s, t));
        let cl = ClassSet::all_nontrivial(&g);
        let tup = BranchedTuple::new(
            g.clone(),
            vec![],
            vec![Puncture::new(s, Sign::Pos), Puncture::new(t, Sign::Pos), Puncture::new(u, Sign::Pos)],
            Some(&cl),
        )
        .unwrap();
        let target = vec![Puncture::new(g.conj(s, t), Sign::Pos), Puncture::new(s, Sign::Pos), tup.punctures()[2]];
        let n = normalize_letters(&tup, &target, &CatalogOptions::default(), 1000).unwrap();
        assert_eq!(n.path.len(), 1);
        assert_eq!(n.tuple.punctures(), &target[..]);
        let same = normalize_letters(&tup, tup.punctures(), &CatalogOptions::default(), 1000).unwrap();
        assert!(same.path.is_empty());
    }

    #[test]
    fn klein_unbranched_torsor() {
        let g = Arc::new(klein());
        let ctx = SchurContext::new(g.clone(), ClassSet::empty()).unwrap();
        let table = level_orbits(&g, &ClassSet::empty(), 2, &BranchData::new(), &CatalogOptions::default(), &EnumOptions::default(), None)
            .unwrap();
        assert_eq!(table.num_orbits(), 2);
        let report = ctx.torsor_check(&table.reps(&g)).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn a4_three_cycles_have_nontrivial_differences() {
        let g = Arc::new(alternating(4));
        let r = (1..12).find(|&x| g.elem_order(x) == 3).unwrap();
        let c = ClassSet::from_elements(&g, &[r]).unwrap();
        let ctx = SchurContext::new(g.clone(), c.clone()).unwrap();
        assert_eq!(ctx.m_order(), 2);
        let v = BranchData::new().with(g.class_of(r), Sign::Pos, 6);
        let tuples = enumerate_tuples(&g, &c, 0, &v, &EnumOptions::default()).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for t in tuples.iter().step_by(97).take(12) {
            let d = ctx.schur_diff(&tuples[0], t).unwrap();
            seen.insert(d.coords);
        }
        assert!(seen.len() <= 2);
    }
}
