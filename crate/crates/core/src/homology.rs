//! Second homology of finite groups through the normalized bar complex,
//! C-tori, the reduced multiplier M(G)_C and the branch-type lattice N.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{ClassSet, Elem, FiniteGroup, GroupError};
use crate::linalg::{
    cokernel_sparse, hermite_basis, kernel_lattice, AbelianError, IntMatrix, LinalgConfig, PresentedAbelianGroup,
    Projection, SparseMatrix,
};

/// Largest |G| for which bar-complex matrices are built.
pub const DEFAULT_BAR_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("|G| = {order} exceeds the bar-complex cap of {cap}")]
    SizeCap { order: usize, cap: usize },
    #[error("elements {0} and {1} do not commute")]
    NotCommuting(Elem, Elem),
    #[error("surface relation violated: product of commutators is {0}, not the identity")]
    RelationViolated(Elem),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("chain was built over a different group")]
    WrongGroup,
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomologyConfig {
    pub bar_cap: usize,
    pub linalg: LinalgConfig,
}

impl Default for HomologyConfig {
    fn default() -> Self {
        HomologyConfig { bar_cap: DEFAULT_BAR_CAP, linalg: LinalgConfig::default() }
    }
}

/// A normalized bar 2-chain Σ c·[x|y], x, y ≠ 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarChain2 {
    terms: BTreeMap<(Elem, Elem), i64>,
}

impl BarChain2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, x: Elem, y: Elem, c: i64) {
        if x == 0 || y == 0 || c == 0 {
            return;
        }
        let e = self.terms.entry((x, y)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&(x, y));
        }
    }

    pub fn add_chain(&mut self, other: &BarChain2, scale: i64) {
        for (&(x, y), &c) in &other.terms {
            self.add_term(x, y, c * scale);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((Elem, Elem), i64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    /// d₂ as a sparse 1-chain.
    pub fn boundary(&self, g: &FiniteGroup) -> BTreeMap<Elem, i64> {
        let mut out = BTreeMap::new();
        let mut add = |x: Elem, c: i64| {
            if x != 0 {
                let e = out.entry(x).or_insert(0);
                *e += c;
            }
        };
        for (&(x, y), &c) in &self.terms {
            add(y, c);
            add(g.mul(x, y), -c);
            add(x, c);
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn is_cycle(&self, g: &FiniteGroup) -> bool {
        self.boundary(g).is_empty()
    }

    fn to_sparse_vector(&self, n: usize) -> Vec<(usize, i64)> {
        self.terms.iter().map(|(&(x, y), &c)| (index2(n, x, y), c)).collect()
    }
}

#[inline]
fn index2(n: usize, x: Elem, y: Elem) -> usize {
    (x - 1) * (n - 1) + (y - 1)
}

fn check_cap(g: &FiniteGroup, cap: usize) -> Result<(), HomologyError> {
    if g.order() > cap {
        return Err(HomologyError::SizeCap { order: g.order(), cap });
    }
    Ok(())
}

fn push(col: &mut Vec<(usize, i64)>, row: usize, c: i64) {
    match col.iter_mut().find(|e| e.0 == row) {
        Some(e) => e.1 += c,
        None => col.push((row, c)),
    }
}

fn finish(mut col: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    col.retain(|e| e.1 != 0);
    col.sort_unstable();
    col
}

/// Matrix of d_k (k = 2 or 3) on the normalized bar complex, lexicographic bases.
pub fn boundary_matrix(g: &FiniteGroup, k: usize) -> Result<SparseMatrix, HomologyError> {
    boundary_matrix_capped(g, k, DEFAULT_BAR_CAP)
}

pub fn boundary_matrix_capped(g: &FiniteGroup, k: usize, cap: usize) -> Result<SparseMatrix, HomologyError> {
    check_cap(g, cap)?;
    let n = g.order();
    let m = n - 1;
    match k {
        2 => {
            let mut cols = Vec::with_capacity(m * m);
            for x in 1..n {
                for y in 1..n {
                    let mut col = Vec::new();
                    push(&mut col, y - 1, 1);
                    let xy = g.mul(x, y);
                    if xy != 0 {
                        push(&mut col, xy - 1, -1);
                    }
                    push(&mut col, x - 1, 1);
                    cols.push(finish(col));
                }
            }
            Ok(SparseMatrix::new(m, cols))
        }
        3 => {
            let mut cols = Vec::with_capacity(m * m * m);
            for x in 1..n {
                for y in 1..n {
                    let xy = g.mul(x, y);
                    for z in 1..n {
                        let yz = g.mul(y, z);
                        let mut col = Vec::new();
                        push(&mut col, index2(n, y, z), 1);
                        if xy != 0 {
                            push(&mut col, index2(n, xy, z), -1);
                        }
                        if yz != 0 {
                            push(&mut col, index2(n, x, yz), 1);
                        }
                        push(&mut col, index2(n, x, y), -1);
                        cols.push(finish(col));
                    }
                }
            }
            Ok(SparseMatrix::new(m * m, cols))
        }
        _ => panic!("only d2 and d3 are supported"),
    }
}

/// H₂(G) with a coordinate map on 2-cycles.
///
/// Since C₂ / ker d₂ embeds in the free module C₁, coker d₃ ≅ H₂(G) ⊕ free, and
/// for finite G the torsion part of coker d₃ is all of H₂(G).
#[derive(Debug, Clone)]
pub struct H2Group {
    digest: String,
    order: usize,
    presented: PresentedAbelianGroup,
}

impl H2Group {
    pub fn compute(g: &FiniteGroup, cfg: &HomologyConfig) -> Result<Self, HomologyError> {
        let d3 = boundary_matrix_capped(g, 3, cfg.bar_cap)?;
        let coker = cokernel_sparse(&d3, &cfg.linalg)?;
        let t = coker.torsion().len();
        let free_gens: Vec<Vec<i64>> = (0..coker.free_rank())
            .map(|i| {
                let mut v = vec![0; coker.num_slots()];
                v[t + i] = 1;
                v
            })
            .collect();
        let (presented, _) = coker.subgroup_quotient(&free_gens)?;
        Ok(H2Group { digest: g.digest().to_string(), order: g.order(), presented })
    }

    pub fn invariant_factors(&self) -> &[i64] {
        self.presented.torsion()
    }

    pub fn group(&self) -> &PresentedAbelianGroup {
        &self.presented
    }

    pub fn order(&self) -> u128 {
        self.presented.order().expect("H2 of a finite group is finite")
    }

    /// Class of a 2-cycle; non-cycles are rejected.
    pub fn cycle_class(&self, g: &FiniteGroup, z: &BarChain2) -> Result<Vec<i64>, HomologyError> {
        if g.digest() != self.digest {
            return Err(HomologyError::WrongGroup);
        }
        if !z.is_cycle(g) {
            return Err(HomologyError::NotACycle);
        }
        Ok(self.presented.sparse_to_coords(&z.to_sparse_vector(self.order)))
    }
}

static H2_CACHE: OnceLock<Mutex<HashMap<String, Arc<H2Group>>>> = OnceLock::new();

/// H₂(G) with default settings, memoized per group table.
pub fn h2_group(g: &FiniteGroup) -> Result<Arc<H2Group>, HomologyError> {
    let cache = H2_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(h) = cache.lock().expect("h2 cache").get(g.digest()) {
        return Ok(h.clone());
    }
    let h = Arc::new(H2Group::compute(g, &HomologyConfig::default())?);
    cache.lock().expect("h2 cache").insert(g.digest().to_string(), h.clone());
    Ok(h)
}

/// [a|b] − [b|a] for commuting a, b.
pub fn torus_cycle(g: &FiniteGroup, a: Elem, b: Elem) -> Result<BarChain2, HomologyError> {
    if g.mul(a, b) != g.mul(b, a) {
        return Err(HomologyError::NotCommuting(a, b));
    }
    let mut z = BarChain2::new();
    z.add_term(a, b, 1);
    z.add_term(b, a, -1);
    debug_assert!(z.is_cycle(g));
    Ok(z)
}

/// Σ_k [p_k | g_{k+1}] for partial products p_k of `word`; its boundary is Σ [g_k] − [p_L].
pub fn telescoping_chain(g: &FiniteGroup, word: &[Elem]) -> BarChain2 {
    let mut z = BarChain2::new();
    let mut p = 0;
    for &x in word {
        z.add_term(p, x, 1);
        p = g.mul(p, x);
    }
    z
}

/// The relator word a₁ b₁ a₁⁻¹ b₁⁻¹ ⋯ of a handle list.
pub fn handle_word(g: &FiniteGroup, handles: &[(Elem, Elem)]) -> Vec<Elem> {
    handles.iter().flat_map(|&(a, b)| [a, b, g.inv(a), g.inv(b)]).collect()
}

/// Σᵢ [aᵢ|aᵢ⁻¹] + [bᵢ|bᵢ⁻¹], whose boundary cancels the inverse letters.
pub fn handle_correction(g: &FiniteGroup, handles: &[(Elem, Elem)]) -> BarChain2 {
    let mut z = BarChain2::new();
    for &(a, b) in handles {
        z.add_term(a, g.inv(a), 1);
        z.add_term(b, g.inv(b), 1);
    }
    z
}

/// The polygon 2-cycle of a closed surface tuple.
pub fn unbranched_cycle(g: &FiniteGroup, handles: &[(Elem, Elem)]) -> Result<BarChain2, HomologyError> {
    let word = handle_word(g, handles);
    let r = g.product(word.iter().copied());
    if r != 0 {
        return Err(HomologyError::RelationViolated(r));
    }
    let mut z = telescoping_chain(g, &word);
    z.add_chain(&handle_correction(g, handles), -1);
    if !z.is_cycle(g) {
        return Err(HomologyError::NotACycle);
    }
    Ok(z)
}

/// Schur class in H₂(G) of a closed tuple (a₁,b₁,…,a_g,b_g).
pub fn sch_unbranched(g: &FiniteGroup, h2: &H2Group, handles: &[(Elem, Elem)]) -> Result<Vec<i64>, HomologyError> {
    h2.cycle_class(g, &unbranched_cycle(g, handles)?)
}

/// H₂ coordinates of the C-tori [c|t] − [t|c], one representative c per class of C.
pub fn c_tori_subgroup(g: &FiniteGroup, c: &ClassSet, h2: &H2Group) -> Result<Vec<Vec<i64>>, HomologyError> {
    let mut out = Vec::new();
    for &cl in c.classes() {
        let rep = g.class(cl).representative;
        for t in g.centralizer(rep) {
            out.push(h2.cycle_class(g, &torus_cycle(g, rep, t)?)?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// M(G)_C = H₂(G) / ⟨C-tori⟩ with the projection from H₂ coordinates.
#[derive(Debug, Clone)]
pub struct ReducedMultiplier {
    pub h2: Arc<H2Group>,
    pub group: PresentedAbelianGroup,
    pub projection: Projection,
}

impl ReducedMultiplier {
    pub fn order(&self) -> u128 {
        self.group.order().expect("M(G)_C is finite")
    }

    /// M(G)_C coordinates of a 2-cycle.
    pub fn cycle_class(&self, g: &FiniteGroup, z: &BarChain2) -> Result<Vec<i64>, HomologyError> {
        Ok(self.projection.apply(&self.h2.cycle_class(g, z)?))
    }
}

pub fn m_g_c(g: &FiniteGroup, c: &ClassSet) -> Result<ReducedMultiplier, HomologyError> {
    let h2 = h2_group(g)?;
    let tori = c_tori_subgroup(g, c, &h2)?;
    let (group, projection) = h2.group().subgroup_quotient(&tori)?;
    Ok(ReducedMultiplier { h2, group, projection })
}

/// N = ker(Z^{C//G} → G_ab), with a Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NLattice {
    pub dim: usize,
    pub basis: Vec<Vec<i64>>,
    ab_torsion: Vec<i64>,
    images: Vec<Vec<i64>>,
}

impl NLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.dim, "vector outside Z^(C//G)");
        (0..self.ab_torsion.len()).all(|s| {
            let sum: i128 = v.iter().zip(&self.images).map(|(&a, img)| a as i128 * img[s] as i128).sum();
            sum.rem_euclid(self.ab_torsion[s] as i128) == 0
        })
    }
}

pub fn n_lattice(g: &FiniteGroup, c: &ClassSet) -> Result<NLattice, HomologyError> {
    let (ab, proj) = g.abelianization()?;
    let k = c.len();
    let t = ab.torsion().len();
    let images: Vec<Vec<i64>> = c.classes().iter().map(|&cl| proj[g.class(cl).representative].clone()).collect();
    let mut m = IntMatrix::zeros(t, k + t);
    for s in 0..t {
        for (j, img) in images.iter().enumerate() {
            m.set(s, j, img[s]);
        }
        m.set(s, k + s, ab.torsion()[s]);
    }
    let ker = kernel_lattice(&m)?;
    let vectors: Vec<Vec<i64>> = (0..ker.cols()).map(|j| ker.column(j)[..k].to_vec()).collect();
    let basis = hermite_basis(&vectors, k)?;
    Ok(NLattice { dim: k, basis, ab_torsion: ab.torsion().to_vec(), images })
}

/// (G/⟨C⟩)_ab, computed inside G_ab.
pub fn h1_bgc(g: &FiniteGroup, c: &ClassSet) -> Result<PresentedAbelianGroup, HomologyError> {
    let (ab, proj) = g.abelianization()?;
    let gens: Vec<Vec<i64>> = c.classes().iter().map(|&cl| proj[g.class(cl).representative].clone()).collect();
    Ok(ab.subgroup_quotient(&gens)?.0)
}

/// |π₁(BG_C)| = |G / ⟨C⟩|.
pub fn pi1_bgc_order(g: &FiniteGroup, c: &ClassSet) -> usize {
    let sub = c.generated_subgroup(g).iter().filter(|&&b| b).count();
    g.order() / sub
}

pub const SPLITTING_TAG: &str = "non-canonical: section chosen from the Smith normal form";

/// H₂(BG_C) ≅ M(G)_C ⊕ N, the splitting being a choice.
#[derive(Debug, Clone)]
pub struct BgcH2 {
    pub m_part: ReducedMultiplier,
    pub n_part: NLattice,
    pub splitting: &'static str,
}

pub fn h2_bgc(g: &FiniteGroup, c: &ClassSet) -> Result<BgcH2, HomologyError> {
    Ok(BgcH2 { m_part: m_g_c(g, c)?, n_part: n_lattice(g, c)?, splitting: SPLITTING_TAG })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named::*;

    #[test]
    fn boundary_shapes_and_d2_of_inverse_pair() {
        let k4 = klein();
        assert_eq!(boundary_matrix(&k4, 2).unwrap().cols(), 9);
        assert_eq!(boundary_matrix(&k4, 3).unwrap().cols(), 27);
        let s3 = symmetric(3);
        let x = (1..6).find(|&x| s3.elem_order(x) == 3).unwrap();
        let mut z = BarChain2::new();
        z.add_term(x, s3.inv(x), 1);
        let b = z.boundary(&s3);
        assert_eq!(b, BTreeMap::from([(x.min(s3.inv(x)), 1), (x.max(s3.inv(x)), 1)]));
    }

    #[test]
    fn small_multipliers() {
        assert!(h2_group(&cyclic(4)).unwrap().invariant_factors().is_empty());
        assert_eq!(h2_group(&klein()).unwrap().invariant_factors(), &[2]);
        assert!(h2_group(&symmetric(3)).unwrap().invariant_factors().is_empty());
    }

    #[test]
    fn torus_generates_klein_multiplier() {
        let k4 = klein();
        let h2 = h2_group(&k4).unwrap();
        let (a, b) = (k4.generators()[0], k4.generators()[1]);
        assert_eq!(h2.cycle_class(&k4, &torus_cycle(&k4, a, b).unwrap()).unwrap(), vec![1]);
        assert!(torus_cycle(&k4, 0, a).unwrap().is_zero());
        assert!(torus_cycle(&k4, a, a).unwrap().is_zero());
        let s3 = symmetric(3);
        assert!(matches!(torus_cycle(&s3, 1, 2), Err(HomologyError::NotCommuting(..))));
    }

    #[test]
    fn non_cycles_are_rejected() {
        let k4 = klein();
        let h2 = h2_group(&k4).unwrap();
        let mut z = BarChain2::new();
        z.add_term(1, 2, 1);
        assert_eq!(h2.cycle_class(&k4, &z), Err(HomologyError::NotACycle));
    }

    #[test]
    fn reduced_multiplier_examples() {
        let k4 = klein();
        assert_eq!(m_g_c(&k4, &ClassSet::empty()).unwrap().group.torsion(), &[2]);
        let one = ClassSet::from_elements(&k4, &[1]).unwrap();
        assert!(m_g_c(&k4, &one).unwrap().group.is_trivial());
        let triv = ClassSet::from_class_ids(vec![0]);
        let h2 = h2_group(&k4).unwrap();
        assert!(c_tori_subgroup(&k4, &triv, &h2).unwrap().iter().all(|v| v.iter().all(|&x| x == 0)));
        assert!(c_tori_subgroup(&k4, &ClassSet::empty(), &h2).unwrap().is_empty());
    }

    #[test]
    fn lattice_examples() {
        let s3 = symmetric(3);
        let t = (1..6).find(|&x| s3.elem_order(x) == 2).unwrap();
        let c = ClassSet::from_elements(&s3, &[t]).unwrap();
        let n = n_lattice(&s3, &c).unwrap();
        assert_eq!(n.basis, vec![vec![2]]);
        assert!(n.contains(&[4]));
        assert!(!n.contains(&[3]));
        assert_eq!(n_lattice(&s3, &ClassSet::empty()).unwrap().rank(), 0);
        let k4 = klein();
        let all = ClassSet::all_nontrivial(&k4);
        let n = n_lattice(&k4, &all).unwrap();
        assert_eq!((n.dim, n.rank()), (3, 3));
        assert!(n.contains(&[1, 1, 1]));
        assert!(!n.contains(&[1, 0, 0]));
    }

    #[test]
    fn bgc_examples() {
        let s3 = symmetric(3);
        let t = (1..6).find(|&x| s3.elem_order(x) == 2).unwrap();
        let c = ClassSet::from_elements(&s3, &[t]).unwrap();
        assert!(h1_bgc(&s3, &c).unwrap().is_trivial());
        assert_eq!(pi1_bgc_order(&s3, &c), 1);
        let b = h2_bgc(&s3, &c).unwrap();
        assert!(b.m_part.group.is_trivial());
        assert_eq!(b.n_part.rank(), 1);
        let b = h2_bgc(&klein(), &ClassSet::empty()).unwrap();
        assert_eq!((b.m_part.group.torsion(), b.n_part.rank()), (&[2][..], 0));
        assert_eq!(h1_bgc(&klein(), &ClassSet::empty()).unwrap().torsion(), &[2, 2]);
        assert_eq!(pi1_bgc_order(&klein(), &ClassSet::empty()), 4);
    }

    #[test]
    fn sch_examples() {
        let k4 = klein();
        let h2 = h2_group(&k4).unwrap();
        let (a, b) = (k4.generators()[0], k4.generators()[1]);
        assert_eq!(sch_unbranched(&k4, &h2, &[(0, 0), (0, 0)]).unwrap(), vec![0]);
        assert_eq!(sch_unbranched(&k4, &h2, &[(a, b)]).unwrap(), vec![1]);
        assert_eq!(sch_unbranched(&k4, &h2, &[(a, b), (a, b)]).unwrap(), vec![0]);
        let s3 = symmetric(3);
        let h = h2_group(&s3).unwrap();
        assert!(matches!(sch_unbranched(&s3, &h, &[(1, 2)]), Err(HomologyError::RelationViolated(_))));
    }
}
