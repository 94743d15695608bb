//! Framed C-branched G-covers of a genus-g surface, as tuples
//! (a₁, b₁, …, a_g, b_g; w₁^{±}, …, w_n^{±}) with Π[aᵢ,bᵢ]·w₁⋯w_n = 1.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::group::{ClassSet, Elem, FiniteGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("surface relation violated: the word evaluates to element {0}")]
    RelationViolated(Elem),
    #[error("puncture {0} has a letter whose branch class is not in C")]
    LetterOutsideC(usize),
    #[error("puncture {0} has the identity as its letter")]
    IdentityLetter(usize),
    #[error("element {0} out of range")]
    ElementOutOfRange(Elem),
    #[error("tuples live over different groups")]
    GroupMismatch,
    #[error("C is empty, so there can be no branch points")]
    EmptyBranchSet,
    #[error("branch data uses class {0}, which is not in C")]
    ClassOutsideC(usize),
    #[error("branch data uses the identity class")]
    IdentityClass,
    #[error("enumeration needs about {estimate} leaves, over the budget of {budget}")]
    Budget { estimate: u128, budget: u128 },
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(i64),
}

/// Framing of a branch point: `Pos` when the normal-disk trivialization agrees with the surface orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_i64(v: i64) -> Result<Self, CoverError> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            _ => Err(CoverError::BadSign(v)),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.as_i64())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Sign::from_i64(i64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Puncture {
    pub letter: Elem,
    pub sign: Sign,
}

impl Puncture {
    pub fn new(letter: Elem, sign: Sign) -> Self {
        Puncture { letter, sign }
    }

    /// w^o, the element whose class is the branch class.
    pub fn branch_elem(&self, g: &FiniteGroup) -> Elem {
        match self.sign {
            Sign::Pos => self.letter,
            Sign::Neg => g.inv(self.letter),
        }
    }

    #[inline]
    pub(crate) fn pack(&self) -> u16 {
        ((self.letter as u16) << 1) | (self.sign == Sign::Neg) as u16
    }

    #[inline]
    pub(crate) fn unpack(x: u16) -> Self {
        Puncture { letter: (x >> 1) as Elem, sign: if x & 1 == 1 { Sign::Neg } else { Sign::Pos } }
    }
}

/// Signed multiplicities v(c̄, o).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchData {
    counts: BTreeMap<(usize, Sign), usize>,
}

#[derive(Serialize, Deserialize)]
struct BranchEntry {
    class: usize,
    sign: Sign,
    count: usize,
}

impl Serialize for BranchData {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<BranchEntry> =
            self.counts.iter().map(|(&(class, sign), &count)| BranchEntry { class, sign, count }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BranchData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<BranchEntry>::deserialize(d)?;
        let mut b = BranchData::new();
        for e in v {
            b.add(e.class, e.sign, e.count);
        }
        Ok(b)
    }
}

impl BranchData {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_punctures(g: &FiniteGroup, punctures: &[Puncture]) -> Self {
        let mut b = BranchData::new();
        for p in punctures {
            b.add(g.class_of(p.branch_elem(g)), p.sign, 1);
        }
        b
    }

    pub fn add(&mut self, class: usize, sign: Sign, k: usize) {
        if k > 0 {
            *self.counts.entry((class, sign)).or_insert(0) += k;
        }
    }

    pub fn with(mut self, class: usize, sign: Sign, k: usize) -> Self {
        self.add(class, sign, k);
        self
    }

    pub fn get(&self, class: usize, sign: Sign) -> usize {
        self.counts.get(&(class, sign)).copied().unwrap_or(0)
    }

    pub fn cardinality(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.counts.keys().all(|k| k.1 == Sign::Pos)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Sign, usize)> + '_ {
        self.counts.iter().map(|(&(c, s), &k)| (c, s, k))
    }

    pub fn classes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.counts.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    pub fn plus(&self, other: &BranchData) -> BranchData {
        let mut b = self.clone();
        for (c, s, k) in other.iter() {
            b.add(c, s, k);
        }
        b
    }

    /// [v](c̄) = v(c̄,+1) − v(c̄,−1), indexed by the classes of C.
    pub fn hom_branch_type(&self, c: &ClassSet) -> Vec<i64> {
        c.classes()
            .iter()
            .map(|&cl| self.get(cl, Sign::Pos) as i64 - self.get(cl, Sign::Neg) as i64)
            .collect()
    }

    pub fn check_supported(&self, g: &FiniteGroup, c: &ClassSet) -> Result<(), CoverError> {
        if self.is_empty() {
            return Ok(());
        }
        if c.is_empty() {
            return Err(CoverError::EmptyBranchSet);
        }
        for (cl, _, _) in self.iter() {
            if cl >= g.num_classes() || !c.contains_class(cl) {
                return Err(CoverError::ClassOutsideC(cl));
            }
            if cl == g.class_of(0) {
                return Err(CoverError::IdentityClass);
            }
        }
        Ok(())
    }
}

impl fmt::Display for BranchData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(c, s, k)| format!("{k}x(class {c},{})", if s == Sign::Pos { "+" } else { "-" }))
            .collect();
        write!(f, "{}", if parts.is_empty() { "none".to_string() } else { parts.join(", ") })
    }
}

/// A framed C-branched G-cover of Σ_g.
#[derive(Debug, Clone)]
pub struct BranchedTuple {
    group: Arc<FiniteGroup>,
    handles: Vec<(Elem, Elem)>,
    punctures: Vec<Puncture>,
}

impl PartialEq for BranchedTuple {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group)
            && self.handles == other.handles
            && self.punctures == other.punctures
    }
}

impl Eq for BranchedTuple {}

/// Value of Π[aᵢ,bᵢ]·w₁⋯w_n.
pub fn relation_product(g: &FiniteGroup, handles: &[(Elem, Elem)], punctures: &[Puncture]) -> Elem {
    let h = handles.iter().fold(0, |acc, &(a, b)| g.mul(acc, g.commutator(a, b)));
    punctures.iter().fold(h, |acc, p| g.mul(acc, p.letter))
}

impl BranchedTuple {
    /// Validating constructor; when `c` is given every branch class must lie in it.
    pub fn new(
        group: Arc<FiniteGroup>,
        handles: Vec<(Elem, Elem)>,
        punctures: Vec<Puncture>,
        c: Option<&ClassSet>,
    ) -> Result<Self, CoverError> {
        let n = group.order();
        for &(a, b) in &handles {
            for x in [a, b] {
                if x >= n {
                    return Err(CoverError::ElementOutOfRange(x));
                }
            }
        }
        for (i, p) in punctures.iter().enumerate() {
            if p.letter >= n {
                return Err(CoverError::ElementOutOfRange(p.letter));
            }
            if p.letter == 0 {
                return Err(CoverError::IdentityLetter(i));
            }
            if let Some(c) = c {
                if !c.contains(&group, p.branch_elem(&group)) {
                    return Err(CoverError::LetterOutsideC(i));
                }
            }
        }
        let r = relation_product(&group, &handles, &punctures);
        if r != 0 {
            return Err(CoverError::RelationViolated(r));
        }
        Ok(BranchedTuple { group, handles, punctures })
    }

    pub(crate) fn from_parts_unchecked(group: Arc<FiniteGroup>, handles: Vec<(Elem, Elem)>, punctures: Vec<Puncture>) -> Self {
        debug_assert_eq!(relation_product(&group, &handles, &punctures), 0);
        BranchedTuple { group, handles, punctures }
    }

    /// A closed unbranched tuple.
    pub fn closed(group: Arc<FiniteGroup>, handles: Vec<(Elem, Elem)>) -> Result<Self, CoverError> {
        Self::new(group, handles, Vec::new(), None)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn genus(&self) -> usize {
        self.handles.len()
    }

    pub fn num_punctures(&self) -> usize {
        self.punctures.len()
    }

    pub fn handles(&self) -> &[(Elem, Elem)] {
        &self.handles
    }

    pub fn punctures(&self) -> &[Puncture] {
        &self.punctures
    }

    pub fn branch_data(&self) -> BranchData {
        BranchData::from_punctures(&self.group, &self.punctures)
    }

    pub fn letters(&self) -> Vec<Elem> {
        self.handles
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(self.punctures.iter().map(|p| p.letter))
            .collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.group.generates(&self.letters())
    }

    pub fn relation_holds(&self) -> bool {
        relation_product(&self.group, &self.handles, &self.punctures) == 0
    }

    pub fn same_group(&self, other: &BranchedTuple) -> bool {
        Arc::ptr_eq(&self.group, &other.group) || self.group == other.group
    }

    /// Handles of `self` then `other`, punctures of `self` then `other`.
    ///
    /// The glued word is H₁W₁H₂W₂; moving H₂ past W₁ conjugates `other`'s handles
    /// by W₁ (a no-op when `self` is unbranched).
    pub fn connect_sum(&self, other: &BranchedTuple) -> Result<BranchedTuple, CoverError> {
        if !self.same_group(other) {
            return Err(CoverError::GroupMismatch);
        }
        let g = &self.group;
        let w = self.punctures.iter().fold(0, |acc, p| g.mul(acc, p.letter));
        let mut handles = self.handles.clone();
        handles.extend(other.handles.iter().map(|&(a, b)| (g.conj(w, a), g.conj(w, b))));
        let mut punctures = self.punctures.clone();
        punctures.extend_from_slice(&other.punctures);
        Ok(BranchedTuple::from_parts_unchecked(self.group.clone(), handles, punctures))
    }

    pub fn pack(&self) -> Box<[u16]> {
        self.handles
            .iter()
            .flat_map(|&(a, b)| [a as u16, b as u16])
            .chain(self.punctures.iter().map(Puncture::pack))
            .collect()
    }

    pub(crate) fn from_packed(group: Arc<FiniteGroup>, genus: usize, key: &[u16]) -> Self {
        let handles = (0..genus).map(|i| (key[2 * i] as Elem, key[2 * i + 1] as Elem)).collect();
        let punctures = key[2 * genus..].iter().map(|&x| Puncture::unpack(x)).collect();
        BranchedTuple::from_parts_unchecked(group, handles, punctures)
    }

    pub fn to_json(&self) -> TupleJson {
        TupleJson {
            g: self.genus(),
            handles: self.handles.iter().map(|&(a, b)| [a, b]).collect(),
            punctures: self.punctures.iter().map(|p| (p.letter, p.sign)).collect(),
        }
    }

    pub fn from_json(group: Arc<FiniteGroup>, j: &TupleJson, c: Option<&ClassSet>) -> Result<Self, CoverError> {
        let t = Self::new(
            group,
            j.handles.iter().map(|h| (h[0], h[1])).collect(),
            j.punctures.iter().map(|&(w, s)| Puncture::new(w, s)).collect(),
            c,
        )?;
        debug_assert_eq!(t.genus(), j.g);
        Ok(t)
    }
}

/// {"g": int, "handles": [[a,b],...], "punctures": [[w, sign],...]}
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleJson {
    pub g: usize,
    pub handles: Vec<[Elem; 2]>,
    pub punctures: Vec<(Elem, Sign)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub surjective_only: bool,
    /// Upper bound on the estimated number of search leaves.
    pub budget: u128,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { surjective_only: true, budget: 50_000_000 }
    }
}

/// Rough count of search leaves for R_{g,v}.
pub fn enumeration_estimate(g: &FiniteGroup, genus: usize, v: &BranchData) -> u128 {
    let n = v.cardinality() as u128;
    let mut est = (g.order() as u128).saturating_pow(2 * genus as u32);
    // multinomial coefficient
    let mut k = 0u128;
    for (cl, _, count) in v.iter() {
        for i in 0..count as u128 {
            k += 1;
            est = est.saturating_mul(k) / (i + 1);
            est = est.saturating_mul(g.class(cl).size as u128);
        }
    }
    debug_assert_eq!(k, n);
    est
}

struct Slots {
    /// candidate (packed letter, slot index), sorted by packed value
    candidates: Vec<(u16, usize)>,
    /// (class, sign) per slot index
    kinds: Vec<(usize, Sign)>,
    counts: Vec<usize>,
}

impl Slots {
    fn new(g: &FiniteGroup, v: &BranchData) -> Self {
        let mut kinds = Vec::new();
        let mut counts = Vec::new();
        let mut candidates = Vec::new();
        for (cl, sign, k) in v.iter() {
            let idx = kinds.len();
            kinds.push((cl, sign));
            counts.push(k);
            for &m in &g.class(cl).members {
                let letter = match sign {
                    Sign::Pos => m,
                    Sign::Neg => g.inv(m),
                };
                candidates.push((Puncture::new(letter, sign).pack(), idx));
            }
        }
        candidates.sort_unstable();
        Slots { candidates, kinds, counts }
    }
}

/// Packed tuples of R_{g,v} (genus `genus`, branch data `v`), in lexicographic order.
pub fn enumerate_packed(
    group: &FiniteGroup,
    c: &ClassSet,
    genus: usize,
    v: &BranchData,
    opts: &EnumOptions,
) -> Result<Vec<Box<[u16]>>, CoverError> {
    v.check_supported(group, c)?;
    let estimate = enumeration_estimate(group, genus, v);
    if estimate > opts.budget {
        return Err(CoverError::Budget { estimate, budget: opts.budget });
    }
    let order = group.order();
    let n = v.cardinality();
    let slots = Slots::new(group, v);
    let len = 2 * genus + n;
    if len == 0 {
        let ok = !opts.surjective_only || order == 1;
        return Ok(if ok { vec![Vec::new().into_boxed_slice()] } else { Vec::new() });
    }
    let first_choices: Vec<u16> = if genus > 0 {
        (0..order as u16).collect()
    } else if n == 1 {
        // a single letter must be the identity, which is never a branch letter
        return Ok(Vec::new());
    } else {
        slots.candidates.iter().map(|c| c.0).collect()
    };
    let chunks: Vec<Vec<Box<[u16]>>> = first_choices
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut key = vec![0u16; len];
            let mut remaining = slots.counts.clone();
            let ctx = Ctx { g: group, genus, n, slots: &slots, surjective_only: opts.surjective_only };
            if genus > 0 {
                key[0] = first;
                ctx.handles(&mut key, 1, 0, &mut remaining, &mut out);
            } else {
                let idx = slots.candidates.iter().find(|c| c.0 == first).expect("candidate").1;
                remaining[idx] -= 1;
                key[0] = first;
                let p = Puncture::unpack(first).letter;
                ctx.punctures(&mut key, 1, p, &mut remaining, &mut out);
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

struct Ctx<'a> {
    g: &'a FiniteGroup,
    genus: usize,
    n: usize,
    slots: &'a Slots,
    surjective_only: bool,
}

impl Ctx<'_> {
    fn accept(&self, key: &[u16], out: &mut Vec<Box<[u16]>>) {
        if self.surjective_only {
            let letters: Vec<Elem> = key[..2 * self.genus]
                .iter()
                .map(|&x| x as Elem)
                .chain(key[2 * self.genus..].iter().map(|&x| Puncture::unpack(x).letter))
                .collect();
            if !self.g.generates(&letters) {
                return;
            }
        }
        out.push(key.to_vec().into_boxed_slice());
    }

    /// Fill handle coordinates from position `pos`; `prod` is the product of completed commutators.
    fn handles(&self, key: &mut [u16], pos: usize, prod: Elem, remaining: &mut [usize], out: &mut Vec<Box<[u16]>>) {
        let g = self.g;
        if pos == 2 * self.genus {
            if self.n == 0 {
                if prod == 0 {
                    self.accept(key, out);
                }
                return;
            }
            self.punctures(key, pos, prod, remaining, out);
            return;
        }
        let last_b = pos == 2 * self.genus - 1;
        for x in 0..g.order() {
            key[pos] = x as u16;
            if pos % 2 == 0 {
                self.handles(key, pos + 1, prod, remaining, out);
            } else {
                let a = key[pos - 1] as Elem;
                let next = g.mul(prod, g.commutator(a, x));
                if last_b && self.n == 0 && next != 0 {
                    continue;
                }
                self.handles(key, pos + 1, next, remaining, out);
            }
        }
    }

    fn punctures(&self, key: &mut [u16], pos: usize, prod: Elem, remaining: &mut [usize], out: &mut Vec<Box<[u16]>>) {
        let g = self.g;
        let len = key.len();
        if pos == len - 1 {
            let w = g.inv(prod);
            if w == 0 {
                return;
            }
            let Some(idx) = remaining.iter().position(|&r| r > 0) else { return };
            let (cl, sign) = self.slots.kinds[idx];
            let p = Puncture::new(w, sign);
            if g.class_of(p.branch_elem(g)) != cl {
                return;
            }
            key[pos] = p.pack();
            self.accept(key, out);
            return;
        }
        for &(packed, idx) in &self.slots.candidates {
            if remaining[idx] == 0 {
                continue;
            }
            remaining[idx] -= 1;
            key[pos] = packed;
            let next = g.mul(prod, Puncture::unpack(packed).letter);
            self.punctures(key, pos + 1, next, remaining, out);
            remaining[idx] += 1;
        }
    }
}

/// Tuples of R_{g,v} as validated values.
pub fn enumerate_tuples(
    group: &Arc<FiniteGroup>,
    c: &ClassSet,
    genus: usize,
    v: &BranchData,
    opts: &EnumOptions,
) -> Result<Vec<BranchedTuple>, CoverError> {
    Ok(enumerate_packed(group, c, genus, v, opts)?
        .iter()
        .map(|k| BranchedTuple::from_packed(group.clone(), genus, k))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named::*;

    fn s3() -> (Arc<FiniteGroup>, ClassSet, usize) {
        let g = Arc::new(symmetric(3));
        let t = (1..6).find(|&x| g.elem_order(x) == 2).unwrap();
        let c = ClassSet::from_elements(&g, &[t]).unwrap();
        let cl = g.class_of(t);
        (g, c, cl)
    }

    #[test]
    fn make_tuple_examples() {
        let k4 = Arc::new(klein());
        assert!(BranchedTuple::closed(k4.clone(), vec![(1, 2)]).is_ok());
        let (g, c, _) = s3();
        let t = (1..6).find(|&x| g.elem_order(x) == 2).unwrap();
        let u = (1..6).find(|&x| g.elem_order(x) == 2 && x != t).unwrap();
        let p = |x| Puncture::new(x, Sign::Pos);
        assert!(BranchedTuple::new(g.clone(), vec![], vec![p(t), p(t)], Some(&c)).is_ok());
        assert!(matches!(
            BranchedTuple::new(g.clone(), vec![], vec![p(t), p(u)], Some(&c)),
            Err(CoverError::RelationViolated(_))
        ));
        assert_eq!(
            BranchedTuple::new(g.clone(), vec![], vec![p(0)], None),
            Err(CoverError::IdentityLetter(0))
        );
        let r = (1..6).find(|&x| g.elem_order(x) == 3).unwrap();
        assert_eq!(
            BranchedTuple::new(g.clone(), vec![], vec![p(r), p(g.inv(r))], Some(&c)),
            Err(CoverError::LetterOutsideC(0))
        );
    }

    #[test]
    fn branch_data_examples() {
        let (g, _, cl) = s3();
        let t = g.class(cl).representative;
        let tup = BranchedTuple::new(g.clone(), vec![], vec![Puncture::new(t, Sign::Pos); 2], None).unwrap();
        assert_eq!(tup.branch_data(), BranchData::new().with(cl, Sign::Pos, 2));
        let r = (1..6).find(|&x| g.elem_order(x) == 3).unwrap();
        let tup = BranchedTuple::new(
            g.clone(),
            vec![],
            vec![Puncture::new(r, Sign::Pos), Puncture::new(g.inv(r), Sign::Neg)],
            None,
        )
        .unwrap();
        let rc = g.class_of(r);
        assert_eq!(tup.branch_data(), BranchData::new().with(rc, Sign::Pos, 1).with(rc, Sign::Neg, 1));
        assert!(BranchedTuple::closed(g, vec![]).unwrap().branch_data().is_empty());
    }

    #[test]
    fn enumeration_counts() {
        let (g, c, cl) = s3();
        let v4 = BranchData::new().with(cl, Sign::Pos, 4);
        assert_eq!(enumerate_packed(&g, &c, 0, &v4, &EnumOptions::default()).unwrap().len(), 24);
        let all = EnumOptions { surjective_only: false, ..Default::default() };
        assert_eq!(enumerate_packed(&g, &c, 0, &v4, &all).unwrap().len(), 27);
        let v1 = BranchData::new().with(cl, Sign::Pos, 1);
        assert!(enumerate_packed(&g, &c, 0, &v1, &EnumOptions::default()).unwrap().is_empty());
        let k4 = klein();
        let n = enumerate_packed(&k4, &ClassSet::empty(), 1, &BranchData::new(), &EnumOptions::default()).unwrap();
        assert_eq!(n.len(), 6);
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let (g, c, cl) = s3();
        let v = BranchData::new().with(cl, Sign::Pos, 3).with(cl, Sign::Neg, 1);
        let keys = enumerate_packed(&g, &c, 1, &v, &EnumOptions::default()).unwrap();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        for k in &keys {
            let t = BranchedTuple::from_packed(g.clone(), 1, k);
            assert!(t.relation_holds());
            assert_eq!(t.branch_data(), v);
            assert!(t.is_surjective());
        }
    }

    #[test]
    fn unfiltered_total_matches_free_count() {
        // summed over all v of cardinality n with C = G∖{1}, signs +: |G|^{2g+n-1} minus identity-letter tuples
        let g = Arc::new(cyclic(3));
        let c = ClassSet::all_nontrivial(&g);
        let opts = EnumOptions { surjective_only: false, ..Default::default() };
        let mut total = 0;
        for a in 0..=3usize {
            let v = BranchData::new().with(1, Sign::Pos, a).with(2, Sign::Pos, 3 - a);
            total += enumerate_packed(&g, &c, 1, &v, &opts).unwrap().len();
        }
        // non-identity letters w1,w2,w3 with product 1: 2 choices for w1,w2 (w3 forced, must be non-identity)
        let brute = (1..3).flat_map(|x| (1..3).map(move |y| (x, y))).filter(|&(x, y)| (x + y) % 3 != 0).count();
        assert_eq!(total, 9 * brute);
    }

    #[test]
    fn budget_is_enforced() {
        let (g, c, cl) = s3();
        let v = BranchData::new().with(cl, Sign::Pos, 6);
        let opts = EnumOptions { budget: 10, ..Default::default() };
        assert!(matches!(enumerate_packed(&g, &c, 1, &v, &opts), Err(CoverError::Budget { .. })));
    }

    #[test]
    fn tuple_json_round_trip() {
        let (g, c, cl) = s3();
        let v = BranchData::new().with(cl, Sign::Pos, 2).with(cl, Sign::Neg, 2);
        let t = enumerate_tuples(&g, &c, 0, &v, &EnumOptions::default()).unwrap().remove(0);
        let s = serde_json::to_string(&t.to_json()).unwrap();
        let back: TupleJson = serde_json::from_str(&s).unwrap();
        assert_eq!(BranchedTuple::from_json(g, &back, Some(&c)).unwrap(), t);
        assert!(s.starts_with("{\"g\":0,\"handles\":[],\"punctures\":[["));
    }
}
