//! Dense finite groups given by a multiplication table.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::{cokernel_of_columns, AbelianError, PresentedAbelianGroup};

/// Element index. The identity is always 0.
pub type Elem = usize;

/// Default bound on |G|.
pub const DEFAULT_ORDER_CAP: usize = 120;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("permutation {index} is not a bijection on 0..{degree}")]
    NotBijective { index: usize, degree: usize },
    #[error("permutations act on different point sets ({0} vs {1} points)")]
    DegreeMismatch(usize, usize),
    #[error("group order exceeds the configured cap of {0}")]
    OrderCap(usize),
    #[error("Cayley table is not square or has out-of-range entries")]
    MalformedTable,
    #[error("Cayley table has no identity element")]
    NoIdentity,
    #[error("Cayley table is not a Latin square (missing inverses)")]
    NotLatin,
    #[error("Cayley table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// How a group was described on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Permutations { permutations: Vec<Vec<usize>> },
    CayleyTable { cayley_table: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjClass {
    pub class_id: usize,
    pub representative: Elem,
    pub members: Vec<Elem>,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    elem_order: Vec<usize>,
    class_of: Vec<usize>,
    classes: Vec<ConjClass>,
    generators: Vec<Elem>,
    perms: Option<Vec<Vec<usize>>>,
    spec: GroupSpec,
    digest: String,
}

impl FiniteGroup {
    pub fn build(spec: &GroupSpec) -> Result<Self, GroupError> {
        Self::build_with_cap(spec, DEFAULT_ORDER_CAP)
    }

    pub fn build_with_cap(spec: &GroupSpec, cap: usize) -> Result<Self, GroupError> {
        match spec {
            GroupSpec::Permutations { permutations } => Self::from_permutations_capped(permutations, cap),
            GroupSpec::CayleyTable { cayley_table } => Self::from_cayley_table_capped(cayley_table, cap),
        }
    }

    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_permutations_capped(gens, DEFAULT_ORDER_CAP)
    }

    fn from_permutations_capped(gens: &[Vec<usize>], cap: usize) -> Result<Self, GroupError> {
        let cap = cap.min(u16::MAX as usize / 2);
        let degree = gens.first().map_or(0, |g| g.len());
        for (index, g) in gens.iter().enumerate() {
            if g.len() != degree {
                return Err(GroupError::DegreeMismatch(degree, g.len()));
            }
            let mut seen = vec![false; degree];
            for &p in g {
                if p >= degree || seen[p] {
                    return Err(GroupError::NotBijective { index, degree });
                }
                seen[p] = true;
            }
        }
        let compose = |x: &[usize], y: &[usize]| -> Vec<usize> { y.iter().map(|&k| x[k]).collect() };

        let identity: Vec<usize> = (0..degree).collect();
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity, 0);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p = compose(&elems[i], g);
                if !index.contains_key(&p) {
                    if elems.len() >= cap {
                        return Err(GroupError::OrderCap(cap));
                    }
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut mul = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = index[&compose(&elems[x], &elems[y])] as u16;
            }
        }
        let mut generators = Vec::new();
        for g in gens {
            let e = index[g];
            if e != 0 && !generators.contains(&e) {
                generators.push(e);
            }
        }
        let spec = GroupSpec::Permutations { permutations: gens.to_vec() };
        Ok(Self::assemble(n, mul, generators, Some(elems), spec))
    }

    pub fn from_cayley_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_cayley_table_capped(table, DEFAULT_ORDER_CAP)
    }

    fn from_cayley_table_capped(table: &[Vec<usize>], cap: usize) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(GroupError::MalformedTable);
        }
        if n > cap.min(u16::MAX as usize / 2) {
            return Err(GroupError::OrderCap(cap));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        for i in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for j in 0..n {
                if row[table[i][j]] || col[table[j][i]] {
                    return Err(GroupError::NotLatin);
                }
                row[table[i][j]] = true;
                col[table[j][i]] = true;
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = table[x][y];
                for z in 0..n {
                    if table[xy][z] != table[x][table[y][z]] {
                        return Err(GroupError::NotAssociative(x, y, z));
                    }
                }
            }
        }
        // identity first, everything else in input order
        let mut old_of_new: Vec<usize> = vec![e];
        old_of_new.extend((0..n).filter(|&x| x != e));
        let mut new_of_old = vec![0; n];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let mut mul = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = new_of_old[table[old_of_new[x]][old_of_new[y]]] as u16;
            }
        }
        let spec = GroupSpec::CayleyTable { cayley_table: table.to_vec() };
        let mut g = Self::assemble(n, mul, Vec::new(), None, spec);
        // greedy generating set in index order
        let mut gens = Vec::new();
        let mut span = g.closure(&gens);
        for x in 1..n {
            if !span[x] {
                gens.push(x);
                span = g.closure(&gens);
            }
        }
        g.generators = gens;
        Ok(g)
    }

    fn assemble(n: usize, mul: Vec<u16>, generators: Vec<Elem>, perms: Option<Vec<Vec<usize>>>, spec: GroupSpec) -> Self {
        let mut inv = vec![0u16; n];
        for x in 0..n {
            for y in 0..n {
                if mul[x * n + y] == 0 {
                    inv[x] = y as u16;
                    break;
                }
            }
        }
        let mut elem_order = vec![1; n];
        for x in 1..n {
            let (mut p, mut k) = (x, 1);
            while p != 0 {
                p = mul[p * n + x] as usize;
                k += 1;
            }
            elem_order[x] = k;
        }
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members: Vec<Elem> = (0..n)
                .map(|g| mul[mul[g * n + x] as usize * n + inv[g] as usize] as usize)
                .collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(ConjClass { class_id: id, representative: x, size: members.len(), members });
        }
        let mut h = Sha256::new();
        h.update((n as u64).to_le_bytes());
        for v in &mul {
            h.update(v.to_le_bytes());
        }
        let digest = hex::encode(h.finalize());
        FiniteGroup { order: n, mul, inv, elem_order, class_of, classes, generators, perms, spec, digest }
    }

    pub fn trivial() -> Self {
        Self::from_permutations(&[]).expect("trivial group")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.mul[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        self.inv[x] as usize
    }

    #[inline]
    pub fn identity(&self) -> Elem {
        0
    }

    /// x y x⁻¹
    #[inline]
    pub fn conj(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.mul(x, y), self.inv(x))
    }

    /// [x, y] = x y x⁻¹ y⁻¹
    #[inline]
    pub fn commutator(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.conj(x, y), self.inv(y))
    }

    pub fn product(&self, word: impl IntoIterator<Item = Elem>) -> Elem {
        word.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    pub fn pow(&self, x: Elem, k: usize) -> Elem {
        (0..k).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn elem_order(&self, x: Elem) -> usize {
        self.elem_order[x]
    }

    pub fn class_of(&self, x: Elem) -> usize {
        self.class_of[x]
    }

    pub fn class_reps(&self) -> Vec<Elem> {
        self.classes.iter().map(|c| c.representative).collect()
    }

    pub fn conjugacy_classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &ConjClass {
        &self.classes[id]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Hex SHA-256 of the multiplication table.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn permutation(&self, x: Elem) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[x].as_slice())
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order
    }

    pub fn check_elem(&self, x: Elem) -> Result<Elem, GroupError> {
        if x < self.order {
            Ok(x)
        } else {
            Err(GroupError::ElementOutOfRange(x))
        }
    }

    pub fn centralizer(&self, x: Elem) -> Vec<Elem> {
        (0..self.order).filter(|&y| self.mul(x, y) == self.mul(y, x)).collect()
    }

    /// Order of the permutation y ↦ c y c⁻¹ on the class of c.
    pub fn inn_order_on_class(&self, c: Elem) -> usize {
        let members = &self.classes[self.class_of[c]].members;
        let mut seen = vec![false; self.order];
        let mut result = 1usize;
        for &m in members {
            if seen[m] {
                continue;
            }
            let mut len = 0;
            let mut y = m;
            while !seen[y] {
                seen[y] = true;
                y = self.conj(c, y);
                len += 1;
            }
            result = num_integer::lcm(result, len);
        }
        result
    }

    /// Membership bitmap of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Elem]) -> Vec<bool> {
        let mut gs: Vec<Elem> = gens.iter().copied().filter(|&x| x != 0).collect();
        gs.sort_unstable();
        gs.dedup();
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut list = vec![0];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in &gs {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        member
    }

    pub fn subgroup_order(&self, gens: &[Elem]) -> usize {
        self.closure(gens).iter().filter(|&&b| b).count()
    }

    pub fn generates(&self, gens: &[Elem]) -> bool {
        if self.order == 1 {
            return true;
        }
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut list = vec![0];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    list.push(y);
                    if list.len() == self.order {
                        return true;
                    }
                }
            }
            i += 1;
        }
        false
    }

    pub fn commutator_subgroup(&self) -> Vec<bool> {
        let mut comms: Vec<Elem> = Vec::new();
        for x in 0..self.order {
            for y in 0..self.order {
                comms.push(self.commutator(x, y));
            }
        }
        self.closure(&comms)
    }

    /// Minimal number of commutators whose product is x, or None when x ∉ [G,G].
    pub fn commutator_length(&self, x: Elem) -> Option<usize> {
        let mut comms: Vec<Elem> = (0..self.order)
            .flat_map(|a| (0..self.order).map(move |b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        comms.sort_unstable();
        comms.dedup();
        let mut dist = vec![usize::MAX; self.order];
        dist[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(y) = queue.pop_front() {
            for &c in &comms {
                let z = self.mul(y, c);
                if dist[z] == usize::MAX {
                    dist[z] = dist[y] + 1;
                    queue.push_back(z);
                }
            }
        }
        (dist[x] != usize::MAX).then_some(dist[x])
    }

    /// Coset index of every element modulo a normal subgroup, cosets numbered by smallest member.
    pub fn coset_labels(&self, normal: &[bool]) -> (Vec<usize>, Vec<Elem>) {
        let mut label = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        let subgroup: Vec<Elem> = (0..self.order).filter(|&k| normal[k]).collect();
        for x in 0..self.order {
            if label[x] != usize::MAX {
                continue;
            }
            for &k in &subgroup {
                label[self.mul(x, k)] = reps.len();
            }
            reps.push(x);
        }
        (label, reps)
    }

    /// G / K for a normal subgroup K.
    pub fn quotient(&self, normal: &[bool]) -> Result<FiniteGroup, GroupError> {
        let (label, reps) = self.coset_labels(normal);
        let table: Vec<Vec<usize>> = reps
            .iter()
            .map(|&x| reps.iter().map(|&y| label[self.mul(x, y)]).collect())
            .collect();
        FiniteGroup::from_cayley_table_capped(&table, self.order.max(1))
    }

    /// G_ab with the projection G → coordinates.
    pub fn abelianization(&self) -> Result<(PresentedAbelianGroup, Vec<Vec<i64>>), GroupError> {
        let (label, reps) = self.coset_labels(&self.commutator_subgroup());
        let m = reps.len();
        // generator [i] for each non-identity coset, relations [i] + [j] - [ij]
        let mut columns = Vec::new();
        for i in 1..m {
            for j in 1..m {
                let k = label[self.mul(reps[i], reps[j])];
                let mut col: Vec<(usize, i64)> = Vec::new();
                let mut add = |r: usize, v: i64| {
                    if r == 0 {
                        return;
                    }
                    if let Some(e) = col.iter_mut().find(|e| e.0 == r - 1) {
                        e.1 += v;
                    } else {
                        col.push((r - 1, v));
                    }
                };
                add(i, 1);
                add(j, 1);
                add(k, -1);
                col.retain(|e| e.1 != 0);
                if !col.is_empty() {
                    columns.push(col);
                }
            }
        }
        let ab = cokernel_of_columns(m - 1, &columns)?;
        let projection = (0..self.order)
            .map(|x| {
                let mut v = vec![0i64; m - 1];
                if label[x] != 0 {
                    v[label[x] - 1] = 1;
                }
                ab.to_coords(&v)
            })
            .collect();
        Ok((ab, projection))
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}

impl Eq for FiniteGroup {}

/// A union of conjugacy classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ClassSet {
    classes: Vec<usize>,
}

impl ClassSet {
    pub fn empty() -> Self {
        ClassSet { classes: Vec::new() }
    }

    /// The union of the classes of the given elements.
    pub fn from_elements(g: &FiniteGroup, elems: &[Elem]) -> Result<Self, GroupError> {
        let mut classes = Vec::new();
        for &x in elems {
            classes.push(g.class_of(g.check_elem(x)?));
        }
        Ok(Self::from_class_ids(classes))
    }

    pub fn from_class_ids(mut classes: Vec<usize>) -> Self {
        classes.sort_unstable();
        classes.dedup();
        ClassSet { classes }
    }

    pub fn all_nontrivial(g: &FiniteGroup) -> Self {
        ClassSet { classes: (1..g.num_classes()).collect() }
    }

    /// Class ids in increasing order; positions in this list index Z^{C//G}.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn contains_class(&self, class_id: usize) -> bool {
        self.classes.binary_search(&class_id).is_ok()
    }

    pub fn contains(&self, g: &FiniteGroup, x: Elem) -> bool {
        self.contains_class(g.class_of(x))
    }

    pub fn position(&self, class_id: usize) -> Option<usize> {
        self.classes.binary_search(&class_id).ok()
    }

    pub fn elements(&self, g: &FiniteGroup) -> Vec<Elem> {
        let mut v: Vec<Elem> = self.classes.iter().flat_map(|&c| g.class(c).members.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Membership bitmap of ⟨C⟩.
    pub fn generated_subgroup(&self, g: &FiniteGroup) -> Vec<bool> {
        g.closure(&self.elements(g))
    }
}

/// Small groups used throughout tests and the command line.
pub mod named {
    use super::{FiniteGroup, GroupError};

    fn cycle_on(points: &[usize], degree: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..degree).collect();
        for (i, &a) in points.iter().enumerate() {
            p[a] = points[(i + 1) % points.len()];
        }
        p
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        if n <= 1 {
            return FiniteGroup::trivial();
        }
        FiniteGroup::from_permutations(&[cycle_on(&(0..n).collect::<Vec<_>>(), n)]).expect("cyclic group")
    }

    /// Product of cyclic groups of the given orders, acting on disjoint points.
    pub fn abelian(orders: &[usize]) -> FiniteGroup {
        let degree: usize = orders.iter().sum();
        let mut gens = Vec::new();
        let mut start = 0;
        for &n in orders {
            if n > 1 {
                gens.push(cycle_on(&(start..start + n).collect::<Vec<_>>(), degree));
            }
            start += n;
        }
        FiniteGroup::from_permutations(&gens).expect("abelian group")
    }

    pub fn klein() -> FiniteGroup {
        abelian(&[2, 2])
    }

    pub fn symmetric(n: usize) -> FiniteGroup {
        if n <= 1 {
            return FiniteGroup::trivial();
        }
        let gens = vec![cycle_on(&[0, 1], n), cycle_on(&(0..n).collect::<Vec<_>>(), n)];
        FiniteGroup::from_permutations(&gens).expect("symmetric group")
    }

    pub fn alternating(n: usize) -> FiniteGroup {
        if n <= 2 {
            return FiniteGroup::trivial();
        }
        let gens: Vec<Vec<usize>> = (2..n).map(|k| cycle_on(&[0, 1, k], n)).collect();
        FiniteGroup::from_permutations(&gens).expect("alternating group")
    }

    /// Dihedral group of order 2n.
    pub fn dihedral(n: usize) -> FiniteGroup {
        let rot = cycle_on(&(0..n).collect::<Vec<_>>(), n);
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        FiniteGroup::from_permutations(&[rot, refl]).expect("dihedral group")
    }

    /// Quaternion group as the regular representation of ⟨i, j⟩ on 8 points.
    pub fn quaternion() -> FiniteGroup {
        // points: 0=1, 1=i, 2=j, 3=k, 4=-1, 5=-i, 6=-j, 7=-k; left multiplication
        let i = vec![1, 4, 3, 6, 5, 0, 7, 2];
        let j = vec![2, 7, 4, 1, 6, 3, 0, 5];
        FiniteGroup::from_permutations(&[i, j]).expect("quaternion group")
    }

    pub fn by_name(name: &str) -> Result<FiniteGroup, GroupError> {
        let lower = name.to_ascii_lowercase();
        let num = |s: &str| s.parse::<usize>().ok();
        let g = match lower.as_str() {
            "trivial" | "c1" => FiniteGroup::trivial(),
            "k4" | "klein" | "v4" => klein(),
            "q8" | "quaternion" => quaternion(),
            _ => {
                if let Some(n) = lower.strip_prefix('c').and_then(num).or_else(|| lower.strip_prefix('z').and_then(num)) {
                    cyclic(n)
                } else if let Some(n) = lower.strip_prefix('s').and_then(num) {
                    symmetric(n)
                } else if let Some(n) = lower.strip_prefix('a').and_then(num) {
                    alternating(n)
                } else if let Some(n) = lower.strip_prefix('d').and_then(num) {
                    dihedral(n)
                } else if let Some(rest) = lower.strip_prefix("ab:") {
                    let orders: Option<Vec<usize>> = rest.split('x').map(num).collect();
                    abelian(&orders.ok_or(GroupError::MalformedTable)?)
                } else {
                    return Err(GroupError::MalformedTable);
                }
            }
        };
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    fn class_sizes(g: &FiniteGroup) -> Vec<usize> {
        let mut s: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.size).collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn builds_small_groups() {
        let s3 = FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(FiniteGroup::from_permutations(&[]).unwrap().order(), 1);
        let d4 = FiniteGroup::from_permutations(&[vec![1, 2, 3, 0], vec![2, 1, 0, 3]]).unwrap();
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        assert_eq!(class_sizes(&d4), vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            FiniteGroup::from_permutations(&[vec![0, 0, 1]]),
            Err(GroupError::NotBijective { .. })
        ));
        let table = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 2, 1]];
        assert!(FiniteGroup::from_cayley_table(&table).is_err());
        assert_eq!(
            FiniteGroup::build_with_cap(&GroupSpec::Permutations { permutations: symmetric_gens(5) }, 100),
            Err(GroupError::OrderCap(100))
        );
    }

    fn symmetric_gens(n: usize) -> Vec<Vec<usize>> {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        let c: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        vec![t, c]
    }

    #[test]
    fn cayley_round_trip_relabels_identity_first() {
        // Z/3 with identity stored at index 2
        let table = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::from_cayley_table(&table).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.mul(1, 2), 0);
        assert!(g.generates(g.generators()));
    }

    #[test]
    fn class_data_for_s3() {
        let s3 = symmetric(3);
        assert_eq!(class_sizes(&s3), vec![1, 2, 3]);
        let t = (0..6).find(|&x| s3.elem_order(x) == 2).unwrap();
        let r = (0..6).find(|&x| s3.elem_order(x) == 3).unwrap();
        assert_eq!(s3.centralizer(t).len(), 2);
        assert_eq!(s3.centralizer(r).len(), 3);
        assert_eq!(s3.centralizer(0).len(), 6);
        assert_eq!(s3.inn_order_on_class(t), 2);
        assert_eq!(s3.inn_order_on_class(r), 1);
        assert_eq!(s3.inn_order_on_class(0), 1);
        assert_eq!(s3.commutator_length(0), Some(0));
        assert_eq!(s3.commutator_length(r), Some(1));
        assert_eq!(s3.commutator_length(t), None);
        let transpositions: Vec<Elem> = (0..6).filter(|&x| s3.elem_order(x) == 2).collect();
        assert!(s3.generates(&transpositions));
        assert!(!s3.generates(&[t]));
        assert!(!s3.generates(&[]));
    }

    #[test]
    fn abelianizations() {
        let (ab, _) = symmetric(3).abelianization().unwrap();
        assert_eq!((ab.torsion().to_vec(), ab.free_rank()), (vec![2], 0));
        let (ab, _) = klein().abelianization().unwrap();
        assert_eq!(ab.torsion(), &[2, 2]);
        let (ab, _) = quaternion().abelianization().unwrap();
        assert_eq!(ab.torsion(), &[2, 2]);
        let (ab, _) = abelian(&[2, 3]).abelianization().unwrap();
        assert_eq!(ab.torsion(), &[6]);
        assert!(alternating(5).order() == 60);
    }

    #[test]
    fn quaternion_structure() {
        let q = quaternion();
        assert_eq!(q.order(), 8);
        assert_eq!(class_sizes(&q), vec![1, 1, 2, 2, 2]);
        assert_eq!((0..8).filter(|&x| q.elem_order(x) == 2).count(), 1);
    }

    #[test]
    fn quotient_by_commutator_subgroup() {
        let a4 = alternating(4);
        let k = a4.commutator_subgroup();
        let q = a4.quotient(&k).unwrap();
        assert_eq!(q.order(), 3);
    }

    #[test]
    fn class_set_basics() {
        let s3 = symmetric(3);
        let t = (0..6).find(|&x| s3.elem_order(x) == 2).unwrap();
        let c = ClassSet::from_elements(&s3, &[t]).unwrap();
        assert_eq!(c.elements(&s3).len(), 3);
        assert!(c.generated_subgroup(&s3).iter().all(|&b| b));
        assert!(ClassSet::empty().is_empty());
    }
}
