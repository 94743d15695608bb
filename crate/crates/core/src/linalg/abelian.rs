//! Finitely generated abelian groups presented by invariant factors.

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use super::sparse::{cokernel_parts, CokernelParts};
use super::snf::Overflow;
use super::{AbelianError, LinalgConfig};
use num_bigint::BigInt;

/// Z^t ⊕ ⊕ Z/dᵢ with a linear map from an ambient lattice onto its coordinates.
///
/// Coordinates list the torsion slots first (reduced into `[0, dᵢ)`), then the free slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentedAbelianGroup {
    torsion: Vec<i64>,
    free_rank: usize,
    ambient_dim: usize,
    rules: Vec<(usize, Vec<(usize, i64)>)>,
    active: Vec<usize>,
    rows: Vec<Vec<i64>>,
    section: Vec<Vec<i64>>,
}

/// A homomorphism between coordinate spaces of two presented groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    matrix: Vec<Vec<i64>>,
    target_torsion: Vec<i64>,
}

fn conv<T: Scalar>(x: &T) -> Result<i64, AbelianError> {
    x.to_i64().ok_or(AbelianError::Overflow)
}

fn reduce_slot(x: i128, d: Option<i64>) -> Result<i64, AbelianError> {
    let y = match d {
        Some(d) => x.rem_euclid(d as i128),
        None => x,
    };
    i64::try_from(y).map_err(|_| AbelianError::Overflow)
}

impl PresentedAbelianGroup {
    fn from_parts<T: Scalar>(ambient_dim: usize, parts: CokernelParts<T>) -> Result<Self, AbelianError> {
        let rank = parts.d.iter().take_while(|x| !x.is_zero()).count();
        let m = parts.active.len();
        let mut torsion = Vec::new();
        let mut rows = Vec::new();
        let mut section = Vec::new();
        let mut free_rows = Vec::new();
        let mut free_section = Vec::new();
        let lift = |i: usize| -> Result<Vec<i64>, AbelianError> {
            let mut v = vec![0i64; ambient_dim];
            for (k, &amb) in parts.active.iter().enumerate() {
                v[amb] = conv(&parts.u_inv[k][i])?;
            }
            Ok(v)
        };
        for i in 0..m {
            if i < rank {
                if parts.d[i].is_unit() {
                    continue;
                }
                let d = conv(&parts.d[i])?;
                let dt = T::from_i64(d);
                let row: Result<Vec<i64>, AbelianError> = parts.u[i]
                    .iter()
                    .map(|x| conv(&x.rem_euclid(&dt).ok_or(AbelianError::Overflow)?))
                    .collect();
                torsion.push(d);
                rows.push(row?);
                section.push(lift(i)?);
            } else {
                let row: Result<Vec<i64>, AbelianError> = parts.u[i].iter().map(conv).collect();
                free_rows.push(row?);
                free_section.push(lift(i)?);
            }
        }
        let free_rank = free_rows.len();
        rows.extend(free_rows);
        section.extend(free_section);
        let rules = parts
            .rules
            .into_iter()
            .map(|(r, c)| Ok((r, c.iter().map(|(i, x)| Ok((*i, conv(x)?))).collect::<Result<Vec<_>, AbelianError>>()?)))
            .collect::<Result<Vec<_>, AbelianError>>()?;
        Ok(PresentedAbelianGroup { torsion, free_rank, ambient_dim, rules, active: parts.active, rows, section })
    }

    pub(crate) fn cokernel_sparse(
        nrows: usize,
        columns: &[Vec<(usize, i64)>],
        cfg: &LinalgConfig,
    ) -> Result<Self, AbelianError> {
        let dense_size = nrows.saturating_mul(columns.len());
        let eliminate = dense_size > cfg.sparse_threshold;
        match cokernel_parts::<i64>(nrows, columns, eliminate) {
            Ok(p) => Self::from_parts(nrows, p),
            Err(Overflow) => {
                let p = cokernel_parts::<BigInt>(nrows, columns, eliminate).map_err(|_| AbelianError::Overflow)?;
                Self::from_parts(nrows, p)
            }
        }
    }

    /// The trivial group presented on Z^0.
    pub fn trivial() -> Self {
        PresentedAbelianGroup {
            torsion: Vec::new(),
            free_rank: 0,
            ambient_dim: 0,
            rules: Vec::new(),
            active: Vec::new(),
            rows: Vec::new(),
            section: Vec::new(),
        }
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of coordinate slots.
    pub fn num_slots(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.num_slots() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// |A| when finite.
    pub fn order(&self) -> Option<u128> {
        self.is_finite().then(|| self.torsion.iter().map(|&d| d as u128).product())
    }

    fn slot_modulus(&self, i: usize) -> Option<i64> {
        self.torsion.get(i).copied()
    }

    pub fn try_to_coords(&self, v: &[i64]) -> Result<Vec<i64>, AbelianError> {
        if v.len() != self.ambient_dim {
            return Err(AbelianError::Dimension { expected: self.ambient_dim, got: v.len() });
        }
        let mut z: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (r, rule) in &self.rules {
            let c = z[*r];
            if c != 0 {
                z[*r] = 0;
                for (i, x) in rule {
                    z[*i] = z[*i].checked_add(c.checked_mul(*x as i128).ok_or(AbelianError::Overflow)?).ok_or(AbelianError::Overflow)?;
                }
            }
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(s, row)| {
                let mut acc: i128 = 0;
                for (k, &amb) in self.active.iter().enumerate() {
                    if row[k] != 0 && z[amb] != 0 {
                        let t = (row[k] as i128).checked_mul(z[amb]).ok_or(AbelianError::Overflow)?;
                        acc = acc.checked_add(t).ok_or(AbelianError::Overflow)?;
                        if let Some(d) = self.slot_modulus(s) {
                            acc %= d as i128;
                        }
                    }
                }
                reduce_slot(acc, self.slot_modulus(s))
            })
            .collect()
    }

    /// Canonical coordinates of an ambient vector.
    pub fn to_coords(&self, v: &[i64]) -> Vec<i64> {
        self.try_to_coords(v).expect("coordinate map overflow or dimension mismatch")
    }

    /// Coordinates of a sparse ambient vector.
    pub fn sparse_to_coords(&self, v: &[(usize, i64)]) -> Vec<i64> {
        let mut dense = vec![0i64; self.ambient_dim];
        for &(i, x) in v {
            dense[i] += x;
        }
        self.to_coords(&dense)
    }

    /// An ambient vector mapping to the given coordinates.
    pub fn lift(&self, coords: &[i64]) -> Vec<i64> {
        let mut v = vec![0i64; self.ambient_dim];
        for (c, s) in coords.iter().zip(&self.section) {
            for (x, y) in v.iter_mut().zip(s) {
                *x += c * y;
            }
        }
        v
    }

    pub fn reduce(&self, coords: &[i64]) -> Vec<i64> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &x)| match self.slot_modulus(i) {
                Some(d) => x.rem_euclid(d),
                None => x,
            })
            .collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().map(|x| -x).collect();
        self.reduce(&s)
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.add(a, &self.neg(b))
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.num_slots()]
    }

    pub fn is_zero(&self, a: &[i64]) -> bool {
        self.reduce(a).iter().all(|&x| x == 0)
    }

    /// Every element of a finite group, in mixed-radix order.
    pub fn elements(&self) -> Option<Vec<Vec<i64>>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![Vec::new()];
        for &d in &self.torsion {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..d).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Some(out)
    }

    /// A / ⟨gens⟩ together with the induced map on coordinates.
    pub fn subgroup_quotient(&self, gens: &[Vec<i64>]) -> Result<(PresentedAbelianGroup, Projection), AbelianError> {
        let s = self.num_slots();
        let mut cols: Vec<Vec<(usize, i64)>> = Vec::new();
        for g in gens {
            if g.len() != s {
                return Err(AbelianError::Dimension { expected: s, got: g.len() });
            }
            cols.push(g.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &x)| (i, x)).collect());
        }
        for (i, &d) in self.torsion.iter().enumerate() {
            cols.push(vec![(i, d)]);
        }
        let q = Self::cokernel_sparse(s, &cols, &LinalgConfig::default())?;
        let matrix: Vec<Vec<i64>> = (0..s)
            .map(|j| {
                let mut e = vec![0i64; s];
                e[j] = 1;
                q.try_to_coords(&e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        // transpose to slots(q) × s
        let matrix: Vec<Vec<i64>> = (0..q.num_slots()).map(|i| matrix.iter().map(|c| c[i]).collect()).collect();
        let proj = Projection { matrix, target_torsion: q.torsion.clone() };

        let mut rows = Vec::with_capacity(q.num_slots());
        for (i, prow) in proj.matrix.iter().enumerate() {
            let mut row = vec![0i128; self.active.len()];
            for (k, &c) in prow.iter().enumerate() {
                if c != 0 {
                    for (x, &y) in row.iter_mut().zip(&self.rows[k]) {
                        *x += c as i128 * y as i128;
                    }
                }
            }
            let modulus = q.torsion.get(i).copied();
            rows.push(row.into_iter().map(|x| reduce_slot(x, modulus)).collect::<Result<Vec<_>, _>>()?);
        }
        let section = q.section.iter().map(|c| self.lift(c)).collect();
        let composed = PresentedAbelianGroup {
            torsion: q.torsion.clone(),
            free_rank: q.free_rank,
            ambient_dim: self.ambient_dim,
            rules: self.rules.clone(),
            active: self.active.clone(),
            rows,
            section,
        };
        Ok((composed, proj))
    }
}

impl Projection {
    pub fn apply(&self, coords: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let s: i128 = row.iter().zip(coords).map(|(&a, &b)| a as i128 * b as i128).sum();
                match self.target_torsion.get(i) {
                    Some(&d) => s.rem_euclid(d as i128) as i64,
                    None => s as i64,
                }
            })
            .collect()
    }

    pub fn target_slots(&self) -> usize {
        self.matrix.len()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{cokernel, IntMatrix};

    #[test]
    fn sections_invert_coordinates() {
        let m = IntMatrix::from_rows(vec![vec![2, 4, 0], vec![6, 8, 0], vec![0, 0, 0]]);
        let a = cokernel(&m).unwrap();
        assert_eq!(a.torsion(), &[2, 4]);
        assert_eq!(a.free_rank(), 1);
        for c in [vec![1, 0, 0], vec![0, 1, 0], vec![1, 3, -5]] {
            assert_eq!(a.to_coords(&a.lift(&c)), a.reduce(&c));
        }
    }

    #[test]
    fn quotient_examples() {
        // Z ⊕ Z/2 modulo (2, 0)
        let m = IntMatrix::from_rows(vec![vec![0], vec![2]]);
        let a = cokernel(&m).unwrap();
        assert_eq!((a.torsion().to_vec(), a.free_rank()), (vec![2], 1));
        let (q, p) = a.subgroup_quotient(&[vec![0, 2]]).unwrap();
        assert_eq!((q.torsion().to_vec(), q.free_rank()), (vec![2, 2], 0));
        let (same, _) = a.subgroup_quotient(&[]).unwrap();
        assert_eq!((same.torsion(), same.free_rank()), (a.torsion(), 1));
        // composed map agrees with projecting coordinates
        for v in [vec![1, 0], vec![0, 1], vec![3, 7]] {
            assert_eq!(q.to_coords(&v), p.apply(&a.to_coords(&v)));
        }
        let z2 = cokernel(&IntMatrix::from_rows(vec![vec![2]])).unwrap();
        let (t, _) = z2.subgroup_quotient(&[vec![1]]).unwrap();
        assert!(t.is_trivial());
    }
}
