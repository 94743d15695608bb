//! Cokernels of sparse integer matrices: unit-pivot elimination followed by a dense SNF.

use super::scalar::Scalar;
use super::snf::{dense_snf, Overflow};

type Res<T> = Result<T, Overflow>;

fn ok<T>(v: Option<T>) -> Res<T> {
    v.ok_or(Overflow)
}

/// Raw output of the cokernel pipeline, before conversion to a presented group.
#[derive(Debug, Clone)]
pub(crate) struct CokernelParts<T> {
    /// Substitutions e_r := Σ c_i e_i, applied in order.
    pub rules: Vec<(usize, Vec<(usize, T)>)>,
    /// Ambient indices of the generators that survive elimination.
    pub active: Vec<usize>,
    pub d: Vec<T>,
    pub u: Vec<Vec<T>>,
    pub u_inv: Vec<Vec<T>>,
}

type Column<T> = Vec<(usize, T)>;

/// Eliminates every unit pivot it can find, fewest-occurrence rows first.
fn eliminate<T: Scalar>(
    nrows: usize,
    columns: &[Vec<(usize, i64)>],
) -> Res<(Vec<(usize, Column<T>)>, Vec<bool>, Vec<Option<Column<T>>>)> {
    let mut cols: Vec<Option<Column<T>>> = columns
        .iter()
        .map(|c| {
            let mut v: Column<T> = c.iter().filter(|e| e.1 != 0).map(|&(r, x)| (r, T::from_i64(x))).collect();
            v.sort_by_key(|e| e.0);
            (!v.is_empty()).then_some(v)
        })
        .collect();
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); nrows];
    for (ci, c) in cols.iter().enumerate() {
        if let Some(c) = c {
            for &(r, _) in c {
                row_cols[r].push(ci);
            }
        }
    }
    let mut active = vec![true; nrows];
    let mut rules = Vec::new();
    loop {
        let mut progress = false;
        for ci in 0..cols.len() {
            let Some(col) = cols[ci].as_ref() else { continue };
            let pivot = col
                .iter()
                .filter(|e| e.1.is_unit())
                .min_by_key(|e| (row_cols[e.0].len(), e.0))
                .map(|e| (e.0, e.1.clone()));
            let Some((r, p)) = pivot else { continue };
            progress = true;
            let pcol = cols[ci].take().expect("pivot column");
            let mut others = std::mem::take(&mut row_cols[r]);
            others.sort_unstable();
            others.dedup();
            for c2 in others {
                if c2 == ci {
                    continue;
                }
                let Some(col2) = cols[c2].as_ref() else { continue };
                let Ok(pos) = col2.binary_search_by_key(&r, |e| e.0) else { continue };
                let f = ok(col2[pos].1.mul(&p))?;
                let merged = axpy_sorted(col2, &f, &pcol)?;
                for &(row, _) in &merged {
                    if col2.binary_search_by_key(&row, |e| e.0).is_err() {
                        row_cols[row].push(c2);
                    }
                }
                cols[c2] = (!merged.is_empty()).then_some(merged);
            }
            let neg_p = ok(p.neg())?;
            let mut rule = Vec::with_capacity(pcol.len() - 1);
            for (row, x) in &pcol {
                if *row != r {
                    rule.push((*row, ok(neg_p.mul(x))?));
                }
            }
            rules.push((r, rule));
            active[r] = false;
        }
        if !progress {
            break;
        }
    }
    Ok((rules, active, cols))
}

/// a - f·b for sorted sparse columns; drops zeros.
fn axpy_sorted<T: Scalar>(a: &Column<T>, f: &T, b: &Column<T>) -> Res<Column<T>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, ok(ok(f.mul(&b[j].1))?.neg())?));
            j += 1;
        } else {
            let v = ok(a[i].1.sub(&ok(f.mul(&b[j].1))?))?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// Z^nrows / span(columns).
pub(crate) fn cokernel_parts<T: Scalar>(
    nrows: usize,
    columns: &[Vec<(usize, i64)>],
    use_elimination: bool,
) -> Res<CokernelParts<T>> {
    let (rules, active_mask, cols) = if use_elimination {
        eliminate::<T>(nrows, columns)?
    } else {
        let cols = columns
            .iter()
            .map(|c| Some(c.iter().filter(|e| e.1 != 0).map(|&(r, x)| (r, T::from_i64(x))).collect()))
            .collect();
        (Vec::new(), vec![true; nrows], cols)
    };
    let active: Vec<usize> = (0..nrows).filter(|&r| active_mask[r]).collect();
    let mut pos = vec![usize::MAX; nrows];
    for (i, &r) in active.iter().enumerate() {
        pos[r] = i;
    }
    let m = active.len();
    let remaining: Vec<&Column<T>> = cols.iter().flatten().filter(|c| !c.is_empty()).collect();
    let n = remaining.len();
    let mut dense: Vec<Vec<T>> = vec![vec![T::zero(); n]; m];
    for (j, c) in remaining.iter().enumerate() {
        for (r, x) in c.iter() {
            let p = pos[*r];
            debug_assert!(p != usize::MAX, "eliminated row survived");
            dense[p][j] = ok(dense[p][j].add(x))?;
        }
    }
    let snf = dense_snf(dense, n, true, false)?;
    Ok(CokernelParts {
        rules,
        active,
        d: snf.d,
        u: snf.u.expect("tracked"),
        u_inv: snf.u_inv.expect("tracked"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elimination_and_dense_agree() {
        // relations of Z/2 ⊕ Z/4 plus redundant unit columns
        let cols = vec![
            vec![(0, 2), (1, 6)],
            vec![(0, 4), (1, 8)],
            vec![(2, 1), (0, 3)],
            vec![(3, -1), (2, 5), (1, 1)],
        ];
        let a = cokernel_parts::<i64>(4, &cols, true).unwrap();
        let b = cokernel_parts::<i64>(4, &cols, false).unwrap();
        let nz = |d: &[i64]| {
            let mut v: Vec<i64> = d.iter().copied().filter(|&x| x > 1).collect();
            v.sort();
            v
        };
        assert_eq!(nz(&a.d), nz(&b.d));
        assert_eq!(a.active.len() + a.rules.len(), 4);
    }
}
