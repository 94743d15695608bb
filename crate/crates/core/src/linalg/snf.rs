//! Dense Smith normal form with optional transform tracking.

use super::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

type Res<T> = Result<T, Overflow>;

fn ok<T>(v: Option<T>) -> Res<T> {
    v.ok_or(Overflow)
}

/// U·A·V = diag(d); `u_inv` is U⁻¹.
#[derive(Debug, Clone)]
pub(crate) struct DenseSnf<T> {
    pub d: Vec<T>,
    pub u: Option<Vec<Vec<T>>>,
    pub u_inv: Option<Vec<Vec<T>>>,
    pub v: Option<Vec<Vec<T>>>,
}

struct Work<T> {
    a: Vec<Vec<T>>,
    m: usize,
    n: usize,
    u: Option<Vec<Vec<T>>>,
    ui: Option<Vec<Vec<T>>>,
    v: Option<Vec<Vec<T>>>,
}

fn identity<T: Scalar>(k: usize) -> Vec<Vec<T>> {
    (0..k)
        .map(|i| (0..k).map(|j| T::from_i64((i == j) as i64)).collect())
        .collect()
}

fn row_sub<T: Scalar>(rows: &mut [Vec<T>], t: usize, s: usize, q: &T) -> Res<()> {
    let (src, dst) = if s < t {
        let (lo, hi) = rows.split_at_mut(t);
        (&lo[s], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(s);
        (&hi[0], &mut lo[t])
    };
    for (x, y) in dst.iter_mut().zip(src.iter()) {
        if !y.is_zero() {
            *x = ok(x.sub(&ok(q.mul(y))?))?;
        }
    }
    Ok(())
}

fn col_sub<T: Scalar>(rows: &mut [Vec<T>], t: usize, s: usize, q: &T) -> Res<()> {
    for r in rows.iter_mut() {
        if !r[s].is_zero() {
            r[t] = ok(r[t].sub(&ok(q.mul(&r[s]))?))?;
        }
    }
    Ok(())
}

fn col_swap<T>(rows: &mut [Vec<T>], i: usize, j: usize) {
    for r in rows.iter_mut() {
        r.swap(i, j);
    }
}

impl<T: Scalar> Work<T> {
    /// row t -= q · row s
    fn row_axpy(&mut self, t: usize, s: usize, q: &T) -> Res<()> {
        row_sub(&mut self.a, t, s, q)?;
        if let Some(u) = self.u.as_mut() {
            row_sub(u, t, s, q)?;
        }
        if let Some(ui) = self.ui.as_mut() {
            let neg = ok(q.neg())?;
            col_sub(ui, s, t, &neg)?;
        }
        Ok(())
    }

    /// col t -= q · col s
    fn col_axpy(&mut self, t: usize, s: usize, q: &T) -> Res<()> {
        col_sub(&mut self.a, t, s, q)?;
        if let Some(v) = self.v.as_mut() {
            col_sub(v, t, s, q)?;
        }
        Ok(())
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = self.u.as_mut() {
            u.swap(i, j);
        }
        if let Some(ui) = self.ui.as_mut() {
            col_swap(ui, i, j);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        col_swap(&mut self.a, i, j);
        if let Some(v) = self.v.as_mut() {
            col_swap(v, i, j);
        }
    }

    fn row_neg(&mut self, i: usize) -> Res<()> {
        for x in self.a[i].iter_mut() {
            *x = ok(x.neg())?;
        }
        if let Some(u) = self.u.as_mut() {
            for x in u[i].iter_mut() {
                *x = ok(x.neg())?;
            }
        }
        if let Some(ui) = self.ui.as_mut() {
            for r in ui.iter_mut() {
                r[i] = ok(r[i].neg())?;
            }
        }
        Ok(())
    }

    /// Minimal |entry| in the trailing block, lowest row then column on ties.
    fn min_abs(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.m {
            for j in k..self.n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !x.abs_lt(&self.a[bi][bj]) => {}
                    _ => {
                        best = Some((i, j));
                        if x.is_unit() {
                            return best;
                        }
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) -> Res<Vec<T>> {
        let r = self.m.min(self.n);
        let mut k = 0;
        while k < r {
            let Some((pi, pj)) = self.min_abs(k) else { break };
            self.row_swap(k, pi);
            self.col_swap(k, pj);
            loop {
                let mut clean = true;
                for i in k + 1..self.m {
                    if !self.a[i][k].is_zero() {
                        let q = ok(self.a[i][k].div_trunc(&self.a[k][k]))?;
                        self.row_axpy(i, k, &q)?;
                        clean &= self.a[i][k].is_zero();
                    }
                }
                for j in k + 1..self.n {
                    if !self.a[k][j].is_zero() {
                        let q = ok(self.a[k][j].div_trunc(&self.a[k][k]))?;
                        self.col_axpy(j, k, &q)?;
                        clean &= self.a[k][j].is_zero();
                    }
                }
                if !clean {
                    let mut best: Option<(usize, usize)> = None;
                    let cands = (k + 1..self.m).map(|i| (i, k)).chain((k + 1..self.n).map(|j| (k, j)));
                    for (i, j) in cands {
                        let x = &self.a[i][j];
                        if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(&self.a[bi][bj])) {
                            best = Some((i, j));
                        }
                    }
                    let (bi, bj) = best.expect("remainder present");
                    self.row_swap(k, bi);
                    self.col_swap(k, bj);
                    continue;
                }
                let p = self.a[k][k].clone();
                let bad = (k + 1..self.m).find(|&i| {
                    (k + 1..self.n).any(|j| !self.a[i][j].is_zero() && !self.a[i][j].rem_euclid(&p).is_some_and(|x| x.is_zero()))
                });
                match bad {
                    Some(i) => self.row_axpy(k, i, &T::from_i64(-1))?,
                    None => break,
                }
            }
            if self.a[k][k].is_negative() {
                self.row_neg(k)?;
            }
            k += 1;
        }
        Ok((0..r).map(|i| self.a[i][i].clone()).collect())
    }
}

pub(crate) fn dense_snf<T: Scalar>(
    a: Vec<Vec<T>>,
    n: usize,
    want_u: bool,
    want_v: bool,
) -> Res<DenseSnf<T>> {
    let m = a.len();
    let mut w = Work {
        a,
        m,
        n,
        u: want_u.then(|| identity(m)),
        ui: want_u.then(|| identity(m)),
        v: want_v.then(|| identity(n)),
    };
    let d = w.run()?;
    Ok(DenseSnf { d, u: w.u, u_inv: w.ui, v: w.v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
        a.iter()
            .map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn transforms_are_consistent() {
        let a = vec![vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = dense_snf(a.clone(), 3, true, true).unwrap();
        assert_eq!(s.d, vec![2, 6, 12]);
        let (u, ui, v) = (s.u.unwrap(), s.u_inv.unwrap(), s.v.unwrap());
        let uav = matmul(&matmul(&u, &a, 3, 3), &v, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(uav[i][j], if i == j { s.d[i] } else { 0 });
            }
        }
        let id = matmul(&u, &ui, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(id[i][j], (i == j) as i64);
            }
        }
    }

    #[test]
    fn overflow_is_detected() {
        let big = i64::MAX / 2;
        let a = vec![vec![big, big - 1], vec![big - 1, big]];
        let r = dense_snf(a, 2, true, true);
        // either exact or an overflow signal, never a silent wrap
        if let Ok(s) = r {
            assert_eq!(s.d[0], 1);
        }
    }
}
