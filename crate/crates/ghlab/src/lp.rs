//! Dictionary-form simplex with Bland's rule, generic over the scalar backend.
//!
//! Two entry points: [`maximize_free`] for `max cᵀx, Ax ≤ b (b ≥ 0), x free`,
//! and [`maximize_standard`] for `max cᵀx, Ax = b, x ≥ 0` via two phases.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, x: Vec<S> },
    Unbounded,
    Infeasible,
}

/// `x_B = rhs − rows·x_N`, `z = z0 + obj·x_N`.
struct Dictionary<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    obj: Vec<S>,
    z0: S,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    free: Vec<bool>,
    flipped: Vec<bool>,
}

impl<S: Scalar> Dictionary<S> {
    fn pivot(&mut self, i: usize, j: usize) {
        let a = self.rows[i][j].clone();
        let inv = S::one() / a;
        let n = self.nonbasic.len();
        for k in 0..n {
            if k != j {
                let v = self.rows[i][k].clone() * inv.clone();
                self.rows[i][k] = v;
            }
        }
        self.rows[i][j] = inv.clone();
        self.rhs[i] = self.rhs[i].clone() * inv;
        let pivot_row = self.rows[i].clone();
        let pivot_rhs = self.rhs[i].clone();
        for r in 0..self.rows.len() {
            if r == i {
                continue;
            }
            let f = self.rows[r][j].clone();
            if f.is_zero() && S::EXACT {
                continue;
            }
            let row = &mut self.rows[r];
            for k in 0..n {
                if k != j && !pivot_row[k].is_zero() {
                    row[k] = row[k].clone() - f.clone() * pivot_row[k].clone();
                }
            }
            row[j] = -(f.clone() * pivot_row[j].clone());
            self.rhs[r] = self.rhs[r].clone() - f * pivot_rhs.clone();
        }
        let f = self.obj[j].clone();
        for k in 0..n {
            if k != j && !pivot_row[k].is_zero() {
                self.obj[k] = self.obj[k].clone() - f.clone() * pivot_row[k].clone();
            }
        }
        self.obj[j] = -(f.clone() * pivot_row[j].clone());
        self.z0 = self.z0.clone() + f * pivot_rhs;
        std::mem::swap(&mut self.basic[i], &mut self.nonbasic[j]);
    }

    fn flip(&mut self, j: usize) {
        for row in &mut self.rows {
            row[j] = -row[j].clone();
        }
        self.obj[j] = -self.obj[j].clone();
        let v = self.nonbasic[j];
        self.flipped[v] = !self.flipped[v];
    }

    /// Runs to optimality; returns false if unbounded.
    fn solve(&mut self) -> Result<bool> {
        let zero = S::zero();
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            if iterations > 200_000 {
                return Err(Error::Lp("iteration limit".into()));
            }
            // free variables enter first; then Bland's rule by variable id
            let mut entering: Option<usize> = None;
            for j in 0..self.nonbasic.len() {
                let v = self.nonbasic[j];
                if self.free[v] && !self.obj[j].is_zero() {
                    if self.obj[j] < zero {
                        self.flip(j);
                    }
                    entering = Some(j);
                    break;
                }
            }
            if entering.is_none() {
                entering = (0..self.nonbasic.len()).filter(|&j| zero.less(&self.obj[j])).min_by_key(|&j| self.nonbasic[j]);
            }
            let Some(j) = entering else { return Ok(true) };
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.rows.len() {
                if self.free[self.basic[r]] || !zero.less(&self.rows[r][j]) {
                    continue;
                }
                let ratio = self.rhs[r].clone() / self.rows[r][j].clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio.approx_eq(best) && self.basic[r] < self.basic[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((i, _)) = leave else { return Ok(false) };
            self.pivot(i, j);
        }
    }

    fn values(&self, nvars: usize) -> Vec<S> {
        let mut x = vec![S::zero(); nvars];
        for (r, &v) in self.basic.iter().enumerate() {
            if v < nvars {
                x[v] = self.rhs[r].clone();
            }
        }
        for (v, xv) in x.iter_mut().enumerate() {
            if self.flipped.get(v).copied().unwrap_or(false) {
                *xv = -xv.clone();
            }
        }
        x
    }
}

/// `max cᵀx` subject to `A x ≤ b` with `b ≥ 0` and `x` free.
pub fn maximize_free<S: Scalar>(c: &[S], a: &[Vec<S>], b: &[S]) -> Result<LpOutcome<S>> {
    let n = c.len();
    let m = a.len();
    if b.iter().any(|v| v.less(&S::zero())) {
        return Err(Error::Lp("right-hand side must be nonnegative".into()));
    }
    let mut free = vec![true; n];
    free.extend(std::iter::repeat_n(false, m));
    let mut d = Dictionary {
        rows: a.to_vec(),
        rhs: b.to_vec(),
        obj: c.to_vec(),
        z0: S::zero(),
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
        free,
        flipped: vec![false; n + m],
    };
    if !d.solve()? {
        return Ok(LpOutcome::Unbounded);
    }
    // a free variable left nonbasic has zero reduced cost; it stays at 0
    Ok(LpOutcome::Optimal { value: d.z0.clone(), x: d.values(n) })
}

/// `max cᵀx` subject to `A x = b`, `x ≥ 0`.
pub fn maximize_standard<S: Scalar>(c: &[S], a: &[Vec<S>], b: &[S]) -> Result<LpOutcome<S>> {
    let n = c.len();
    let m = a.len();
    // make b ≥ 0
    let mut rows = a.to_vec();
    let mut rhs = b.to_vec();
    for i in 0..m {
        if rhs[i] < S::zero() {
            rhs[i] = -rhs[i].clone();
            for v in &mut rows[i] {
                *v = -v.clone();
            }
        }
    }
    // phase 1: artificial basis n..n+m, maximize −Σ artificials
    let mut obj = vec![S::zero(); n];
    for row in &rows {
        for (o, v) in obj.iter_mut().zip(row) {
            *o = o.clone() + v.clone();
        }
    }
    let z0 = rhs.iter().cloned().fold(S::zero(), |acc, v| acc - v);
    let mut d = Dictionary {
        rows,
        rhs,
        obj,
        z0,
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
        free: vec![false; n + m],
        flipped: vec![false; n + m],
    };
    if !d.solve()? {
        return Err(Error::Lp("phase one unbounded".into()));
    }
    if d.z0.less(&S::zero()) {
        return Ok(LpOutcome::Infeasible);
    }
    // move zero-level artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < d.basic.len() {
        if d.basic[r] >= n {
            let col = (0..d.nonbasic.len()).find(|&j| d.nonbasic[j] < n && !d.rows[r][j].is_zero());
            match col {
                Some(j) => d.pivot(r, j),
                None => {
                    d.rows.remove(r);
                    d.rhs.remove(r);
                    d.basic.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    let keep: Vec<usize> = (0..d.nonbasic.len()).filter(|&j| d.nonbasic[j] < n).collect();
    d.nonbasic = keep.iter().map(|&j| d.nonbasic[j]).collect();
    for row in &mut d.rows {
        *row = keep.iter().map(|&j| row[j].clone()).collect();
    }
    // phase 2 objective in terms of the nonbasic variables
    let mut z0 = S::zero();
    let mut obj: Vec<S> = d.nonbasic.iter().map(|&v| c[v].clone()).collect();
    for (r, &bv) in d.basic.iter().enumerate() {
        let cb = &c[bv];
        if cb.is_zero() {
            continue;
        }
        z0 = z0 + cb.clone() * d.rhs[r].clone();
        for (o, a) in obj.iter_mut().zip(&d.rows[r]) {
            *o = o.clone() - cb.clone() * a.clone();
        }
    }
    d.obj = obj;
    d.z0 = z0;
    if !d.solve()? {
        return Ok(LpOutcome::Unbounded);
    }
    Ok(LpOutcome::Optimal { value: d.z0.clone(), x: d.values(n) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn z(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn free_lp_small() {
        // max x + y, x ≤ 1, y ≤ 2, x + y ≤ 5/2, −x ≤ 3
        let a = vec![vec![z(1), z(0)], vec![z(0), z(1)], vec![z(1), z(1)], vec![z(-1), z(0)]];
        let b = vec![z(1), z(2), Q::new(5, 2), z(3)];
        let LpOutcome::Optimal { value, x } = maximize_free(&[z(1), z(1)], &a, &b).unwrap() else { panic!() };
        assert_eq!(value, Q::new(5, 2));
        assert!(x[0].clone() + x[1].clone() == Q::new(5, 2));
    }

    #[test]
    fn free_lp_negative_direction() {
        // max −x, x ≥ −4 (i.e. −x ≤ 4)
        let LpOutcome::Optimal { value, x } = maximize_free(&[z(-1)], &[vec![z(-1)]], &[z(4)]).unwrap() else { panic!() };
        assert_eq!(value, z(4));
        assert_eq!(x, vec![z(-4)]);
        assert_eq!(maximize_free(&[z(1)], &[vec![z(-1)]], &[z(4)]).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn standard_lp_transport() {
        // 2x2 transport, costs [[0,1],[1,0]], supply (1,0), demand (1/2,1/2)
        let cost = [z(0), z(1), z(1), z(0)];
        let c: Vec<Q> = cost.iter().map(|v| -v.clone()).collect();
        let a =
            vec![vec![z(1), z(1), z(0), z(0)], vec![z(0), z(0), z(1), z(1)], vec![z(1), z(0), z(1), z(0)], vec![z(0), z(1), z(0), z(1)]];
        let b = vec![z(1), z(0), Q::new(1, 2), Q::new(1, 2)];
        let LpOutcome::Optimal { value, .. } = maximize_standard(&c, &a, &b).unwrap() else { panic!() };
        assert_eq!(value, Q::new(-1, 2));
    }

    #[test]
    fn standard_lp_infeasible() {
        let a = vec![vec![z(1), z(1)]];
        assert_eq!(maximize_standard(&[z(0), z(0)], &a, &[z(-1)]).unwrap(), LpOutcome::Infeasible);
    }
}
