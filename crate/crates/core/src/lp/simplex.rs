//! Dense exact simplex on `min c^T z` subject to rows `a^T z <= b`, `z >= 0`.
//!
//! Every row gets its own slack column. Rows added after a solve are brought
//! into the current basis and repaired with the dual simplex, so a cutting
//! plane loop never restarts from scratch. Both primal and dual pivots use
//! the smallest-subscript rule, which rules out cycling.

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplexError {
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct Tableau {
    nstruct: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    value: Rational,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 1_000_000;

impl Tableau {
    pub fn new(costs: Vec<Rational>) -> Self {
        Tableau {
            nstruct: costs.len(),
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            reduced: costs,
            value: Rational::zero(),
            pivots: 0,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn ncols(&self) -> usize {
        self.reduced.len()
    }

    /// Append `sum coeffs <= rhs`, expressed in the current basis.
    pub fn add_row(&mut self, coeffs: &[(usize, Rational)], rhs: Rational) {
        for row in &mut self.rows {
            row.push(Rational::zero());
        }
        self.reduced.push(Rational::zero());
        let ncols = self.ncols();
        let mut row = vec![Rational::zero(); ncols];
        for (j, a) in coeffs {
            assert!(*j < self.nstruct, "column {j} out of range");
            row[*j] += a;
        }
        row[ncols - 1] = Rational::one();
        let mut b = rhs;
        for i in 0..self.rows.len() {
            let k = self.basis[i];
            if row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for (c, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    row[c] -= &(&f * a);
                }
            }
            b -= &(&f * &self.rhs[i]);
        }
        self.rows.push(row);
        self.rhs.push(b);
        self.basis.push(ncols - 1);
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.pivots += 1;
        let p = self.rows[r][j].clone();
        if !p.is_one() {
            let inv = p.recip();
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = &*a * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let support: Vec<usize> = (0..self.ncols()).filter(|&c| !self.rows[r][c].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][j].is_zero() {
                continue;
            }
            let f = self.rows[i][j].clone();
            for &c in &support {
                let d = &f * &prow[c];
                self.rows[i][c] -= &d;
            }
            self.rhs[i] -= &(&f * &prhs);
        }
        if !self.reduced[j].is_zero() {
            let f = self.reduced[j].clone();
            for &c in &support {
                let d = &f * &prow[c];
                self.reduced[c] -= &d;
            }
            self.value += &(&f * &prhs);
        }
        self.rows[r] = prow;
        self.basis[r] = j;
    }

    /// Primal simplex from a primal-feasible basis.
    fn primal(&mut self) -> Result<(), SimplexError> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(SimplexError::IterationLimit);
            }
            let Some(j) = (0..self.ncols()).find(|&c| self.reduced[c].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let (r, _) = best.ok_or(SimplexError::Unbounded)?;
            self.pivot(r, j);
        }
    }

    /// Dual simplex from a dual-feasible basis.
    fn dual(&mut self) -> Result<(), SimplexError> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(SimplexError::IterationLimit);
            }
            let leaving = (0..self.rows.len())
                .filter(|&i| self.rhs[i].is_negative())
                .min_by_key(|&i| self.basis[i]);
            let Some(r) = leaving else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for j in 0..self.ncols() {
                let a = &self.rows[r][j];
                if !a.is_negative() {
                    continue;
                }
                let ratio = &self.reduced[j] / &(-a);
                if best.as_ref().is_none_or(|(_, br)| ratio < *br) {
                    best = Some((j, ratio));
                }
            }
            let (j, _) = best.ok_or(SimplexError::Infeasible)?;
            self.pivot(r, j);
        }
    }

    /// Reoptimize after rows were added. Assumes all initial right-hand
    /// sides were nonnegative.
    pub fn solve(&mut self) -> Result<(), SimplexError> {
        if self.reduced.iter().any(|d| d.is_negative()) {
            if self.rhs.iter().any(|b| b.is_negative()) {
                // Neither primal nor dual feasible; cannot happen in the
                // cutting plane loop, which only adds rows after an optimum.
                return Err(SimplexError::Infeasible);
            }
            self.primal()?;
        }
        self.dual()?;
        debug_assert!(self.is_optimal());
        Ok(())
    }

    pub fn is_optimal(&self) -> bool {
        self.reduced.iter().all(|d| !d.is_negative()) && self.rhs.iter().all(|b| !b.is_negative())
    }

    /// Objective value of the current basis.
    pub fn value(&self) -> &Rational {
        &self.value
    }

    /// Values of the structural variables.
    pub fn solution(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.nstruct];
        for (i, &k) in self.basis.iter().enumerate() {
            if k < self.nstruct {
                z[k] = self.rhs[i].clone();
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut t = Tableau::new(vec![q(-1), q(-1)]);
        t.add_row(&[(0, q(1)), (1, q(2))], q(4));
        t.add_row(&[(0, q(3)), (1, q(1))], q(6));
        t.solve().unwrap();
        assert_eq!(t.solution(), vec![Rational::new(8, 5), Rational::new(6, 5)]);
        assert_eq!(t.value(), &Rational::new(-14, 5));
        // cut x <= 1 and reoptimize with the dual simplex
        t.add_row(&[(0, q(1))], q(1));
        t.solve().unwrap();
        assert_eq!(t.solution(), vec![q(1), Rational::new(3, 2)]);
        assert_eq!(t.value(), &Rational::new(-5, 2));
    }

    #[test]
    fn unbounded() {
        let mut t = Tableau::new(vec![q(-1), q(0)]);
        t.add_row(&[(1, q(1))], q(1));
        assert_eq!(t.solve(), Err(SimplexError::Unbounded));
    }
}
