//! Bounded-variable revised primal simplex.
//!
//! The LP core under the branch-and-bound search. Works on an explicit dense
//! basis inverse with rank-1 pivot updates and a full refactorization every
//! 64 pivots for numerical hygiene. Infeasibility is handled by a hybrid
//! phase 1: each row starts with its slack basic when the crash residual fits
//! the slack's bounds, and an artificial column otherwise, so well-behaved
//! rows never pay for artificial bookkeeping.
//!
//! Nonbasic variables rest at either bound (or at zero when free); the ratio
//! test considers bound flips of the entering column as well as basic leavers.
//! Pricing is textbook Dantzig (most negative reduced cost, lowest index on
//! ties); after a long streak of degenerate pivots the pricing and ratio
//! tie-breaks switch to Bland's rule, which guarantees termination.

use crate::model::Sense;

/// Primal feasibility tolerance (absolute, scaled by the largest right-hand side).
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
pub const COST_TOL: f64 = 1e-9;
/// Smallest usable ratio-test denominator.
const PIVOT_TOL: f64 = 1e-9;
/// Tie window in the ratio test.
const RATIO_TIE: f64 = 1e-9;
/// Pivots between basis refactorizations.
const REFACTOR_EVERY: usize = 64;
/// Step sizes at or below this count as degenerate.
const DEGEN_EPS: f64 = 1e-10;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGEN_TRIP: usize = 256;
/// Singularity threshold for refactorization pivots.
const SINGULAR_TOL: f64 = 1e-11;

/// Terminal state of an LP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The basis became numerically unusable (singular refactorization or
    /// unrepairable drift).
    Numerical,
}

/// Result of an LP solve. `values` covers the structural columns only.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Computational form of an LP over structural columns.
///
/// `lower`/`upper` are the effective bounds (callers apply branching
/// overrides before building the form); rows are `sum(terms) sense rhs`.
pub struct LpForm<'a> {
    pub cols: &'a [Vec<(usize, f64)>],
    pub cost: &'a [f64],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub senses: &'a [Sense],
    pub rhs: &'a [f64],
}

/// Solve a bounded-variable LP to proven optimality.
pub fn solve_lp_form(form: &LpForm) -> LpSolution {
    Simplex::new(form).run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VStat {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

#[derive(Debug, Clone, Copy)]
enum Bound {
    Lower,
    Upper,
}

enum Step {
    Flip { t: f64 },
    Pivot { t: f64, row: usize, target: Bound },
    Unbounded,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
    Numerical,
}

struct Simplex<'a> {
    form: &'a LpForm<'a>,
    m: usize,
    n_struct: usize,
    /// Total columns: structural, then one slack per row, then artificials.
    n_total: usize,
    /// (row, sign) of each artificial column.
    art_info: Vec<(usize, f64)>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost2: Vec<f64>,
    xval: Vec<f64>,
    stat: Vec<VStat>,
    basis: Vec<usize>,
    /// Row-major m x m explicit basis inverse.
    binv: Vec<f64>,
    iterations: usize,
    iteration_limit: usize,
    pivots_since_refactor: usize,
    bland: bool,
    degen_streak: usize,
    rhs_scale: f64,
}

impl<'a> Simplex<'a> {
    fn new(form: &'a LpForm<'a>) -> Self {
        let m = form.rhs.len();
        let n_struct = form.cols.len();
        let rhs_scale = form
            .rhs
            .iter()
            .fold(1.0f64, |acc, r| acc.max(r.abs()));
        Simplex {
            form,
            m,
            n_struct,
            n_total: n_struct + m,
            art_info: Vec::new(),
            lo: Vec::new(),
            up: Vec::new(),
            cost2: Vec::new(),
            xval: Vec::new(),
            stat: Vec::new(),
            basis: vec![0; m],
            binv: vec![0.0; m * m],
            iterations: 0,
            iteration_limit: 10_000 + 20 * (m + n_struct),
            pivots_since_refactor: 0,
            bland: false,
            degen_streak: 0,
            rhs_scale,
        }
    }

    /// Entries of an extended column.
    fn for_each_entry(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n_struct {
            for &(r, v) in &self.form.cols[j] {
                f(r, v);
            }
        } else if j < self.n_struct + self.m {
            f(j - self.n_struct, 1.0);
        } else {
            let (r, s) = self.art_info[j - self.n_struct - self.m];
            f(r, s);
        }
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        self.for_each_entry(j, |r, v| acc += y[r] * v);
        acc
    }

    fn slack_bounds(sense: Sense) -> (f64, f64) {
        match sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
            Sense::Eq => (0.0, 0.0),
        }
    }

    /// Build the crash basis: structural columns at their nearest finite
    /// bound, each row's slack basic when the residual fits its bounds, an
    /// artificial column otherwise.
    fn crash(&mut self) {
        let m = self.m;
        let n = self.n_struct;
        self.lo = Vec::with_capacity(n + m);
        self.up = Vec::with_capacity(n + m);
        self.cost2 = Vec::with_capacity(n + m);
        self.xval = Vec::with_capacity(n + m);
        self.stat = Vec::with_capacity(n + m);

        for j in 0..n {
            let (l, u) = (self.form.lower[j], self.form.upper[j]);
            self.lo.push(l);
            self.up.push(u);
            self.cost2.push(self.form.cost[j]);
            if l.is_finite() {
                self.stat.push(VStat::AtLower);
                self.xval.push(l);
            } else if u.is_finite() {
                self.stat.push(VStat::AtUpper);
                self.xval.push(u);
            } else {
                self.stat.push(VStat::Free);
                self.xval.push(0.0);
            }
        }

        let mut residual: Vec<f64> = self.form.rhs.to_vec();
        for j in 0..n {
            let x = self.xval[j];
            if x != 0.0 {
                for &(r, v) in &self.form.cols[j] {
                    residual[r] -= v * x;
                }
            }
        }

        // All slack entries first so artificials land after index n + m,
        // where `for_each_entry` and the basis expect them.
        let feas = FEAS_TOL * self.rhs_scale;
        let mut needs_artificial: Vec<(usize, f64)> = Vec::new(); // (row, leftover)
        for r in 0..m {
            let (slo, sup) = Self::slack_bounds(self.form.senses[r]);
            self.lo.push(slo);
            self.up.push(sup);
            self.cost2.push(0.0);
            let res = residual[r];
            if res >= slo - feas && res <= sup + feas {
                self.stat.push(VStat::Basic);
                self.xval.push(res);
                self.basis[r] = n + r;
            } else {
                // Slack rests at the violated side; an artificial column
                // will carry the remaining residual with a +1 phase-1 cost.
                let v = res.clamp(slo, sup);
                self.stat.push(if v == slo { VStat::AtLower } else { VStat::AtUpper });
                self.xval.push(v);
                needs_artificial.push((r, res - v));
            }
        }
        for (r, leftover) in needs_artificial {
            let sign = if leftover >= 0.0 { 1.0 } else { -1.0 };
            let art = self.n_total;
            self.art_info.push((r, sign));
            self.lo.push(0.0);
            self.up.push(f64::INFINITY);
            self.cost2.push(0.0);
            self.stat.push(VStat::Basic);
            self.xval.push(leftover.abs());
            self.basis[r] = art;
            self.n_total += 1;
        }

        // The crash basis is diagonal: +1 for slacks, the sign for artificials.
        for r in 0..m {
            let b = self.basis[r];
            let diag = if b < n + m {
                1.0
            } else {
                self.art_info[b - n - m].1
            };
            self.binv[r * m + r] = diag;
        }
    }

    /// y = c_B B^-1.
    fn btran(&self, costs: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for k in 0..self.m {
            let c = costs[self.basis[k]];
            if c != 0.0 {
                let row = &self.binv[k * self.m..(k + 1) * self.m];
                for (yr, br) in y.iter_mut().zip(row) {
                    *yr += c * br;
                }
            }
        }
    }

    /// w = B^-1 a_j.
    fn ftran(&self, j: usize, w: &mut [f64]) {
        w.fill(0.0);
        self.for_each_entry(j, |r, v| {
            for k in 0..self.m {
                w[k] += self.binv[k * self.m + r] * v;
            }
        });
    }

    /// Reduced cost of a nonbasic column.
    fn reduced_cost(&self, j: usize, costs: &[f64], y: &[f64]) -> f64 {
        costs[j] - self.col_dot(j, y)
    }

    /// Entering column and its direction (+1 increase, -1 decrease), or
    /// `None` at optimality.
    fn price(&self, costs: &[f64], y: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None; // (col, dir, score)
        for j in 0..self.n_total {
            match self.stat[j] {
                VStat::Basic => continue,
                _ => {}
            }
            if self.lo[j] == self.up[j] {
                continue; // fixed: cannot move
            }
            let d = self.reduced_cost(j, costs, y);
            let cand = match self.stat[j] {
                VStat::AtLower if d < -COST_TOL => Some((1.0, -d)),
                VStat::AtUpper if d > COST_TOL => Some((-1.0, d)),
                VStat::Free if d < -COST_TOL => Some((1.0, -d)),
                VStat::Free if d > COST_TOL => Some((-1.0, d)),
                _ => None,
            };
            if let Some((dir, score)) = cand {
                if self.bland {
                    return Some((j, dir));
                }
                if best.map_or(true, |(_, _, s)| score > s) {
                    best = Some((j, dir, score));
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// How far the entering column can move before a basic variable (or its
    /// own opposite bound) blocks, and which event blocks first.
    fn ratio_test(&self, j: usize, dir: f64, w: &[f64]) -> Step {
        let mut t_best = self.up[j] - self.lo[j]; // may be +inf
        let mut leave: Option<(usize, Bound, f64)> = None; // (row, target, |pivot|)
        for (k, &v) in w.iter().enumerate() {
            if v.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[k];
            let delta = dir * v; // basic value moves by -delta * t
            let (limit, target) = if delta > 0.0 {
                if self.lo[b] == f64::NEG_INFINITY {
                    continue;
                }
                ((self.xval[b] - self.lo[b]) / delta, Bound::Lower)
            } else {
                if self.up[b] == f64::INFINITY {
                    continue;
                }
                ((self.up[b] - self.xval[b]) / (-delta), Bound::Upper)
            };
            let limit = limit.max(0.0);
            match &leave {
                _ if limit < t_best - RATIO_TIE => {
                    t_best = limit;
                    leave = Some((k, target, v.abs()));
                }
                Some((kk, _, piv)) if (limit - t_best).abs() <= RATIO_TIE => {
                    // Tie among basic leavers: prefer the sturdier pivot;
                    // under Bland's rule, the lowest variable index.
                    let replace = if self.bland {
                        self.basis[k] < self.basis[*kk]
                    } else {
                        v.abs() > *piv
                    };
                    if replace {
                        leave = Some((k, target, v.abs()));
                    }
                }
                _ => {}
            }
        }
        if t_best.is_infinite() {
            return Step::Unbounded;
        }
        // A basic leaver only displaces the bound flip when strictly shorter,
        // so ties go to the flip: flips skip the basis update and are never
        // degenerate.
        match leave {
            Some((row, target, _)) => Step::Pivot { t: t_best, row, target },
            None => Step::Flip { t: t_best },
        }
    }

    fn apply_flip(&mut self, j: usize, dir: f64, t: f64, w: &[f64]) {
        for (k, &v) in w.iter().enumerate() {
            if v != 0.0 {
                self.xval[self.basis[k]] -= dir * t * v;
            }
        }
        // Snap exactly onto the opposite bound.
        if dir > 0.0 {
            self.xval[j] = self.up[j];
            self.stat[j] = VStat::AtUpper;
        } else {
            self.xval[j] = self.lo[j];
            self.stat[j] = VStat::AtLower;
        }
        self.degen_streak = 0;
    }

    fn apply_pivot(&mut self, j: usize, dir: f64, t: f64, row: usize, target: Bound, w: &[f64]) {
        let m = self.m;
        let entering_value = self.xval[j] + dir * t;
        for (k, &v) in w.iter().enumerate() {
            if k != row && v != 0.0 {
                self.xval[self.basis[k]] -= dir * t * v;
            }
        }
        let leaving = self.basis[row];
        match target {
            Bound::Lower => {
                self.xval[leaving] = self.lo[leaving];
                self.stat[leaving] = VStat::AtLower;
            }
            Bound::Upper => {
                self.xval[leaving] = self.up[leaving];
                self.stat[leaving] = VStat::AtUpper;
            }
        }

        // Rank-1 update of the explicit inverse.
        let piv = w[row];
        let inv_piv = 1.0 / piv;
        for c in 0..m {
            self.binv[row * m + c] *= inv_piv;
        }
        for k in 0..m {
            if k == row {
                continue;
            }
            let f = w[k];
            if f != 0.0 {
                let (head, tail) = self.binv.split_at_mut(row.max(k) * m);
                let (row_k, row_r) = if k < row {
                    (&mut head[k * m..k * m + m], &tail[..m])
                } else {
                    (&mut tail[..m], &head[row * m..row * m + m])
                };
                for (rk, rr) in row_k.iter_mut().zip(row_r) {
                    *rk -= f * *rr;
                }
            }
        }

        self.basis[row] = j;
        self.stat[j] = VStat::Basic;
        self.xval[j] = entering_value;
        self.pivots_since_refactor += 1;
        if t <= DEGEN_EPS {
            self.degen_streak += 1;
            if self.degen_streak >= DEGEN_TRIP {
                self.bland = true;
            }
        } else {
            self.degen_streak = 0;
        }
    }

    /// Rebuild the explicit inverse from scratch and recompute basic values.
    fn refactorize(&mut self) -> Result<(), ()> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (k, &b) in self.basis.iter().enumerate() {
            self.for_each_entry(b, |r, v| a[r * m + k] = v);
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for col in 0..m {
            let mut p = col;
            let mut best = a[col * m + col].abs();
            for r in col + 1..m {
                let mag = a[r * m + col].abs();
                if mag > best {
                    best = mag;
                    p = r;
                }
            }
            if best < SINGULAR_TOL {
                return Err(());
            }
            if p != col {
                for c in 0..m {
                    a.swap(p * m + c, col * m + c);
                    inv.swap(p * m + c, col * m + c);
                }
            }
            let f = 1.0 / a[col * m + col];
            for c in 0..m {
                a[col * m + c] *= f;
                inv[col * m + c] *= f;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let g = a[r * m + col];
                if g != 0.0 {
                    for c in 0..m {
                        a[r * m + c] -= g * a[col * m + c];
                        inv[r * m + c] -= g * inv[col * m + c];
                    }
                }
            }
        }
        self.binv = inv;
        self.recompute_basics();
        self.pivots_since_refactor = 0;
        Ok(())
    }

    /// x_B = B^-1 (rhs - N x_N), refreshing drifted basic values.
    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut residual: Vec<f64> = self.form.rhs.to_vec();
        for j in 0..self.n_total {
            if self.stat[j] != VStat::Basic && self.xval[j] != 0.0 {
                let x = self.xval[j];
                self.for_each_entry(j, |r, v| residual[r] -= v * x);
            }
        }
        for k in 0..m {
            let mut acc = 0.0;
            let row = &self.binv[k * m..(k + 1) * m];
            for (br, rr) in row.iter().zip(&residual) {
                acc += br * rr;
            }
            self.xval[self.basis[k]] = acc;
        }
    }

    fn optimize(&mut self, costs: &[f64]) -> PhaseEnd {
        let mut y = vec![0.0; self.m];
        let mut w = vec![0.0; self.m];
        loop {
            if self.iterations >= self.iteration_limit {
                return PhaseEnd::IterationLimit;
            }
            if self.pivots_since_refactor >= REFACTOR_EVERY && self.refactorize().is_err() {
                return PhaseEnd::Numerical;
            }
            self.btran(costs, &mut y);
            let (j, dir) = match self.price(costs, &y) {
                Some(e) => e,
                None => return PhaseEnd::Optimal,
            };
            self.ftran(j, &mut w);
            self.iterations += 1;
            match self.ratio_test(j, dir, &w) {
                Step::Unbounded => return PhaseEnd::Unbounded,
                Step::Flip { t } => self.apply_flip(j, dir, t, &w),
                Step::Pivot { t, row, target } => self.apply_pivot(j, dir, t, row, target, &w),
            }
        }
    }

    /// Worst bound or row violation, for the final feasibility audit.
    fn primal_infeasibility(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.n_total {
            let x = self.xval[j];
            worst = worst.max(self.lo[j] - x).max(x - self.up[j]);
        }
        let mut residual: Vec<f64> = self.form.rhs.to_vec();
        for j in 0..self.n_total {
            let x = self.xval[j];
            if x != 0.0 {
                self.for_each_entry(j, |r, v| residual[r] -= v * x);
            }
        }
        for r in residual {
            worst = worst.max(r.abs());
        }
        worst
    }

    fn run(mut self) -> LpSolution {
        self.crash();
        let feas = FEAS_TOL * self.rhs_scale;

        if !self.art_info.is_empty() {
            let mut cost1 = vec![0.0; self.n_total];
            for a in 0..self.art_info.len() {
                cost1[self.n_struct + self.m + a] = 1.0;
            }
            let end = self.optimize(&cost1);
            match end {
                PhaseEnd::Optimal => {}
                PhaseEnd::IterationLimit => return self.finish(LpStatus::IterationLimit),
                // Phase 1 minimizes a sum of nonnegative columns: it cannot
                // be unbounded unless the basis has broken down.
                PhaseEnd::Unbounded | PhaseEnd::Numerical => {
                    return self.finish(LpStatus::Numerical)
                }
            }
            let art_sum: f64 = (0..self.art_info.len())
                .map(|a| self.xval[self.n_struct + self.m + a])
                .sum();
            if art_sum > feas {
                return self.finish(LpStatus::Infeasible);
            }
            // Pin the artificials to zero for phase 2; basic ones linger at
            // (numerical) zero and leave through ordinary degenerate pivots.
            for a in 0..self.art_info.len() {
                let j = self.n_struct + self.m + a;
                self.up[j] = 0.0;
                if self.stat[j] != VStat::Basic {
                    self.stat[j] = VStat::AtLower;
                    self.xval[j] = 0.0;
                }
            }
            self.bland = false;
            self.degen_streak = 0;
        }

        let cost2 = std::mem::take(&mut self.cost2);
        let end = self.optimize(&cost2);
        self.cost2 = cost2;
        let status = match end {
            PhaseEnd::Optimal => LpStatus::Optimal,
            PhaseEnd::Unbounded => LpStatus::Unbounded,
            PhaseEnd::IterationLimit => LpStatus::IterationLimit,
            PhaseEnd::Numerical => LpStatus::Numerical,
        };
        if status == LpStatus::Optimal {
            // Final audit; one repair attempt through a fresh factorization.
            if self.primal_infeasibility() > feas.max(1e-6)
                && (self.refactorize().is_err() || self.primal_infeasibility() > feas.max(1e-6))
            {
                return self.finish(LpStatus::Numerical);
            }
        }
        self.finish(status)
    }

    fn finish(self, status: LpStatus) -> LpSolution {
        let objective = self
            .form
            .cost
            .iter()
            .zip(&self.xval)
            .map(|(c, x)| c * x)
            .sum();
        LpSolution {
            status,
            values: self.xval[..self.n_struct].to_vec(),
            objective,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;

    fn solve(
        cols: Vec<Vec<(usize, f64)>>,
        cost: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        senses: Vec<Sense>,
        rhs: Vec<f64>,
    ) -> LpSolution {
        solve_lp_form(&LpForm {
            cols: &cols,
            cost: &cost,
            lower: &lower,
            upper: &upper,
            senses: &senses,
            rhs: &rhs,
        })
    }

    #[test]
    fn maximizes_single_variable_against_upper_bound() {
        // min -x s.t. x <= 1 (row), 0 <= x <= 10.
        let sol = solve(
            vec![vec![(0, 1.0)]],
            vec![-1.0],
            vec![0.0],
            vec![10.0],
            vec![Sense::Le],
            vec![1.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9);
        assert!((sol.values[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bound_flip_without_any_row() {
        // min -x with 0 <= x <= 3 and a vacuous row 0 <= 5.
        let sol = solve(
            vec![vec![]],
            vec![-1.0],
            vec![0.0],
            vec![3.0],
            vec![Sense::Le],
            vec![5.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_equalities() {
        // x = 1 and x = 2 cannot both hold.
        let sol = solve(
            vec![vec![(0, 1.0), (1, 1.0)]],
            vec![0.0],
            vec![0.0],
            vec![10.0],
            vec![Sense::Eq, Sense::Eq],
            vec![1.0, 2.0],
        );
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded_direction() {
        // min -x, x >= 0 free above, row x >= 1.
        let sol = solve(
            vec![vec![(0, 1.0)]],
            vec![-1.0],
            vec![0.0],
            vec![f64::INFINITY],
            vec![Sense::Ge],
            vec![1.0],
        );
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_reaches_negative_optimum() {
        // min x with x free and x >= -7.5.
        let sol = solve(
            vec![vec![(0, 1.0)]],
            vec![1.0],
            vec![f64::NEG_INFINITY],
            vec![f64::INFINITY],
            vec![Sense::Ge],
            vec![-7.5],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] + 7.5).abs() < 1e-9);
    }

    #[test]
    fn two_variable_diet_style_program() {
        // min 2a + 3b s.t. a + b >= 4, a - b <= 1, 0 <= a,b <= 10.
        // Optimum: b = 1.5, a = 2.5 -> 9.5.
        let sol = solve(
            vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 1.0), (1, -1.0)]],
            vec![2.0, 3.0],
            vec![0.0, 0.0],
            vec![10.0, 10.0],
            vec![Sense::Ge, Sense::Le],
            vec![4.0, 1.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 9.5).abs() < 1e-7, "objective {}", sol.objective);
    }

    #[test]
    fn equality_network_with_negative_slack_side() {
        // Flow conservation with a Ge row forcing an artificial start.
        // min x1 + 2 x2 s.t. x1 + x2 = 5, x1 - x2 >= -3 -> x2 <= 4 ->
        // best: x2 = 4, x1 = 1 is worse than x1 = 5? cost(5,0) = 5,
        // check row2: 5 - 0 = 5 >= -3 ok -> optimum 5.
        let sol = solve(
            vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 1.0), (1, -1.0)]],
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
            vec![Sense::Eq, Sense::Ge],
            vec![5.0, -3.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-7);
        assert!((sol.values[0] - 5.0).abs() < 1e-7);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's classic cycling LP (degenerate at the origin). Dantzig
        // pricing with naive ties cycles forever; the degeneracy trip into
        // Bland's rule must terminate at the optimum -0.05.
        let cols = vec![
            vec![(0, 0.25), (1, 0.5)],
            vec![(0, -60.0), (1, -90.0)],
            vec![(0, -0.04), (1, -0.02), (2, 1.0)],
            vec![(0, 9.0), (1, 3.0)],
        ];
        let sol = solve(
            cols,
            vec![-0.75, 150.0, -0.02, 6.0],
            vec![0.0; 4],
            vec![f64::INFINITY; 4],
            vec![Sense::Le, Sense::Le, Sense::Le],
            vec![0.0, 0.0, 1.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-9, "objective {}", sol.objective);
    }

    #[test]
    fn honors_upper_bounds_without_explicit_rows() {
        // min -(x+y) with x <= 2, y <= 3 purely via bounds; one joint row.
        let sol = solve(
            vec![vec![(0, 1.0)], vec![(0, 1.0)]],
            vec![-1.0, -1.0],
            vec![0.0, 0.0],
            vec![2.0, 3.0],
            vec![Sense::Le],
            vec![4.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 4.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_rhs_zero_rows_solve_cleanly() {
        // Multiple zero-rhs rows force degenerate pivots.
        let cols = vec![
            vec![(0, 1.0), (1, 1.0), (2, 1.0)],
            vec![(0, -1.0), (1, 1.0)],
            vec![(1, -1.0), (2, 1.0)],
        ];
        let sol = solve(
            cols,
            vec![1.0, 1.0, 1.0],
            vec![0.0; 3],
            vec![f64::INFINITY; 3],
            vec![Sense::Eq, Sense::Eq, Sense::Ge],
            vec![0.0, 0.0, 0.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() < 1e-9);
    }
}
