//! Exact two-phase simplex over rationals.
//!
//! Constraints are `<normal, x> <= bound` with free variables. Bland's
//! rule is used for both entering and leaving choices, so the solver
//! terminates under any degeneracy. Infeasibility comes with a verified
//! Farkas certificate.

use crate::scalar::{dot, Scalar};
use crate::{Error, Result};

use super::Polytope;

/// One inequality `<normal, x> <= bound`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub normal: Vec<Scalar>,
    pub bound: Scalar,
}

impl Constraint {
    pub fn new(normal: Vec<Scalar>, bound: Scalar) -> Self {
        Constraint { normal, bound }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// An optimal basic solution together with the objective value.
    Optimal { point: Vec<Scalar>, value: Scalar },
    Unbounded,
    /// `farkas[i] >= 0` with `sum_i farkas[i] * normal_i = 0` and
    /// `sum_i farkas[i] * bound_i < 0`.
    Infeasible { farkas: Vec<Scalar> },
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
    basis: Vec<usize>,
    cost: Vec<Scalar>,
    /// Objective value of the current basis equals `-cost_rhs`.
    cost_rhs: Scalar,
}

impl Tableau {
    fn pivot(&mut self, pr: usize, pc: usize) {
        let piv = self.rows[pr][pc].clone();
        debug_assert!(!piv.is_zero());
        let inv = piv.recip();
        for x in self.rows[pr].iter_mut() {
            *x = &*x * &inv;
        }
        self.rhs[pr] = &self.rhs[pr] * &inv;
        for i in 0..self.rows.len() {
            if i == pr {
                continue;
            }
            let factor = self.rows[i][pc].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                let delta = &factor * &self.rows[pr][j];
                let cur = std::mem::take(&mut self.rows[i][j]);
                self.rows[i][j] = cur - delta;
            }
            let delta = &factor * &self.rhs[pr];
            let cur = std::mem::take(&mut self.rhs[i]);
            self.rhs[i] = cur - delta;
        }
        let factor = self.cost[pc].clone();
        if !factor.is_zero() {
            for j in 0..self.ncols {
                let delta = &factor * &self.rows[pr][j];
                let cur = std::mem::take(&mut self.cost[j]);
                self.cost[j] = cur - delta;
            }
            let delta = &factor * &self.rhs[pr];
            let cur = std::mem::take(&mut self.cost_rhs);
            self.cost_rhs = cur - delta;
        }
        self.basis[pr] = pc;
    }

    /// Minimizes over columns `0..limit` with Bland's rule.
    /// Returns false if the problem is unbounded below.
    fn run(&mut self, limit: usize) -> bool {
        loop {
            let Some(pc) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut pick: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][pc].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][pc];
                    let better = match &pick {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        pick = Some((i, ratio));
                    }
                }
            }
            match pick {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return false,
            }
        }
    }

    fn objective_value(&self) -> Scalar {
        -self.cost_rhs.clone()
    }

    /// Recomputes the reduced-cost row for the given column costs.
    fn reset_cost(&mut self, costs: &[Scalar]) {
        let mut cost = costs.to_vec();
        cost.resize(self.ncols, Scalar::zero());
        let mut cost_rhs = Scalar::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs.get(b).cloned().unwrap_or_else(Scalar::zero);
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                let delta = &cb * &self.rows[i][j];
                let cur = std::mem::take(&mut cost[j]);
                cost[j] = cur - delta;
            }
            cost_rhs = cost_rhs - &cb * &self.rhs[i];
        }
        self.cost = cost;
        self.cost_rhs = cost_rhs;
    }
}

/// Solves `max/min <objective, x>` subject to `<normal_i, x> <= bound_i`
/// over free variables.
///
/// Dispatches between a primal dense tableau and (for many rows over few
/// variables) a dual-form solve whose tableau stays `(d+1) x m`.
pub fn solve_lp(constraints: &[Constraint], objective: &[Scalar], maximize: bool) -> LpOutcome {
    let d = objective.len();
    let m = constraints.len();
    if m >= 4 * d.max(4) {
        return solve_lp_dual(constraints, objective, maximize);
    }
    solve_lp_primal(constraints, objective, maximize)
}

fn solve_lp_primal(
    constraints: &[Constraint],
    objective: &[Scalar],
    maximize: bool,
) -> LpOutcome {
    let d = objective.len();
    let m = constraints.len();
    for c in constraints {
        assert_eq!(c.normal.len(), d, "constraint arity mismatch");
    }

    // Columns: u (d) | v (d) | slack (m) | artificial (k).
    let art_rows: Vec<usize> = (0..m)
        .filter(|&i| constraints[i].bound.is_negative())
        .collect();
    let k = art_rows.len();
    let ncols = 2 * d + m + k;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_index = 0usize;
    for (i, c) in constraints.iter().enumerate() {
        let neg = c.bound.is_negative();
        let sigma = if neg { Scalar::from_int(-1) } else { Scalar::one() };
        let mut row = vec![Scalar::zero(); ncols];
        for (j, w) in c.normal.iter().enumerate() {
            row[j] = &sigma * w;
            row[d + j] = -(&sigma * w);
        }
        row[2 * d + i] = sigma.clone();
        if neg {
            row[2 * d + m + art_index] = Scalar::one();
            basis.push(2 * d + m + art_index);
            art_index += 1;
        } else {
            basis.push(2 * d + i);
        }
        rows.push(row);
        rhs.push(&sigma * &c.bound);
    }

    let mut t = Tableau {
        ncols,
        rows,
        rhs,
        basis,
        cost: vec![Scalar::zero(); ncols],
        cost_rhs: Scalar::zero(),
    };

    // Phase I: minimize the sum of artificials.
    if k > 0 {
        let mut phase1 = vec![Scalar::zero(); ncols];
        for j in 0..k {
            phase1[2 * d + m + j] = Scalar::one();
        }
        t.reset_cost(&phase1);
        let bounded = t.run(ncols);
        debug_assert!(bounded, "phase I cannot be unbounded");
        if t.objective_value().is_positive() {
            // Farkas multipliers are the final reduced costs of the slacks.
            let farkas: Vec<Scalar> = (0..m).map(|i| t.cost[2 * d + i].clone()).collect();
            debug_assert!(verify_farkas(constraints, &farkas));
            return LpOutcome::Infeasible { farkas };
        }
        // Drive remaining artificials out of the basis.
        for r in 0..t.rows.len() {
            if t.basis[r] >= 2 * d + m {
                debug_assert!(t.rhs[r].is_zero());
                if let Some(pc) = (0..2 * d + m).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, pc);
                }
            }
        }
        // Any row still basic in an artificial is identically zero; drop it.
        let keep: Vec<usize> = (0..t.rows.len()).filter(|&r| t.basis[r] < 2 * d + m).collect();
        if keep.len() != t.rows.len() {
            t.rows = keep.iter().map(|&r| t.rows[r].clone()).collect();
            t.rhs = keep.iter().map(|&r| t.rhs[r].clone()).collect();
            t.basis = keep.iter().map(|&r| t.basis[r]).collect();
        }
        t.ncols = 2 * d + m;
        for row in t.rows.iter_mut() {
            row.truncate(2 * d + m);
        }
    }

    // Phase II.
    let mut phase2 = vec![Scalar::zero(); 2 * d + m];
    for j in 0..d {
        let c = if maximize {
            -objective[j].clone()
        } else {
            objective[j].clone()
        };
        phase2[j] = c.clone();
        phase2[d + j] = -c;
    }
    t.reset_cost(&phase2);
    if !t.run(2 * d + m) {
        return LpOutcome::Unbounded;
    }

    let mut point = vec![Scalar::zero(); d];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < d {
            point[b] = &point[b] + &t.rhs[i];
        } else if b < 2 * d {
            point[b - d] = &point[b - d] - &t.rhs[i];
        }
    }
    let value = dot(objective, &point);
    debug_assert!(constraints.iter().all(|c| dot(&c.normal, &point) <= c.bound));
    LpOutcome::Optimal { point, value }
}

/// Few-variables/many-rows path: solves the dual
/// `max -b^T y  s.t.  A^T y = -c, y >= 0` with a `(d+1) x m` tableau and
/// maps outcomes back (dual unbounded = primal infeasible with the
/// unbounded ray as Farkas certificate; dual infeasible = primal
/// unbounded). The primal point is recovered from the optimal basis.
fn solve_lp_dual(constraints: &[Constraint], objective: &[Scalar], maximize: bool) -> LpOutcome {
    let d = objective.len();
    let m = constraints.len();
    for c in constraints {
        assert_eq!(c.normal.len(), d, "constraint arity mismatch");
    }
    // Primal in min form: min c'^T x, A x <= b.
    let cvec: Vec<Scalar> = if maximize {
        objective.iter().map(|v| -v.clone()).collect()
    } else {
        objective.to_vec()
    };

    // Dual standard form: min b^T y s.t. A^T y = -c', y >= 0.
    // Rows of the tableau are the d equality constraints; to start
    // phase I each row is sign-normalized so its rhs is nonnegative.
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(d);
    let mut rhs: Vec<Scalar> = Vec::with_capacity(d);
    for k in 0..d {
        let mut row: Vec<Scalar> = (0..m).map(|i| constraints[i].normal[k].clone()).collect();
        let mut r = -cvec[k].clone();
        if r.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            r = -r;
        }
        rows.push(row);
        rhs.push(r);
    }
    // Columns: y (m) then artificials (d).
    let ncols = m + d;
    for (k, row) in rows.iter_mut().enumerate() {
        row.resize(ncols, Scalar::zero());
        row[m + k] = Scalar::one();
    }
    let mut t = Tableau {
        ncols,
        rows,
        rhs,
        basis: (0..d).map(|k| m + k).collect(),
        cost: vec![Scalar::zero(); ncols],
        cost_rhs: Scalar::zero(),
    };

    // Phase I: drive the artificials to zero.
    let mut phase1 = vec![Scalar::zero(); ncols];
    for k in 0..d {
        phase1[m + k] = Scalar::one();
    }
    t.reset_cost(&phase1);
    let bounded = t.run(ncols);
    debug_assert!(bounded);
    if t.objective_value().is_positive() {
        // Dual infeasible: the primal is unbounded or itself infeasible;
        // a zero-objective primal solve distinguishes the two.
        let zero = vec![Scalar::zero(); d];
        return match solve_lp_primal(constraints, &zero, false) {
            LpOutcome::Infeasible { farkas } => LpOutcome::Infeasible { farkas },
            _ => LpOutcome::Unbounded,
        };
    }
    for r in 0..t.rows.len() {
        if t.basis[r] >= m {
            debug_assert!(t.rhs[r].is_zero());
            if let Some(pc) = (0..m).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, pc);
            }
        }
    }
    let keep: Vec<usize> = (0..t.rows.len()).filter(|&r| t.basis[r] < m).collect();
    if keep.len() != t.rows.len() {
        t.rows = keep.iter().map(|&r| t.rows[r].clone()).collect();
        t.rhs = keep.iter().map(|&r| t.rhs[r].clone()).collect();
        t.basis = keep.iter().map(|&r| t.basis[r]).collect();
    }
    t.ncols = m;
    for row in t.rows.iter_mut() {
        row.truncate(m);
    }

    // Phase II: minimize b^T y.
    let phase2: Vec<Scalar> = (0..m).map(|i| constraints[i].bound.clone()).collect();
    t.reset_cost(&phase2);
    if !t.run(m) {
        // Dual unbounded: extract the improving ray as a Farkas
        // certificate for the primal.
        let pc = (0..m)
            .find(|&j| t.cost[j].is_negative())
            .expect("unbounded run leaves a negative reduced cost");
        let mut farkas = vec![Scalar::zero(); m];
        farkas[pc] = Scalar::one();
        for (r, &b) in t.basis.iter().enumerate() {
            if b < m {
                farkas[b] = -t.rows[r][pc].clone();
            }
        }
        debug_assert!(verify_farkas(constraints, &farkas));
        return LpOutcome::Infeasible { farkas };
    }

    // Recover the primal point: x solves A_B^T x = b_B on the basic
    // columns (complementary slackness: basic dual variables have tight
    // primal rows).
    let basis_rows: Vec<usize> = t.basis.iter().copied().collect();
    let mut x = vec![Scalar::zero(); d];
    if !basis_rows.is_empty() {
        // Solve the (possibly underdetermined) tight system exactly via
        // elimination; free coordinates stay at zero.
        let mut aug: Vec<Vec<Scalar>> = basis_rows
            .iter()
            .map(|&i| {
                let mut row = constraints[i].normal.clone();
                row.push(constraints[i].bound.clone());
                row
            })
            .collect();
        let nr = aug.len();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0usize;
        for col in 0..d {
            if r == nr {
                break;
            }
            let Some(p) = (r..nr).find(|&i| !aug[i][col].is_zero()) else {
                continue;
            };
            aug.swap(r, p);
            let inv = aug[r][col].recip();
            for j in col..=d {
                aug[r][j] = &aug[r][j] * &inv;
            }
            for i in 0..nr {
                if i != r && !aug[i][col].is_zero() {
                    let f = aug[i][col].clone();
                    for j in col..=d {
                        let delta = &f * &aug[r][j];
                        aug[i][j] = &aug[i][j] - &delta;
                    }
                }
            }
            pivots.push((r, col));
            r += 1;
        }
        for &(pr, pc) in &pivots {
            x[pc] = aug[pr][d].clone();
        }
    }
    // The recovered point must be feasible and close the duality gap;
    // degenerate bases can fail either test, in which case the dense
    // primal tableau gives the guaranteed answer.
    let dual_opt = {
        let v = -t.objective_value();
        if maximize {
            -v
        } else {
            v
        }
    };
    let feasible = constraints.iter().all(|c| dot(&c.normal, &x) <= c.bound);
    if !feasible || dot(objective, &x) != dual_opt {
        return solve_lp_primal(constraints, objective, maximize);
    }
    let value = dot(objective, &x);
    LpOutcome::Optimal { point: x, value }
}

fn verify_farkas(constraints: &[Constraint], farkas: &[Scalar]) -> bool {
    if farkas.iter().any(|y| y.is_negative()) {
        return false;
    }
    let d = constraints.first().map_or(0, |c| c.normal.len());
    let mut combo = vec![Scalar::zero(); d];
    let mut bound = Scalar::zero();
    for (c, y) in constraints.iter().zip(farkas) {
        for (j, w) in c.normal.iter().enumerate() {
            combo[j] += &(y * w);
        }
        bound += &(y * &c.bound);
    }
    combo.iter().all(|x| x.is_zero()) && bound.is_negative()
}

/// Feasibility verdict for an H-polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// A point satisfying every inequality exactly.
    Feasible(Vec<Scalar>),
    /// Nonnegative multipliers combining the inequalities into `0 <= v`
    /// with `v < 0`, in inequality-id order.
    Infeasible(Vec<Scalar>),
}

/// Exact feasibility test with witness or Farkas certificate.
pub fn lp_feasible(poly: &Polytope) -> Feasibility {
    let constraints: Vec<Constraint> = poly
        .inequalities()
        .iter()
        .map(|r| Constraint::new(r.normal.clone(), r.bound.clone()))
        .collect();
    let zero_obj = vec![Scalar::zero(); poly.dim()];
    match solve_lp(&constraints, &zero_obj, false) {
        LpOutcome::Optimal { point, .. } => Feasibility::Feasible(point),
        LpOutcome::Infeasible { farkas } => Feasibility::Infeasible(farkas),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// The lexicographically smallest point of `{x : constraints}`, or `None`
/// if the region is empty. Errors if the region is unbounded toward
/// lexicographic minus infinity.
pub fn lex_min_point(constraints: &[Constraint], dim: usize) -> Result<Option<Vec<Scalar>>> {
    let mut work = constraints.to_vec();
    let mut point = Vec::with_capacity(dim);
    for kk in 0..dim {
        let mut obj = vec![Scalar::zero(); dim];
        obj[kk] = Scalar::one();
        match solve_lp(&work, &obj, false) {
            LpOutcome::Infeasible { .. } => return Ok(None),
            LpOutcome::Unbounded => return Err(Error::UnboundedPolytope),
            LpOutcome::Optimal { value, .. } => {
                let mut up = vec![Scalar::zero(); dim];
                up[kk] = Scalar::one();
                work.push(Constraint::new(up, value.clone()));
                let mut down = vec![Scalar::zero(); dim];
                down[kk] = Scalar::from_int(-1);
                work.push(Constraint::new(down, -value.clone()));
                point.push(value);
            }
        }
    }
    Ok(Some(point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polytope;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn unit_interval_feasible() {
        // {x <= 1, -x <= 0} has witness x = 0.
        let poly = Polytope::new(
            1,
            vec![(vec![s(1)], s(1)), (vec![s(-1)], s(0))],
        )
        .unwrap();
        match lp_feasible(&poly) {
            Feasibility::Feasible(x) => {
                assert!(poly.contains(&x));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn empty_interval_has_farkas_certificate() {
        // {x <= 0, -x <= -1} is empty; (1,1) sums to 0 <= -1.
        let poly = Polytope::new(
            1,
            vec![(vec![s(1)], s(0)), (vec![s(-1)], s(-1))],
        )
        .unwrap();
        match lp_feasible(&poly) {
            Feasibility::Infeasible(y) => {
                assert!(y.iter().all(|v| !v.is_negative()));
                let combo = &y[0] - &y[1];
                assert!(combo.is_zero());
                let bound = &y[0] * &s(0) + &y[1] * &s(-1);
                assert!(bound.is_negative());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn maximization_on_triangle() {
        // x>=0, y>=0, x+y<=3: max x+2y = 6 at (0,3).
        let cons = vec![
            Constraint::new(vec![s(-1), s(0)], s(0)),
            Constraint::new(vec![s(0), s(-1)], s(0)),
            Constraint::new(vec![s(1), s(1)], s(3)),
        ];
        match solve_lp(&cons, &[s(1), s(2)], true) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, s(6)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_unbounded() {
        let cons = vec![Constraint::new(vec![s(-1)], s(0))];
        assert_eq!(solve_lp(&cons, &[s(1)], true), LpOutcome::Unbounded);
    }

    #[test]
    fn lex_min_point_of_square() {
        let square = Polytope::bounding_box(2, Scalar::ratio(1, 3), s(2)).unwrap();
        let cons: Vec<Constraint> = square
            .inequalities()
            .iter()
            .map(|r| Constraint::new(r.normal.clone(), r.bound.clone()))
            .collect();
        let p = lex_min_point(&cons, 2).unwrap().unwrap();
        assert_eq!(p, vec![Scalar::ratio(1, 3), Scalar::ratio(1, 3)]);
    }

    #[test]
    fn lex_min_reports_unbounded() {
        let cons = vec![Constraint::new(vec![s(1)], s(0))];
        assert!(matches!(
            lex_min_point(&cons, 1),
            Err(Error::UnboundedPolytope)
        ));
    }

    #[test]
    fn lex_min_reports_empty() {
        let cons = vec![
            Constraint::new(vec![s(1)], s(0)),
            Constraint::new(vec![s(-1)], s(-1)),
        ];
        assert_eq!(lex_min_point(&cons, 1).unwrap(), None);
    }

    // The dual path must agree with the primal tableau on many-row
    // programs (value equality; both-or-neither infeasible/unbounded).
    #[test]
    fn dual_path_matches_primal_path() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..60 {
            let d = 2 + (case % 2);
            let m = 18 + (case % 5);
            let cons: Vec<Constraint> = (0..m)
                .map(|_| {
                    let normal: Vec<Scalar> =
                        (0..d).map(|_| s((next() % 7) as i64 - 3)).collect();
                    Constraint::new(normal, s((next() % 9) as i64 - 2))
                })
                .collect();
            let obj: Vec<Scalar> = (0..d).map(|_| s((next() % 7) as i64 - 3)).collect();
            let via_dual = solve_lp_dual(&cons, &obj, true);
            let via_primal = solve_lp_primal(&cons, &obj, true);
            match (&via_dual, &via_primal) {
                (
                    LpOutcome::Optimal { value: a, .. },
                    LpOutcome::Optimal { value: b, .. },
                ) => assert_eq!(a, b, "case {case}"),
                (LpOutcome::Unbounded, LpOutcome::Unbounded) => {}
                (LpOutcome::Infeasible { farkas }, LpOutcome::Infeasible { .. }) => {
                    assert!(verify_farkas(&cons, farkas));
                }
                other => panic!("case {case}: paths disagree: {other:?}"),
            }
        }
    }

    // Oracle: enumerate vertices of a 2D polygon by intersecting all
    // constraint pairs and keeping feasible points; feasibility of the
    // polygon equals "some vertex exists" for bounded polygons.
    fn polygon_vertices(cons: &[Constraint]) -> Vec<Vec<Scalar>> {
        let mut verts = Vec::new();
        for i in 0..cons.len() {
            for j in (i + 1)..cons.len() {
                let (a, b) = (&cons[i], &cons[j]);
                let det = &a.normal[0] * &b.normal[1] - &a.normal[1] * &b.normal[0];
                if det.is_zero() {
                    continue;
                }
                let x = (&a.bound * &b.normal[1] - &a.normal[1] * &b.bound) / det.clone();
                let y = (&a.normal[0] * &b.bound - &a.bound * &b.normal[0]) / det.clone();
                let pt = vec![x, y];
                if cons.iter().all(|c| dot(&c.normal, &pt) <= c.bound) {
                    verts.push(pt);
                }
            }
        }
        verts
    }

    #[test]
    fn feasibility_matches_vertex_enumeration_on_triangles() {
        // Deterministic sweep of many small triangles, some empty.
        let mut cases = 0;
        for a in -2i64..3 {
            for b in -2i64..3 {
                for c in -3i64..4 {
                    let cons = vec![
                        Constraint::new(vec![s(1), s(a)], s(c)),
                        Constraint::new(vec![s(-1), s(b)], s(1)),
                        Constraint::new(vec![s(0), s(-1)], s(-1)),
                        // Box to keep everything bounded.
                        Constraint::new(vec![s(1), s(0)], s(10)),
                        Constraint::new(vec![s(-1), s(0)], s(10)),
                        Constraint::new(vec![s(0), s(1)], s(10)),
                    ];
                    let poly = Polytope::new(
                        2,
                        cons.iter()
                            .map(|c| (c.normal.clone(), c.bound.clone()))
                            .collect(),
                    )
                    .unwrap();
                    let oracle_feasible = !polygon_vertices(&cons).is_empty();
                    let got = matches!(lp_feasible(&poly), Feasibility::Feasible(_));
                    assert_eq!(got, oracle_feasible, "a={a} b={b} c={c}");
                    cases += 1;
                }
            }
        }
        assert_eq!(cases, 175);
    }
}
