//! Column-by-column backtracking over candidate vectors, generic over the
//! integer type so small instances run on `i64`.
//!
//! Column `i` must satisfy `pᵢᵀ·A·pᵢ = t_ii` and the linear constraints
//! `(A·pⱼ)·pᵢ = t_ij` for every earlier column `j`. Definite forms draw
//! candidates from a finite precomputed list; indefinite forms enumerate a
//! box coordinate by coordinate, pruning with interval bounds and solving the
//! last coordinate exactly. Coordinates run 0, 1, -1, 2, -2, ... so sparse
//! vectors come first.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::definite::representations;
use super::{Budget, SearchConfig};
use crate::matrix::Matrix;
use crate::scalar::{exact_sqrt, search_order_key, IntScalar};
use crate::IntMatrix;

pub(crate) enum Outcome {
    Found { p: IntMatrix, parallel: bool },
    Exhausted,
    OutOfBudget,
}

enum Flow<T> {
    Continue,
    Found(Matrix<T>),
    Abort,
}

enum Candidates<T> {
    Definite(Vec<Vec<Vec<T>>>),
    Box(T),
}

/// Entry point: picks `i64` when every intermediate value provably fits,
/// otherwise runs on `BigInt`.
pub(crate) fn run(
    a: &IntMatrix,
    target: &IntMatrix,
    definite: bool,
    cfg: &SearchConfig,
    accept: &(dyn Fn(&IntMatrix) -> bool + Sync),
) -> Outcome {
    let budget = Budget::new(cfg.node_budget);
    let lists = if definite {
        match definite_lists(a, target, &budget) {
            Some(lists) => Some(lists),
            None => return Outcome::OutOfBudget,
        }
    } else {
        None
    };
    let coord_bound = match &lists {
        Some(lists) => lists
            .iter()
            .flatten()
            .flatten()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero),
        None => BigInt::from(cfg.radius),
    };
    if fits_i64(a, target, &coord_bound) {
        let a64 = a.narrow::<i64>().expect("checked");
        let t64 = target.narrow::<i64>().expect("checked");
        let lists64 = lists.map(|ls| {
            ls.into_iter()
                .map(|col| col.into_iter().map(|v| v.iter().map(|c| i64::try_from(c).unwrap()).collect()).collect())
                .collect()
        });
        drive::<i64>(&a64, &t64, lists64, cfg, &budget, accept)
    } else {
        drive::<BigInt>(a, target, lists, cfg, &budget, accept)
    }
}

fn definite_lists(a: &IntMatrix, target: &IntMatrix, budget: &Budget) -> Option<Vec<Vec<Vec<BigInt>>>> {
    let negative = a[(0, 0)].is_negative();
    let g = if negative { a.neg() } else { a.clone() };
    let mut cache: HashMap<BigInt, Vec<Vec<BigInt>>> = HashMap::new();
    let mut lists = Vec::with_capacity(target.rows());
    for i in 0..target.rows() {
        let mut n = target[(i, i)].clone();
        if negative {
            n = -n;
        }
        if !cache.contains_key(&n) {
            let reps = representations(&g, &n, budget).ok()?;
            cache.insert(n.clone(), reps);
        }
        lists.push(cache[&n].clone());
    }
    Some(lists)
}

/// Bounds every quantity the kernel forms for coordinates of size `bound`.
fn fits_i64(a: &IntMatrix, target: &IntMatrix, bound: &BigInt) -> bool {
    let m = BigInt::from(a.rows().max(1));
    let amax = a.max_abs();
    let tmax = target.max_abs();
    let lin = BigInt::from(2) * &m * &amax * bound;
    let quad = &m * &m * &amax * bound * bound + &tmax;
    let worst = &lin * &lin + BigInt::from(4) * &amax * &quad + &quad * BigInt::from(4) + &lin * bound * &m;
    worst < BigInt::from(1i64 << 60)
}

fn drive<T: IntScalar>(
    a: &Matrix<T>,
    target: &Matrix<T>,
    lists: Option<Vec<Vec<Vec<T>>>>,
    cfg: &SearchConfig,
    budget: &Budget,
    accept: &(dyn Fn(&IntMatrix) -> bool + Sync),
) -> Outcome {
    let to_big = |p: &Matrix<T>| p.to_big();
    let cands = match lists {
        Some(lists) => Candidates::Definite(lists),
        None => Candidates::Box(T::from(i64::from(cfg.radius))),
    };
    match search_level(a, target, cands, cfg, budget, accept, &to_big) {
        Level::Found(p, parallel) => Outcome::Found { p, parallel },
        Level::Exhausted => Outcome::Exhausted,
        Level::Aborted => Outcome::OutOfBudget,
    }
}

enum Level {
    Found(IntMatrix, bool),
    Exhausted,
    Aborted,
}

fn search_level<T: IntScalar>(
    a: &Matrix<T>,
    target: &Matrix<T>,
    cands: Candidates<T>,
    cfg: &SearchConfig,
    budget: &Budget,
    accept: &(dyn Fn(&IntMatrix) -> bool + Sync),
    to_big: &(dyn Fn(&Matrix<T>) -> IntMatrix + Sync),
) -> Level {
    let mut root = Kernel::new(a, target, &cands, budget, accept, to_big);
    let first = match root.first_column() {
        Some(v) => v,
        None => return Level::Aborted,
    };
    if cfg.workers <= 1 || first.len() < 2 {
        for x in &first {
            match root.place(0, x) {
                Flow::Continue => {}
                Flow::Found(p) => return Level::Found(p.to_big(), false),
                Flow::Abort => return Level::Aborted,
            }
        }
        return Level::Exhausted;
    }

    let found: Mutex<Option<IntMatrix>> = Mutex::new(None);
    let aborted = Mutex::new(false);
    std::thread::scope(|s| {
        for w in 0..cfg.workers {
            let first = &first;
            let cands = &cands;
            let found = &found;
            let aborted = &aborted;
            s.spawn(move || {
                let mut k = Kernel::new(a, target, cands, budget, accept, to_big);
                for x in first.iter().skip(w).step_by(cfg.workers) {
                    match k.place(0, x) {
                        Flow::Continue => {}
                        Flow::Found(p) => {
                            let mut slot = found.lock().unwrap();
                            if slot.is_none() {
                                *slot = Some(p.to_big());
                            }
                            budget.cancel();
                            return;
                        }
                        Flow::Abort => {
                            *aborted.lock().unwrap() = true;
                            return;
                        }
                    }
                }
            });
        }
    });
    if let Some(p) = found.into_inner().unwrap() {
        return Level::Found(p, true);
    }
    if *aborted.lock().unwrap() || budget.exhausted() {
        Level::Aborted
    } else {
        Level::Exhausted
    }
}

struct Kernel<'a, T> {
    a: &'a Matrix<T>,
    target: &'a Matrix<T>,
    cands: &'a Candidates<T>,
    budget: &'a Budget,
    accept: &'a (dyn Fn(&IntMatrix) -> bool + Sync),
    to_big: &'a (dyn Fn(&Matrix<T>) -> IntMatrix + Sync),
    m: usize,
    /// `a_st + a_ts`
    pair: Vec<Vec<T>>,
    /// `Σ_{s,t >= d} |a_st|`
    quad_tail: Vec<T>,
    chosen: Vec<Vec<T>>,
    /// `A·pⱼ` for each chosen column.
    images: Vec<Vec<T>>,
    collecting: Option<Vec<Vec<T>>>,
}

struct ColumnSpec<T> {
    col: usize,
    norm: T,
    rhs: Vec<T>,
    /// `Σ_{s >= d} |c_j[s]|` per constraint.
    tails: Vec<Vec<T>>,
}

impl<'a, T: IntScalar> Kernel<'a, T> {
    fn new(
        a: &'a Matrix<T>,
        target: &'a Matrix<T>,
        cands: &'a Candidates<T>,
        budget: &'a Budget,
        accept: &'a (dyn Fn(&IntMatrix) -> bool + Sync),
        to_big: &'a (dyn Fn(&Matrix<T>) -> IntMatrix + Sync),
    ) -> Self {
        let m = a.rows();
        let pair = (0..m)
            .map(|s| (0..m).map(|t| a[(s, t)].clone() + a[(t, s)].clone()).collect())
            .collect();
        let mut quad_tail = vec![T::zero(); m + 1];
        for d in (0..m).rev() {
            let mut add = T::zero();
            for t in d..m {
                add = add + a[(d, t)].abs();
                if t != d {
                    add = add + a[(t, d)].abs();
                }
            }
            quad_tail[d] = quad_tail[d + 1].clone() + add;
        }
        Kernel {
            a,
            target,
            cands,
            budget,
            accept,
            to_big,
            m,
            pair,
            quad_tail,
            chosen: Vec::new(),
            images: Vec::new(),
            collecting: None,
        }
    }

    /// Every candidate for the first column, in search order.
    fn first_column(&mut self) -> Option<Vec<Vec<T>>> {
        self.collecting = Some(Vec::new());
        let flow = self.column(0);
        let out = self.collecting.take().unwrap();
        match flow {
            Flow::Abort => None,
            _ => Some(out),
        }
    }

    fn column(&mut self, col: usize) -> Flow<T> {
        match self.cands {
            Candidates::Definite(lists) => {
                let list = &lists[col];
                for x in list {
                    if !self.budget.tick() {
                        return Flow::Abort;
                    }
                    let ok = self.images.iter().enumerate().all(|(j, c)| dot(c, x) == self.target[(col, j)]);
                    if ok {
                        match self.place(col, x) {
                            Flow::Continue => {}
                            other => return other,
                        }
                    }
                }
                Flow::Continue
            }
            Candidates::Box(r) => {
                let r = r.clone();
                let spec = self.spec(col);
                let mut x = vec![T::zero(); self.m];
                let lin = vec![T::zero(); self.m];
                let partial = vec![T::zero(); col];
                self.box_rec(&spec, &r, 0, &mut x, T::zero(), lin, partial)
            }
        }
    }

    fn spec(&self, col: usize) -> ColumnSpec<T> {
        let rhs = (0..col).map(|j| self.target[(col, j)].clone()).collect();
        let tails = self
            .images
            .iter()
            .map(|c| {
                let mut t = vec![T::zero(); self.m + 1];
                for d in (0..self.m).rev() {
                    t[d] = t[d + 1].clone() + c[d].abs();
                }
                t
            })
            .collect();
        ColumnSpec { col, norm: self.target[(col, col)].clone(), rhs, tails }
    }

    /// Records `x` as column `col` and continues with the next column.
    fn place(&mut self, col: usize, x: &[T]) -> Flow<T> {
        if col == 0 {
            if let Some(acc) = self.collecting.as_mut() {
                acc.push(x.to_vec());
                return Flow::Continue;
            }
        }
        let img: Vec<T> = (0..self.m).map(|s| dot(self.a.row(s), x)).collect();
        self.chosen.push(x.to_vec());
        self.images.push(img);
        let flow = if col + 1 == self.target.rows() {
            let p = Matrix::from_columns(self.m, &self.chosen);
            if (self.accept)(&(self.to_big)(&p)) {
                Flow::Found(p)
            } else {
                Flow::Continue
            }
        } else {
            self.column(col + 1)
        };
        self.chosen.pop();
        self.images.pop();
        flow
    }

    #[allow(clippy::too_many_arguments)]
    fn box_rec(
        &mut self,
        spec: &ColumnSpec<T>,
        r: &T,
        d: usize,
        x: &mut Vec<T>,
        q: T,
        lin: Vec<T>,
        partial: Vec<T>,
    ) -> Flow<T> {
        if !self.budget.tick() {
            return Flow::Abort;
        }
        for (j, rhs) in spec.rhs.iter().enumerate() {
            if (rhs.clone() - partial[j].clone()).abs() > r.clone() * spec.tails[j][d].clone() {
                return Flow::Continue;
            }
        }
        let rem = spec.norm.clone() - q.clone();
        let mut slack = r.clone() * r.clone() * self.quad_tail[d].clone();
        for l in &lin[d..] {
            slack = slack + r.clone() * l.abs();
        }
        if rem.abs() > slack {
            return Flow::Continue;
        }
        if d + 1 == self.m {
            return self.last_coordinate(spec, r, x, q, &lin, &partial);
        }
        for v in ordered_values(r) {
            x[d] = v.clone();
            let q2 = q.clone() + lin[d].clone() * v.clone() + self.a[(d, d)].clone() * v.clone() * v.clone();
            let mut lin2 = lin.clone();
            for t in d + 1..self.m {
                lin2[t] = lin2[t].clone() + self.pair[d][t].clone() * v.clone();
            }
            let partial2: Vec<T> = partial
                .iter()
                .zip(&self.images)
                .map(|(p, c)| p.clone() + c[d].clone() * v.clone())
                .collect();
            match self.box_rec(spec, r, d + 1, x, q2, lin2, partial2) {
                Flow::Continue => {}
                other => {
                    x[d] = T::zero();
                    return other;
                }
            }
        }
        x[d] = T::zero();
        Flow::Continue
    }

    fn last_coordinate(
        &mut self,
        spec: &ColumnSpec<T>,
        r: &T,
        x: &mut Vec<T>,
        q: T,
        lin: &[T],
        partial: &[T],
    ) -> Flow<T> {
        let last = self.m - 1;
        let qa = self.a[(last, last)].clone();
        let qb = lin[last].clone();
        let qc = q - spec.norm.clone();

        let mut forced: Option<T> = None;
        for (j, rhs) in spec.rhs.iter().enumerate() {
            let coef = self.images[j][last].clone();
            let need = rhs.clone() - partial[j].clone();
            if coef.is_zero() {
                if !need.is_zero() {
                    return Flow::Continue;
                }
            } else {
                if !need.is_multiple_of(&coef) {
                    return Flow::Continue;
                }
                let y = need / coef;
                match &forced {
                    Some(f) if *f != y => return Flow::Continue,
                    _ => forced = Some(y),
                }
            }
        }
        let holds = |y: &T| qa.clone() * y.clone() * y.clone() + qb.clone() * y.clone() + qc.clone() == T::zero();
        let ys: Vec<T> = match forced {
            Some(y) => {
                if y.abs() <= *r && holds(&y) {
                    vec![y]
                } else {
                    vec![]
                }
            }
            None => integer_roots(&qa, &qb, &qc, r),
        };
        let prefix_zero = x[..last].iter().all(Zero::is_zero);
        for y in ys {
            if prefix_zero && y.is_zero() {
                continue;
            }
            x[last] = y;
            let xv = x.clone();
            match self.place(spec.col, &xv) {
                Flow::Continue => {}
                other => {
                    x[last] = T::zero();
                    return other;
                }
            }
        }
        x[last] = T::zero();
        Flow::Continue
    }
}

fn dot<T: IntScalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x.clone() * y.clone()
        }
    })
}

/// 0, 1, -1, 2, -2, ..., r, -r
fn ordered_values<T: IntScalar>(r: &T) -> Vec<T> {
    let mut out = vec![T::zero()];
    let mut v = T::one();
    while v <= *r {
        out.push(v.clone());
        out.push(-v.clone());
        v = v + T::one();
    }
    out
}

/// Integer solutions of `a·y² + b·y + c = 0` with `|y| <= r`, in search order.
fn integer_roots<T: IntScalar>(a: &T, b: &T, c: &T, r: &T) -> Vec<T> {
    let mut ys: Vec<T> = if a.is_zero() {
        if b.is_zero() {
            if c.is_zero() {
                return ordered_values(r);
            }
            vec![]
        } else if (-c.clone()).is_multiple_of(b) {
            vec![-c.clone() / b.clone()]
        } else {
            vec![]
        }
    } else {
        let disc = b.clone() * b.clone() - T::from(4) * a.clone() * c.clone();
        match exact_sqrt(&disc) {
            None => vec![],
            Some(s) => {
                let two_a = T::from(2) * a.clone();
                let mut v = Vec::with_capacity(2);
                for num in [-b.clone() + s.clone(), -b.clone() - s] {
                    if num.is_multiple_of(&two_a) {
                        let y = num / two_a.clone();
                        if !v.contains(&y) {
                            v.push(y);
                        }
                    }
                }
                v
            }
        }
    };
    ys.retain(|y| y.abs() <= *r);
    ys.sort_by_key(|y| search_order_key(y.to_i64().unwrap_or(i64::MAX)));
    ys
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratics() {
        // y² - 4 = 0
        assert_eq!(integer_roots(&1i64, &0, &-4, &8), vec![2, -2]);
        // 2y² + 3y + 1 = 0 has roots -1/2 and -1
        assert_eq!(integer_roots(&2i64, &3, &1, &8), vec![-1]);
        // linear 3y - 6 = 0
        assert_eq!(integer_roots(&0i64, &3, &-6, &8), vec![2]);
        // out of range
        assert!(integer_roots(&1i64, &0, &-100, &8).is_empty());
        // identically zero
        assert_eq!(integer_roots(&0i64, &0, &0, &1), vec![0, 1, -1]);
    }

    #[test]
    fn value_order() {
        assert_eq!(ordered_values(&2i64), vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn i64_and_bigint_kernels_agree() {
        use crate::matrix::int_matrix;
        let cfg = SearchConfig::default().with_radius(3);
        let a = int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]);
        let targets = [
            int_matrix(&[&[2, 0], &[0, -2]]),
            int_matrix(&[&[3, 1], &[1, -1]]),
            int_matrix(&[&[0, 2], &[2, 0]]),
        ];
        for t in &targets {
            let budget = Budget::new(cfg.node_budget);
            let small = drive::<i64>(
                &a.narrow().unwrap(),
                &t.narrow().unwrap(),
                None,
                &cfg,
                &budget,
                &|_| true,
            );
            let budget = Budget::new(cfg.node_budget);
            let big = drive::<BigInt>(&a, t, None, &cfg, &budget, &|_| true);
            match (small, big) {
                (Outcome::Found { p: p1, .. }, Outcome::Found { p: p2, .. }) => assert_eq!(p1, p2),
                (Outcome::Exhausted, Outcome::Exhausted) => {}
                _ => panic!("kernels disagree on {t:?}"),
            }
        }
    }
}
