//! Shared generators for the integration suites.
#![allow(dead_code)]

use dinkelbach::{finite_min_ratio, FiniteSetProblem, PrecisionContext, Problem, Real, Start};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random finite instance with `n <= 50`, `f2` in `[0.1, 10]` and ratios on
/// a grid of spacing `1e-5`, so distinct items differ by at least `1e-6`.
pub fn random_finite<R: Rng>(rng: &mut R, ctx: PrecisionContext) -> FiniteSetProblem {
    let n = rng.gen_range(1..=50);
    let mut grid: Vec<i64> = Vec::with_capacity(n);
    while grid.len() < n {
        let m = rng.gen_range(-1_000_000..=1_000_000);
        if !grid.contains(&m) {
            grid.push(m);
        }
    }
    let items: Vec<(f64, f64)> = grid
        .iter()
        .map(|&m| {
            let f2 = rng.gen_range(0.1..=10.0);
            (m as f64 * 1e-5 * f2, f2)
        })
        .collect();
    FiniteSetProblem::from_f64(ctx, &items).unwrap()
}

/// Ratio of a randomly chosen item: a feasible starting point.
pub fn feasible_ratio<R: Rng>(rng: &mut R, p: &FiniteSetProblem) -> Real {
    let (f1, f2) = p.items().choose(rng).unwrap();
    f1 / f2
}

/// A bracket `[γ0, α0]` with `γ0` strictly below every ratio, hence
/// `g(γ0) < 0`, and `α0` a feasible ratio.
pub fn bracket<R: Rng>(rng: &mut R, p: &FiniteSetProblem) -> Start {
    let (min, _) = finite_min_ratio(p);
    let ctx = min.ctx();
    let gamma = &min - &ctx.from_f64(rng.gen_range(0.5..5.0));
    Start::Bracket {
        gamma,
        alpha: feasible_ratio(rng, p),
    }
}

pub fn point<R: Rng>(rng: &mut R, p: &FiniteSetProblem) -> Start {
    Start::Point(feasible_ratio(rng, p))
}

pub fn start_for<R: Rng>(rng: &mut R, p: &FiniteSetProblem, interval: bool) -> Start {
    if interval {
        bracket(rng, p)
    } else {
        point(rng, p)
    }
}

pub fn finite(p: FiniteSetProblem) -> Problem {
    Problem::Finite(p)
}

/// Central difference of order 1, 2 or 3 with step `h`.
pub fn central_difference(f: impl Fn(&Real) -> Real, x: &Real, h: &Real, order: u32) -> Real {
    let ctx = x.ctx();
    let at = |m: i64| f(&(x + &(h * &ctx.int(m))));
    match order {
        1 => (at(1) - at(-1)) / (h * &ctx.int(2)),
        2 => (at(1) - at(0) * ctx.int(2) + at(-1)) / h.square(),
        3 => {
            (at(2) - at(1) * ctx.int(2) + at(-1) * ctx.int(2) - at(-2))
                / (h.square() * h * ctx.int(2))
        }
        _ => unreachable!("orders 1 to 3 only"),
    }
}
