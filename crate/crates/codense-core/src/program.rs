use crate::seq::BoxVal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Deterministic oracle program: a loop-free expression over one input and an
/// oracle sequence. Evaluation counts one step per node visited and aborts on
/// an explicit budget, so every run terminates.
///
/// The wildcard propagates strictly through arithmetic, queries at wildcard
/// positions, and is equal only to itself under `IfEq`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    /// The program input.
    X,
    Const(u64),
    /// Oracle value at the position the subexpression evaluates to.
    Query(Box<Expr>),
    /// Saturating sum.
    Add(Box<Expr>, Box<Expr>),
    /// `IfEq(a, b, t, e)`: `t` when `a` and `b` evaluate equal, else `e`.
    IfEq(Box<Expr>, Box<Expr>, Box<Expr>, Box<Expr>),
    /// `IfBox(c, t, e)`: `t` when `c` evaluates to the wildcard, else `e`.
    IfBox(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Never halts.
    Diverge,
}

impl Expr {
    pub fn query(e: Expr) -> Expr {
        Expr::Query(Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn if_eq(a: Expr, b: Expr, t: Expr, e: Expr) -> Expr {
        Expr::IfEq(Box::new(a), Box::new(b), Box::new(t), Box::new(e))
    }

    pub fn if_box(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::IfBox(Box::new(c), Box::new(t), Box::new(e))
    }
}

/// Result of running a program at one input.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halt(BoxVal),
    /// Hit `Diverge` or queried at or beyond the allowed horizon.
    Diverged,
    /// Ran out of steps; unlike `Diverged` this can flip on a larger budget.
    OutOfBudget,
}

/// Outcome plus the resources the run consumed.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EvalReport {
    pub outcome: Outcome,
    pub steps: u64,
    /// Largest oracle position touched; the use of the run is this plus one.
    pub max_query: Option<u64>,
}

impl EvalReport {
    /// Halted with an actual natural (not the wildcard).
    pub fn value(&self) -> Option<u64> {
        match self.outcome {
            Outcome::Halt(v) => v.as_val(),
            _ => None,
        }
    }
}

struct Run<'a, F> {
    oracle: &'a F,
    budget: u64,
    query_bound: u64,
    steps: u64,
    max_query: Option<u64>,
}

enum Stop {
    Diverged,
    OutOfBudget,
}

impl<F: Fn(u64) -> BoxVal> Run<'_, F> {
    fn go(&mut self, e: &Expr, x: u64) -> Result<BoxVal, Stop> {
        if self.steps >= self.budget {
            return Err(Stop::OutOfBudget);
        }
        self.steps += 1;
        match e {
            Expr::X => Ok(BoxVal::Val(x)),
            Expr::Const(c) => Ok(BoxVal::Val(*c)),
            Expr::Diverge => Err(Stop::Diverged),
            Expr::Query(pos) => match self.go(pos, x)? {
                BoxVal::Box => Ok(BoxVal::Box),
                BoxVal::Val(p) => {
                    if p >= self.query_bound {
                        return Err(Stop::Diverged);
                    }
                    self.max_query = Some(self.max_query.map_or(p, |q| q.max(p)));
                    Ok((self.oracle)(p))
                }
            },
            Expr::Add(a, b) => {
                let (a, b) = (self.go(a, x)?, self.go(b, x)?);
                Ok(match (a, b) {
                    (BoxVal::Val(a), BoxVal::Val(b)) => BoxVal::Val(a.saturating_add(b)),
                    _ => BoxVal::Box,
                })
            }
            Expr::IfEq(a, b, t, e) => {
                let eq = self.go(a, x)? == self.go(b, x)?;
                self.go(if eq { t } else { e }, x)
            }
            Expr::IfBox(c, t, e) => {
                let is_box = self.go(c, x)?.is_box();
                self.go(if is_box { t } else { e }, x)
            }
        }
    }
}

/// Runs a program at input `x` against an oracle; any query at a position
/// at or beyond `query_bound` counts as divergence at this horizon.
pub fn eval<F: Fn(u64) -> BoxVal>(
    e: &Expr,
    x: u64,
    oracle: &F,
    budget: u64,
    query_bound: u64,
) -> EvalReport {
    let mut run = Run { oracle, budget, query_bound, steps: 0, max_query: None };
    let outcome = match run.go(e, x) {
        Ok(v) => Outcome::Halt(v),
        Err(Stop::Diverged) => Outcome::Diverged,
        Err(Stop::OutOfBudget) => Outcome::OutOfBudget,
    };
    EvalReport { outcome, steps: run.steps, max_query: run.max_query }
}

/// Indexed family of oracle programs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionalRegistry {
    programs: BTreeMap<u64, Expr>,
}

impl FunctionalRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, index: u64, program: Expr) {
        self.programs.insert(index, program);
    }

    pub fn get(&self, index: u64) -> Option<&Expr> {
        self.programs.get(&index)
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.programs.keys().copied()
    }
}
