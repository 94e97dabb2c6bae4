//! Random acyclic sheets plus a from-scratch reference evaluator that
//! shares no code with the engine.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Cell(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// `l / (1 + r * r)`, never a zero denominator
    SafeDiv(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Sum(Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `2 ^ CLAMP(e, -3, 3)`
    Exp2(Box<Expr>),
}

impl Expr {
    pub fn render(&self, names: &[String]) -> String {
        let r = |e: &Expr| e.render(names);
        match self {
            Expr::Num(v) => format!("{v:?}"),
            Expr::Cell(i) => names[*i].clone(),
            Expr::Neg(e) => format!("-({})", r(e)),
            Expr::Add(a, b) => format!("({} + {})", r(a), r(b)),
            Expr::Sub(a, b) => format!("({} - {})", r(a), r(b)),
            Expr::Mul(a, b) => format!("({} * {})", r(a), r(b)),
            Expr::SafeDiv(a, b) => format!("({} / (1 + {} * {}))", r(a), r(b), r(b)),
            Expr::Min(a, b) => format!("MIN({}, {})", r(a), r(b)),
            Expr::Max(a, b) => format!("max({}, {})", r(a), r(b)),
            Expr::Sum(xs) => format!("SUM({})", xs.iter().map(r).collect::<Vec<_>>().join(", ")),
            Expr::If(c, a, b) => format!("IF({}, {}, {})", r(c), r(a), r(b)),
            Expr::Exp2(e) => format!("2 ^ CLAMP({}, -3, 3)", r(e)),
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Cell(i) => v[*i],
            Expr::Neg(e) => -e.eval(v),
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::SafeDiv(a, b) => {
                let d = b.eval(v);
                a.eval(v) / (1.0 + d * d)
            }
            Expr::Min(a, b) => a.eval(v).min(b.eval(v)),
            Expr::Max(a, b) => a.eval(v).max(b.eval(v)),
            Expr::Sum(xs) => xs.iter().map(|x| x.eval(v)).sum(),
            Expr::If(c, a, b) => {
                if c.eval(v) != 0.0 {
                    a.eval(v)
                } else {
                    b.eval(v)
                }
            }
            // opaque base: a literal 2 lets the optimiser swap pow for exp2
            Expr::Exp2(e) => std::hint::black_box(2f64).powf(e.eval(v).max(-3.0).min(3.0)),
        }
    }

    fn refs(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Cell(i) => out.push(*i),
            Expr::Neg(e) | Expr::Exp2(e) => e.refs(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::SafeDiv(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.refs(out);
                b.refs(out);
            }
            Expr::Sum(xs) => xs.iter().for_each(|x| x.refs(out)),
            Expr::If(c, a, b) => {
                c.refs(out);
                a.refs(out);
                b.refs(out);
            }
        }
    }
}

/// Cell `i` may only reference cells `< i`; names are shuffled so the
/// creation order is not the lexical order.
#[derive(Debug, Clone)]
pub struct RandomSheet {
    pub names: Vec<String>,
    /// `None` marks an input cell holding `inputs[i]`.
    pub exprs: Vec<Option<Expr>>,
    pub inputs: Vec<f64>,
}

fn random_expr(rng: &mut ChaCha8Rng, below: usize, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        if below > 0 && rng.random_bool(0.8) {
            return Expr::Cell(rng.random_range(0..below));
        }
        return Expr::Num((rng.random_range(-40..=40) as f64) / 8.0);
    }
    let choice = rng.random_range(0..11);
    let n = rng.random_range(1..=4);
    let mut sub = || Box::new(random_expr(rng, below, depth - 1));
    match choice {
        0 => Expr::Neg(sub()),
        1 => Expr::Add(sub(), sub()),
        2 => Expr::Sub(sub(), sub()),
        3 => Expr::Mul(sub(), sub()),
        4 => Expr::SafeDiv(sub(), sub()),
        5 => Expr::Min(sub(), sub()),
        6 => Expr::Max(sub(), sub()),
        7 => Expr::Sum((0..n).map(|_| *sub()).collect()),
        8 => Expr::If(sub(), sub(), sub()),
        9 => Expr::Exp2(sub()),
        _ => Expr::Add(sub(), sub()),
    }
}

impl RandomSheet {
    pub fn generate(seed: u64, max_cells: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=max_cells);
        let mut labels: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            labels.swap(i, rng.random_range(0..=i));
        }
        let names = labels.iter().map(|l| format!("c{l}")).collect();
        let mut exprs = Vec::with_capacity(n);
        let mut inputs = Vec::with_capacity(n);
        for i in 0..n {
            inputs.push((rng.random_range(-80..=80) as f64) / 16.0);
            if i == 0 || rng.random_bool(0.25) {
                exprs.push(None);
            } else {
                // keep values bounded so products never overflow
                let e = random_expr(&mut rng, i, 3);
                exprs.push(Some(Expr::Max(
                    Box::new(Expr::Num(-100.0)),
                    Box::new(Expr::Min(Box::new(e), Box::new(Expr::Num(100.0)))),
                )));
            }
        }
        Self { names, exprs, inputs }
    }

    pub fn definitions(&self) -> BTreeMap<String, String> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let text = match &self.exprs[i] {
                    None => format!("{:?}", self.inputs[i]),
                    Some(e) => e.render(&self.names),
                };
                (n.clone(), text)
            })
            .collect()
    }

    pub fn input_indices(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&i| self.exprs[i].is_none()).collect()
    }

    /// Every value, computed from scratch in creation order.
    pub fn evaluate(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.names.len()];
        for i in 0..v.len() {
            v[i] = match &self.exprs[i] {
                None => self.inputs[i],
                Some(e) => e.eval(&v),
            };
        }
        v
    }

    pub fn deps(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(e) = &self.exprs[i] {
            e.refs(&mut out);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Cells reachable from `start` along dependency edges reversed
    /// (`start` included).
    pub fn downstream(&self, start: &[usize]) -> Vec<bool> {
        let n = self.names.len();
        let mut hit = vec![false; n];
        for &s in start {
            hit[s] = true;
        }
        for i in 0..n {
            if !hit[i] && self.deps(i).iter().any(|&d| hit[d]) {
                hit[i] = true;
            }
        }
        hit
    }
}
