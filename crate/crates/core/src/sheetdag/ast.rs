use std::fmt;

use super::{CellId, EvalErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Pow,
}

/// Variadic / ternary functions. `MIN`, `MAX` and `POW` parse to [`BinaryOp`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Sum,
    If,
    Clamp,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Sum => "SUM",
            Function::If => "IF",
            Function::Clamp => "CLAMP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormulaAst {
    Constant(f64),
    Ref(CellId),
    Neg(Box<FormulaAst>),
    Binary {
        op: BinaryOp,
        left: Box<FormulaAst>,
        right: Box<FormulaAst>,
    },
    Call {
        func: Function,
        args: Vec<FormulaAst>,
    },
}

impl FormulaAst {
    pub fn binary(op: BinaryOp, left: FormulaAst, right: FormulaAst) -> Self {
        FormulaAst::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, FormulaAst::Constant(_))
    }

    /// Every cell referenced by the formula, in first-occurrence order.
    pub fn references(&self) -> Vec<&CellId> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a CellId>) {
        match self {
            FormulaAst::Constant(_) => {}
            FormulaAst::Ref(id) => {
                if !out.contains(&id) {
                    out.push(id);
                }
            }
            FormulaAst::Neg(child) => child.collect_refs(out),
            FormulaAst::Binary { left, right, .. } => {
                left.collect_refs(out);
                right.collect_refs(out);
            }
            FormulaAst::Call { args, .. } => args.iter().for_each(|a| a.collect_refs(out)),
        }
    }
}

impl fmt::Display for FormulaAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaAst::Constant(v) => write!(f, "{v:?}"),
            FormulaAst::Ref(id) => write!(f, "{id}"),
            FormulaAst::Neg(child) => write!(f, "(-{child})"),
            FormulaAst::Binary { op, left, right } => match op {
                BinaryOp::Add => write!(f, "({left} + {right})"),
                BinaryOp::Sub => write!(f, "({left} - {right})"),
                BinaryOp::Mul => write!(f, "({left} * {right})"),
                BinaryOp::Div => write!(f, "({left} / {right})"),
                BinaryOp::Pow => write!(f, "({left} ^ {right})"),
                BinaryOp::Min => write!(f, "MIN({left}, {right})"),
                BinaryOp::Max => write!(f, "MAX({left}, {right})"),
            },
            FormulaAst::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub(crate) fn apply_binary(op: BinaryOp, l: f64, r: f64) -> Result<f64, EvalErrorKind> {
    Ok(match op {
        BinaryOp::Add => l + r,
        BinaryOp::Sub => l - r,
        BinaryOp::Mul => l * r,
        BinaryOp::Div => {
            if r == 0.0 {
                return Err(EvalErrorKind::DivisionByZero);
            }
            l / r
        }
        BinaryOp::Min => l.min(r),
        BinaryOp::Max => l.max(r),
        BinaryOp::Pow => {
            if l < 0.0 && r.fract() != 0.0 {
                return Err(EvalErrorKind::DomainError);
            }
            if l == 0.0 && r < 0.0 {
                return Err(EvalErrorKind::DivisionByZero);
            }
            l.powf(r)
        }
    })
}

/// `IF(c, a, b)` with `c != 0` as true; `CLAMP(x, lo, hi) = min(max(x, lo), hi)`.
pub(crate) fn apply_call(func: Function, args: &[f64]) -> f64 {
    match func {
        Function::Sum => args.iter().sum(),
        Function::If => {
            if args[0] != 0.0 {
                args[1]
            } else {
                args[2]
            }
        }
        Function::Clamp => args[0].max(args[1]).min(args[2]),
    }
}
