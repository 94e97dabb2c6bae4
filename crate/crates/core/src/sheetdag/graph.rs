use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::path::Path;

use super::ast::{apply_binary, apply_call, BinaryOp, FormulaAst, Function};
use super::{parse_formula, CellId, EvalErrorKind, SheetError};

pub type ValueMap = BTreeMap<CellId, f64>;

/// Formula with references resolved to cell indices.
#[derive(Debug, Clone)]
enum Expr {
    Const(f64),
    Ref(usize),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Vec<Expr>),
}

impl Expr {
    fn compile(ast: &FormulaAst, index: &HashMap<CellId, usize>) -> Expr {
        match ast {
            FormulaAst::Constant(v) => Expr::Const(*v),
            FormulaAst::Ref(id) => Expr::Ref(index[id]),
            FormulaAst::Neg(c) => Expr::Neg(Box::new(Expr::compile(c, index))),
            FormulaAst::Binary { op, left, right } => Expr::Binary(
                *op,
                Box::new(Expr::compile(left, index)),
                Box::new(Expr::compile(right, index)),
            ),
            FormulaAst::Call { func, args } => {
                Expr::Call(*func, args.iter().map(|a| Expr::compile(a, index)).collect())
            }
        }
    }

    fn eval(&self, values: &[f64]) -> Result<f64, EvalErrorKind> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Ref(i) => Ok(values[*i]),
            Expr::Neg(c) => Ok(-c.eval(values)?),
            Expr::Binary(op, l, r) => apply_binary(*op, l.eval(values)?, r.eval(values)?),
            Expr::Call(func, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval(values))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(apply_call(*func, &vals))
            }
        }
    }
}

/// A dependency graph of named formula cells with incremental evaluation.
///
/// Invariant: if a cell is dirty, every cell that (transitively) reads it is
/// dirty as well. Dirty propagation can therefore stop at cells already
/// marked.
#[derive(Debug, Clone)]
pub struct SheetGraph {
    names: Vec<CellId>,
    index: HashMap<CellId, usize>,
    formulas: Vec<FormulaAst>,
    compiled: Vec<Expr>,
    values: Vec<f64>,
    deps: Vec<Vec<usize>>,
    dependents: Vec<Vec<usize>>,
    topo: Vec<usize>,
    dirty: Vec<bool>,
    dirty_count: usize,
    last_evaluated: usize,
    total_evaluated: u64,
    eval_counts: Vec<u64>,
}

impl SheetGraph {
    /// Parses every formula and builds the dependency graph. All cells start dirty.
    pub fn build<I, K, V>(defs: I) -> Result<Self, SheetError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut parsed: BTreeMap<CellId, FormulaAst> = BTreeMap::new();
        for (name, text) in defs {
            let id = CellId::new(name.as_ref())?;
            let ast = parse_formula(text.as_ref())?;
            if parsed.insert(id.clone(), ast).is_some() {
                return Err(SheetError::DuplicateCell(id.0));
            }
        }
        Self::from_asts(parsed)
    }

    pub fn from_asts(cells: BTreeMap<CellId, FormulaAst>) -> Result<Self, SheetError> {
        let names: Vec<CellId> = cells.keys().cloned().collect();
        let index: HashMap<CellId, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let formulas: Vec<FormulaAst> = cells.into_values().collect();

        let mut deps = Vec::with_capacity(names.len());
        for (i, ast) in formulas.iter().enumerate() {
            let mut d = Vec::new();
            for r in ast.references() {
                match index.get(r) {
                    Some(&j) => d.push(j),
                    None => {
                        return Err(SheetError::UndefinedReference {
                            cell: names[i].clone(),
                            missing: r.clone(),
                        })
                    }
                }
            }
            d.sort_unstable();
            d.dedup();
            deps.push(d);
        }

        let mut dependents = vec![Vec::new(); names.len()];
        for (i, d) in deps.iter().enumerate() {
            for &j in d {
                dependents[j].push(i);
            }
        }

        let topo = topological_order(&deps, &dependents).map_err(|cycle| {
            SheetError::Cycle(cycle.into_iter().map(|i| names[i].clone()).collect())
        })?;

        let compiled = formulas.iter().map(|f| Expr::compile(f, &index)).collect();
        let n = names.len();
        Ok(Self {
            names,
            index,
            formulas,
            compiled,
            values: vec![0.0; n],
            deps,
            dependents,
            topo,
            dirty: vec![true; n],
            dirty_count: n,
            last_evaluated: 0,
            total_evaluated: 0,
            eval_counts: vec![0; n],
        })
    }

    /// Builds a graph from a JSON object mapping cell name to formula text.
    pub fn from_json_str(json: &str) -> Result<Self, SheetError> {
        let defs: BTreeMap<String, String> =
            serde_json::from_str(json).map_err(|e| SheetError::Definition(e.to_string()))?;
        Self::build(defs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SheetError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| SheetError::Definition(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn lookup(&self, name: &str) -> Result<usize, SheetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SheetError::UnknownCell(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn cells(&self) -> impl Iterator<Item = &CellId> {
        self.names.iter()
    }

    pub fn formula(&self, name: &str) -> Result<&FormulaAst, SheetError> {
        Ok(&self.formulas[self.lookup(name)?])
    }

    pub fn is_input(&self, name: &str) -> Result<bool, SheetError> {
        Ok(self.formulas[self.lookup(name)?].is_constant())
    }

    /// Cells read by `name`, sorted by name.
    pub fn dependencies(&self, name: &str) -> Result<Vec<&CellId>, SheetError> {
        let i = self.lookup(name)?;
        Ok(self.deps[i].iter().map(|&j| &self.names[j]).collect())
    }

    pub fn topo_order(&self) -> Vec<&CellId> {
        self.topo.iter().map(|&i| &self.names[i]).collect()
    }

    pub fn is_dirty(&self, name: &str) -> Result<bool, SheetError> {
        Ok(self.dirty[self.lookup(name)?])
    }

    pub fn dirty_cells(&self) -> Vec<&CellId> {
        self.names
            .iter()
            .zip(&self.dirty)
            .filter_map(|(n, &d)| d.then_some(n))
            .collect()
    }

    /// Current (possibly stale, if dirty) value of a cell.
    pub fn value(&self, name: &str) -> Result<f64, SheetError> {
        Ok(self.values[self.lookup(name)?])
    }

    pub fn values(&self) -> ValueMap {
        self.names.iter().cloned().zip(self.values.iter().copied()).collect()
    }

    /// Number of cells evaluated by the most recent successful recompute.
    pub fn last_evaluated(&self) -> usize {
        self.last_evaluated
    }

    /// Number of cell evaluations performed over the graph's lifetime.
    pub fn total_evaluated(&self) -> u64 {
        self.total_evaluated
    }

    /// How many times `name` has been evaluated.
    pub fn evaluations_of(&self, name: &str) -> Result<u64, SheetError> {
        Ok(self.eval_counts[self.lookup(name)?])
    }

    /// Overwrites an input cell. Writing the bit-identical current value is a no-op.
    pub fn set_input(&mut self, name: &str, value: f64) -> Result<(), SheetError> {
        let i = self.lookup(name)?;
        let FormulaAst::Constant(current) = self.formulas[i] else {
            return Err(SheetError::NotAnInputCell(self.names[i].clone()));
        };
        if current.to_bits() == value.to_bits() {
            return Ok(());
        }
        self.formulas[i] = FormulaAst::Constant(value);
        self.compiled[i] = Expr::Const(value);
        self.mark_dirty(i);
        Ok(())
    }

    fn mark_dirty(&mut self, start: usize) {
        if self.dirty[start] {
            return;
        }
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            if self.dirty[i] {
                continue;
            }
            self.dirty[i] = true;
            self.dirty_count += 1;
            stack.extend(self.dependents[i].iter().copied().filter(|&j| !self.dirty[j]));
        }
    }

    /// Evaluates dirty cells in topological order and returns the number of
    /// cells evaluated. On error the dirty set is left unchanged.
    pub fn recompute(&mut self) -> Result<usize, SheetError> {
        if self.dirty_count == 0 {
            self.last_evaluated = 0;
            return Ok(0);
        }
        let mut evaluated = 0;
        for &i in &self.topo {
            if !self.dirty[i] {
                continue;
            }
            let v = self.compiled[i].eval(&self.values).map_err(|kind| SheetError::Eval {
                cell: self.names[i].clone(),
                kind,
            })?;
            self.values[i] = v;
            self.eval_counts[i] += 1;
            evaluated += 1;
        }
        self.dirty.iter_mut().for_each(|d| *d = false);
        self.dirty_count = 0;
        self.last_evaluated = evaluated;
        self.total_evaluated += evaluated as u64;
        Ok(evaluated)
    }

    /// Recomputes dirty cells and returns the full value map.
    pub fn recompute_dirty(&mut self) -> Result<ValueMap, SheetError> {
        self.recompute()?;
        Ok(self.values())
    }

    /// Formula text of every cell, suitable for [`SheetGraph::build`].
    pub fn definitions(&self) -> BTreeMap<String, String> {
        self.names
            .iter()
            .zip(&self.formulas)
            .map(|(n, f)| (n.to_string(), f.to_string()))
            .collect()
    }
}

/// Kahn's algorithm with a min-heap so the order is deterministic. On failure
/// returns one cycle, starting from its lowest-indexed cell.
fn topological_order(deps: &[Vec<usize>], dependents: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = deps.len();
    let mut pending: Vec<usize> = deps.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| pending[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &dependents[i] {
            pending[j] -= 1;
            if pending[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    // Every unplaced cell still reads at least one unplaced cell, so walking
    // unplaced dependencies must revisit a cell.
    let start = (0..n).find(|&i| pending[i] > 0).expect("unplaced cell exists");
    let mut path = vec![start];
    let mut seen_at = HashMap::from([(start, 0usize)]);
    let mut cur = start;
    loop {
        let next = *deps[cur]
            .iter()
            .find(|&&j| pending[j] > 0)
            .expect("unplaced cell has an unplaced dependency");
        if let Some(&at) = seen_at.get(&next) {
            let mut cycle = path.split_off(at);
            let min_pos = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, &c)| c)
                .map(|(p, _)| p)
                .unwrap_or(0);
            cycle.rotate_left(min_pos);
            return Err(cycle);
        }
        seen_at.insert(next, path.len());
        path.push(next);
        cur = next;
    }
}
