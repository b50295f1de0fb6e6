use std::collections::HashMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::expr::{Expr, Func, Node, Symbol};
use crate::scalar::Scalar;
use crate::symmat::SymMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("symbol {0} is not among the tape parameters")]
    UnboundSymbol(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    /// A function was applied outside its real domain; the result would be
    /// non-finite.
    #[error("{0} evaluated outside its domain")]
    Domain(&'static str),
    #[error("symbol {0} has no value")]
    Unbound(Symbol),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op<S> {
    Const(S),
    Param(u32),
    Add2,
    Mul2,
    AddConst(S),
    MulConst(S),
    /// `c - x`.
    SubFromConst(S),
    /// `y + c x` for the top two entries `y, x`.
    MulConstAdd(S),
    AddParam(u32),
    MulParam(u32),
    AddLoad(u32),
    MulLoad(u32),
    /// Pushes the product of two slots.
    LoadMul(u32, u32),
    /// `y + c p_i`.
    AddScaledParam(u32, S),
    Neg,
    Recip,
    /// Small positive integer power by repeated multiplication.
    Square,
    Cube,
    PowSmall(u8),
    Powi(i32),
    /// General power through exp(y log x).
    Pow,
    Exp,
    Log,
    Func(Func),
    /// Copies the top of the stack into a slot, for a repeated subexpression.
    Store(u32),
    Load(u32),
}

/// Postorder instruction list evaluating one or more expressions over a fixed
/// parameter order. Outputs are left on the stack in declaration order.
#[derive(Clone, PartialEq)]
pub struct CompiledTape<S> {
    params: Vec<Symbol>,
    ops: Vec<Op<S>>,
    outputs: usize,
    shape: (usize, usize),
    max_stack: usize,
    /// Slots for repeated subexpressions, kept below the operand stack.
    slots: usize,
}

impl<S: Scalar> CompiledTape<S> {
    /// Compiles a scalar expression. With `params = None` the parameters are
    /// the free symbols in natural order.
    pub fn compile(e: &Expr, params: Option<&[Symbol]>) -> Result<Self, CompileError> {
        let params = params.map_or_else(|| e.free_symbols(), |p| p.to_vec());
        Self::build(std::slice::from_ref(e), params, (1, 1))
    }

    /// Compiles every entry of a matrix, flattened row-major.
    pub fn compile_matrix(m: &SymMatrix, params: Option<&[Symbol]>) -> Result<Self, CompileError> {
        let params = params.map_or_else(
            || {
                let mut all: Vec<Symbol> = m.entries().iter().flat_map(|e| e.free_symbols()).collect();
                all.sort();
                all.dedup();
                all
            },
            |p| p.to_vec(),
        );
        Self::build(m.entries(), params, m.shape())
    }

    fn build(exprs: &[Expr], params: Vec<Symbol>, shape: (usize, usize)) -> Result<Self, CompileError> {
        let mut tape = CompiledTape { params, ops: Vec::new(), outputs: exprs.len(), shape, max_stack: 0, slots: 0 };
        let mut seen = HashMap::new();
        for e in exprs {
            count_repeats(e, &mut seen);
        }
        let mut cse = Cse { seen, slots: HashMap::new() };
        for e in exprs {
            tape.emit(e, &mut cse)?;
        }
        tape.slots = cse.slots.len();
        tape.max_stack = tape.stack_depth();
        Ok(tape)
    }

    fn emit(&mut self, e: &Expr, cse: &mut Cse) -> Result<(), CompileError> {
        let repeated = cse.seen.get(e).is_some_and(|&n| n > 1);
        if repeated {
            if let Some(&slot) = cse.slots.get(e) {
                self.push(Op::Load(slot));
                return Ok(());
            }
        }
        self.emit_node(e, cse)?;
        if repeated {
            let slot = cse.slots.len() as u32;
            cse.slots.insert(e.clone(), slot);
            self.push(Op::Store(slot));
        }
        Ok(())
    }

    fn emit_node(&mut self, e: &Expr, cse: &mut Cse) -> Result<(), CompileError> {
        match e.node() {
            Node::Num(q) => self.push(Op::Const(S::from_rational(q))),
            Node::Sym(s) => {
                let i = self.params.iter().position(|p| p == s).ok_or_else(|| CompileError::UnboundSymbol(s.clone()))?;
                self.push(Op::Param(i as u32));
            }
            Node::Add(ch) => {
                // a leading constant folds into the last addition
                let (c, rest) = split_const(ch);
                self.emit_chain(rest, Op::Add2, cse)?;
                if let Some(c) = c {
                    self.push(Op::AddConst(S::from_rational(c)));
                }
            }
            Node::Mul(ch) => {
                let (c, rest) = split_const(ch);
                self.emit_chain(rest, Op::Mul2, cse)?;
                match c {
                    Some(q) if *q == -num_rational::BigRational::from_integer(1.into()) => self.push(Op::Neg),
                    Some(q) => self.push(Op::MulConst(S::from_rational(q))),
                    None => {}
                }
            }
            Node::Pow(b, x) => match x.as_num().filter(|q| q.is_integer()).and_then(|q| q.to_integer().to_i32()) {
                Some(0) => self.push(Op::Const(S::one())),
                Some(k) => {
                    self.emit(b, cse)?;
                    self.emit_int_pow(k);
                }
                None => {
                    self.emit(b, cse)?;
                    self.emit(x, cse)?;
                    self.push(Op::Pow);
                }
            },
            Node::Func(f, a) => {
                self.emit(a, cse)?;
                self.push(match f {
                    Func::Exp => Op::Exp,
                    Func::Log => Op::Log,
                    _ => Op::Func(*f),
                });
            }
        }
        Ok(())
    }

    /// `a b op c op ...`, which keeps the stack shallow and lets the
    /// peephole pass fuse each operand into its operation.
    fn emit_chain(&mut self, items: &[Expr], op: Op<S>, cse: &mut Cse) -> Result<(), CompileError> {
        for (i, t) in items.iter().enumerate() {
            self.emit(t, cse)?;
            if i > 0 {
                self.push(op);
            }
        }
        Ok(())
    }

    /// Appends an op, fusing it with the previous one where possible.
    fn push(&mut self, op: Op<S>) {
        let fused = match (self.ops.last(), op) {
            (Some(&Op::Const(c)), Op::Add2) => Some(Op::AddConst(c)),
            (Some(&Op::Const(c)), Op::Mul2) => Some(Op::MulConst(c)),
            (Some(&Op::Param(i)), Op::Add2) => Some(Op::AddParam(i)),
            (Some(&Op::Param(i)), Op::Mul2) => Some(Op::MulParam(i)),
            (Some(&Op::Load(i)), Op::Add2) => Some(Op::AddLoad(i)),
            (Some(&Op::Load(i)), Op::Mul2) => Some(Op::MulLoad(i)),
            (Some(&Op::MulConst(c)), Op::Add2) => Some(Op::MulConstAdd(c)),
            (Some(&Op::Neg), Op::AddConst(c)) => Some(Op::SubFromConst(c)),
            (Some(&Op::Load(i)), Op::MulLoad(j)) => Some(Op::LoadMul(i, j)),
            (Some(&Op::Param(i)), Op::MulConstAdd(c)) => Some(Op::AddScaledParam(i, c)),
            _ => None,
        };
        match fused {
            Some(f) => {
                self.ops.pop();
                self.push(f);
            }
            None => self.ops.push(op),
        }
    }

    fn emit_int_pow(&mut self, k: i32) {
        let m = k.unsigned_abs();
        match m {
            0 | 1 => {}
            2 => self.push(Op::Square),
            3 => self.push(Op::Cube),
            4..=8 => self.push(Op::PowSmall(m as u8)),
            _ => {
                self.push(Op::Powi(k));
                return;
            }
        }
        if k < 0 {
            self.push(Op::Recip);
        }
    }

    fn stack_depth(&self) -> usize {
        let (mut depth, mut max) = (0usize, 0usize);
        for op in &self.ops {
            match op {
                Op::Const(_) | Op::Param(_) | Op::Load(_) | Op::LoadMul(..) => depth += 1,
                Op::Add2 | Op::Mul2 | Op::MulConstAdd(_) | Op::Pow => depth -= 1,
                _ => {}
            }
            max = max.max(depth);
        }
        debug_assert_eq!(depth, self.outputs);
        max
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Output shape: `(1, 1)` for a scalar, the matrix shape otherwise.
    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Evaluates into `out`, reusing `stack` as scratch space.
    pub fn eval_into(&self, args: &[S], stack: &mut Vec<S>, out: &mut [S]) -> Result<(), EvalError> {
        if args.len() != self.params.len() {
            return Err(EvalError::Arity { expected: self.params.len(), got: args.len() });
        }
        if out.len() != self.outputs {
            return Err(EvalError::Arity { expected: self.outputs, got: out.len() });
        }
        // every cell is written before it is read, so stale contents are harmless
        let need = self.slots + self.max_stack;
        if stack.len() < need {
            stack.resize(need, S::zero());
        }
        let st = &mut stack[..need];
        let mut sp = self.slots;
        for op in &self.ops {
            match *op {
                Op::Const(c) => {
                    st[sp] = c;
                    sp += 1;
                }
                Op::Param(i) => {
                    st[sp] = args[i as usize];
                    sp += 1;
                }
                Op::Load(i) => {
                    st[sp] = st[i as usize];
                    sp += 1;
                }
                Op::Store(i) => st[i as usize] = st[sp - 1],
                Op::AddLoad(i) => st[sp - 1] = st[sp - 1] + st[i as usize],
                Op::MulLoad(i) => st[sp - 1] = st[sp - 1] * st[i as usize],
                Op::LoadMul(i, j) => {
                    st[sp] = st[i as usize] * st[j as usize];
                    sp += 1;
                }
                Op::AddScaledParam(i, c) => st[sp - 1] = st[sp - 1] + c * args[i as usize],
                Op::Add2 => {
                    sp -= 1;
                    st[sp - 1] = st[sp - 1] + st[sp];
                }
                Op::Mul2 => {
                    sp -= 1;
                    st[sp - 1] = st[sp - 1] * st[sp];
                }
                Op::MulConstAdd(c) => {
                    sp -= 1;
                    st[sp - 1] = st[sp - 1] + c * st[sp];
                }
                Op::Pow => {
                    sp -= 1;
                    let (x, y) = (st[sp - 1], st[sp]);
                    if x <= S::zero() {
                        return Err(EvalError::Domain("pow"));
                    }
                    st[sp - 1] = x.powf(y);
                }
                Op::AddConst(c) => st[sp - 1] = st[sp - 1] + c,
                Op::MulConst(c) => st[sp - 1] = st[sp - 1] * c,
                Op::SubFromConst(c) => st[sp - 1] = c - st[sp - 1],
                Op::AddParam(i) => st[sp - 1] = st[sp - 1] + args[i as usize],
                Op::MulParam(i) => st[sp - 1] = st[sp - 1] * args[i as usize],
                Op::Neg => st[sp - 1] = -st[sp - 1],
                Op::Recip => st[sp - 1] = st[sp - 1].recip(),
                Op::Square => st[sp - 1] = st[sp - 1] * st[sp - 1],
                Op::Cube => {
                    let x = st[sp - 1];
                    st[sp - 1] = x * x * x;
                }
                Op::PowSmall(k) => {
                    let x = st[sp - 1];
                    st[sp - 1] = (1..k).fold(x, |acc, _| acc * x);
                }
                Op::Powi(k) => st[sp - 1] = st[sp - 1].powi(k),
                Op::Exp => st[sp - 1] = st[sp - 1].exp(),
                Op::Log => {
                    let x = st[sp - 1];
                    if x <= S::zero() {
                        return Err(EvalError::Domain("log"));
                    }
                    st[sp - 1] = x.ln();
                }
                Op::Func(f) => st[sp - 1] = apply(f, st[sp - 1])?,
            }
        }
        debug_assert_eq!(sp, self.slots + self.outputs);
        out.copy_from_slice(&st[self.slots..sp]);
        Ok(())
    }

    /// Evaluates at one packed argument vector.
    pub fn eval(&self, args: &[S]) -> Result<Vec<S>, EvalError> {
        let mut out = vec![S::zero(); self.outputs];
        let mut stack = Vec::with_capacity(self.slots + self.max_stack);
        self.eval_into(args, &mut stack, &mut out)?;
        Ok(out)
    }

    /// Evaluates a scalar tape.
    pub fn eval_scalar(&self, args: &[S]) -> Result<S, EvalError> {
        if self.outputs != 1 {
            return Err(EvalError::Arity { expected: 1, got: self.outputs });
        }
        let mut stack = Vec::with_capacity(self.slots + self.max_stack);
        let mut out = [S::zero()];
        self.eval_into(args, &mut stack, &mut out)?;
        Ok(out[0])
    }

    /// Evaluates with one argument slice per parameter (the unpacked calling
    /// convention); each slice must hold exactly one value.
    pub fn eval_unpacked(&self, args: &[&[S]]) -> Result<Vec<S>, EvalError> {
        if args.iter().any(|a| a.len() != 1) {
            return Err(EvalError::Arity { expected: 1, got: args.iter().map(|a| a.len()).max().unwrap_or(0) });
        }
        let packed: Vec<S> = args.iter().map(|a| a[0]).collect();
        self.eval(&packed)
    }

    /// Binds the packed/unpacked convention once: `vec_arg = true` takes one
    /// vector, `false` takes one single-element slice per parameter.
    pub fn eval_with(&self, args: &[S], vec_arg: bool) -> Result<Vec<S>, EvalError> {
        if vec_arg {
            self.eval(args)
        } else {
            let slices: Vec<&[S]> = args.chunks(1).collect();
            self.eval_unpacked(&slices)
        }
    }
}

/// Splits a leading numeric child (canonical sums and products keep their
/// constant first) from the rest.
fn split_const(ch: &[Expr]) -> (Option<&num_rational::BigRational>, &[Expr]) {
    match ch.first().and_then(|c| c.as_num()) {
        Some(q) if ch.len() > 1 => (Some(q), &ch[1..]),
        _ => (None, ch),
    }
}

struct Cse {
    seen: HashMap<Expr, usize>,
    slots: HashMap<Expr, u32>,
}

/// Counts occurrences of every compound subexpression. A repeated subtree is
/// not descended into again, since it will be evaluated once.
fn count_repeats(e: &Expr, seen: &mut HashMap<Expr, usize>) {
    if matches!(e.node(), Node::Num(_) | Node::Sym(_)) {
        return;
    }
    let n = seen.entry(e.clone()).or_insert(0);
    *n += 1;
    if *n == 1 {
        for c in e.children() {
            count_repeats(c, seen);
        }
    }
}

impl<S> fmt::Debug for CompiledTape<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompiledTape")
            .field("params", &self.params)
            .field("ops", &self.ops.len())
            .field("shape", &self.shape)
            .finish()
    }
}

pub(crate) fn apply<S: Scalar>(f: Func, x: S) -> Result<S, EvalError> {
    Ok(match f {
        Func::Log => {
            if x <= S::zero() {
                return Err(EvalError::Domain("log"));
            }
            x.ln()
        }
        Func::Exp => x.exp(),
        Func::Sqrt => {
            if x < S::zero() {
                return Err(EvalError::Domain("sqrt"));
            }
            x.sqrt()
        }
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Asin => {
            if x.abs() > S::one() {
                return Err(EvalError::Domain("asin"));
            }
            x.asin()
        }
    })
}

/// Direct recursive evaluation of an expression, the reference the tape is
/// measured against.
pub fn eval_tree<S: Scalar>(e: &Expr, lookup: &dyn Fn(&Symbol) -> Option<S>) -> Result<S, EvalError> {
    match e.node() {
        Node::Num(q) => Ok(S::from_rational(q)),
        Node::Sym(s) => lookup(s).ok_or_else(|| EvalError::Unbound(s.clone())),
        Node::Add(ch) => ch.iter().try_fold(S::zero(), |acc, c| Ok(acc + eval_tree(c, lookup)?)),
        Node::Mul(ch) => ch.iter().try_fold(S::one(), |acc, c| Ok(acc * eval_tree(c, lookup)?)),
        Node::Pow(b, x) => {
            let base = eval_tree(b, lookup)?;
            match x.as_num().filter(|q| q.is_integer()).and_then(|q| q.to_integer().to_i32()) {
                Some(k) => Ok(base.powi(k)),
                None => {
                    if base <= S::zero() {
                        return Err(EvalError::Domain("pow"));
                    }
                    Ok(base.powf(eval_tree(x, lookup)?))
                }
            }
        }
        Node::Func(f, a) => apply(*f, eval_tree(a, lookup)?),
    }
}

/// Tree evaluation with values given in `params` order.
pub fn eval_tree_at<S: Scalar>(e: &Expr, params: &[Symbol], values: &[S]) -> Result<S, EvalError> {
    eval_tree(e, &|s: &Symbol| params.iter().position(|p| p == s).map(|i| values[i]))
}

/// Exact value of an expression built from rationals with `+`, `*` and integer
/// powers; `None` when a function, a fractional power or a division by zero
/// is met.
pub fn eval_exact(
    e: &Expr,
    lookup: &dyn Fn(&Symbol) -> Option<num_rational::BigRational>,
) -> Option<num_rational::BigRational> {
    use num_rational::BigRational;
    match e.node() {
        Node::Num(q) => Some(q.clone()),
        Node::Sym(s) => lookup(s),
        Node::Add(ch) => ch.iter().try_fold(BigRational::zero(), |acc, c| Some(acc + eval_exact(c, lookup)?)),
        Node::Mul(ch) => {
            ch.iter().try_fold(BigRational::from_integer(1.into()), |acc, c| Some(acc * eval_exact(c, lookup)?))
        }
        Node::Pow(b, x) => {
            let k = x.as_i64()?;
            let base = eval_exact(b, lookup)?;
            crate::rational::pow(&base, k)
        }
        Node::Func(..) => None,
    }
}
