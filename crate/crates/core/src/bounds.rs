//! The quantitative recursions, evaluated exactly or built as expression trees.
//!
//! Every formula is written once against [`Ctx`]. [`Numeric`] evaluates it
//! with exact rationals under a magnitude cap, [`Symbolic`] records it as an
//! [`Expr`] that can later be interpreted by any context.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use num::bigint::{BigInt, BigUint};
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{display_rational, int, parse_rational, ratio, Rational};

/// Largest bit length of a numerator or denominator before a value overflows.
pub const DEFAULT_CAP_BITS: u64 = 1 << 20;
/// Most steps an iteration may take before it is reported as overflow.
pub const DEFAULT_ITER_LIMIT: u64 = 1 << 22;
/// Largest `n` for which `|Subtr_l([k]^{<n})|` is computed.
pub const SUBTR_LIMIT: u64 = 1 << 16;

/// Recursion depth in `m` past which the densities in the `DCS` recursion
/// are squared beyond any cap: each level replaces `δ` by at most `δ²/16`.
const NUMERIC_DCS_DEPTH: u64 = 64;
const SYMBOLIC_DCS_DEPTH: u64 = 16;

pub const ORACLE_NAMES: [&str; 6] = ["HJ", "GR", "DHJ", "DCS", "CS", "SubtrCount"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    Fin(Rational),
    Overflow,
    Missing(String),
    Undefined(String),
}

impl Val {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Val::Fin(r) => Some(r),
            _ => None,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => a.partial_cmp(b),
            (Val::Fin(_), Val::Overflow) => Some(Less),
            (Val::Overflow, Val::Fin(_)) => Some(Greater),
            (Val::Overflow, Val::Overflow) => Some(Equal),
            _ => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(r) => write!(f, "{}", display_rational(r)),
            Val::Overflow => write!(f, "OVERFLOW"),
            Val::Missing(s) => write!(f, "MISSING({s})"),
            Val::Undefined(s) => write!(f, "UNDEFINED({s})"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Entry {
    name: String,
    args: Vec<serde_json::Value>,
    value: serde_json::Value,
}

fn json_rational(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number or \"p/q\", got {other}"))),
    }
}

fn rational_json(r: &Rational) -> serde_json::Value {
    match r.to_integer().to_i64() {
        Some(n) if r.is_integer() => serde_json::Value::from(n),
        _ => serde_json::Value::from(display_rational(r)),
    }
}

/// Exact values for the Ramsey-type numbers the recursions call.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleTable {
    entries: BTreeMap<(String, Vec<Rational>), Rational>,
}

impl OracleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, args: Vec<Rational>, value: Rational) -> Result<()> {
        if !ORACLE_NAMES.contains(&name) {
            return Err(Error::Parse(format!("unknown oracle name {name}")));
        }
        let positive = if name == "SubtrCount" { !value.is_negative() } else { value.is_positive() };
        if !positive || !value.is_integer() {
            return Err(Error::OutOfRange(format!("{name} value {value} must be a positive integer")));
        }
        if name == "GR" {
            if args.len() != 4 {
                return Err(Error::ArityMismatch { expected: 4, got: args.len() });
            }
            // The chain n_i = GR(k, n_{i+1}+1, m, r) needs GR(k,d,m,r) ≥ d.
            if value < args[1] {
                return Err(Error::OutOfRange(format!(
                    "GR{:?} = {value} is below its second argument",
                    args.iter().map(display_rational).collect::<Vec<_>>()
                )));
            }
        }
        self.entries.insert((name.to_string(), args), value);
        Ok(())
    }

    pub fn get(&self, name: &str, args: &[Rational]) -> Option<&Rational> {
        self.entries.get(&(name.to_string(), args.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A JSON list of `{name, args, value}`; rationals may be written `"p/q"`.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<Entry> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut t = Self::new();
        for row in rows {
            let args = row.args.iter().map(json_rational).collect::<Result<Vec<_>>>()?;
            t.insert(&row.name, args, json_rational(&row.value)?)?;
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Entry> = self
            .entries
            .iter()
            .map(|((name, args), v)| Entry {
                name: name.clone(),
                args: args.iter().map(rational_json).collect(),
                value: rational_json(v),
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("serializable")
    }
}

/// `|Subtr_l([k]^{<n})|`, summing over stem length and generator lengths:
/// a left variable word of length `d` has `(k+1)^{d-1}` choices.
pub fn subtr_count(k: u64, n: u64, l: u64) -> Option<BigUint> {
    if n > SUBTR_LIMIT {
        return None;
    }
    let kk = BigUint::from(k);
    let geo = |len: u64| -> BigUint {
        // Σ_{s<len} k^s
        let mut acc = BigUint::zero();
        let mut p = BigUint::one();
        for _ in 0..len {
            acc += &p;
            p *= &kk;
        }
        acc
    };
    if n == 0 {
        return Some(BigUint::zero());
    }
    if l == 0 {
        return Some(geo(n));
    }
    if l > n - 1 {
        return Some(BigUint::zero());
    }
    let x = BigUint::from(k + 1);
    // stems[j] = Σ_{s<j} k^s, built incrementally.
    let mut stems = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::zero();
    let mut p = BigUint::one();
    stems.push(acc.clone());
    for _ in 0..n {
        acc += &p;
        p *= &kk;
        stems.push(acc.clone());
    }
    let mut total = BigUint::zero();
    // C(D-1, l-1) (k+1)^{D-l} for D = l, l+1, ...
    let mut binom = BigUint::one();
    let mut xp = BigUint::one();
    for d in l..n {
        total += &binom * &xp * &stems[(n - d) as usize];
        // C(d, l-1) = C(d-1, l-1) · d / (d-l+1)
        binom = binom * BigUint::from(d) / BigUint::from(d - l + 1);
        xp *= &x;
    }
    Some(total)
}

/// Operations the recursions are written against.
pub trait Ctx: Sized {
    type V: Clone;
    fn lit(&self, r: Rational) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn div(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn min(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn max(&self, a: &Self::V, b: &Self::V) -> Self::V;
    /// `a^b` for an integer exponent `b`.
    fn pow(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn floor(&self, a: &Self::V) -> Self::V;
    fn ceil(&self, a: &Self::V) -> Self::V;
    fn if_less(
        &self,
        a: &Self::V,
        b: &Self::V,
        then: &dyn Fn(&Self) -> Self::V,
        els: &dyn Fn(&Self) -> Self::V,
    ) -> Self::V;
    /// Table value if present, else the fallback, else a missing leaf.
    fn oracle(&self, name: &str, args: &[Self::V], fallback: Option<&dyn Fn(&Self) -> Self::V>) -> Self::V;
    fn subtr(&self, k: &Self::V, n: &Self::V, l: &Self::V) -> Self::V;
    /// `f^{(count)}(seed)`.
    fn iterate(&self, label: &str, f: &dyn Fn(&Self, Self::V) -> Self::V, count: &Self::V, seed: &Self::V) -> Self::V;
    /// A concrete natural number, when the value is one.
    fn structural(&self, v: &Self::V) -> Option<u64>;
    fn unfold_limit(&self) -> u64;
    /// `DCS(k, m, δ)` for an `m` that cannot be unfolded now.
    fn defer_dcs(&self, k: u32, m: &Self::V, delta: &Self::V) -> Self::V;

    fn nat(&self, n: u64) -> Self::V {
        self.lit(int(n))
    }
    fn frac(&self, p: i64, q: i64) -> Self::V {
        self.lit(ratio(p, q))
    }
    fn inv(&self, a: &Self::V) -> Self::V {
        self.div(&self.nat(1), a)
    }
    fn sq(&self, a: &Self::V) -> Self::V {
        self.mul(a, a)
    }
}

/// Exact evaluation with a magnitude cap.
pub struct Numeric<'t> {
    table: &'t OracleTable,
    cap_bits: u64,
    iter_limit: u64,
    memo: RefCell<HashMap<(String, Vec<Rational>), Val>>,
}

impl<'t> Numeric<'t> {
    pub fn new(table: &'t OracleTable) -> Self {
        Self::with_limits(table, DEFAULT_CAP_BITS, DEFAULT_ITER_LIMIT)
    }

    pub fn with_limits(table: &'t OracleTable, cap_bits: u64, iter_limit: u64) -> Self {
        Self {
            table,
            cap_bits,
            iter_limit,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn check(&self, r: Rational) -> Val {
        if r.numer().bits() > self.cap_bits || r.denom().bits() > self.cap_bits {
            Val::Overflow
        } else {
            Val::Fin(r)
        }
    }

    fn bin(&self, a: &Val, b: &Val, f: impl FnOnce(&Rational, &Rational) -> Val) -> Val {
        match (a, b) {
            (Val::Missing(_) | Val::Undefined(_), _) => a.clone(),
            (_, Val::Missing(_) | Val::Undefined(_)) => b.clone(),
            (Val::Fin(x), Val::Fin(y)) => f(x, y),
            _ => Val::Overflow,
        }
    }

    fn un(&self, a: &Val, f: impl FnOnce(&Rational) -> Val) -> Val {
        match a {
            Val::Fin(x) => f(x),
            other => other.clone(),
        }
    }

    fn values(&self, args: &[Val]) -> std::result::Result<Vec<Rational>, Val> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            match a {
                Val::Fin(r) => out.push(r.clone()),
                _ => {
                    let bad = args.iter().find(|a| matches!(a, Val::Missing(_) | Val::Undefined(_)));
                    return Err(bad.cloned().unwrap_or(Val::Overflow));
                }
            }
        }
        Ok(out)
    }
}

fn call_label(name: &str, args: &[Rational]) -> String {
    let parts: Vec<String> = args.iter().map(display_rational).collect();
    format!("{name}({})", parts.join(","))
}

impl Ctx for Numeric<'_> {
    type V = Val;

    fn lit(&self, r: Rational) -> Val {
        self.check(r)
    }
    fn add(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, y| self.check(x + y))
    }
    fn sub(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, y| self.check(x - y))
    }
    fn mul(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, y| self.check(x * y))
    }
    fn div(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, y| {
            if y.is_zero() {
                Val::Undefined("division by zero".into())
            } else {
                self.check(x / y)
            }
        })
    }
    fn min(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, y| Val::Fin(x.min(y).clone()))
    }
    fn max(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, y| Val::Fin(x.max(y).clone()))
    }
    fn pow(&self, a: &Val, b: &Val) -> Val {
        self.bin(a, b, |x, e| {
            if !e.is_integer() {
                return Val::Undefined("non-integer exponent".into());
            }
            if x.is_zero() && !e.is_positive() {
                return Val::Undefined("zero to a non-positive power".into());
            }
            if x.is_zero() {
                return Val::Fin(Rational::zero());
            }
            if x.abs().is_one() {
                let even = (e.to_integer() % BigInt::from(2)).is_zero();
                return Val::Fin(if x.is_negative() && !even { -Rational::one() } else { Rational::one() });
            }
            let bits = x.numer().bits().max(x.denom().bits());
            let mag = match e.to_integer().abs().to_u64() {
                Some(m) => m,
                None => return Val::Overflow,
            };
            // |x|^e has at least (bits-1)·e bits in its numerator or denominator.
            if (bits - 1).saturating_mul(mag) > self.cap_bits {
                return Val::Overflow;
            }
            let p = num::pow(x.clone(), mag as usize);
            self.check(if e.is_negative() { Rational::one() / p } else { p })
        })
    }
    fn floor(&self, a: &Val) -> Val {
        self.un(a, |x| Val::Fin(x.floor()))
    }
    fn ceil(&self, a: &Val) -> Val {
        self.un(a, |x| Val::Fin(x.ceil()))
    }
    fn if_less(&self, a: &Val, b: &Val, then: &dyn Fn(&Self) -> Val, els: &dyn Fn(&Self) -> Val) -> Val {
        match (a, b) {
            (Val::Fin(x), Val::Fin(y)) => {
                if x < y {
                    then(self)
                } else {
                    els(self)
                }
            }
            // An overflowed left side is larger than any finite bound.
            (Val::Overflow, Val::Fin(_)) => els(self),
            (Val::Fin(_), Val::Overflow) => then(self),
            _ => self.bin(a, b, |_, _| Val::Overflow),
        }
    }
    fn oracle(&self, name: &str, args: &[Val], fallback: Option<&dyn Fn(&Self) -> Val>) -> Val {
        let args = match self.values(args) {
            Ok(a) => a,
            Err(v) => return v,
        };
        if let Some(v) = self.table.get(name, &args) {
            return self.check(v.clone());
        }
        let key = (name.to_string(), args);
        if let Some(v) = self.memo.borrow().get(&key) {
            return v.clone();
        }
        let v = match fallback {
            Some(f) => f(self),
            None => Val::Missing(call_label(name, &key.1)),
        };
        self.memo.borrow_mut().insert(key, v.clone());
        v
    }
    fn subtr(&self, k: &Val, n: &Val, l: &Val) -> Val {
        let args = match self.values(&[k.clone(), n.clone(), l.clone()]) {
            Ok(a) => a,
            Err(v) => return v,
        };
        if let Some(v) = self.table.get("SubtrCount", &args) {
            return Val::Fin(v.clone());
        }
        let nat = |r: &Rational| if r.is_integer() { r.to_integer().to_u64() } else { None };
        let (Some(kk), Some(nn), Some(ll)) = (nat(&args[0]), nat(&args[1]), nat(&args[2])) else {
            if args.iter().all(|r| r.is_integer() && !r.is_negative()) {
                return Val::Overflow;
            }
            return Val::Undefined(call_label("SubtrCount", &args));
        };
        // The count has about n·log2(k+1) bits.
        let est = nn.saturating_mul(64 - (kk + 1).leading_zeros() as u64);
        if est > self.cap_bits.saturating_mul(2) {
            return Val::Overflow;
        }
        let key = ("SubtrCount".to_string(), args);
        if let Some(v) = self.memo.borrow().get(&key) {
            return v.clone();
        }
        let v = match subtr_count(kk, nn, ll) {
            Some(c) => self.check(Rational::from_integer(c.into())),
            None => Val::Overflow,
        };
        self.memo.borrow_mut().insert(key, v.clone());
        v
    }
    fn iterate(&self, _label: &str, f: &dyn Fn(&Self, Val) -> Val, count: &Val, seed: &Val) -> Val {
        let n = match count {
            Val::Fin(r) if r.is_integer() && !r.is_negative() => r.to_integer(),
            Val::Fin(r) => return Val::Undefined(format!("iteration count {}", display_rational(r))),
            other => return other.clone(),
        };
        let mut x = seed.clone();
        let mut i = BigInt::zero();
        let mut steps = 0u64;
        while i < n {
            if x.finite().is_none() {
                return x;
            }
            if steps >= self.iter_limit {
                return Val::Overflow;
            }
            let y = f(self, x.clone());
            if y == x {
                return x;
            }
            x = y;
            i += 1;
            steps += 1;
        }
        x
    }
    fn structural(&self, v: &Val) -> Option<u64> {
        v.finite().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_u64())
    }
    fn unfold_limit(&self) -> u64 {
        NUMERIC_DCS_DEPTH
    }
    fn defer_dcs(&self, _k: u32, m: &Val, _delta: &Val) -> Val {
        match m {
            Val::Fin(_) => Val::Overflow,
            other => other.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Pow,
}

/// An unevaluated bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var(u32),
    Bin(Op, Rc<Expr>, Rc<Expr>),
    Floor(Rc<Expr>),
    Ceil(Rc<Expr>),
    IfLess {
        a: Rc<Expr>,
        b: Rc<Expr>,
        then: Rc<Expr>,
        els: Rc<Expr>,
    },
    Oracle {
        name: String,
        args: Vec<Rc<Expr>>,
        fallback: Option<Rc<Expr>>,
    },
    SubtrCount(Rc<Expr>, Rc<Expr>, Rc<Expr>),
    /// `DCS(k, m, δ)` unfolded only once `m` is known.
    Dcs {
        k: u32,
        m: Rc<Expr>,
        delta: Rc<Expr>,
    },
    Iterate {
        label: String,
        var: u32,
        body: Rc<Expr>,
        count: Rc<Expr>,
        seed: Rc<Expr>,
    },
}

impl Expr {
    /// Distinct nodes, counting shared subtrees once.
    pub fn node_count(self: &Rc<Self>) -> usize {
        fn walk(e: &Rc<Expr>, seen: &mut HashSet<*const Expr>) {
            if !seen.insert(Rc::as_ptr(e)) {
                return;
            }
            match &**e {
                Expr::Const(_) | Expr::Var(_) => {}
                Expr::Bin(_, a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
                Expr::Floor(a) | Expr::Ceil(a) => walk(a, seen),
                Expr::IfLess { a, b, then, els } => {
                    for x in [a, b, then, els] {
                        walk(x, seen);
                    }
                }
                Expr::Oracle { args, fallback, .. } => {
                    for x in args {
                        walk(x, seen);
                    }
                    if let Some(f) = fallback {
                        walk(f, seen);
                    }
                }
                Expr::SubtrCount(a, b, c) => {
                    for x in [a, b, c] {
                        walk(x, seen);
                    }
                }
                Expr::Dcs { m, delta, .. } => {
                    walk(m, seen);
                    walk(delta, seen);
                }
                Expr::Iterate { body, count, seed, .. } => {
                    for x in [body, count, seed] {
                        walk(x, seen);
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// Oracle leaves with no fallback.
    pub fn leaves(self: &Rc<Self>) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(Rc::as_ptr(&e)) {
                continue;
            }
            match &*e {
                Expr::Const(_) | Expr::Var(_) => {}
                Expr::Bin(_, a, b) => stack.extend([a.clone(), b.clone()]),
                Expr::Floor(a) | Expr::Ceil(a) => stack.push(a.clone()),
                Expr::IfLess { a, b, then, els } => stack.extend([a.clone(), b.clone(), then.clone(), els.clone()]),
                Expr::Oracle { name, args, fallback } => {
                    stack.extend(args.iter().cloned());
                    match fallback {
                        Some(f) => stack.push(f.clone()),
                        None => out.push(name.clone()),
                    }
                }
                Expr::SubtrCount(a, b, c) => stack.extend([a.clone(), b.clone(), c.clone()]),
                Expr::Dcs { m, delta, .. } => stack.extend([m.clone(), delta.clone()]),
                Expr::Iterate { body, count, seed, .. } => stack.extend([body.clone(), count.clone(), seed.clone()]),
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(r) => write!(f, "{}", display_rational(r)),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Bin(op, a, b) => match op {
                Op::Add => write!(f, "({a} + {b})"),
                Op::Sub => write!(f, "({a} - {b})"),
                Op::Mul => write!(f, "({a} * {b})"),
                Op::Div => write!(f, "({a} / {b})"),
                Op::Pow => write!(f, "({a})^({b})"),
                Op::Min => write!(f, "min({a}, {b})"),
                Op::Max => write!(f, "max({a}, {b})"),
            },
            Expr::Floor(a) => write!(f, "floor({a})"),
            Expr::Ceil(a) => write!(f, "ceil({a})"),
            Expr::IfLess { a, b, then, els } => write!(f, "(if {a} < {b} then {then} else {els})"),
            Expr::Oracle { name, args, fallback } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")?;
                if let Some(fb) = fallback {
                    write!(f, " <= {fb}")?;
                }
                Ok(())
            }
            Expr::SubtrCount(k, n, l) => write!(f, "SubtrCount({k}, {n}, {l})"),
            Expr::Dcs { k, m, delta } => write!(f, "DCS({k}, {m}, {delta})"),
            Expr::Iterate {
                label,
                var,
                body,
                count,
                seed,
            } => write!(f, "{label}^({count})[x{var} -> {body}]({seed})"),
        }
    }
}

/// Builds expression trees.
#[derive(Default)]
pub struct Symbolic {
    next: Cell<u32>,
}

impl Symbolic {
    pub fn new() -> Self {
        Self::default()
    }

    fn bin(&self, op: Op, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        Rc::new(Expr::Bin(op, a.clone(), b.clone()))
    }
}

impl Ctx for Symbolic {
    type V = Rc<Expr>;

    fn lit(&self, r: Rational) -> Rc<Expr> {
        Rc::new(Expr::Const(r))
    }
    fn add(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Add, a, b)
    }
    fn sub(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Sub, a, b)
    }
    fn mul(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Mul, a, b)
    }
    fn div(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Div, a, b)
    }
    fn min(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Min, a, b)
    }
    fn max(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Max, a, b)
    }
    fn pow(&self, a: &Rc<Expr>, b: &Rc<Expr>) -> Rc<Expr> {
        self.bin(Op::Pow, a, b)
    }
    fn floor(&self, a: &Rc<Expr>) -> Rc<Expr> {
        Rc::new(Expr::Floor(a.clone()))
    }
    fn ceil(&self, a: &Rc<Expr>) -> Rc<Expr> {
        Rc::new(Expr::Ceil(a.clone()))
    }
    fn if_less(
        &self,
        a: &Rc<Expr>,
        b: &Rc<Expr>,
        then: &dyn Fn(&Self) -> Rc<Expr>,
        els: &dyn Fn(&Self) -> Rc<Expr>,
    ) -> Rc<Expr> {
        Rc::new(Expr::IfLess {
            a: a.clone(),
            b: b.clone(),
            then: then(self),
            els: els(self),
        })
    }
    fn oracle(&self, name: &str, args: &[Rc<Expr>], fallback: Option<&dyn Fn(&Self) -> Rc<Expr>>) -> Rc<Expr> {
        Rc::new(Expr::Oracle {
            name: name.to_string(),
            args: args.to_vec(),
            fallback: fallback.map(|f| f(self)),
        })
    }
    fn subtr(&self, k: &Rc<Expr>, n: &Rc<Expr>, l: &Rc<Expr>) -> Rc<Expr> {
        Rc::new(Expr::SubtrCount(k.clone(), n.clone(), l.clone()))
    }
    fn iterate(
        &self,
        label: &str,
        f: &dyn Fn(&Self, Rc<Expr>) -> Rc<Expr>,
        count: &Rc<Expr>,
        seed: &Rc<Expr>,
    ) -> Rc<Expr> {
        let var = self.next.get();
        self.next.set(var + 1);
        let body = f(self, Rc::new(Expr::Var(var)));
        Rc::new(Expr::Iterate {
            label: label.to_string(),
            var,
            body,
            count: count.clone(),
            seed: seed.clone(),
        })
    }
    fn structural(&self, v: &Rc<Expr>) -> Option<u64> {
        match &**v {
            Expr::Const(r) if r.is_integer() => r.to_integer().to_u64(),
            _ => None,
        }
    }
    fn unfold_limit(&self) -> u64 {
        SYMBOLIC_DCS_DEPTH
    }
    fn defer_dcs(&self, k: u32, m: &Rc<Expr>, delta: &Rc<Expr>) -> Rc<Expr> {
        Rc::new(Expr::Dcs {
            k,
            m: m.clone(),
            delta: delta.clone(),
        })
    }
}

/// Evaluate a tree in any context; variables are bound by enclosing iterations.
pub fn interpret<C: Ctx>(e: &Rc<Expr>, c: &C, env: &[(u32, C::V)]) -> C::V {
    let go = |x: &Rc<Expr>| interpret(x, c, env);
    match &**e {
        Expr::Const(r) => c.lit(r.clone()),
        Expr::Var(i) => env
            .iter()
            .rev()
            .find(|(j, _)| j == i)
            .map(|(_, v)| v.clone())
            .expect("bound variable"),
        Expr::Bin(op, a, b) => {
            let (a, b) = (go(a), go(b));
            match op {
                Op::Add => c.add(&a, &b),
                Op::Sub => c.sub(&a, &b),
                Op::Mul => c.mul(&a, &b),
                Op::Div => c.div(&a, &b),
                Op::Min => c.min(&a, &b),
                Op::Max => c.max(&a, &b),
                Op::Pow => c.pow(&a, &b),
            }
        }
        Expr::Floor(a) => c.floor(&go(a)),
        Expr::Ceil(a) => c.ceil(&go(a)),
        Expr::IfLess { a, b, then, els } => {
            c.if_less(&go(a), &go(b), &|c2| interpret(then, c2, env), &|c2| interpret(els, c2, env))
        }
        Expr::Oracle { name, args, fallback } => {
            let args: Vec<C::V> = args.iter().map(go).collect();
            match fallback {
                Some(fb) => c.oracle(name, &args, Some(&|c2: &C| interpret(fb, c2, env))),
                None => c.oracle(name, &args, None),
            }
        }
        Expr::SubtrCount(k, n, l) => c.subtr(&go(k), &go(n), &go(l)),
        Expr::Dcs { k, m, delta } => {
            let (m, delta) = (go(m), go(delta));
            dcs_unfold(c, *k, &m, &delta)
        }
        Expr::Iterate {
            label,
            var,
            body,
            count,
            seed,
        } => {
            let step = |c2: &C, x: C::V| {
                let mut env2 = env.to_vec();
                env2.push((*var, x));
                interpret(body, c2, &env2)
            };
            c.iterate(label, &step, &go(count), &go(seed))
        }
    }
}

// The formulas. Parameters that drive the structure of a recursion (the
// alphabet size of `DCS` and the length of a pattern sequence) are concrete.

/// `ρ = min{ε, k^{-ℓ}/2}`; with `τ`, `ϱ = min{ε, k^{-τ(ℓ+1)}/2}`.
pub fn rho<C: Ctx>(c: &C, k: &C::V, ell: &C::V, eps: &C::V, tau: Option<&C::V>) -> C::V {
    let e = match tau {
        Some(t) => c.mul(t, &c.add(ell, &c.nat(1))),
        None => ell.clone(),
    };
    let small = c.div(&c.pow(k, &c.sub(&c.nat(0), &e)), &c.nat(2));
    c.min(eps, &small)
}

/// `q⌊16ρ^{-4}⌋ + 1`.
fn slope<C: Ctx>(c: &C, k: &C::V, ell: &C::V, q: &C::V, eps: &C::V, tau: Option<&C::V>) -> C::V {
    let r = rho(c, k, ell, eps, tau);
    let inner = c.floor(&c.mul(&c.nat(16), &c.pow(&r, &c.lit(int(0) - int(4)))));
    c.add(&c.mul(q, &inner), &c.nat(1))
}

/// `F(m) = (q⌊16ρ^{-4}⌋+1)m + 1`, or `(q⌊16ϱ^{-4}⌋+1)(m+1) + 1` with `τ`.
pub fn reg_step<C: Ctx>(c: &C, k: &C::V, ell: &C::V, q: &C::V, eps: &C::V, tau: Option<&C::V>, m: &C::V) -> C::V {
    let s = slope(c, k, ell, q, eps, tau);
    let arg = if tau.is_some() { c.add(m, &c.nat(1)) } else { m.clone() };
    c.add(&c.mul(&s, &arg), &c.nat(1))
}

/// `reg(k,ℓ,q,ε) ≤ F^{(ℓ)}(0)`.
pub fn reg<C: Ctx>(c: &C, k: &C::V, ell: &C::V, q: &C::V, eps: &C::V) -> C::V {
    let s = slope(c, k, ell, q, eps, None);
    let f = |c: &C, m: C::V| c.add(&c.mul(&s, &m), &c.nat(1));
    c.iterate("F", &f, ell, &c.nat(0))
}

/// `reg_τ(k,ℓ,q,ε) ≤ F̃^{(ℓ)}(0)`.
pub fn reg_tau<C: Ctx>(c: &C, k: &C::V, ell: &C::V, q: &C::V, eps: &C::V, tau: &C::V) -> C::V {
    let s = slope(c, k, ell, q, eps, Some(tau));
    let f = |c: &C, m: C::V| c.add(&c.mul(&s, &c.add(&m, &c.nat(1))), &c.nat(1));
    c.iterate("F~", &f, ell, &c.nat(0))
}

/// `g_{k,m,r}(n)`: zero below `m-1`, else `GR(k, n+1, m, r)`.
pub fn g<C: Ctx>(c: &C, k: &C::V, m: &C::V, r: &C::V, n: &C::V) -> C::V {
    c.if_less(
        n,
        &c.sub(m, &c.nat(1)),
        &|c| c.nat(0),
        &|c| c.oracle("GR", &[k.clone(), c.add(n, &c.nat(1)), m.clone(), r.clone()], None),
    )
}

/// `CS(k,d,m,r) ≤ g_{k,m,r}^{(d·r-m)}(m)` unless the table knows it.
pub fn cs<C: Ctx>(c: &C, k: &C::V, d: &C::V, m: &C::V, r: &C::V) -> C::V {
    let fallback = |c: &C| {
        let step = |c: &C, n: C::V| g(c, k, m, r, &n);
        c.iterate("g", &step, &c.sub(&c.mul(d, r), m), m)
    };
    c.oracle("CS", &[k.clone(), d.clone(), m.clone(), r.clone()], Some(&fallback))
}

/// `DCS(k,m,δ)`, from the table or by the recursion on `m` and `k`.
pub fn dcs<C: Ctx>(c: &C, k: u32, m: &C::V, delta: &C::V) -> C::V {
    let fallback = |c: &C| dcs_unfold(c, k, m, delta);
    c.oracle("DCS", &[c.nat(k as u64), m.clone(), delta.clone()], Some(&fallback))
}

fn dcs_unfold<C: Ctx>(c: &C, k: u32, m: &C::V, delta: &C::V) -> C::V {
    match c.structural(m) {
        Some(mm) if mm >= 1 && mm <= c.unfold_limit() => dcs_rec(c, k, mm, delta),
        _ => c.defer_dcs(k, m, delta),
    }
}

fn dcs_rec<C: Ctx>(c: &C, k: u32, m: u64, delta: &C::V) -> C::V {
    if m == 1 {
        return if k == 2 { dcs_2_1(c, delta) } else { dcs_next_k(c, k - 1, delta) };
    }
    let d0 = c.div(&c.sq(delta), &c.nat(16));
    let seed = dcs(c, k, &c.nat(m - 1), &c.div(&theta(c, k, &c.nat(1), &d0), &c.nat(2)));
    let h = h_delta_fn(c, k, delta);
    c.iterate("h", &|c, n| h(c, &n), &eight_over_sq(c, delta), &seed)
}

/// `⌈8δ^{-2}⌉`.
fn eight_over_sq<C: Ctx>(c: &C, delta: &C::V) -> C::V {
    c.ceil(&c.div(&c.nat(8), &c.sq(delta)))
}

/// `DCS(2,1,δ) ≤ reg(2, CS(2,⌈17δ^{-2}⌉,1,2)+1, 1, δ/4)`.
pub fn dcs_2_1<C: Ctx>(c: &C, delta: &C::V) -> C::V {
    let d = c.ceil(&c.div(&c.nat(17), &c.sq(delta)));
    let ell = c.add(&cs(c, &c.nat(2), &d, &c.nat(1), &c.nat(2)), &c.nat(1));
    reg(c, &c.nat(2), &ell, &c.nat(1), &c.div(delta, &c.nat(4)))
}

/// `Λ(k,ℓ,δ) = ⌈δ^{-1}·DCS(k,ℓ,δ)⌉`.
pub fn lambda<C: Ctx>(c: &C, k: u32, ell: &C::V, delta: &C::V) -> C::V {
    c.ceil(&c.div(&dcs(c, k, ell, delta), delta))
}

/// `Θ(k,ℓ,δ) = 2δ / |Subtr_ℓ([k]^{<Λ(k,ℓ,δ)})|`.
pub fn theta<C: Ctx>(c: &C, k: u32, ell: &C::V, delta: &C::V) -> C::V {
    let l = lambda(c, k, ell, delta);
    c.div(&c.mul(&c.nat(2), delta), &c.subtr(&c.nat(k as u64), &l, ell))
}

/// `(Λ₀, Θ₀) = (Λ(k,1,δ²/16), Θ(k,1,δ²/16))`.
pub fn lambda0_theta0<C: Ctx>(c: &C, k: u32, delta: &C::V) -> (C::V, C::V) {
    let d0 = c.div(&c.sq(delta), &c.nat(16));
    (lambda(c, k, &c.nat(1), &d0), theta(c, k, &c.nat(1), &d0))
}

fn h_delta_fn<C: Ctx>(c: &C, k: u32, delta: &C::V) -> impl Fn(&C, &C::V) -> C::V {
    let (l0, t0) = lambda0_theta0(c, k, delta);
    move |c: &C, n: &C::V| c.add(&l0, &c.ceil(&c.mul(&c.div(&c.nat(2), &t0), n)))
}

/// `h_δ(n) = Λ₀ + ⌈2Θ₀^{-1} n⌉`.
pub fn h_delta<C: Ctx>(c: &C, k: u32, delta: &C::V, n: &C::V) -> C::V {
    h_delta_fn(c, k, delta)(c, n)
}

/// `θ(k,m,γ) = Θ(k,m,γ/4)`.
pub fn theta_small<C: Ctx>(c: &C, k: u32, m: &C::V, gamma: &C::V) -> C::V {
    theta(c, k, m, &c.div(gamma, &c.nat(4)))
}

/// `ϑ = Θ(k,m,δ/8)`.
pub fn vartheta<C: Ctx>(c: &C, k: u32, m: &C::V, delta: &C::V) -> C::V {
    theta(c, k, m, &c.div(delta, &c.nat(8)))
}

/// `η = δϑ/(30k)`.
pub fn eta<C: Ctx>(c: &C, k: u32, m: &C::V, delta: &C::V) -> C::V {
    let v = vartheta(c, k, m, delta);
    c.div(&c.mul(delta, &v), &c.nat(30 * k as u64))
}

/// `η₁` written out: `δ² / (120k·|Subtr_1([k]^{<Λ})|)` with `Λ = ⌈8δ^{-1}DCS(k,1,δ/8)⌉`.
pub fn eta1_closed<C: Ctx>(c: &C, k: u32, delta: &C::V) -> C::V {
    let one = c.nat(1);
    let l = c.ceil(&c.div(&c.mul(&c.nat(8), &dcs(c, k, &one, &c.div(delta, &c.nat(8)))), delta));
    let s = c.subtr(&c.nat(k as u64), &l, &one);
    c.div(&c.sq(delta), &c.mul(&c.nat(120 * k as u64), &s))
}

/// `Λ′ = Λ(k,m,δ/8)`.
pub fn lambda_prime<C: Ctx>(c: &C, k: u32, m: &C::V, delta: &C::V) -> C::V {
    lambda(c, k, m, &c.div(delta, &c.nat(8)))
}

/// `ℓ(n,m) = CS(k+1, n+Λ′, m, 2) + 1`.
pub fn ell_nm<C: Ctx>(c: &C, k: u32, delta: &C::V, n: &C::V, m: &C::V) -> C::V {
    let lp = lambda_prime(c, k, m, delta);
    let v = cs(c, &c.nat(k as u64 + 1), &c.add(n, &lp), m, &c.nat(2));
    c.add(&v, &c.nat(1))
}

/// `G(n,m,ε) = reg(k+1, ℓ(n,m), 1, ε)`.
pub fn big_g<C: Ctx>(c: &C, k: u32, delta: &C::V, n: &C::V, m: &C::V, eps: &C::V) -> C::V {
    let ell = ell_nm(c, k, delta, n, m);
    reg(c, &c.nat(k as u64 + 1), &ell, &c.nat(1), eps)
}

/// `m̄ = ⌈512γ^{-3}m⌉`.
pub fn mbar<C: Ctx>(c: &C, m: &C::V, gamma: &C::V) -> C::V {
    c.ceil(&c.div(&c.mul(&c.nat(512), m), &c.pow(gamma, &c.nat(3))))
}

/// `M = Λ(k, m̄, γ²/32)`.
pub fn big_m<C: Ctx>(c: &C, k: u32, m: &C::V, gamma: &C::V) -> C::V {
    lambda(c, k, &mbar(c, m, gamma), &c.div(&c.sq(gamma), &c.nat(32)))
}

/// `α = θ(k, m̄, γ²/8)`.
pub fn alpha<C: Ctx>(c: &C, k: u32, m: &C::V, gamma: &C::V) -> C::V {
    theta_small(c, k, &mbar(c, m, gamma), &c.div(&c.sq(gamma), &c.nat(8)))
}

/// `p₀ = ⌊α^{-1}⌋`.
pub fn p0<C: Ctx>(c: &C, k: u32, m: &C::V, gamma: &C::V) -> C::V {
    c.floor(&c.inv(&alpha(c, k, m, gamma)))
}

/// One step `N_p ↦ N_{p+1}` of the sequences, returning `(n¹, n², N)` at `p+1`.
fn nine_step<C: Ctx>(c: &C, k: u32, mb: &C::V, big: &C::V, n_p: &C::V) -> (C::V, C::V, C::V) {
    let k1 = c.nat(k as u64 + 1);
    let n1 = c.add(&c.mul(&c.add(n_p, &c.nat(1)), mb), n_p);
    let n2 = cs(c, &k1, &n1, mb, &c.add(mb, &c.nat(1)));
    let nn = cs(c, &k1, &c.max(&n2, big), mb, &c.nat(2));
    (n1, n2, nn)
}

/// `(n¹_p, n²_p, N_p)`.
pub fn nine_seq<C: Ctx>(c: &C, k: u32, m: &C::V, gamma: &C::V, p: &C::V) -> (C::V, C::V, C::V) {
    let zero = c.nat(0);
    let mb = mbar(c, m, gamma);
    let big = big_m(c, k, m, gamma);
    let step = |c: &C, n: C::V| nine_step(c, k, &mb, &big, &n).2;
    let prev = c.iterate("N", &step, &c.max(&c.sub(p, &c.nat(1)), &zero), &zero);
    let (n1, n2, nn) = nine_step(c, k, &mb, &big, &prev);
    let pick = |v: C::V| c.if_less(p, &c.nat(1), &|c| c.nat(0), &|_| v.clone());
    (pick(n1), pick(n2), pick(nn))
}

/// `H(m,γ)`: zero at `m = 0`, else `reg(k+1, N_{p₀}+1, 2, γ²/2)`.
pub fn big_h<C: Ctx>(c: &C, k: u32, m: &C::V, gamma: &C::V) -> C::V {
    c.if_less(m, &c.nat(1), &|c| c.nat(0), &|c| {
        let p = p0(c, k, m, gamma);
        let n = nine_seq(c, k, m, gamma, &p).2;
        reg(
            c,
            &c.nat(k as u64 + 1),
            &c.add(&n, &c.nat(1)),
            &c.nat(2),
            &c.div(&c.sq(gamma), &c.nat(2)),
        )
    })
}

/// `H^{(n)}(m,γ)`, with `H^{(0)}(m,γ) = m`.
pub fn big_h_iter<C: Ctx>(c: &C, k: u32, n: &C::V, m: &C::V, gamma: &C::V) -> C::V {
    c.iterate("H", &|c, x| big_h(c, k, &x, gamma), n, m)
}

/// `ξ(γ) = γ^{3^k} / (√2·32)^{3^k-1} = γ^{3^k} / 2^{11(3^k-1)/2}`.
pub fn xi<C: Ctx>(c: &C, k: u32, gamma: &C::V) -> C::V {
    let e = BigInt::from(3).pow(k);
    let two_exp = (&e - 1) * 11 / 2;
    let num = c.pow(gamma, &c.lit(Rational::from_integer(e)));
    c.div(&num, &c.pow(&c.nat(2), &c.lit(Rational::from_integer(two_exp))))
}

/// `ϱ = ξ(η₁²/2)`.
pub fn varrho<C: Ctx>(c: &C, k: u32, delta: &C::V) -> C::V {
    let e1 = eta(c, k, &c.nat(1), delta);
    xi(c, k, &c.div(&c.sq(&e1), &c.nat(2)))
}

fn f_delta_fn<C: Ctx>(c: &C, k: u32, delta: &C::V) -> impl Fn(&C, &C::V) -> C::V {
    let e1 = eta(c, k, &c.nat(1), delta);
    let r = xi(c, k, &c.div(&c.sq(&e1), &c.nat(2)));
    let delta = delta.clone();
    move |c: &C, m: &C::V| {
        let h = big_h_iter(c, k, &c.nat(k as u64), m, &r);
        let coef = c.mul(&c.pow(&e1, &c.lit(int(0) - int(4))), &c.nat((k as u64 + 1) * k as u64));
        let n = c.ceil(&c.mul(&coef, &h));
        big_g(c, k, &delta, &n, &c.nat(1), &c.div(&c.sq(&e1), &c.nat(2)))
    }
}

/// `F_δ(m) = G₁(⌈η₁^{-4}(k+1)k·H^{(k)}(m,ϱ)⌉, η₁²/2)`.
pub fn f_delta<C: Ctx>(c: &C, k: u32, delta: &C::V, m: &C::V) -> C::V {
    f_delta_fn(c, k, delta)(c, m)
}

/// `DCS(k+1,1,δ) ≤ F_δ^{(⌈ϱ^{-1}⌉)}(1)`.
pub fn dcs_next_k<C: Ctx>(c: &C, k: u32, delta: &C::V) -> C::V {
    let f = f_delta_fn(c, k, delta);
    let count = c.ceil(&c.inv(&varrho(c, k, delta)));
    c.iterate("F_delta", &|c, m| f(c, &m), &count, &c.nat(1))
}

/// `(Λ_P, Θ_P) = (Λ(k,1,δ²/32), Θ(k,1,δ²/32))`.
pub fn lambda_p_theta_p<C: Ctx>(c: &C, k: u32, delta: &C::V) -> (C::V, C::V) {
    let dp = c.div(&c.sq(delta), &c.nat(32));
    (lambda(c, k, &c.nat(1), &dp), theta(c, k, &c.nat(1), &dp))
}

fn h_tau_fn<C: Ctx>(c: &C, k: u32, tau: &C::V, delta: &C::V) -> impl Fn(&C, &C::V) -> C::V {
    let (lp, tp) = lambda_p_theta_p(c, k, delta);
    let base = c.mul(tau, &reg_tau(c, &c.nat(k as u64), &lp, &c.nat(1), &c.div(delta, &c.nat(4)), tau));
    move |c: &C, n: &C::V| c.add(&base, &c.ceil(&c.mul(&c.div(&c.nat(2), &tp), n)))
}

/// `h_{τ,δ}(n) = τ·reg_τ(k,Λ_P,1,δ/4) + ⌈2Θ_P^{-1} n⌉`.
pub fn h_tau<C: Ctx>(c: &C, k: u32, tau: &C::V, delta: &C::V, n: &C::V) -> C::V {
    h_tau_fn(c, k, tau, delta)(c, n)
}

/// `DP(k,(τ_n)_{n≤m},δ)`: for one pattern `τ·reg_τ(k,Λ(k,1,δ/8),1,δ/2)`,
/// otherwise `h_{τ₀,δ}^{(⌈8δ^{-2}⌉)}(DP(k,(τ_{n+1}),Θ_P/2))`.
pub fn dp<C: Ctx>(c: &C, k: u32, taus: &[C::V], delta: &C::V) -> C::V {
    let kk = c.nat(k as u64);
    let tau = &taus[0];
    if taus.len() == 1 {
        let l = lambda(c, k, &c.nat(1), &c.div(delta, &c.nat(8)));
        return c.mul(tau, &reg_tau(c, &kk, &l, &c.nat(1), &c.div(delta, &c.nat(2)), tau));
    }
    let (_, tp) = lambda_p_theta_p(c, k, delta);
    let n0 = dp(c, k, &taus[1..], &c.div(&tp, &c.nat(2)));
    let h = h_tau_fn(c, k, tau, delta);
    c.iterate("h_tau", &|c, n| h(c, &n), &eight_over_sq(c, delta), &n0)
}

/// Named parameters of an evaluation request.
#[derive(Clone, Debug, Default)]
pub struct Params {
    vals: BTreeMap<String, Rational>,
    pub taus: Vec<u64>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, v: Rational) -> Self {
        self.vals.insert(key.to_string(), v);
        self
    }

    pub fn insert(&mut self, key: &str, v: Rational) {
        self.vals.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Result<Rational> {
        self.vals
            .get(key)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("missing parameter {key}")))
    }

    fn nat(&self, key: &str, min: u64) -> Result<u64> {
        let v = self.get(key)?;
        match v.to_integer().to_u64() {
            Some(n) if v.is_integer() && n >= min => Ok(n),
            _ => Err(Error::OutOfRange(format!("{key} must be an integer at least {min}"))),
        }
    }

    fn unit(&self, key: &str) -> Result<Rational> {
        let v = self.get(key)?;
        if v.is_positive() && v <= Rational::one() {
            Ok(v)
        } else {
            Err(Error::OutOfRange(format!("{key} must lie in (0, 1]")))
        }
    }
}

/// Every evaluable name with its parameters.
pub const CATALOG: &[(&str, &str)] = &[
    ("rho", "k ell eps [tau]"),
    ("F", "k ell q eps n [tau]"),
    ("reg", "k ell q eps"),
    ("reg_tau", "k ell q eps tau"),
    ("g", "k m r n"),
    ("cs", "k d m r"),
    ("dcs", "k m delta"),
    ("lambda", "k m delta"),
    ("theta", "k m delta"),
    ("lambda0", "k delta"),
    ("theta0", "k delta"),
    ("h_delta", "k delta n"),
    ("theta_small", "k m gamma"),
    ("vartheta", "k m delta"),
    ("eta", "k m delta"),
    ("eta1", "k delta"),
    ("lambda_prime", "k m delta"),
    ("ell_nm", "k delta n m"),
    ("G", "k delta n m eps"),
    ("G1", "k delta n eps"),
    ("mbar", "m gamma"),
    ("M", "k m gamma"),
    ("alpha", "k m gamma"),
    ("p0", "k m gamma"),
    ("n1", "k m gamma p"),
    ("n2", "k m gamma p"),
    ("N", "k m gamma p"),
    ("H", "k m gamma"),
    ("H_iter", "k n m gamma"),
    ("xi", "k gamma"),
    ("varrho", "k delta"),
    ("F_delta", "k delta m"),
    ("lambda_p", "k delta"),
    ("theta_p", "k delta"),
    ("h_tau", "k tau delta n"),
    ("dp", "k taus delta"),
    ("subtr_count", "k n ell"),
];

/// Build the named bound in any context after checking its domain.
pub fn build<C: Ctx>(c: &C, name: &str, p: &Params) -> Result<C::V> {
    let natv = |key: &str, min: u64| -> Result<C::V> { Ok(c.nat(p.nat(key, min)?)) };
    let unitv = |key: &str| -> Result<C::V> { Ok(c.lit(p.unit(key)?)) };
    let k32 = || -> Result<u32> {
        let k = p.nat("k", 2)?;
        u32::try_from(k).map_err(|_| Error::OutOfRange("k too large".into()))
    };
    let tau = if p.vals.contains_key("tau") { Some(natv("tau", 1)?) } else { None };
    Ok(match name {
        "rho" => rho(c, &natv("k", 2)?, &natv("ell", 0)?, &unitv("eps")?, tau.as_ref()),
        "F" => reg_step(
            c,
            &natv("k", 2)?,
            &natv("ell", 0)?,
            &natv("q", 1)?,
            &unitv("eps")?,
            tau.as_ref(),
            &natv("n", 0)?,
        ),
        "reg" => reg(c, &natv("k", 2)?, &natv("ell", 0)?, &natv("q", 1)?, &unitv("eps")?),
        "reg_tau" => reg_tau(c, &natv("k", 2)?, &natv("ell", 0)?, &natv("q", 1)?, &unitv("eps")?, &natv("tau", 1)?),
        "g" => g(c, &natv("k", 2)?, &natv("m", 1)?, &natv("r", 1)?, &natv("n", 0)?),
        "cs" => {
            let (d, m, r) = (p.nat("d", 1)?, p.nat("m", 1)?, p.nat("r", 1)?);
            if d < m {
                return Err(Error::OutOfRange("CS needs d >= m".into()));
            }
            cs(c, &natv("k", 2)?, &c.nat(d), &c.nat(m), &c.nat(r))
        }
        "dcs" => dcs(c, k32()?, &natv("m", 1)?, &unitv("delta")?),
        "lambda" => lambda(c, k32()?, &natv("m", 1)?, &unitv("delta")?),
        "theta" => theta(c, k32()?, &natv("m", 1)?, &unitv("delta")?),
        "lambda0" => lambda0_theta0(c, k32()?, &unitv("delta")?).0,
        "theta0" => lambda0_theta0(c, k32()?, &unitv("delta")?).1,
        "h_delta" => h_delta(c, k32()?, &unitv("delta")?, &natv("n", 0)?),
        "theta_small" => theta_small(c, k32()?, &natv("m", 1)?, &unitv("gamma")?),
        "vartheta" => vartheta(c, k32()?, &natv("m", 1)?, &unitv("delta")?),
        "eta" => eta(c, k32()?, &natv("m", 1)?, &unitv("delta")?),
        "eta1" => eta(c, k32()?, &c.nat(1), &unitv("delta")?),
        "lambda_prime" => lambda_prime(c, k32()?, &natv("m", 1)?, &unitv("delta")?),
        "ell_nm" => ell_nm(c, k32()?, &unitv("delta")?, &natv("n", 0)?, &natv("m", 1)?),
        "G" => big_g(c, k32()?, &unitv("delta")?, &natv("n", 0)?, &natv("m", 1)?, &unitv("eps")?),
        "G1" => big_g(c, k32()?, &unitv("delta")?, &natv("n", 0)?, &c.nat(1), &unitv("eps")?),
        "mbar" => mbar(c, &natv("m", 0)?, &unitv("gamma")?),
        "M" => big_m(c, k32()?, &natv("m", 1)?, &unitv("gamma")?),
        "alpha" => alpha(c, k32()?, &natv("m", 1)?, &unitv("gamma")?),
        "p0" => p0(c, k32()?, &natv("m", 1)?, &unitv("gamma")?),
        "n1" | "n2" | "N" => {
            let (a, b, n) = nine_seq(c, k32()?, &natv("m", 1)?, &unitv("gamma")?, &natv("p", 0)?);
            match name {
                "n1" => a,
                "n2" => b,
                _ => n,
            }
        }
        "H" => big_h(c, k32()?, &natv("m", 0)?, &unitv("gamma")?),
        "H_iter" => big_h_iter(c, k32()?, &natv("n", 0)?, &natv("m", 0)?, &unitv("gamma")?),
        "xi" => xi(c, k32()?, &unitv("gamma")?),
        "varrho" => varrho(c, k32()?, &unitv("delta")?),
        "F_delta" => f_delta(c, k32()?, &unitv("delta")?, &natv("m", 0)?),
        "lambda_p" => lambda_p_theta_p(c, k32()?, &unitv("delta")?).0,
        "theta_p" => lambda_p_theta_p(c, k32()?, &unitv("delta")?).1,
        "h_tau" => h_tau(c, k32()?, &natv("tau", 1)?, &unitv("delta")?, &natv("n", 0)?),
        "dp" => {
            if p.taus.is_empty() || p.taus.contains(&0) {
                return Err(Error::OutOfRange("dp needs a nonempty list of positive taus".into()));
            }
            let taus: Vec<C::V> = p.taus.iter().map(|&t| c.nat(t)).collect();
            dp(c, k32()?, &taus, &unitv("delta")?)
        }
        "subtr_count" => c.subtr(&natv("k", 2)?, &natv("n", 0)?, &natv("ell", 0)?),
        other => return Err(Error::Parse(format!("unknown bound {other}"))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Numeric,
    Symbolic,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Value(Val),
    Tree(Rc<Expr>),
}

/// Numeric mode fails on a missing oracle entry; symbolic mode returns the tree.
pub fn eval(name: &str, p: &Params, table: &OracleTable, mode: Mode, cap_bits: u64) -> Result<Outcome> {
    match mode {
        Mode::Numeric => {
            let c = Numeric::with_limits(table, cap_bits, DEFAULT_ITER_LIMIT);
            match build(&c, name, p)? {
                Val::Missing(s) => Err(Error::MissingOracle(s)),
                Val::Undefined(s) => Err(Error::OutOfRange(s)),
                v => Ok(Outcome::Value(v)),
            }
        }
        Mode::Symbolic => Ok(Outcome::Tree(build(&Symbolic::new(), name, p)?)),
    }
}

/// Evaluate a tree numerically.
pub fn eval_tree(e: &Rc<Expr>, table: &OracleTable, cap_bits: u64) -> Val {
    let c = Numeric::with_limits(table, cap_bits, DEFAULT_ITER_LIMIT);
    interpret(e, &c, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CsTree;

    fn num(t: &OracleTable, name: &str, p: &Params) -> Val {
        build(&Numeric::new(t), name, p).unwrap()
    }

    fn fin(n: i64) -> Val {
        Val::Fin(ratio(n, 1))
    }

    #[test]
    fn reg_examples() {
        let t = OracleTable::new();
        let p = Params::new()
            .set("k", int(2))
            .set("ell", int(1))
            .set("q", int(1))
            .set("eps", ratio(1, 4));
        assert_eq!(num(&t, "rho", &p), Val::Fin(ratio(1, 4)));
        assert_eq!(num(&t, "reg", &p), fin(1));
        let p2 = p.clone().set("n", int(1));
        assert_eq!(num(&t, "F", &p2), fin(4098));
        let p3 = p.clone().set("ell", int(2));
        assert_eq!(num(&t, "reg", &p3), fin(65538));
        // F~(m) = (q⌊16ϱ^{-4}⌋+1)(m+1)+1 with ϱ = min(1/4, 2^{-2}/2) = 1/8.
        let p4 = p.clone().set("tau", int(1));
        assert_eq!(num(&t, "reg_tau", &p4), fin(65538));
    }

    #[test]
    fn base_cases() {
        let t = OracleTable::new();
        let p = Params::new().set("k", int(2)).set("m", int(3)).set("r", int(2)).set("n", int(1));
        assert_eq!(num(&t, "g", &p), fin(0));
        // n = m-1 needs the oracle.
        let p = p.set("n", int(2));
        assert!(matches!(num(&t, "g", &p), Val::Missing(_)));
        let p = Params::new()
            .set("k", int(2))
            .set("m", int(1))
            .set("gamma", ratio(1, 2))
            .set("p", int(0));
        for name in ["n1", "n2", "N"] {
            assert_eq!(num(&t, name, &p), fin(0));
        }
        let p = Params::new().set("k", int(2)).set("m", int(0)).set("gamma", ratio(1, 2));
        assert_eq!(num(&t, "H", &p), fin(0));
        let p = p.set("m", int(7)).set("n", int(0));
        assert_eq!(num(&t, "H_iter", &p), fin(7));
    }

    #[test]
    fn cs_from_gr_chain() {
        let mut t = OracleTable::new();
        // CS(2,2,1,1) ≤ g^{(1)}(1) = GR(2,2,1,1).
        t.insert("GR", vec![int(2), int(2), int(1), int(1)], int(5)).unwrap();
        let p = Params::new().set("k", int(2)).set("d", int(2)).set("m", int(1)).set("r", int(1));
        assert_eq!(num(&t, "cs", &p), fin(5));
        t.insert("CS", vec![int(2), int(2), int(1), int(1)], int(3)).unwrap();
        assert_eq!(num(&t, "cs", &p), fin(3));
        assert!(t.clone().insert("GR", vec![int(2), int(9), int(1), int(1)], int(4)).is_err());
    }

    #[test]
    fn subtr_counts() {
        assert_eq!(subtr_count(2, 3, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(subtr_count(2, 2, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(subtr_count(2, 3, 3).unwrap(), BigUint::zero());
        for k in 2..=3u32 {
            for n in 1..=4usize {
                for l in 1..n {
                    let direct = CsTree::enumerate_in_universe(k, n - 1, l).len();
                    assert_eq!(subtr_count(k as u64, n as u64, l as u64).unwrap(), BigUint::from(direct), "{k} {n} {l}");
                }
            }
        }
    }

    #[test]
    fn xi_is_exact() {
        let t = OracleTable::new();
        let p = Params::new().set("k", int(2)).set("gamma", ratio(1, 2));
        // (1/2)^9 / 2^{44}
        assert_eq!(num(&t, "xi", &p), Val::Fin(Rational::new(1.into(), BigInt::from(2).pow(53))));
    }

    #[test]
    fn overflow_is_reported() {
        let t = OracleTable::new();
        let p = Params::new()
            .set("k", int(2))
            .set("ell", int(5000))
            .set("q", int(1))
            .set("eps", ratio(1, 2));
        assert_eq!(num(&t, "reg", &p), Val::Overflow);
        let c = Numeric::new(&t);
        assert_eq!(c.add(&Val::Overflow, &fin(1)), Val::Overflow);
        assert_eq!(c.min(&Val::Overflow, &fin(1)), Val::Overflow);
        assert!(fin(3) < Val::Overflow);
    }

    #[test]
    fn dcs_with_oracle() {
        let mut t = OracleTable::new();
        // DCS(2,1,1) ≤ reg(2, CS(2,17,1,2)+1, 1, 1/4).
        t.insert("CS", vec![int(2), int(17), int(1), int(2)], int(1)).unwrap();
        let p = Params::new().set("k", int(2)).set("m", int(1)).set("delta", int(1));
        let reg2 = num(
            &t,
            "reg",
            &Params::new()
                .set("k", int(2))
                .set("ell", int(2))
                .set("q", int(1))
                .set("eps", ratio(1, 4)),
        );
        assert_eq!(num(&t, "dcs", &p), reg2);
        let tree = build(&Symbolic::new(), "dcs", &p).unwrap();
        assert_eq!(eval_tree(&tree, &t, DEFAULT_CAP_BITS), reg2);
        assert!(matches!(
            eval("dcs", &p, &OracleTable::new(), Mode::Numeric, DEFAULT_CAP_BITS),
            Err(Error::MissingOracle(_))
        ));
    }

    #[test]
    fn eta1_agrees_with_closed_form() {
        let mut t = OracleTable::new();
        t.insert("DCS", vec![int(2), int(1), ratio(1, 16)], int(3)).unwrap();
        let c = Numeric::new(&t);
        let d = c.lit(ratio(1, 2));
        assert_eq!(eta(&c, 2, &c.nat(1), &d), eta1_closed(&c, 2, &d));
        assert!(eta(&c, 2, &c.nat(1), &d).finite().is_some());
    }

    #[test]
    fn oracle_json_round_trip() {
        let t = OracleTable::from_json(r#"[{"name":"GR","args":[2,3,1,1],"value":7},{"name":"DCS","args":[2,1,"1/2"],"value":9}]"#)
            .unwrap();
        assert_eq!(t.get("DCS", &[int(2), int(1), ratio(1, 2)]), Some(&int(9)));
        assert_eq!(OracleTable::from_json(&t.to_json()).unwrap(), t);
        assert!(OracleTable::from_json(r#"[{"name":"XX","args":[],"value":1}]"#).is_err());
    }
}
