//! A small declarative language for integer sets, so corpora and
//! experiments can live in text files instead of code.
//!
//! The surface syntax is explicit function calls plus three infix set
//! operators (`|`, `&`, `\`) at a single precedence level, applied left
//! to right. Integer expressions support `+ - * ^`, postfix `!`, and
//! one bound variable introduced by `union(n=lo..hi, body)`.
//!
//! [`parse`] produces an AST with exact error positions, [`print`]
//! emits the canonical form, and [`evaluate`] materializes a set on a
//! 1-dimensional window. Since the grammar has no parenthesized set
//! production, infix chains are always left-associated; [`print`]
//! flattens nested chains accordingly, so `parse(print(ast))` is the
//! identity on every AST the parser itself produces (the canonical
//! ones) and canonicalizes hand-built right-nested chains.

mod eval;
mod lex;
mod parse;
mod print;

use crate::error::Result;
use crate::lattice::LatticeSet;
use crate::window::Window;

/// Which half of a pair-valued family a reference selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    A,
    B,
}

/// Integer expression over literals, the bound variable, `+ - * ^`,
/// and postfix factorial. Negative literals are folded at parse time,
/// so `Neg` never wraps a bare literal in a parsed AST.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntExpr {
    Lit(i128),
    Var(String),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
    Pow(Box<IntExpr>, Box<IntExpr>),
    Neg(Box<IntExpr>),
    Fact(Box<IntExpr>),
}

/// Set expression AST. Arity is fixed per kind by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Interval(IntExpr, IntExpr),
    ArithProg {
        start: IntExpr,
        step: IntExpr,
        count: IntExpr,
    },
    ModResidues {
        modulus: IntExpr,
        residues: Vec<IntExpr>,
    },
    Union(Box<SetExpr>, Box<SetExpr>),
    Intersect(Box<SetExpr>, Box<SetExpr>),
    Difference(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    Sum(Box<SetExpr>, Box<SetExpr>),
    Dilate(Box<SetExpr>, IntExpr),
    Erode(Box<SetExpr>, IntExpr),
    IndexedUnion {
        var: String,
        lo: IntExpr,
        hi: IntExpr,
        body: Box<SetExpr>,
    },
    FamilyRef {
        name: String,
        params: Vec<(String, IntExpr)>,
        select: Option<PairSide>,
    },
}

/// Parses source text into an AST. Errors carry the 1-based line and
/// 0-based byte column of the offending position.
pub fn parse(text: &str) -> Result<SetExpr> {
    parse::parse(text)
}

/// Canonical text for an AST; [`parse`] of the result reproduces the
/// AST for every parser-produced tree.
pub fn print(expr: &SetExpr) -> String {
    print::print_set(expr)
}

/// Materializes an expression on a 1-dimensional window. All integer
/// arithmetic is arbitrary width; values are bound-checked only where
/// they must land in the window or a parameter slot.
pub fn evaluate(expr: &SetExpr, window: Window) -> Result<LatticeSet> {
    eval::evaluate(expr, window)
}

/// Parse-then-evaluate convenience used by the command line.
pub fn evaluate_text(text: &str, window: Window) -> Result<LatticeSet> {
    evaluate(&parse(text)?, window)
}
