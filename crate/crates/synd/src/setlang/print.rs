//! Canonical printer. Output reparses to the same AST for every tree
//! the parser can produce. The set grammar has no grouping form, so a
//! hand-built right-nested chain of the same associative operator is
//! flattened; a right-nested chain of a different operator is wrapped
//! in a double complement, which regroups without changing the
//! denotation.

use super::{IntExpr, PairSide, SetExpr};

pub(super) fn print_set(e: &SetExpr) -> String {
    match e {
        SetExpr::Interval(lo, hi) => format!("interval({}, {})", arg(lo), arg(hi)),
        SetExpr::ArithProg { start, step, count } => {
            format!("ap({}, {}, {})", arg(start), arg(step), arg(count))
        }
        SetExpr::ModResidues { modulus, residues } => {
            let rs: Vec<String> = residues.iter().map(arg).collect();
            format!("mod({}, {{{}}})", arg(modulus), rs.join(", "))
        }
        SetExpr::Union(l, r) => infix(l, " | ", r, Assoc::Union),
        SetExpr::Intersect(l, r) => infix(l, " & ", r, Assoc::Intersect),
        SetExpr::Difference(l, r) => infix(l, " \\ ", r, Assoc::Never),
        SetExpr::Complement(inner) => format!("!({})", print_set(inner)),
        SetExpr::Sum(a, b) => format!("sum({}, {})", print_set(a), print_set(b)),
        SetExpr::Dilate(s, n) => format!("dilate({}, {})", print_set(s), arg(n)),
        SetExpr::Erode(s, n) => format!("erode({}, {})", print_set(s), arg(n)),
        SetExpr::IndexedUnion { var, lo, hi, body } => {
            format!("union({var}={}..{}, {})", arg(lo), arg(hi), print_set(body))
        }
        SetExpr::FamilyRef {
            name,
            params,
            select,
        } => {
            let mut s = String::from("family(");
            s.push_str(name);
            for (k, v) in params {
                s.push_str(", ");
                s.push_str(k);
                s.push('=');
                s.push_str(&arg(v));
            }
            s.push(')');
            match select {
                Some(PairSide::A) => s.push_str(".A"),
                Some(PairSide::B) => s.push_str(".B"),
                None => {}
            }
            s
        }
    }
}

#[derive(PartialEq)]
enum Assoc {
    Union,
    Intersect,
    Never,
}

fn infix(l: &SetExpr, op: &str, r: &SetExpr, assoc: Assoc) -> String {
    let left = print_set(l);
    let flatten = matches!(
        (&assoc, r),
        (Assoc::Union, SetExpr::Union(_, _)) | (Assoc::Intersect, SetExpr::Intersect(_, _))
    );
    let right = if flatten || !is_infix(r) {
        print_set(r)
    } else {
        format!("!(!({}))", print_set(r))
    };
    format!("{left}{op}{right}")
}

fn is_infix(e: &SetExpr) -> bool {
    matches!(
        e,
        SetExpr::Union(_, _) | SetExpr::Intersect(_, _) | SetExpr::Difference(_, _)
    )
}

// Precedence floors: 1 additive, 2 multiplicative, 3 unary minus,
// 4 power, 5 factorial operand, 6 atoms. A negative literal prints
// with its sign, so it binds like a unary minus.
fn prec(e: &IntExpr) -> u8 {
    match e {
        IntExpr::Add(_, _) | IntExpr::Sub(_, _) => 1,
        IntExpr::Mul(_, _) => 2,
        IntExpr::Neg(_) => 3,
        IntExpr::Lit(v) if *v < 0 => 3,
        IntExpr::Pow(_, _) => 4,
        IntExpr::Fact(_) => 5,
        IntExpr::Lit(_) | IntExpr::Var(_) => 6,
    }
}

fn arg(e: &IntExpr) -> String {
    render(e, 1)
}

fn render(e: &IntExpr, min: u8) -> String {
    let body = match e {
        IntExpr::Lit(v) => v.to_string(),
        IntExpr::Var(name) => name.clone(),
        IntExpr::Add(l, r) => format!("{} + {}", render(l, 1), render(r, 2)),
        IntExpr::Sub(l, r) => format!("{} - {}", render(l, 1), render(r, 2)),
        IntExpr::Mul(l, r) => format!("{}*{}", render(l, 2), render(r, 3)),
        IntExpr::Neg(x) => format!("-{}", render(x, 3)),
        IntExpr::Pow(b, x) => format!("{}^{}", render(b, 5), render(x, 3)),
        IntExpr::Fact(x) => format!("{}!", render(x, 5)),
    };
    if prec(e) < min {
        format!("({body})")
    } else {
        body
    }
}
