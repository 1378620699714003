//! Denotational evaluation on a 1-dimensional window. Integer
//! expressions run in arbitrary width; values are bound-checked only at
//! the points where they must fit a window coordinate or a parameter.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::{IntExpr, PairSide, SetExpr};
use crate::error::{Error, Result};
use crate::families::{generate, FamilyOutput, FamilySpec};
use crate::lattice::LatticeSet;
use crate::morph;
use crate::window::Window;

// Guards against runaway expressions; generous next to any window that
// can actually be materialized.
const MAX_EXPONENT: i64 = 4096;
const MAX_FACTORIAL: i64 = 4096;
const MAX_RANGE: i64 = 1_000_000;

struct Env(Vec<(String, BigInt)>);

impl Env {
    fn get(&self, name: &str) -> Result<BigInt> {
        self.0
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::ConfigInvalid {
                reason: format!("unbound variable '{name}'"),
            })
    }
}

pub(super) fn evaluate(expr: &SetExpr, window: Window) -> Result<LatticeSet> {
    if window.dim() != 1 {
        return Err(Error::WrongConvention {
            required: "a 1-dimensional window".into(),
            actual: window.to_string(),
        });
    }
    let mut env = Env(Vec::new());
    eval_set(expr, window, &mut env)
}

fn eval_set(expr: &SetExpr, window: Window, env: &mut Env) -> Result<LatticeSet> {
    match expr {
        SetExpr::Interval(lo, hi) => {
            let (wlo, whi) = window.axis_range();
            let lo = eval_int(lo, env)?.max(BigInt::from(wlo));
            let hi = eval_int(hi, env)?.min(BigInt::from(whi));
            let mut out = LatticeSet::empty(window);
            if lo <= hi {
                // Both ends are clamped into the window, so they fit i64.
                let a = window.index([lo.to_i64().unwrap(), 0, 0]).unwrap();
                let b = window.index([hi.to_i64().unwrap(), 0, 0]).unwrap();
                out.fill_index_range(a, b + 1);
            }
            Ok(out)
        }
        SetExpr::ArithProg { start, step, count } => {
            let start = eval_int(start, env)?;
            let step = eval_int(step, env)?;
            let count = eval_int(count, env)?;
            if count.is_negative() {
                return Err(Error::ConfigInvalid {
                    reason: format!("progression count must be >= 0, got {}", brief(&count)),
                });
            }
            let (wlo, whi) = window.axis_range();
            let (wlo, whi) = (BigInt::from(wlo), BigInt::from(whi));
            let mut out = LatticeSet::empty(window);
            if count.is_zero() {
                return Ok(out);
            }
            if step.is_zero() {
                if start >= wlo && start <= whi {
                    out.insert([start.to_i64().unwrap(), 0, 0])?;
                }
                return Ok(out);
            }
            // Indices i in [0, count) with start + i*step inside the window.
            let (mut i_lo, mut i_hi) = if step.is_positive() {
                (
                    (&wlo - &start).div_ceil(&step),
                    (&whi - &start).div_floor(&step),
                )
            } else {
                (
                    (&whi - &start).div_ceil(&step),
                    (&wlo - &start).div_floor(&step),
                )
            };
            i_lo = i_lo.max(BigInt::zero());
            i_hi = i_hi.min(&count - 1);
            let mut i = i_lo;
            while i <= i_hi {
                let v = &start + &i * &step;
                out.insert([v.to_i64().unwrap(), 0, 0])?;
                i += 1;
            }
            Ok(out)
        }
        SetExpr::ModResidues { modulus, residues } => {
            let m = clamp_i64(&eval_int(modulus, env)?, "modulus")?;
            if m < 1 {
                return Err(Error::ConfigInvalid {
                    reason: format!("modulus must be >= 1, got {m}"),
                });
            }
            let big_m = BigInt::from(m);
            let mut wanted = std::collections::HashSet::new();
            for r in residues {
                let v = eval_int(r, env)?.mod_floor(&big_m);
                wanted.insert(v.to_i64().unwrap());
            }
            Ok(LatticeSet::from_predicate(window, |p| {
                wanted.contains(&p[0].rem_euclid(m))
            }))
        }
        SetExpr::Union(l, r) => eval_set(l, window, env)?.union(&eval_set(r, window, env)?),
        SetExpr::Intersect(l, r) => {
            eval_set(l, window, env)?.intersect(&eval_set(r, window, env)?)
        }
        SetExpr::Difference(l, r) => {
            eval_set(l, window, env)?.difference(&eval_set(r, window, env)?)
        }
        SetExpr::Complement(inner) => Ok(eval_set(inner, window, env)?.complement()),
        SetExpr::Sum(a, b) => {
            let a = eval_set(a, window, env)?;
            let b = eval_set(b, window, env)?;
            morph::sumset(&a, &b, false)
        }
        SetExpr::Dilate(s, n) | SetExpr::Erode(s, n) => {
            let inner = eval_set(s, window, env)?;
            let amount = clamp_i64(&eval_int(n, env)?, "radius")?;
            if amount < 0 {
                return Err(Error::ConfigInvalid {
                    reason: format!("radius must be >= 0, got {amount}"),
                });
            }
            match expr {
                SetExpr::Dilate(_, _) => morph::dilate_cube(&inner, amount),
                _ => morph::erode_cube(&inner, amount),
            }
        }
        SetExpr::IndexedUnion { var, lo, hi, body } => {
            let lo = eval_int(lo, env)?;
            let hi = eval_int(hi, env)?;
            if lo > hi {
                return Err(Error::ConfigInvalid {
                    reason: format!(
                        "index range {}..{} has lower > upper",
                        brief(&lo),
                        brief(&hi)
                    ),
                });
            }
            let span = &hi - &lo + 1;
            if span > BigInt::from(MAX_RANGE) {
                return Err(Error::ConfigInvalid {
                    reason: format!(
                        "index range spans {} values, limit {MAX_RANGE}",
                        brief(&span)
                    ),
                });
            }
            let mut acc = LatticeSet::empty(window);
            let mut v = lo;
            while v <= hi {
                env.0.push((var.clone(), v.clone()));
                let piece = eval_set(body, window, env);
                env.0.pop();
                acc = acc.union(&piece?)?;
                v += 1;
            }
            Ok(acc)
        }
        SetExpr::FamilyRef {
            name,
            params,
            select,
        } => {
            let parsed = name.parse()?;
            let mut spec = FamilySpec::new(parsed);
            for (k, e) in params {
                let v = clamp_i64(&eval_int(e, env)?, &format!("parameter {k}"))?;
                spec = spec.with_param(k, v);
            }
            match (generate(&spec, window)?, select) {
                (FamilyOutput::Single(s), None) => Ok(s),
                (FamilyOutput::Single(_), Some(_)) => Err(Error::BadFamilyRef {
                    reason: format!("family {name} yields a single set; drop the selector"),
                }),
                (FamilyOutput::Pair { a, .. }, Some(PairSide::A)) => Ok(a),
                (FamilyOutput::Pair { b, .. }, Some(PairSide::B)) => Ok(b),
                (FamilyOutput::Pair { .. }, None) => Err(Error::BadFamilyRef {
                    reason: format!("family {name} yields a pair; select .A or .B"),
                }),
            }
        }
    }
}

fn eval_int(e: &IntExpr, env: &Env) -> Result<BigInt> {
    Ok(match e {
        IntExpr::Lit(v) => BigInt::from(*v),
        IntExpr::Var(name) => env.get(name)?,
        IntExpr::Add(l, r) => eval_int(l, env)? + eval_int(r, env)?,
        IntExpr::Sub(l, r) => eval_int(l, env)? - eval_int(r, env)?,
        IntExpr::Mul(l, r) => eval_int(l, env)? * eval_int(r, env)?,
        IntExpr::Neg(x) => -eval_int(x, env)?,
        IntExpr::Pow(b, x) => {
            let base = eval_int(b, env)?;
            let exp = eval_int(x, env)?;
            if exp.is_negative() || exp > BigInt::from(MAX_EXPONENT) {
                return Err(Error::EvalOverflow {
                    value: brief(&exp),
                    context: format!("exponent outside 0..={MAX_EXPONENT}"),
                });
            }
            num::pow(base, exp.to_usize().unwrap())
        }
        IntExpr::Fact(x) => {
            let n = eval_int(x, env)?;
            if n.is_negative() || n > BigInt::from(MAX_FACTORIAL) {
                return Err(Error::EvalOverflow {
                    value: brief(&n),
                    context: format!("factorial operand outside 0..={MAX_FACTORIAL}"),
                });
            }
            let mut acc = BigInt::one();
            for i in 2..=n.to_i64().unwrap() {
                acc *= i;
            }
            acc
        }
    })
}

fn clamp_i64(v: &BigInt, context: &str) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::EvalOverflow {
        value: brief(v),
        context: context.into(),
    })
}

fn brief(v: &BigInt) -> String {
    let s = v.to_string();
    if s.len() > 40 {
        format!("{}...({} digits)", &s[..20], s.len())
    } else {
        s
    }
}
