//! Generator expressions: the small grammar used to describe eigenvalue
//! sequences past their explicit prefix.
//!
//! An expression is evaluated at a basis index `n ≥ 1` and yields a real
//! number. Besides arithmetic, the grammar knows the index `n`, the decoded
//! pair components `k(n)` and `m(n)` of the dyadic pairing bijection, `exp2`,
//! and conditionals over simple index predicates.
//!
//! Grammar (see also the CLI docs):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := number | 'n' | 'k(n)' | 'm(n)' | '(' expr ')'
//!         | 'exp2(' expr ')' | 'if' pred 'then' expr 'else' expr
//! pred   := 'n <=' int | 'even(n)' | 'odd(n)' | 'n in {' int-list '}'
//! ```

mod parse;
mod print;

pub use parse::parse_generator;

use std::collections::BTreeSet;

use crate::pairing::pair_decode;
use crate::DiagopError;

/// Index predicate of a conditional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    /// `n <= bound`
    Le(u64),
    /// `even(n)`
    Even,
    /// `odd(n)`
    Odd,
    /// `n in {a, b, ...}` (explicit finite set)
    In(BTreeSet<u64>),
}

impl Pred {
    pub fn holds(&self, n: u64) -> bool {
        match self {
            Pred::Le(p) => n <= *p,
            Pred::Even => n % 2 == 0,
            Pred::Odd => n % 2 == 1,
            Pred::In(set) => set.contains(&n),
        }
    }
}

/// Abstract syntax tree of a generator expression.
#[derive(Debug, Clone, PartialEq)]
pub enum GenExpr {
    Const(f64),
    /// The index variable `n`.
    Index,
    /// `k(n)`: first component of the pair decoding of `n`.
    PairK,
    /// `m(n)`: second component of the pair decoding of `n`.
    PairM,
    Neg(Box<GenExpr>),
    Add(Box<GenExpr>, Box<GenExpr>),
    Sub(Box<GenExpr>, Box<GenExpr>),
    Mul(Box<GenExpr>, Box<GenExpr>),
    Div(Box<GenExpr>, Box<GenExpr>),
    Pow(Box<GenExpr>, Box<GenExpr>),
    Exp2(Box<GenExpr>),
    If {
        pred: Pred,
        then: Box<GenExpr>,
        els: Box<GenExpr>,
    },
}

impl GenExpr {
    /// Evaluates the expression at index `n ≥ 1`.
    ///
    /// Evaluation is pure; the same `(expr, n)` always yields the same bits.
    pub fn eval(&self, n: u64) -> f64 {
        debug_assert!(n >= 1, "generator indices start at 1");
        match self {
            GenExpr::Const(c) => *c,
            GenExpr::Index => n as f64,
            GenExpr::PairK => pair_decode(n).0 as f64,
            GenExpr::PairM => pair_decode(n).1 as f64,
            GenExpr::Neg(e) => -e.eval(n),
            GenExpr::Add(a, b) => a.eval(n) + b.eval(n),
            GenExpr::Sub(a, b) => a.eval(n) - b.eval(n),
            GenExpr::Mul(a, b) => a.eval(n) * b.eval(n),
            GenExpr::Div(a, b) => a.eval(n) / b.eval(n),
            GenExpr::Pow(a, b) => a.eval(n).powf(b.eval(n)),
            GenExpr::Exp2(e) => e.eval(n).exp2(),
            GenExpr::If { pred, then, els } => {
                if pred.holds(n) {
                    then.eval(n)
                } else {
                    els.eval(n)
                }
            }
        }
    }

    /// Checks that the expression evaluates to a finite real on `1..=horizon`.
    ///
    /// This is a sampled guarantee, not a proof; operations that sample past
    /// the validated range re-check finiteness on the fly.
    pub fn validate(&self, horizon: u64) -> Result<(), DiagopError> {
        for n in 1..=horizon {
            let v = self.eval(n);
            if !v.is_finite() {
                return Err(DiagopError::NonFiniteValue { index: n, value: v });
            }
        }
        Ok(())
    }

    /// Structural equality ignoring the values of numeric constants.
    ///
    /// Two generators with the same shape describe the same family up to
    /// parameters (`B_s` vs `B_t`), which is what the co-diagonal domain
    /// comparison needs from metadata.
    pub fn same_shape(&self, other: &GenExpr) -> bool {
        use GenExpr::*;
        match (self, other) {
            (Const(_), Const(_)) => true,
            (Index, Index) | (PairK, PairK) | (PairM, PairM) => true,
            (Neg(a), Neg(b)) | (Exp2(a), Exp2(b)) => a.same_shape(b),
            (Add(a1, a2), Add(b1, b2))
            | (Sub(a1, a2), Sub(b1, b2))
            | (Mul(a1, a2), Mul(b1, b2))
            | (Div(a1, a2), Div(b1, b2))
            | (Pow(a1, a2), Pow(b1, b2)) => a1.same_shape(b1) && a2.same_shape(b2),
            (
                If { pred: p1, then: t1, els: e1 },
                If { pred: p2, then: t2, els: e2 },
            ) => p1 == p2 && t1.same_shape(t2) && e1.same_shape(e2),
            _ => false,
        }
    }

    /// Simplifies the expression under the assumption `n > beyond`.
    ///
    /// Conditionals whose predicate is decided for every such index collapse
    /// to the live branch. Two sequences whose simplified tails are equal
    /// agree at every index past `beyond`.
    pub fn tail_simplify(&self, beyond: u64) -> GenExpr {
        use GenExpr::*;
        let rec = |e: &GenExpr| Box::new(e.tail_simplify(beyond));
        match self {
            If { pred, then, els } => match pred {
                Pred::Le(p) if *p <= beyond => els.tail_simplify(beyond),
                Pred::In(set) if set.iter().all(|x| *x <= beyond) => els.tail_simplify(beyond),
                _ => If {
                    pred: pred.clone(),
                    then: rec(then),
                    els: rec(els),
                },
            },
            Neg(e) => Neg(rec(e)),
            Exp2(e) => Exp2(rec(e)),
            Add(a, b) => Add(rec(a), rec(b)),
            Sub(a, b) => Sub(rec(a), rec(b)),
            Mul(a, b) => Mul(rec(a), rec(b)),
            Div(a, b) => Div(rec(a), rec(b)),
            Pow(a, b) => Pow(rec(a), rec(b)),
            other => other.clone(),
        }
    }

    /// Values attained with infinite multiplicity past `from`, as far as the
    /// expression shape reveals them (constant branches reached on infinite
    /// index sets). Best effort: may miss values, never invents them.
    pub fn infinite_multiplicity_values(&self, from: u64) -> Vec<f64> {
        let mut out = Vec::new();
        collect_inf_mult(self, Parity::Any, from, &mut out);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Parity {
    Any,
    Even,
    Odd,
}

fn collect_inf_mult(expr: &GenExpr, region: Parity, from: u64, out: &mut Vec<f64>) {
    match expr {
        GenExpr::Const(c) => out.push(*c),
        GenExpr::Neg(e) => {
            let mut inner = Vec::new();
            collect_inf_mult(e, region, from, &mut inner);
            out.extend(inner.into_iter().map(|v| -v));
        }
        GenExpr::If { pred, then, els } => match pred {
            // {n > from : n ≤ p} and explicit sets are finite: only the else
            // branch is hit infinitely often.
            Pred::Le(_) | Pred::In(_) => collect_inf_mult(els, region, from, out),
            Pred::Even => match region {
                Parity::Any => {
                    collect_inf_mult(then, Parity::Even, from, out);
                    collect_inf_mult(els, Parity::Odd, from, out);
                }
                Parity::Even => collect_inf_mult(then, region, from, out),
                Parity::Odd => collect_inf_mult(els, region, from, out),
            },
            Pred::Odd => match region {
                Parity::Any => {
                    collect_inf_mult(then, Parity::Odd, from, out);
                    collect_inf_mult(els, Parity::Even, from, out);
                }
                Parity::Odd => collect_inf_mult(then, region, from, out),
                Parity::Even => collect_inf_mult(els, region, from, out),
            },
        },
        // Non-constant on an infinite region: nothing to report.
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: GenExpr) -> Box<GenExpr> {
        Box::new(e)
    }

    #[test]
    fn eval_basics() {
        let e = GenExpr::Add(b(GenExpr::Index), b(GenExpr::Const(1.0)));
        assert_eq!(e.eval(3), 4.0);
        let p = GenExpr::Pow(b(GenExpr::Const(2.0)), b(GenExpr::Index));
        assert_eq!(p.eval(10), 1024.0);
    }

    #[test]
    fn eval_pair_components() {
        // n = 12 = 2^2 * 3 decodes to (k, m) = (3, 2).
        assert_eq!(GenExpr::PairK.eval(12), 3.0);
        assert_eq!(GenExpr::PairM.eval(12), 2.0);
    }

    #[test]
    fn eval_is_pure() {
        let e = parse_generator("2^(n^0.5) + k(n)/(m(n)+2)").unwrap();
        for n in [1u64, 7, 64, 4096] {
            let v1 = e.eval(n);
            let v2 = e.eval(n);
            assert_eq!(v1.to_bits(), v2.to_bits());
        }
    }

    #[test]
    fn conditional_predicates() {
        let e = parse_generator("if even(n) then 1 else 0").unwrap();
        assert_eq!(e.eval(2), 1.0);
        assert_eq!(e.eval(3), 0.0);
        let e = parse_generator("if n <= 4 then n else 0").unwrap();
        assert_eq!(e.eval(4), 4.0);
        assert_eq!(e.eval(5), 0.0);
        let e = parse_generator("if n in {1, 5, 9} then 1 else 0").unwrap();
        assert_eq!(e.eval(5), 1.0);
        assert_eq!(e.eval(6), 0.0);
    }

    #[test]
    fn validate_rejects_non_finite() {
        let e = parse_generator("1/(n - 3)").unwrap();
        assert!(e.validate(10).is_err());
        let ok = parse_generator("1/(n + 3)").unwrap();
        assert!(ok.validate(1000).is_ok());
    }

    #[test]
    fn tail_simplify_drops_decided_conditionals() {
        let e = parse_generator("if n <= 100 then 7 else n").unwrap();
        assert_eq!(e.tail_simplify(100), GenExpr::Index);
        let f = parse_generator("if n in {2, 50} then 7 else n").unwrap();
        assert_eq!(f.tail_simplify(64), GenExpr::Index);
        // even(n) is never decided by a lower bound
        let g = parse_generator("if even(n) then 1 else 0").unwrap();
        assert_eq!(g.tail_simplify(1 << 20), g);
    }

    #[test]
    fn infinite_multiplicity_detection() {
        let e = parse_generator("if odd(n) then (n+1)/2 else 0").unwrap();
        assert_eq!(e.infinite_multiplicity_values(1), vec![0.0]);
        let c = parse_generator("7").unwrap();
        assert_eq!(c.infinite_multiplicity_values(1), vec![7.0]);
        let nested = parse_generator("if even(n) then (if odd(n) then 1 else 2) else 3").unwrap();
        assert_eq!(nested.infinite_multiplicity_values(1), vec![2.0, 3.0]);
        let none = parse_generator("n + 1").unwrap();
        assert!(none.infinite_multiplicity_values(1).is_empty());
    }

    #[test]
    fn same_shape_ignores_constants() {
        let a = parse_generator("k(n) + 0/(m(n)+2)").unwrap();
        let b = parse_generator("k(n) + 1/(m(n)+2)").unwrap();
        assert!(a.same_shape(&b));
        let c = parse_generator("k(n) + n/(m(n)+2)").unwrap();
        assert!(!a.same_shape(&c));
    }
}
