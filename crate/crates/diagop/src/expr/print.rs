//! Pretty-printer for generator expressions.
//!
//! Printing then re-parsing is the identity on the AST; the round trip is
//! exercised by a property test. Parenthesization is minimal with respect to
//! the grammar's precedence levels.

use std::fmt;

use super::{GenExpr, Pred};

// Precedence levels: 0 expr (and `if`), 1 add/sub, 2 mul/div, 3 unary minus,
// 4 power, 5 atoms.
fn prec(e: &GenExpr) -> u8 {
    match e {
        GenExpr::If { .. } => 0,
        GenExpr::Add(..) | GenExpr::Sub(..) => 1,
        GenExpr::Mul(..) | GenExpr::Div(..) => 2,
        GenExpr::Neg(_) => 3,
        GenExpr::Pow(..) => 4,
        GenExpr::Const(c) if *c < 0.0 => 3, // prints with a leading minus
        _ => 5,
    }
}

fn write_prec(f: &mut fmt::Formatter<'_>, e: &GenExpr, min: u8) -> fmt::Result {
    let p = prec(e);
    if p < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &GenExpr) -> fmt::Result {
    match e {
        GenExpr::Const(c) => write!(f, "{c}"),
        GenExpr::Index => write!(f, "n"),
        GenExpr::PairK => write!(f, "k(n)"),
        GenExpr::PairM => write!(f, "m(n)"),
        GenExpr::Neg(x) => {
            write!(f, "-")?;
            write_prec(f, x, 3)
        }
        GenExpr::Add(a, b) => {
            write_prec(f, a, 1)?;
            write!(f, " + ")?;
            write_prec(f, b, 2)
        }
        GenExpr::Sub(a, b) => {
            write_prec(f, a, 1)?;
            write!(f, " - ")?;
            write_prec(f, b, 2)
        }
        GenExpr::Mul(a, b) => {
            write_prec(f, a, 2)?;
            write!(f, " * ")?;
            write_prec(f, b, 3)
        }
        GenExpr::Div(a, b) => {
            write_prec(f, a, 2)?;
            write!(f, " / ")?;
            write_prec(f, b, 3)
        }
        GenExpr::Pow(a, b) => {
            // Right-associative: the left side must bind tighter than `^`.
            write_prec(f, a, 5)?;
            write!(f, "^")?;
            write_prec(f, b, 3)
        }
        GenExpr::Exp2(x) => {
            write!(f, "exp2(")?;
            write_expr(f, x)?;
            write!(f, ")")
        }
        GenExpr::If { pred, then, els } => {
            write!(f, "if {pred} then ")?;
            write_expr(f, then)?;
            write!(f, " else ")?;
            write_expr(f, els)
        }
    }
}

impl fmt::Display for GenExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

impl serde::Serialize for GenExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Le(p) => write!(f, "n <= {p}"),
            Pred::Even => write!(f, "even(n)"),
            Pred::Odd => write!(f, "odd(n)"),
            Pred::In(set) => {
                write!(f, "n in {{")?;
                for (i, v) in set.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_generator;

    #[test]
    fn round_trips_fixed_expressions() {
        for src in [
            "2^(n^0.5)",
            "0",
            "k(n) + 1/(m(n)+2)",
            "if odd(n) then (n + 1)/2 else 0",
            "if n <= 40 then 1 else 0",
            "if n in {1, 2, 3} then n else -n",
            "1 * (k(n) - m(n)) / (k(n) + m(n))",
            "exp2(n^0.3)",
            "(2^n)^0.5",
            "-(n + 1)",
            "2 - (3 - n)",
            "n / (2 / m(n))",
        ] {
            let ast = parse_generator(src).unwrap();
            let printed = ast.to_string();
            let reparsed = parse_generator(&printed)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            assert_eq!(ast, reparsed, "round trip of `{src}` via `{printed}`");
        }
    }

    #[test]
    fn shortest_float_formatting_survives() {
        let ast = parse_generator("0.30000000000000004 + n").unwrap();
        let reparsed = parse_generator(&ast.to_string()).unwrap();
        assert_eq!(ast, reparsed);
    }
}
