//! Pretty printer. Output parses back to the same AST.

use std::fmt::Write;

use super::ast::*;

pub fn print_contract(c: &ContractDef) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "contract {} {{", c.name);
    for f in &c.fields {
        let _ = writeln!(out, "    {} {};", f.ty, f.name);
    }
    for (i, func) in c.functions.iter().enumerate() {
        if i > 0 || !c.fields.is_empty() {
            out.push('\n');
        }
        let params: Vec<String> = func
            .params
            .iter()
            .map(|p| format!("{} {}", p.ty, p.name))
            .collect();
        let _ = write!(out, "    function {}({})", func.name, params.join(", "));
        if func.payable {
            out.push_str(" payable");
        }
        out.push(' ');
        print_block(&func.body, 1, &mut out);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_block(b: &Block, depth: usize, out: &mut String) {
    if b.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for s in b {
        print_stmt(s, depth + 1, out);
    }
    indent(depth, out);
    out.push('}');
}

fn print_stmt(s: &Stmt, depth: usize, out: &mut String) {
    indent(depth, out);
    match s {
        Stmt::Local { name, ty, init } => {
            let _ = write!(out, "{ty} {name} = {};", expr(init));
        }
        Stmt::Assign { target, op, value } => {
            let _ = write!(out, "{} {} {};", expr(target), op.symbol(), expr(value));
        }
        Stmt::Require(e) => {
            let _ = write!(out, "require({});", expr(e));
        }
        Stmt::Throw => out.push_str("throw;"),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "if ({}) ", expr(cond));
            print_block(then_branch, depth, out);
            if let Some(b) = else_branch {
                out.push_str(" else ");
                print_block(b, depth, out);
            }
        }
        Stmt::For {
            var,
            start,
            bound,
            inclusive,
            body,
        } => {
            let cmp = if *inclusive { "<=" } else { "<" };
            let _ = write!(
                out,
                "for (uint256 {var} = {}; {var} {cmp} {}; {var}++) ",
                expr(start),
                expr(bound)
            );
            print_block(body, depth, out);
        }
        Stmt::Send { to, amount } => {
            let _ = write!(out, "send({}, {});", expr(to), expr(amount));
        }
        Stmt::Push { array, value } => {
            let _ = write!(out, "{}.push({});", expr(array), expr(value));
        }
        Stmt::Return(None) => out.push_str("return;"),
        Stmt::Return(Some(e)) => {
            let _ = write!(out, "return {};", expr(e));
        }
    }
    out.push('\n');
}

pub(crate) fn expr(e: &Expr) -> String {
    match e {
        Expr::Uint(v) => v.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Addr(a) => format!("0x{}", hex::encode(a.as_bytes())),
        Expr::Name(n, _) | Expr::Field(n) | Expr::Local(n) => n.clone(),
        Expr::Index(base, idx) => format!("{}[{}]", expr(base), expr(idx)),
        Expr::Length(base) => format!("{}.length", expr(base)),
        Expr::Unary(UnOp::Not, inner) => match **inner {
            Expr::Binary(..) => format!("!({})", expr(inner)),
            _ => format!("!{}", expr(inner)),
        },
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            let left = operand(l, |q| q < p);
            let right = operand(r, |q| q <= p);
            format!("{left} {} {right}", op.symbol())
        }
        Expr::MsgSender => "msg.sender".into(),
        Expr::MsgValue => "msg.value".into(),
        Expr::Now => "now".into(),
        Expr::BlockNumber => "block.number".into(),
        Expr::BalanceThis => "balance(this)".into(),
        Expr::OracleQuery(args) => {
            let args: Vec<String> = args.iter().map(expr).collect();
            format!("oracle_query({})", args.join(", "))
        }
    }
}

fn operand(e: &Expr, needs_parens: impl Fn(u8) -> bool) -> String {
    match e {
        Expr::Binary(op, ..) if needs_parens(op.precedence()) => format!("({})", expr(e)),
        _ => expr(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn round_trip_keeps_associativity() {
        let src = "contract C { uint256 x; function f(uint256 a, uint256 b) { x = a - (b - 1); x = (a - b) - 1; x = (a + b) * 2; } }";
        let c = parse(src).unwrap();
        let printed = print_contract(&c);
        assert!(printed.contains("x = a - (b - 1);"));
        assert!(printed.contains("x = a - b - 1;"));
        assert!(printed.contains("x = (a + b) * 2;"));
        assert_eq!(parse(&printed).unwrap(), c);
    }

    #[test]
    fn round_trip_statements() {
        let src = r#"
            contract C {
                uint256[] xs;
                mapping(address => mapping(address => uint256)) m;
                function f(address to) payable {
                    uint256 q = oracle_query(1, msg.value);
                    for (uint256 i = 0; i <= xs.length - 1; i++) { xs[i] += q; }
                    if (!(m[msg.sender][to] > 0 && now > block.number)) throw; else { send(to, balance(this)); }
                    xs.push(3);
                    address z = 0x00000000000000000000000000000000000000ff;
                    return;
                }
                function fallback() {}
            }"#;
        let c = parse(src).unwrap();
        let printed = print_contract(&c);
        assert_eq!(parse(&printed).unwrap(), c);
        assert_eq!(print_contract(&parse(&printed).unwrap()), printed);
    }
}
