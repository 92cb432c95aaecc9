use std::collections::BTreeSet;

use primitive_types::U256;

use super::ast::*;

/// Literal values found in a contract, grouped by type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constants {
    pub uints: BTreeSet<U256>,
    pub bools: BTreeSet<bool>,
    pub addresses: BTreeSet<Address>,
}

/// Collects every literal in the contract.
///
/// Integers always include 0 and 1, and each integer literal brings its
/// neighbours `lit - 1` and `lit + 1` (where they fit in 256 bits). Boolean
/// literals are closed under negation.
pub fn harvest_constants(c: &ContractDef) -> Constants {
    let mut raw = Constants::default();
    for f in &c.functions {
        walk_block(&f.body, &mut raw);
    }

    let mut out = Constants {
        uints: [U256::zero(), U256::one()].into_iter().collect(),
        bools: BTreeSet::new(),
        addresses: raw.addresses,
    };
    for v in raw.uints {
        out.uints.insert(v);
        if let Some(lo) = v.checked_sub(U256::one()) {
            out.uints.insert(lo);
        }
        if let Some(hi) = v.checked_add(U256::one()) {
            out.uints.insert(hi);
        }
    }
    if !raw.bools.is_empty() {
        out.bools.extend([false, true]);
    }
    out
}

fn walk_block(b: &Block, out: &mut Constants) {
    for s in b {
        match s {
            Stmt::Local { init, .. } => walk_expr(init, out),
            Stmt::Assign { target, value, .. } => {
                walk_expr(target, out);
                walk_expr(value, out);
            }
            Stmt::Require(e) => walk_expr(e, out),
            Stmt::Throw | Stmt::Return(None) => {}
            Stmt::Return(Some(e)) => walk_expr(e, out),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                walk_expr(cond, out);
                walk_block(then_branch, out);
                if let Some(b) = else_branch {
                    walk_block(b, out);
                }
            }
            Stmt::For {
                start, bound, body, ..
            } => {
                walk_expr(start, out);
                walk_expr(bound, out);
                walk_block(body, out);
            }
            Stmt::Send { to, amount } => {
                walk_expr(to, out);
                walk_expr(amount, out);
            }
            Stmt::Push { array, value } => {
                walk_expr(array, out);
                walk_expr(value, out);
            }
        }
    }
}

fn walk_expr(e: &Expr, out: &mut Constants) {
    match e {
        Expr::Uint(v) => {
            out.uints.insert(*v);
        }
        Expr::Bool(b) => {
            out.bools.insert(*b);
        }
        Expr::Addr(a) => {
            out.addresses.insert(*a);
        }
        Expr::Index(a, b) | Expr::Binary(_, a, b) => {
            walk_expr(a, out);
            walk_expr(b, out);
        }
        Expr::Length(a) | Expr::Unary(_, a) => walk_expr(a, out),
        Expr::OracleQuery(args) => args.iter().for_each(|a| walk_expr(a, out)),
        Expr::Name(..)
        | Expr::Field(_)
        | Expr::Local(_)
        | Expr::MsgSender
        | Expr::MsgValue
        | Expr::Now
        | Expr::BlockNumber
        | Expr::BalanceThis => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn uints(c: &Constants) -> Vec<u64> {
        c.uints.iter().map(|v| v.as_u64()).collect()
    }

    #[test]
    fn no_literals_gives_closure_base() {
        let c = parse("contract C { uint256 x; function f(uint256 v) { x = v; } }").unwrap();
        let k = harvest_constants(&c);
        assert_eq!(uints(&k), vec![0, 1]);
        assert!(k.bools.is_empty());
        assert!(k.addresses.is_empty());
    }

    #[test]
    fn neighbours_added_without_wrapping() {
        let c = parse("contract C { uint256 x; function f() { x = 0; x = 7; } }").unwrap();
        assert_eq!(uints(&harvest_constants(&c)), vec![0, 1, 6, 7, 8]);

        let c = parse(
            "contract C { uint256 x; function f() { x = 0xffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff; } }",
        )
        .unwrap();
        let k = harvest_constants(&c);
        assert!(k.uints.contains(&U256::MAX));
        assert!(k.uints.contains(&(U256::MAX - 1)));
        assert_eq!(k.uints.len(), 4);
    }

    #[test]
    fn bools_closed_under_negation() {
        let c = parse("contract C { bool b; function f() { b = true; } }").unwrap();
        let k = harvest_constants(&c);
        assert_eq!(k.bools.into_iter().collect::<Vec<_>>(), vec![false, true]);
    }

    #[test]
    fn address_literals_collected() {
        let c = parse(
            "contract C { address a; function f() { a = 0x00000000000000000000000000000000000000aa; } }",
        )
        .unwrap();
        let k = harvest_constants(&c);
        assert_eq!(k.addresses.len(), 1);
        assert_eq!(k.addresses.iter().next().unwrap().as_bytes()[19], 0xaa);
    }
}
