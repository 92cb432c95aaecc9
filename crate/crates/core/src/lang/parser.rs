//! Recursive-descent parser producing an unresolved [`ContractDef`].

use primitive_types::{H160, U256};

use super::ast::*;
use super::lexer::{tokenize, Spanned, Tok};
use super::ParseError;

const RESERVED: &[&str] = &[
    "contract",
    "function",
    "payable",
    "mapping",
    "uint256",
    "uint",
    "bool",
    "address",
    "if",
    "else",
    "for",
    "require",
    "throw",
    "send",
    "return",
    "true",
    "false",
    "msg",
    "now",
    "block",
    "this",
    "balance",
    "oracle_query",
];

pub fn parse_unresolved(src: &str) -> Result<ContractDef, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0 };
    let c = p.contract()?;
    p.expect_eof()?;
    Ok(c)
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&[&format!("`{p}`")])
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.error(&[&format!("`{w}`")])
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => self.error(&["end of input"]),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.advance();
                Ok((s, pos))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn at_scalar(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if matches!(s.as_str(), "uint256" | "uint" | "bool" | "address"))
    }

    fn scalar(&mut self) -> Result<ScalarType, ParseError> {
        let ty = match self.peek() {
            Tok::Ident(s) if s == "uint256" || s == "uint" => ScalarType::Uint,
            Tok::Ident(s) if s == "bool" => ScalarType::Bool,
            Tok::Ident(s) if s == "address" => ScalarType::Address,
            _ => return self.error(&["`uint256`", "`bool`", "`address`"]),
        };
        self.advance();
        Ok(ty)
    }

    fn type_tag(&mut self) -> Result<TypeTag, ParseError> {
        if self.eat_word("mapping") {
            self.expect_punct("(")?;
            let key_pos = self.pos();
            let key = self.scalar()?;
            if key == ScalarType::Bool {
                return Err(ParseError::Syntax {
                    pos: key_pos,
                    found: "`bool`".into(),
                    expected: vec!["`uint256`".into(), "`address`".into()],
                });
            }
            self.expect_punct("=>")?;
            let value = if self.is_word("mapping") {
                self.type_tag()?
            } else {
                TypeTag::Scalar(self.scalar()?)
            };
            self.expect_punct(")")?;
            return Ok(TypeTag::Map(key, Box::new(value)));
        }
        let s = self.scalar()?;
        if self.eat_punct("[") {
            self.expect_punct("]")?;
            Ok(TypeTag::Array(s))
        } else {
            Ok(TypeTag::Scalar(s))
        }
    }

    fn contract(&mut self) -> Result<ContractDef, ParseError> {
        self.expect_word("contract")?;
        let (name, _) = self.ident()?;
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        let mut functions = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.is_word("function") {
                functions.push(self.function()?);
            } else if self.at_scalar() || self.is_word("mapping") {
                let ty = self.type_tag()?;
                let (fname, _) = self.ident()?;
                self.expect_punct(";")?;
                fields.push(FieldDecl { name: fname, ty });
            } else {
                return self.error(&["field declaration", "`function`", "`}`"]);
            }
        }
        Ok(ContractDef {
            name,
            fields,
            functions,
        })
    }

    fn function(&mut self) -> Result<FunctionDef, ParseError> {
        self.expect_word("function")?;
        let (name, _) = self.ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.is_punct(")") {
            loop {
                let ty = self.scalar()?;
                let (pname, _) = self.ident()?;
                params.push(Param { name: pname, ty });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        let payable = self.eat_word("payable");
        let body = self.block()?;
        Ok(FunctionDef {
            name,
            params,
            payable,
            body,
        })
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.eat_punct("}") {
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    /// Either a braced block or a single statement.
    fn body(&mut self) -> Result<Block, ParseError> {
        if self.is_punct("{") {
            self.block()
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.at_scalar() {
            let ty = self.scalar()?;
            let (name, _) = self.ident()?;
            let init = if self.eat_punct("=") {
                self.expr()?
            } else {
                default_literal(ty)
            };
            self.expect_punct(";")?;
            return Ok(Stmt::Local { name, ty, init });
        }
        if self.eat_word("require") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(Stmt::Require(cond));
        }
        if self.eat_word("throw") {
            self.expect_punct(";")?;
            return Ok(Stmt::Throw);
        }
        if self.eat_word("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then_branch = self.body()?;
            let else_branch = if self.eat_word("else") {
                Some(self.body()?)
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then_branch,
                else_branch,
            });
        }
        if self.eat_word("for") {
            return self.for_stmt();
        }
        if self.eat_word("send") {
            self.expect_punct("(")?;
            let to = self.expr()?;
            self.expect_punct(",")?;
            let amount = self.expr()?;
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(Stmt::Send { to, amount });
        }
        if self.eat_word("return") {
            let value = if self.is_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            return Ok(Stmt::Return(value));
        }

        let target = self.postfix()?;
        if self.is_punct(".") && matches!(self.peek_at(1), Tok::Ident(s) if s == "push") {
            self.advance();
            self.advance();
            self.expect_punct("(")?;
            let value = self.expr()?;
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(Stmt::Push {
                array: target,
                value,
            });
        }
        let op = match self.peek() {
            Tok::Punct("=") => Some(AssignOp::Set),
            Tok::Punct("+=") => Some(AssignOp::Add),
            Tok::Punct("-=") => Some(AssignOp::Sub),
            Tok::Punct("*=") => Some(AssignOp::Mul),
            Tok::Punct("/=") => Some(AssignOp::Div),
            Tok::Punct("%=") => Some(AssignOp::Mod),
            _ => None,
        };
        if let Some(op) = op {
            self.advance();
            let value = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt::Assign { target, op, value });
        }
        let step = if self.eat_punct("++") {
            AssignOp::Add
        } else if self.eat_punct("--") {
            AssignOp::Sub
        } else {
            return self.error(&["`=`", "`+=`", "`++`", "`.push`"]);
        };
        self.expect_punct(";")?;
        Ok(Stmt::Assign {
            target,
            op: step,
            value: Expr::Uint(U256::one()),
        })
    }

    fn for_stmt(&mut self) -> Result<Stmt, ParseError> {
        self.expect_punct("(")?;
        let ty_pos = self.pos();
        if self.scalar()? != ScalarType::Uint {
            return Err(ParseError::Syntax {
                pos: ty_pos,
                found: "non-integer loop variable".into(),
                expected: vec!["`uint256`".into()],
            });
        }
        let (var, _) = self.ident()?;
        self.expect_punct("=")?;
        let start = self.expr()?;
        self.expect_punct(";")?;
        let (cond_var, cond_pos) = self.ident()?;
        if cond_var != var {
            return Err(ParseError::Syntax {
                pos: cond_pos,
                found: format!("`{cond_var}`"),
                expected: vec![format!("loop variable `{var}`")],
            });
        }
        let inclusive = if self.eat_punct("<") {
            false
        } else if self.eat_punct("<=") {
            true
        } else {
            return self.error(&["`<`", "`<=`"]);
        };
        let bound = self.additive_bound()?;
        self.expect_punct(";")?;
        let (step_var, step_pos) = self.ident()?;
        if step_var != var {
            return Err(ParseError::Syntax {
                pos: step_pos,
                found: format!("`{step_var}`"),
                expected: vec![format!("loop variable `{var}`")],
            });
        }
        self.expect_punct("++")?;
        self.expect_punct(")")?;
        let body = self.body()?;
        Ok(Stmt::For {
            var,
            start,
            bound,
            inclusive,
            body,
        })
    }

    /// Loop bounds are arithmetic expressions; comparisons are not allowed there.
    fn additive_bound(&mut self) -> Result<Expr, ParseError> {
        self.binary(BinOp::Add.precedence())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::Punct(p) => match *p {
                "+" => BinOp::Add,
                "-" => BinOp::Sub,
                "*" => BinOp::Mul,
                "/" => BinOp::Div,
                "%" => BinOp::Mod,
                "==" => BinOp::Eq,
                "!=" => BinOp::Ne,
                "<" => BinOp::Lt,
                "<=" => BinOp::Le,
                ">" => BinOp::Gt,
                ">=" => BinOp::Ge,
                "&&" => BinOp::And,
                "||" => BinOp::Or,
                _ => return None,
            },
            _ => return None,
        };
        Some(op)
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binop() {
            if op.precedence() < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_punct("!") {
            let inner = self.unary()?;
            return Ok(Expr::Unary(UnOp::Not, Box::new(inner)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct("[") {
                let idx = self.expr()?;
                self.expect_punct("]")?;
                e = Expr::Index(Box::new(e), Box::new(idx));
            } else if self.is_punct(".")
                && matches!(self.peek_at(1), Tok::Ident(s) if s == "length")
            {
                self.advance();
                self.advance();
                e = Expr::Length(Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number { value, hex_digits } => {
                self.advance();
                if hex_digits == Some(40) {
                    let bytes = value.to_big_endian();
                    Ok(Expr::Addr(H160::from_slice(&bytes[12..])))
                } else {
                    Ok(Expr::Uint(value))
                }
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" => {
                    self.advance();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.advance();
                    Ok(Expr::Bool(false))
                }
                "now" => {
                    self.advance();
                    Ok(Expr::Now)
                }
                "msg" => {
                    self.advance();
                    self.expect_punct(".")?;
                    if self.eat_word("sender") {
                        Ok(Expr::MsgSender)
                    } else if self.eat_word("value") {
                        Ok(Expr::MsgValue)
                    } else {
                        self.error(&["`sender`", "`value`"])
                    }
                }
                "block" => {
                    self.advance();
                    self.expect_punct(".")?;
                    self.expect_word("number")?;
                    Ok(Expr::BlockNumber)
                }
                "balance" => {
                    self.advance();
                    self.expect_punct("(")?;
                    self.expect_word("this")?;
                    self.expect_punct(")")?;
                    Ok(Expr::BalanceThis)
                }
                "oracle_query" => {
                    self.advance();
                    self.expect_punct("(")?;
                    let mut args = Vec::new();
                    if !self.is_punct(")") {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat_punct(",") {
                                break;
                            }
                        }
                    }
                    self.expect_punct(")")?;
                    Ok(Expr::OracleQuery(args))
                }
                _ => {
                    let (name, _) = self.ident()?;
                    Ok(Expr::Name(name, pos))
                }
            },
            _ => self.error(&["expression"]),
        }
    }
}

pub(crate) fn default_literal(ty: ScalarType) -> Expr {
    match ty {
        ScalarType::Uint => Expr::Uint(U256::zero()),
        ScalarType::Bool => Expr::Bool(false),
        ScalarType::Address => Expr::Addr(H160::zero()),
    }
}
