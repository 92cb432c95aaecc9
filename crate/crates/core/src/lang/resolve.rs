//! Name resolution and type checking.
//!
//! Rewrites every [`Expr::Name`] into a field or local reference and rejects
//! programs that would otherwise need dynamic type checks in the interpreter.

use std::collections::HashSet;

use super::ast::*;
use super::ParseError;

pub fn resolve(mut c: ContractDef) -> Result<ContractDef, ParseError> {
    let mut seen = HashSet::new();
    for f in &c.fields {
        if !seen.insert(f.name.clone()) {
            return Err(ParseError::DuplicateName {
                kind: "field",
                name: f.name.clone(),
            });
        }
    }
    let mut seen = HashSet::new();
    for f in &c.functions {
        if !seen.insert(f.name.clone()) {
            return Err(ParseError::DuplicateName {
                kind: "function",
                name: f.name.clone(),
            });
        }
    }

    let fields = c.fields.clone();
    for func in &mut c.functions {
        check_signature(func)?;
        let mut r = Resolver {
            fields: &fields,
            function: func.name.clone(),
            scopes: vec![func.params.iter().map(|p| (p.name.clone(), p.ty, false)).collect()],
        };
        r.block(&mut func.body)?;
    }
    Ok(c)
}

fn check_signature(func: &FunctionDef) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    for p in &func.params {
        if !seen.insert(p.name.as_str()) {
            return Err(ParseError::DuplicateName {
                kind: "parameter",
                name: format!("{}.{}", func.name, p.name),
            });
        }
    }
    if func.name == crate::FALLBACK_FN && !func.params.is_empty() {
        return Err(ParseError::Invalid(
            "`fallback` must not take parameters".into(),
        ));
    }
    if func.name == crate::CALLBACK_FN
        && func.params.first().map(|p| p.ty) != Some(ScalarType::Uint)
    {
        return Err(ParseError::Invalid(format!(
            "`{}` must take a uint256 query id as its first parameter",
            crate::CALLBACK_FN
        )));
    }
    Ok(())
}

fn compatible(expected: ScalarType, got: ScalarType) -> bool {
    expected == got
        || matches!(
            (expected, got),
            (ScalarType::Uint, ScalarType::Address) | (ScalarType::Address, ScalarType::Uint)
        )
}

struct Resolver<'a> {
    fields: &'a [FieldDecl],
    function: String,
    /// (name, type, read-only) per lexical scope.
    scopes: Vec<Vec<(String, ScalarType, bool)>>,
}

impl Resolver<'_> {
    fn type_err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Type {
            function: self.function.clone(),
            message: message.into(),
        })
    }

    fn lookup_local(&self, name: &str) -> Option<(ScalarType, bool)> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _, _)| n == name)
            .map(|(_, t, ro)| (*t, *ro))
    }

    fn declare(&mut self, name: &str, ty: ScalarType, read_only: bool) -> Result<(), ParseError> {
        if self.lookup_local(name).is_some() {
            return Err(ParseError::DuplicateName {
                kind: "local",
                name: format!("{}.{}", self.function, name),
            });
        }
        self.scopes
            .last_mut()
            .expect("scope stack is never empty")
            .push((name.to_string(), ty, read_only));
        Ok(())
    }

    fn scoped_block(&mut self, b: &mut Block) -> Result<(), ParseError> {
        self.scopes.push(Vec::new());
        let r = self.block(b);
        self.scopes.pop();
        r
    }

    fn block(&mut self, b: &mut Block) -> Result<(), ParseError> {
        for s in b.iter_mut() {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn expect_scalar(&mut self, e: &mut Expr, want: ScalarType) -> Result<(), ParseError> {
        let got = self.scalar_expr(e)?;
        if !compatible(want, got) {
            return self.type_err(format!("expected {want}, found {got}"));
        }
        Ok(())
    }

    fn stmt(&mut self, s: &mut Stmt) -> Result<(), ParseError> {
        match s {
            Stmt::Local { name, ty, init } => {
                let ty = *ty;
                self.value_expr(init, ty)?;
                self.declare(name, ty, false)
            }
            Stmt::Assign { target, op, value } => {
                let target_ty = self.lvalue(target)?;
                if *op == AssignOp::Set {
                    self.value_expr(value, target_ty)
                } else {
                    if target_ty != ScalarType::Uint {
                        return self.type_err(format!(
                            "`{}` needs a uint256 target",
                            op.symbol()
                        ));
                    }
                    self.expect_scalar(value, ScalarType::Uint)
                }
            }
            Stmt::Require(cond) => self.expect_scalar(cond, ScalarType::Bool),
            Stmt::Throw | Stmt::Return(None) => Ok(()),
            Stmt::Return(Some(e)) => self.scalar_expr(e).map(|_| ()),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expect_scalar(cond, ScalarType::Bool)?;
                self.scoped_block(then_branch)?;
                if let Some(b) = else_branch {
                    self.scoped_block(b)?;
                }
                Ok(())
            }
            Stmt::For {
                var,
                start,
                bound,
                body,
                ..
            } => {
                self.expect_scalar(start, ScalarType::Uint)?;
                self.expect_scalar(bound, ScalarType::Uint)?;
                self.scopes.push(Vec::new());
                let r = self
                    .declare(var, ScalarType::Uint, true)
                    .and_then(|_| self.block(body));
                self.scopes.pop();
                r
            }
            Stmt::Send { to, amount } => {
                self.expect_scalar(to, ScalarType::Address)?;
                self.expect_scalar(amount, ScalarType::Uint)
            }
            Stmt::Push { array, value } => {
                let elem = match self.expr(array)? {
                    TypeTag::Array(elem) => elem,
                    other => return self.type_err(format!("`push` on non-array {other}")),
                };
                if array.root_field().is_none() {
                    return self.type_err("`push` target must be a field");
                }
                self.expect_scalar(value, elem)
            }
        }
    }

    /// Right-hand side of a local declaration or plain assignment; the only
    /// place an oracle query may appear.
    fn value_expr(&mut self, e: &mut Expr, want: ScalarType) -> Result<(), ParseError> {
        if let Expr::OracleQuery(args) = e {
            if want != ScalarType::Uint {
                return self.type_err("oracle_query yields a uint256 query id");
            }
            for a in args.iter_mut() {
                self.scalar_expr(a)?;
            }
            return Ok(());
        }
        self.expect_scalar(e, want)
    }

    fn lvalue(&mut self, e: &mut Expr) -> Result<ScalarType, ParseError> {
        if let Expr::Name(name, _) = e {
            if let Some((_, true)) = self.lookup_local(name) {
                return self.type_err(format!("loop variable `{name}` is read-only"));
            }
        }
        let ty = self.expr(e)?;
        match e {
            Expr::Field(_) | Expr::Local(_) | Expr::Index(..) => {}
            _ => return self.type_err("left-hand side is not assignable"),
        }
        match ty {
            TypeTag::Scalar(s) => Ok(s),
            other => self.type_err(format!("cannot assign to a whole {other}")),
        }
    }

    fn scalar_expr(&mut self, e: &mut Expr) -> Result<ScalarType, ParseError> {
        match self.expr(e)? {
            TypeTag::Scalar(s) => Ok(s),
            other => self.type_err(format!("expected a scalar, found {other}")),
        }
    }

    fn expr(&mut self, e: &mut Expr) -> Result<TypeTag, ParseError> {
        use ScalarType::*;
        let ty = match e {
            Expr::Uint(_) => TypeTag::Scalar(Uint),
            Expr::Bool(_) => TypeTag::Scalar(Bool),
            Expr::Addr(_) => TypeTag::Scalar(Address),
            Expr::MsgSender => TypeTag::Scalar(Address),
            Expr::MsgValue | Expr::Now | Expr::BlockNumber | Expr::BalanceThis => {
                TypeTag::Scalar(Uint)
            }
            Expr::OracleQuery(_) => {
                return self.type_err("oracle_query may only initialise a variable");
            }
            Expr::Name(name, pos) => {
                if let Some((ty, _)) = self.lookup_local(name) {
                    let name = std::mem::take(name);
                    *e = Expr::Local(name);
                    TypeTag::Scalar(ty)
                } else if let Some(f) = self.fields.iter().find(|f| f.name == *name) {
                    let ty = f.ty.clone();
                    let name = std::mem::take(name);
                    *e = Expr::Field(name);
                    ty
                } else {
                    return Err(ParseError::UnknownIdentifier {
                        name: name.clone(),
                        pos: *pos,
                        function: self.function.clone(),
                    });
                }
            }
            Expr::Field(name) => match self.fields.iter().find(|f| f.name == *name) {
                Some(f) => f.ty.clone(),
                None => return self.type_err(format!("no field `{name}`")),
            },
            Expr::Local(name) => match self.lookup_local(name) {
                Some((t, _)) => TypeTag::Scalar(t),
                None => return self.type_err(format!("no local `{name}`")),
            },
            Expr::Index(base, idx) => {
                let base_ty = self.expr(base)?;
                match base_ty {
                    TypeTag::Map(key, value) => {
                        self.expect_scalar(idx, key)?;
                        *value
                    }
                    TypeTag::Array(elem) => {
                        self.expect_scalar(idx, Uint)?;
                        TypeTag::Scalar(elem)
                    }
                    TypeTag::Scalar(s) => return self.type_err(format!("cannot index {s}")),
                }
            }
            Expr::Length(base) => match self.expr(base)? {
                TypeTag::Array(_) => TypeTag::Scalar(Uint),
                other => return self.type_err(format!("`.length` on {other}")),
            },
            Expr::Unary(UnOp::Not, inner) => {
                self.expect_scalar(inner, Bool)?;
                TypeTag::Scalar(Bool)
            }
            Expr::Binary(op, l, r) => {
                let op = *op;
                let lt = self.scalar_expr(l)?;
                let rt = self.scalar_expr(r)?;
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                        if lt != Uint || rt != Uint {
                            return self.type_err(format!(
                                "`{}` needs uint256 operands, found {lt} and {rt}",
                                op.symbol()
                            ));
                        }
                        TypeTag::Scalar(Uint)
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        if lt != Uint || rt != Uint {
                            return self.type_err(format!(
                                "`{}` needs uint256 operands, found {lt} and {rt}",
                                op.symbol()
                            ));
                        }
                        TypeTag::Scalar(Bool)
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if !compatible(lt, rt) {
                            return self.type_err(format!("cannot compare {lt} with {rt}"));
                        }
                        TypeTag::Scalar(Bool)
                    }
                    BinOp::And | BinOp::Or => {
                        if lt != Bool || rt != Bool {
                            return self.type_err(format!(
                                "`{}` needs bool operands",
                                op.symbol()
                            ));
                        }
                        TypeTag::Scalar(Bool)
                    }
                }
            }
        };
        Ok(ty)
    }
}
