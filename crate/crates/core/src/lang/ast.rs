//! Abstract syntax tree for `.fsol` contracts.
//!
//! The parser produces [`Expr::Name`] for every identifier; the resolver
//! rewrites those into [`Expr::Field`] or [`Expr::Local`] so later passes
//! never have to re-do scoping.

use std::fmt;

use primitive_types::{H160, U256};

pub type Address = H160;

/// Scalar types usable as parameters, locals, array elements and map keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarType {
    Uint,
    Bool,
    Address,
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarType::Uint => "uint256",
            ScalarType::Bool => "bool",
            ScalarType::Address => "address",
        })
    }
}

/// Declared type of a contract field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeTag {
    Scalar(ScalarType),
    Array(ScalarType),
    /// Key is `uint256` or `address`; value is a scalar or another map.
    Map(ScalarType, Box<TypeTag>),
}

impl TypeTag {
    pub fn scalar(&self) -> Option<ScalarType> {
        match self {
            TypeTag::Scalar(s) => Some(*s),
            _ => None,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Scalar(s) => write!(f, "{s}"),
            TypeTag::Array(s) => write!(f, "{s}[]"),
            TypeTag::Map(k, v) => write!(f, "mapping({k} => {v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: ScalarType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub payable: bool,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDef {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub functions: Vec<FunctionDef>,
}

impl ContractDef {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }
}

pub type Block = Vec<Stmt>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Mod => "%=",
        }
    }

    pub fn binop(self) -> Option<BinOp> {
        match self {
            AssignOp::Set => None,
            AssignOp::Add => Some(BinOp::Add),
            AssignOp::Sub => Some(BinOp::Sub),
            AssignOp::Mul => Some(BinOp::Mul),
            AssignOp::Div => Some(BinOp::Div),
            AssignOp::Mod => Some(BinOp::Mod),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Local {
        name: String,
        ty: ScalarType,
        init: Expr,
    },
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
    Require(Expr),
    Throw,
    If {
        cond: Expr,
        then_branch: Block,
        else_branch: Option<Block>,
    },
    /// `for (uint256 var = start; var < bound; var++)`, or `<=` when `inclusive`.
    For {
        var: String,
        start: Expr,
        bound: Expr,
        inclusive: bool,
        body: Block,
    },
    Send {
        to: Expr,
        amount: Expr,
    },
    Push {
        array: Expr,
        value: Expr,
    },
    Return(Option<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
        }
    }
}

/// Source position of an identifier, kept only until name resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Uint(U256),
    Bool(bool),
    /// A 40-hex-digit literal.
    Addr(Address),
    /// Unresolved identifier, as produced by the parser.
    Name(String, Pos),
    Field(String),
    Local(String),
    Index(Box<Expr>, Box<Expr>),
    Length(Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    MsgSender,
    MsgValue,
    Now,
    BlockNumber,
    BalanceThis,
    OracleQuery(Vec<Expr>),
}

impl Expr {
    /// Name of the field at the root of an access path such as `a[x][y]`.
    pub fn root_field(&self) -> Option<&str> {
        match self {
            Expr::Field(name) => Some(name),
            Expr::Index(base, _) | Expr::Length(base) => base.root_field(),
            _ => None,
        }
    }
}
