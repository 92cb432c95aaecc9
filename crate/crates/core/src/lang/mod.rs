//! The `.fsol` contract language: lexer, parser, resolver and printer.

pub mod ast;
mod constants;
mod lexer;
mod parser;
mod printer;
mod resolve;

use thiserror::Error;

pub use ast::*;
pub use constants::{harvest_constants, Constants};
pub use printer::print_contract;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        pos: Pos,
        found: String,
        expected: Vec<String>,
    },

    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: &'static str, name: String },

    #[error("{pos}: unknown identifier `{name}` in function `{function}`")]
    UnknownIdentifier {
        name: String,
        pos: Pos,
        function: String,
    },

    #[error("type error in function `{function}`: {message}")]
    Type { function: String, message: String },

    #[error("{0}")]
    Invalid(String),
}

/// Parses and resolves a contract.
pub fn parse(src: &str) -> Result<ContractDef, ParseError> {
    resolve::resolve(parser::parse_unresolved(src)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub params: Vec<ScalarType>,
    pub payable: bool,
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let params: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        write!(f, "{}({})", self.name, params.join(","))?;
        if self.payable {
            write!(f, " payable")?;
        }
        Ok(())
    }
}

/// Function signatures in declaration order.
pub fn list_functions(c: &ContractDef) -> Vec<Signature> {
    c.functions
        .iter()
        .map(|f| Signature {
            name: f.name.clone(),
            params: f.params.iter().map(|p| p.ty).collect(),
            payable: f.payable,
        })
        .collect()
}
