use primitive_types::U256;

use super::ast::Pos;
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Numeric literal; `hex_digits` is set for `0x` literals.
    Number { value: U256, hex_digits: Option<usize> },
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number { .. } => "number".to_string(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
}

// Longest first so that `<=` wins over `<`.
const PUNCTS: &[&str] = &[
    "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "++", "--", "{", "}",
    "(", ")", "[", "]", ";", ",", ".", "=", "+", "-", "*", "/", "%", "<", ">", "!",
];

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start = Pos { line, column: col };
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::Syntax {
                        pos: start,
                        found: "end of input".into(),
                        expected: vec!["`*/`".into()],
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let pos = Pos { line, column: col };
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let is_hex = c == '0' && matches!(chars.get(i + 1), Some('x') | Some('X'));
            if is_hex {
                bump!();
                bump!();
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_hexdigit() {
                    bump!();
                }
                let digits: String = chars[digits_start..i].iter().collect();
                if digits.is_empty() || digits.len() > 64 {
                    return Err(ParseError::Syntax {
                        pos,
                        found: chars[start..i].iter().collect(),
                        expected: vec!["hex literal of 1 to 64 digits".into()],
                    });
                }
                let value = U256::from_str_radix(&digits, 16).map_err(|_| ParseError::Syntax {
                    pos,
                    found: digits.clone(),
                    expected: vec!["hex literal".into()],
                })?;
                out.push(Spanned {
                    tok: Tok::Number {
                        value,
                        hex_digits: Some(digits.len()),
                    },
                    pos,
                });
            } else {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
                let digits: String = chars[start..i].iter().collect();
                let value = U256::from_dec_str(&digits).map_err(|_| ParseError::Syntax {
                    pos,
                    found: digits.clone(),
                    expected: vec!["integer below 2^256".into()],
                })?;
                out.push(Spanned {
                    tok: Tok::Number {
                        value,
                        hex_digits: None,
                    },
                    pos,
                });
            }
            if i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                return Err(ParseError::Syntax {
                    pos: Pos { line, column: col },
                    found: chars[i].to_string(),
                    expected: vec!["delimiter after number".into()],
                });
            }
            continue;
        }

        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                for _ in 0..p.len() {
                    bump!();
                }
                out.push(Spanned {
                    tok: Tok::Punct(p),
                    pos,
                });
            }
            None => {
                return Err(ParseError::Syntax {
                    pos,
                    found: c.to_string(),
                    expected: vec!["token".into()],
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_punct_wins() {
        let toks = tokenize("a <= b => c").unwrap();
        let puncts: Vec<_> = toks
            .iter()
            .filter_map(|t| match t.tok {
                Tok::Punct(p) => Some(p),
                _ => None,
            })
            .collect();
        assert_eq!(puncts, vec!["<=", "=>"]);
    }

    #[test]
    fn hex_literal_records_digit_count() {
        let toks = tokenize("0x00ff").unwrap();
        assert_eq!(
            toks[0].tok,
            Tok::Number {
                value: U256::from(255),
                hex_digits: Some(4)
            }
        );
    }

    #[test]
    fn comments_are_skipped_and_lines_counted() {
        let toks = tokenize("// one\n/* two\n */ x").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("x".into()));
        assert_eq!(toks[0].pos, Pos { line: 3, column: 5 });
    }

    #[test]
    fn unterminated_block_comment() {
        assert!(tokenize("/* open").is_err());
    }
}
