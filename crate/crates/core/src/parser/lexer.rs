//! Tokenizer for proof scripts. Comments run from `--` to end of line.

use super::ParseError;
use crate::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Zero,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Equals,
    NotEquals,
    Less,
    LessEq,
    Plus,
    Bang,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    macro_rules! push {
        ($tok:expr, $sp:expr) => {
            out.push(Token {
                tok: $tok,
                span: $sp,
            })
        };
    }
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '-' => {
                // Either a comment `--` or an error (no minus in the language
                // except inside `superpose-…`, handled with idents below).
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            line += 1;
                            col = 1;
                            break;
                        }
                    }
                } else {
                    return Err(ParseError::new(span, "unexpected '-'"));
                }
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, span);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, span);
            }
            '{' => {
                chars.next();
                col += 1;
                push!(Tok::LBrace, span);
            }
            '}' => {
                chars.next();
                col += 1;
                push!(Tok::RBrace, span);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, span);
            }
            ':' => {
                chars.next();
                col += 1;
                push!(Tok::Colon, span);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, span);
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Equals, span);
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::NotEquals, span);
                } else {
                    push!(Tok::Bang, span);
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::LessEq, span);
                } else {
                    push!(Tok::Less, span);
                }
            }
            '0' => {
                chars.next();
                col += 1;
                push!(Tok::Zero, span);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'' {
                        w.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                // `superpose-sas` / `superpose-sss` carry a hyphen.
                if w == "superpose" && chars.peek() == Some(&'-') {
                    w.push('-');
                    chars.next();
                    col += 1;
                    while let Some(&c) = chars.peek() {
                        if c.is_ascii_alphanumeric() {
                            w.push(c);
                            chars.next();
                            col += 1;
                        } else {
                            break;
                        }
                    }
                }
                push!(Tok::Word(w), span);
            }
            other => {
                return Err(ParseError::new(
                    span,
                    format!("unexpected character '{other}'"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    Ok(out)
}
