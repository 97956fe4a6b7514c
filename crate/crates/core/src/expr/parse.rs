//! Recursive-descent parser for the family grammar:
//!
//! ```text
//! family := "blocks" width ("," width)* ";" expr
//! expr   := term ("|" term)*
//! term   := factor ("&" factor)*
//! factor := "!" factor | "(" expr ")" | "0" | "1" | "b" INT "_" INT
//! ```

use super::{Expr, Family, VarRef};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Blocks,
    B,
    Int(u64),
    Underscore,
    Comma,
    Semi,
    Bar,
    Amp,
    Bang,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Blocks => "`blocks`".into(),
        Tok::B => "`b`".into(),
        Tok::Int(n) => format!("integer {n}"),
        Tok::Underscore => "`_`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bang => "`!`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            b'|' => Tok::Bar,
            b'&' => Tok::Amp,
            b'!' => Tok::Bang,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'_' => Tok::Underscore,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse::<u64>().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "integer out of range".into(),
                })?;
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "blocks" => Tok::Blocks,
                    "b" => Tok::B,
                    _ => {
                        return Err(Error::Parse {
                            pos: start,
                            msg: format!("unexpected word `{word}`"),
                        })
                    }
                };
                out.push((tok, start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    widths: Vec<usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<usize> {
        let (t, pos) = self.bump();
        if t == want {
            Ok(pos)
        } else {
            Err(Error::Parse {
                pos,
                msg: format!("expected {}, found {}", describe(&want), describe(&t)),
            })
        }
    }

    fn int(&mut self) -> Result<(u64, usize)> {
        match self.bump() {
            (Tok::Int(n), pos) => Ok((n, pos)),
            (t, pos) => Err(Error::Parse {
                pos,
                msg: format!("expected integer, found {}", describe(&t)),
            }),
        }
    }

    fn header(&mut self) -> Result<()> {
        self.expect(Tok::Blocks)?;
        loop {
            let (w, pos) = self.int()?;
            let w = usize::try_from(w).map_err(|_| Error::Parse {
                pos,
                msg: "width out of range".into(),
            })?;
            self.widths.push(w);
            match self.bump() {
                (Tok::Comma, _) => continue,
                (Tok::Semi, _) => return Ok(()),
                (t, pos) => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("expected `,` or `;`, found {}", describe(&t)),
                    })
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = Expr::or(lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Expr::and(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let (t, pos) = self.bump();
        match t {
            Tok::Bang => Ok(Expr::not(self.factor()?)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Int(0) => Ok(Expr::Const(false)),
            Tok::Int(1) => Ok(Expr::Const(true)),
            Tok::B => {
                let (block, _) = self.int()?;
                self.expect(Tok::Underscore)?;
                let (index, _) = self.int()?;
                let (block, index) = (block as usize, index as usize);
                let v = VarRef::new(block, index);
                if block == 0 || block > self.widths.len() {
                    return Err(Error::Width {
                        pos,
                        var: v.to_string(),
                        block,
                        width: 0,
                    });
                }
                let width = self.widths[block - 1];
                if index == 0 || index > width {
                    return Err(Error::Width {
                        pos,
                        var: v.to_string(),
                        block,
                        width,
                    });
                }
                Ok(Expr::Var(v))
            }
            t => Err(Error::Parse {
                pos,
                msg: format!("expected a factor, found {}", describe(&t)),
            }),
        }
    }
}

/// Parses `blocks w1,…,wn; <expr>` into a [`Family`].
pub fn parse_family(text: &str) -> Result<Family> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        widths: Vec::new(),
    };
    p.header()?;
    let body = p.expr()?;
    if *p.peek() != Tok::End {
        let pos = p.pos();
        return Err(Error::Parse {
            pos,
            msg: format!("trailing input: {}", describe(p.peek())),
        });
    }
    Family::new(p.widths, body)
}
