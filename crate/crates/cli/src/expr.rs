//! Builder expressions such as `product(and, tower(3), pebbles(2))`.

use pp_core::builders::{
    big_modulo, gen_majority, inhom_tower, inhom_tower_cancel, modulo_combined, negate, pebbles, product, small_modulo,
    threshold, tower, weak_convert, BoolOp, Built,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Int(i64),
    List(Vec<i64>),
    Call(Call),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Call {
    pub name: String,
    pub args: Vec<Arg>,
}

pub const BUILDERS: &[(&str, &str)] = &[
    ("pebbles", "pebbles(t)"),
    ("tower", "tower(t)"),
    ("inhom-tower", "inhom-tower([a1,..], t)"),
    ("inhom-tower-cancel", "inhom-tower-cancel([a1,..], t)"),
    ("gen-majority", "gen-majority([a1,..])"),
    ("threshold", "threshold([a1,..], t)"),
    ("big-modulo", "big-modulo([a1,..], m, t)"),
    ("modulo-combined", "modulo-combined([a1,..], m, t)"),
    ("small-modulo", "small-modulo([a1,..], m, t)"),
    ("weak-convert", "weak-convert(E)"),
    ("negate", "negate(E)"),
    ("product", "product(and|or, E, E)"),
];

pub fn parse(text: &str) -> Result<Call, String> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let c = p.call()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(format!("unexpected `{}` at column {}", &text[p.pos..], p.pos + 1));
    }
    Ok(c)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected `{}` at column {}", c as char, self.pos + 1))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"-_".contains(&self.s[self.pos]))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a name at column {}", start + 1));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).to_ascii_lowercase())
    }

    fn int(&mut self) -> Result<i64, String> {
        self.ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("expected an integer at column {}", start + 1))
    }

    fn call(&mut self) -> Result<Call, String> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            if self.peek() == Some(b')') {
                self.pos += 1;
                return Ok(Call { name, args });
            }
            loop {
                args.push(self.arg()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(format!("expected `,` or `)` at column {}", self.pos + 1)),
                }
            }
        }
        Ok(Call { name, args })
    }

    fn arg(&mut self) -> Result<Arg, String> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut v = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(Arg::List(v));
                }
                loop {
                    v.push(self.int()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        _ => break,
                    }
                }
                self.expect(b']')?;
                Ok(Arg::List(v))
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => Ok(Arg::Int(self.int()?)),
            Some(_) => Ok(Arg::Call(self.call()?)),
            None => Err("unexpected end of expression".into()),
        }
    }
}

fn usage(name: &str) -> String {
    let sig = BUILDERS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s).unwrap_or("?");
    format!("bad arguments for `{name}`; expected {sig}")
}

/// Evaluates a parsed expression. Errors are usage errors except for
/// failures reported by the builders themselves.
pub fn eval(c: &Call) -> Result<Built, EvalError> {
    let bad = || EvalError::Usage(usage(&c.name));
    let a = c.args.as_slice();
    let built = match (c.name.as_str(), a) {
        ("pebbles", [Arg::Int(t)]) => pebbles(*t),
        ("tower", [Arg::Int(t)]) => tower(*t),
        ("inhom-tower", [Arg::List(v), Arg::Int(t)]) => inhom_tower(v, *t),
        ("inhom-tower-cancel", [Arg::List(v), Arg::Int(t)]) => inhom_tower_cancel(v, *t),
        ("gen-majority", [Arg::List(v)]) => gen_majority(v),
        ("threshold", [Arg::List(v), Arg::Int(t)]) => threshold(v, *t),
        ("big-modulo", [Arg::List(v), Arg::Int(m), Arg::Int(t)]) => big_modulo(v, *m, *t),
        ("modulo-combined", [Arg::List(v), Arg::Int(m), Arg::Int(t)]) => modulo_combined(v, *m, *t),
        ("small-modulo", [Arg::List(v), Arg::Int(m), Arg::Int(t)]) => small_modulo(v, *m, *t),
        ("weak-convert", [Arg::Call(e)]) => weak_convert(&eval(e)?),
        ("negate", [Arg::Call(e)]) => negate(&eval(e)?),
        ("product", [Arg::Call(op), Arg::Call(l), Arg::Call(r)]) if op.args.is_empty() => {
            let op = match op.name.as_str() {
                "and" => BoolOp::And,
                "or" => BoolOp::Or,
                _ => return Err(bad()),
            };
            product(&eval(l)?, &eval(r)?, op)
        }
        (n, _) if BUILDERS.iter().any(|(b, _)| *b == n) => return Err(bad()),
        (n, _) => return Err(EvalError::Usage(format!("unknown builder `{n}`"))),
    };
    built.map_err(EvalError::Model)
}

#[derive(Debug)]
pub enum EvalError {
    Usage(String),
    Model(pp_core::ModelError),
}
