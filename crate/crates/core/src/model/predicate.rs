//! Threshold / modulo predicates and their Boolean combinations.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::ModelError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredicateSpec {
    /// `Σ coeffs[i]·x[i] >= t`
    Threshold {
        coeffs: Vec<i64>,
        t: i64,
    },
    /// `(Σ coeffs[i]·x[i]) mod m >= t`
    Modulo {
        coeffs: Vec<i64>,
        m: i64,
        t: i64,
    },
    Not(Box<PredicateSpec>),
    And(Box<PredicateSpec>, Box<PredicateSpec>),
    Or(Box<PredicateSpec>, Box<PredicateSpec>),
}

fn linear(coeffs: &[i64], x: &[u64]) -> i128 {
    coeffs.iter().zip(x).map(|(&a, &v)| i128::from(a) * i128::from(v)).sum()
}

impl PredicateSpec {
    pub fn threshold(coeffs: Vec<i64>, t: i64) -> Self {
        PredicateSpec::Threshold { coeffs, t }
    }

    pub fn modulo(coeffs: Vec<i64>, m: i64, t: i64) -> Self {
        PredicateSpec::Modulo { coeffs, m, t }
    }

    pub fn negated(self) -> Self {
        PredicateSpec::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        PredicateSpec::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        PredicateSpec::Or(Box::new(self), Box::new(other))
    }

    /// Number of input variables, taken as the longest coefficient vector.
    pub fn arity(&self) -> usize {
        match self {
            PredicateSpec::Threshold { coeffs, .. } | PredicateSpec::Modulo { coeffs, .. } => coeffs.len(),
            PredicateSpec::Not(a) => a.arity(),
            PredicateSpec::And(a, b) | PredicateSpec::Or(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            PredicateSpec::Modulo { m, .. } if *m <= 0 => {
                Err(ModelError::Predicate(format!("modulus must be positive, got {m}")))
            }
            PredicateSpec::Not(a) => a.validate(),
            PredicateSpec::And(a, b) | PredicateSpec::Or(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    /// Evaluates on an input vector with exactly `arity` entries; missing
    /// trailing coefficients of a sub-formula count as zero.
    pub fn eval(&self, x: &[u64]) -> Result<bool, ModelError> {
        let n = self.arity();
        if x.len() != n {
            return Err(ModelError::Dimension { expected: n, got: x.len() });
        }
        self.validate()?;
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &[u64]) -> bool {
        match self {
            PredicateSpec::Threshold { coeffs, t } => linear(coeffs, x) >= i128::from(*t),
            PredicateSpec::Modulo { coeffs, m, t } => linear(coeffs, x).rem_euclid(i128::from(*m)) >= i128::from(*t),
            PredicateSpec::Not(a) => !a.eval_unchecked(x),
            PredicateSpec::And(a, b) => a.eval_unchecked(x) && b.eval_unchecked(x),
            PredicateSpec::Or(a, b) => a.eval_unchecked(x) || b.eval_unchecked(x),
        }
    }

    /// Writes the formula as an s-expression over the given variable names.
    pub fn to_sexpr(&self, vars: &[String]) -> String {
        fn lin(coeffs: &[i64], vars: &[String]) -> String {
            let terms: Vec<String> = coeffs
                .iter()
                .zip(vars)
                .filter(|(&a, _)| a != 0)
                .map(|(&a, v)| if a == 1 { v.clone() } else { format!("(* {a} {v})") })
                .collect();
            match terms.len() {
                0 => "0".to_string(),
                1 => terms[0].clone(),
                _ => format!("(+ {})", terms.join(" ")),
            }
        }
        match self {
            PredicateSpec::Threshold { coeffs, t } => format!("(>= {} {})", lin(coeffs, vars), t),
            PredicateSpec::Modulo { coeffs, m, t } => {
                format!("(>= (mod {} {}) {})", lin(coeffs, vars), m, t)
            }
            PredicateSpec::Not(a) => format!("(not {})", a.to_sexpr(vars)),
            PredicateSpec::And(a, b) => format!("(and {} {})", a.to_sexpr(vars), b.to_sexpr(vars)),
            PredicateSpec::Or(a, b) => format!("(or {} {})", a.to_sexpr(vars), b.to_sexpr(vars)),
        }
    }

    fn pad(&mut self, n: usize) {
        match self {
            PredicateSpec::Threshold { coeffs, .. } | PredicateSpec::Modulo { coeffs, .. } => coeffs.resize(n, 0),
            PredicateSpec::Not(a) => a.pad(n),
            PredicateSpec::And(a, b) | PredicateSpec::Or(a, b) => {
                a.pad(n);
                b.pad(n);
            }
        }
    }
}

/// A formula together with the names of its input variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub vars: Vec<String>,
    pub formula: PredicateSpec,
}

impl Predicate {
    pub fn new(vars: Vec<String>, mut formula: PredicateSpec) -> Result<Self, ModelError> {
        if formula.arity() > vars.len() {
            return Err(ModelError::Dimension { expected: vars.len(), got: formula.arity() });
        }
        formula.pad(vars.len());
        formula.validate()?;
        Ok(Predicate { vars, formula })
    }

    pub fn eval(&self, x: &[u64]) -> Result<bool, ModelError> {
        self.formula.eval(x)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn to_sexpr(&self) -> String {
        self.formula.to_sexpr(&self.vars)
    }

    /// Parses an s-expression. Variables are numbered in order of first
    /// appearance unless `vars` fixes the order (unlisted names are appended).
    pub fn parse(text: &str, vars: Option<&[String]>) -> Result<Self, ModelError> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let sx = read(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(ModelError::Predicate(format!("trailing input after position {pos}")));
        }
        let mut names: Vec<String> = vars.map(<[String]>::to_vec).unwrap_or_default();
        let formula = formula_of(&sx, &mut names)?;
        Predicate::new(names, formula)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

#[derive(Debug, Clone)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn tokenize(text: &str) -> Result<Vec<String>, ModelError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    if out.is_empty() {
        return Err(ModelError::Predicate("empty input".into()));
    }
    Ok(out)
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sx, ModelError> {
    let Some(tok) = tokens.get(*pos) else {
        return Err(ModelError::Predicate("unexpected end of input".into()));
    };
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(ModelError::Predicate("unbalanced `(`".into())),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                }
            }
        }
        ")" => Err(ModelError::Predicate(format!("unexpected `)` at token {}", *pos - 1))),
        a => Ok(Sx::Atom(a.to_string())),
    }
}

/// Linear form: coefficients by variable index plus a constant.
#[derive(Clone, Debug, Default)]
struct Lin {
    coeffs: Vec<i64>,
    constant: i64,
}

impl Lin {
    fn scale(mut self, k: i64) -> Result<Lin, ModelError> {
        let ovf = || ModelError::Predicate("coefficient overflow".into());
        for c in &mut self.coeffs {
            *c = c.checked_mul(k).ok_or_else(ovf)?;
        }
        self.constant = self.constant.checked_mul(k).ok_or_else(ovf)?;
        Ok(self)
    }

    fn add(mut self, other: &Lin) -> Result<Lin, ModelError> {
        let ovf = || ModelError::Predicate("coefficient overflow".into());
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            self.coeffs[i] = self.coeffs[i].checked_add(*c).ok_or_else(ovf)?;
        }
        self.constant = self.constant.checked_add(other.constant).ok_or_else(ovf)?;
        Ok(self)
    }

    fn as_constant(&self) -> Option<i64> {
        self.coeffs.iter().all(|&c| c == 0).then_some(self.constant)
    }
}

fn var_slot(name: &str, names: &mut Vec<String>) -> Result<usize, ModelError> {
    let ok = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !ok {
        return Err(ModelError::Predicate(format!("bad variable name `{name}`")));
    }
    if let Some(i) = names.iter().position(|v| v == name) {
        return Ok(i);
    }
    names.push(name.to_string());
    Ok(names.len() - 1)
}

fn lin_of(sx: &Sx, names: &mut Vec<String>) -> Result<Lin, ModelError> {
    match sx {
        Sx::Atom(a) => {
            if let Ok(k) = a.parse::<i64>() {
                return Ok(Lin { coeffs: Vec::new(), constant: k });
            }
            let i = var_slot(a, names)?;
            let mut coeffs = vec![0; i + 1];
            coeffs[i] = 1;
            Ok(Lin { coeffs, constant: 0 })
        }
        Sx::List(items) => {
            let (head, args) = match items.split_first() {
                Some((Sx::Atom(h), rest)) => (h.as_str(), rest),
                _ => return Err(ModelError::Predicate("expected an operator".into())),
            };
            match head {
                "+" => args.iter().try_fold(Lin::default(), |acc, a| acc.add(&lin_of(a, names)?)),
                "-" if args.len() == 1 => lin_of(&args[0], names)?.scale(-1),
                "-" if !args.is_empty() => {
                    let first = lin_of(&args[0], names)?;
                    args[1..].iter().try_fold(first, |acc, a| acc.add(&lin_of(a, names)?.scale(-1)?))
                }
                "*" => {
                    let mut acc = Lin { coeffs: Vec::new(), constant: 1 };
                    for a in args {
                        let l = lin_of(a, names)?;
                        acc = match (acc.as_constant(), l.as_constant()) {
                            (Some(k), _) => l.scale(k)?,
                            (_, Some(k)) => acc.scale(k)?,
                            _ => return Err(ModelError::Predicate("product of two variables is not linear".into())),
                        };
                    }
                    Ok(acc)
                }
                h => Err(ModelError::Predicate(format!("unknown term operator `{h}`"))),
            }
        }
    }
}

fn modulo_of(sx: &Sx, names: &mut Vec<String>) -> Result<Option<(Lin, i64)>, ModelError> {
    if let Sx::List(items) = sx {
        if let [Sx::Atom(h), body, m] = items.as_slice() {
            if h == "mod" {
                let lin = lin_of(body, names)?;
                let m = lin_of(m, names)?
                    .as_constant()
                    .filter(|&m| m > 0)
                    .ok_or_else(|| ModelError::Predicate("modulus must be a positive constant".into()))?;
                return Ok(Some((lin, m)));
            }
        }
    }
    Ok(None)
}

fn formula_of(sx: &Sx, names: &mut Vec<String>) -> Result<PredicateSpec, ModelError> {
    let Sx::List(items) = sx else {
        return match sx {
            Sx::Atom(a) if a == "true" => Ok(PredicateSpec::threshold(vec![], 0)),
            Sx::Atom(a) if a == "false" => Ok(PredicateSpec::threshold(vec![], 1)),
            _ => Err(ModelError::Predicate("expected a formula".into())),
        };
    };
    let (head, args) = match items.split_first() {
        Some((Sx::Atom(h), rest)) => (h.as_str(), rest),
        _ => return Err(ModelError::Predicate("expected an operator".into())),
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(ModelError::Predicate(format!("`{head}` takes {n} arguments, got {}", args.len())))
        }
    };
    match head {
        "not" => {
            arity(1)?;
            Ok(formula_of(&args[0], names)?.negated())
        }
        "and" | "or" => {
            if args.len() < 2 {
                return Err(ModelError::Predicate(format!("`{head}` needs two operands")));
            }
            let mut acc = formula_of(&args[0], names)?;
            for a in &args[1..] {
                let f = formula_of(a, names)?;
                acc = if head == "and" { acc.and(f) } else { acc.or(f) };
            }
            Ok(acc)
        }
        ">=" | ">" | "<=" | "<" | "=" => {
            arity(2)?;
            if let Some((lin, m)) = modulo_of(&args[0], names)? {
                let c = lin_of(&args[1], names)?
                    .as_constant()
                    .ok_or_else(|| ModelError::Predicate("modulo compared to non-constant".into()))?;
                let base = |k: i64| modulo_with_offset(&lin.coeffs, lin.constant, m, k);
                return Ok(match head {
                    ">=" => base(c),
                    ">" => base(c + 1),
                    "<" => base(c).negated(),
                    "<=" => base(c + 1).negated(),
                    _ => base(c).and(base(c + 1).negated()),
                });
            }
            let l = lin_of(&args[0], names)?;
            let r = lin_of(&args[1], names)?;
            // l - r >= 0  <=>  coeffs >= -constant
            let d = l.add(&r.scale(-1)?)?;
            let ge = |k: i64| PredicateSpec::threshold(d.coeffs.clone(), k - d.constant);
            Ok(match head {
                ">=" => ge(0),
                ">" => ge(1),
                "<" => ge(0).negated(),
                "<=" => ge(1).negated(),
                _ => ge(0).and(ge(1).negated()),
            })
        }
        h => Err(ModelError::Predicate(format!("unknown formula operator `{h}`"))),
    }
}

fn modulo_with_offset(coeffs: &[i64], offset: i64, m: i64, k: i64) -> PredicateSpec {
    if offset.rem_euclid(m) == 0 {
        return PredicateSpec::modulo(coeffs.to_vec(), m, k);
    }
    // (L + c) mod m >= k, as a disjunction over the residues of L
    let c = offset.rem_euclid(m);
    let mut out: Option<PredicateSpec> = None;
    for r in 0..m {
        if (r + c) % m >= k {
            let eq = PredicateSpec::modulo(coeffs.to_vec(), m, r)
                .and(PredicateSpec::modulo(coeffs.to_vec(), m, r + 1).negated());
            out = Some(match out {
                None => eq,
                Some(o) => o.or(eq),
            });
        }
    }
    out.unwrap_or_else(|| PredicateSpec::threshold(vec![], 1))
}
