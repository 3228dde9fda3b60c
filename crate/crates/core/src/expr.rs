//! Closed-form expressions of `(t, x, y)` for boundary and initial data.
//!
//! Grammar: numbers, the variables `t x y`, the constant `pi`, binary
//! `+ - * / ^` (`^` binds tightest and is right-associative), unary minus,
//! parentheses and the functions `sin cos exp sqrt log sinh cosh`.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Log,
    Sinh,
    Cosh,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "sqrt" => Self::Sqrt,
            "log" => Self::Log,
            "sinh" => Self::Sinh,
            "cosh" => Self::Cosh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
            Self::Sqrt => "sqrt",
            Self::Log => "log",
            Self::Sinh => "sinh",
            Self::Cosh => "cosh",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Sin => v.sin(),
            Self::Cos => v.cos(),
            Self::Exp => v.exp(),
            Self::Sqrt => v.sqrt(),
            Self::Log => v.ln(),
            Self::Sinh => v.sinh(),
            Self::Cosh => v.cosh(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

use Expr::*;

fn num(v: f64) -> Expr {
    Num(v)
}

// Constructors with light constant folding, so derivatives stay readable.
fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) => Num(x + y),
        (Num(z), _) if *z == 0.0 => b,
        (_, Num(z)) if *z == 0.0 => a,
        _ => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) => Num(x - y),
        (_, Num(z)) if *z == 0.0 => a,
        (Num(z), _) if *z == 0.0 => neg(b),
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) => Num(x * y),
        (Num(z), _) | (_, Num(z)) if *z == 0.0 => Num(0.0),
        (Num(o), _) if *o == 1.0 => b,
        (_, Num(o)) if *o == 1.0 => a,
        _ => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(z), _) if *z == 0.0 => Num(0.0),
        (_, Num(o)) if *o == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Num(x) => Num(-x),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, Num(o)) if *o == 1.0 => a,
        (_, Num(z)) if *z == 0.0 => Num(1.0),
        _ => Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Call(f, Box::new(a))
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Num(v)
    }

    pub fn eval(&self, t: f64, x: f64, y: f64) -> f64 {
        match self {
            Num(v) => *v,
            Var(Var::T) => t,
            Var(Var::X) => x,
            Var(Var::Y) => y,
            Neg(a) => -a.eval(t, x, y),
            Add(a, b) => a.eval(t, x, y) + b.eval(t, x, y),
            Sub(a, b) => a.eval(t, x, y) - b.eval(t, x, y),
            Mul(a, b) => a.eval(t, x, y) * b.eval(t, x, y),
            Div(a, b) => a.eval(t, x, y) / b.eval(t, x, y),
            Pow(a, b) => {
                let base = a.eval(t, x, y);
                match **b {
                    Num(e) if e == e.trunc() && e.abs() < 64.0 => base.powi(e as i32),
                    _ => base.powf(b.eval(t, x, y)),
                }
            }
            Call(f, a) => f.apply(a.eval(t, x, y)),
        }
    }

    pub fn eval_at(&self, t: f64, p: &[f64; 2]) -> f64 {
        self.eval(t, p[0], p[1])
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Num(_) => false,
            Var(w) => *w == v,
            Neg(a) | Call(_, a) => a.depends_on(v),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.depends_on(v) || b.depends_on(v)
            }
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        match self {
            Num(_) => num(0.0),
            Var(w) => num(if *w == v { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.diff(v)),
            Add(a, b) => add(a.diff(v), b.diff(v)),
            Sub(a, b) => sub(a.diff(v), b.diff(v)),
            Mul(a, b) => add(mul(a.diff(v), (**b).clone()), mul((**a).clone(), b.diff(v))),
            Div(a, b) => div(
                sub(mul(a.diff(v), (**b).clone()), mul((**a).clone(), b.diff(v))),
                pow((**b).clone(), num(2.0)),
            ),
            Pow(a, b) => {
                if !b.depends_on(v) {
                    // d(a^b) = b a^(b-1) a'
                    mul(
                        mul(
                            (**b).clone(),
                            pow((**a).clone(), sub((**b).clone(), num(1.0))),
                        ),
                        a.diff(v),
                    )
                } else {
                    // a^b (b' ln a + b a' / a)
                    mul(
                        self.clone(),
                        add(
                            mul(b.diff(v), call(Func::Log, (**a).clone())),
                            div(mul((**b).clone(), a.diff(v)), (**a).clone()),
                        ),
                    )
                }
            }
            Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Sqrt => div(num(0.5), call(Func::Sqrt, inner)),
                    Func::Log => div(num(1.0), inner),
                    Func::Sinh => call(Func::Cosh, inner),
                    Func::Cosh => call(Func::Sinh, inner),
                };
                mul(outer, a.diff(v))
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(v) => write!(f, "{v}"),
            Var(Var::T) => f.write_str("t"),
            Var(Var::X) => f.write_str("x"),
            Var(Var::Y) => f.write_str("y"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, b) => write!(f, "({a} ^ {b})"),
            Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse()
                .map_err(|_| format!("bad number `{text}` at column {}", start + 1))?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}` at column {}", i + 1));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.0 + 1).unwrap_or(0)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat('-') {
            return Ok(Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, String> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        let col = self.column();
        match self.tokens.get(self.pos).map(|t| t.1.clone()) {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Num(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" => Ok(Var(Var::T)),
                    "x" => Ok(Var(Var::X)),
                    "y" => Ok(Var(Var::Y)),
                    "pi" => Ok(Num(std::f64::consts::PI)),
                    other => {
                        let f = Func::from_name(other).ok_or_else(|| {
                            format!("unknown identifier `{other}` at column {col}")
                        })?;
                        if !self.eat('(') {
                            return Err(format!("expected `(` after `{other}`"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(format!("missing `)` for `{other}(`"));
                        }
                        Ok(Call(f, Box::new(arg)))
                    }
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(format!("missing `)` opened at column {col}"));
                }
                Ok(e)
            }
            Some(Token::Op(c)) => Err(format!("unexpected `{c}` at column {col}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, String> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input at column {}", p.column()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str) -> f64 {
        parse(s).unwrap().eval(0.25, 0.5, -1.0)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3"), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2"), 512.0);
        assert_eq!(ev("-2 ^ 2"), -4.0);
        assert_eq!(ev("8 / 4 / 2"), 1.0);
        assert_eq!(ev("(1 + 2) * 3"), 9.0);
        assert_eq!(ev("x / (1 - t)"), 0.5 / 0.75);
        assert_eq!(ev("1e-3 * 2"), 2e-3);
        assert_eq!(ev("2.5E2"), 250.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("sin(pi * x)") - 1.0).abs() < 1e-15);
        assert!((ev("cosh(x)") - 0.5f64.cosh()).abs() < 1e-15);
        assert_eq!(ev("exp(0)"), 1.0);
        assert_eq!(ev("y"), -1.0);
    }

    #[test]
    fn malformed_input() {
        for bad in ["", "1 +", "(x", "foo(x)", "sin x", "2 $ 3", "x y"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn derivative_examples() {
        let e = parse("x + 0.05 * sin(pi * x) * sin(pi * y)").unwrap();
        let dx = e.diff(Var::X);
        let (x, y) = (0.3, 0.7);
        let pi = std::f64::consts::PI;
        let expected = 1.0 + 0.05 * pi * (pi * x).cos() * (pi * y).sin();
        assert!((dx.eval(0.0, x, y) - expected).abs() < 1e-14);
        assert_eq!(parse("t * x").unwrap().diff(Var::Y), Expr::Num(0.0));
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(
            a in -2.0f64..2.0, b in -2.0f64..2.0, x in 0.1f64..1.0, y in 0.1f64..1.0,
        ) {
            let src = format!("{a} * x^3 * exp(y) / (1 + x^2) + sin({b} * x * y) - sqrt(x + y) + x^y");
            let e = parse(&src).unwrap();
            let h = 1e-6;
            for v in [Var::X, Var::Y] {
                let d = e.diff(v).eval(0.0, x, y);
                let (xp, yp, xm, ym) = match v {
                    Var::X => (x + h, y, x - h, y),
                    _ => (x, y + h, x, y - h),
                };
                let fd = (e.eval(0.0, xp, yp) - e.eval(0.0, xm, ym)) / (2.0 * h);
                prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()), "{} vs {}", d, fd);
            }
        }

        #[test]
        fn display_round_trips(a in -5.0f64..5.0, b in 0.5f64..3.0) {
            let e = parse(&format!("{a} * x - y / {b} + cos(t) ^ 2")).unwrap();
            let again = parse(&e.to_string()).unwrap();
            prop_assert_eq!(e.eval(0.3, 0.2, 0.1), again.eval(0.3, 0.2, 0.1));
        }
    }
}
