//! Formal p-valued combinations of operator words.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::expansion::{in_box, CoeffSource, SiegelExpansion, Weight};
use super::ops::{apply_primitive, gather, s_scalar, Applied, Borrowed, Prim, DEFAULT_PRECISION_CAP};
use crate::error::{Error, Result};
use crate::padic::{PValuedScalar, ScalarCtx};

/// Letters applied right to left: [U, Z] is U after Z.
pub type Word = Vec<Prim>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorExpr {
    ctx: ScalarCtx,
    weight: Weight,
    terms: Vec<(PValuedScalar, Word)>,
}

impl OperatorExpr {
    pub fn zero(ctx: ScalarCtx, weight: Weight) -> Self {
        OperatorExpr { ctx, weight, terms: Vec::new() }
    }

    pub fn scalar(ctx: ScalarCtx, weight: Weight, c: PValuedScalar) -> Self {
        OperatorExpr { ctx, weight, terms: vec![(c, Vec::new())] }
    }

    pub fn word(ctx: ScalarCtx, weight: Weight, w: Word) -> Self {
        OperatorExpr { ctx, weight, terms: vec![(PValuedScalar::one(ctx), w)] }
    }

    pub fn prim(ctx: ScalarCtx, weight: Weight, op: Prim) -> Self {
        Self::word(ctx, weight, vec![op])
    }

    pub fn from_terms(ctx: ScalarCtx, weight: Weight, terms: Vec<(PValuedScalar, Word)>) -> Self {
        OperatorExpr { ctx, weight, terms }
    }

    pub fn ctx(&self) -> ScalarCtx {
        self.ctx
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn terms(&self) -> &[(PValuedScalar, Word)] {
        &self.terms
    }

    pub fn add(&self, o: &OperatorExpr) -> OperatorExpr {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        OperatorExpr { terms, ..self.clone() }
    }

    pub fn neg(&self) -> OperatorExpr {
        self.scale(-PValuedScalar::one(self.ctx))
    }

    pub fn sub(&self, o: &OperatorExpr) -> OperatorExpr {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: PValuedScalar) -> OperatorExpr {
        OperatorExpr { terms: self.terms.iter().map(|(x, w)| (*x * c, w.clone())).collect(), ..self.clone() }
    }

    /// self after o.
    pub fn compose(&self, o: &OperatorExpr) -> OperatorExpr {
        let mut terms = Vec::new();
        for (a, wa) in &self.terms {
            for (b, wb) in &o.terms {
                let mut w = wa.clone();
                w.extend(wb.iter().copied());
                terms.push((*a * *b, w));
            }
        }
        OperatorExpr { terms, ..self.clone() }
    }

    /// Reinterpret the coefficients at another precision of the same prime.
    pub fn with_ctx(&self, ctx: ScalarCtx) -> OperatorExpr {
        OperatorExpr { ctx, weight: self.weight, terms: self.terms.iter().map(|(c, w)| (c.with_ctx(ctx), w.clone())).collect() }
    }

    /// Smallest coefficient valuation, None if there are no nonzero terms.
    pub fn min_valuation(&self) -> Option<i32> {
        self.terms.iter().filter_map(|(c, _)| c.valuation().ok()).min()
    }
}

fn fmt_coeff(c: &PValuedScalar) -> (bool, String) {
    let ctx = c.ctx();
    let v = c.valuation().expect("nonzero coefficient");
    let u = c.unit().unwrap();
    let q = ctx.p().pow((ctx.m() as i32 - v) as u32);
    let (neg, mag) = if u > q / 2 { (true, q - u) } else { (false, u) };
    let pp = match v {
        0 => String::new(),
        1 => "p".to_string(),
        _ => format!("p^{v}"),
    };
    let body = match (mag, pp.is_empty()) {
        (1, true) => String::new(),
        (1, false) => pp,
        (x, true) => x.to_string(),
        (x, false) => format!("{x}*{pp}"),
    };
    (neg, body)
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, w) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let (neg, body) = fmt_coeff(c);
            let word = if w.is_empty() { "Id".to_string() } else { w.iter().map(Prim::to_string).collect::<Vec<_>>().join("*") };
            let sign = match (first, neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            if body.is_empty() {
                write!(f, "{sign}{word}")?;
            } else {
                write!(f, "{sign}{body}*{word}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedOp {
    T,
    T2,
    Q2,
}

impl FromStr for NamedOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(NamedOp::T),
            "T2" => Ok(NamedOp::T2),
            "Q2" => Ok(NamedOp::Q2),
            _ => Err(Error::Parse(format!("unknown named operator {s:?}"))),
        }
    }
}

/// T = U + p^{k-2} Z + p^{k+j-3} V;
/// T2 = p^{k+j-6} U2 + p^{k-3} Z2 + p^{2k+j-6} V2;
/// Q2 = (p T2 + (p + p^3) S) p^{2-k}. Unsimplified.
pub fn build_expr(name: NamedOp, weight: Weight, ctx: ScalarCtx) -> OperatorExpr {
    let (j, k) = (weight.j as i32, weight.k as i32);
    let pp = |e: i32| PValuedScalar::p_power(ctx, e);
    let term = |e: i32, op: Prim| (pp(e), vec![op]);
    match name {
        NamedOp::T => OperatorExpr::from_terms(ctx, weight, vec![term(0, Prim::U), term(k - 2, Prim::Z), term(k + j - 3, Prim::V)]),
        NamedOp::T2 => OperatorExpr::from_terms(
            ctx,
            weight,
            vec![term(k + j - 6, Prim::U2), term(k - 3, Prim::Z2), term(2 * k + j - 6, Prim::V2)],
        ),
        NamedOp::Q2 => {
            let t2 = build_expr(NamedOp::T2, weight, ctx);
            let s = OperatorExpr::prim(ctx, weight, Prim::S);
            t2.scale(pp(1)).add(&s.scale(pp(1))).add(&s.scale(pp(3))).scale(pp(2 - k))
        }
    }
}

/// Substitute S by p^{j+k-6}, expand U2 = -1 + p X2, drop Id letters, collect
/// like words and drop zero coefficients.
pub fn simplify_expr(e: &OperatorExpr) -> OperatorExpr {
    let ctx = e.ctx;
    let one = PValuedScalar::one(ctx);
    let mut acc: BTreeMap<Word, PValuedScalar> = BTreeMap::new();
    for (c, w) in &e.terms {
        let mut partial: Vec<(PValuedScalar, Word)> = vec![(*c, Vec::new())];
        for letter in w {
            let options: Vec<(PValuedScalar, Option<Prim>)> = match letter {
                Prim::Id => vec![(one, None)],
                Prim::S => vec![(s_scalar(ctx, e.weight), None)],
                Prim::U2 => vec![(-one, None), (PValuedScalar::p_power(ctx, 1), Some(Prim::X2))],
                other => vec![(one, Some(*other))],
            };
            partial = partial
                .into_iter()
                .flat_map(|(pc, pw)| {
                    options.iter().map(move |(oc, ol)| {
                        let mut w = pw.clone();
                        w.extend(ol.iter().copied());
                        (pc * *oc, w)
                    })
                })
                .collect();
        }
        for (pc, pw) in partial {
            let slot = acc.entry(pw).or_insert_with(|| PValuedScalar::zero(ctx));
            *slot = *slot + pc;
        }
    }
    let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c, w)).collect();
    OperatorExpr { ctx, weight: e.weight, terms }
}

/// Simplify, then read the coefficients mod p.
pub fn reduce_mod_p(e: &OperatorExpr) -> Result<OperatorExpr> {
    let s = simplify_expr(e);
    if let Some(v) = s.min_valuation() {
        if v < 0 {
            return Err(Error::NonIntegral(s.to_string()));
        }
    }
    Ok(simplify_expr(&s.with_ctx(e.ctx.with_m(1)?)))
}

/// Same terms after simplification.
pub fn formally_equal(a: &OperatorExpr, b: &OperatorExpr) -> bool {
    simplify_expr(&a.sub(b)).terms.is_empty()
}

fn integral_terms(e: &OperatorExpr) -> Result<Vec<(u64, Word)>> {
    let s = simplify_expr(e);
    s.terms
        .iter()
        .map(|(c, w)| match c.to_residue() {
            Ok(r) => Ok((r, w.clone())),
            Err(_) => Err(Error::NonIntegral(format!("{c} in {s}"))),
        })
        .collect()
}

fn check_source(e: &OperatorExpr, ctx: ScalarCtx, weight: Weight) -> Result<()> {
    if e.ctx != ctx {
        return Err(Error::ContextMismatch(format!("expression mod {} vs expansion mod {}", e.ctx.modulus(), ctx.modulus())));
    }
    if e.weight != weight {
        return Err(Error::ContextMismatch(format!("expression in weight {} vs expansion in weight {}", e.weight, weight)));
    }
    Ok(())
}

/// Apply each simplified word by successive stored applications and sum on
/// the smallest resulting box.
pub fn evaluate_expr(e: &OperatorExpr, f: &SiegelExpansion) -> Result<SiegelExpansion> {
    check_source(e, f.ctx(), f.weight())?;
    let terms = integral_terms(e)?;
    let mut images = Vec::with_capacity(terms.len());
    for (c, w) in &terms {
        let mut cur = f.clone();
        for letter in w.iter().rev() {
            cur = apply_primitive(*letter, &cur)?;
        }
        images.push((*c, cur));
    }
    let b = images.iter().map(|(_, g)| g.precision()).min().unwrap_or(f.precision());
    let mut out = SiegelExpansion::new(f.ctx(), f.weight(), b)?;
    for (c, g) in &images {
        for (q, v) in g.iter().filter(|(q, _)| in_box(q, b)) {
            out.accumulate(*q, &v.scale(*c))?;
        }
    }
    Ok(out)
}

/// The same evaluation on an arbitrary source, computing only the keys of
/// the output box.
pub fn evaluate_lazy(e: &OperatorExpr, src: &dyn CoeffSource) -> Result<SiegelExpansion> {
    check_source(e, src.ctx(), src.weight())?;
    let terms = integral_terms(e)?;
    let mut chains: Vec<(u64, Box<dyn CoeffSource + '_>)> = Vec::new();
    for (c, w) in &terms {
        let mut cur: Box<dyn CoeffSource + '_> = Box::new(Borrowed(src));
        for letter in w.iter().rev() {
            cur = Box::new(Applied::new(*letter, cur, DEFAULT_PRECISION_CAP)?);
        }
        chains.push((*c, cur));
    }
    let b = chains.iter().map(|(_, s)| s.precision()).min().unwrap_or(src.precision());
    let mut out = SiegelExpansion::new(src.ctx(), src.weight(), b)?;
    for (c, s) in &chains {
        for (q, v) in gather(s.as_ref(), b) {
            out.accumulate(q, &v.scale(*c))?;
        }
    }
    Ok(out)
}

/// Parse expressions such as `Z2 - U*Z`, `p^-1*U2 + X2`, `3*(T - U)`.
/// `*` is composition (or scalar multiplication); T, T2, Q2 expand to their
/// definitions in the given weight.
pub fn parse_expr(s: &str, ctx: ScalarCtx, weight: Weight) -> Result<OperatorExpr> {
    let tokens = tokenize(s)?;
    let mut p = Parser { tokens, pos: 0, ctx, weight };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("unexpected {:?} in {s:?}", p.tokens[p.pos])));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i128),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[start..i].iter().collect();
            out.push(Tok::Int(txt.parse().map_err(|_| Error::Parse(format!("bad integer {txt}")))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    ctx: ScalarCtx,
    weight: Weight,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OperatorExpr> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.compose(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OperatorExpr> {
        let (ctx, w) = (self.ctx, self.weight);
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        if self.eat('(') {
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(Error::Parse("missing ')'".into()));
            }
            return Ok(e);
        }
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(OperatorExpr::scalar(ctx, w, PValuedScalar::from_int(ctx, n))),
            Tok::Ident(name) if name == "p" => {
                let mut e = 1i32;
                if self.eat('^') {
                    let neg = self.eat('-');
                    match self.peek().cloned() {
                        Some(Tok::Int(x)) => {
                            self.pos += 1;
                            e = if neg { -(x as i32) } else { x as i32 };
                        }
                        _ => return Err(Error::Parse("expected exponent after '^'".into())),
                    }
                }
                Ok(OperatorExpr::scalar(ctx, w, PValuedScalar::p_power(ctx, e)))
            }
            Tok::Ident(name) => {
                if let Ok(named) = name.parse::<NamedOp>() {
                    return Ok(build_expr(named, w, ctx));
                }
                Ok(OperatorExpr::prim(ctx, w, name.parse::<Prim>()?))
            }
            Tok::Sym(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}
