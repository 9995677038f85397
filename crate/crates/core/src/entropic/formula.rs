//! Text form of linear entropy functionals: `H(B|V)`, `I(B1;B2|V)`, `2H(BE) - H(V)`.

use std::collections::HashMap;

use super::context::{submasks, SubsetMask, SystemContext};
use super::functional::LinearEntropyFunctional as F;
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

/// Parse a sum of signed, optionally scaled `H(..)`, `H(..|..)`, `I(..;..)`
/// and `I(..;..|..)` terms. `0` is the zero functional.
pub fn parse(ctx: &SystemContext, s: &str) -> Result<F> {
    let normalized = s.replace('−', "-");
    let mut p = Parser { ctx, src: normalized.as_str(), pos: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    ctx: &'a SystemContext,
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(0, char::len_utf8);
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<F> {
        let mut f = F::zero(self.ctx);
        let mut sign = if self.eat('-') {
            -Rational::one()
        } else {
            self.eat('+');
            Rational::one()
        };
        loop {
            let t = self.term()?;
            f.add_scaled(&t, &sign)?;
            if self.eat('+') {
                sign = Rational::one();
            } else if self.eat('-') {
                sign = -Rational::one();
            } else {
                return Ok(f);
            }
        }
    }

    fn term(&mut self) -> Result<F> {
        self.skip_ws();
        let coef = self.number()?;
        self.eat('*');
        self.skip_ws();
        let atom = if self.rest().starts_with("H(") || self.rest().starts_with("I(") {
            Some(self.atom()?)
        } else {
            None
        };
        match (coef, atom) {
            (Some(c), Some(a)) => Ok(a.scale(&c)),
            (None, Some(a)) => Ok(a),
            (Some(c), None) if c.is_zero() => Ok(F::zero(self.ctx)),
            _ => Err(self.err("expected an entropy term")),
        }
    }

    fn number(&mut self) -> Result<Option<Rational>> {
        let len = self
            .rest()
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_digit() || *c == '/'))
            .map_or(self.rest().len(), |(i, _)| i);
        if len == 0 {
            return Ok(None);
        }
        let text = &self.rest()[..len];
        let q: Rational = text.parse()?;
        self.pos += len;
        Ok(Some(q))
    }

    fn subset_until(&mut self, stops: &[char]) -> Result<SubsetMask> {
        self.skip_ws();
        let len = self.rest().find(|c| stops.contains(&c)).ok_or_else(|| self.err("unterminated term"))?;
        let text: String = self.rest()[..len].chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
        self.pos += len;
        self.ctx.parse_subset(&text)
    }

    fn atom(&mut self) -> Result<F> {
        let kind = self.rest().as_bytes()[0];
        self.pos += 2;
        let ctx = self.ctx;
        if kind == b'H' {
            let a = self.subset_until(&['|', ')'])?;
            let b = if self.eat('|') { self.subset_until(&[')'])? } else { 0 };
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            if a == 0 {
                return Err(self.err("empty entropy argument"));
            }
            Ok(F::conditional_entropy(ctx, a, b))
        } else {
            let a = self.subset_until(&[';'])?;
            self.eat(';');
            let b = self.subset_until(&['|', ')'])?;
            let c = if self.eat('|') { self.subset_until(&[')'])? } else { 0 };
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            if a == 0 || b == 0 {
                return Err(self.err("empty mutual-information argument"));
            }
            Ok(F::conditional_mutual_information(ctx, a, b, c))
        }
    }
}

fn coef_prefix(c: &Rational) -> String {
    let a = c.abs();
    if a == Rational::one() {
        String::new()
    } else if a.is_integer() {
        a.to_string()
    } else {
        format!("({a})")
    }
}

/// Plain `Σ c H(s)` rendering: positive terms first, each group in mask order.
pub fn render_raw(f: &F) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let ctx = f.context();
    let mut terms: Vec<(SubsetMask, &Rational)> = f.terms().collect();
    terms.sort_by_key(|(m, c)| (c.is_negative(), m.count_ones(), *m));
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        let body = format!("{}H({})", coef_prefix(c), ctx.label(*m));
        match (i, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => out.push_str(&format!("-{body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
            (_, true) => out.push_str(&format!(" - {body}")),
        }
    }
    out
}

/// A single information quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Entropy(SubsetMask, SubsetMask),
    Mutual(SubsetMask, SubsetMask, SubsetMask),
}

impl Template {
    pub fn functional(&self, ctx: &SystemContext) -> F {
        match *self {
            Template::Entropy(a, b) => F::conditional_entropy(ctx, a, b),
            Template::Mutual(a, b, c) => F::conditional_mutual_information(ctx, a, b, c),
        }
    }

    pub fn render(&self, ctx: &SystemContext) -> String {
        match *self {
            Template::Entropy(a, 0) => format!("H({})", ctx.label(a)),
            Template::Entropy(a, b) => format!("H({}|{})", ctx.label(a), ctx.label(b)),
            Template::Mutual(a, b, 0) => format!("I({};{})", ctx.label(a), ctx.label(b)),
            Template::Mutual(a, b, c) => {
                format!("I({};{}|{})", ctx.label(a), ctx.label(b), ctx.label(c))
            }
        }
    }
}

/// Templates in order of preference: unconditional entropies, conditional
/// entropies, mutual informations, conditional mutual informations; smaller
/// supports first.
pub fn templates(ctx: &SystemContext) -> Vec<Template> {
    let full = ctx.full_mask();
    let mut out = Vec::new();
    let by_size = |mut v: Vec<(u32, u32, Template)>| {
        v.sort_by_key(|(size, key, _)| (*size, *key));
        v.into_iter().map(|(_, _, t)| t).collect::<Vec<_>>()
    };
    let mut h = Vec::new();
    let mut hc = Vec::new();
    let mut mi = Vec::new();
    let mut cmi = Vec::new();
    for a in 1..=full {
        for b in submasks(full & !a) {
            if b == 0 {
                h.push((a.count_ones(), a, Template::Entropy(a, 0)));
            } else {
                hc.push(((a | b).count_ones(), a | (b << 16), Template::Entropy(a, b)));
            }
        }
    }
    for a in 1..=full {
        for b in submasks(full & !a).filter(|&b| b > a) {
            for c in submasks(full & !(a | b)) {
                let key = a | (b << 8) | (c << 16);
                let size = (a | b | c).count_ones();
                if c == 0 {
                    mi.push((size, key, Template::Mutual(a, b, 0)));
                } else {
                    cmi.push((size, key, Template::Mutual(a, b, c)));
                }
            }
        }
    }
    out.extend(by_size(h));
    out.extend(by_size(hc));
    out.extend(by_size(mi));
    out.extend(by_size(cmi));
    out
}

/// `k·T` for the first template `T` with `f = k·T`, if any.
pub fn match_template(f: &F, library: &[Template]) -> Option<(Rational, Template)> {
    let (m0, c0) = f.terms().next()?;
    let ctx = f.context();
    for t in library {
        let g = t.functional(ctx);
        let g0 = g.coeff(m0);
        if g0.is_zero() {
            continue;
        }
        let k = c0 / &g0;
        if g.scale(&k) == *f {
            return Some((k, t.clone()));
        }
    }
    None
}

/// Render as a single scaled information quantity when possible, otherwise raw.
pub fn render_pretty(f: &F) -> String {
    if f.is_zero() {
        return "0".into();
    }
    // Support of a single template never exceeds four masks.
    if f.terms().count() <= 4 {
        if let Some((k, t)) = match_template(f, &templates(f.context())) {
            let sign = if k.is_negative() { "-" } else { "" };
            return format!("{sign}{}{}", coef_prefix(&k), t.render(f.context()));
        }
    }
    render_raw(f)
}

/// Like [`render_pretty`], but also tries `±I(X;Y|Z) ± I(X';Y'|Z')` between
/// single systems before falling back to raw entropies.
pub fn render_decomposed(f: &F) -> String {
    let single = render_pretty(f);
    if f.is_zero() || !single.contains(' ') {
        return single;
    }
    let ctx = f.context();
    // Small supports first, then the least conditioning.
    let mut mutual: Vec<(Template, F)> = templates(ctx)
        .into_iter()
        .filter(|t| matches!(t, Template::Mutual(a, b, _) if a.count_ones() == 1 && b.count_ones() == 1))
        .map(|t| {
            let g = t.functional(ctx);
            (t, g)
        })
        .collect();
    mutual.sort_by_key(|(t, _)| match *t {
        Template::Mutual(a, b, c) => ((a | b).count_ones(), c.count_ones()),
        Template::Entropy(..) => unreachable!(),
    });
    let index: HashMap<&F, &Template> = mutual.iter().map(|(t, g)| (g, t)).collect();
    let touches = |g: &F| g.terms().any(|(m, _)| !f.coeff(m).is_zero());
    for (t1, g1) in mutual.iter().filter(|(_, g)| touches(g)) {
        for sign1 in [1i64, -1] {
            let k1 = Rational::from_int(sign1);
            let Ok(rest) = f.try_sub(&g1.scale(&k1)) else { continue };
            for sign2 in [1i64, -1] {
                let probe = rest.scale(&Rational::from_int(sign2));
                if let Some(t2) = index.get(&probe) {
                    let mut parts = [(sign1, t1.render(ctx)), (sign2, t2.render(ctx))];
                    parts.sort_by_key(|(s, _)| -s);
                    let (s0, a) = &parts[0];
                    let (s1, b) = &parts[1];
                    let lead = if *s0 < 0 { "-" } else { "" };
                    let op = if *s1 < 0 { "-" } else { "+" };
                    return format!("{lead}{a} {op} {b}");
                }
            }
        }
    }
    single
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> SystemContext {
        SystemContext::new(["B", "E", "V"]).unwrap()
    }

    #[test]
    fn parse_and_render_round_trip() {
        let c = ctx();
        for s in ["-H(B|V)", "H(E|BV)", "I(B;V)", "2H(BE)", "-H(BE|V)", "I(B;E|V)"] {
            let f = parse(&c, s).unwrap();
            assert_eq!(render_pretty(&f), s, "{s}");
        }
    }

    #[test]
    fn raw_fallback() {
        let c = ctx();
        let f = parse(&c, "H(EV) - H(BV)").unwrap();
        assert_eq!(render_pretty(&f), "H(EV) - H(BV)");
        assert_eq!(render_raw(&parse(&c, "0").unwrap()), "0");
    }

    #[test]
    fn unicode_minus_and_fractions() {
        let c = ctx();
        let f = parse(&c, "−1/2 H(B) + 1/2*H(B)").unwrap();
        assert!(f.is_zero());
        assert!(parse(&c, "H(X)").is_err());
        assert!(parse(&c, "H(B").is_err());
    }

    #[test]
    fn cmi_expansion() {
        let c = SystemContext::new(["A", "B", "C"]).unwrap();
        let f = parse(&c, "I(A;B|C)").unwrap();
        assert_eq!(render_raw(&f), "H(AC) + H(BC) - H(C) - H(ABC)");
    }

    #[test]
    fn decomposed_difference_of_mutual_informations() {
        let c = SystemContext::new(["B1", "E1", "B2", "E2", "V"]).unwrap();
        let f = parse(&c, "I(B1;B2|V) - I(E1;B2|V)").unwrap();
        assert_eq!(render_decomposed(&f), "I(B1;B2|V) - I(E1;B2|V)");
        let g = parse(&c, "-I(E1;B2|B1V)").unwrap();
        assert_eq!(render_decomposed(&g), "-I(E1;B2|B1V)");
        assert_eq!(render_decomposed(&F::zero(&c)), "0");
    }
}
