//! Loop words over named generators `g1, g2, ...` and the central element
//! `z`.
//!
//! Products must be parenthesized once they nest: `(g1*g2)*g3` is a word,
//! `g1*g2*g3` is rejected unless left association is requested.

use std::fmt;

use crate::coded_loop::{CodedLoop, CodedLoopElement};
use crate::error::{Error, Result};
use crate::table::FiniteLoop;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    /// `g<i+1>`
    Generator(usize),
    /// `z`, the generator of the central subgroup.
    Central,
    Product(Box<Word>, Box<Word>),
    Power(Box<Word>, i64),
    Commutator(Box<Word>, Box<Word>),
    Associator(Box<Word>, Box<Word>, Box<Word>),
}

/// How to read `a*b*c` without parentheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Association {
    /// Reject it.
    #[default]
    Explicit,
    /// Read it as `(a*b)*c`. Lossy: the input no longer says what it means.
    Left,
}

pub fn parse_word(text: &str) -> Result<Word> {
    parse_word_with(text, Association::Explicit)
}

pub fn parse_word_with(text: &str, assoc: Association) -> Result<Word> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        assoc,
    };
    let w = p.product()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(w)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    assoc: Association,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(1, self.pos + 1, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected `{c}`, found `{x}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of input"))),
        }
    }

    /// `postfix ['*' postfix]`
    fn product(&mut self) -> Result<Word> {
        let mut left = self.postfix()?;
        let mut count = 0;
        while self.peek() == Some('*') {
            if count == 1 && self.assoc == Association::Explicit {
                return Err(self.error("products must be parenthesized, e.g. `(a*b)*c`"));
            }
            self.pos += 1;
            let right = self.postfix()?;
            left = Word::Product(Box::new(left), Box::new(right));
            count += 1;
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Word> {
        let mut w = self.primary()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            let n = self.integer()?;
            w = Word::Power(Box::new(w), n);
        }
        Ok(w)
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| {
            self.pos = start;
            self.error("expected an integer exponent")
        })
    }

    fn primary(&mut self) -> Result<Word> {
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                Ok(Word::Central)
            }
            Some('g') => {
                self.pos += 1;
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                match s.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(Word::Generator(i - 1)),
                    _ => {
                        self.pos = start;
                        Err(self.error("expected a generator number 1, 2, ... after `g`"))
                    }
                }
            }
            Some('(') => {
                self.pos += 1;
                let w = self.product()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let a = self.product()?;
                self.expect(',')?;
                let b = self.product()?;
                if self.peek() == Some(',') {
                    self.pos += 1;
                    let c = self.product()?;
                    self.expect(']')?;
                    Ok(Word::Associator(Box::new(a), Box::new(b), Box::new(c)))
                } else {
                    self.expect(']')?;
                    Ok(Word::Commutator(Box::new(a), Box::new(b)))
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// The input line with a caret under the reported column.
pub fn caret_diagnostic(text: &str, err: &Error) -> String {
    match err {
        Error::Parse { column, message, .. } => {
            format!("{text}\n{}^ {message}", " ".repeat(column.saturating_sub(1)))
        }
        other => other.to_string(),
    }
}

impl Word {
    /// Fully parenthesized text that parses back to the same tree.
    pub fn render(&self) -> String {
        match self {
            Word::Generator(i) => format!("g{}", i + 1),
            Word::Central => "z".into(),
            Word::Product(a, b) => format!("({}*{})", a.render(), b.render()),
            Word::Power(a, n) => format!("{}^{}", a.render(), n),
            Word::Commutator(a, b) => format!("[{},{}]", a.render(), b.render()),
            Word::Associator(a, b, c) => format!("[{},{},{}]", a.render(), b.render(), c.render()),
        }
    }

    fn max_generator(&self) -> Option<usize> {
        match self {
            Word::Generator(i) => Some(*i),
            Word::Central => None,
            Word::Power(a, _) => a.max_generator(),
            Word::Product(a, b) | Word::Commutator(a, b) => a.max_generator().max(b.max_generator()),
            Word::Associator(a, b, c) => a.max_generator().max(b.max_generator()).max(c.max_generator()),
        }
    }

    fn eval_index<L: FiniteLoop + ?Sized>(&self, l: &L, frame: &Frame) -> usize {
        use crate::analysis::{associator, commutator, pow};
        match self {
            Word::Generator(i) => frame.generators[*i],
            Word::Central => frame.central,
            Word::Product(a, b) => l.mul(a.eval_index(l, frame), b.eval_index(l, frame)),
            Word::Power(a, n) => pow(l, a.eval_index(l, frame), *n),
            Word::Commutator(a, b) => commutator(l, a.eval_index(l, frame), b.eval_index(l, frame)),
            Word::Associator(a, b, c) => {
                associator(l, a.eval_index(l, frame), b.eval_index(l, frame), c.eval_index(l, frame))
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Where the generators of a loop with elements `z * |C| + rank(v)` sit.
#[derive(Clone, Debug)]
pub struct Frame {
    pub generators: Vec<usize>,
    pub central: usize,
    pub slot_orders: Vec<u32>,
    pub quotient_order: usize,
    pub z_order: usize,
}

impl Frame {
    pub fn of_coded(l: &CodedLoop) -> Frame {
        Frame::of_slots(l.slot_orders(), l.z_order())
    }

    /// For a table indexed like a coded loop with the given slot orders.
    pub fn of_slots(slot_orders: &[u32], z_order: u32) -> Frame {
        let k = slot_orders.len();
        let generators = (0..k)
            .map(|i| slot_orders[i + 1..].iter().map(|&q| q as usize).product())
            .collect();
        let quotient_order: usize = slot_orders.iter().map(|&q| q as usize).product();
        Frame {
            generators,
            central: if z_order > 1 { quotient_order } else { 0 },
            slot_orders: slot_orders.to_vec(),
            quotient_order,
            z_order: z_order as usize,
        }
    }
}

fn check_bound(w: &Word, frame: &Frame) -> Result<()> {
    match w.max_generator() {
        Some(i) if i >= frame.generators.len() => Err(Error::Index(format!(
            "g{} is not bound: the loop has {} generators",
            i + 1,
            frame.generators.len()
        ))),
        _ => Ok(()),
    }
}

pub fn eval_word(w: &Word, l: &CodedLoop) -> Result<CodedLoopElement> {
    Ok(l.element_at(eval_word_in(w, l, &Frame::of_coded(l))?))
}

/// Index of the value of `w` in any loop laid out as `frame` describes.
pub fn eval_word_in<L: FiniteLoop + ?Sized>(w: &Word, l: &L, frame: &Frame) -> Result<usize> {
    check_bound(w, frame)?;
    if l.order() != frame.quotient_order * frame.z_order {
        return Err(Error::Dimension {
            expected: frame.quotient_order * frame.z_order,
            got: l.order(),
        });
    }
    Ok(w.eval_index(l, frame))
}

/// Writes the value of `w` as `z^a g1^r1(g2^r2(...))`, leaving out zero
/// exponents and writing `z`, `g1` for exponent one; the identity is `1`.
pub fn normal_form_string(w: &Word, l: &CodedLoop) -> Result<String> {
    normal_form_in(w, l, &Frame::of_coded(l))
}

pub fn normal_form_in<L: FiniteLoop + ?Sized>(w: &Word, l: &L, frame: &Frame) -> Result<String> {
    let x = eval_word_in(w, l, frame)?;
    let nc = frame.quotient_order;
    let k = frame.slot_orders.len();
    let mut v = vec![0u32; k];
    let mut r = x % nc;
    for i in (0..k).rev() {
        let q = frame.slot_orders[i] as usize;
        v[i] = (r % q) as u32;
        r /= q;
    }
    // the right-nested product of generator powers
    let mut nested = l.identity();
    for i in (0..k).rev() {
        if v[i] != 0 {
            let g = crate::analysis::pow(l, frame.generators[i], v[i] as i64);
            nested = l.mul(g, nested);
        }
    }
    if nested % nc != x % nc {
        return Err(Error::InvalidLoop("table is not laid out as a central extension".into()));
    }
    let m = frame.z_order;
    let a = (x / nc + m - nested / nc) % m;
    let mut out = String::new();
    match a {
        0 => {}
        1 => out.push('z'),
        _ => out.push_str(&format!("z^{a}")),
    }
    let gens: Vec<String> = (0..k)
        .filter(|&i| v[i] != 0)
        .map(|i| if v[i] == 1 { format!("g{}", i + 1) } else { format!("g{}^{}", i + 1, v[i]) })
        .collect();
    if !gens.is_empty() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&gens[0]);
        for g in &gens[1..] {
            out.push('(');
            out.push_str(g);
        }
        out.push_str(&")".repeat(gens.len() - 1));
    }
    if out.is_empty() {
        out.push('1');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvs::Cvs;

    fn g(i: usize) -> Box<Word> {
        Box::new(Word::Generator(i))
    }

    #[test]
    fn grammar() {
        assert_eq!(
            parse_word("(g1*g2)*g3").unwrap(),
            Word::Product(Box::new(Word::Product(g(0), g(1))), g(2))
        );
        let err = parse_word("g1*g2*g3").unwrap_err();
        assert!(matches!(err, Error::Parse { column: 6, .. }), "{err:?}");
        assert_eq!(
            parse_word_with("g1*g2*g3", Association::Left).unwrap(),
            parse_word("(g1*g2)*g3").unwrap()
        );
        assert_eq!(
            parse_word("[g1,g2,g3]^-1").unwrap(),
            Word::Power(Box::new(Word::Associator(g(0), g(1), g(2))), -1)
        );
        assert_eq!(parse_word(" [ g1 , g2 ] ").unwrap(), Word::Commutator(g(0), g(1)));
        assert!(parse_word("g0").is_err());
        assert!(parse_word("(g1*g2").is_err());
        assert!(parse_word("g1^").is_err());
        assert!(parse_word("").is_err());
        assert!(parse_word("g1 g2").is_err());
    }

    #[test]
    fn caret_points_at_the_problem() {
        let text = "(g1*g2)*x";
        let err = parse_word(text).unwrap_err();
        assert_eq!(caret_diagnostic(text, &err), "(g1*g2)*x\n        ^ unexpected `x`");
    }

    #[test]
    fn render_round_trip() {
        for s in ["(g1*g2)*g3", "[g1,g2,g3]^-1", "((z^2*g1)*[g2,(g1*g3)])^3", "g1^2^-1"] {
            let w = parse_word(s).unwrap();
            assert_eq!(parse_word(&w.render()).unwrap(), w);
        }
    }

    #[test]
    fn octonion_words() {
        let l = CodedLoop::build(&Cvs::octonion()).unwrap();
        let z = l.central(1);
        assert_eq!(eval_word(&parse_word("[g1,g2,g3]").unwrap(), &l).unwrap(), z);
        assert_eq!(eval_word(&parse_word("(g1*g1)").unwrap(), &l).unwrap(), z);
        assert_eq!(eval_word(&parse_word("g1^0").unwrap(), &l).unwrap(), l.identity_element());
        assert!(eval_word(&parse_word("g4").unwrap(), &l).is_err());
        assert_eq!(normal_form_string(&parse_word("g1^0").unwrap(), &l).unwrap(), "1");
        let left = normal_form_string(&parse_word("((g1*g2)*g3)").unwrap(), &l).unwrap();
        let right = normal_form_string(&parse_word("(g1*(g2*g3))").unwrap(), &l).unwrap();
        assert_ne!(left, right);
        let strip = |s: &str| s.trim_start_matches("z ").to_string();
        assert_eq!(strip(&left), strip(&right));
        assert!(left.starts_with("z ") ^ right.starts_with("z "));
        assert_eq!(normal_form_string(&parse_word("[g1,g2,g3]").unwrap(), &l).unwrap(), "z");
        // equal elements give equal strings
        let a = normal_form_string(&parse_word("[g1,g2]").unwrap(), &l).unwrap();
        let b = normal_form_string(&parse_word("z").unwrap(), &l).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tables_laid_out_like_coded_loops() {
        let l = CodedLoop::build(&Cvs::octonion()).unwrap();
        let t = l.to_table().unwrap();
        let frame = Frame::of_slots(&[2, 2, 2], 2);
        for s in ["((g1*g2)*g3)", "(g1*(g2*g3))", "[g1,g3]^3", "z"] {
            let w = parse_word(s).unwrap();
            assert_eq!(normal_form_in(&w, &t, &frame).unwrap(), normal_form_string(&w, &l).unwrap());
        }
    }

    #[test]
    fn central_powers() {
        let c = crate::cvs::random_cvs(3, 2, 1).unwrap();
        let l = CodedLoop::build(&c).unwrap();
        assert_eq!(normal_form_string(&parse_word("z^2").unwrap(), &l).unwrap(), "z^2");
        assert_eq!(normal_form_string(&parse_word("z^3").unwrap(), &l).unwrap(), "1");
    }
}
