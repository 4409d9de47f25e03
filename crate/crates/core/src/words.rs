//! Free-group words, finite presentations and their concrete syntax.
//!
//! A [`Word`] is always kept freely reduced. Letters pack a generator index
//! and a sign into one integer so that the coset table can use them directly
//! as column indices: generator `g` is column `2g`, its inverse `2g + 1`.

use std::fmt;

use thiserror::Error;

/// A signed generator: `gen^+1` or `gen^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter(((generator as u32) << 1) | inverse as u32)
    }

    pub fn from_index(index: usize) -> Self {
        Letter(index as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    /// Column index in a coset table: `2 * generator + is_inverse`.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

/// A freely reduced word in the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Builds the reduced form of an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// `generator^exponent`.
    pub fn generator_power(generator: usize, exponent: i64) -> Self {
        let l = Letter::new(generator, exponent < 0);
        Word {
            letters: vec![l; exponent.unsigned_abs() as usize],
        }
    }

    /// Builds a word from `(generator, exponent)` syllables.
    pub fn from_syllables(syllables: &[(usize, i64)]) -> Self {
        Word::from_letters(syllables.iter().flat_map(|&(g, e)| {
            std::iter::repeat_n(Letter::new(g, e < 0), e.unsigned_abs() as usize)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator()).max()
    }

    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.generator() == generator)
            .map(|l| l.sign())
            .sum()
    }

    /// Run-length form: maximal runs of one letter as `(generator, exponent)`.
    pub fn syllables(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for l in &self.letters {
            match out.last_mut() {
                Some((g, e)) if *g == l.generator() && (*e < 0) == l.is_inverse() => *e += l.sign(),
                _ => out.push((l.generator(), l.sign())),
            }
        }
        out
    }

    /// Renders with the given generator names in the parser's syntax.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.syllables()
            .iter()
            .map(|&(g, e)| {
                let name = names.get(g).cloned().unwrap_or_else(|| format!("g{g}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Free reduction of a letter sequence given as a word.
pub fn reduce(w: &Word) -> Word {
    Word::from_letters(w.letters.iter().copied())
}

pub fn invert(w: &Word) -> Word {
    Word {
        letters: w.letters.iter().rev().map(|l| l.inverse()).collect(),
    }
}

pub fn concat(u: &Word, v: &Word) -> Word {
    Word::from_letters(u.letters.iter().chain(v.letters.iter()).copied())
}

pub fn power(w: &Word, k: i64) -> Word {
    let base = if k < 0 { invert(w) } else { w.clone() };
    let mut out = Word::identity();
    for _ in 0..k.unsigned_abs() {
        out = concat(&out, &base);
    }
    out
}

/// `u^-1 v^-1 u v`.
pub fn commutator(u: &Word, v: &Word) -> Word {
    let mut w = concat(&invert(u), &invert(v));
    w = concat(&w, u);
    concat(&w, v)
}

/// Replaces generator `g` by `images[g]` throughout `w`.
pub fn substitute(w: &Word, images: &[Word]) -> Word {
    Word::from_letters(w.letters().iter().flat_map(|l| {
        let img = &images[l.generator()];
        let img = if l.is_inverse() {
            invert(img)
        } else {
            img.clone()
        };
        img.letters.clone()
    }))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.max_generator().unwrap_or(0))
            .map(default_name)
            .collect();
        f.write_str(&self.render(&names))
    }
}

fn default_name(g: usize) -> String {
    const ALPHA: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    if g < ALPHA.len() {
        (ALPHA[g] as char).to_string()
    } else {
        format!("g{g}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("relator {index} uses generator {generator} but only {count} generators exist")]
    GeneratorOutOfRange {
        index: usize,
        generator: usize,
        count: usize,
    },
}

/// Generators plus relators. Relators are reduced and never empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(
        generator_names: Vec<String>,
        relators: Vec<Word>,
    ) -> Result<Self, PresentationError> {
        for (i, name) in generator_names.iter().enumerate() {
            if generator_names[..i].contains(name) {
                return Err(PresentationError::DuplicateGenerator(name.clone()));
            }
        }
        let count = generator_names.len();
        let mut kept = Vec::with_capacity(relators.len());
        for (index, r) in relators.into_iter().enumerate() {
            let r = reduce(&r);
            if let Some(generator) = r.max_generator() {
                if generator >= count {
                    return Err(PresentationError::GeneratorOutOfRange {
                        index,
                        generator,
                        count,
                    });
                }
            }
            if !r.is_empty() {
                kept.push(r);
            }
        }
        Ok(Presentation {
            generator_names,
            relators: kept,
        })
    }

    /// Generators named `a, b, c, ...` with the given relators.
    pub fn with_default_names(
        generators: usize,
        relators: Vec<Word>,
    ) -> Result<Self, PresentationError> {
        Presentation::new((0..generators).map(default_name).collect(), relators)
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names.iter().position(|n| n == name)
    }

    /// Same generators, one more relator (dropped if it reduces to 1).
    pub fn with_relator(&self, w: Word) -> Self {
        let mut relators = self.relators.clone();
        let w = reduce(&w);
        if !w.is_empty() {
            relators.push(w);
        }
        Presentation {
            generator_names: self.generator_names.clone(),
            relators,
        }
    }

    /// Same generators, relators in the given order (a permutation of indices).
    pub fn with_relator_order(&self, order: &[usize]) -> Self {
        Presentation {
            generator_names: self.generator_names.clone(),
            relators: order.iter().map(|&i| self.relators[i].clone()).collect(),
        }
    }

    /// Canonical text form, accepted by [`parse_presentation`].
    pub fn render(&self) -> String {
        let rels: Vec<String> = self
            .relators
            .iter()
            .map(|r| r.render(&self.generator_names))
            .collect();
        format!(
            "< {} | {} >",
            self.generator_names.join(","),
            rels.join(", ")
        )
    }

    /// Parses a word over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        let mut p = Parser::new(text, Some(&self.generator_names));
        p.skip_ws();
        let w = p.word()?;
        p.expect_end()?;
        Ok(w)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected character `{0}`")]
    Unexpected(char),
    #[error("expected `{0}`")]
    Expected(char),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent")]
    MalformedExponent,
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

/// Parses `< a,b | a*b*a = b*a*b, (a*b^-1)^4 >`.
///
/// An equation `u = v` becomes the relator `u * v^-1`; a bare word is used as
/// is; `1` is the empty word. Relators that reduce to the empty word are
/// dropped.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser::new(text, None);
    p.skip_ws();
    p.eat_char('<')?;
    let mut names = vec![p.ident()?];
    p.skip_ws();
    while p.peek() == Some(',') {
        p.bump();
        p.skip_ws();
        names.push(p.ident()?);
        p.skip_ws();
    }
    let names_pos = p.pos;
    p.eat_char('|')?;
    p.names = Some(names.clone());
    let mut relators = Vec::new();
    p.skip_ws();
    if p.peek() != Some('>') {
        loop {
            relators.push(p.item()?);
            p.skip_ws();
            match p.peek() {
                Some(',') => {
                    p.bump();
                    p.skip_ws();
                }
                _ => break,
            }
        }
    }
    p.eat_char('>')?;
    p.expect_end()?;
    Presentation::new(names, relators).map_err(|e| ParseError {
        position: names_pos,
        kind: e.into(),
    })
}

/// Parses a single word against a list of generator names.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let mut p = Parser::new(text, Some(names));
    p.skip_ws();
    let w = p.word()?;
    p.expect_end()?;
    Ok(w)
}

/// Parses a relator or an equation `u = v` (giving `u * v^-1`).
pub fn parse_relator(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let mut p = Parser::new(text, Some(names));
    p.skip_ws();
    let w = p.item()?;
    p.skip_ws();
    p.expect_end()?;
    Ok(w)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    idx: usize,
    pos: usize,
    len: usize,
    names: Option<Vec<String>>,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, names: Option<&[String]>) -> Self {
        Parser {
            chars: src.char_indices().collect(),
            idx: 0,
            pos: 0,
            len: src.len(),
            names: names.map(|n| n.to_vec()),
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn bump(&mut self) {
        self.idx += 1;
        self.pos = self.chars.get(self.idx).map_or(self.len, |&(p, _)| p);
    }

    fn item(&mut self) -> Result<Word, ParseError> {
        let lhs = self.word()?;
        self.skip_ws();
        if self.peek() != Some('=') {
            return Ok(lhs);
        }
        self.bump();
        self.skip_ws();
        let rhs = self.word()?;
        Ok(concat(&lhs, &invert(&rhs)))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(c) => self.err(ParseErrorKind::Unexpected(c)),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn eat_char(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(x) if x == c => {
                self.bump();
                self.skip_ws();
                Ok(())
            }
            Some(')') => Err(self.err(ParseErrorKind::Unbalanced)),
            _ if c == ')' => Err(self.err(ParseErrorKind::Unbalanced)),
            _ => Err(self.err(ParseErrorKind::Expected(c))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(')') => Err(self.err(ParseErrorKind::Unbalanced)),
            Some(_) => Err(self.unexpected()),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let mut s = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                s.push(c);
                self.bump();
            }
            _ => return Err(self.unexpected()),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(s)
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut w = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.bump();
                self.skip_ws();
                let f = self.factor()?;
                w = concat(&w, &f);
            } else {
                return Ok(w);
            }
        }
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        self.skip_ws();
        let base = match self.peek() {
            Some('(') => {
                self.bump();
                self.skip_ws();
                let w = self.word()?;
                self.eat_char(')')?;
                w
            }
            Some('1') => {
                self.bump();
                Word::identity()
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident()?;
                let names = self.names.as_deref().unwrap_or(&[]);
                match names.iter().position(|n| *n == name) {
                    Some(g) => Word::generator_power(g, 1),
                    None => {
                        return Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::UnknownGenerator(name),
                        })
                    }
                }
            }
            Some(')') => return Err(self.err(ParseErrorKind::Unbalanced)),
            _ => return Err(self.unexpected()),
        };
        self.skip_ws();
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let k = self.signed_int()?;
            Ok(power(&base, k))
        } else {
            Ok(base)
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let mut neg = false;
        if let Some(c @ ('-' | '+')) = self.peek() {
            neg = c == '-';
            self.bump();
            self.skip_ws();
        }
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let v: i64 = digits
            .parse()
            .map_err(|_| self.err(ParseErrorKind::MalformedExponent))?;
        Ok(if neg { -v } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Letter {
        Letter::new(0, false)
    }
    fn ai() -> Letter {
        Letter::new(0, true)
    }
    fn b() -> Letter {
        Letter::new(1, false)
    }
    fn bi() -> Letter {
        Letter::new(1, true)
    }

    #[test]
    fn parses_a15_presentation() {
        let p = parse_presentation("< a,b | a*b*a = b*a*b, a*b^2*a = b^3, a^5 = 1 >").unwrap();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators().len(), 3);
        assert_eq!(p.relators()[2], Word::generator_power(0, 5));
    }

    #[test]
    fn parses_free_group() {
        let p = parse_presentation("< a | >").unwrap();
        assert_eq!(p.generator_count(), 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn third_relator_exponent_sums() {
        let p = parse_presentation("< a,b | a*b*a=b*a*b, a*b^2*a=b^5, (a*b^-1)^4=1 >").unwrap();
        let r = &p.relators()[2];
        assert_eq!(r.exponent_sum(0), 4);
        assert_eq!(r.exponent_sum(1), -4);
    }

    #[test]
    fn equations_normalize_to_lhs_times_rhs_inverse() {
        let p = parse_presentation("<a,b|a*b=b>").unwrap();
        // a*b*b^-1 = a
        assert_eq!(p.relators()[0], Word::generator_power(0, 1));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_presentation("< a,b | (a*b >").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbalanced);
        let e = parse_presentation("< a,b | a*c >").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownGenerator("c".into()));
        assert_eq!(e.position, 10);
        let e = parse_presentation("< a,b | a^x >").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MalformedExponent);
        let e = parse_presentation("< a,b | a) >").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbalanced);
        let e = parse_presentation("< a,a | a >").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Presentation(_)));
    }

    #[test]
    fn empty_relators_are_dropped() {
        let p = parse_presentation("< a | a*a^-1, 1, a^2 >").unwrap();
        assert_eq!(p.relators().len(), 1);
    }

    #[test]
    fn multi_character_names() {
        let p = parse_presentation("< x1, y_2 | x1^2, y_2^3, (x1*y_2)^5 >").unwrap();
        assert_eq!(p.relators()[2].len(), 10);
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(&Word::from_letters([a(), ai()])).is_empty());
        let w = Word::from_letters([a(), b(), bi(), a()]);
        assert_eq!(w, Word::generator_power(0, 2));
        let aba = Word::from_letters([a(), b(), a()]);
        let bab = Word::from_letters([b(), a(), b()]);
        let r = concat(&aba, &invert(&bab));
        assert_eq!(r.letters(), &[a(), b(), a(), bi(), ai(), bi()]);
    }

    #[test]
    fn invert_and_power_examples() {
        let w = Word::from_letters([a(), bi()]);
        assert_eq!(invert(&w).letters(), &[b(), ai()]);
        assert!(power(&Word::generator_power(0, 1), 0).is_empty());
        assert_eq!(power(&w, -2).letters(), &[b(), ai(), b(), ai()]);
    }

    #[test]
    fn render_round_trip() {
        let text = "< a,b | a*b*a*b^-1*a^-1*b^-1, a*b^2*a*b^-5, (a*b^-1)^4 >";
        let p = parse_presentation(text).unwrap();
        let q = parse_presentation(&p.render()).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.render(), p.render());
    }
}
