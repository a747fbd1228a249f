//! Text syntax for words.
//!
//! ```text
//! word    := ε | syll (SP syll)*
//! syll    := NAME '[' genrefs ']' | 'x' INT ('^' SIGNEDINT)?
//! genrefs := 'g' INT (SP 'g' INT)*
//! ```
//!
//! A factor syllable names the product of the listed generators, left to
//! right. Free letters are numbered from `x1`. Parsed words are normalized.

use crate::error::{Error, Result};
use crate::word::{Signature, Syllable, Word};

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src.chars().enumerate().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    /// 1-based column of the current character.
    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.chars.len(), |&(i, _)| i) + 1
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn skip_spaces(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn integer(&mut self, signed: bool) -> Result<i64> {
        let col = self.column();
        let mut s = String::new();
        if signed && matches!(self.peek(), Some('-') | Some('+')) {
            s.push(self.bump().unwrap());
        }
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s.parse::<i64>()
            .map_err(|_| Error::syntax(col, "expected an integer"))
    }
}

pub fn parse_word(sig: &Signature, text: &str) -> Result<Word> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "ε" {
        return Ok(Word::identity());
    }
    let mut cur = Cursor::new(text);
    let mut raw = Vec::new();
    cur.skip_spaces();
    while cur.peek().is_some() {
        raw.push(parse_syllable(sig, &mut cur)?);
        let had_space = cur.skip_spaces();
        if cur.peek().is_some() && !had_space {
            return Err(Error::syntax(cur.column(), "expected space between syllables"));
        }
    }
    Ok(sig.normalize_unchecked(raw))
}

fn parse_syllable(sig: &Signature, cur: &mut Cursor) -> Result<Syllable> {
    let col = cur.column();
    let name = cur.ident();
    if name.is_empty() {
        let found = cur.peek().map_or("end of input".to_string(), |c| format!("`{c}`"));
        return Err(Error::syntax(col, format!("expected a syllable, found {found}")));
    }
    if cur.peek() == Some('[') {
        let factor = sig
            .factor_index(&name)
            .ok_or_else(|| Error::UnknownName(name.clone()))?;
        cur.bump();
        let mut gens = Vec::new();
        loop {
            cur.skip_spaces();
            let gcol = cur.column();
            match cur.peek() {
                Some(']') if !gens.is_empty() => {
                    cur.bump();
                    break;
                }
                Some('g') => {
                    cur.bump();
                    let k = cur.integer(false)?;
                    if k as usize >= sig.factor(factor).generators().len() {
                        return Err(Error::UnknownName(format!("{name}[g{k}]")));
                    }
                    gens.push(k as usize);
                }
                _ => return Err(Error::syntax(gcol, "expected generator reference `g<k>`")),
            }
        }
        let elem = sig.factor(factor).from_spelling(&gens)?;
        return Ok(Syllable::factor(factor, elem));
    }
    let letter = name
        .strip_prefix('x')
        .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| Error::UnknownName(name.clone()))?;
    if letter == 0 || letter > sig.free_rank() {
        return Err(Error::UnknownName(name));
    }
    let exp = if cur.peek() == Some('^') {
        cur.bump();
        cur.integer(true)?
    } else {
        1
    };
    Ok(Syllable::free(letter - 1, exp))
}

pub fn format_syllable(sig: &Signature, s: &Syllable) -> String {
    match *s {
        Syllable::Factor { factor, elem } => {
            let g = sig.factor(factor as usize);
            let refs: Vec<String> = g.spelling(elem).iter().map(|k| format!("g{k}")).collect();
            format!("{}[{}]", g.name(), refs.join(" "))
        }
        Syllable::Free { letter, exp: 1 } => format!("x{}", letter + 1),
        Syllable::Free { letter, exp } => format!("x{}^{}", letter + 1, exp),
    }
}

pub fn format_word(sig: &Signature, w: &Word) -> String {
    if w.is_identity() {
        return "ε".to_string();
    }
    w.syllables()
        .iter()
        .map(|s| format_syllable(sig, s))
        .collect::<Vec<_>>()
        .join(" ")
}
