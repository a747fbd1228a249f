//! Text formats for signatures, endomorphisms and generator lists.
//!
//! Signature files are a small key-value tree:
//!
//! ```text
//! # Z2 * Z3 * F(x1)
//! free_rank = 1
//!
//! [factor]
//! name = A
//! degree = 2
//! generators = [[1, 0]]
//!
//! [factor]
//! name = B
//! degree = 3
//! generators = [[1, 2, 0]]
//! ```
//!
//! Endomorphism files give one image per line, `A.g0 = <word>` for factor
//! generators and `x1 = <word>` for free letters. Generators that are not
//! listed map to themselves.
//!
//! Generator files hold one word per line. In every format `#` starts a
//! comment and blank lines are ignored.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{close_group, FiniteGroup, DEFAULT_GROUP_CAP};
use crate::morphism::Endomorphism;
use crate::word::{Signature, Word};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Content lines as `(line number, text without comment)`.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// Splits `key = value`, returning the value's 1-based column too.
fn key_value(line: usize, body: &str) -> Result<(&str, &str, usize)> {
    let eq = body
        .find('=')
        .ok_or_else(|| syntax(line, body.len() - body.trim_start().len() + 1, "expected `key = value`"))?;
    let key = body[..eq].trim();
    if key.is_empty() {
        return Err(syntax(line, eq + 1, "missing key before `=`"));
    }
    let rest = &body[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let value = rest.trim();
    let column = body[..eq + 1 + lead].chars().count() + 1;
    Ok((key, value, column))
}

fn parse_usize(line: usize, column: usize, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| syntax(line, column, format!("expected a non-negative integer, found `{value}`")))
}

/// Parses `[[1, 0], [0, 1]]`.
fn parse_perm_list(line: usize, column: usize, value: &str) -> Result<Vec<Vec<u32>>> {
    let chars: Vec<char> = value.chars().collect();
    let mut pos = 0;
    let err = |pos: usize, msg: &str| syntax(line, column + pos, msg.to_string());
    let skip = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let expect = |pos: &mut usize, c: char| -> Result<()> {
        skip(pos);
        if chars.get(*pos) == Some(&c) {
            *pos += 1;
            Ok(())
        } else {
            Err(err(*pos, &format!("expected `{c}`")))
        }
    };
    expect(&mut pos, '[')?;
    let mut out = Vec::new();
    skip(&mut pos);
    if chars.get(pos) == Some(&']') {
        pos += 1;
    } else {
        loop {
            expect(&mut pos, '[')?;
            let mut perm = Vec::new();
            loop {
                skip(&mut pos);
                let start = pos;
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(err(pos, "expected an integer"));
                }
                let s: String = chars[start..pos].iter().collect();
                perm.push(s.parse::<u32>().map_err(|_| err(start, "integer out of range"))?);
                skip(&mut pos);
                match chars.get(pos) {
                    Some(',') => pos += 1,
                    Some(']') => {
                        pos += 1;
                        break;
                    }
                    _ => return Err(err(pos, "expected `,` or `]`")),
                }
            }
            out.push(perm);
            skip(&mut pos);
            match chars.get(pos) {
                Some(',') => pos += 1,
                Some(']') => {
                    pos += 1;
                    break;
                }
                _ => return Err(err(pos, "expected `,` or `]`")),
            }
        }
    }
    skip(&mut pos);
    if pos < chars.len() {
        return Err(err(pos, "unexpected trailing input"));
    }
    Ok(out)
}

#[derive(Default)]
struct FactorBlock {
    line: usize,
    name: Option<String>,
    degree: Option<usize>,
    generators: Option<(usize, Vec<Vec<u32>>)>,
}

pub fn parse_signature(text: &str) -> Result<Signature> {
    let mut free_rank = None;
    let mut blocks: Vec<FactorBlock> = Vec::new();
    for (line, body) in lines(text) {
        let trimmed = body.trim();
        if trimmed.starts_with('[') && !trimmed.contains('=') {
            if trimmed != "[factor]" {
                let col = body.len() - body.trim_start().len() + 1;
                return Err(syntax(line, col, format!("unknown section `{trimmed}`")));
            }
            blocks.push(FactorBlock {
                line,
                ..FactorBlock::default()
            });
            continue;
        }
        let (key, value, col) = key_value(line, body)?;
        let dup = || syntax(line, 1, format!("duplicate key `{key}`"));
        match (blocks.last_mut(), key) {
            (None, "free_rank") => {
                if free_rank.replace(parse_usize(line, col, value)?).is_some() {
                    return Err(dup());
                }
            }
            (Some(b), "name") => {
                if b.name.replace(value.to_string()).is_some() {
                    return Err(dup());
                }
            }
            (Some(b), "degree") => {
                if b.degree.replace(parse_usize(line, col, value)?).is_some() {
                    return Err(dup());
                }
            }
            (Some(b), "generators") => {
                if b.generators.replace((line, parse_perm_list(line, col, value)?)).is_some() {
                    return Err(dup());
                }
            }
            _ => return Err(syntax(line, 1, format!("unexpected key `{key}` here"))),
        }
    }
    let mut factors: Vec<FiniteGroup> = Vec::with_capacity(blocks.len());
    for b in blocks {
        let missing = |k: &str| syntax(b.line, 1, format!("factor block is missing `{k}`"));
        let name = b.name.ok_or_else(|| missing("name"))?;
        let degree = b.degree.ok_or_else(|| missing("degree"))?;
        let (gline, gens) = b.generators.ok_or_else(|| missing("generators"))?;
        let group = close_group(&name, degree, &gens, DEFAULT_GROUP_CAP).map_err(|e| match e {
            Error::InvalidPermutation(m) => Error::InvalidPermutation(format!("line {gline}: {m}")),
            other => other,
        })?;
        factors.push(group);
    }
    Signature::new(factors, free_rank.unwrap_or(0))
}

pub fn format_signature(sig: &Signature) -> String {
    let mut out = format!("free_rank = {}\n", sig.free_rank());
    for g in sig.factors() {
        let perms: Vec<String> = g
            .generator_perms()
            .iter()
            .map(|p| {
                let items: Vec<String> = p.iter().map(u32::to_string).collect();
                format!("[{}]", items.join(", "))
            })
            .collect();
        out.push_str(&format!(
            "\n[factor]\nname = {}\ndegree = {}\ngenerators = [{}]\n",
            g.name(),
            g.degree(),
            perms.join(", ")
        ));
    }
    out
}

/// Parses a word, shifting error positions to `line` and the value column.
fn word_at(sig: &Signature, line: usize, column: usize, text: &str) -> Result<Word> {
    sig.parse_word(text).map_err(|e| e.at_line(line, column - 1))
}

pub fn parse_endomorphism(sig: &Signature, text: &str) -> Result<Endomorphism> {
    let mut factor_images: Vec<Vec<Word>> = (0..sig.num_factors())
        .map(|i| {
            sig.factor(i)
                .generators()
                .iter()
                .map(|&g| sig.element(i, g))
                .collect()
        })
        .collect();
    let mut free_images: Vec<Word> = (0..sig.free_rank()).map(|j| sig.letter(j)).collect();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, body) in lines(text) {
        let (key, value, col) = key_value(line, body)?;
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(syntax(line, 1, format!("`{key}` already given on line {prev}")));
        }
        let image = word_at(sig, line, col, value)?;
        if let Some((fname, gen)) = key.split_once('.') {
            let i = sig
                .factor_index(fname)
                .ok_or_else(|| Error::UnknownName(fname.to_string()))?;
            let k = gen
                .strip_prefix('g')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&k| k < sig.factor(i).generators().len())
                .ok_or_else(|| Error::UnknownName(key.to_string()))?;
            factor_images[i][k] = image;
        } else {
            let j = key
                .strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&j| j >= 1 && j <= sig.free_rank())
                .ok_or_else(|| Error::UnknownName(key.to_string()))?;
            free_images[j - 1] = image;
        }
    }
    Endomorphism::build(sig, factor_images, free_images)
}

pub fn format_endomorphism(phi: &Endomorphism) -> String {
    let sig = phi.signature();
    let mut out = String::new();
    for (i, imgs) in phi.factor_images().iter().enumerate() {
        for (k, w) in imgs.iter().enumerate() {
            out.push_str(&format!("{}.g{k} = {}\n", sig.factor(i).name(), sig.format_word(w)));
        }
    }
    for (j, w) in phi.free_images().iter().enumerate() {
        out.push_str(&format!("x{} = {}\n", j + 1, sig.format_word(w)));
    }
    out
}

pub fn parse_generators(sig: &Signature, text: &str) -> Result<Vec<Word>> {
    lines(text)
        .map(|(line, body)| {
            let lead = body.len() - body.trim_start().len();
            word_at(sig, line, body[..lead].chars().count() + 1, body.trim())
        })
        .collect()
}
