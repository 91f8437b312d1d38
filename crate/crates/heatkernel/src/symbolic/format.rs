//! Text form of terms, e.g. `-4 xi(a,b) f4[u^{ac} (x) H_{,c} (x) u^{bd} (x) H_{,d}]`.
//!
//! Applied derivatives are written `_{,cd}`, pending ones `*d{c}`.

use std::fmt;

use num_rational::Rational64;

use super::{Field, Label, Slot, Term};
use crate::error::{Error, Result};

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

pub(crate) fn label_name(l: Label) -> String {
    let l = l as usize;
    if l < LETTERS.len() {
        (LETTERS[l] as char).to_string()
    } else {
        format!("i{l}")
    }
}

pub(crate) fn labels_str(ls: &[Label]) -> String {
    ls.iter().map(|&l| label_name(l)).collect()
}

pub(crate) fn coeff_str(c: &Rational64) -> String {
    let sign = if *c.numer() < 0 { "-" } else { "+" };
    let (n, d) = (c.numer().abs(), *c.denom());
    if d == 1 {
        format!("{sign}{n}")
    } else {
        format!("{sign}{n}/{d}")
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            Field::U(a, b) => write!(f, "u^{{{}}}", labels_str(&[a, b]))?,
            Field::V(a) => write!(f, "v^{{{}}}", labels_str(&[a]))?,
            Field::W => write!(f, "w")?,
            Field::H => write!(f, "H")?,
        }
        if !self.derivs.is_empty() {
            write!(f, "_{{,{}}}", labels_str(&self.derivs))?;
        }
        if !self.pending.is_empty() {
            write!(f, "*d{{{}}}", labels_str(&self.pending))?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xi: Vec<String> = self.xi.iter().map(|&l| label_name(l)).collect();
        let slots: Vec<String> = self.slots.iter().map(|s| s.to_string()).collect();
        write!(f, "{} xi({}) f{}[{}]", coeff_str(&self.coeff), xi.join(","), self.slots.len(), slots.join(" (x) "))
    }
}

struct Labeler {
    names: Vec<String>,
}

impl Labeler {
    fn get(&mut self, name: &str) -> Label {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i as Label,
            None => {
                self.names.push(name.to_string());
                (self.names.len() - 1) as Label
            }
        }
    }

    fn many(&mut self, s: &str) -> Vec<Label> {
        s.chars().filter(|c| c.is_alphabetic()).map(|c| self.get(&c.to_string())).collect()
    }
}

fn perr<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn braced<'a>(s: &'a str, prefix: &str) -> Option<(&'a str, &'a str)> {
    let rest = s.strip_prefix(prefix)?;
    let end = rest.find('}')?;
    Some((&rest[..end], &rest[end + 1..]))
}

fn parse_slot(s: &str, lab: &mut Labeler) -> Result<Slot> {
    let s = s.trim();
    let (field, rest) = if let Some((idx, rest)) = braced(s, "u^{") {
        let l = lab.many(idx);
        if l.len() != 2 {
            return perr(format!("u needs two indices in `{s}`"));
        }
        (Field::U(l[0], l[1]), rest)
    } else if let Some((idx, rest)) = braced(s, "v^{") {
        let l = lab.many(idx);
        if l.len() != 1 {
            return perr(format!("v needs one index in `{s}`"));
        }
        (Field::V(l[0]), rest)
    } else if let Some(rest) = s.strip_prefix('w') {
        (Field::W, rest)
    } else if let Some(rest) = s.strip_prefix('H') {
        (Field::H, rest)
    } else {
        return perr(format!("unknown slot `{s}`"));
    };
    let (derivs, rest) = match braced(rest, "_{,") {
        Some((d, r)) => (lab.many(d), r),
        None => (Vec::new(), rest),
    };
    let (pending, rest) = match braced(rest, "*d{") {
        Some((d, r)) => (lab.many(d), r),
        None => (Vec::new(), rest),
    };
    if !rest.trim().is_empty() {
        return perr(format!("trailing input `{rest}` in slot `{s}`"));
    }
    Ok(Slot { field, derivs, pending })
}

/// Parse the text form produced by `Display`.
pub fn parse_term(s: &str) -> Result<Term> {
    let s = s.trim();
    let (coeff_txt, rest) = s.split_once(' ').ok_or_else(|| Error::Parse(s.into()))?;
    let coeff = parse_coeff(coeff_txt)?;
    let rest = rest.trim_start();
    let (xi_txt, rest) = braced_paren(rest).ok_or_else(|| Error::Parse(format!("missing xi(..) in `{s}`")))?;
    let mut lab = Labeler { names: Vec::new() };
    let xi = xi_txt.split(',').filter(|t| !t.trim().is_empty()).map(|t| lab.get(t.trim())).collect();
    let rest = rest.trim_start();
    let open = rest.find('[').ok_or_else(|| Error::Parse(format!("missing f_k[..] in `{s}`")))?;
    let k: usize = rest[1..open].parse().map_err(|_| Error::Parse(format!("bad order in `{s}`")))?;
    let body = rest[open + 1..].strip_suffix(']').ok_or_else(|| Error::Parse(format!("unclosed `[` in `{s}`")))?;
    let slots = body.split("(x)").map(|p| parse_slot(p, &mut lab)).collect::<Result<Vec<_>>>()?;
    if slots.len() != k {
        return perr(format!("f{k} has {} slots in `{s}`", slots.len()));
    }
    Ok(Term { coeff, xi, slots })
}

fn braced_paren(s: &str) -> Option<(&str, &str)> {
    let rest = s.strip_prefix("xi(")?;
    let end = rest.find(')')?;
    Some((&rest[..end], &rest[end + 1..]))
}

fn parse_coeff(s: &str) -> Result<Rational64> {
    let s = s.trim_start_matches('+');
    let bad = || Error::Parse(format!("bad coefficient `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
