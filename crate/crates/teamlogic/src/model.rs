//! Finite relational structures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

/// Index of a domain element; elements are kept in lexicographic name order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Elem(pub u16);

pub type Tuple = Vec<Elem>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub relations: BTreeMap<Arc<str>, usize>,
    pub constants: BTreeSet<Arc<str>>,
}

impl Signature {
    pub fn add_relation(&mut self, sym: Arc<str>, arity: usize) -> Result<(), ModelError> {
        if self.constants.contains(&sym) {
            return Err(ModelError::SymbolClash(sym.to_string()));
        }
        match self.relations.get(&sym) {
            Some(&a) if a != arity => Err(ModelError::Arity { sym: sym.to_string(), expected: a, got: arity }),
            _ => {
                self.relations.insert(sym, arity);
                Ok(())
            }
        }
    }

    pub fn add_constant(&mut self, sym: Arc<str>) -> Result<(), ModelError> {
        if self.relations.contains_key(&sym) {
            return Err(ModelError::SymbolClash(sym.to_string()));
        }
        self.constants.insert(sym);
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing domain line")]
    MissingDomain,
    #[error("relation {sym} has arity {expected}, tuple has length {got}")]
    Arity { sym: String, expected: usize, got: usize },
    #[error("element {0} is not in the domain")]
    UnknownElement(String),
    #[error("symbol {0} is declared twice or clashes")]
    SymbolClash(String),
    #[error("tuple line outside a relation block")]
    StrayTuple,
    #[error("model has {size} elements, at least {min} required")]
    TooSmall { size: usize, min: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Model {
    names: Vec<Arc<str>>,
    relations: BTreeMap<Arc<str>, (usize, BTreeSet<Tuple>)>,
    constants: BTreeMap<Arc<str>, Elem>,
}

impl Model {
    /// A model over the given element names with empty signature.
    pub fn new(names: &[&str]) -> Model {
        let mut names: Vec<Arc<str>> = names.iter().map(|n| Arc::from(*n)).collect();
        names.sort();
        names.dedup();
        assert!(!names.is_empty(), "domain must be nonempty");
        Model { names, relations: BTreeMap::new(), constants: BTreeMap::new() }
    }

    /// The domain `{e1, …, ed}`.
    pub fn standard(d: usize) -> Model {
        let names: Vec<String> = (1..=d).map(|i| format!("e{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Model::new(&refs)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.names.len()).map(|i| Elem(i as u16))
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.0 as usize]
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.binary_search_by(|n| (**n).cmp(name)).ok().map(|i| Elem(i as u16))
    }

    pub fn relation(&self, sym: &str) -> Option<&BTreeSet<Tuple>> {
        self.relations.get(sym).map(|r| &r.1)
    }

    pub fn arity(&self, sym: &str) -> Option<usize> {
        self.relations.get(sym).map(|r| r.0)
    }

    pub fn constant(&self, sym: &str) -> Option<Elem> {
        self.constants.get(sym).copied()
    }

    pub fn signature(&self) -> Signature {
        Signature {
            relations: self.relations.iter().map(|(k, v)| (k.clone(), v.0)).collect(),
            constants: self.constants.keys().cloned().collect(),
        }
    }

    pub fn require_min_size(&self, min: usize) -> Result<(), ModelError> {
        if self.size() < min {
            Err(ModelError::TooSmall { size: self.size(), min })
        } else {
            Ok(())
        }
    }

    pub fn with_relation(mut self, sym: &str, arity: usize, tuples: BTreeSet<Tuple>) -> Result<Model, ModelError> {
        if self.relations.contains_key(sym) || self.constants.contains_key(sym) {
            return Err(ModelError::SymbolClash(sym.to_string()));
        }
        for t in &tuples {
            if t.len() != arity {
                return Err(ModelError::Arity { sym: sym.to_string(), expected: arity, got: t.len() });
            }
            if t.iter().any(|e| e.0 as usize >= self.size()) {
                return Err(ModelError::UnknownElement(format!("{e:?}", e = t)));
            }
        }
        self.relations.insert(Arc::from(sym), (arity, tuples));
        Ok(self)
    }

    pub fn with_constant(mut self, sym: &str, e: Elem) -> Result<Model, ModelError> {
        if self.relations.contains_key(sym) || self.constants.contains_key(sym) {
            return Err(ModelError::SymbolClash(sym.to_string()));
        }
        if e.0 as usize >= self.size() {
            return Err(ModelError::UnknownElement(format!("{e:?}")));
        }
        self.constants.insert(Arc::from(sym), e);
        Ok(self)
    }
}

/// The `(M, R)` expansion by a fresh relation symbol.
pub fn expand_with_relation(m: &Model, sym: &str, arity: usize, interp: BTreeSet<Tuple>) -> Result<Model, ModelError> {
    m.clone().with_relation(sym, arity, interp)
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let mut model: Option<Model> = None;
    let mut current: Option<(String, usize, BTreeSet<Tuple>)> = None;
    let syntax = |line: usize, message: &str| ModelError::Syntax { line, message: message.to_string() };

    fn flush(
        model: &mut Option<Model>,
        current: &mut Option<(String, usize, BTreeSet<Tuple>)>,
    ) -> Result<(), ModelError> {
        if let Some((sym, arity, tuples)) = current.take() {
            let m = model.take().ok_or(ModelError::MissingDomain)?;
            *model = Some(m.with_relation(&sym, arity, tuples)?);
        }
        Ok(())
    }

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let indented = line.starts_with(' ') || line.starts_with('\t');
        let words: Vec<&str> = line.split_whitespace().collect();
        if indented {
            let (sym, arity, tuples) = current.as_mut().ok_or(ModelError::StrayTuple)?;
            let m = model.as_ref().ok_or(ModelError::MissingDomain)?;
            let elems: Vec<&str> = if words == ["()"] { vec![] } else { words.clone() };
            if elems.len() != *arity {
                return Err(ModelError::Arity { sym: sym.clone(), expected: *arity, got: elems.len() });
            }
            let t = elems
                .iter()
                .map(|w| m.elem(w).ok_or_else(|| ModelError::UnknownElement(w.to_string())))
                .collect::<Result<Tuple, _>>()?;
            tuples.insert(t);
            continue;
        }
        flush(&mut model, &mut current)?;
        match words[0] {
            "domain" => {
                if model.is_some() {
                    return Err(syntax(lineno, "second domain line"));
                }
                if words.len() < 2 {
                    return Err(syntax(lineno, "empty domain"));
                }
                model = Some(Model::new(&words[1..]));
            }
            "rel" => {
                if model.is_none() {
                    return Err(ModelError::MissingDomain);
                }
                if words.len() != 3 {
                    return Err(syntax(lineno, "expected 'rel NAME ARITY'"));
                }
                let arity: usize = words[2].parse().map_err(|_| syntax(lineno, "bad arity"))?;
                current = Some((words[1].to_string(), arity, BTreeSet::new()));
            }
            "const" => {
                let m = model.take().ok_or(ModelError::MissingDomain)?;
                if words.len() != 3 {
                    return Err(syntax(lineno, "expected 'const NAME ELEMENT'"));
                }
                let e = m.elem(words[2]).ok_or_else(|| ModelError::UnknownElement(words[2].to_string()))?;
                model = Some(m.with_constant(words[1], e)?);
            }
            other => return Err(syntax(lineno, &format!("unknown directive {other}"))),
        }
    }
    flush(&mut model, &mut current)?;
    model.ok_or(ModelError::MissingDomain)
}

pub fn print_model(m: &Model) -> String {
    let mut out = String::from("domain");
    for n in &m.names {
        let _ = write!(out, " {n}");
    }
    out.push('\n');
    for (sym, (arity, tuples)) in &m.relations {
        let _ = writeln!(out, "rel {sym} {arity}");
        for t in tuples {
            if t.is_empty() {
                out.push_str("  ()\n");
            } else {
                let names: Vec<&str> = t.iter().map(|e| m.name(*e)).collect();
                let _ = writeln!(out, "  {}", names.join(" "));
            }
        }
    }
    for (sym, e) in &m.constants {
        let _ = writeln!(out, "const {sym} {}", m.name(*e));
    }
    out
}

fn all_tuples(d: usize, arity: usize) -> Vec<Tuple> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |e| {
                    let mut t = t.clone();
                    t.push(Elem(e as u16));
                    t
                })
            })
            .collect();
    }
    out
}

/// Every model over `sig` with domain `{e1..ed}` for `d` in `min_size..=max_size`.
pub fn enumerate_models_from(sig: &Signature, min_size: usize, max_size: usize) -> impl Iterator<Item = Model> + '_ {
    (min_size.max(1)..=max_size).flat_map(move |d| {
        let base = Model::standard(d);
        let rel_choices: Vec<(Arc<str>, usize, Vec<Tuple>)> =
            sig.relations.iter().map(|(s, a)| (s.clone(), *a, all_tuples(d, *a))).collect();
        let consts: Vec<Arc<str>> = sig.constants.iter().cloned().collect();
        let rel_counts: Vec<u128> = rel_choices.iter().map(|(_, _, ts)| 1u128 << ts.len()).collect();
        let total: u128 = rel_counts.iter().product::<u128>() * (d as u128).pow(consts.len() as u32);
        (0..total).map(move |mut code| {
            let mut m = base.clone();
            for ((sym, arity, tuples), count) in rel_choices.iter().zip(&rel_counts) {
                let mask = code % count;
                code /= count;
                let chosen =
                    tuples.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
                m = m.with_relation(sym, *arity, chosen).expect("fresh symbol");
            }
            for c in &consts {
                let e = (code % d as u128) as u16;
                code /= d as u128;
                m = m.with_constant(c, Elem(e)).expect("fresh symbol");
            }
            m
        })
    })
}

pub fn enumerate_models(sig: &Signature, max_size: usize) -> impl Iterator<Item = Model> + '_ {
    enumerate_models_from(sig, 1, max_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let m = parse_model("domain a b\nrel R 1\n a\n").unwrap();
        assert_eq!(m.relation("R").unwrap().len(), 1);
        assert!(m.relation("R").unwrap().contains(&vec![m.elem("a").unwrap()]));
        assert_eq!(parse_model("rel R 1\n a\n"), Err(ModelError::MissingDomain));
        assert!(matches!(parse_model("domain a b\nrel R 1\n a b\n"), Err(ModelError::Arity { .. })));
        assert!(matches!(parse_model("domain a b\nrel R 1\n c\n"), Err(ModelError::UnknownElement(_))));

        let text = "domain a b c # comment\nrel E 2\n  a b\n  b c\nrel P 0\n  ()\nconst k c\n";
        let m = parse_model(text).unwrap();
        assert_eq!(parse_model(&print_model(&m)).unwrap(), m);
        assert_eq!(m.constant("k"), m.elem("c"));
    }

    #[test]
    fn enumeration_counts() {
        let empty = Signature::default();
        assert_eq!(enumerate_models(&empty, 2).count(), 2);
        let mut sig = Signature::default();
        sig.add_relation("R".into(), 1).unwrap();
        assert_eq!(enumerate_models(&sig, 1).count(), 2);
        assert_eq!(enumerate_models(&sig, 2).count(), 6);
        sig.add_constant("c".into()).unwrap();
        // 2*1 + 4*2
        assert_eq!(enumerate_models(&sig, 2).count(), 10);
        let all: Vec<Model> = enumerate_models(&sig, 2).collect();
        let distinct: BTreeSet<String> = all.iter().map(print_model).collect();
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn expansion_rejects_clash() {
        let m = Model::standard(2);
        let m1 = expand_with_relation(&m, "R", 1, BTreeSet::new()).unwrap();
        assert!(expand_with_relation(&m1, "R", 1, BTreeSet::new()).is_err());
        assert!(m.require_min_size(2).is_ok());
        assert!(Model::standard(1).require_min_size(2).is_err());
    }
}
