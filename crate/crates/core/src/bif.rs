//! BIF 0.15 reading and writing for fitted classifiers.
//!
//! Supported subset: one `network` block whose properties name the class
//! variable and classifier kind, discrete `variable` blocks, and
//! `probability` blocks holding either a `table` line (no parents) or one
//! `(config) p1, ..., pk;` line per parent configuration, optionally with a
//! `default` line covering configurations not listed. Tables too large to
//! store densely are written as their listed rows plus a `default` line.
//! Labels that are not plain words are double-quoted.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeOrdering};
use crate::learners::{ClassifierKind, LearnedStructure};
use crate::model::{BayesNet, Cpt, Variable};

const ROW_TOLERANCE: f64 = 1e-6;

fn is_plain(word: &str) -> bool {
    !word.is_empty()
        && word
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'))
        && !matches!(word, "network" | "variable" | "probability" | "property" | "type" | "discrete" | "table" | "default")
}

fn quote(word: &str) -> String {
    if is_plain(word) {
        word.to_string()
    } else {
        let mut out = String::with_capacity(word.len() + 2);
        out.push('"');
        for c in word.chars() {
            if c == '"' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('"');
        out
    }
}

fn join_probs(row: &[f64]) -> String {
    row.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(", ")
}

/// Renders `bn` as BIF text. Variables appear in structure-ordering rank;
/// output is deterministic.
pub fn export_bif(bn: &BayesNet) -> String {
    let mut out = String::new();
    let class = bn.class();
    let _ = writeln!(out, "network {} {{", quote(bn.name()));
    let _ = writeln!(out, "  property class = {};", quote(&bn.variable(class).name));
    let _ = writeln!(out, "  property classifier = {};", bn.kind());
    let _ = writeln!(out, "}}");

    let order = bn.dag().nodes().to_vec();
    for &v in &order {
        let var = bn.variable(v);
        let values: Vec<String> = var.values.iter().map(|l| quote(l)).collect();
        let _ = writeln!(out, "variable {} {{", quote(&var.name));
        let _ = writeln!(out, "  type discrete [ {} ] {{ {} }};", var.cardinality(), values.join(", "));
        let _ = writeln!(out, "}}");
    }
    for &v in &order {
        let cpt = bn.cpt(v);
        let name = quote(&bn.variable(v).name);
        if cpt.parents.is_empty() {
            let _ = writeln!(out, "probability ( {name} ) {{");
            let _ = writeln!(out, "  table {};", join_probs(cpt.row(0)));
        } else {
            let parents: Vec<String> = cpt.parents.iter().map(|&p| quote(&bn.variable(p).name)).collect();
            let _ = writeln!(out, "probability ( {name} | {} ) {{", parents.join(", "));
            let config_label = |r: usize| -> String {
                cpt.config_values(r)
                    .iter()
                    .zip(&cpt.parents)
                    .map(|(&x, &p)| quote(&bn.variable(p).values[x]))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            match cpt.sparse_rows() {
                None => {
                    for r in 0..cpt.n_rows() {
                        let _ = writeln!(out, "  ({}) {};", config_label(r), join_probs(cpt.row(r)));
                    }
                }
                Some((listed, default)) => {
                    for (&r, row) in listed {
                        let _ = writeln!(out, "  ({}) {};", config_label(r), join_probs(row));
                    }
                    let _ = writeln!(out, "  default {};", join_probs(default));
                }
            }
        }
        let _ = writeln!(out, "}}");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Punct(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    last_line: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut line = 1;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                i += 2;
                while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                    line += (chars[i] == '\n') as usize;
                    i += 1;
                }
                i += 2;
            }
            '{' | '}' | '(' | ')' | '[' | ']' | ',' | ';' | '|' | '=' => {
                toks.push((Tok::Punct(c), line));
                i += 1;
            }
            '"' => {
                let start = line;
                let mut word = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(Error::Bif { line: start, message: "unterminated quoted label".into() }),
                        Some('"') => break,
                        Some('\\') if i + 1 < chars.len() => {
                            word.push(chars[i + 1]);
                            i += 2;
                        }
                        Some(&ch) => {
                            line += (ch == '\n') as usize;
                            word.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                toks.push((Tok::Quoted(word), start));
            }
            _ => {
                let mut word = String::new();
                while i < chars.len() && !chars[i].is_whitespace() && !"{}()[],;|=\"".contains(chars[i]) {
                    word.push(chars[i]);
                    i += 1;
                }
                toks.push((Tok::Word(word), line));
            }
        }
    }
    Ok(Lexer { toks, pos: 0, last_line: line })
}

impl Lexer {
    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.1)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Bif {
            line: self.line(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Result<Tok> {
        match self.toks.get(self.pos) {
            Some((t, _)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.fail("unexpected end of input"),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.next()? {
            Tok::Punct(p) if p == c => Ok(()),
            other => {
                self.pos -= 1;
                self.fail(format!("expected `{c}`, found {}", describe(&other)))
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.next()? {
            Tok::Word(w) if w == kw => Ok(()),
            other => {
                self.pos -= 1;
                self.fail(format!("expected `{kw}`, found {}", describe(&other)))
            }
        }
    }

    fn label(&mut self) -> Result<String> {
        match self.next()? {
            Tok::Word(w) | Tok::Quoted(w) => Ok(w),
            other => {
                self.pos -= 1;
                self.fail(format!("expected a name, found {}", describe(&other)))
            }
        }
    }

    fn number(&mut self) -> Result<f64> {
        match self.next()? {
            Tok::Word(w) => match w.parse::<f64>() {
                Ok(x) => Ok(x),
                Err(_) => {
                    self.pos -= 1;
                    self.fail(format!("expected a probability, found `{w}`"))
                }
            },
            other => {
                self.pos -= 1;
                self.fail(format!("expected a probability, found {}", describe(&other)))
            }
        }
    }

    /// Comma-separated labels up to (not including) `close`.
    fn labels_until(&mut self, close: char) -> Result<Vec<String>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.label()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }

    fn numbers_until_semicolon(&mut self) -> Result<Vec<f64>> {
        let mut out = vec![self.number()?];
        while !self.eat(';') {
            self.punct(',')?;
            out.push(self.number()?);
        }
        Ok(out)
    }

    /// `property ... ;` with the leading keyword already consumed; returns
    /// the `key = value` pair when it has that shape.
    fn property(&mut self) -> Result<Option<(String, String)>> {
        let mut words = Vec::new();
        loop {
            match self.next()? {
                Tok::Punct(';') => break,
                Tok::Punct('=') => words.push("=".to_string()),
                Tok::Word(w) | Tok::Quoted(w) => words.push(w),
                Tok::Punct(_) => words.push(String::new()),
            }
        }
        Ok(match words.as_slice() {
            [k, eq, v] if eq == "=" => Some((k.clone(), v.clone())),
            _ => None,
        })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Quoted(w) => format!("\"{w}\""),
        Tok::Punct(c) => format!("`{c}`"),
    }
}

struct RawProbability {
    line: usize,
    child: usize,
    parents: Vec<usize>,
    listed: BTreeMap<usize, Vec<f64>>,
    default: Vec<f64>,
}

/// Reads BIF text into a network. Variables get local ids in declaration
/// order.
pub fn parse_bif(text: &str) -> Result<BayesNet> {
    let mut lx = lex(text)?;
    let mut name = None;
    let mut class_name = None;
    let mut kind = None;
    let mut variables: Vec<Variable> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut blocks: Vec<RawProbability> = Vec::new();

    while lx.peek().is_some() {
        let block_line = lx.line();
        match lx.next()? {
            Tok::Word(w) if w == "network" => {
                if name.is_some() {
                    lx.pos -= 1;
                    return lx.fail("second network block");
                }
                name = Some(lx.label()?);
                lx.punct('{')?;
                while !lx.eat('}') {
                    lx.keyword("property")?;
                    let line = lx.line();
                    match lx.property()? {
                        Some((k, v)) if k == "class" => class_name = Some(v),
                        Some((k, v)) if k == "classifier" => {
                            kind = Some(v.parse::<ClassifierKind>().map_err(|e| Error::Bif { line, message: e.to_string() })?)
                        }
                        _ => {}
                    }
                }
            }
            Tok::Word(w) if w == "variable" => {
                let var = lx.label()?;
                if index.contains_key(&var) {
                    return Err(Error::Bif { line: block_line, message: format!("variable `{var}` declared twice") });
                }
                lx.punct('{')?;
                let mut values = None;
                while !lx.eat('}') {
                    match lx.label()?.as_str() {
                        "type" => {
                            lx.keyword("discrete")?;
                            lx.punct('[')?;
                            let k = lx.number()?;
                            lx.punct(']')?;
                            lx.punct('{')?;
                            let vals = lx.labels_until('}')?;
                            lx.punct(';')?;
                            if vals.len() as f64 != k || vals.is_empty() {
                                return Err(Error::Bif {
                                    line: block_line,
                                    message: format!("variable `{var}` declares {k} values but lists {}", vals.len()),
                                });
                            }
                            values = Some(vals);
                        }
                        "property" => {
                            lx.property()?;
                        }
                        other => return lx.fail(format!("unexpected `{other}` in variable `{var}`")),
                    }
                }
                let Some(values) = values else {
                    return Err(Error::Bif { line: block_line, message: format!("variable `{var}` has no type") });
                };
                index.insert(var.clone(), variables.len());
                variables.push(Variable::new(var, values));
            }
            Tok::Word(w) if w == "probability" => blocks.push(probability_block(&mut lx, block_line, &variables, &index)?),
            other => {
                lx.pos -= 1;
                return lx.fail(format!("expected a block, found {}", describe(&other)));
            }
        }
    }

    let name = name.ok_or(Error::Bif { line: 1, message: "missing network block".into() })?;
    let class_name = class_name.ok_or(Error::Bif { line: 1, message: "network does not name its class variable".into() })?;
    let class = *index.get(&class_name).ok_or_else(|| Error::Bif {
        line: 1,
        message: format!("class variable `{class_name}` is not declared"),
    })?;

    let n = variables.len();
    let mut tables: Vec<Option<RawProbability>> = (0..n).map(|_| None).collect();
    for block in blocks {
        let child = block.child;
        if tables[child].is_some() {
            return Err(Error::Bif { line: block.line, message: format!("second probability block for `{}`", variables[child].name) });
        }
        tables[child] = Some(block);
    }
    let mut cpts = Vec::with_capacity(n);
    let mut parent_lists = Vec::with_capacity(n);
    for (v, block) in tables.into_iter().enumerate() {
        let block = block.ok_or_else(|| Error::Bif {
            line: lx.last_line,
            message: format!("no probability block for `{}`", variables[v].name),
        })?;
        let cards = block.parents.iter().map(|&p| variables[p].cardinality()).collect();
        parent_lists.push(block.parents.clone());
        cpts.push(Cpt::from_rows(v, variables[v].cardinality(), block.parents, cards, block.listed, block.default)?);
    }

    let ordering = topological(&parent_lists).ok_or(Error::Bif { line: 1, message: "network has a cycle".into() })?;
    let mut dag = Dag::empty(NodeOrdering::new(ordering)?);
    for (c, parents) in parent_lists.iter().enumerate() {
        for &p in parents {
            dag.add_arc(p, c).map_err(|e| Error::Bif { line: 1, message: e.to_string() })?;
        }
    }
    let kind = kind.unwrap_or_else(|| infer_kind(&dag, class));
    let structure = LearnedStructure {
        kind,
        class,
        dag,
        retained_features: (0..n).filter(|&v| v != class).collect(),
    };
    BayesNet::new(name, variables, structure, cpts)
}

fn probability_block(lx: &mut Lexer, line: usize, variables: &[Variable], index: &HashMap<String, usize>) -> Result<RawProbability> {
    let lookup = |lx: &Lexer, name: &str| -> Result<usize> {
        match index.get(name) {
            Some(&v) => Ok(v),
            None => lx.fail(format!("variable `{name}` is not declared")),
        }
    };
    lx.punct('(')?;
    let child_name = lx.label()?;
    let child = lookup(lx, &child_name)?;
    let mut parents = Vec::new();
    if lx.eat('|') {
        for p in lx.labels_until(')')? {
            parents.push(lookup(lx, &p)?);
        }
    } else {
        lx.punct(')')?;
    }
    let card = variables[child].cardinality();
    let cards: Vec<usize> = parents.iter().map(|&p| variables[p].cardinality()).collect();
    let Some(rows) = cards.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k)) else {
        return Err(Error::Bif { line, message: format!("`{child_name}` has too many parent configurations") });
    };
    let mut listed: BTreeMap<usize, (Vec<f64>, usize)> = BTreeMap::new();
    let mut default: Option<(Vec<f64>, usize)> = None;
    lx.punct('{')?;
    while !lx.eat('}') {
        let row_line = lx.line();
        match lx.next()? {
            Tok::Word(w) if w == "table" => {
                let values = lx.numbers_until_semicolon()?;
                if Some(values.len()) != rows.checked_mul(card) {
                    return Err(Error::Bif {
                        line: row_line,
                        message: format!("table for `{child_name}` needs {} entries, found {}", rows.saturating_mul(card), values.len()),
                    });
                }
                for (r, chunk) in values.chunks(card).enumerate() {
                    listed.insert(r, (chunk.to_vec(), row_line));
                }
            }
            Tok::Word(w) if w == "default" => default = Some((lx.numbers_until_semicolon()?, row_line)),
            Tok::Word(w) if w == "property" => {
                lx.property()?;
            }
            Tok::Punct('(') => {
                let config = lx.labels_until(')')?;
                if config.len() != parents.len() {
                    return Err(Error::Bif { line: row_line, message: format!("configuration for `{child_name}` has {} values, expected {}", config.len(), parents.len()) });
                }
                let mut r = 0;
                for ((label, &p), &k) in config.iter().zip(&parents).zip(&cards) {
                    let Some(x) = variables[p].values.iter().position(|l| l == label) else {
                        return Err(Error::Bif { line: row_line, message: format!("`{label}` is not a value of `{}`", variables[p].name) });
                    };
                    r = r * k + x;
                }
                listed.insert(r, (lx.numbers_until_semicolon()?, row_line));
            }
            other => {
                lx.pos -= 1;
                return lx.fail(format!("unexpected {} in probability block for `{child_name}`", describe(&other)));
            }
        }
    }

    let check = |row: &[f64], row_line: usize| -> Result<()> {
        if row.len() != card {
            return Err(Error::Bif { line: row_line, message: format!("row for `{child_name}` has {} entries, expected {card}", row.len()) });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE || row.iter().any(|&p| p < 0.0) {
            return Err(Error::Bif {
                line: row_line,
                message: format!("row for `{child_name}` is not a distribution (sums to {sum})"),
            });
        }
        Ok(())
    };
    for (row, row_line) in listed.values() {
        check(row, *row_line)?;
    }
    let default = match default {
        Some((row, row_line)) => {
            check(&row, row_line)?;
            row
        }
        None if listed.len() == rows => vec![1.0 / card as f64; card],
        None => return Err(Error::Bif { line, message: format!("probability block for `{child_name}` is missing a row") }),
    };
    let listed = listed.into_iter().map(|(r, (row, _))| (r, row)).collect();
    Ok(RawProbability { line, child, parents, listed, default })
}

/// Kahn order taking the lowest ready id, so a declaration order that is
/// already topological is kept.
fn topological(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut remaining: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready = |v: usize| !done[v] && remaining[v] == 0;
        let next = (0..n).find(|&v| ready(v))?;
        done[next] = true;
        order.push(next);
        for &c in &children[next] {
            remaining[c] -= 1;
        }
    }
    Some(order)
}

fn infer_kind(dag: &Dag, class: usize) -> ClassifierKind {
    let features: Vec<usize> = dag.nodes().iter().copied().filter(|&v| v != class).collect();
    if !features.iter().all(|&f| dag.parents(f).contains(&class)) {
        return ClassifierKind::Gbn;
    }
    let most = features.iter().map(|&f| dag.parents(f).len() - 1).max().unwrap_or(0);
    match most {
        0 => ClassifierKind::NaiveBayes,
        1 => ClassifierKind::Tan,
        _ => ClassifierKind::Ban,
    }
}
