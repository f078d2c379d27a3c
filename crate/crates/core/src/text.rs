//! Line-oriented text formats for algebras, relations, homomorphisms,
//! congruences, factorizations and entailment certificates.
//!
//! `#` starts a comment that runs to the end of the line. Blank lines and
//! indentation are ignored. A file may hold any number of blocks.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::affine::{AffineTerm, Term};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::congruence::Congruence;
use crate::entailment::{EntailmentCertificate, Node, Premise, Rule, TableOperation, TermSpec, Value};
use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::hom::Homomorphism;
use crate::relation::Relation;

/// A relation block before it is attached to an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationBlock {
    pub name: String,
    pub over: String,
    pub arity: usize,
    pub tuples: Vec<Vec<Elem>>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomBlock {
    pub name: String,
    pub from: String,
    pub power: usize,
    pub to: String,
    pub map: Vec<Elem>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceBlock {
    pub name: String,
    pub over: String,
    pub classes: Vec<Vec<Elem>>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationBlock {
    pub name: String,
    pub from: String,
    pub power: usize,
    pub to: String,
    pub g: HomBlock,
    pub terms: Vec<Vec<i64>>,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateBlock {
    pub over: String,
    pub certificate: EntailmentCertificate,
}

/// Everything found in one file, in order of appearance per kind.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub file: String,
    pub algebras: Vec<FiniteAlgebra>,
    pub relations: Vec<RelationBlock>,
    pub homs: Vec<HomBlock>,
    pub congruences: Vec<CongruenceBlock>,
    pub factorizations: Vec<FactorizationBlock>,
    pub certificates: Vec<CertificateBlock>,
}

impl Document {
    fn error(&self, line: usize, token: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.file.clone(),
            line,
            token: token.to_string(),
            message: message.into(),
        }
    }

    /// The single algebra of the file.
    pub fn algebra(&self) -> Result<&FiniteAlgebra> {
        match self.algebras.as_slice() {
            [a] => Ok(a),
            [] => Err(self.error(0, "", "no algebra block")),
            _ => Err(self.error(0, "", "more than one algebra block")),
        }
    }

    /// A relation block resolved against `algebra`.
    pub fn relation(&self, block: &RelationBlock, algebra: &FiniteAlgebra) -> Result<Relation> {
        Relation::new(block.arity, algebra.size(), block.tuples.clone())
            .map_err(|e| self.error(block.line, &block.name, e.to_string()))
    }

    pub fn all_relations(&self, algebra: &FiniteAlgebra) -> Result<Vec<Relation>> {
        self.relations.iter().map(|b| self.relation(b, algebra)).collect()
    }

    /// A hom block resolved against its domain base and codomain (verified exhaustively).
    pub fn hom(&self, block: &HomBlock, domain: &FiniteAlgebra, codomain: &FiniteAlgebra) -> Result<Homomorphism> {
        Homomorphism::new(domain, codomain, block.map.clone())
            .map_err(|e| self.error(block.line, &block.name, e.to_string()))
    }

    pub fn congruence(&self, block: &CongruenceBlock, algebra: &FiniteAlgebra) -> Result<Congruence> {
        let wrap = |e: Error| self.error(block.line, &block.name, e.to_string());
        let c = Congruence::from_blocks(algebra.size(), &block.classes).map_err(wrap)?;
        Congruence::new(algebra, c.labels().to_vec()).map_err(wrap)
    }
}

struct Cursor<'a> {
    file: &'a str,
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(file: &'a str, text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = l.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Cursor { file, lines, pos: 0 }
    }

    fn error(&self, line: usize, token: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.file.to_string(),
            line,
            token: token.to_string(),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.peek().map(|(_, t)| t[0])
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let l = self.lines.get(self.pos).cloned();
        self.pos += 1;
        l
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let end = self.last_line();
        self.next()
            .ok_or_else(|| self.error(end, "<eof>", format!("expected {what}")))
    }

    fn num<T: FromStr>(&self, line: usize, tok: &str, what: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.error(line, tok, format!("expected {what}")))
    }

    fn keyword(&self, line: usize, toks: &[&str], idx: usize, kw: &str) -> Result<()> {
        match toks.get(idx) {
            Some(&t) if t == kw => Ok(()),
            Some(&t) => Err(self.error(line, t, format!("expected `{kw}`"))),
            None => Err(self.error(line, toks.last().copied().unwrap_or(""), format!("expected `{kw}`"))),
        }
    }

    fn arg<'b>(&self, line: usize, toks: &'b [&'a str], idx: usize, what: &str) -> Result<&'a str> {
        toks.get(idx)
            .copied()
            .ok_or_else(|| self.error(line, toks.last().copied().unwrap_or(""), format!("missing {what}")))
    }

    fn arity(&self, line: usize, toks: &[&str], n: usize) -> Result<()> {
        if toks.len() != n {
            let tok = toks.get(n).or(toks.last()).copied().unwrap_or("");
            return Err(self.error(line, tok, format!("expected {n} fields on this line")));
        }
        Ok(())
    }

    /// Numbers from lines that consist of numbers only (optionally after a
    /// leading `prefix`), until `count` have been read.
    fn values(&mut self, count: usize, prefix: Option<&str>, what: &str) -> Result<Vec<Elem>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let (line, toks) = self.expect_line(what)?;
            let body = match prefix {
                Some(p) => {
                    self.keyword(line, &toks, 0, p)?;
                    &toks[1..]
                }
                None => &toks[..],
            };
            for tok in body {
                out.push(self.num(line, tok, "a table value")?);
            }
            if out.len() > count {
                return Err(self.error(line, body.last().copied().unwrap_or(""), format!("more than {count} values")));
            }
        }
        Ok(out)
    }
}

/// Parses every block in `text`; `file` is used in error messages.
pub fn parse_document(file: &str, text: &str) -> Result<Document> {
    let mut cur = Cursor::new(file, text);
    let mut doc = Document {
        file: file.to_string(),
        ..Document::default()
    };
    while let Some((line, toks)) = cur.next() {
        match toks[0] {
            "algebra" => doc.algebras.push(parse_algebra(&mut cur, line, &toks)?),
            "relation" => doc.relations.push(parse_relation(&mut cur, line, &toks)?),
            "hom" => doc.homs.push(parse_hom(&mut cur, line, &toks)?),
            "cong" => doc.congruences.push(parse_congruence(&mut cur, line, &toks)?),
            "factorization" => doc.factorizations.push(parse_factorization(&mut cur, line, &toks)?),
            "cert" => doc.certificates.push(parse_certificate(&mut cur, line, &toks)?),
            other => return Err(cur.error(line, other, "unknown block keyword")),
        }
    }
    Ok(doc)
}

fn parse_algebra(cur: &mut Cursor<'_>, line: usize, toks: &[&str]) -> Result<FiniteAlgebra> {
    cur.arity(line, toks, 2)?;
    let name = toks[1];
    let (sline, stoks) = cur.expect_line("`size N`")?;
    cur.keyword(sline, &stoks, 0, "size")?;
    cur.arity(sline, &stoks, 2)?;
    let size: usize = cur.num(sline, stoks[1], "a positive size")?;
    let mut ops = Vec::new();
    while cur.peek_keyword() == Some("op") {
        let (oline, otoks) = cur.next().expect("peeked");
        cur.arity(oline, &otoks, 3)?;
        let arity: usize = cur.num(oline, otoks[2], "an arity")?;
        let count = (size as u128)
            .checked_pow(arity as u32)
            .filter(|&c| c <= 1 << 26)
            .ok_or_else(|| cur.error(oline, otoks[2], "table too large"))? as usize;
        let values = cur.values(count, None, "table values")?;
        ops.push((otoks[1].to_string(), arity, values));
    }
    FiniteAlgebra::new(name, size, ops).map_err(|e| cur.error(line, name, e.to_string()))
}

fn parse_relation(cur: &mut Cursor<'_>, line: usize, toks: &[&str]) -> Result<RelationBlock> {
    cur.arity(line, toks, 5)?;
    cur.keyword(line, toks, 3, "over")?;
    let arity: usize = cur.num(line, toks[2], "a relation arity")?;
    if arity == 0 {
        return Err(cur.error(line, toks[2], "relation arity must be positive"));
    }
    let mut tuples = Vec::new();
    while cur.peek_keyword() == Some("t") {
        let (tline, ttoks) = cur.next().expect("peeked");
        if ttoks.len() != arity + 1 {
            return Err(cur.error(tline, ttoks.last().copied().unwrap_or("t"), format!("tuple needs {arity} entries")));
        }
        tuples.push(
            ttoks[1..]
                .iter()
                .map(|t| cur.num(tline, t, "a tuple entry"))
                .collect::<Result<_>>()?,
        );
    }
    Ok(RelationBlock {
        name: toks[1].to_string(),
        over: toks[4].to_string(),
        arity,
        tuples,
        line,
    })
}

fn parse_hom(cur: &mut Cursor<'_>, line: usize, toks: &[&str]) -> Result<HomBlock> {
    cur.arity(line, toks, 8)?;
    cur.keyword(line, toks, 2, "from")?;
    cur.keyword(line, toks, 4, "power")?;
    cur.keyword(line, toks, 6, "to")?;
    let power: usize = cur.num(line, toks[5], "a power")?;
    let mut map = Vec::new();
    while cur.peek_keyword() == Some("m") {
        let (mline, mtoks) = cur.next().expect("peeked");
        for t in &mtoks[1..] {
            map.push(cur.num(mline, t, "an image")?);
        }
    }
    Ok(HomBlock {
        name: toks[1].to_string(),
        from: toks[3].to_string(),
        power,
        to: toks[7].to_string(),
        map,
        line,
    })
}

fn parse_congruence(cur: &mut Cursor<'_>, line: usize, toks: &[&str]) -> Result<CongruenceBlock> {
    cur.arity(line, toks, 4)?;
    cur.keyword(line, toks, 2, "over")?;
    let mut classes = Vec::new();
    while cur.peek_keyword() == Some("class") {
        let (cline, ctoks) = cur.next().expect("peeked");
        classes.push(
            ctoks[1..]
                .iter()
                .map(|t| cur.num(cline, t, "an element"))
                .collect::<Result<_>>()?,
        );
    }
    Ok(CongruenceBlock {
        name: toks[1].to_string(),
        over: toks[3].to_string(),
        classes,
        line,
    })
}

fn int_row(cur: &Cursor<'_>, line: usize, toks: &[&str]) -> Result<Vec<i64>> {
    toks.iter().map(|t| cur.num(line, t, "an integer")).collect()
}

fn parse_factorization(cur: &mut Cursor<'_>, line: usize, toks: &[&str]) -> Result<FactorizationBlock> {
    cur.arity(line, toks, 8)?;
    cur.keyword(line, toks, 2, "from")?;
    cur.keyword(line, toks, 4, "power")?;
    cur.keyword(line, toks, 6, "to")?;
    let power: usize = cur.num(line, toks[5], "a power")?;
    let (hline, htoks) = cur.expect_line("the g hom block")?;
    cur.keyword(hline, &htoks, 0, "hom")?;
    let g = parse_hom(cur, hline, &htoks)?;
    let mut terms = Vec::new();
    while cur.peek_keyword() == Some("term") {
        let (tl, tt) = cur.next().expect("peeked");
        terms.push(int_row(cur, tl, &tt[1..])?);
    }
    let (ml, mt) = cur.expect_line("`matrix`")?;
    cur.keyword(ml, &mt, 0, "matrix")?;
    let mut matrix = Vec::new();
    while cur.peek_keyword() == Some("row") {
        let (rl, rt) = cur.next().expect("peeked");
        matrix.push(int_row(cur, rl, &rt[1..])?);
    }
    let (el, et) = cur.expect_line("`end`")?;
    cur.keyword(el, &et, 0, "end")?;
    Ok(FactorizationBlock {
        name: toks[1].to_string(),
        from: toks[3].to_string(),
        power,
        to: toks[7].to_string(),
        g,
        terms,
        matrix,
    })
}

fn parse_value(cur: &mut Cursor<'_>, line: usize, kind: &str, arity_tok: &str, base: usize) -> Result<Value> {
    let arity: usize = cur.num(line, arity_tok, "an arity")?;
    match kind {
        "relation" => {
            let block = parse_relation_body(cur, arity)?;
            Relation::new(arity, base, block)
                .map(Value::Relation)
                .map_err(|e| cur.error(line, kind, e.to_string()))
        }
        "op" => {
            let count = (base as u128)
                .checked_pow(arity as u32)
                .filter(|&c| c <= 1 << 26)
                .ok_or_else(|| cur.error(line, arity_tok, "table too large"))? as usize;
            let table = cur.values(count, Some("v"), "operation values")?;
            TableOperation::new(base, arity, table)
                .map(Value::Operation)
                .map_err(|e| cur.error(line, kind, e.to_string()))
        }
        other => Err(cur.error(line, other, "expected `relation` or `op`")),
    }
}

fn parse_relation_body(cur: &mut Cursor<'_>, arity: usize) -> Result<Vec<Vec<Elem>>> {
    let mut tuples = Vec::new();
    while cur.peek_keyword() == Some("t") {
        let (tl, tt) = cur.next().expect("peeked");
        if tt.len() != arity + 1 {
            return Err(cur.error(tl, tt.last().copied().unwrap_or("t"), format!("tuple needs {arity} entries")));
        }
        tuples.push(tt[1..].iter().map(|t| cur.num(tl, t, "a tuple entry")).collect::<Result<_>>()?);
    }
    Ok(tuples)
}

fn parse_node(cur: &mut Cursor<'_>) -> Result<Node> {
    let (line, toks) = cur.expect_line("a derivation node")?;
    match toks[0] {
        "premise" => {
            cur.arity(line, &toks, 2)?;
            Ok(Node::Premise(toks[1].to_string()))
        }
        "intersect" => {
            cur.arity(line, &toks, 3)?;
            let arity = cur.num(line, toks[1], "an arity")?;
            let count: usize = cur.num(line, toks[2], "a child count")?;
            let inputs = (0..count).map(|_| parse_node(cur)).collect::<Result<_>>()?;
            Ok(Node::Apply {
                rule: Rule::Intersection { arity },
                inputs,
            })
        }
        "preimage" => {
            cur.arity(line, &toks, 6)?;
            cur.keyword(line, &toks, 2, "terms")?;
            cur.keyword(line, &toks, 4, "ops")?;
            let arity = cur.num(line, toks[1], "an arity")?;
            let k: usize = cur.num(line, toks[3], "a term count")?;
            let m: usize = cur.num(line, toks[5], "an operation count")?;
            let mut inputs = vec![parse_node(cur)?];
            let mut terms = Vec::with_capacity(k);
            for _ in 0..k {
                let (tl, tt) = cur.expect_line("a `term` line")?;
                cur.keyword(tl, &tt, 0, "term")?;
                let kind = cur.arg(tl, &tt, 1, "term kind")?;
                terms.push(match kind {
                    "affine" => {
                        let coeffs = int_row(cur, tl, &tt[2..])?;
                        TermSpec::Affine(AffineTerm::new(coeffs).map_err(|e| cur.error(tl, kind, e.to_string()))?)
                    }
                    "tree" => {
                        let src = tt[2..].join("");
                        TermSpec::Tree(Term::parse(&src).map_err(|e| cur.error(tl, &src, e.to_string()))?)
                    }
                    other => return Err(cur.error(tl, other, "expected `affine` or `tree`")),
                });
            }
            for _ in 0..m {
                inputs.push(parse_node(cur)?);
            }
            Ok(Node::Apply {
                rule: Rule::TermPreimage { arity, terms },
                inputs,
            })
        }
        "strip" | "graph-to-op" => {
            cur.arity(line, &toks, 1)?;
            let rule = if toks[0] == "strip" {
                Rule::StripLast
            } else {
                Rule::GraphToOperation
            };
            Ok(Node::Apply {
                rule,
                inputs: vec![parse_node(cur)?],
            })
        }
        other => Err(cur.error(line, other, "unknown derivation node")),
    }
}

fn parse_certificate(cur: &mut Cursor<'_>, line: usize, toks: &[&str]) -> Result<CertificateBlock> {
    cur.arity(line, toks, 6)?;
    cur.keyword(line, toks, 2, "over")?;
    cur.keyword(line, toks, 4, "size")?;
    let base: usize = cur.num(line, toks[5], "a universe size")?;
    let mut premises = Vec::new();
    while cur.peek_keyword() == Some("premise") {
        let (pl, pt) = cur.next().expect("peeked");
        cur.arity(pl, &pt, 4)?;
        let value = parse_value(cur, pl, pt[2], pt[3], base)?;
        premises.push(Premise {
            name: pt[1].to_string(),
            value,
        });
    }
    let (cl, ct) = cur.expect_line("`conclusion`")?;
    cur.keyword(cl, &ct, 0, "conclusion")?;
    cur.arity(cl, &ct, 3)?;
    let conclusion = parse_value(cur, cl, ct[1], ct[2], base)?;
    let (dl, dt) = cur.expect_line("`derivation`")?;
    cur.keyword(dl, &dt, 0, "derivation")?;
    let derivation = parse_node(cur)?;
    let (el, et) = cur.expect_line("`end`")?;
    cur.keyword(el, &et, 0, "end")?;
    Ok(CertificateBlock {
        over: toks[3].to_string(),
        certificate: EntailmentCertificate {
            name: toks[1].to_string(),
            base_size: base,
            premises,
            conclusion,
            derivation,
        },
    })
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Values per line when writing long tables.
const VALUES_PER_LINE: usize = 32;

pub fn write_algebra(a: &FiniteAlgebra) -> Result<String> {
    let mut s = format!("algebra {}\nsize {}\n", a.name(), a.size());
    for (i, op) in a.ops().iter().enumerate() {
        writeln!(s, "op {} {}", op.name(), op.arity()).expect("string write");
        let table = a.table(i, crate::budget::Budget(1 << 26))?;
        for chunk in table.chunks(VALUES_PER_LINE) {
            writeln!(s, "{}", join(chunk)).expect("string write");
        }
    }
    Ok(s)
}

pub fn write_relation(name: &str, over: &str, r: &Relation) -> String {
    let mut s = format!("relation {name} {} over {over}\n", r.arity());
    for t in r.tuples() {
        writeln!(s, "t {}", join(t)).expect("string write");
    }
    s
}

pub fn write_hom(name: &str, from: &str, power: usize, to: &str, map: &[Elem]) -> String {
    let mut s = format!("hom {name} from {from} power {power} to {to}\n");
    for chunk in map.chunks(VALUES_PER_LINE) {
        writeln!(s, "m {}", join(chunk)).expect("string write");
    }
    s
}

pub fn write_congruence(name: &str, over: &str, c: &Congruence) -> String {
    let mut s = format!("cong {name} over {over}\n");
    for class in c.classes() {
        writeln!(s, "class {}", join(&class)).expect("string write");
    }
    s
}

/// A `term` line per `p_j` and a `row` per generator of the coefficient matrix.
pub fn write_factorization(name: &str, from: &str, to: &str, f: &Factorization) -> String {
    let mut s = format!("factorization {name} from {from} power {} to {to}\n", f.n);
    s.push_str(&write_hom("g", from, f.generator_count() + 1, to, f.g.map()));
    for p in &f.terms {
        writeln!(s, "term {}", join(p.coeffs())).expect("string write");
    }
    s.push_str("matrix\n");
    for row in &f.coefficient_matrix {
        writeln!(s, "row {}", join(row)).expect("string write");
    }
    s.push_str("end\n");
    s
}

fn write_value(s: &mut String, head: &str, v: &Value, indent: &str) {
    match v {
        Value::Relation(r) => {
            writeln!(s, "{head} relation {}", r.arity()).expect("string write");
            for t in r.tuples() {
                writeln!(s, "{indent}t {}", join(t)).expect("string write");
            }
        }
        Value::Operation(o) => {
            writeln!(s, "{head} op {}", o.arity()).expect("string write");
            for chunk in o.table().chunks(VALUES_PER_LINE) {
                writeln!(s, "{indent}v {}", join(chunk)).expect("string write");
            }
        }
    }
}

fn write_node(s: &mut String, node: &Node, depth: usize) {
    let pad = "  ".repeat(depth);
    match node {
        Node::Premise(n) => writeln!(s, "{pad}premise {n}").expect("string write"),
        Node::Apply { rule, inputs } => match rule {
            Rule::Intersection { arity } => {
                writeln!(s, "{pad}intersect {arity} {}", inputs.len()).expect("string write");
                inputs.iter().for_each(|i| write_node(s, i, depth + 1));
            }
            Rule::TermPreimage { arity, terms } => {
                writeln!(s, "{pad}preimage {arity} terms {} ops {}", terms.len(), inputs.len() - 1)
                    .expect("string write");
                write_node(s, &inputs[0], depth + 1);
                for t in terms {
                    writeln!(s, "{pad}  term {t}").expect("string write");
                }
                inputs[1..].iter().for_each(|i| write_node(s, i, depth + 1));
            }
            Rule::StripLast | Rule::GraphToOperation => {
                let kw = if *rule == Rule::StripLast { "strip" } else { "graph-to-op" };
                writeln!(s, "{pad}{kw}").expect("string write");
                write_node(s, &inputs[0], depth + 1);
            }
        },
    }
}

pub fn write_certificate(over: &str, cert: &EntailmentCertificate) -> String {
    let mut s = format!("cert {} over {over} size {}\n", cert.name, cert.base_size);
    for p in &cert.premises {
        write_value(&mut s, &format!("premise {}", p.name), &p.value, "  ");
    }
    write_value(&mut s, "conclusion", &cert.conclusion, "  ");
    s.push_str("derivation\n");
    write_node(&mut s, &cert.derivation, 1);
    s.push_str("end\n");
    s
}
