//! Line-oriented text format for source instances, set problem instances and
//! solutions. Element, set and variable ids are 1-based in text.
//!
//! ```text
//! problem sp
//! ground 3
//! label 1 a
//! set 1 5 : 1 2
//! set 2 4 : 2 3
//! bound mC 2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::engine::{Cost, Sense};
use crate::error::{Error, Result};
use crate::set_problems::{
    default_labels, CcInstance, ElementSet, HsInstance, IpInstance, SbInstance, ScInstance,
    SeparationMode, SetProblemInstance, Solution, SpInstance, SspInstance, TsInstance,
    W3dmInstance, WeightedCollection, X3cInstance,
};
use crate::source_problems::{
    Assignment, Color, Constraint, ConstraintBody, McaInstance, Semantics,
};

/// Anything the format can hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Source(McaInstance),
    Target(SetProblemInstance),
}

/// A parsed file: the instance plus its free-form `meta` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedFile {
    pub document: Document,
    pub meta: BTreeMap<String, String>,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn keyword(&self) -> &'a str {
        self.tokens[0].text
    }

    fn err(&self, index: usize, message: impl Into<String>) -> Error {
        let column = self
            .tokens
            .get(index)
            .map(|t| t.column)
            .unwrap_or_else(|| self.tokens.last().map_or(1, |t| t.column + t.text.len()));
        Error::parse(self.number, column, message)
    }

    fn get(&self, index: usize, what: &str) -> Result<&'a str> {
        self.tokens
            .get(index)
            .map(|t| t.text)
            .ok_or_else(|| self.err(index, format!("missing {what}")))
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.tokens.len() != n {
            return Err(self.err(
                n.min(self.tokens.len()),
                format!(
                    "'{}' takes {} values, got {}",
                    self.keyword(),
                    n - 1,
                    self.tokens.len() - 1
                ),
            ));
        }
        Ok(())
    }

    fn usize_at(&self, index: usize, what: &str) -> Result<usize> {
        let t = self.get(index, what)?;
        t.parse()
            .map_err(|_| self.err(index, format!("expected {what}, found '{t}'")))
    }

    /// 1-based id in `1..=limit`, returned 0-based.
    fn id_at(&self, index: usize, limit: usize, what: &str) -> Result<usize> {
        let v = self.usize_at(index, what)?;
        if v == 0 || v > limit {
            return Err(self.err(index, format!("{what} {v} outside 1..={limit}")));
        }
        Ok(v - 1)
    }

    fn weight_at(&self, index: usize) -> Result<Cost> {
        let t = self.get(index, "weight")?;
        let w: Cost = t
            .parse()
            .map_err(|_| self.err(index, format!("expected an integer weight, found '{t}'")))?;
        if w.is_negative() {
            return Err(self.err(index, format!("negative weight {w}")));
        }
        Ok(w)
    }

    /// Position of the `:` separator.
    fn colon(&self) -> Result<usize> {
        self.tokens
            .iter()
            .position(|t| t.text == ":")
            .ok_or_else(|| self.err(self.tokens.len(), "missing ':'"))
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in content.char_indices().chain([(content.len(), ' ')]) {
                if ch.is_whitespace() {
                    if let Some(s) = start.take() {
                        tokens.push(Token {
                            text: &content[s..pos],
                            column: s + 1,
                        });
                    }
                } else if start.is_none() {
                    start = Some(pos);
                }
            }
            (!tokens.is_empty()).then_some(Line {
                number: i + 1,
                tokens,
            })
        })
        .collect()
}

pub fn parse_file(text: &str) -> Result<ParsedFile> {
    let all = lines(text);
    let mut meta = BTreeMap::new();
    let mut body = Vec::with_capacity(all.len());
    for line in all {
        if line.keyword() == "meta" {
            let key = line.get(1, "meta key")?.to_string();
            let value = line.tokens[2..]
                .iter()
                .map(|t| t.text)
                .collect::<Vec<_>>()
                .join(" ");
            meta.insert(key, value);
        } else {
            body.push(line);
        }
    }
    let Some(head) = body.first() else {
        return Err(Error::parse(1, 1, "empty input"));
    };
    if head.keyword() != "problem" {
        return Err(head.err(0, "expected 'problem <tag>' first"));
    }
    head.arity(2)?;
    let tag = head.tokens[1].text;
    let document = match tag {
        "mca" | "minca" | "posnae" | "cnf" => Document::Source(parse_source(tag, &body[1..])?),
        "w3dm" | "x3c" | "sp" | "ssp" | "sc" | "ts" | "sb" | "hs" | "ip" | "cc" => {
            Document::Target(parse_target(tag, &body[1..])?)
        }
        _ => return Err(head.err(1, format!("unknown problem tag '{tag}'"))),
    };
    Ok(ParsedFile { document, meta })
}

pub fn parse_instance(text: &str) -> Result<SetProblemInstance> {
    match parse_file(text)?.document {
        Document::Target(t) => Ok(t),
        Document::Source(_) => Err(Error::parse(
            1,
            9,
            "expected a set problem, found a source problem",
        )),
    }
}

pub fn parse_source_instance(text: &str) -> Result<McaInstance> {
    match parse_file(text)?.document {
        Document::Source(s) => Ok(s),
        Document::Target(_) => Err(Error::parse(
            1,
            9,
            "expected a source problem, found a set problem",
        )),
    }
}

fn parse_source(tag: &str, body: &[Line<'_>]) -> Result<McaInstance> {
    let (semantics, sense) = match tag {
        "mca" => (Semantics::Table, Sense::Maximize),
        "minca" => (Semantics::Table, Sense::Minimize),
        "posnae" => (Semantics::Nae, Sense::Maximize),
        _ => (Semantics::CnfDisjunction, Sense::Maximize),
    };
    let mut num_vars = None;
    let mut domain = if semantics == Semantics::Table {
        None
    } else {
        Some(2)
    };
    let mut colors: BTreeMap<usize, Color> = BTreeMap::new();
    let mut order = None;
    let mut occurrence = None;
    let mut max_len = None;
    let mut constraints = Vec::new();
    for line in body {
        let need_vars =
            |line: &Line<'_>| num_vars.ok_or_else(|| line.err(0, "'vars' must come first"));
        match line.keyword() {
            "vars" => {
                line.arity(2)?;
                num_vars = Some(line.usize_at(1, "variable count")?);
            }
            "domain" => {
                line.arity(2)?;
                domain = Some(line.usize_at(1, "domain size")?);
            }
            "color" => {
                line.arity(3)?;
                let x = line.id_at(1, need_vars(line)?, "variable")?;
                let c = Color::from_name(line.tokens[2].text)
                    .ok_or_else(|| line.err(2, "expected blue, red or white"))?;
                colors.insert(x, c);
            }
            "order" => {
                let n = need_vars(line)?;
                line.arity(n + 1)?;
                order = Some(
                    (1..=n)
                        .map(|i| line.usize_at(i, "position"))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            "occurrence" => {
                line.arity(2)?;
                occurrence = Some(line.usize_at(1, "occurrence bound")?);
            }
            "maxlen" => {
                line.arity(2)?;
                max_len = Some(line.usize_at(1, "clause length")?);
            }
            "table" if semantics == Semantics::Table => {
                let n = need_vars(line)?;
                let colon = line.colon()?;
                let scope = (1..colon)
                    .map(|i| line.id_at(i, n, "variable"))
                    .collect::<Result<Vec<_>>>()?;
                let table = ((colon + 1)..line.tokens.len())
                    .map(|i| line.weight_at(i))
                    .collect::<Result<Vec<_>>>()?;
                constraints.push(Constraint::table(scope, table));
            }
            "nae" if semantics == Semantics::Nae => {
                let n = need_vars(line)?;
                line.arity(4)?;
                let x = line.id_at(1, n, "variable")?;
                let y = line.id_at(2, n, "variable")?;
                constraints.push(Constraint::nae(x, y, line.weight_at(3)?));
            }
            "clause" if semantics == Semantics::CnfDisjunction => {
                let n = need_vars(line)?;
                let colon = line.colon()?;
                if colon != 2 {
                    return Err(line.err(colon, "expected 'clause <weight> : literals'"));
                }
                let weight = line.weight_at(1)?;
                let mut literals = Vec::new();
                for i in 3..line.tokens.len() {
                    let t = line.tokens[i].text;
                    let (neg, digits) = match t.strip_prefix('-') {
                        Some(rest) => (true, rest),
                        None => (false, t),
                    };
                    let v: usize = digits
                        .parse()
                        .map_err(|_| line.err(i, format!("expected a literal, found '{t}'")))?;
                    if v == 0 || v > n {
                        return Err(line.err(i, format!("variable {v} outside 1..={n}")));
                    }
                    literals.push((v - 1, neg));
                }
                constraints.push(Constraint::clause(&literals, weight));
            }
            other => return Err(line.err(0, format!("unexpected '{other}' in a {tag} instance"))),
        }
    }
    let last = body.last().map_or(1, |l| l.number);
    let num_vars = num_vars.ok_or_else(|| Error::parse(last, 1, "missing 'vars'"))?;
    let domain = domain.ok_or_else(|| Error::parse(last, 1, "missing 'domain'"))?;
    let mut inst = McaInstance::new(num_vars, domain, semantics, sense, constraints)?;
    if let Some(order) = order {
        inst.order = order;
    }
    if !colors.is_empty() {
        if colors.len() != num_vars {
            return Err(Error::parse(last, 1, "every variable needs a color"));
        }
        inst.coloring = Some(colors.into_values().collect());
    }
    inst.occurrence_bound = occurrence;
    inst.max_clause_len = max_len;
    inst.validate()?;
    Ok(inst)
}

#[derive(Default)]
struct TargetParts {
    ground: Option<usize>,
    labels: BTreeMap<usize, String>,
    sets: Vec<(Vec<usize>, Cost)>,
    n_sets: Vec<(Vec<usize>, Cost)>,
    triples: BTreeMap<[usize; 3], Cost>,
    pair_weights: Vec<(usize, usize, Cost)>,
    matrix_a: Vec<Vec<usize>>,
    matrix_b: Vec<Vec<Cost>>,
    m_b: Option<usize>,
    m_c: Option<usize>,
    offset: Option<Cost>,
    separation: Option<SeparationMode>,
}

fn parse_set_line(
    line: &Line<'_>,
    ground: usize,
    expected_id: usize,
) -> Result<(Vec<usize>, Cost)> {
    let id = line.usize_at(1, "set id")?;
    if id != expected_id {
        return Err(line.err(1, format!("expected set id {expected_id}, found {id}")));
    }
    let weight = line.weight_at(2)?;
    if line.get(3, "':'")? != ":" {
        return Err(line.err(3, "expected ':'"));
    }
    let members = (4..line.tokens.len())
        .map(|i| line.id_at(i, ground, "element"))
        .collect::<Result<Vec<_>>>()?;
    Ok((members, weight))
}

fn parse_target(tag: &str, body: &[Line<'_>]) -> Result<SetProblemInstance> {
    let mut p = TargetParts::default();
    for line in body {
        let ground = |line: &Line<'_>| {
            p.ground
                .ok_or_else(|| line.err(0, "'ground' must come first"))
        };
        match line.keyword() {
            "ground" => {
                line.arity(2)?;
                p.ground = Some(line.usize_at(1, "ground size")?);
            }
            "label" => {
                line.arity(3)?;
                let e = line.id_at(1, ground(line)?, "element")?;
                p.labels.insert(e, line.tokens[2].text.to_string());
            }
            "set" => {
                let g = ground(line)?;
                let set = parse_set_line(line, g, p.sets.len() + 1)?;
                p.sets.push(set);
            }
            "nset" if tag == "cc" => {
                let g = ground(line)?;
                let set = parse_set_line(line, g, p.n_sets.len() + 1)?;
                p.n_sets.push(set);
            }
            "triple" if tag == "w3dm" => {
                let n = ground(line)?;
                line.arity(5)?;
                let t = [
                    line.id_at(1, n, "boy")?,
                    line.id_at(2, n, "girl")?,
                    line.id_at(3, n, "home")?,
                ];
                if p.triples.insert(t, line.weight_at(4)?).is_some() {
                    return Err(line.err(1, "repeated triple"));
                }
            }
            "pairweight" if tag == "ts" => {
                let g = ground(line)?;
                line.arity(4)?;
                let a = line.id_at(1, g, "element")?;
                let b = line.id_at(2, g, "element")?;
                if a == b {
                    return Err(line.err(2, "pair of identical elements"));
                }
                p.pair_weights.push((a, b, line.weight_at(3)?));
            }
            "separation" if tag == "ts" => {
                line.arity(2)?;
                p.separation = Some(match line.tokens[1].text {
                    "two_sided" => SeparationMode::TwoSided,
                    "one_sided" => SeparationMode::OneSided,
                    _ => return Err(line.err(1, "expected two_sided or one_sided")),
                });
            }
            "matrixA" if tag == "ip" => {
                let row = (1..line.tokens.len())
                    .map(|i| line.usize_at(i, "matrix entry"))
                    .collect::<Result<Vec<_>>>()?;
                p.matrix_a.push(row);
            }
            "matrixB" if tag == "ip" => {
                let row = (1..line.tokens.len())
                    .map(|i| line.weight_at(i))
                    .collect::<Result<Vec<_>>>()?;
                p.matrix_b.push(row);
            }
            "bound" => {
                line.arity(3)?;
                let v = line.usize_at(2, "bound")?;
                match line.tokens[1].text {
                    "mB" => p.m_b = Some(v),
                    "mC" => p.m_c = Some(v),
                    _ => return Err(line.err(1, "expected mB or mC")),
                }
            }
            "offset" if tag == "cc" => {
                line.arity(2)?;
                p.offset = Some(line.weight_at(1)?);
            }
            other => return Err(line.err(0, format!("unexpected '{other}' in a {tag} instance"))),
        }
    }
    let last = body.last().map_or(1, |l| l.number);
    let missing = |what: &str| Error::parse(last, 1, format!("missing '{what}'"));
    let ground = p.ground.ok_or_else(|| missing("ground"))?;
    let mut labels = default_labels(ground);
    for (e, name) in &p.labels {
        labels[*e] = name.clone();
    }
    let build = |sets: Vec<(Vec<usize>, Cost)>| -> Result<WeightedCollection> {
        let (members, weights): (Vec<_>, Vec<_>) = sets.into_iter().unzip();
        Ok(WeightedCollection::new(ground, members, weights)?.with_labels(labels.clone()))
    };
    let inst = match tag {
        "w3dm" => SetProblemInstance::W3dm(W3dmInstance {
            n: ground,
            weights: p.triples,
        }),
        "x3c" => {
            let mut weights = BTreeMap::new();
            for (i, (members, w)) in p.sets.into_iter().enumerate() {
                let mut t = members.clone();
                t.sort_unstable();
                t.dedup();
                if t.len() != 3 {
                    return Err(Error::InvalidInstance(format!(
                        "set {} is not a 3-set",
                        i + 1
                    )));
                }
                weights.insert([t[0], t[1], t[2]], w);
            }
            SetProblemInstance::X3c(X3cInstance {
                ground,
                labels,
                weights,
            })
        }
        "sp" => SetProblemInstance::Sp(SpInstance {
            collection: build(p.sets)?,
            m_c: p.m_c.ok_or_else(|| missing("bound mC"))?,
        }),
        "ssp" => SetProblemInstance::Ssp(SspInstance {
            collection: build(p.sets)?,
        }),
        "sc" => SetProblemInstance::Sc(ScInstance {
            collection: build(p.sets)?,
        }),
        "ts" => {
            let mut pair = vec![vec![Cost::zero(); ground]; ground];
            for (a, b, w) in p.pair_weights {
                pair[a][b] = w.clone();
                pair[b][a] = w;
            }
            SetProblemInstance::Ts(TsInstance {
                collection: build(p.sets)?,
                pair_weights: pair,
                m_b: p.m_b.ok_or_else(|| missing("bound mB"))?,
                separation: p.separation.unwrap_or_default(),
            })
        }
        "sb" => SetProblemInstance::Sb(SbInstance {
            collection: build(p.sets)?,
            m_c: p.m_c.ok_or_else(|| missing("bound mC"))?,
        }),
        "hs" => SetProblemInstance::Hs(HsInstance {
            collection: build(p.sets)?,
            m_b: p.m_b.ok_or_else(|| missing("bound mB"))?,
        }),
        "ip" => SetProblemInstance::Ip(IpInstance {
            a: p.matrix_a,
            b: p.matrix_b,
            donors: build(p.sets)?,
        }),
        "cc" => {
            let n_side = build(p.n_sets)?;
            let w_shift = p.offset.unwrap_or_else(|| n_side.total_weight());
            SetProblemInstance::Cc(CcInstance {
                m_side: build(p.sets)?,
                n_side,
                w_shift,
            })
        }
        _ => unreachable!("tag checked by parse_file"),
    };
    inst.validate()?;
    Ok(inst)
}

fn write_labels(out: &mut String, labels: &[String]) {
    for (i, l) in labels.iter().enumerate() {
        if *l != (i + 1).to_string() {
            let _ = writeln!(out, "label {} {l}", i + 1);
        }
    }
}

fn write_sets(out: &mut String, keyword: &str, c: &WeightedCollection) {
    for (i, (set, w)) in c.sets.iter().zip(&c.weights).enumerate() {
        let _ = write!(out, "{keyword} {} {w} :", i + 1);
        for e in set.iter() {
            let _ = write!(out, " {}", e + 1);
        }
        out.push('\n');
    }
}

fn write_collection(out: &mut String, c: &WeightedCollection) {
    let _ = writeln!(out, "ground {}", c.ground);
    write_labels(out, &c.labels);
    write_sets(out, "set", c);
}

pub fn serialize_instance(inst: &SetProblemInstance) -> String {
    let mut out = format!("problem {}\n", inst.tag());
    match inst {
        SetProblemInstance::W3dm(i) => {
            let _ = writeln!(out, "ground {}", i.n);
            for (t, w) in &i.weights {
                let _ = writeln!(out, "triple {} {} {} {w}", t[0] + 1, t[1] + 1, t[2] + 1);
            }
        }
        SetProblemInstance::X3c(i) => {
            let _ = writeln!(out, "ground {}", i.ground);
            write_labels(&mut out, &i.labels);
            for (k, (t, w)) in i.weights.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "set {} {w} : {} {} {}",
                    k + 1,
                    t[0] + 1,
                    t[1] + 1,
                    t[2] + 1
                );
            }
        }
        SetProblemInstance::Sp(i) => {
            write_collection(&mut out, &i.collection);
            let _ = writeln!(out, "bound mC {}", i.m_c);
        }
        SetProblemInstance::Ssp(i) => write_collection(&mut out, &i.collection),
        SetProblemInstance::Sc(i) => write_collection(&mut out, &i.collection),
        SetProblemInstance::Ts(i) => {
            write_collection(&mut out, &i.collection);
            let _ = writeln!(out, "bound mB {}", i.m_b);
            let _ = writeln!(out, "separation {}", i.separation.name());
            for a in 0..i.collection.ground {
                for b in (a + 1)..i.collection.ground {
                    let w = &i.pair_weights[a][b];
                    if !w.is_zero() {
                        let _ = writeln!(out, "pairweight {} {} {w}", a + 1, b + 1);
                    }
                }
            }
        }
        SetProblemInstance::Sb(i) => {
            write_collection(&mut out, &i.collection);
            let _ = writeln!(out, "bound mC {}", i.m_c);
        }
        SetProblemInstance::Hs(i) => {
            write_collection(&mut out, &i.collection);
            let _ = writeln!(out, "bound mB {}", i.m_b);
        }
        SetProblemInstance::Ip(i) => {
            write_collection(&mut out, &i.donors);
            for row in &i.a {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "matrixA {}", cells.join(" "));
            }
            for row in &i.b {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "matrixB {}", cells.join(" "));
            }
        }
        SetProblemInstance::Cc(i) => {
            write_collection(&mut out, &i.m_side);
            write_sets(&mut out, "nset", &i.n_side);
            let _ = writeln!(out, "offset {}", i.w_shift);
        }
    }
    out
}

pub fn serialize_source(inst: &McaInstance) -> String {
    let tag = match (inst.semantics, inst.sense) {
        (Semantics::Table, Sense::Maximize) => "mca",
        (Semantics::Table, Sense::Minimize) => "minca",
        (Semantics::Nae, _) => "posnae",
        (Semantics::CnfDisjunction, _) => "cnf",
    };
    let mut out = format!("problem {tag}\nvars {}\n", inst.num_vars);
    if inst.semantics == Semantics::Table {
        let _ = writeln!(out, "domain {}", inst.domain_size);
    }
    if let Some(colors) = &inst.coloring {
        for (x, c) in colors.iter().enumerate() {
            let _ = writeln!(out, "color {} {}", x + 1, c.name());
        }
    }
    if inst.order.iter().enumerate().any(|(i, &p)| p != i + 1) {
        let cells: Vec<String> = inst.order.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "order {}", cells.join(" "));
    }
    if let Some(q) = inst.occurrence_bound {
        let _ = writeln!(out, "occurrence {q}");
    }
    if let Some(h) = inst.max_clause_len {
        let _ = writeln!(out, "maxlen {h}");
    }
    for c in &inst.constraints {
        let scope: Vec<String> = c.scope.iter().map(|x| (x + 1).to_string()).collect();
        match &c.body {
            ConstraintBody::Table(t) => {
                let cells: Vec<String> = t.iter().map(|w| w.to_string()).collect();
                let _ = writeln!(out, "table {} : {}", scope.join(" "), cells.join(" "));
            }
            ConstraintBody::Nae(w) => {
                let _ = writeln!(out, "nae {} {w}", scope.join(" "));
            }
            ConstraintBody::Clause { negated, weight } => {
                let lits: Vec<String> = c
                    .scope
                    .iter()
                    .zip(negated)
                    .map(|(x, &n)| format!("{}{}", if n { "-" } else { "" }, x + 1))
                    .collect();
                let _ = writeln!(out, "clause {weight} : {}", lits.join(" "));
            }
        }
    }
    out
}

/// Parses the one-line solution form produced by `Display for Solution`.
pub fn parse_solution(text: &str) -> Result<Solution> {
    let text = text.trim();
    let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let col = |offset: usize| kind.len() + 2 + offset;
    let numbers = |rest: &str| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for tok in rest.split_whitespace() {
            let at = rest[offset..].find(tok).map_or(offset, |p| p + offset);
            offset = at + tok.len();
            let v: usize = tok.parse().map_err(|_| {
                Error::parse(1, col(at), format!("expected a 1-based id, found '{tok}'"))
            })?;
            if v == 0 {
                return Err(Error::parse(1, col(at), "ids start at 1"));
            }
            out.push(v - 1);
        }
        Ok(out)
    };
    let groups = |rest: &str, open: char, close: char| -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut s = rest.trim_start();
        while !s.is_empty() {
            let at = rest.len() - s.len();
            let inner = s
                .strip_prefix(open)
                .and_then(|t| t.split_once(close))
                .ok_or_else(|| Error::parse(1, col(at), format!("expected '{open}...{close}'")))?;
            let cleaned = inner.0.replace(',', " ");
            out.push(numbers(&cleaned).map_err(|_| {
                Error::parse(1, col(at), format!("bad group '{open}{}{close}'", inner.0))
            })?);
            s = inner.1.trim_start();
        }
        Ok(out)
    };
    let triples = |gs: Vec<Vec<usize>>| -> Result<BTreeSet<[usize; 3]>> {
        gs.into_iter()
            .map(|g| {
                <[usize; 3]>::try_from(g)
                    .map_err(|_| Error::parse(1, col(0), "expected groups of three ids"))
            })
            .collect()
    };
    match kind {
        "collection" => Ok(Solution::Collection(numbers(rest)?.into_iter().collect())),
        "elements" => Ok(Solution::Elements(numbers(rest)?.into_iter().collect())),
        "vector" => Ok(Solution::SetVector(numbers(rest)?)),
        "partition" => {
            let sides = numbers(rest)?;
            if let Some(p) = sides.iter().position(|&s| s > 1) {
                return Err(Error::parse(
                    1,
                    col(0),
                    format!("side of element {} must be 1 or 2", p + 1),
                ));
            }
            Ok(Solution::Partition(
                sides.into_iter().map(|s| s == 1).collect(),
            ))
        }
        "matching" => Ok(Solution::Matching(triples(groups(rest, '(', ')')?)?)),
        "cover" => {
            let mut set = BTreeSet::new();
            for mut t in triples(groups(rest, '{', '}')?)? {
                t.sort_unstable();
                set.insert(t);
            }
            Ok(Solution::Cover(set))
        }
        "basis" => Err(Error::parse(
            1,
            1,
            "basis solutions need the ground size; use parse_solution_for",
        )),
        "" => Err(Error::parse(1, 1, "empty solution")),
        other => Err(Error::parse(
            1,
            1,
            format!("unknown solution kind '{other}'"),
        )),
    }
}

/// Like [`parse_solution`] but with the instance at hand, so basis members
/// get the right capacity.
pub fn parse_solution_for(inst: &SetProblemInstance, text: &str) -> Result<Solution> {
    let trimmed = text.trim();
    if let Some(rest) = trimmed.strip_prefix("basis") {
        let g = inst.ground_size();
        let mut basis = BTreeSet::new();
        let mut s = rest.trim_start();
        while !s.is_empty() {
            let at = trimmed.len() - s.len() + 1;
            let (inner, tail) = s
                .strip_prefix('{')
                .and_then(|t| t.split_once('}'))
                .ok_or_else(|| Error::parse(1, at, "expected '{...}'"))?;
            let mut members = Vec::new();
            for tok in inner.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| {
                    Error::parse(1, at, format!("expected an element, found '{tok}'"))
                })?;
                if v == 0 || v > g {
                    return Err(Error::parse(1, at, format!("element {v} outside 1..={g}")));
                }
                members.push(v - 1);
            }
            if !basis.insert(ElementSet::from_elements(g, members)) {
                return Err(Error::parse(1, at, "repeated basis member"));
            }
            s = tail.trim_start();
        }
        return Ok(Solution::Basis(basis));
    }
    parse_solution(text)
}

/// `assignment v1 v2 ...` with 1-based values.
pub fn format_assignment(a: &Assignment) -> String {
    let cells: Vec<String> = a.values().iter().map(|v| (v + 1).to_string()).collect();
    format!("assignment {}", cells.join(" "))
        .trim_end()
        .to_string()
}

pub fn parse_assignment(text: &str) -> Result<Assignment> {
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some("assignment") {
        return Err(Error::parse(1, 1, "expected 'assignment v1 v2 ...'"));
    }
    tokens
        .enumerate()
        .map(|(i, t)| match t.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Error::parse(
                1,
                1,
                format!("value {} is not a 1-based index: '{t}'", i + 1),
            )),
        })
        .collect::<Result<Vec<_>>>()
        .map(Assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sp_round_trip() {
        let text = "problem sp\nground 3\nlabel 1 a\nset 1 5 : 1 2\nset 2 4 : 2 3\nset 3 0 :\nbound mC 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(serialize_instance(&inst), text);
    }

    #[test]
    fn source_round_trip() {
        let text = "problem cnf\nvars 2\nclause 3 : 1 -2\n";
        let inst = parse_source_instance(text).unwrap();
        assert_eq!(serialize_source(&inst), text);
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_file("problem knapsack\n"),
            Err(Error::Parse {
                line: 1,
                column: 9,
                ..
            })
        ));
        assert!(matches!(
            parse_file("problem sp\nground 2\nset 1 -4 : 1\nbound mC 1\n"),
            Err(Error::Parse {
                line: 3,
                column: 7,
                ..
            })
        ));
        assert!(matches!(
            parse_file("problem sp\nset 1 4 : 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn solutions_round_trip_through_display() {
        for s in [
            Solution::collection([0, 2]),
            Solution::elements([]),
            Solution::Partition(vec![false, true]),
            Solution::SetVector(vec![1, 0]),
            Solution::Matching(BTreeSet::from([[0, 1, 0], [1, 0, 1]])),
            Solution::Cover(BTreeSet::from([[0, 1, 2]])),
        ] {
            assert_eq!(parse_solution(&s.to_string()).unwrap(), s);
        }
        let sb = parse_instance("problem sb\nground 2\nset 1 1 : 1\nbound mC 2\n").unwrap();
        let basis = Solution::Basis(BTreeSet::from([
            ElementSet::from_elements(2, [0]),
            ElementSet::from_elements(2, [0, 1]),
        ]));
        assert_eq!(parse_solution_for(&sb, &basis.to_string()).unwrap(), basis);
    }
}
