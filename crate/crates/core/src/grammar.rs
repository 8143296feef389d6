//! Context-free grammars, normalization, classification, and the fixpoint
//! functions whose least fixpoint is the vector of variable languages.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexSet;

use crate::bits::BitSet;
use crate::foundations::{Alphabet, Symbol, Word, WordSet};
use crate::{Error, Result};

/// A grammar symbol: a variable index or an alphabet symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GSym {
    Var(usize),
    Term(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Production {
    pub head: usize,
    pub body: Vec<GSym>,
}

impl Production {
    pub fn new(head: usize, body: Vec<GSym>) -> Self {
        Production { head, body }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    alphabet: Alphabet,
    var_names: Vec<String>,
    start: usize,
    productions: Vec<Production>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarClass {
    GeneralCnf,
    RightRegular,
    Slp,
    Other,
}

impl Cfg {
    /// Builds a grammar, dropping duplicate productions (first occurrence wins).
    pub fn new(
        alphabet: Alphabet,
        var_names: Vec<String>,
        start: usize,
        productions: impl IntoIterator<Item = Production>,
    ) -> Result<Self> {
        if var_names.is_empty() {
            return Err(Error::input("grammar needs at least one variable"));
        }
        let mut seen = HashSet::new();
        for v in &var_names {
            if !seen.insert(v.as_str()) {
                return Err(Error::input(format!("duplicate variable `{v}`")));
            }
        }
        if start >= var_names.len() {
            return Err(Error::input(format!("start variable {start} out of range")));
        }
        let prods: IndexSet<Production> = productions.into_iter().collect();
        for p in &prods {
            if p.head >= var_names.len() {
                return Err(Error::input(format!("production head {} out of range", p.head)));
            }
            for s in &p.body {
                match *s {
                    GSym::Var(v) if v >= var_names.len() => {
                        return Err(Error::input(format!("variable {v} out of range")))
                    }
                    GSym::Term(a) if a.index() >= alphabet.len() => {
                        return Err(Error::input(format!("symbol {} out of range", a.0)))
                    }
                    _ => {}
                }
            }
        }
        Ok(Cfg {
            alphabet,
            var_names,
            start,
            productions: prods.into_iter().collect(),
        })
    }

    /// Parses the line-based grammar format. Terminals are interned in order
    /// of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        parse_grammar(text, Alphabet::empty_builder())
    }

    /// Like [`Cfg::parse`], but the alphabet starts with `base`; terminals
    /// not in `base` are appended.
    pub fn parse_with_alphabet(text: &str, base: &Alphabet) -> Result<Self> {
        parse_grammar(text, base.clone())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.var_names[v]
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn productions_of(&self, v: usize) -> impl Iterator<Item = &Production> {
        self.productions.iter().filter(move |p| p.head == v)
    }

    /// The same grammar over a larger alphabet that starts with this one.
    pub fn with_alphabet(&self, alphabet: &Alphabet) -> Result<Cfg> {
        if !alphabet.extends(&self.alphabet) {
            return Err(Error::input(
                "grammar alphabet is not a prefix of the requested alphabet",
            ));
        }
        let mut g = self.clone();
        g.alphabet = alphabet.clone();
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars: {}", self.var_names.join(" "));
        let _ = writeln!(out, "start: {}", self.var_names[self.start]);
        for p in &self.productions {
            let _ = writeln!(out, "{} -> {}", self.var_names[p.head], self.render_body(&p.body));
        }
        out
    }

    pub fn render_body(&self, body: &[GSym]) -> String {
        if body.is_empty() {
            return "EPS".to_string();
        }
        body.iter()
            .map(|s| match *s {
                GSym::Var(v) => self.var_names[v].clone(),
                GSym::Term(a) => self.alphabet.name(a).to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Rules are `X → Y Z`, `X → a`, or `start → ε`.
    pub fn is_cnf(&self) -> bool {
        self.productions.iter().all(|p| match p.body.as_slice() {
            [] => p.head == self.start,
            [GSym::Term(_)] => true,
            [GSym::Var(_), GSym::Var(_)] => true,
            _ => false,
        })
    }

    /// Rules are `X → Y a`, `X → a`, or `X → ε`.
    pub fn is_right_regular(&self) -> bool {
        self.productions.iter().all(|p| {
            matches!(
                p.body.as_slice(),
                [] | [GSym::Term(_)] | [GSym::Var(_), GSym::Term(_)]
            )
        })
    }

    /// At most one rule per variable and an acyclic variable dependency
    /// graph, so every variable derives at most one word.
    pub fn is_slp(&self) -> bool {
        let mut count = vec![0usize; self.num_vars()];
        for p in &self.productions {
            count[p.head] += 1;
            if count[p.head] > 1 {
                return false;
            }
        }
        self.topological_order().is_some()
    }

    /// Variables ordered so that every variable comes after all variables in
    /// its bodies. `None` if the dependency graph has a cycle.
    pub(crate) fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.num_vars();
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pending = vec![0usize; n];
        for p in &self.productions {
            for s in &p.body {
                if let GSym::Var(v) = *s {
                    deps[v].push(p.head);
                    pending[p.head] += 1;
                }
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| pending[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &h in &deps[v] {
                pending[h] -= 1;
                if pending[h] == 0 {
                    ready.push(h);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Variables that derive at least one terminal word.
    pub fn generating(&self) -> BitSet {
        let mut gen = BitSet::new(self.num_vars());
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !gen.contains(p.head)
                    && p.body.iter().all(|s| match *s {
                        GSym::Var(v) => gen.contains(v),
                        GSym::Term(_) => true,
                    })
                {
                    gen.insert(p.head);
                    changed = true;
                }
            }
            if !changed {
                return gen;
            }
        }
    }

    /// Variables that derive ε.
    pub fn nullable(&self) -> BitSet {
        nullable_of(self.num_vars(), &self.productions)
    }
}

fn nullable_of(n: usize, prods: &[Production]) -> BitSet {
    let mut null = BitSet::new(n);
    loop {
        let mut changed = false;
        for p in prods {
            if !null.contains(p.head)
                && p.body.iter().all(|s| matches!(*s, GSym::Var(v) if null.contains(v)))
            {
                null.insert(p.head);
                changed = true;
            }
        }
        if !changed {
            return null;
        }
    }
}

/// Syntactic class, checked in the order right-regular, SLP, CNF.
pub fn classify(g: &Cfg) -> GrammarClass {
    if g.is_right_regular() {
        GrammarClass::RightRegular
    } else if g.is_slp() {
        GrammarClass::Slp
    } else if g.is_cnf() {
        GrammarClass::GeneralCnf
    } else {
        GrammarClass::Other
    }
}

/// Normalizes to the CNF accepted by [`Cfg::is_cnf`], preserving the start
/// variable's language.
///
/// Original variables keep their indices (their rules may change, and the
/// languages of non-start variables lose ε); fresh variables are appended
/// and named `X<k>` after the variable whose rule introduced them. Rules
/// mentioning non-generating variables are removed. The start variable keeps
/// its ε-rule and may occur in bodies.
pub fn to_cnf(g: &Cfg) -> Cfg {
    let n = g.num_vars();
    let start = g.start;
    let gen = g.generating();
    let useful = |p: &Production| {
        p.body
            .iter()
            .all(|s| !matches!(*s, GSym::Var(v) if !gen.contains(v)))
    };
    let prods: Vec<Production> = g.productions.iter().filter(|p| useful(p)).cloned().collect();

    // ε-rules: drop nullable non-start occurrences in every combination.
    let nullable = nullable_of(n, &prods);
    let mut no_eps: IndexSet<Production> = IndexSet::new();
    for p in &prods {
        let droppable: Vec<usize> = p
            .body
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(**s, GSym::Var(v) if v != start && nullable.contains(v)))
            .map(|(i, _)| i)
            .collect();
        for mask in 0u64..(1u64 << droppable.len()) {
            let body: Vec<GSym> = p
                .body
                .iter()
                .enumerate()
                .filter(|(i, _)| {
                    droppable
                        .iter()
                        .position(|d| d == i)
                        .is_none_or(|bit| mask & (1 << bit) == 0)
                })
                .map(|(_, s)| *s)
                .collect();
            if body.is_empty() && p.head != start {
                continue;
            }
            no_eps.insert(Production::new(p.head, body));
        }
    }

    // Unit rules: each variable inherits the non-unit rules of every
    // variable reachable through unit rules.
    let unit = |p: &Production| matches!(p.body.as_slice(), [GSym::Var(_)]);
    let mut unit_succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in no_eps.iter().filter(|p| unit(p)) {
        if let [GSym::Var(b)] = p.body.as_slice() {
            unit_succ[p.head].push(*b);
        }
    }
    let mut no_unit: IndexSet<Production> = IndexSet::new();
    for a in 0..n {
        let mut reach = vec![a];
        let mut seen = BitSet::singleton(n, a);
        let mut i = 0;
        while i < reach.len() {
            for &b in &unit_succ[reach[i]] {
                if seen.insert(b) {
                    reach.push(b);
                }
            }
            i += 1;
        }
        // keep the original rule order of each reached variable
        for &b in &reach {
            for p in no_eps.iter().filter(|p| p.head == b && !unit(p)) {
                if p.body.is_empty() && a != start {
                    continue;
                }
                no_unit.insert(Production::new(a, p.body.clone()));
            }
        }
    }
    let mut ordered: Vec<Production> = Vec::new();
    for p in &no_unit {
        ordered.push(p.clone());
    }
    // stable order by head so that rules of a variable stay grouped as in the input
    ordered.sort_by_key(|p| p.head);

    let mut names = g.var_names.clone();
    let mut taken: HashSet<String> = names.iter().cloned().collect();
    let mut counters: HashMap<String, usize> = HashMap::new();
    let mut fresh = |base: &str, names: &mut Vec<String>| -> usize {
        let k = counters.entry(base.to_string()).or_insert(0);
        loop {
            *k += 1;
            let candidate = format!("{base}<{k}>");
            if taken.insert(candidate.clone()) {
                names.push(candidate);
                return names.len() - 1;
            }
        }
    };

    // Terminal lifting inside bodies of length ≥ 2.
    let mut term_var: HashMap<Symbol, usize> = HashMap::new();
    let mut extra: Vec<Production> = Vec::new();
    let mut lifted: Vec<Production> = Vec::new();
    for p in ordered {
        if p.body.len() < 2 {
            lifted.push(p);
            continue;
        }
        let head_name = names[p.head].clone();
        let body = p
            .body
            .iter()
            .map(|s| match *s {
                GSym::Term(a) => {
                    let v = match term_var.get(&a) {
                        Some(&v) => v,
                        None => {
                            let v = fresh(&head_name, &mut names);
                            term_var.insert(a, v);
                            extra.push(Production::new(v, vec![GSym::Term(a)]));
                            v
                        }
                    };
                    GSym::Var(v)
                }
                v => v,
            })
            .collect();
        lifted.push(Production::new(p.head, body));
    }

    // Binarization: X → Y1 Y2 … Yk becomes X → Y1 X<j>, X<j> → Y2 … Yk, …
    let mut out: Vec<Production> = Vec::new();
    for p in lifted {
        if p.body.len() <= 2 {
            out.push(p);
            continue;
        }
        let head_name = names[p.head].clone();
        let mut head = p.head;
        let mut rest = &p.body[..];
        let mut chain = Vec::new();
        while rest.len() > 2 {
            let next = fresh(&head_name, &mut names);
            chain.push(Production::new(head, vec![rest[0], GSym::Var(next)]));
            head = next;
            rest = &rest[1..];
        }
        chain.push(Production::new(head, rest.to_vec()));
        out.extend(chain);
    }
    out.extend(extra);

    let cfg = Cfg::new(g.alphabet.clone(), names, start, out).expect("normalization keeps indices valid");
    let gen = cfg.generating();
    let prods: Vec<Production> = cfg
        .productions
        .iter()
        .filter(|p| p.body.iter().all(|s| !matches!(*s, GSym::Var(v) if !gen.contains(v))))
        .cloned()
        .collect();
    Cfg { productions: prods, ..cfg }
}

/// An n-vector of finite word sets, one per grammar variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangVector(pub Vec<WordSet>);

impl LangVector {
    pub fn empty(n: usize) -> Self {
        LangVector(vec![WordSet::new(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn component(&self, j: usize) -> &WordSet {
        &self.0[j]
    }

    pub fn total_words(&self) -> usize {
        self.0.iter().map(|s| s.len()).sum()
    }
}

/// One application of `F_G` for a grammar in CNF:
/// `F(L)_j = ⋃_{X_j → X_k X_l} L_k L_l ∪ ⋃_{X_j → a} {a}`.
pub fn apply_f(g: &Cfg, l: &LangVector) -> Result<LangVector> {
    if !g.is_cnf() {
        return Err(Error::input("apply_f requires a grammar in CNF"));
    }
    check_vector(g, l)?;
    Ok(apply_products(g, l))
}

/// One application of the right-regular fixpoint function:
/// `F(L)_j = ⋃_{X_j → X_k a} L_k {a} ∪ ⋃_{X_j → a} {a}`.
pub fn apply_f_right_regular(g: &Cfg, l: &LangVector) -> Result<LangVector> {
    if !g.is_right_regular() {
        return Err(Error::input("apply_f_right_regular requires a right-regular grammar"));
    }
    check_vector(g, l)?;
    Ok(apply_products(g, l))
}

fn check_vector(g: &Cfg, l: &LangVector) -> Result<()> {
    if l.len() != g.num_vars() {
        return Err(Error::input(format!(
            "vector has {} components, grammar has {} variables",
            l.len(),
            g.num_vars()
        )));
    }
    Ok(())
}

/// Every body is read as a concatenation product of the current component
/// sets (variables) and singletons (terminals). Both CNF and right-regular
/// rule shapes are special cases.
pub(crate) fn apply_products(g: &Cfg, l: &LangVector) -> LangVector {
    let mut out = LangVector::empty(g.num_vars());
    for p in &g.productions {
        let mut partial: Vec<Word> = vec![Word::empty()];
        for s in &p.body {
            partial = match *s {
                GSym::Term(a) => partial.iter().map(|w| w.push(a)).collect(),
                GSym::Var(v) => {
                    let comp = &l.0[v];
                    let mut next = Vec::with_capacity(partial.len() * comp.len());
                    for w in &partial {
                        for x in comp {
                            next.push(w.concat(x));
                        }
                    }
                    next
                }
            };
            if partial.is_empty() {
                break;
            }
        }
        out.0[p.head].extend(partial);
    }
    out
}

/// Membership `u ∈ L(G)`.
pub fn derives(g: &Cfg, u: &Word) -> bool {
    derives_from(g, g.start, u)
}

/// Membership `u ∈ L_v(G)`. Grammars with bodies longer than two symbols are
/// normalized first, which drops ε from non-start variables.
pub fn derives_from(g: &Cfg, v: usize, u: &Word) -> bool {
    if !g.alphabet.contains_word(u) {
        return false;
    }
    if g.productions.iter().any(|p| p.body.len() > 2) {
        let cnf = to_cnf(g);
        return Chart::build(&cnf, u.symbols()).derives(v, 0, u.len());
    }
    Chart::build(g, u.symbols()).derives(v, 0, u.len())
}

/// CYK-style chart for grammars whose bodies have at most two symbols.
/// Spans may be empty, so nullable variables and unit rules are handled by
/// a per-span fixpoint.
struct Chart {
    n: usize,
    // cells[i * (n + 1) + len]
    cells: Vec<BitSet>,
}

impl Chart {
    fn build(g: &Cfg, u: &[Symbol]) -> Chart {
        let n = u.len();
        let vars = g.num_vars();
        let mut chart = Chart {
            n,
            cells: vec![BitSet::new(vars); (n + 1) * (n + 1)],
        };
        for len in 0..=n {
            for i in 0..=(n - len) {
                loop {
                    let mut changed = false;
                    for p in &g.productions {
                        if chart.cell(i, len).contains(p.head) {
                            continue;
                        }
                        if chart.body_derives(&p.body, u, i, len) {
                            chart.cells[i * (n + 1) + len].insert(p.head);
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
        chart
    }

    fn cell(&self, i: usize, len: usize) -> &BitSet {
        &self.cells[i * (self.n + 1) + len]
    }

    fn sym_derives(&self, s: GSym, u: &[Symbol], i: usize, len: usize) -> bool {
        match s {
            GSym::Term(a) => len == 1 && u[i] == a,
            GSym::Var(v) => self.cell(i, len).contains(v),
        }
    }

    fn body_derives(&self, body: &[GSym], u: &[Symbol], i: usize, len: usize) -> bool {
        match *body {
            [] => len == 0,
            [s] => self.sym_derives(s, u, i, len),
            [s, t] => (0..=len).any(|k| self.sym_derives(s, u, i, k) && self.sym_derives(t, u, i + k, len - k)),
            _ => unreachable!("chart bodies have at most two symbols"),
        }
    }

    fn derives(&self, v: usize, i: usize, len: usize) -> bool {
        self.cell(i, len).contains(v)
    }
}

fn parse_grammar(text: &str, mut alphabet: Alphabet) -> Result<Cfg> {
    let mut vars: Option<Vec<String>> = None;
    let mut start_name: Option<(String, usize)> = None;
    let mut productions = Vec::new();
    let mut last_line = 0;

    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = content.split_once("->") {
            let names = vars
                .as_ref()
                .ok_or_else(|| Error::parse(line, "`vars:` must be declared before rules"))?;
            let head_tok = lhs.trim();
            let head = names
                .iter()
                .position(|n| n == head_tok)
                .ok_or_else(|| Error::parse(line, format!("unknown variable `{head_tok}`")))?;
            for alt in rhs.split('|') {
                let toks: Vec<&str> = alt.split_whitespace().collect();
                if toks.is_empty() {
                    return Err(Error::parse(line, "empty alternative (write EPS for ε)"));
                }
                if toks == ["EPS"] {
                    productions.push(Production::new(head, Vec::new()));
                    continue;
                }
                if toks.contains(&"EPS") {
                    return Err(Error::parse(line, "EPS must stand alone in a body"));
                }
                let body = toks
                    .iter()
                    .map(|t| match names.iter().position(|n| n == t) {
                        Some(v) => GSym::Var(v),
                        None => GSym::Term(alphabet.intern(t)),
                    })
                    .collect();
                productions.push(Production::new(head, body));
            }
            continue;
        }
        if let Some((key, rest)) = content.split_once(':') {
            let items: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "vars" => {
                    if vars.is_some() {
                        return Err(Error::parse(line, "duplicate `vars:`"));
                    }
                    if items.is_empty() {
                        return Err(Error::parse(line, "no variables declared"));
                    }
                    let mut seen = HashSet::new();
                    for v in &items {
                        if *v == "EPS" || *v == "|" || v.contains("->") {
                            return Err(Error::parse(line, format!("reserved name `{v}`")));
                        }
                        if !seen.insert(*v) {
                            return Err(Error::parse(line, format!("duplicate variable `{v}`")));
                        }
                        if alphabet.symbol(v).is_some() {
                            return Err(Error::parse(line, format!("`{v}` is both a variable and a symbol")));
                        }
                    }
                    vars = Some(items.iter().map(|s| s.to_string()).collect());
                }
                "start" => {
                    if start_name.is_some() {
                        return Err(Error::parse(line, "duplicate `start:`"));
                    }
                    if items.len() != 1 {
                        return Err(Error::parse(line, "exactly one start variable expected"));
                    }
                    start_name = Some((items[0].to_string(), line));
                }
                other => return Err(Error::parse(line, format!("unknown header `{other}:`"))),
            }
            continue;
        }
        return Err(Error::parse(line, "expected `X -> body` or a header"));
    }

    let end = last_line.max(1);
    let vars = vars.ok_or_else(|| Error::parse(end, "missing `vars:`"))?;
    let start = match start_name {
        Some((name, line)) => vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::parse(line, format!("unknown start variable `{name}`")))?,
        None => 0,
    };
    if alphabet.is_empty() {
        return Err(Error::parse(end, "grammar uses no terminal symbols and no alphabet was supplied"));
    }
    Cfg::new(alphabet, vars, start, productions).map_err(|e| Error::parse(end, e.to_string()))
}
