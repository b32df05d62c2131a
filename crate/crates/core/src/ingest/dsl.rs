//! Minimal statechart language.
//!
//! ```text
//! chart Name {
//!     initial state A -> B [guard text] -> C
//!     state B { state Inner }
//!     connector state C -> A
//! }
//! ```
//!
//! A state is `(initial|final|connector)* state NAME` followed by an optional
//! block of nested states and then its outgoing transitions. Transitions can
//! only follow their source state. `//` starts a line comment.

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{derive_global_edge_order, synthesize_implicit_ports, Direction, Edge, Graph, Node};

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, Default, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

// positions are diagnostics only; two models are equal regardless of layout
impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DslTransition {
    pub target: String,
    /// Opaque guard text, trimmed.
    pub guard: Option<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DslState {
    pub name: String,
    pub initial: bool,
    pub is_final: bool,
    pub connector: bool,
    /// Nested region; `None` when the state has no block or an empty one.
    pub children: Option<DslModel>,
    pub transitions: Vec<DslTransition>,
    pub pos: Pos,
}

impl DslState {
    pub fn kind(&self) -> &'static str {
        if self.connector {
            "connector"
        } else if self.initial {
            "initial"
        } else if self.is_final {
            "final"
        } else {
            "state"
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DslModel {
    pub name: String,
    /// Declaration order.
    pub states: Vec<DslState>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    UnexpectedChar(char),
    Expected { expected: String, found: String },
    TransitionOutsideState,
    UnterminatedGuard,
    DuplicateState(String),
    UnresolvedTarget(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub kind: DslErrorKind,
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            DslErrorKind::Expected { expected, found } => write!(f, "expected {expected}, found {found}"),
            DslErrorKind::TransitionOutsideState => write!(f, "transition outside of a state; transitions must follow their source state"),
            DslErrorKind::UnterminatedGuard => write!(f, "guard is missing its closing `]`"),
            DslErrorKind::DuplicateState(n) => write!(f, "state `{n}` is declared twice"),
            DslErrorKind::UnresolvedTarget(n) => write!(f, "transition targets undeclared state `{n}`"),
        }
    }
}

impl DslError {
    fn at(pos: Pos, kind: DslErrorKind) -> Self {
        DslError { line: pos.line, col: pos.col, kind }
    }
}

const KEYWORDS: [&str; 5] = ["chart", "state", "initial", "final", "connector"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Keyword(&'static str),
    LBrace,
    RBrace,
    Arrow,
    Guard(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Keyword(k) => format!("keyword `{k}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Guard(_) => "guard".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                let c = chars[i];
                advance(&mut i, &mut line, &mut col, c);
            }
        } else if c == '{' || c == '}' {
            out.push((if c == '{' { Tok::LBrace } else { Tok::RBrace }, pos));
            advance(&mut i, &mut line, &mut col, c);
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, pos));
            advance(&mut i, &mut line, &mut col, '-');
            advance(&mut i, &mut line, &mut col, '>');
        } else if c == '[' {
            advance(&mut i, &mut line, &mut col, c);
            let mut guard = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(DslError::at(pos, DslErrorKind::UnterminatedGuard)),
                    Some(']') => {
                        advance(&mut i, &mut line, &mut col, ']');
                        break;
                    }
                    Some(&g) => {
                        guard.push(g);
                        advance(&mut i, &mut line, &mut col, g);
                    }
                }
            }
            out.push((Tok::Guard(guard.trim().to_string()), pos));
        } else if c.is_alphabetic() || c == '_' {
            let mut word = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                let c = chars[i];
                word.push(c);
                advance(&mut i, &mut line, &mut col, c);
            }
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => out.push((Tok::Keyword(k), pos)),
                None => out.push((Tok::Ident(word), pos)),
            }
        } else {
            return Err(DslError::at(pos, DslErrorKind::UnexpectedChar(c)));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, DslError> {
        let (tok, pos) = self.peek();
        Err(DslError::at(*pos, DslErrorKind::Expected { expected: expected.into(), found: tok.describe() }))
    }

    fn ident(&mut self, expected: &str) -> Result<(String, Pos), DslError> {
        match self.peek().clone() {
            (Tok::Ident(s), pos) => {
                self.next();
                Ok((s, pos))
            }
            _ => self.fail(expected),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Pos, DslError> {
        if self.peek().0 == tok {
            Ok(self.next().1)
        } else {
            self.fail(expected)
        }
    }

    fn chart(&mut self) -> Result<DslModel, DslError> {
        self.expect(Tok::Keyword("chart"), "`chart`")?;
        let (name, _) = self.ident("chart name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let states = self.states()?;
        self.expect(Tok::RBrace, "`}` or a state declaration")?;
        if self.peek().0 != Tok::Eof {
            return self.fail("end of input");
        }
        Ok(DslModel { name, states })
    }

    /// State declarations up to (not including) the closing brace.
    fn states(&mut self) -> Result<Vec<DslState>, DslError> {
        let mut states = Vec::new();
        loop {
            match &self.peek().0 {
                Tok::RBrace | Tok::Eof => return Ok(states),
                Tok::Arrow => return Err(DslError::at(self.peek().1, DslErrorKind::TransitionOutsideState)),
                Tok::Ident(_) if self.toks.get(self.at + 1).is_some_and(|t| t.0 == Tok::Arrow) => {
                    return Err(DslError::at(self.toks[self.at + 1].1, DslErrorKind::TransitionOutsideState));
                }
                _ => states.push(self.state()?),
            }
        }
    }

    fn state(&mut self) -> Result<DslState, DslError> {
        let mut st = DslState { pos: self.peek().1, ..DslState::default() };
        loop {
            match self.peek().0 {
                Tok::Keyword("initial") => st.initial = true,
                Tok::Keyword("final") => st.is_final = true,
                Tok::Keyword("connector") => st.connector = true,
                _ => break,
            }
            self.next();
        }
        self.expect(Tok::Keyword("state"), "a state declaration")?;
        let (name, _) = self.ident("state name")?;
        st.name = name;
        if self.peek().0 == Tok::LBrace {
            self.next();
            let inner = self.states()?;
            self.expect(Tok::RBrace, "`}` or a state declaration")?;
            if !inner.is_empty() {
                st.children = Some(DslModel { name: st.name.clone(), states: inner });
            }
        }
        while self.peek().0 == Tok::Arrow {
            let pos = self.next().1;
            let (target, _) = self.ident("transition target")?;
            let guard = match self.peek().0.clone() {
                Tok::Guard(g) => {
                    self.next();
                    Some(g)
                }
                _ => None,
            };
            st.transitions.push(DslTransition { target, guard, pos });
        }
        Ok(st)
    }
}

/// Parses a chart and checks names: state names are unique across the chart
/// and every transition targets a state of its own region.
pub fn parse_dsl(text: &str) -> Result<DslModel, DslError> {
    let toks = tokenize(text)?;
    let model = Parser { toks, at: 0 }.chart()?;
    check_names(&model)?;
    Ok(model)
}

fn check_names(model: &DslModel) -> Result<(), DslError> {
    fn collect<'a>(m: &'a DslModel, seen: &mut BTreeSet<&'a str>) -> Result<(), DslError> {
        for s in &m.states {
            if !seen.insert(&s.name) {
                return Err(DslError::at(s.pos, DslErrorKind::DuplicateState(s.name.clone())));
            }
            if let Some(c) = &s.children {
                collect(c, seen)?;
            }
        }
        Ok(())
    }
    collect(model, &mut BTreeSet::new())?;
    resolve(model)
}

fn resolve(model: &DslModel) -> Result<(), DslError> {
    let local: BTreeSet<&str> = model.states.iter().map(|s| s.name.as_str()).collect();
    for s in &model.states {
        for t in &s.transitions {
            if !local.contains(t.target.as_str()) {
                return Err(DslError::at(t.pos, DslErrorKind::UnresolvedTarget(t.target.clone())));
            }
        }
        if let Some(c) = &s.children {
            resolve(c)?;
        }
    }
    Ok(())
}

/// Canonical text form; `parse_dsl(&print_dsl(m)) == m`.
pub fn print_dsl(model: &DslModel) -> String {
    fn states(out: &mut String, list: &[DslState], depth: usize) {
        let pad = "    ".repeat(depth);
        for s in list {
            out.push_str(&pad);
            for (flag, word) in [(s.initial, "initial "), (s.is_final, "final "), (s.connector, "connector ")] {
                if flag {
                    out.push_str(word);
                }
            }
            out.push_str("state ");
            out.push_str(&s.name);
            if let Some(c) = &s.children {
                out.push_str(" {\n");
                states(out, &c.states, depth + 1);
                out.push_str(&pad);
                out.push('}');
            }
            for t in &s.transitions {
                out.push_str(" -> ");
                out.push_str(&t.target);
                if let Some(g) = &t.guard {
                    out.push_str(" [");
                    out.push_str(g);
                    out.push(']');
                }
            }
            out.push('\n');
        }
    }
    let mut out = format!("chart {} {{\n", model.name);
    states(&mut out, &model.states, 1);
    out.push_str("}\n");
    out
}

/// Width of a state box: room for the name, at least 40 units.
pub fn state_width(name: &str) -> f64 {
    (8.0 * name.chars().count() as f64 + 20.0).max(40.0)
}

pub const STATE_HEIGHT: f64 = 30.0;
pub const CONNECTOR_SIZE: f64 = 12.0;

/// Builds the layout graph: one node per state in declaration order, one edge
/// per transition with its 1-based position under the source state as
/// priority label. Edge model order follows (state order, declaration index)
/// and every endpoint receives an implicit port. Direction is downward.
pub fn dsl_to_graph(model: &DslModel) -> Result<Graph, DslError> {
    resolve(model)?;
    region_graph(model)
}

fn region_graph(model: &DslModel) -> Result<Graph, DslError> {
    let mut g = Graph::new(Direction::Down);
    let mut local = Vec::new();
    for s in &model.states {
        let node: &mut Node = g.add_node(s.name.clone());
        node.kind = s.kind().to_string();
        // compound sizes come from their children
        if s.connector && s.children.is_none() {
            node.width = CONNECTOR_SIZE;
            node.height = CONNECTOR_SIZE;
        } else if s.children.is_none() {
            node.width = state_width(&s.name);
            node.height = STATE_HEIGHT;
        }
        if let Some(c) = &s.children {
            node.children = Some(Box::new(region_graph(c)?));
        }
    }
    for s in &model.states {
        for (i, t) in s.transitions.iter().enumerate() {
            let order = g.edges.len();
            let mut e = Edge::new(format!("{}.{}", s.name, i + 1), s.name.clone(), t.target.clone(), order);
            e.priority_label = Some(i as u32 + 1);
            g.edges.push(e);
            local.push(i);
        }
    }
    let g = derive_global_edge_order(&g, &local).expect("one local index per transition");
    Ok(synthesize_implicit_ports(&g))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HANDSHAKE: &str = "chart Handshake {
    initial state Start -> Send [sending] -> Receive [receiving]
    state Send -> C
    state Receive -> C
    connector state C -> Done
    state Done -> Start
}";

    #[test]
    fn empty_chart() {
        assert_eq!(parse_dsl("chart M { }").unwrap(), DslModel { name: "M".into(), states: vec![] });
    }

    #[test]
    fn stray_arrow_at_chart_level() {
        let err = parse_dsl("chart M { initial state A { } state B { } A -> B }").unwrap_err();
        assert_eq!(err.kind, DslErrorKind::TransitionOutsideState);
        assert_eq!((err.line, err.col), (1, 45));
    }

    #[test]
    fn declaration_order_is_kept() {
        let m = parse_dsl(HANDSHAKE).unwrap();
        let names: Vec<_> = m.states.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["Start", "Send", "Receive", "C", "Done"]);
        assert_eq!(m.states[0].transitions[0].guard.as_deref(), Some("sending"));
    }

    #[test]
    fn graph_orders_and_priorities() {
        let g = dsl_to_graph(&parse_dsl(HANDSHAKE).unwrap()).unwrap();
        assert_eq!(g.direction, Direction::Down);
        let mo = |id: &str| g.node(id).unwrap().model_order;
        assert!(mo("Start") < mo("Send") && mo("Send") < mo("Receive"));
        let start: Vec<_> = g.edges.iter().filter(|e| e.source == "Start").collect();
        assert_eq!(start.iter().map(|e| e.model_order).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(start.iter().map(|e| e.priority_label).collect::<Vec<_>>(), vec![Some(1), Some(2)]);
        assert!(crate::graph::validate(&g).is_empty());
    }

    #[test]
    fn swapped_declarations_swap_orders() {
        let text = HANDSHAKE.replace("    state Send -> C\n    state Receive -> C", "    state Receive -> C\n    state Send -> C");
        let g = dsl_to_graph(&parse_dsl(&text).unwrap()).unwrap();
        assert!(g.node("Receive").unwrap().model_order < g.node("Send").unwrap().model_order);
    }

    #[test]
    fn three_transitions_get_priorities() {
        let g = dsl_to_graph(&parse_dsl("chart M { state A -> B -> B -> A state B }").unwrap()).unwrap();
        let p: Vec<_> = g.edges.iter().map(|e| e.priority_label.unwrap()).collect();
        assert_eq!(p, vec![1, 2, 3]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_dsl("chart M {\n  state A -> Z\n}").unwrap_err();
        assert_eq!((e.line, e.col, e.kind), (2, 11, DslErrorKind::UnresolvedTarget("Z".into())));
        let e = parse_dsl("chart M {\n  state A\n  state A\n}").unwrap_err();
        assert_eq!((e.line, e.col), (3, 3));
        let e = parse_dsl("chart M { state A -> B [x }").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::UnterminatedGuard);
        let e = parse_dsl("chart M { state 1 }").unwrap_err();
        assert_eq!((e.line, e.col), (1, 17));
        let e = parse_dsl("chart M { state A ").unwrap_err();
        assert!(matches!(e.kind, DslErrorKind::Expected { .. }));
    }

    #[test]
    fn forward_references_resolve() {
        assert!(parse_dsl("chart M { state A -> B state B }").is_ok());
    }

    #[test]
    fn nested_regions_become_children() {
        let m = parse_dsl("chart M { state Outer { initial state In1 -> In2 state In2 } -> Next state Next }").unwrap();
        let g = dsl_to_graph(&m).unwrap();
        let child = g.nodes[0].children.as_ref().unwrap();
        assert_eq!(child.nodes.len(), 2);
        assert_eq!(child.edges[0].id, "In1.1");
        assert_eq!(g.edges[0].id, "Outer.1");
    }

    #[test]
    fn printer_round_trips() {
        let m = parse_dsl(HANDSHAKE).unwrap();
        assert_eq!(parse_dsl(&print_dsl(&m)).unwrap(), m);
    }
}
