//! Newick text for phylogenetic trees.
//!
//! ```text
//! tree    := node [':' length] ';'
//! node    := leaf | '(' node (',' node)* ')' ':' length
//! leaf    := integer ':' length
//! length  := decimal | 'inf'
//! ```
//!
//! The top-level length is the root edge (0 when omitted). Leaves must be
//! labelled `1..=n`, each once. Vertices are anonymous. `inf` is accepted
//! only by the extended parser. Whitespace between tokens is ignored.

use thiserror::Error;

use crate::length::{EdgeLength, ExtendedLength};
use crate::operad::{ExtendedPhyloTree, OperadError, PhyloTree};
use crate::tree::{PlanarTree, Shape, Source};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NewickError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("leaf labels: {0}")]
    LeafLabel(String),
    #[error("not a phylogenetic tree: {0}")]
    PhyloInvariant(String),
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    allow_inf: bool,
    lengths: Vec<ExtendedLength>,
    labels: Vec<usize>,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, NewickError> {
        Err(NewickError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), NewickError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn token(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && !b"(),:;".contains(&self.text[self.pos]) && !self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.text[start..self.pos]).unwrap_or("")
    }

    fn length(&mut self) -> Result<ExtendedLength, NewickError> {
        let start = self.pos;
        let tok = self.token().to_string();
        if tok == "inf" {
            if !self.allow_inf {
                self.pos = start;
                return self.err("'inf' is only allowed in extended trees");
            }
            return Ok(ExtendedLength::Infinite);
        }
        let ok = !tok.is_empty() && tok.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b));
        match tok.parse::<f64>() {
            Ok(x) if ok && x.is_finite() => Ok(ExtendedLength::Finite(x)),
            _ => {
                self.pos = start;
                self.err(format!("bad length '{tok}'"))
            }
        }
    }

    fn node(&mut self) -> Result<Shape, NewickError> {
        let slot = self.lengths.len();
        self.lengths.push(ExtendedLength::Finite(0.0));
        let shape = if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut kids = vec![self.node()?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                kids.push(self.node()?);
            }
            self.expect(b')')?;
            Shape::Node(kids)
        } else {
            let start = self.pos;
            let tok = self.token().to_string();
            match tok.parse::<usize>() {
                Ok(k) if tok.bytes().all(|b| b.is_ascii_digit()) => {
                    self.labels.push(k);
                    Shape::Leaf(k)
                }
                _ => {
                    self.pos = start;
                    return self.err(format!("expected a leaf label or '(', found '{tok}'"));
                }
            }
        };
        if self.peek() == Some(b':') {
            self.pos += 1;
            self.lengths[slot] = self.length()?;
        } else if slot != 0 {
            return self.err("expected ':' and a branch length");
        }
        Ok(shape)
    }
}

fn parse_with(text: &str, allow_inf: bool) -> Result<(PlanarTree, Vec<ExtendedLength>), NewickError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        allow_inf,
        lengths: Vec::new(),
        labels: Vec::new(),
    };
    let shape = p.node()?;
    p.expect(b';')?;
    if p.peek().is_some() {
        return p.err("trailing input after ';'");
    }
    let n = p.labels.len();
    let mut seen = vec![false; n + 1];
    for &k in &p.labels {
        if k == 0 || k > n {
            return Err(NewickError::LeafLabel(format!("label {k} outside 1..={n}")));
        }
        if seen[k] {
            return Err(NewickError::LeafLabel(format!("label {k} repeated")));
        }
        seen[k] = true;
    }
    let tree = PlanarTree::from_shape(&shape).map_err(|e| NewickError::PhyloInvariant(e.to_string()))?;
    Ok((tree, p.lengths))
}

fn invariant(e: OperadError) -> NewickError {
    NewickError::PhyloInvariant(e.to_string())
}

/// Parses a tree with finite lengths.
pub fn parse_newick(text: &str) -> Result<PhyloTree, NewickError> {
    let (tree, lengths) = parse_with(text, false)?;
    PhyloTree::from_lengths(tree, lengths.iter().map(ExtendedLength::to_f64).collect()).map_err(invariant)
}

/// Parses a tree whose lengths may be `inf`.
pub fn parse_newick_extended(text: &str) -> Result<ExtendedPhyloTree, NewickError> {
    let (tree, lengths) = parse_with(text, true)?;
    PhyloTree::from_lengths(tree, lengths).map_err(invariant)
}

/// Shortest decimal that reads back as the same float, without a
/// trailing `.0`.
pub fn format_length(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

fn format_extended(x: &ExtendedLength) -> String {
    match x {
        ExtendedLength::Finite(v) => format_length(*v),
        ExtendedLength::Infinite => "inf".into(),
    }
}

fn write_with<L: EdgeLength>(t: &PhyloTree<L>, fmt: impl Fn(&L) -> String) -> String {
    let tr = t.tree();
    fn go<L: EdgeLength>(t: &PhyloTree<L>, e: crate::tree::EdgeId, fmt: &dyn Fn(&L) -> String, out: &mut String) {
        let tr = t.tree();
        match tr.source(e) {
            Source::Leaf(k) => out.push_str(&k.to_string()),
            Source::Vertex(v) => {
                out.push('(');
                for (i, &c) in tr.children(v).iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    go(t, c, fmt, out);
                }
                out.push(')');
            }
        }
        out.push(':');
        out.push_str(&fmt(t.length(e)));
    }
    let mut out = String::new();
    go(t, tr.root_edge(), &fmt, &mut out);
    out.push(';');
    out
}

/// Newick text in canonical child order; isomorphic trees give identical
/// text.
pub fn serialize_newick(t: &PhyloTree) -> String {
    write_with(t, |x| format_length(*x))
}

pub fn serialize_newick_extended(t: &ExtendedPhyloTree) -> String {
    write_with(t, format_extended)
}
