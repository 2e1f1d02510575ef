//! Propositional formulas over events and selectivity hypotheses `formula -> event`.
//!
//! Concrete syntax: `!` (not), `&` (and), `^` (exclusive or), `|` (or), with that
//! precedence from tightest to loosest, plus parentheses. Unicode `¬ ∧ ⊕ ∨` are
//! accepted as aliases and `▷` as an alias for `->`. `^` is "exactly one operand
//! true": an unparenthesized chain `a ^ b ^ c` is one three-way exclusivity, while
//! `(a ^ b) ^ c` nests.

mod cnf;
mod parser;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use cnf::{Clause, Cnf, Literal, LiteralBase};
pub use parser::{parse_formula, parse_hypothesis, parse_statement, Statement, SyntaxError};

use crate::error::{Error, Result};
use crate::matrix::EventCatalog;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula<A = String> {
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
    /// Exactly one child is true.
    Xor(Vec<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    pub fn negate(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn atoms(&self) -> BTreeSet<&A>
    where
        A: Ord,
    {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a A>)
    where
        A: Ord,
    {
        match self {
            Formula::Atom(a) => {
                out.insert(a);
            }
            Formula::Not(c) => c.collect_atoms(out),
            Formula::And(cs) | Formula::Or(cs) | Formula::Xor(cs) => {
                cs.iter().for_each(|c| c.collect_atoms(out))
            }
        }
    }

    pub fn try_map_atoms<B, E>(&self, f: &mut dyn FnMut(&A) -> Result<B, E>) -> Result<Formula<B>, E> {
        let mut map_all = |cs: &[Formula<A>]| -> Result<Vec<Formula<B>>, E> {
            cs.iter().map(|c| c.try_map_atoms(f)).collect()
        };
        Ok(match self {
            Formula::Atom(a) => Formula::Atom(f(a)?),
            Formula::Not(c) => Formula::Not(Box::new(c.try_map_atoms(f)?)),
            Formula::And(cs) => Formula::And(map_all(cs)?),
            Formula::Or(cs) => Formula::Or(map_all(cs)?),
            Formula::Xor(cs) => Formula::Xor(map_all(cs)?),
        })
    }

    pub fn evaluate_with(&self, value: &mut impl FnMut(&A) -> bool) -> bool {
        match self {
            Formula::Atom(a) => value(a),
            Formula::Not(c) => !c.evaluate_with(value),
            Formula::And(cs) => cs.iter().all(|c| c.evaluate_with(value)),
            Formula::Or(cs) => cs.iter().any(|c| c.evaluate_with(value)),
            Formula::Xor(cs) => {
                let mut seen = false;
                for c in cs {
                    if c.evaluate_with(value) {
                        if seen {
                            return false;
                        }
                        seen = true;
                    }
                }
                seen
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(c) => 1 + c.depth(),
            Formula::And(cs) | Formula::Or(cs) | Formula::Xor(cs) => {
                1 + cs.iter().map(Formula::depth).max().unwrap_or(0)
            }
        }
    }
}

impl Formula<usize> {
    /// Evaluates against a row indexed by event ordinal.
    pub fn evaluate(&self, row: &[bool]) -> bool {
        self.evaluate_with(&mut |&a| row[a])
    }
}

impl Formula<String> {
    pub fn bind(&self, catalog: &EventCatalog) -> Result<Formula<usize>> {
        self.try_map_atoms(&mut |name: &String| {
            catalog.lookup(name).map(|id| id.0).ok_or_else(|| Error::UnknownEvent(name.clone()))
        })
    }

    /// Evaluates with a by-name lookup; an atom the lookup does not know is a
    /// binding error.
    pub fn evaluate_named(&self, lookup: impl Fn(&str) -> Option<bool>) -> Result<bool> {
        let bound = self.try_map_atoms(&mut |name: &String| {
            lookup(name).ok_or_else(|| Error::UnknownEvent(name.clone()))
        })?;
        Ok(bound.evaluate_with(&mut |&v| v))
    }
}

impl<A: Ord + Clone> Formula<A> {
    pub fn to_cnf(&self) -> Result<Cnf<A>> {
        Cnf::from_formula(self)
    }

    /// The formula rebuilt from its canonical CNF.
    pub fn canonicalize(&self) -> Result<Formula<A>> {
        Ok(self.to_cnf()?.to_formula())
    }
}

/// Names that print without quotes.
pub(crate) fn is_plain_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | ':'))
}

pub(crate) fn write_atom(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_identifier(name) {
        f.write_str(name)
    } else {
        f.write_str("\"")?;
        for c in name.chars() {
            if c == '"' || c == '\\' {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("\"")
    }
}

fn precedence<A>(f: &Formula<A>) -> u8 {
    match f {
        Formula::Or(_) => 1,
        Formula::Xor(_) => 2,
        Formula::And(_) => 3,
        Formula::Not(_) | Formula::Atom(_) => 4,
    }
}

impl<A: fmt::Display> Formula<A> {
    fn fmt_child(&self, child: &Formula<A>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Same-kind children of a chain must be parenthesized to keep the tree.
        if precedence(child) <= precedence(self) && !matches!(child, Formula::Atom(_) | Formula::Not(_)) {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (cs, op) = match self {
            Formula::Atom(a) => {
                let s = alloc::format!("{a}");
                return write_atom(f, &s);
            }
            Formula::Not(c) => {
                f.write_str("!")?;
                return match **c {
                    Formula::Atom(_) | Formula::Not(_) => write!(f, "{c}"),
                    _ => write!(f, "({c})"),
                };
            }
            Formula::And(cs) => (cs, " & "),
            Formula::Or(cs) => (cs, " | "),
            Formula::Xor(cs) => (cs, " ^ "),
        };
        for (k, c) in cs.iter().enumerate() {
            if k > 0 {
                f.write_str(op)?;
            }
            self.fmt_child(c, f)?;
        }
        Ok(())
    }
}

/// A selectivity hypothesis `formula -> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis<A = String> {
    pub formula: Formula<A>,
    pub target: A,
}

impl<A: Ord> Hypothesis<A> {
    /// The target may not occur among the formula's atoms.
    pub fn is_well_formed(&self) -> bool {
        !self.formula.atoms().contains(&self.target)
    }
}

impl<A: fmt::Display> fmt::Display for Hypothesis<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.formula)?;
        let t = alloc::format!("{}", self.target);
        write_atom(f, &t)
    }
}

/// A hypothesis resolved against an event catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundHypothesis {
    pub formula: Formula<usize>,
    pub cnf: Cnf<usize>,
    pub target: usize,
    /// Source text, for reports.
    pub text: String,
}

impl Hypothesis<String> {
    pub fn bind(&self, catalog: &EventCatalog) -> Result<BoundHypothesis> {
        if !self.is_well_formed() {
            return Err(Error::TargetInFormula { target: self.target.clone() });
        }
        let formula = self.formula.bind(catalog)?;
        let target = catalog
            .lookup(&self.target)
            .ok_or_else(|| Error::UnknownEvent(self.target.clone()))?
            .0;
        let cnf = formula.to_cnf()?;
        Ok(BoundHypothesis { formula, cnf, target, text: alloc::format!("{self}") })
    }

    /// One hypothesis per event of the catalog that does not occur in `formula`.
    pub fn expand(formula: &Formula<String>, catalog: &EventCatalog) -> Vec<Hypothesis<String>> {
        let atoms = formula.atoms();
        catalog
            .names()
            .iter()
            .filter(|n| !atoms.contains(n))
            .map(|n| Hypothesis { formula: formula.clone(), target: n.clone() })
            .collect()
    }
}
