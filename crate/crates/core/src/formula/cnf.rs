//! Conjunctive normal form with exclusivity kept as an opaque literal kind.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::Formula;
use crate::error::{Error, Result};

/// Upper bound on clauses produced by distribution; larger formulas are rejected.
pub const MAX_CLAUSES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiteralBase<A> {
    Atom(A),
    /// Exactly-one over canonical child formulas, sorted.
    Xor(Vec<Formula<A>>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal<A> {
    pub base: LiteralBase<A>,
    pub negated: bool,
}

impl<A> Literal<A> {
    fn complement(&self) -> Self
    where
        A: Clone,
    {
        Literal { base: self.base.clone(), negated: !self.negated }
    }

    pub fn evaluate_with(&self, value: &mut impl FnMut(&A) -> bool) -> bool {
        eval_literal(self, value)
    }

    fn to_formula(&self) -> Formula<A>
    where
        A: Clone,
    {
        let base = match &self.base {
            LiteralBase::Atom(a) => Formula::Atom(a.clone()),
            LiteralBase::Xor(cs) => Formula::Xor(cs.clone()),
        };
        if self.negated {
            Formula::Not(Box::new(base))
        } else {
            base
        }
    }
}

/// Disjunction of literals, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause<A>(pub Vec<Literal<A>>);

impl<A: Clone> Clause<A> {
    /// A clause that is a single positive event.
    pub fn as_atom(&self) -> Option<&A> {
        match self.0.as_slice() {
            [Literal { base: LiteralBase::Atom(a), negated: false }] => Some(a),
            _ => None,
        }
    }

    pub fn evaluate_with(&self, value: &mut impl FnMut(&A) -> bool) -> bool {
        self.0.iter().any(|l| eval_literal(l, value))
    }

    pub fn to_formula(&self) -> Formula<A> {
        if self.0.len() == 1 {
            self.0[0].to_formula()
        } else {
            Formula::Or(self.0.iter().map(Literal::to_formula).collect())
        }
    }

    pub fn atoms(&self) -> Vec<A>
    where
        A: Ord,
    {
        let f = self.to_formula();
        f.atoms().into_iter().cloned().collect()
    }
}

impl Clause<usize> {
    pub fn evaluate(&self, row: &[bool]) -> bool {
        self.evaluate_with(&mut |&a| row[a])
    }
}

fn eval_literal<A>(l: &Literal<A>, value: &mut impl FnMut(&A) -> bool) -> bool {
    let v = match &l.base {
        LiteralBase::Atom(a) => value(a),
        LiteralBase::Xor(cs) => {
            let mut count = 0;
            for c in cs {
                if c.evaluate_with(value) {
                    count += 1;
                    if count > 1 {
                        break;
                    }
                }
            }
            count == 1
        }
    };
    v != l.negated
}

/// Conjunction of clauses, sorted and deduplicated; never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cnf<A>(pub Vec<Clause<A>>);

enum Nnf<A> {
    Lit(Literal<A>),
    And(Vec<Nnf<A>>),
    Or(Vec<Nnf<A>>),
}

fn nnf<A: Ord + Clone>(f: &Formula<A>, negate: bool) -> Result<Nnf<A>> {
    Ok(match f {
        Formula::Atom(a) => Nnf::Lit(Literal { base: LiteralBase::Atom(a.clone()), negated: negate }),
        Formula::Not(c) => nnf(c, !negate)?,
        Formula::And(cs) | Formula::Or(cs) => {
            let children = cs.iter().map(|c| nnf(c, negate)).collect::<Result<Vec<_>>>()?;
            let conjunctive = matches!(f, Formula::And(_)) != negate;
            if conjunctive {
                Nnf::And(children)
            } else {
                Nnf::Or(children)
            }
        }
        Formula::Xor(cs) => {
            let mut children = cs.iter().map(|c| c.canonicalize()).collect::<Result<Vec<_>>>()?;
            children.sort();
            Nnf::Lit(Literal { base: LiteralBase::Xor(children), negated: negate })
        }
    })
}

fn clauses_of<A: Ord + Clone>(f: Nnf<A>) -> Result<Vec<Vec<Literal<A>>>> {
    match f {
        Nnf::Lit(l) => Ok(vec![vec![l]]),
        Nnf::And(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(clauses_of(c)?);
                if out.len() > MAX_CLAUSES {
                    return Err(Error::InvalidParameter(format!(
                        "formula expands to more than {MAX_CLAUSES} clauses"
                    )));
                }
            }
            Ok(out)
        }
        Nnf::Or(cs) => {
            let mut acc: Vec<Vec<Literal<A>>> = vec![Vec::new()];
            for c in cs {
                let rhs = clauses_of(c)?;
                if acc.len().saturating_mul(rhs.len()) > MAX_CLAUSES {
                    return Err(Error::InvalidParameter(format!(
                        "formula expands to more than {MAX_CLAUSES} clauses"
                    )));
                }
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for left in &acc {
                    for right in &rhs {
                        let mut merged = left.clone();
                        merged.extend(right.iter().cloned());
                        next.push(merged);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

impl<A: Ord + Clone> Cnf<A> {
    pub fn from_formula(f: &Formula<A>) -> Result<Self> {
        let raw = clauses_of(nnf(f, false)?)?;
        let mut clauses: Vec<Clause<A>> = Vec::with_capacity(raw.len());
        let mut tautologies: Vec<Clause<A>> = Vec::new();
        for mut lits in raw {
            lits.sort();
            lits.dedup();
            let clause = Clause(lits);
            let tautology = clause.0.iter().any(|l| clause.0.binary_search(&l.complement()).is_ok());
            if tautology {
                tautologies.push(clause);
            } else {
                clauses.push(clause);
            }
        }
        if clauses.is_empty() {
            // Always true; keep one tautology so the formula still has atoms.
            tautologies.sort();
            clauses.push(tautologies.swap_remove(0));
        }
        clauses.sort();
        clauses.dedup();
        Ok(Cnf(clauses))
    }

    pub fn clauses(&self) -> &[Clause<A>] {
        &self.0
    }

    pub fn to_formula(&self) -> Formula<A> {
        if self.0.len() == 1 {
            self.0[0].to_formula()
        } else {
            Formula::And(self.0.iter().map(Clause::to_formula).collect())
        }
    }

    pub fn evaluate_with(&self, value: &mut impl FnMut(&A) -> bool) -> bool {
        self.0.iter().all(|c| c.evaluate_with(value))
    }
}

impl Cnf<usize> {
    pub fn evaluate(&self, row: &[bool]) -> bool {
        self.evaluate_with(&mut |&a| row[a])
    }
}

impl<A: fmt::Display + Clone> fmt::Display for Clause<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

impl<A: fmt::Display + Clone + Ord> fmt::Display for Cnf<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use alloc::string::{String, ToString};

    fn canon(s: &str) -> String {
        parse_formula(s).unwrap().to_cnf().unwrap().to_string()
    }

    #[test]
    fn distributes_or_over_and() {
        assert_eq!(canon("a & b | c"), "(a | c) & (b | c)");
    }

    #[test]
    fn de_morgan() {
        assert_eq!(canon("!(a | b)"), "!a & !b");
        assert_eq!(canon("!(a & b)"), "!a | !b");
        assert_eq!(canon("!!a"), "a");
    }

    #[test]
    fn xor_is_a_literal() {
        assert_eq!(canon("(b ^ a) & c"), "c & (a ^ b)");
        assert_eq!(canon("!(a ^ b)"), "!(a ^ b)");
    }

    #[test]
    fn duplicates_and_tautologies() {
        assert_eq!(canon("a & a"), "a");
        assert_eq!(canon("(a | !a) & b"), "b");
        assert_eq!(canon("a | !a"), "a | !a");
        assert_eq!(canon("b | a | b"), "a | b");
    }

    #[test]
    fn clause_as_atom() {
        let cnf = parse_formula("(a | b) & c").unwrap().to_cnf().unwrap();
        assert_eq!(cnf.clauses().len(), 2);
        assert_eq!(cnf.clauses()[0].as_atom(), None);
        assert_eq!(cnf.clauses()[1].as_atom().map(|s| s.as_str()), Some("c"));
    }

    #[test]
    fn blowup_is_bounded() {
        let big: Vec<String> = (0..13).map(|k| format!("(x{k} & y{k})")).collect();
        let f = parse_formula(&big.join(" | ")).unwrap();
        assert!(matches!(f.to_cnf(), Err(Error::InvalidParameter(_))));
    }
}
