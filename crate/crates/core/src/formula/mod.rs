//! IL formulas over the core connectives `⊥`, `→`, `□`, `▷`.
//!
//! Derived connectives are constructor shorthands that expand eagerly, so two
//! formulas are equal exactly when their core trees are equal.

mod enumerate;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use enumerate::{enumerate_formulas, FormulaEnumerator};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use print::{Printer, Style};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    Implies(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
    Rhd(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn bottom() -> Formula {
        Formula::Bottom
    }

    /// `⊤ := ⊥ → ⊥`
    pub fn top() -> Formula {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn boxed(body: Formula) -> Formula {
        Formula::Box(Arc::new(body))
    }

    pub fn rhd(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Rhd(Arc::new(lhs), Arc::new(rhs))
    }

    /// `¬α := α → ⊥`
    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Formula) -> Formula {
        Formula::implies(body, Formula::Bottom)
    }

    /// `α ∧ β := ¬(α → ¬β)`
    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::not(Formula::implies(lhs, Formula::not(rhs)))
    }

    /// `α ∨ β := ¬α → β`
    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::implies(Formula::not(lhs), rhs)
    }

    /// `α ↔ β := (α → β) ∧ (β → α)`
    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::and(
            Formula::implies(lhs.clone(), rhs.clone()),
            Formula::implies(rhs, lhs),
        )
    }

    /// `◊α := ¬□¬α`
    pub fn diamond(body: Formula) -> Formula {
        Formula::not(Formula::boxed(Formula::not(body)))
    }

    /// Conjunction of a list, `⊤` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list, `⊥` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Bottom,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name.to_string());
            }
            Formula::Bottom => {}
            Formula::Box(body) => body.collect_atoms(out),
            Formula::Implies(a, b) | Formula::Rhd(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Maximal nesting of `□` and `▷`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Implies(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Box(body) => 1 + body.modal_depth(),
            Formula::Rhd(a, b) => 1 + a.modal_depth().max(b.modal_depth()),
        }
    }

    /// Number of connective occurrences (`→`, `□`, `▷`) in the core tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Box(body) => 1 + body.size(),
            Formula::Implies(a, b) | Formula::Rhd(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True if the formula contains no `▷`.
    pub fn is_box_fragment(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::Box(body) => body.is_box_fragment(),
            Formula::Implies(a, b) => a.is_box_fragment() && b.is_box_fragment(),
            Formula::Rhd(..) => false,
        }
    }

    /// Distinct subformulas, children before parents.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        self.push_subformulas(&mut seen, &mut out);
        out
    }

    fn push_subformulas(
        &self,
        seen: &mut std::collections::HashSet<Formula>,
        out: &mut Vec<Formula>,
    ) {
        if seen.contains(self) {
            return;
        }
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::Box(body) => body.push_subformulas(seen, out),
            Formula::Implies(a, b) | Formula::Rhd(a, b) => {
                a.push_subformulas(seen, out);
                b.push_subformulas(seen, out);
            }
        }
        seen.insert(self.clone());
        out.push(self.clone());
    }

    /// Replaces atoms according to `subst`; atoms not in the map stay.
    pub fn substitute(&self, subst: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Atom(name) => subst(name).unwrap_or_else(|| self.clone()),
            Formula::Bottom => Formula::Bottom,
            Formula::Box(body) => Formula::boxed(body.substitute(subst)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(subst), b.substitute(subst)),
            Formula::Rhd(a, b) => Formula::rhd(a.substitute(subst), b.substitute(subst)),
        }
    }

    /// Printed with derived connectives re-sugared.
    pub fn to_sugared(&self) -> String {
        Printer::new(Style::Sugared).print(self)
    }

    pub fn to_unicode(&self) -> String {
        Printer::new(Style::Unicode).print(self)
    }
}

/// Prints the core grammar (`F`, `->`, `[]`, `|>`); `{:#}` re-sugars.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let style = if f.alternate() {
            Style::Sugared
        } else {
            Style::Core
        };
        f.write_str(&Printer::new(style).print(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self:#}`")
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sugared())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}
