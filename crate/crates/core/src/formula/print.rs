use super::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Only `F`, `->`, `[]`, `|>`.
    Core,
    /// ASCII with `T ~ <> & | <->` recovered where the core tree matches.
    Sugared,
    /// Sugared, with the usual logical symbols. Not parseable.
    Unicode,
}

/// Minimal-parenthesis printer; output of the ASCII styles parses back to
/// the same core formula.
#[derive(Debug, Clone, Copy)]
pub struct Printer {
    style: Style,
}

const IMP: u8 = 1;
const RHD: u8 = 2;
const BOOL: u8 = 3;
const PREFIX: u8 = 4;

enum View<'a> {
    Atom(&'a str),
    Bottom,
    Top,
    Not(&'a Formula),
    Box(&'a Formula),
    Diamond(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Rhd(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Iff(&'a Formula, &'a Formula),
}

fn as_not(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Implies(a, b) if **b == Formula::Bottom => Some(a),
        _ => None,
    }
}

fn as_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    let inner = as_not(f)?;
    match inner {
        Formula::Implies(p, nq) => as_not(nq).map(|q| (&**p, q)),
        _ => None,
    }
}

fn as_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (l, r) = as_and(f)?;
    match (l, r) {
        (Formula::Implies(a, b), Formula::Implies(c, d)) if a == d && b == c => Some((a, b)),
        _ => None,
    }
}

fn as_diamond(f: &Formula) -> Option<&Formula> {
    match as_not(f)? {
        Formula::Box(body) => as_not(body),
        _ => None,
    }
}

impl Printer {
    pub fn new(style: Style) -> Self {
        Printer { style }
    }

    pub fn print(&self, f: &Formula) -> String {
        let mut out = String::new();
        self.write(f, IMP, &mut out);
        out
    }

    fn view<'a>(&self, f: &'a Formula) -> View<'a> {
        if self.style != Style::Core {
            if let Formula::Implies(a, b) = f {
                if **a == Formula::Bottom && **b == Formula::Bottom {
                    return View::Top;
                }
            }
            if let Some((a, b)) = as_iff(f) {
                return View::Iff(a, b);
            }
            if let Some((a, b)) = as_and(f) {
                return View::And(a, b);
            }
            if let Some(a) = as_diamond(f) {
                return View::Diamond(a);
            }
            if let Some(a) = as_not(f) {
                return View::Not(a);
            }
            if let Formula::Implies(a, b) = f {
                // `T -> b` and `<>x -> b` read better than `F | b`, `[]~x | b`
                let top_or_diamond = **a == Formula::top() || as_diamond(a).is_some();
                if let Some(na) = as_not(a).filter(|_| !top_or_diamond) {
                    return View::Or(na, b);
                }
            }
        }
        match f {
            Formula::Atom(name) => View::Atom(name),
            Formula::Bottom => View::Bottom,
            Formula::Box(body) => View::Box(body),
            Formula::Implies(a, b) => View::Implies(a, b),
            Formula::Rhd(a, b) => View::Rhd(a, b),
        }
    }

    fn sym(&self, ascii: &'static str, unicode: &'static str) -> &'static str {
        if self.style == Style::Unicode {
            unicode
        } else {
            ascii
        }
    }

    fn write(&self, f: &Formula, min_level: u8, out: &mut String) {
        let view = self.view(f);
        let level = match view {
            View::Atom(_)
            | View::Bottom
            | View::Top
            | View::Not(_)
            | View::Box(_)
            | View::Diamond(_) => PREFIX,
            View::And(..) | View::Or(..) => BOOL,
            View::Rhd(..) => RHD,
            View::Implies(..) | View::Iff(..) => IMP,
        };
        let paren = level < min_level;
        if paren {
            out.push('(');
        }
        match view {
            View::Atom(name) => out.push_str(name),
            View::Bottom => out.push_str(self.sym("F", "⊥")),
            View::Top => out.push_str(self.sym("T", "⊤")),
            View::Not(a) => {
                out.push_str(self.sym("~", "¬"));
                self.write(a, PREFIX, out);
            }
            View::Box(a) => {
                out.push_str(self.sym("[]", "□"));
                self.write(a, PREFIX, out);
            }
            View::Diamond(a) => {
                out.push_str(self.sym("<>", "◊"));
                self.write(a, PREFIX, out);
            }
            View::And(a, b) => self.infix(a, self.sym(" & ", " ∧ "), b, BOOL, PREFIX, out),
            View::Or(a, b) => self.infix(a, self.sym(" | ", " ∨ "), b, BOOL, PREFIX, out),
            View::Rhd(a, b) => self.infix(a, self.sym(" |> ", " ▷ "), b, BOOL, BOOL, out),
            View::Implies(a, b) => self.infix(a, self.sym(" -> ", " → "), b, RHD, IMP, out),
            View::Iff(a, b) => self.infix(a, self.sym(" <-> ", " ↔ "), b, RHD, IMP, out),
        }
        if paren {
            out.push(')');
        }
    }

    fn infix(&self, a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8, out: &mut String) {
        self.write(a, lmin, out);
        out.push_str(op);
        self.write(b, rmin, out);
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::parse;

    use super::*;

    fn round(s: &str, style: Style) -> String {
        Printer::new(style).print(&parse(s).unwrap())
    }

    #[test]
    fn core_printing() {
        assert_eq!(round("F -> F", Style::Core), "F -> F");
        assert_eq!(round("~a", Style::Core), "a -> F");
        assert_eq!(round("(a -> b) -> c", Style::Core), "(a -> b) -> c");
        assert_eq!(round("a |> b -> c", Style::Core), "a |> b -> c");
        assert_eq!(round("(a -> b) |> c", Style::Core), "(a -> b) |> c");
    }

    #[test]
    fn sugared_printing() {
        assert_eq!(round("F -> F", Style::Sugared), "T");
        assert_eq!(round("<>a |> a", Style::Sugared), "<>a |> a");
        assert_eq!(
            round("a |> b -> a & []c |> b & []c", Style::Sugared),
            "a |> b -> a & []c |> b & []c"
        );
        assert_eq!(round("[]p <-> (~p |> F)", Style::Sugared), "[]p <-> ~p |> F");
        assert_eq!(round("a | b & c", Style::Sugared), "a | b & c");
        assert_eq!(round("a & (b | c)", Style::Sugared), "a & (b | c)");
    }

    #[test]
    fn unicode_printing() {
        assert_eq!(round("<>a |> ~a", Style::Unicode), "◊a ▷ ¬a");
        assert_eq!(round("[]a -> F", Style::Unicode), "¬□a");
    }
}
