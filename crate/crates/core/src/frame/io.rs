//! Line-oriented frame format:
//!
//! ```text
//! worlds 3
//! R 0 1            # edges; closed on load unless `option closure off`
//! S 0 1 2
//! val p 1 2
//! option closure on
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::{complete, CompleteError, Frame, Model, Relation, Valuation, Validation, World};

#[derive(Debug, Error)]
pub enum FrameIoError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `worlds <n>` line")]
    MissingWorlds,
    #[error(transparent)]
    Complete(#[from] CompleteError),
    #[error("frame violates {} law(s); first: {}", .0.violations.len(), .0.violations[0])]
    Invalid(Validation),
    #[error("cannot read {path}")]
    Read {
        path: String,
        source: std::io::Error,
    },
}

/// A parsed frame file.
#[derive(Debug, Clone)]
pub struct LoadedFrame {
    pub frame: Arc<Frame>,
    pub valuation: Valuation,
    /// Whether the closure step ran.
    pub closed: bool,
}

impl LoadedFrame {
    pub fn model(&self) -> Model {
        Model::new(self.frame.clone(), self.valuation.clone())
    }
}

pub fn read_frame_file(path: impl AsRef<Path>) -> Result<LoadedFrame, FrameIoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FrameIoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_frame_text(&text)
}

pub fn parse_frame_text(text: &str) -> Result<LoadedFrame, FrameIoError> {
    let mut n: Option<usize> = None;
    let mut r_edges = Vec::new();
    let mut s_seeds = Vec::new();
    let mut vals: Vec<(String, Vec<World>)> = Vec::new();
    let mut closure = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| FrameIoError::Syntax { line, msg };
        let mut words = content.split_whitespace();
        let head = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        let nums = |args: &[&str]| -> Result<Vec<usize>, FrameIoError> {
            args.iter()
                .map(|a| {
                    a.parse::<usize>()
                        .map_err(|_| err(format!("expected a world number, found `{a}`")))
                })
                .collect()
        };
        let world_count = || n.ok_or(FrameIoError::MissingWorlds);
        let in_range = |ws: &[usize], n: usize| -> Result<(), FrameIoError> {
            match ws.iter().find(|&&w| w >= n) {
                Some(w) => Err(err(format!("world {w} out of range (worlds {n})"))),
                None => Ok(()),
            }
        };
        match head {
            "worlds" => {
                if n.is_some() {
                    return Err(err("duplicate `worlds` line".into()));
                }
                let v = nums(&rest)?;
                if v.len() != 1 {
                    return Err(err("`worlds` takes one number".into()));
                }
                n = Some(v[0]);
            }
            "R" => {
                let v = nums(&rest)?;
                if v.len() != 2 {
                    return Err(err("`R` takes two worlds".into()));
                }
                in_range(&v, world_count()?)?;
                r_edges.push((v[0], v[1]));
            }
            "S" => {
                let v = nums(&rest)?;
                if v.len() != 3 {
                    return Err(err("`S` takes three worlds".into()));
                }
                in_range(&v, world_count()?)?;
                s_seeds.push((v[0], v[1], v[2]));
            }
            "val" => {
                let Some((atom, ws)) = rest.split_first() else {
                    return Err(err("`val` needs an atom name".into()));
                };
                if crate::formula::parse(atom).ok() != Some(crate::formula::Formula::atom(atom)) {
                    return Err(err(format!("`{atom}` is not an atom name")));
                }
                let v = nums(ws)?;
                in_range(&v, world_count()?)?;
                vals.push((atom.to_string(), v));
            }
            "option" => match rest.as_slice() {
                ["closure", "on"] => closure = true,
                ["closure", "off"] => closure = false,
                _ => return Err(err(format!("unknown option `{}`", rest.join(" ")))),
            },
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let n = n.ok_or(FrameIoError::MissingWorlds)?;
    let frame = if closure {
        complete(n, &r_edges, &s_seeds)?
    } else {
        let mut s = vec![Relation::new(n); n];
        for &(w, i, j) in &s_seeds {
            s[w].insert(i, j);
        }
        let fr = Frame::new(n, Relation::from_pairs(n, r_edges.iter().copied()), s);
        let verdict = fr.validate();
        if !verdict.is_ok() {
            return Err(FrameIoError::Invalid(verdict));
        }
        fr
    };
    let mut valuation = Valuation::new(n);
    for (atom, ws) in vals {
        let mut set = valuation.eval(&atom);
        for w in ws {
            set.insert(w);
        }
        valuation.set(&atom, set);
    }
    Ok(LoadedFrame {
        frame: Arc::new(frame),
        valuation,
        closed: closure,
    })
}

/// Serializes the frame in full (closure off), so loading it back is exact.
pub fn to_text(frame: &Frame, valuation: Option<&Valuation>) -> String {
    let mut out = String::new();
    writeln!(out, "worlds {}", frame.n()).unwrap();
    for (a, b) in frame.r().pairs() {
        writeln!(out, "R {a} {b}").unwrap();
    }
    for w in frame.worlds() {
        for (i, j) in frame.s(w).pairs() {
            writeln!(out, "S {w} {i} {j}").unwrap();
        }
    }
    if let Some(val) = valuation {
        for (atom, set) in val.iter() {
            write!(out, "val {atom}").unwrap();
            for w in set {
                write!(out, " {w}").unwrap();
            }
            out.push('\n');
        }
    }
    out.push_str("option closure off\n");
    out
}

/// Graphviz rendering: R solid, `S_w` dashed with label `S(w)`. Reflexive
/// S pairs are implied by the frame laws and left out.
pub fn to_dot(frame: &Frame, valuation: Option<&Valuation>) -> String {
    let mut out = String::from("digraph frame {\n");
    for w in frame.worlds() {
        let atoms = valuation.map(|v| v.true_at(w)).unwrap_or_default();
        if atoms.is_empty() {
            writeln!(out, "  {w};").unwrap();
        } else {
            writeln!(out, "  {w} [label=\"{w}\\n{}\"];", atoms.join(",")).unwrap();
        }
    }
    for (a, b) in frame.r().pairs() {
        writeln!(out, "  {a} -> {b};").unwrap();
    }
    for w in frame.worlds() {
        for (i, j) in frame.s(w).pairs().filter(|(i, j)| i != j) {
            writeln!(out, "  {i} -> {j} [style=dashed, label=\"S({w})\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{chain, random_frame};

    #[test]
    fn loads_with_closure() {
        let lf = parse_frame_text("# comment\nworlds 3\nR 0 1\nR 1 2 # trailing\nS 0 1 2\nval p 1\nval q 2\n").unwrap();
        assert_eq!(lf.frame.r().pairs().count(), 3);
        assert_eq!(lf.frame.s(0).pairs().count(), 3);
        assert_eq!(lf.valuation.eval("p").to_vec(), vec![1]);
        assert!(lf.valuation.eval("r").is_empty());
        assert!(lf.closed);
    }

    #[test]
    fn closure_off_validates() {
        let err = parse_frame_text("worlds 2\nR 0 1\noption closure off\n").unwrap_err();
        assert!(matches!(err, FrameIoError::Invalid(_)));
        assert!(parse_frame_text("worlds 2\nR 0 1\nS 0 1 1\noption closure off\n").is_ok());
    }

    #[test]
    fn reports_errors_with_lines() {
        let err = parse_frame_text("worlds 2\nR 0 5\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: world 5 out of range (worlds 2)");
        let err = parse_frame_text("worlds 2\nQ 0 1\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2"));
        assert!(matches!(parse_frame_text("R 0 1\n"), Err(FrameIoError::MissingWorlds)));
        let err = parse_frame_text("worlds 2\nR 0 1\nR 1 0\n").unwrap_err();
        assert_eq!(err.to_string(), "closure introduces a cycle: 0→1→0");
        assert!(parse_frame_text("worlds 2\nval P 0\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        for seed in 0..30 {
            let fr = random_frame(5, seed);
            let val = Valuation::new(5).with("p", &[0, 3]).with("q", &[]);
            let back = parse_frame_text(&to_text(&fr, Some(&val))).unwrap();
            assert_eq!(*back.frame, fr);
            assert_eq!(back.valuation, val);
        }
    }

    #[test]
    fn dot_output() {
        let val = Valuation::new(3).with("p", &[1]);
        let dot = to_dot(&chain(3), Some(&val));
        assert!(dot.contains("  0 -> 2;"));
        assert!(dot.contains("  1 -> 2 [style=dashed, label=\"S(0)\"];"));
        assert!(dot.contains("  1 [label=\"1\\np\"];"));
        assert!(!dot.contains("1 -> 1"));
    }
}
