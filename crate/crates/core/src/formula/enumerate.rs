use super::Formula;

/// Deterministic generator of every formula over an atom pool whose modal
/// depth and size (connective count) stay within the given bounds.
///
/// Order: by size; within a size leaves (`F`, then atoms in pool order),
/// then `□`, `→`, `▷`; binary nodes by left-operand size, then left operand,
/// then right operand.
#[derive(Debug, Clone)]
pub struct FormulaEnumerator {
    pool: Vec<String>,
    depth: usize,
    size: usize,
}

impl FormulaEnumerator {
    pub fn new<S: AsRef<str>>(pool: &[S], depth: usize, size: usize) -> Self {
        let mut names: Vec<String> = Vec::new();
        for a in pool {
            let a = a.as_ref().to_string();
            if !names.contains(&a) {
                names.push(a);
            }
        }
        FormulaEnumerator {
            pool: names,
            depth,
            size,
        }
    }

    /// Number of formulas the enumeration yields, without building them.
    /// Saturates at `u128::MAX`.
    pub fn count(&self) -> u128 {
        // le[s][k]: formulas of size s with modal depth <= k
        let d = self.depth;
        let mut le = vec![vec![0u128; d + 1]; self.size + 1];
        le[0].fill(self.pool.len() as u128 + 1);
        for s in 1..=self.size {
            for k in 0..=d {
                let mut total: u128 = 0;
                for i in 0..s {
                    let j = s - 1 - i;
                    total = total.saturating_add(le[i][k].saturating_mul(le[j][k]));
                    if k >= 1 {
                        total = total.saturating_add(le[i][k - 1].saturating_mul(le[j][k - 1]));
                    }
                }
                if k >= 1 {
                    total = total.saturating_add(le[s - 1][k - 1]);
                }
                le[s][k] = total;
            }
        }
        le.iter().map(|row| row[d]).fold(0u128, u128::saturating_add)
    }

    pub fn collect_all(&self) -> Vec<Formula> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Formula> + '_ {
        let mut layers: Vec<Vec<Formula>> = Vec::new();
        (0..=self.size).flat_map(move |s| {
            let layer = self.layer(s, &layers);
            layers.push(layer.clone());
            layer.into_iter()
        })
    }

    fn layer(&self, s: usize, below: &[Vec<Formula>]) -> Vec<Formula> {
        let mut out = Vec::new();
        if s == 0 {
            out.push(Formula::Bottom);
            out.extend(self.pool.iter().map(|a| Formula::atom(a)));
            return out;
        }
        let d = self.depth;
        for body in &below[s - 1] {
            if body.modal_depth() < d {
                out.push(Formula::boxed(body.clone()));
            }
        }
        for i in 0..s {
            let j = s - 1 - i;
            for lhs in &below[i] {
                for rhs in &below[j] {
                    out.push(Formula::implies(lhs.clone(), rhs.clone()));
                }
            }
        }
        for i in 0..s {
            let j = s - 1 - i;
            for lhs in below[i].iter().filter(|f| f.modal_depth() < d) {
                for rhs in below[j].iter().filter(|f| f.modal_depth() < d) {
                    out.push(Formula::rhd(lhs.clone(), rhs.clone()));
                }
            }
        }
        out
    }
}

/// All formulas over `pool` within the depth and size bounds, in the
/// deterministic order of [`FormulaEnumerator`].
pub fn enumerate_formulas<S: AsRef<str>>(pool: &[S], depth: usize, size: usize) -> Vec<Formula> {
    FormulaEnumerator::new(pool, depth, size).collect_all()
}
