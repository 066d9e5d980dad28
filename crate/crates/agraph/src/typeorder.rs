//! Strict partial orders over label types.
//!
//! A `TypeOrder` ranks types for dominance checks: `speaker > W` says a
//! speaker arc may dominate word arcs. Orders are irreflexive and acyclic,
//! and comparisons apply transitivity on demand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Error for self-comparisons and cyclic orders.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid type order: {0}")]
pub struct InvalidTypeOrder(pub String);

/// A strict partial order over label types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeOrder {
    above: BTreeMap<String, BTreeSet<String>>,
}

impl TypeOrder {
    /// The empty order: no type outranks any other.
    pub fn empty() -> TypeOrder {
        TypeOrder::default()
    }

    /// Builds an order from `(higher, lower)` pairs.
    pub fn from_pairs<I, S>(pairs: I) -> Result<TypeOrder, InvalidTypeOrder>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut above: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (hi, lo) in pairs {
            let hi = hi.into();
            let lo = lo.into();
            if hi == lo {
                return Err(InvalidTypeOrder(format!("{hi} > {lo} is reflexive")));
            }
            above.entry(hi).or_default().insert(lo);
        }
        let order = TypeOrder { above };
        if let Some(cycle) = order.find_cycle() {
            return Err(InvalidTypeOrder(format!("cycle through {}", cycle.join(" > "))));
        }
        Ok(order)
    }

    /// Parses lines of the form `HIGH > LOW`; blank lines and `#` comments
    /// are ignored.
    pub fn parse(text: &str) -> Result<TypeOrder, InvalidTypeOrder> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('>');
            let (hi, lo) = match (parts.next(), parts.next(), parts.next()) {
                (Some(hi), Some(lo), None) => (hi.trim(), lo.trim()),
                _ => {
                    return Err(InvalidTypeOrder(format!(
                        "line {}: expected `HIGH > LOW`, got {line:?}",
                        idx + 1
                    )))
                }
            };
            if hi.is_empty() || lo.is_empty() {
                return Err(InvalidTypeOrder(format!(
                    "line {}: expected `HIGH > LOW`, got {line:?}",
                    idx + 1
                )));
            }
            pairs.push((hi.to_string(), lo.to_string()));
        }
        TypeOrder::from_pairs(pairs)
    }

    /// Whether `hi` outranks `lo`, applying transitivity.
    pub fn gt(&self, hi: &str, lo: &str) -> bool {
        if hi == lo {
            return false;
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue: Vec<&str> = vec![hi];
        while let Some(x) = queue.pop() {
            for next in self.above.get(x).into_iter().flatten() {
                if next == lo {
                    return true;
                }
                if seen.insert(next) {
                    queue.push(next);
                }
            }
        }
        false
    }

    /// The direct `(higher, lower)` pairs as declared.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.above
            .iter()
            .flat_map(|(hi, los)| los.iter().map(move |lo| (hi.as_str(), lo.as_str())))
    }

    pub fn is_empty(&self) -> bool {
        self.above.is_empty()
    }

    fn find_cycle(&self) -> Option<Vec<String>> {
        let mut nodes: BTreeSet<&String> = self.above.keys().collect();
        for los in self.above.values() {
            nodes.extend(los);
        }
        // Kahn's algorithm: leftover nodes form a cycle.
        let mut indeg: BTreeMap<&String, usize> = nodes.iter().map(|n| (*n, 0)).collect();
        for los in self.above.values() {
            for lo in los {
                *indeg.get_mut(lo).unwrap() += 1;
            }
        }
        let mut ready: Vec<&String> =
            indeg.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut remaining = nodes.len();
        while let Some(n) = ready.pop() {
            remaining -= 1;
            for lo in self.above.get(n.as_str()).into_iter().flatten() {
                let d = indeg.get_mut(lo).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(lo);
                }
            }
        }
        if remaining == 0 {
            None
        } else {
            let cyclic: Vec<String> = indeg
                .iter()
                .filter(|(_, d)| **d > 0)
                .map(|(n, _)| (*n).clone())
                .collect();
            Some(cyclic)
        }
    }
}

impl fmt::Display for TypeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> =
            self.pairs().map(|(hi, lo)| format!("{hi} > {lo}")).collect();
        f.write_str(&lines.join("\n"))
    }
}
