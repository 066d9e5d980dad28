//! Dominance structure induced by a type ordering.

use std::collections::BTreeMap;

use super::{arc_order_key, require_some_anchor, sort_arcs, IndexError};
use crate::encoding;
use crate::graph::{AnnotationGraph, Arc};
use crate::typeorder::TypeOrder;

/// Arc `p` dominates arc `q` when `p`'s type outranks `q`'s and `p`
/// structurally includes `q`.
pub fn s_dominates(g: &AnnotationGraph, order: &TypeOrder, p: &Arc, q: &Arc) -> bool {
    p != q && order.gt(p.label.type_(), q.label.type_()) && g.s_includes(p, q).unwrap_or(false)
}

/// Maximal arcs that share one set of dominated arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyGroup {
    parents: Vec<Arc>,
    children: Vec<Arc>,
}

impl HierarchyGroup {
    pub fn parents(&self) -> &[Arc] {
        &self.parents
    }

    pub fn children(&self) -> &[Arc] {
        &self.children
    }
}

/// Arcs undominated under the type order, each with everything it
/// dominates; parents with identical child sets are grouped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyIndex {
    groups: Vec<HierarchyGroup>,
    lines: BTreeMap<Arc, String>,
}

impl HierarchyIndex {
    pub fn build(g: &AnnotationGraph, order: &TypeOrder) -> Result<HierarchyIndex, IndexError> {
        require_some_anchor(g)?;
        let arcs: Vec<&Arc> = g.arcs().collect();
        let mut dominated = vec![false; arcs.len()];
        let mut children: Vec<Vec<Arc>> = vec![Vec::new(); arcs.len()];
        for (i, p) in arcs.iter().enumerate() {
            for (j, q) in arcs.iter().enumerate() {
                if i != j && s_dominates(g, order, p, q) {
                    dominated[j] = true;
                    children[i].push((*q).clone());
                }
            }
        }

        // Group maximal arcs by their child sets, order groups by their
        // least parent, and sort members and children alike.
        let mut by_children: BTreeMap<Vec<Arc>, Vec<Arc>> = BTreeMap::new();
        for (i, arc) in arcs.iter().enumerate() {
            if dominated[i] {
                continue;
            }
            let mut kids = std::mem::take(&mut children[i]);
            kids.sort();
            by_children.entry(kids).or_default().push((*arc).clone());
        }
        let mut groups: Vec<HierarchyGroup> = by_children
            .into_iter()
            .map(|(mut children, mut parents)| {
                sort_arcs(g, &mut parents);
                sort_arcs(g, &mut children);
                HierarchyGroup { parents, children }
            })
            .collect();
        groups.sort_by_cached_key(|grp| arc_order_key(g, &grp.parents[0]));

        let lines = g.arcs().map(|a| (a.clone(), encoding::line_for(g, a))).collect();
        Ok(HierarchyIndex { groups, lines })
    }

    pub fn groups(&self) -> &[HierarchyGroup] {
        &self.groups
    }

    pub fn maximal_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.groups.iter().flat_map(|g| g.parents.iter())
    }

    pub fn is_maximal(&self, arc: &Arc) -> bool {
        self.maximal_arcs().any(|a| a == arc)
    }

    /// The arcs `arc` dominates, when `arc` is maximal.
    pub fn children_of(&self, arc: &Arc) -> Option<&[Arc]> {
        self.groups
            .iter()
            .find(|g| g.parents.contains(arc))
            .map(|g| g.children.as_slice())
    }

    /// Every maximal arc dominating `arc`.
    pub fn dominators_of(&self, arc: &Arc) -> Vec<&Arc> {
        self.groups
            .iter()
            .filter(|g| g.children.contains(arc))
            .flat_map(|g| g.parents.iter())
            .collect()
    }

    /// Plain-text layout: maximal arcs flush left, dominated arcs indented
    /// eight spaces beneath the parents that share them.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for group in &self.groups {
            for parent in &group.parents {
                out.push_str(&self.lines[parent]);
                out.push('\n');
            }
            for child in &group.children {
                out.push_str("        ");
                out.push_str(&self.lines[child]);
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::parse;

    const TWO_TURNS: &str = "\
<1/0> speaker/alice <4/3>
<1/0> spkrtype/female <4/3>
<1/0> W/a <2/>
<2/> W/b <3/>
<3/> W/c <4/3>
<5/3> speaker/bob <6/5>
<5/3> spkrtype/male <6/5>
<5/3> W/d <6/5>
";

    fn order(pairs: &[(&str, &str)]) -> TypeOrder {
        TypeOrder::from_pairs(pairs.iter().map(|(a, b)| (a.to_string(), b.to_string()))).unwrap()
    }

    fn arc(g: &AnnotationGraph, label: &str) -> Arc {
        g.arcs().find(|a| format!("{}/{}", a.label.type_(), a.label.content()) == label)
            .unwrap()
            .clone()
    }

    #[test]
    fn turn_arcs_dominate_their_words() {
        let g = parse(TWO_TURNS).unwrap();
        let ord = order(&[("speaker", "W"), ("spkrtype", "W")]);
        let idx = HierarchyIndex::build(&g, &ord).unwrap();
        let alice = arc(&g, "speaker/alice");
        let kids: Vec<&str> =
            idx.children_of(&alice).unwrap().iter().map(|a| a.label.content()).collect();
        assert_eq!(kids, ["a", "b", "c"]);
        let d = arc(&g, "W/d");
        let doms: Vec<&str> =
            idx.dominators_of(&d).iter().map(|a| a.label.type_()).collect();
        assert_eq!(doms, ["speaker", "spkrtype"]);
        assert!(!idx.is_maximal(&d));
    }

    #[test]
    fn parents_sharing_children_render_as_one_block() {
        let g = parse(TWO_TURNS).unwrap();
        let ord = order(&[("speaker", "W"), ("spkrtype", "W")]);
        let idx = HierarchyIndex::build(&g, &ord).unwrap();
        assert_eq!(
            idx.render(),
            "\
<1/0> speaker/alice <4/3>
<1/0> spkrtype/female <4/3>
        <1/0> W/a <2/>
        <2/> W/b <3/>
        <3/> W/c <4/3>
<5/3> speaker/bob <6/5>
<5/3> spkrtype/male <6/5>
        <5/3> W/d <6/5>
"
        );
    }

    #[test]
    fn empty_order_makes_every_arc_maximal() {
        let g = parse(TWO_TURNS).unwrap();
        let idx = HierarchyIndex::build(&g, &TypeOrder::empty()).unwrap();
        assert_eq!(idx.maximal_arcs().count(), g.arc_count());
        assert!(idx.groups().iter().all(|grp| grp.children().is_empty()));
    }

    #[test]
    fn unordered_types_stay_maximal_without_children() {
        let g = parse(TWO_TURNS).unwrap();
        let ord = order(&[("speaker", "W")]);
        let idx = HierarchyIndex::build(&g, &ord).unwrap();
        let female = arc(&g, "spkrtype/female");
        assert!(idx.is_maximal(&female));
        assert_eq!(idx.children_of(&female), Some(&[][..]));
    }

    #[test]
    fn dominance_needs_reachability_not_just_times() {
        // Same times, parallel components: no chain connects the speaker
        // arc to the W arc, so nothing is dominated.
        let g = parse("<1/0> speaker/alice <2/5>\n<3/0> W/x <4/5>\n").unwrap();
        let ord = order(&[("speaker", "W")]);
        let idx = HierarchyIndex::build(&g, &ord).unwrap();
        assert_eq!(idx.maximal_arcs().count(), 2);
        assert!(idx.groups().iter().all(|grp| grp.children().is_empty()));
    }

    #[test]
    fn dominated_sets_are_transitive_and_flat() {
        let g = parse(
            "<1/0> sent/s1 <3/9>\n<1/0> phrase/p1 <3/9>\n<1/0> W/u <2/>\n<2/> W/v <3/9>\n",
        )
        .unwrap();
        let ord = order(&[("sent", "phrase"), ("phrase", "W")]);
        let idx = HierarchyIndex::build(&g, &ord).unwrap();
        let sent = arc(&g, "sent/s1");
        assert!(idx.is_maximal(&sent));
        assert_eq!(idx.maximal_arcs().count(), 1);
        let kids: Vec<String> = idx
            .children_of(&sent)
            .unwrap()
            .iter()
            .map(|a| a.label.type_().to_string())
            .collect();
        assert_eq!(kids, ["W", "W", "phrase"]);
    }
}
