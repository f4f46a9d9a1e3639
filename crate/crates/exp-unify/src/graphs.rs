//! The variable dependency graph D, the class propagation graph P, and the
//! failure checks.
//!
//! D has one node per variable (plus constant sinks) and one labeled edge
//! per argument position of every equation, active and cold alike. A cycle
//! in D is an occur-check failure. P collapses variables into equivalence
//! classes generated by the base relation of `exp` equations
//! (`U = exp(V, W)` relates U and V) and keeps one edge per `*`-argument
//! relation; a cycle in P means an infinite unifier would be required.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::engine::ProblemState;
use crate::flatten::FlatRhs;
use crate::term::Var;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// Base of an exp equation.
    B,
    /// Exponent of an exp equation.
    E,
    LMul,
    RMul,
    LCMul,
    RCMul,
    G,
    Const,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeLabel::B => "b",
            EdgeLabel::E => "e",
            EdgeLabel::LMul => "l*",
            EdgeLabel::RMul => "r*",
            EdgeLabel::LCMul => "l@",
            EdgeLabel::RCMul => "r@",
            EdgeLabel::G => "g",
            EdgeLabel::Const => "const",
        };
        f.write_str(s)
    }
}

/// Dependency graph over variables. Constant right-hand sides contribute a
/// sink node named after the constant; sinks have no outgoing edges, so
/// they never take part in a cycle.
#[derive(Debug, Clone, Default)]
pub struct DGraph {
    pub nodes: BTreeSet<String>,
    pub edges: Vec<(String, String, EdgeLabel)>,
}

/// Propagation graph over equivalence classes. Classes are held sorted and
/// identified by index.
#[derive(Debug, Clone, Default)]
pub struct PGraph {
    pub classes: Vec<BTreeSet<Var>>,
    pub class_of: BTreeMap<Var, usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl PGraph {
    pub fn class_label(&self, idx: usize) -> String {
        let names: Vec<String> = self.classes[idx].iter().map(|v| v.to_string()).collect();
        format!("{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailCode {
    /// exp against `@` on the same variable.
    F1,
    /// g against `@`.
    F2,
    /// g against `*`.
    F3,
    /// `@` against `*`.
    F4,
    /// Constant against a different constant or a function symbol.
    ConstClash,
    DCycle,
    PCycle,
    /// A `*`-defined and a g-defined variable in one equivalence class.
    GmClash,
}

impl FailCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailCode::F1 => "F1",
            FailCode::F2 => "F2",
            FailCode::F3 => "F3",
            FailCode::F4 => "F4",
            FailCode::ConstClash => "CONST_CLASH",
            FailCode::DCycle => "D_CYCLE",
            FailCode::PCycle => "P_CYCLE",
            FailCode::GmClash => "GM_CLASH",
        }
    }
}

impl fmt::Display for FailCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct FailReason {
    pub code: FailCode,
    /// The offending equations or cycle, rendered.
    pub witness: String,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.witness)
    }
}

/// Build D over active and cold equations.
pub fn build_d(st: &ProblemState) -> DGraph {
    let mut d = DGraph::default();
    for eq in st.all_equations() {
        let from = eq.lhs.0.clone();
        d.nodes.insert(from.clone());
        let mut edge = |to: String, label: EdgeLabel| {
            d.nodes.insert(to.clone());
            d.edges.push((from.clone(), to, label));
        };
        match &eq.rhs {
            FlatRhs::Var(_) => {}
            FlatRhs::Const(c) => edge(c.clone(), EdgeLabel::Const),
            FlatRhs::G(v) => edge(v.0.clone(), EdgeLabel::G),
            FlatRhs::Exp(v, w) => {
                edge(v.0.clone(), EdgeLabel::B);
                edge(w.0.clone(), EdgeLabel::E);
            }
            FlatRhs::Mul(v, w) => {
                edge(v.0.clone(), EdgeLabel::LMul);
                edge(w.0.clone(), EdgeLabel::RMul);
            }
            FlatRhs::CMul(v, w) => {
                edge(v.0.clone(), EdgeLabel::LCMul);
                edge(w.0.clone(), EdgeLabel::RCMul);
            }
        }
    }
    d
}

/// First cycle found in D, as the list of nodes along it. DFS with an
/// explicit path stack; deterministic because nodes and successors are
/// visited in sorted order.
pub fn find_d_cycle(d: &DGraph) -> Option<Vec<String>> {
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (from, to, _) in &d.edges {
        adj.entry(from).or_default().insert(to);
    }
    fn dfs<'a>(
        n: &'a str,
        adj: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        marks: &mut BTreeMap<&'a str, u8>,
        path: &mut Vec<&'a str>,
    ) -> Option<Vec<&'a str>> {
        marks.insert(n, 1);
        path.push(n);
        for &m in adj.get(n).into_iter().flatten() {
            match marks.get(m) {
                Some(1) => {
                    let start = path.iter().position(|x| *x == m).unwrap();
                    return Some(path[start..].to_vec());
                }
                Some(_) => {}
                None => {
                    if let Some(c) = dfs(m, adj, marks, path) {
                        return Some(c);
                    }
                }
            }
        }
        path.pop();
        marks.insert(n, 2);
        None
    }
    let mut marks: BTreeMap<&str, u8> = BTreeMap::new();
    for n in &d.nodes {
        if !marks.contains_key(n.as_str()) {
            let mut path = Vec::new();
            if let Some(c) = dfs(n, &adj, &mut marks, &mut path) {
                return Some(c.into_iter().map(str::to_string).collect());
            }
        }
    }
    None
}

/// Equivalence classes of the reflexive-symmetric-transitive closure of the
/// base relation, over active and cold equations.
fn base_classes(st: &ProblemState) -> (Vec<BTreeSet<Var>>, BTreeMap<Var, usize>) {
    let vars: Vec<Var> = st.all_vars().into_iter().collect();
    let index: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn root(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for eq in st.all_equations() {
        if let FlatRhs::Exp(v, _) = &eq.rhs {
            let a = root(&mut parent, index[&eq.lhs]);
            let b = root(&mut parent, index[v]);
            // Union by smaller root index keeps representatives stable.
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Var>> = BTreeMap::new();
    for (i, v) in vars.iter().enumerate() {
        groups
            .entry(root(&mut parent, i))
            .or_default()
            .insert(v.clone());
    }
    let classes: Vec<BTreeSet<Var>> = groups.into_values().collect();
    let mut class_of = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        for v in c {
            class_of.insert(v.clone(), i);
        }
    }
    (classes, class_of)
}

/// Build P. Only `*` equations contribute edges; `@` does not take part in
/// the propagation relation.
pub fn build_p(st: &ProblemState) -> PGraph {
    let (classes, class_of) = base_classes(st);
    let mut edges = BTreeSet::new();
    for eq in st.all_equations() {
        if let FlatRhs::Mul(v, w) = &eq.rhs {
            let from = class_of[&eq.lhs];
            edges.insert((from, class_of[v]));
            edges.insert((from, class_of[w]));
        }
    }
    PGraph {
        classes,
        class_of,
        edges,
    }
}

/// First cycle in P, as class indices. Self-loops are cycles.
pub fn find_p_cycle(p: &PGraph) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (f, t) in &p.edges {
        adj.entry(*f).or_default().insert(*t);
    }
    // Self-loop first: cheapest witness.
    for (f, t) in &p.edges {
        if f == t {
            return Some(vec![*f]);
        }
    }
    let mut marks: BTreeMap<usize, u8> = BTreeMap::new();
    fn dfs(
        n: usize,
        adj: &BTreeMap<usize, BTreeSet<usize>>,
        marks: &mut BTreeMap<usize, u8>,
        path: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        marks.insert(n, 1);
        path.push(n);
        for &m in adj.get(&n).into_iter().flatten() {
            match marks.get(&m) {
                Some(1) => {
                    let start = path.iter().position(|x| *x == m).unwrap();
                    return Some(path[start..].to_vec());
                }
                Some(_) => {}
                None => {
                    if let Some(c) = dfs(m, adj, marks, path) {
                        return Some(c);
                    }
                }
            }
        }
        path.pop();
        marks.insert(n, 2);
        None
    }
    for n in 0..p.classes.len() {
        if !marks.contains_key(&n) {
            let mut path = Vec::new();
            if let Some(c) = dfs(n, &adj, &mut marks, &mut path) {
                return Some(c);
            }
        }
    }
    None
}

/// The four root-clash rules plus the constant-clash extension, over
/// active equations. Returns the first matching pair in scan order.
pub fn check_root_clashes(st: &ProblemState) -> Option<FailReason> {
    for i in 0..st.active.len() {
        for j in i + 1..st.active.len() {
            let (a, b) = (&st.active[i], &st.active[j]);
            if a.lhs != b.lhs {
                continue;
            }
            let code = match (&a.rhs, &b.rhs) {
                (FlatRhs::Exp(..), FlatRhs::CMul(..)) | (FlatRhs::CMul(..), FlatRhs::Exp(..)) => {
                    Some(FailCode::F1)
                }
                (FlatRhs::G(..), FlatRhs::CMul(..)) | (FlatRhs::CMul(..), FlatRhs::G(..)) => {
                    Some(FailCode::F2)
                }
                (FlatRhs::G(..), FlatRhs::Mul(..)) | (FlatRhs::Mul(..), FlatRhs::G(..)) => {
                    Some(FailCode::F3)
                }
                (FlatRhs::CMul(..), FlatRhs::Mul(..)) | (FlatRhs::Mul(..), FlatRhs::CMul(..)) => {
                    Some(FailCode::F4)
                }
                (FlatRhs::Const(c), FlatRhs::Const(d)) if c != d => Some(FailCode::ConstClash),
                (FlatRhs::Const(_), rhs) | (rhs, FlatRhs::Const(_))
                    if !matches!(rhs, FlatRhs::Var(_) | FlatRhs::Const(_)) =>
                {
                    Some(FailCode::ConstClash)
                }
                _ => None,
            };
            if let Some(code) = code {
                return Some(FailReason {
                    code,
                    witness: format!("{a} ; {b}"),
                });
            }
        }
    }
    None
}

/// Some equivalence class contains both a `*`-defined and a g-defined
/// variable. Definitions are taken over active and cold equations.
pub fn check_gm_clash(st: &ProblemState) -> Option<FailReason> {
    let (classes, class_of) = base_classes(st);
    let n = classes.len();
    let mut mul_def: Vec<Option<&crate::flatten::FlatEq>> = vec![None; n];
    let mut g_def: Vec<Option<&crate::flatten::FlatEq>> = vec![None; n];
    for eq in st.all_equations() {
        match &eq.rhs {
            FlatRhs::Mul(..) => {
                let c = class_of[&eq.lhs];
                mul_def[c].get_or_insert(eq);
            }
            FlatRhs::G(..) => {
                let c = class_of[&eq.lhs];
                g_def[c].get_or_insert(eq);
            }
            _ => {}
        }
    }
    for c in 0..n {
        if let (Some(m), Some(gd)) = (mul_def[c], g_def[c]) {
            return Some(FailReason {
                code: FailCode::GmClash,
                witness: format!("{m} ; {gd} with {} ~ {}", m.lhs, gd.lhs),
            });
        }
    }
    None
}

/// DOT rendering of D, edge labels included.
pub fn dot_d(d: &DGraph) -> String {
    let mut out = String::from("digraph D {\n");
    for n in &d.nodes {
        out.push_str(&format!("  \"{n}\";\n"));
    }
    for (f, t, l) in &d.edges {
        out.push_str(&format!("  \"{f}\" -> \"{t}\" [label=\"{l}\"];\n"));
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of P, nodes labeled with their class members.
pub fn dot_p(p: &PGraph) -> String {
    let mut out = String::from("digraph P {\n");
    for i in 0..p.classes.len() {
        out.push_str(&format!("  c{i} [label=\"{}\"];\n", p.class_label(i)));
    }
    for (f, t) in &p.edges {
        out.push_str(&format!("  c{f} -> c{t};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ProblemState;
    use crate::flatten::flat_eq;

    fn state_of(eqs: &[&str]) -> ProblemState {
        let mut st = ProblemState::new();
        for e in eqs {
            st.push_active(flat_eq(e));
        }
        st
    }

    #[test]
    fn d_edges_for_exp() {
        let d = build_d(&state_of(&["U =? exp(V, W)"]));
        assert_eq!(
            d.edges,
            vec![
                ("U".into(), "V".into(), EdgeLabel::B),
                ("U".into(), "W".into(), EdgeLabel::E)
            ]
        );
        assert!(find_d_cycle(&d).is_none());
    }

    #[test]
    fn d_empty() {
        let d = build_d(&ProblemState::new());
        assert!(d.nodes.is_empty());
        assert!(find_d_cycle(&d).is_none());
    }

    #[test]
    fn d_self_edge_cycle() {
        let d = build_d(&state_of(&["U =? exp(U, W)"]));
        assert_eq!(find_d_cycle(&d), Some(vec!["U".to_string()]));
    }

    #[test]
    fn d_two_step_cycle() {
        let d = build_d(&state_of(&["U =? g(V)", "V =? X * U"]));
        let cyc = find_d_cycle(&d).unwrap();
        assert_eq!(cyc.len(), 2);
        assert!(cyc.contains(&"U".to_string()) && cyc.contains(&"V".to_string()));
    }

    #[test]
    fn p_classes_and_self_loop() {
        // U = exp(X, W), U = X * Y: classes {U, X}, {W}, {Y};
        // the * equation puts a self-loop on {U, X} and an edge to {Y}.
        let st = state_of(&["U =? exp(X, W)", "U =? X * Y"]);
        let p = build_p(&st);
        assert_eq!(p.classes.len(), 3);
        let ux = p.class_of[&Var::new("U")];
        assert_eq!(ux, p.class_of[&Var::new("X")]);
        assert!(p.edges.contains(&(ux, ux)));
        assert!(p.edges.contains(&(ux, p.class_of[&Var::new("Y")])));
        assert_eq!(find_p_cycle(&p), Some(vec![ux]));
    }

    #[test]
    fn p_exp_only_no_edges() {
        let p = build_p(&state_of(&["U =? exp(V, W)"]));
        assert_eq!(p.classes.len(), 2);
        assert!(p.edges.is_empty());
        assert!(find_p_cycle(&p).is_none());
    }

    #[test]
    fn p_singleton_classes_for_mul() {
        let p = build_p(&state_of(&["U =? X * Y"]));
        assert_eq!(p.classes.len(), 3);
        assert_eq!(p.edges.len(), 2);
        assert!(find_p_cycle(&p).is_none());
    }

    #[test]
    fn p_two_class_cycle() {
        let st = state_of(&["U =? X * X", "X =? U * U"]);
        let p = build_p(&st);
        assert!(find_p_cycle(&p).is_some());
    }

    #[test]
    fn clash_f3() {
        let r = check_root_clashes(&state_of(&["U =? g(V)", "U =? X * Y"])).unwrap();
        assert_eq!(r.code, FailCode::F3);
    }

    #[test]
    fn clash_f1() {
        let r = check_root_clashes(&state_of(&["U =? exp(V, W)", "U =? X @ Y"])).unwrap();
        assert_eq!(r.code, FailCode::F1);
    }

    #[test]
    fn clash_const_vs_g() {
        let r = check_root_clashes(&state_of(&["U =? c", "U =? g(V)"])).unwrap();
        assert_eq!(r.code, FailCode::ConstClash);
    }

    #[test]
    fn const_same_is_not_a_clash() {
        assert!(check_root_clashes(&state_of(&["U =? c", "U =? c"])).is_none());
    }

    #[test]
    fn gm_clash_through_class() {
        let st = state_of(&["U =? exp(V, W)", "U =? X * Y", "V =? g(Z)"]);
        let r = check_gm_clash(&st).unwrap();
        assert_eq!(r.code, FailCode::GmClash);
    }

    #[test]
    fn gm_no_clash_when_unrelated() {
        let st = state_of(&["U =? X * Y", "V =? g(Z)"]);
        assert!(check_gm_clash(&st).is_none());
    }

    #[test]
    fn gm_two_g_defs_fine() {
        let st = state_of(&["U =? exp(V, W)", "U =? g(Z)", "V =? g(Z2)"]);
        assert!(check_gm_clash(&st).is_none());
    }

    #[test]
    fn dot_output_mentions_labels() {
        let d = build_d(&state_of(&["U =? exp(V, W)", "U =? c"]));
        let dot = dot_d(&d);
        assert!(dot.contains("label=\"b\""));
        assert!(dot.contains("label=\"e\""));
        assert!(dot.contains("label=\"const\""));
        let p = build_p(&state_of(&["U =? exp(X, W)", "U =? X * Y"]));
        let dot = dot_p(&p);
        assert!(dot.contains("c0 ->"));
    }
}
