//! Graphviz export of the specialization preorder.

use std::fmt::Write;

use ueq_core::FiniteTopology;

/// A `digraph` with an edge `x -> y` whenever `x` lies in the closure of
/// `{y}`. Self-loops are omitted; nodes and edges appear in index order.
pub fn emit_dot(t: &FiniteTopology) -> String {
    let mut out = String::from("digraph specialization {\n");
    for x in t.carrier().elements() {
        writeln!(out, "  {x};").unwrap();
    }
    for (x, y) in t.specialization_edges() {
        if x != y {
            writeln!(out, "  {x} -> {y};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
