//! Graphviz export.
//!
//! Single-agent S5 models whose maximal states are pairwise disjoint render
//! in the boxed style: a dashed cluster per knowledge class with solid
//! sub-clusters for the maximal states. Everything else falls back to
//! labelled accessibility edges plus box nodes for the maximal states.

use crate::epistemic::{classes, s5_report};
use crate::model::InqModel;
use crate::worldset::WorldSet;

fn node_id(w: usize) -> String {
    format!("w{w}")
}

fn world_label(m: &InqModel, w: usize) -> String {
    let mut atoms: Vec<&str> = Vec::new();
    for (p, atom) in m.atoms().iter().enumerate() {
        if m.valuation(p).contains(w) {
            atoms.push(atom);
        }
    }
    if atoms.is_empty() {
        m.world_label(w).to_string()
    } else {
        format!("{}\\n{}", m.world_label(w), atoms.join(" "))
    }
}

fn pairwise_disjoint(states: &[WorldSet]) -> bool {
    for (i, &a) in states.iter().enumerate() {
        for &b in &states[i + 1..] {
            if !a.intersect(b).is_empty() {
                return false;
            }
        }
    }
    true
}

pub fn export_dot(m: &InqModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{}\" {{\n", m.name));
    out.push_str("  node [shape=ellipse];\n");

    let boxed_style = m.agents().len() == 1
        && s5_report(m).pass()
        && classes(m)
            .map(|cls| {
                cls.iter()
                    .all(|&(a, w, _)| pairwise_disjoint(m.state_map(a, w).maximal()))
            })
            .unwrap_or(false);

    if boxed_style {
        let mut placed = WorldSet::EMPTY;
        for (ci, (a, w, class)) in classes(m).expect("validated S5").into_iter().enumerate() {
            out.push_str(&format!("  subgraph cluster_class{ci} {{\n"));
            out.push_str("    style=dashed;\n");
            for (si, &mx) in m.state_map(a, w).maximal().iter().enumerate() {
                if mx.is_empty() {
                    continue;
                }
                out.push_str(&format!("    subgraph cluster_class{ci}_state{si} {{\n"));
                out.push_str("      style=solid;\n");
                for v in mx.iter() {
                    out.push_str(&format!(
                        "      {} [label=\"{}\"];\n",
                        node_id(v),
                        world_label(m, v)
                    ));
                    placed.insert(v);
                }
                out.push_str("    }\n");
            }
            for v in class.difference(placed).iter() {
                out.push_str(&format!(
                    "    {} [label=\"{}\"];\n",
                    node_id(v),
                    world_label(m, v)
                ));
                placed.insert(v);
            }
            out.push_str("  }\n");
        }
        for w in m.all_worlds().difference(placed).iter() {
            out.push_str(&format!(
                "  {} [label=\"{}\"];\n",
                node_id(w),
                world_label(m, w)
            ));
        }
    } else {
        for w in 0..m.world_count() {
            out.push_str(&format!(
                "  {} [label=\"{}\"];\n",
                node_id(w),
                world_label(m, w)
            ));
        }
        // Accessibility edges of the Kripke reduct, labelled by agent.
        let k = m.kripke_reduct();
        for (a, agent) in m.agents().iter().enumerate() {
            for w in 0..m.world_count() {
                for v in k.successors(a, w).iter() {
                    out.push_str(&format!(
                        "  {} -> {} [label=\"{agent}\"];\n",
                        node_id(w),
                        node_id(v)
                    ));
                }
            }
        }
        // Maximal states as box nodes with dotted membership edges.
        let mut sid = 0usize;
        for (a, agent) in m.agents().iter().enumerate() {
            let mut seen: Vec<(usize, WorldSet)> = Vec::new();
            for w in 0..m.world_count() {
                for &mx in m.state_map(a, w).maximal() {
                    if mx.is_empty() {
                        continue;
                    }
                    let id = match seen.iter().find(|(_, s)| *s == mx) {
                        Some(&(id, _)) => id,
                        None => {
                            out.push_str(&format!(
                                "  state{sid} [shape=box, label=\"{}:{}\"];\n",
                                agent,
                                m.state_label(mx)
                            ));
                            seen.push((sid, mx));
                            sid += 1;
                            sid - 1
                        }
                    };
                    let _ = id;
                }
            }
            for (id, s) in seen {
                for v in s.iter() {
                    out.push_str(&format!(
                        "  state{id} -> {} [style=dotted, dir=none];\n",
                        node_id(v)
                    ));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn worked_model_renders_boxed() {
        let m = fixtures::knows_p_wonders_q();
        let dot = export_dot(&m);
        assert!(dot.contains("cluster_class0"));
        assert!(dot.contains("cluster_class1"));
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("style=solid"));
        assert!(dot.contains("w_pq\\np q"));
        // Deterministic output.
        assert_eq!(dot, export_dot(&m));
    }

    #[test]
    fn non_s5_falls_back_to_edges() {
        let (m1, _) = fixtures::issue_granularity_pair();
        let dot = export_dot(&m1);
        assert!(!dot.contains("cluster"));
        assert!(dot.contains("->"));
        assert!(dot.contains("shape=box"));
    }
}
