use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::labels::{node_label, LabelStore, Rgb};
use crate::genome::{Genome, Innovation, NodeKind};
use crate::metrics::ModuleAssignment;

const NEUTRAL: Rgb = Rgb(0x9e, 0x9e, 0x9e);
const LAYER_GAP: f64 = 90.0;
const NODE_GAP: f64 = 70.0;
const MARGIN: f64 = 40.0;
const RADIUS: f64 = 14.0;

/// Ring colors for module overlays, cycled.
const MODULE_COLORS: [Rgb; 8] = [
    Rgb(0x1f, 0x77, 0xb4),
    Rgb(0xff, 0x7f, 0x0e),
    Rgb(0x2c, 0xa0, 0x2c),
    Rgb(0xd6, 0x27, 0x28),
    Rgb(0x94, 0x67, 0xbd),
    Rgb(0x8c, 0x56, 0x4b),
    Rgb(0xe3, 0x77, 0xc2),
    Rgb(0x17, 0xbe, 0xcf),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelGroup {
    pub name: String,
    pub connections: Vec<Innovation>,
}

/// Labeled connections grouped by label name, names and ids ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub groups: Vec<LabelGroup>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedExport {
    pub svg: String,
    pub decomposition: Decomposition,
}

pub fn decomposition(store: &LabelStore) -> Decomposition {
    let mut groups: BTreeMap<&str, Vec<Innovation>> = BTreeMap::new();
    for (&c, label) in &store.labels {
        groups.entry(&label.name).or_default().push(c);
    }
    Decomposition {
        groups: groups
            .into_iter()
            .map(|(name, connections)| LabelGroup {
                name: name.to_string(),
                connections,
            })
            .collect(),
    }
}

/// Depth of every node: inputs at 0, outputs on the top layer, hidden nodes
/// one above their deepest enabled predecessor.
fn depths(genome: &Genome) -> HashMap<Innovation, usize> {
    let order = match genome.topological_order() {
        Ok(order) => order,
        Err(_) => genome.nodes.iter().map(|n| n.innovation).collect(),
    };
    let mut depth: HashMap<Innovation, usize> = HashMap::new();
    for id in &order {
        let d = genome
            .connections
            .iter()
            .filter(|c| c.enabled && c.target == *id)
            .filter_map(|c| depth.get(&c.source).map(|d| d + 1))
            .max()
            .unwrap_or(0);
        let is_input = genome.node(*id).is_some_and(|n| n.kind.is_input());
        depth.insert(*id, if is_input { 0 } else { d.max(1) });
    }
    let top = depth.values().copied().max().unwrap_or(0).max(1);
    for n in genome.nodes.iter().filter(|n| n.kind.is_output()) {
        depth.insert(n.innovation, top);
    }
    depth
}

fn short_kind(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::InputX => "x",
        NodeKind::InputY => "y",
        NodeKind::InputD => "d",
        NodeKind::InputBias => "bias",
        NodeKind::Hidden => "",
        NodeKind::OutputIntensity => "int",
        NodeKind::OutputHue => "hue",
        NodeKind::OutputSaturation => "sat",
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Layered SVG drawing of the genome (inputs at the bottom) with edges and
/// nodes colored by label, plus the label decomposition. `modules` adds a
/// colored ring per module.
pub fn annotate_export(
    genome: &Genome,
    store: &LabelStore,
    modules: Option<&[ModuleAssignment]>,
) -> AnnotatedExport {
    let depth = depths(genome);
    let top = depth.values().copied().max().unwrap_or(0);
    let mut layers: BTreeMap<usize, Vec<Innovation>> = BTreeMap::new();
    for n in &genome.nodes {
        layers
            .entry(depth[&n.innovation])
            .or_default()
            .push(n.innovation);
    }
    let widest = layers.values().map(Vec::len).max().unwrap_or(1);
    let width = 2.0 * MARGIN + (widest.max(1) - 1) as f64 * NODE_GAP;
    let height = 2.0 * MARGIN + top as f64 * LAYER_GAP;
    let mut pos: HashMap<Innovation, (f64, f64)> = HashMap::new();
    for (&d, ids) in &layers {
        let offset = (width - (ids.len() - 1) as f64 * NODE_GAP) / 2.0;
        for (k, id) in ids.iter().enumerate() {
            pos.insert(
                *id,
                (
                    offset + k as f64 * NODE_GAP,
                    height - MARGIN - d as f64 * LAYER_GAP,
                ),
            );
        }
    }
    let module_of: HashMap<Innovation, usize> = modules
        .unwrap_or_default()
        .iter()
        .map(|m| (m.node, m.module))
        .collect();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(svg, r#"<title>{}</title>"#, escape(&genome.id));
    for c in &genome.connections {
        let (Some(&(x1, y1)), Some(&(x2, y2))) = (pos.get(&c.source), pos.get(&c.target)) else {
            continue;
        };
        let label = store.label(c.innovation);
        let color = label.map_or(NEUTRAL, |l| l.color);
        let dash = if c.enabled {
            ""
        } else {
            r#" stroke-dasharray="4 3""#
        };
        let _ = writeln!(
            svg,
            r#"<line class="edge" data-connection="{}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{color}" stroke-width="{:.2}"{dash}><title>{} w={:.3}{}</title></line>"#,
            c.innovation,
            0.75 + c.weight.abs(),
            c.innovation,
            c.weight,
            label
                .map(|l| format!(" {}", escape(&l.name)))
                .unwrap_or_default(),
        );
    }
    for n in &genome.nodes {
        let (x, y) = pos[&n.innovation];
        let label = node_label(genome, store, n.innovation).ok().flatten();
        let fill = label.map_or(Rgb(255, 255, 255), |l| l.color);
        let ring = module_of
            .get(&n.innovation)
            .map_or(Rgb(0x33, 0x33, 0x33), |&m| {
                MODULE_COLORS[m % MODULE_COLORS.len()]
            });
        let ring_width = if module_of.is_empty() { 1.0 } else { 3.0 };
        let _ = writeln!(
            svg,
            r#"<circle class="node" data-node="{}" cx="{x:.1}" cy="{y:.1}" r="{RADIUS}" fill="{fill}" stroke="{ring}" stroke-width="{ring_width}"/>"#,
            n.innovation
        );
        let text = match n.kind {
            NodeKind::Hidden => n.innovation.to_string(),
            kind => short_kind(kind).to_string(),
        };
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y + 3.5,
            escape(&text)
        );
    }
    svg.push_str("</svg>\n");
    AnnotatedExport {
        svg,
        decomposition: decomposition(store),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use crate::genome::{ConnectionGene, NodeGene, Palette};

    fn genome() -> Genome {
        let mut nodes = Genome::io_nodes(Palette::Gray);
        nodes.push(NodeGene::new(7, NodeKind::Hidden, Activation::Sine));
        nodes.push(NodeGene::new(8, NodeKind::Hidden, Activation::Sigmoid));
        Genome::new(
            "g<1>",
            Palette::Gray,
            nodes,
            vec![
                ConnectionGene::new(9, 0, 7, 1.0),
                ConnectionGene::new(10, 7, 8, -2.0),
                ConnectionGene::new(11, 8, 4, 0.5),
                ConnectionGene::new(12, 1, 4, 0.5).disabled(),
            ],
        )
    }

    #[test]
    fn unlabeled_is_neutral() {
        let g = genome();
        let out = annotate_export(&g, &LabelStore::new("g<1>"), None);
        assert_eq!(out.svg.matches("<line").count(), 4);
        assert_eq!(out.svg.matches(r##"stroke="#9e9e9e""##).count(), 4);
        assert!(out.svg.contains("g&lt;1&gt;"));
        assert!(out.decomposition.groups.is_empty());
    }

    #[test]
    fn layers_put_inputs_below_outputs() {
        let d = depths(&genome());
        assert_eq!(d[&Innovation(0)], 0);
        assert_eq!(d[&Innovation(7)], 1);
        assert_eq!(d[&Innovation(8)], 2);
        assert_eq!(d[&Innovation(4)], 3);
    }

    #[test]
    fn decomposition_groups_every_label_once() {
        let g = genome();
        let mut s = LabelStore::new("g<1>");
        s.assign_label(&g, Innovation(9), "eye", Rgb(1, 2, 3))
            .unwrap();
        s.assign_label(&g, Innovation(12), "eye", Rgb(1, 2, 3))
            .unwrap();
        s.assign_label(&g, Innovation(10), "mouth", Rgb(9, 9, 9))
            .unwrap();
        let out = annotate_export(&g, &s, None);
        let groups = &out.decomposition.groups;
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].connections, vec![Innovation(9), Innovation(12)]);
        let total: usize = groups.iter().map(|g| g.connections.len()).sum();
        assert_eq!(total, s.labels.len());
        assert_eq!(out.svg.matches(r##"stroke="#010203""##).count(), 2);
        assert!(out.svg.contains(r##"fill="#010203""##));
    }

    #[test]
    fn module_rings() {
        let g = genome();
        let modules: Vec<ModuleAssignment> = g
            .nodes
            .iter()
            .map(|n| ModuleAssignment {
                node: n.innovation,
                module: (n.innovation.0 % 2) as usize,
            })
            .collect();
        let out = annotate_export(&g, &LabelStore::new("g<1>"), Some(&modules));
        assert!(out.svg.contains(r##"stroke="#1f77b4" stroke-width="3""##));
        assert!(out.svg.contains(r##"stroke="#ff7f0e" stroke-width="3""##));
    }
}
