//! Evaluation and rendering of CPPN genomes.
//!
//! A genome is compiled once into a flat evaluation plan (nodes in Kahn
//! order with ties broken by ascending innovation) and then queried per
//! pixel. The plan only contains enabled connections.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::{Activation, ActivationParams};
use crate::genome::{Genome, Innovation, NodeKind, Violation};
use crate::image::ImageBuffer;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CppnError {
    #[error("invalid genome: {0:?}")]
    InvalidGenome(Vec<Violation>),
    #[error("unknown node {0}")]
    UnknownNode(Innovation),
    #[error("unknown connection {0}")]
    UnknownConnection(Innovation),
    #[error("connection {0} is disabled")]
    DisabledConnection(Innovation),
    #[error("image dimensions must be at least 1x1, got {0}x{1}")]
    InvalidSize(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CppnConfig {
    pub activation: ActivationParams,
    /// When false the distance input is held at 0 (strict two-input mode).
    pub distance_input: bool,
}

impl Default for CppnConfig {
    fn default() -> Self {
        Self {
            activation: ActivationParams::default(),
            distance_input: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub intensity: f64,
    pub hue: Option<f64>,
    pub saturation: Option<f64>,
}

#[derive(Debug, Clone)]
struct Step {
    kind: NodeKind,
    activation: Activation,
    /// (slot of source, weight)
    incoming: Vec<(usize, f64)>,
}

/// A genome compiled for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledCppn {
    steps: Vec<Step>,
    slots: HashMap<Innovation, usize>,
    links: HashMap<Innovation, (usize, usize)>,
    intensity: usize,
    hue: Option<usize>,
    saturation: Option<usize>,
    config: CppnConfig,
}

fn blocks_evaluation(v: &Violation) -> bool {
    matches!(
        v,
        Violation::Cycle { .. }
            | Violation::KindCount { .. }
            | Violation::NonIdentityInput { .. }
            | Violation::DuplicateNodeInnovation(_)
            | Violation::UnknownEndpoint { .. }
    )
}

impl CompiledCppn {
    pub fn new(genome: &Genome, config: CppnConfig) -> Result<Self, CppnError> {
        let blocking: Vec<Violation> = genome
            .validate()
            .into_iter()
            .filter(blocks_evaluation)
            .collect();
        if !blocking.is_empty() {
            return Err(CppnError::InvalidGenome(blocking));
        }
        let order = genome
            .topological_order()
            .map_err(|nodes| CppnError::InvalidGenome(vec![Violation::Cycle { nodes }]))?;
        let slots: HashMap<Innovation, usize> =
            order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut steps: Vec<Step> = order
            .iter()
            .map(|&id| {
                let n = genome.node(id).expect("ordered node exists");
                Step {
                    kind: n.kind,
                    activation: n.activation,
                    incoming: Vec::new(),
                }
            })
            .collect();
        let mut links = HashMap::new();
        for c in genome.connections.iter().filter(|c| c.enabled) {
            let t = slots[&c.target];
            links.insert(c.innovation, (t, steps[t].incoming.len()));
            steps[t].incoming.push((slots[&c.source], c.weight));
        }
        let slot_of = |kind: NodeKind| genome.node_of_kind(kind).map(|n| slots[&n.innovation]);
        Ok(Self {
            intensity: slot_of(NodeKind::OutputIntensity).expect("validated"),
            hue: slot_of(NodeKind::OutputHue),
            saturation: slot_of(NodeKind::OutputSaturation),
            steps,
            slots,
            links,
            config,
        })
    }

    /// Overrides the weight of an enabled connection in this plan only.
    pub fn set_weight(&mut self, connection: Innovation, weight: f64) -> Result<(), CppnError> {
        let &(t, k) = self
            .links
            .get(&connection)
            .ok_or(CppnError::UnknownConnection(connection))?;
        self.steps[t].incoming[k].1 = weight;
        Ok(())
    }

    pub fn slot(&self, node: Innovation) -> Option<usize> {
        self.slots.get(&node).copied()
    }

    /// Evaluates every node at `(x, y)`, writing activations into `values`
    /// indexed by slot.
    pub fn activations_into(&self, x: f64, y: f64, values: &mut Vec<f64>) {
        values.clear();
        values.resize(self.steps.len(), 0.0);
        let d = if self.config.distance_input {
            (x * x + y * y).sqrt()
        } else {
            0.0
        };
        for (i, step) in self.steps.iter().enumerate() {
            values[i] = match step.kind {
                NodeKind::InputX => x,
                NodeKind::InputY => y,
                NodeKind::InputD => d,
                NodeKind::InputBias => 1.0,
                _ => {
                    let z: f64 = step.incoming.iter().map(|&(s, w)| values[s] * w).sum();
                    step.activation.apply(z, &self.config.activation)
                }
            };
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Outputs {
        let mut values = Vec::new();
        self.activations_into(x, y, &mut values);
        self.outputs_from(&values)
    }

    fn outputs_from(&self, values: &[f64]) -> Outputs {
        Outputs {
            intensity: values[self.intensity],
            hue: self.hue.map(|s| values[s]),
            saturation: self.saturation.map(|s| values[s]),
        }
    }

    pub fn render(&self, width: usize, height: usize) -> Result<ImageBuffer, CppnError> {
        let channels = if self.hue.is_some() { 3 } else { 1 };
        self.render_with(width, height, channels, |values, px| {
            let out = self.outputs_from(values);
            match (out.hue, out.saturation) {
                (Some(h), Some(s)) => px.copy_from_slice(&color_pixel(out.intensity, h, s)),
                _ => px[0] = gray_byte(out.intensity),
            }
        })
    }

    pub fn render_node(
        &self,
        node: Innovation,
        width: usize,
        height: usize,
    ) -> Result<ImageBuffer, CppnError> {
        let slot = self.slot(node).ok_or(CppnError::UnknownNode(node))?;
        self.render_with(width, height, 3, |values, px| {
            px.copy_from_slice(&node_pixel(values[slot]))
        })
    }

    fn render_with<F>(
        &self,
        width: usize,
        height: usize,
        channels: usize,
        paint: F,
    ) -> Result<ImageBuffer, CppnError>
    where
        F: Fn(&[f64], &mut [u8]) + Sync,
    {
        if width == 0 || height == 0 {
            return Err(CppnError::InvalidSize(width, height));
        }
        let mut img = ImageBuffer::new(width, height, channels);
        img.data
            .par_chunks_mut(width * channels)
            .enumerate()
            .for_each(|(j, row)| {
                let y = lattice(j, height);
                let mut values = Vec::with_capacity(self.steps.len());
                for (i, px) in row.chunks_mut(channels).enumerate() {
                    self.activations_into(lattice(i, width), y, &mut values);
                    paint(&values, px);
                }
            });
        Ok(img)
    }
}

/// Maps pixel index `i` of `n` onto `[-1, 1]`, edges landing exactly on ±1.
pub fn lattice(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        -1.0 + 2.0 * i as f64 / (n - 1) as f64
    }
}

fn unit_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Final-output brightness: |o| clamped to [0, 1].
pub fn gray_byte(intensity: f64) -> u8 {
    unit_byte(intensity.abs())
}

/// Intermediate-node gradient: red at -1, black at 0, white at +1.
pub fn node_pixel(v: f64) -> [u8; 3] {
    let v = v.clamp(-1.0, 1.0);
    if v < 0.0 {
        [unit_byte(-v), 0, 0]
    } else {
        let b = unit_byte(v);
        [b, b, b]
    }
}

/// Color output: hue = 360·(o_h+1)/2, saturation = |o_s|, brightness = |o_i|.
pub fn color_pixel(intensity: f64, hue: f64, saturation: f64) -> [u8; 3] {
    let h = 360.0 * (hue.clamp(-1.0, 1.0) + 1.0) / 2.0;
    hsb_to_rgb(h, saturation.abs().min(1.0), intensity.abs().min(1.0))
}

pub fn hsb_to_rgb(hue_deg: f64, saturation: f64, brightness: f64) -> [u8; 3] {
    let c = brightness * saturation;
    let h = (hue_deg / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - ((h % 2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = brightness - c;
    [unit_byte(r + m), unit_byte(g + m), unit_byte(b + m)]
}

pub fn evaluate(genome: &Genome, x: f64, y: f64) -> Result<Outputs, CppnError> {
    Ok(CompiledCppn::new(genome, CppnConfig::default())?.evaluate(x, y))
}

pub fn render(genome: &Genome, width: usize, height: usize) -> Result<ImageBuffer, CppnError> {
    CompiledCppn::new(genome, CppnConfig::default())?.render(width, height)
}

pub fn render_node(
    genome: &Genome,
    node: Innovation,
    width: usize,
    height: usize,
) -> Result<ImageBuffer, CppnError> {
    if genome.node(node).is_none() {
        return Err(CppnError::UnknownNode(node));
    }
    CompiledCppn::new(genome, CppnConfig::default())?.render_node(node, width, height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{ConnectionGene, NodeGene, Palette};

    /// Gray genome with the given extra hidden nodes and connections.
    fn gray(hidden: Vec<NodeGene>, conns: Vec<ConnectionGene>) -> Genome {
        let mut nodes = Genome::io_nodes(Palette::Gray);
        nodes.extend(hidden);
        Genome::new("t", Palette::Gray, nodes, conns)
    }

    fn x_to_out(weight: f64) -> Genome {
        gray(vec![], vec![ConnectionGene::new(10, 0, 4, weight)])
    }

    #[test]
    fn identity_link_passes_x() {
        assert_eq!(evaluate(&x_to_out(1.0), 0.5, 0.0).unwrap().intensity, 0.5);
    }

    #[test]
    fn gaussian_peak_on_axis() {
        let g = gray(
            vec![NodeGene::new(20, NodeKind::Hidden, Activation::Gaussian)],
            vec![
                ConnectionGene::new(10, 0, 20, 1.0),
                ConnectionGene::new(11, 20, 4, 1.0),
            ],
        );
        for y in [-1.0, -0.3, 0.0, 0.8] {
            assert_eq!(evaluate(&g, 0.0, y).unwrap().intensity, 1.0);
        }
    }

    #[test]
    fn zero_weights_give_activation_of_zero() {
        let g = gray(
            vec![NodeGene::new(20, NodeKind::Hidden, Activation::Gaussian)],
            vec![
                ConnectionGene::new(10, 0, 20, 0.0),
                ConnectionGene::new(11, 1, 20, 0.0),
                ConnectionGene::new(12, 20, 4, 0.0),
                ConnectionGene::new(13, 3, 4, 0.0),
            ],
        );
        for (x, y) in [(-1.0, 1.0), (0.2, 0.3), (1.0, -1.0)] {
            assert_eq!(evaluate(&g, x, y).unwrap().intensity, 0.0);
        }
    }

    #[test]
    fn constant_genome_renders_uniform() {
        let g = gray(vec![], vec![ConnectionGene::new(10, 3, 4, 0.0)]);
        let img = render(&g, 9, 7).unwrap();
        assert_eq!(img.data.len(), 63);
        assert!(img.data.iter().all(|&b| b == img.data[0]));
    }

    #[test]
    fn x_output_brightness_is_absolute() {
        let img = render(&x_to_out(1.0), 5, 3).unwrap();
        for j in 0..3 {
            assert_eq!(img.pixel(0, j), [255]);
            assert_eq!(img.pixel(2, j), [0]);
            assert_eq!(img.pixel(4, j), [255]);
            assert_eq!(img.pixel(1, j), img.pixel(3, j));
        }
    }

    #[test]
    fn render_is_deterministic() {
        let g = gray(
            vec![NodeGene::new(20, NodeKind::Hidden, Activation::Sine)],
            vec![
                ConnectionGene::new(10, 0, 20, 2.3),
                ConnectionGene::new(11, 2, 20, -1.7),
                ConnectionGene::new(12, 20, 4, 1.1),
            ],
        );
        assert_eq!(render(&g, 32, 32).unwrap(), render(&g, 32, 32).unwrap());
    }

    #[test]
    fn single_pixel_samples_origin() {
        let g = gray(vec![], vec![ConnectionGene::new(10, 0, 4, 1.0)]);
        assert_eq!(render(&g, 1, 1).unwrap().data, vec![0]);
        assert_eq!(lattice(0, 5), -1.0);
        assert_eq!(lattice(4, 5), 1.0);
    }

    #[test]
    fn zero_size_rejected() {
        assert_eq!(
            render(&x_to_out(1.0), 0, 4),
            Err(CppnError::InvalidSize(0, 4))
        );
    }

    #[test]
    fn node_gradient_endpoints() {
        for (w, expect) in [
            (-1.0, [255, 0, 0]),
            (0.0, [0, 0, 0]),
            (1.0, [255, 255, 255]),
        ] {
            // bias -> hidden identity node held at w
            let g = gray(
                vec![NodeGene::new(20, NodeKind::Hidden, Activation::Identity)],
                vec![
                    ConnectionGene::new(10, 3, 20, w),
                    ConnectionGene::new(11, 20, 4, 1.0),
                ],
            );
            let img = render_node(&g, Innovation(20), 4, 4).unwrap();
            assert_eq!(img.channels, 3);
            assert!(img.data.chunks(3).all(|px| px == expect), "w={w}");
        }
    }

    #[test]
    fn render_node_unknown() {
        assert_eq!(
            render_node(&x_to_out(1.0), Innovation(77), 2, 2),
            Err(CppnError::UnknownNode(Innovation(77)))
        );
    }

    #[test]
    fn cyclic_genome_rejected() {
        let g = gray(
            vec![
                NodeGene::new(20, NodeKind::Hidden, Activation::Sine),
                NodeGene::new(21, NodeKind::Hidden, Activation::Sine),
            ],
            vec![
                ConnectionGene::new(10, 0, 20, 1.0),
                ConnectionGene::new(11, 20, 21, 1.0),
                ConnectionGene::new(12, 21, 20, 1.0),
                ConnectionGene::new(13, 21, 4, 1.0),
            ],
        );
        assert!(matches!(
            evaluate(&g, 0.0, 0.0),
            Err(CppnError::InvalidGenome(_))
        ));
    }

    #[test]
    fn distance_input_can_be_switched_off() {
        let g = gray(vec![], vec![ConnectionGene::new(10, 2, 4, 1.0)]);
        let on = CompiledCppn::new(&g, CppnConfig::default()).unwrap();
        let off = CompiledCppn::new(
            &g,
            CppnConfig {
                distance_input: false,
                ..CppnConfig::default()
            },
        )
        .unwrap();
        assert!((on.evaluate(0.6, 0.8).intensity - 1.0).abs() < 1e-12);
        assert_eq!(off.evaluate(0.6, 0.8).intensity, 0.0);
    }

    #[test]
    fn hsb_primaries() {
        assert_eq!(hsb_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsb_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsb_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsb_to_rgb(360.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsb_to_rgb(77.0, 0.0, 1.0), [255, 255, 255]);
        assert_eq!(hsb_to_rgb(77.0, 0.7, 0.0), [0, 0, 0]);
        // hue output -1 and +1 both land on red
        assert_eq!(color_pixel(1.0, -1.0, 1.0), [255, 0, 0]);
        assert_eq!(color_pixel(-1.0, 1.0, -1.0), [255, 0, 0]);
    }

    #[test]
    fn color_render_has_three_channels() {
        let mut nodes = Genome::io_nodes(Palette::Color);
        nodes.sort_by_key(|n| n.innovation);
        let g = Genome::new(
            "c",
            Palette::Color,
            nodes,
            vec![
                ConnectionGene::new(10, 0, 4, 1.0),
                ConnectionGene::new(11, 1, 5, 1.0),
                ConnectionGene::new(12, 3, 6, 1.0),
            ],
        );
        let img = render(&g, 6, 4).unwrap();
        assert_eq!(img.channels, 3);
        assert_eq!(img.data.len(), 6 * 4 * 3);
    }
}
