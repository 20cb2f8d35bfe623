use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ProbeError;
use crate::genome::{Genome, Innovation};

/// An sRGB color written as `#rrggbb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = ProbeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProbeError::InvalidColor(s.to_string());
        let hex = s.strip_prefix('#').ok_or_else(bad)?;
        if hex.len() != 6 || !hex.is_ascii() {
            return Err(bad());
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub name: String,
    pub color: Rgb,
}

/// Human-assigned names for the effect of individual connections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelStore {
    pub genome_id: String,
    pub labels: BTreeMap<Innovation, Label>,
}

impl LabelStore {
    pub fn new(genome_id: impl Into<String>) -> Self {
        Self {
            genome_id: genome_id.into(),
            labels: BTreeMap::new(),
        }
    }

    /// Records a label, replacing any earlier one on the same connection.
    pub fn assign_label(
        &mut self,
        genome: &Genome,
        connection: Innovation,
        name: impl Into<String>,
        color: Rgb,
    ) -> Result<(), ProbeError> {
        self.check_genome(genome)?;
        if genome.connection(connection).is_none() {
            return Err(ProbeError::UnknownConnection(connection));
        }
        let name = name.into();
        if name.trim().is_empty() {
            return Err(ProbeError::EmptyLabel);
        }
        self.labels.insert(connection, Label { name, color });
        Ok(())
    }

    pub fn label(&self, connection: Innovation) -> Option<&Label> {
        self.labels.get(&connection)
    }

    /// Checks that the store belongs to `genome` and only names its connections.
    pub fn check(&self, genome: &Genome) -> Result<(), ProbeError> {
        self.check_genome(genome)?;
        match self
            .labels
            .keys()
            .find(|&&c| genome.connection(c).is_none())
        {
            Some(&c) => Err(ProbeError::UnknownConnection(c)),
            None => Ok(()),
        }
    }

    fn check_genome(&self, genome: &Genome) -> Result<(), ProbeError> {
        if self.genome_id != genome.id {
            return Err(ProbeError::GenomeMismatch {
                store: self.genome_id.clone(),
                genome: genome.id.clone(),
            });
        }
        Ok(())
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("label store serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Most common label among the enabled, labeled connections into `node`.
///
/// A tie goes to the tied label carried by the lowest-innovation incoming
/// connection. Inputs and nodes without labeled inputs have no label.
pub fn node_label<'a>(
    genome: &Genome,
    store: &'a LabelStore,
    node: Innovation,
) -> Result<Option<&'a Label>, ProbeError> {
    let n = genome.node(node).ok_or(ProbeError::UnknownNode(node))?;
    if n.kind.is_input() {
        return Ok(None);
    }
    // name -> (count, lowest connection innovation, label)
    let mut tally: BTreeMap<&str, (usize, Innovation, &Label)> = BTreeMap::new();
    for c in genome
        .connections
        .iter()
        .filter(|c| c.enabled && c.target == node)
    {
        if let Some(label) = store.labels.get(&c.innovation) {
            let e = tally.entry(&label.name).or_insert((0, c.innovation, label));
            e.0 += 1;
            if c.innovation < e.1 {
                e.1 = c.innovation;
                e.2 = label;
            }
        }
    }
    Ok(tally
        .into_values()
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, _, label)| label))
}
