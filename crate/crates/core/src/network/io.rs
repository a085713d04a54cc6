use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_geometric_graph, NetworkError, Point, SensorNetwork};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

/// On-disk network: `{"nodes":[{"id":0,"x":1.5,"y":2.0}],"r":6.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<NodeRecord>,
    pub r: f64,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandLayerFile>,
}

/// Command layer extension: `{"centers":[...],"R":8.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandLayerFile {
    pub centers: Vec<CenterRecord>,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl NetworkFile {
    pub fn from_network(net: &SensorNetwork) -> Self {
        NetworkFile {
            nodes: net
                .positions()
                .iter()
                .enumerate()
                .map(|(id, p)| NodeRecord { id, x: p.x, y: p.y })
                .collect(),
            r: net.radius(),
            command: None,
        }
    }

    pub fn with_command_layer(mut self, centers: &[Point], big_r: f64) -> Self {
        self.command = Some(CommandLayerFile {
            centers: centers
                .iter()
                .enumerate()
                .map(|(id, c)| CenterRecord { id, x: c.x, y: c.y })
                .collect(),
            big_r,
        });
        self
    }

    /// Sensors are re-indexed densely in increasing `id` order.
    pub fn to_network(&self) -> Result<SensorNetwork, NetworkError> {
        let mut nodes = self.nodes.clone();
        nodes.sort_by_key(|n| n.id);
        if nodes.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(NetworkError::Format("duplicate node id".into()));
        }
        build_geometric_graph(nodes.iter().map(|n| Point::new(n.x, n.y)).collect(), self.r)
    }

    pub fn centers(&self) -> Option<(Vec<Point>, f64)> {
        self.command.as_ref().map(|c| {
            let mut cs = c.centers.clone();
            cs.sort_by_key(|c| c.id);
            (cs.iter().map(|c| Point::new(c.x, c.y)).collect(), c.big_r)
        })
    }
}

/// Reads `id,x,y` rows; positions are returned in increasing id order.
pub fn parse_sensor_csv<R: Read>(reader: R) -> Result<Vec<Point>, NetworkError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| NetworkError::Format(e.to_string()))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["id", "x", "y"] {
        return Err(NetworkError::Format(format!("expected header id,x,y, got {}", cols.join(","))));
    }
    let mut rows: Vec<NodeRecord> = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec.map_err(|e| NetworkError::Format(e.to_string()))?);
    }
    rows.sort_by_key(|r| r.id);
    if rows.windows(2).any(|w| w[0].id == w[1].id) {
        return Err(NetworkError::Format("duplicate sensor id".into()));
    }
    Ok(rows.into_iter().map(|r| Point::new(r.x, r.y)).collect())
}

pub fn write_sensor_csv<W: Write>(writer: W, positions: &[Point]) -> Result<(), NetworkError> {
    let mut w = csv::Writer::from_writer(writer);
    for (id, p) in positions.iter().enumerate() {
        w.serialize(NodeRecord { id, x: p.x, y: p.y })
            .map_err(|e| NetworkError::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| NetworkError::Format(e.to_string()))
}

/// `n` sensors uniform in `[0, width] × [0, height]`.
pub fn random_network(
    n: usize,
    r: f64,
    width: f64,
    height: f64,
    seed: u64,
) -> Result<SensorNetwork, NetworkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height)))
        .collect();
    build_geometric_graph(positions, r)
}
