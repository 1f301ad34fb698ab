//! Node placement on the square evaluation plane.

use std::fmt;
use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStream, StreamKey};

/// eNB antenna height in meters.
pub const ENB_HEIGHT_M: f64 = 10.0;
/// Height of UE-class nodes (DRN, LCO) in meters.
pub const UE_HEIGHT_M: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Enb,
    Drn,
    Lco,
}

/// A node is identified by its role and its pair index, never by a
/// global counter, so ids are stable when the network grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub role: Role,
    pub index: u32,
}

impl NodeId {
    pub const ENB: NodeId = NodeId {
        role: Role::Enb,
        index: 0,
    };

    pub const fn new(role: Role, index: u32) -> Self {
        NodeId { role, index }
    }

    pub const fn drn(index: u32) -> Self {
        NodeId::new(Role::Drn, index)
    }

    pub const fn lco(index: u32) -> Self {
        NodeId::new(Role::Lco, index)
    }
}

impl fmt::Display for NodeId {
    /// One-based labels: pair index 0 prints as `DRN1` / `LCO1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Enb => write!(f, "ENB"),
            Role::Drn => write!(f, "DRN{}", self.index + 1),
            Role::Lco => write!(f, "LCO{}", self.index + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Position { x, y, z }
    }
}

/// Euclidean distance including the height difference.
pub fn distance_3d(a: Position, b: Position) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// One eNB plus `n` DRN-LCO pairs; `drns[i]` is paired with `lcos[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub side: f64,
    pub enb: Position,
    pub drns: Vec<Position>,
    pub lcos: Vec<Position>,
}

impl Deployment {
    pub fn n_pairs(&self) -> usize {
        self.drns.len()
    }

    pub fn position(&self, node: NodeId) -> Position {
        match node.role {
            Role::Enb => self.enb,
            Role::Drn => self.drns[node.index as usize],
            Role::Lco => self.lcos[node.index as usize],
        }
    }

    /// Writes `node_id,role,x,y,z` rows for plotting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_id,role,x,y,z")?;
        let p = self.enb;
        writeln!(w, "ENB,enb,{:.3},{:.3},{:.3}", p.x, p.y, p.z)?;
        for (i, p) in self.drns.iter().enumerate() {
            let id = NodeId::drn(i as u32);
            writeln!(w, "{id},drn,{:.3},{:.3},{:.3}", p.x, p.y, p.z)?;
        }
        for (i, p) in self.lcos.iter().enumerate() {
            let id = NodeId::lco(i as u32);
            writeln!(w, "{id},lco,{:.3},{:.3},{:.3}", p.x, p.y, p.z)?;
        }
        Ok(())
    }
}

/// Draws DRN and LCO ground coordinates uniformly on `[0, side]^2`.
///
/// Each node draws from its own stream, so the first `k` pairs of a
/// deployment do not depend on `n_pairs`.
pub fn place_random(
    n_pairs: usize,
    side: f64,
    rng: &RngStream,
    run_index: u32,
) -> Result<Deployment> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "plane side must be positive, got {side}"
        )));
    }
    let draw = |node: NodeId| {
        let mut r = rng.stream(StreamKey::new(run_index, node, Purpose::Placement));
        Position::new(
            r.random_range(0.0..=side),
            r.random_range(0.0..=side),
            UE_HEIGHT_M,
        )
    };
    Ok(Deployment {
        side,
        enb: Position::new(side / 2.0, side / 2.0, ENB_HEIGHT_M),
        drns: (0..n_pairs as u32).map(|i| draw(NodeId::drn(i))).collect(),
        lcos: (0..n_pairs as u32).map(|i| draw(NodeId::lco(i))).collect(),
    })
}
