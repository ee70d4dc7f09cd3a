//! The triangulated fundamental domain: barycentric flags of the Dirichlet
//! polyhedron, glued by identity permutations.
//!
//! Vertex i of each simplex is the center of an i-cell. Faces 0, 1, 2 are
//! glued inside the subdivision; face 3 lies on the polyhedron boundary and
//! is glued to face 3 of `mate` by the mating matrix.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ring::ProjMatrix;

use super::GeometryError;

pub const OMEGA_CONVENTION: &str = "omega_d";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainSimplex {
    pub mate: usize,
    pub matrix: ProjMatrix,
    /// Singular orders of edges (0,1), (0,2), (1,2) of face 3.
    pub singular: [u32; 3],
    pub ideal_vertex: bool,
    pub neighbors: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalDomain {
    pub d: i64,
    pub simplices: Vec<DomainSimplex>,
}

#[derive(Serialize, Deserialize)]
struct SimplexFile {
    mate: usize,
    matrix: [[i64; 2]; 4],
    singular: [u32; 3],
    ideal_vertex: bool,
    neighbors: [usize; 3],
}

#[derive(Serialize, Deserialize)]
struct DomainFile {
    d: i64,
    omega_convention: String,
    simplices: Vec<SimplexFile>,
}

impl FundamentalDomain {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Checks the gluing invariants: involutive mates with inverse
    /// matrices, symmetric inner gluings.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = self.len();
        for (j, s) in self.simplices.iter().enumerate() {
            let bad = |msg: &str| GeometryError::InvalidDomain(format!("simplex {}: {}", j, msg));
            if s.mate >= n || self.simplices[s.mate].mate != j {
                return Err(bad("mate is not an involution"));
            }
            if !(self.simplices[s.mate].matrix * s.matrix).is_identity() {
                return Err(bad("mate matrix is not the inverse"));
            }
            if !s.matrix.det().is_unit() || s.matrix.det() != crate::ring::QuadInt::one(self.d) {
                return Err(bad("matrix determinant is not one"));
            }
            for f in 0..3 {
                let k = s.neighbors[f];
                if k >= n || k == j || self.simplices[k].neighbors[f] != j {
                    return Err(bad("inner gluing is not symmetric"));
                }
            }
            if s.singular.iter().any(|&k| !(1..=3).contains(&k)) {
                return Err(bad("singular order outside 1..=3"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let f = DomainFile {
            d: self.d,
            omega_convention: OMEGA_CONVENTION.to_string(),
            simplices: self
                .simplices
                .iter()
                .map(|s| SimplexFile {
                    mate: s.mate,
                    matrix: s.matrix.to_ints(),
                    singular: s.singular,
                    ideal_vertex: s.ideal_vertex,
                    neighbors: s.neighbors,
                })
                .collect(),
        };
        serde_json::to_string(&f).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let f: DomainFile =
            serde_json::from_str(text).map_err(|e| GeometryError::InvalidDomain(e.to_string()))?;
        if f.omega_convention != OMEGA_CONVENTION {
            return Err(GeometryError::InvalidDomain(format!(
                "unknown omega convention {}",
                f.omega_convention
            )));
        }
        let dom = FundamentalDomain {
            d: f.d,
            simplices: f
                .simplices
                .into_iter()
                .map(|s| DomainSimplex {
                    mate: s.mate,
                    matrix: ProjMatrix::from_ints(f.d, s.matrix),
                    singular: s.singular,
                    ideal_vertex: s.ideal_vertex,
                    neighbors: s.neighbors,
                })
                .collect(),
        };
        dom.validate()?;
        Ok(dom)
    }

    pub fn write(&self, path: &Path) -> Result<(), GeometryError> {
        std::fs::write(path, self.to_json()).map_err(|e| GeometryError::Io(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, GeometryError> {
        let text = std::fs::read_to_string(path).map_err(|e| GeometryError::Io(e.to_string()))?;
        Self::from_json(&text)
    }
}
