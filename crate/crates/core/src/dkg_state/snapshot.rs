use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{DiagonalState, Params};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_grid::{Field, SpectralGrid};

pub const SNAPSHOT_FORMAT: &str = "dkg-lab-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

/// On-disk form of a diagonal state. Coefficient arrays are in FFT slot order,
/// one `[re, im]` pair per mode; spinors hold two such arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub length: f64,
    pub time: f64,
    pub params: Params<f64>,
    pub psi_plus: Vec<Vec<[f64; 2]>>,
    pub psi_minus: Vec<Vec<[f64; 2]>>,
    pub phi_plus: Vec<Vec<[f64; 2]>>,
    pub phi_minus: Vec<Vec<[f64; 2]>>,
}

impl Snapshot {
    pub fn from_state<T: Real>(state: &DiagonalState<T>, params: &Params<T>) -> Self {
        let grid = state.grid();
        Snapshot {
            format: SNAPSHOT_FORMAT.to_string(),
            version: SNAPSHOT_VERSION,
            n: grid.n(),
            length: grid.length().to_f64_lossy(),
            time: state.time.to_f64_lossy(),
            params: Params {
                dirac_mass: params.dirac_mass.to_f64_lossy(),
                kg_mass: params.kg_mass.to_f64_lossy(),
                coupling: params.coupling.to_f64_lossy(),
            },
            psi_plus: encode(&state.psi_plus),
            psi_minus: encode(&state.psi_minus),
            phi_plus: encode(&state.phi_plus),
            phi_minus: encode(&state.phi_minus),
        }
    }

    pub fn into_state<T: Real>(self) -> Result<(DiagonalState<T>, Params<T>)> {
        if self.format != SNAPSHOT_FORMAT {
            return Err(Error::Snapshot(format!("unknown format tag {:?}", self.format)));
        }
        if self.version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!("unsupported version {}", self.version)));
        }
        let grid = SpectralGrid::new(self.n, T::lit(self.length))?;
        let params = Params::new(
            T::lit(self.params.dirac_mass),
            T::lit(self.params.kg_mass),
            T::lit(self.params.coupling),
        )?;
        let state = DiagonalState {
            psi_plus: decode(&grid, self.psi_plus, 2, "psi_plus")?,
            psi_minus: decode(&grid, self.psi_minus, 2, "psi_minus")?,
            phi_plus: decode(&grid, self.phi_plus, 1, "phi_plus")?,
            phi_minus: decode(&grid, self.phi_minus, 1, "phi_minus")?,
            time: T::lit(self.time),
        };
        Ok((state, params))
    }
}

fn encode<T: Real>(f: &Field<T>) -> Vec<Vec<[f64; 2]>> {
    f.all_coeffs()
        .iter()
        .map(|c| c.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect())
        .collect()
}

fn decode<T: Real>(
    grid: &Arc<SpectralGrid<T>>,
    data: Vec<Vec<[f64; 2]>>,
    components: usize,
    name: &str,
) -> Result<Field<T>> {
    if data.len() != components {
        return Err(Error::Snapshot(format!(
            "{name}: expected {components} components, found {}",
            data.len()
        )));
    }
    let coeffs = data
        .into_iter()
        .map(|c| {
            if c.len() != grid.n() {
                return Err(Error::Snapshot(format!(
                    "{name}: expected {} coefficients, found {}",
                    grid.n(),
                    c.len()
                )));
            }
            Ok(c.into_iter().map(|[re, im]| Complex::new(T::lit(re), T::lit(im))).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Field::from_spectral(grid, coeffs)
}

pub fn write_snapshot<T: Real>(path: &Path, state: &DiagonalState<T>, params: &Params<T>) -> Result<()> {
    let snap = Snapshot::from_state(state, params);
    fs::write(path, serde_json::to_string(&snap)?)?;
    Ok(())
}

pub fn read_snapshot<T: Real>(path: &Path) -> Result<(DiagonalState<T>, Params<T>)> {
    let text = fs::read_to_string(path)?;
    let snap: Snapshot = serde_json::from_str(&text)?;
    snap.into_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dkg_state::{random_sobolev_field, to_diagonal, PhysicalState};

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = SpectralGrid::<f64>::new(32, 5.0).unwrap();
        let p = PhysicalState::new(
            random_sobolev_field(&grid, -0.1, 2, 1, false),
            random_sobolev_field(&grid, 0.3, 1, 2, true),
            random_sobolev_field(&grid, -0.7, 1, 3, true),
            0.25,
        )
        .unwrap();
        let d = to_diagonal(&p).unwrap();
        let params = Params::new(0.5, 2.0, -1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.json");
        write_snapshot(&path, &d, &params).unwrap();
        let (back, pb) = read_snapshot::<f64>(&path).unwrap();
        assert_eq!(pb, params);
        assert_eq!(back.time, 0.25);
        assert_eq!(back.grid().length(), 5.0);
        assert_eq!(back.psi_plus.all_coeffs(), d.psi_plus.all_coeffs());
        assert_eq!(back.psi_minus.all_coeffs(), d.psi_minus.all_coeffs());
        assert_eq!(back.phi_plus.all_coeffs(), d.phi_plus.all_coeffs());
        assert_eq!(back.phi_minus.all_coeffs(), d.phi_minus.all_coeffs());
    }

    #[test]
    fn rejects_wrong_tag() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let grid = SpectralGrid::<f64>::periodic(8).unwrap();
        let zero = |c| Field::zeros(&grid, c);
        let d = DiagonalState {
            psi_plus: zero(2),
            psi_minus: zero(2),
            phi_plus: zero(1),
            phi_minus: zero(1),
            time: 0.0,
        };
        let mut snap = Snapshot::from_state(&d, &Params::free());
        snap.format = "something-else".into();
        std::fs::write(&path, serde_json::to_string(&snap).unwrap()).unwrap();
        assert!(matches!(read_snapshot::<f64>(&path), Err(Error::Snapshot(_))));
    }
}
