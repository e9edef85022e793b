//! VFLD: a JSON header line followed by raw little-endian `f64` data.
//!
//! ```text
//! {"magic":"VFLD1","dim":3,"shape":[..],"spacing":[..],"origin":[..],
//!  "fields":[{"name":"u","components":3}],"mask":true}\n
//! <f64 LE: fields in declared order, row-major, components interleaved>
//! <mask: one byte 0/1 per node, if "mask" is true>
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};

pub const MAGIC: &str = "VFLD1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    pub components: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    magic: String,
    dim: usize,
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    fields: Vec<FieldDecl>,
    mask: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedField {
    pub name: String,
    pub components: usize,
    /// `data[node * components + c]`
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vfld {
    pub grid: GridSpec,
    pub fields: Vec<NamedField>,
    pub mask: Option<Vec<bool>>,
    pub provenance: Option<Value>,
}

impl Vfld {
    pub fn from_vector(u: &VectorField, name: &str) -> Self {
        let n = u.grid.len();
        let dim = u.dim();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            for c in &u.components {
                data.push(c[i]);
            }
        }
        Self {
            grid: u.grid.clone(),
            fields: vec![NamedField {
                name: name.to_string(),
                components: dim,
                data,
            }],
            mask: Some(u.mask.clone()),
            provenance: None,
        }
    }

    pub fn from_scalar(f: &ScalarField, name: &str) -> Self {
        let all_valid = f.mask.iter().all(|m| *m);
        Self {
            grid: f.grid.clone(),
            fields: vec![NamedField {
                name: name.to_string(),
                components: 1,
                data: f.values.clone(),
            }],
            mask: if all_valid { None } else { Some(f.mask.clone()) },
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Value) -> Self {
        self.provenance = Some(provenance);
        self
    }

    fn mask_or_all(&self) -> Vec<bool> {
        self.mask.clone().unwrap_or_else(|| vec![true; self.grid.len()])
    }

    /// The named field, or the first field with `dim` components.
    pub fn vector_field(&self, name: Option<&str>) -> Result<VectorField> {
        let dim = self.grid.dim();
        let f = self
            .fields
            .iter()
            .find(|f| match name {
                Some(n) => f.name == n,
                None => f.components == dim,
            })
            .ok_or_else(|| Error::InvalidField(format!("no {dim}-component field found")))?;
        if f.components != dim {
            return Err(Error::InvalidField(format!(
                "field '{}' has {} components, expected {dim}",
                f.name, f.components
            )));
        }
        let n = self.grid.len();
        let components = (0..dim)
            .map(|c| (0..n).map(|i| f.data[i * dim + c]).collect())
            .collect();
        VectorField::new(self.grid.clone(), components, self.mask_or_all())
    }

    /// The named field, or the first single-component field.
    pub fn scalar_field(&self, name: Option<&str>) -> Result<ScalarField> {
        let f = self
            .fields
            .iter()
            .find(|f| match name {
                Some(n) => f.name == n,
                None => f.components == 1,
            })
            .ok_or_else(|| Error::InvalidField("no scalar field found".into()))?;
        if f.components != 1 {
            return Err(Error::InvalidField(format!("field '{}' is not scalar", f.name)));
        }
        ScalarField::with_mask(self.grid.clone(), f.data.clone(), self.mask_or_all())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = Header {
            magic: MAGIC.to_string(),
            dim: self.grid.dim(),
            shape: self.grid.shape().to_vec(),
            spacing: self.grid.spacing().to_vec(),
            origin: self.grid.origin().to_vec(),
            fields: self
                .fields
                .iter()
                .map(|f| FieldDecl {
                    name: f.name.clone(),
                    components: f.components,
                })
                .collect(),
            mask: self.mask.is_some(),
            provenance: self.provenance.clone(),
        };
        let n = self.grid.len();
        for f in &self.fields {
            if f.data.len() != n * f.components {
                return Err(Error::InvalidField(format!(
                    "field '{}' has {} values, expected {}",
                    f.name,
                    f.data.len(),
                    n * f.components
                )));
            }
        }
        let mut out = serde_json::to_vec(&header)?;
        out.push(b'\n');
        for f in &self.fields {
            for v in &f.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        if let Some(mask) = &self.mask {
            out.extend(mask.iter().map(|&m| m as u8));
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let nl = bytes.iter().position(|&b| b == b'\n').ok_or(Error::Parse {
            offset: bytes.len(),
            message: "missing header newline".into(),
        })?;
        let header: Header = serde_json::from_slice(&bytes[..nl]).map_err(|e| Error::Parse {
            offset: e.column().saturating_sub(1),
            message: e.to_string(),
        })?;
        if header.magic != MAGIC {
            return Err(Error::Parse {
                offset: 0,
                message: format!("bad magic '{}'", header.magic),
            });
        }
        if header.dim != header.shape.len() {
            return Err(Error::Parse {
                offset: 0,
                message: format!("dim {} but shape has {} entries", header.dim, header.shape.len()),
            });
        }
        let grid = GridSpec::new(header.shape, header.spacing, header.origin).map_err(|e| {
            Error::Parse {
                offset: 0,
                message: e.to_string(),
            }
        })?;
        let n = grid.len();
        let mut pos = nl + 1;
        let mut fields = Vec::with_capacity(header.fields.len());
        for decl in header.fields {
            let count = n * decl.components;
            let end = pos + 8 * count;
            if end > bytes.len() {
                return Err(Error::Parse {
                    offset: bytes.len(),
                    message: format!("truncated data for field '{}'", decl.name),
                });
            }
            let data = bytes[pos..end]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            fields.push(NamedField {
                name: decl.name,
                components: decl.components,
                data,
            });
            pos = end;
        }
        let mask = if header.mask {
            if pos + n > bytes.len() {
                return Err(Error::Parse {
                    offset: bytes.len(),
                    message: "truncated mask".into(),
                });
            }
            let mut m = Vec::with_capacity(n);
            for (k, &b) in bytes[pos..pos + n].iter().enumerate() {
                match b {
                    0 => m.push(false),
                    1 => m.push(true),
                    _ => {
                        return Err(Error::Parse {
                            offset: pos + k,
                            message: format!("mask byte {b} is not 0 or 1"),
                        })
                    }
                }
            }
            pos += n;
            Some(m)
        } else {
            None
        };
        if pos != bytes.len() {
            return Err(Error::Parse {
                offset: pos,
                message: format!("{} trailing bytes", bytes.len() - pos),
            });
        }
        Ok(Self {
            grid,
            fields,
            mask,
            provenance: header.provenance,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }
}

/// Write via a temporary sibling file and rename.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
