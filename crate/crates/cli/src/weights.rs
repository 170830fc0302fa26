//! Binary container for trained deviation estimators.
//!
//! Little-endian throughout:
//!
//! | field            | type            |
//! |------------------|-----------------|
//! | magic `MDEW`     | 4 bytes         |
//! | version (1)      | u32             |
//! | skill index      | u32             |
//! | model index      | u32             |
//! | inputs           | u32             |
//! | hidden layers    | u32 (always 2)  |
//! | hidden units     | u32             |
//! | input mean       | f64 × inputs    |
//! | input std        | f64 × inputs    |
//! | parameters       | f64 × count     |
//!
//! Parameters are the network's flat buffer: layer 1 weights (row-major,
//! `hidden × inputs`), layer 1 bias, layer 2 weights (`hidden × hidden`),
//! layer 2 bias, output weights (`hidden`), output bias.

use std::path::{Path, PathBuf};

use mfplan_core::mde::{MdeModel, MdeSet, Mlp};
use mfplan_core::world::ModelKind;
use mfplan_core::Skill;

use crate::error::CliError;

pub const MAGIC: &[u8; 4] = b"MDEW";
pub const VERSION: u32 = 1;
const HIDDEN_LAYERS: u32 = 2;

pub fn encode(m: &MdeModel) -> Vec<u8> {
    let net = m.network();
    let mut out = Vec::with_capacity(28 + 8 * (2 * net.inputs() + net.params().len()));
    out.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        m.skill().index() as u32,
        m.model().index() as u32,
        net.inputs() as u32,
        HIDDEN_LAYERS,
        net.hidden() as u32,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in m.input_mean().iter().chain(m.input_std()).chain(net.params()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], CliError> {
        if self.bytes.len() < n {
            return Err(CliError::Usage("weight file is truncated".into()));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CliError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, CliError> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| CliError::Usage("weight file size overflow".into()))?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }
}

pub fn decode(bytes: &[u8]) -> Result<MdeModel, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("weight file: {msg}"));
    let mut r = Reader { bytes };
    if r.take(4)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let skill = *Skill::ALL.get(r.u32()? as usize).ok_or_else(|| bad("unknown skill"))?;
    let model = *ModelKind::ALL.get(r.u32()? as usize).ok_or_else(|| bad("unknown model"))?;
    let inputs = r.u32()? as usize;
    if r.u32()? != HIDDEN_LAYERS {
        return Err(bad("only two hidden layers are supported"));
    }
    let hidden = r.u32()? as usize;
    if inputs == 0 || hidden == 0 || inputs > 1 << 16 || hidden > 1 << 16 {
        return Err(bad("implausible dimensions"));
    }
    let mean = r.f64s(inputs)?;
    let std = r.f64s(inputs)?;
    let params = r.f64s(Mlp::param_count(inputs, hidden))?;
    if !r.bytes.is_empty() {
        return Err(bad("trailing bytes"));
    }
    let net = Mlp::from_params(inputs, hidden, params).ok_or_else(|| bad("parameter count mismatch"))?;
    Ok(MdeModel::new(skill, model, net, mean, std)?)
}

fn skill_slug(skill: Skill) -> &'static str {
    match skill {
        Skill::Pick => "pick",
        Skill::LiftAndDrop => "lift_and_drop",
        Skill::OpenDrawer => "open_drawer",
    }
}

pub fn file_name(skill: Skill, model: ModelKind) -> String {
    format!("mde_{}_{}.bin", skill_slug(skill), model.name())
}

pub fn save(dir: &Path, m: &MdeModel) -> Result<PathBuf, CliError> {
    let path = dir.join(file_name(m.skill(), m.model()));
    std::fs::write(&path, encode(m)).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Loads every estimator present in `dir`. Pairs without a file stay absent,
/// which makes that model untrusted for the skill. A directory with no
/// estimator at all is an error.
pub fn load_dir(dir: &Path) -> Result<MdeSet, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Usage(format!("weights directory {} not found", dir.display())));
    }
    let mut set = MdeSet::new();
    for skill in Skill::ALL {
        for model in ModelKind::ALL {
            let path = dir.join(file_name(skill, model));
            if !path.exists() {
                continue;
            }
            let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            let m = decode(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            if (m.skill(), m.model()) != (skill, model) {
                return Err(CliError::Usage(format!("{} holds the estimator for a different pair", path.display())));
            }
            set.insert(m);
        }
    }
    if set.is_empty() {
        return Err(CliError::Usage(format!("no estimator files in {}", dir.display())));
    }
    Ok(set)
}
