//! On-disk cache of verified fundamental domains, keyed by d, the sample
//! radius that produced the domain, and the cache format version.

use std::path::{Path, PathBuf};

use bianchi_core::geometry::{
    barycentric_export, dirichlet_domain_search, polyhedron_volume, FundamentalDomain, AUTO_RADII,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Bumped whenever the cached layout or the domain algorithm changes.
pub const DOMAIN_CACHE_VERSION: u32 = 1;

/// A verified domain and the checks it passed when computed.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainInfo {
    pub domain: FundamentalDomain,
    pub radius: i64,
    pub volume: f64,
    pub cusp_classes: usize,
    pub pairings_verified: bool,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format_version: u32,
    d: i64,
    radius: i64,
    volume: f64,
    cusp_classes: usize,
    pairings_verified: bool,
    domain: serde_json::Value,
}

pub fn cache_path(dir: &Path, d: i64, radius: i64) -> PathBuf {
    dir.join(format!("domain_d{}_r{}_v{}.json", d, radius, DOMAIN_CACHE_VERSION))
}

fn read_cached(path: &Path, d: i64) -> Option<DomainInfo> {
    let text = std::fs::read_to_string(path).ok()?;
    let f: CacheFile = serde_json::from_str(&text).ok()?;
    if f.format_version != DOMAIN_CACHE_VERSION || f.d != d {
        return None;
    }
    let domain = FundamentalDomain::from_json(&f.domain.to_string()).ok()?;
    (domain.d == d).then_some(DomainInfo {
        domain,
        radius: f.radius,
        volume: f.volume,
        cusp_classes: f.cusp_classes,
        pairings_verified: f.pairings_verified,
    })
}

pub fn write_cached(dir: &Path, info: &DomainInfo) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = cache_path(dir, info.domain.d, info.radius);
    let f = CacheFile {
        format_version: DOMAIN_CACHE_VERSION,
        d: info.domain.d,
        radius: info.radius,
        volume: info.volume,
        cusp_classes: info.cusp_classes,
        pairings_verified: info.pairings_verified,
        domain: serde_json::from_str(&info.domain.to_json()).expect("domain json"),
    };
    let text = serde_json::to_string(&f).expect("serializable");
    // write then rename, so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn compute(d: i64) -> Result<DomainInfo, CliError> {
    let (p, radius) = dirichlet_domain_search(d, &AUTO_RADII)?;
    Ok(DomainInfo {
        volume: polyhedron_volume(&p),
        cusp_classes: p.ideal_vertex_classes(),
        pairings_verified: p.verify_pairings(),
        domain: barycentric_export(&p),
        radius,
    })
}

/// The cached domain for d if present, else a fresh computation that is
/// then cached.
pub fn load_or_compute(d: i64, dir: Option<&Path>) -> Result<DomainInfo, CliError> {
    if let Some(dir) = dir {
        for r in AUTO_RADII {
            if let Some(info) = read_cached(&cache_path(dir, d, r), d) {
                return Ok(info);
            }
        }
    }
    let info = compute(d)?;
    if let Some(dir) = dir {
        write_cached(dir, &info)?;
    }
    Ok(info)
}
