use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModelError, ServiceRequest, ServiceType};

/// Draws `count` requests: service type per `mix`, attachment node uniform
/// over `0..nodes`. Ids are `0..count`.
pub fn generate_requests(
    count: usize,
    mix: &[f64],
    types: &[ServiceType],
    nodes: usize,
    seed: u64,
) -> Result<Vec<ServiceRequest>, ModelError> {
    if mix.len() != types.len() {
        return Err(ModelError::BadMix(format!(
            "{} probabilities for {} service types",
            mix.len(),
            types.len()
        )));
    }
    if mix.iter().any(|p| !(*p >= 0.0)) {
        return Err(ModelError::BadMix(
            "probabilities must be non-negative".into(),
        ));
    }
    let total: f64 = mix.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ModelError::BadMix(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if nodes == 0 {
        return Err(ModelError::BadMix("no nodes to attach requests to".into()));
    }
    let dist = WeightedIndex::new(mix).map_err(|e| ModelError::BadMix(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|id| {
            let ty = &types[dist.sample(&mut rng)];
            let node = rng.random_range(0..nodes);
            ServiceRequest::of_type(id, ty, node)
        })
        .collect())
}

/// Uniform mix over `n` types.
pub fn equal_mix(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn load_requests(path: &Path) -> Result<Vec<ServiceRequest>, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| ModelError::Json(e.to_string()))
}

pub fn save_requests(path: &Path, requests: &[ServiceRequest]) -> Result<(), ModelError> {
    let text =
        serde_json::to_string_pretty(requests).map_err(|e| ModelError::Json(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| ModelError::Io(e.to_string()))
}
