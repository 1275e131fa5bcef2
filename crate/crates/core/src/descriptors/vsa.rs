//! MOE-style VSA descriptors: per-atom surface areas accumulated into bins
//! keyed by an atomic property (Crippen logP or molar refractivity).

use super::DescriptorError;

/// Sum `areas[i]` into the bin of `props[i]`. Bin `k` covers
/// `edges[k-1] <= p < edges[k]`, with open-ended first and last bins.
pub fn vsa_bins(props: &[f64], areas: &[f64], edges: &[f64]) -> Result<Vec<f64>, DescriptorError> {
    if props.len() != areas.len() {
        return Err(DescriptorError::LengthMismatch {
            props: props.len(),
            areas: areas.len(),
        });
    }
    let mut bins = vec![0.0; edges.len() + 1];
    for (&p, &s) in props.iter().zip(areas) {
        let k = edges.iter().take_while(|&&e| p >= e).count();
        bins[k] += s;
    }
    Ok(bins)
}
