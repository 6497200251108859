use rand::seq::SliceRandom;

use super::Dataset;
use crate::error::{Result, UqError};
use crate::rng::RngStream;

/// Train/test index partition.
///
/// Plain mode shuffles all indices and cuts at `floor(n · fraction)`.
/// Stratified mode does the same within each class, then concatenates the
/// class-0 and class-1 parts.
pub fn split_indices(
    labels: &[usize],
    train_fraction: f64,
    rng: &mut RngStream,
    stratified: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(UqError::config(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let cut = |len: usize| (len as f64 * train_fraction).floor() as usize;
    let (train, test) = if stratified {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in 0..2 {
            let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            idx.shuffle(rng);
            let k = cut(idx.len());
            test.extend_from_slice(&idx[k..]);
            idx.truncate(k);
            train.extend(idx);
        }
        (train, test)
    } else {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.shuffle(rng);
        let k = cut(idx.len());
        let test = idx.split_off(k);
        (idx, test)
    };
    if train.is_empty() || test.is_empty() {
        return Err(UqError::data(format!(
            "split of {} rows at fraction {train_fraction} leaves an empty side",
            labels.len()
        )));
    }
    Ok((train, test))
}

pub fn split(
    dataset: &Dataset,
    train_fraction: f64,
    rng: &mut RngStream,
    stratified: bool,
) -> Result<(Dataset, Dataset)> {
    let (tr, te) = split_indices(&dataset.labels, train_fraction, rng, stratified)?;
    Ok((
        dataset.subset(&tr, format!("{} [train]", dataset.provenance)),
        dataset.subset(&te, format!("{} [test]", dataset.provenance)),
    ))
}
