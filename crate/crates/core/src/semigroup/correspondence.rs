//! Minimal idempotents are determined by kernel and image: they share a
//! minimal left ideal iff their kernels agree, a minimal right ideal iff
//! their images agree, and each (kernel, image) pair occurs once.

use serde_json::json;

use super::structure::{left_ideal, minimal_idempotents, right_ideal};
use super::FiniteSemigroup;
use crate::error::{Error, Result};
use crate::report::CheckBlock;

fn classes(items: &[usize], same: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    items
        .iter()
        .map(|&a| match reps.iter().position(|&r| same(r, a)) {
            Some(c) => c,
            None => {
                reps.push(a);
                reps.len() - 1
            }
        })
        .collect()
}

pub fn minidem_correspondence(s: &FiniteSemigroup) -> Result<CheckBlock> {
    let meta = s
        .meta()
        .ok_or_else(|| Error::Unsupported("kernel/image correspondence needs elements acting on a set or space".into()))?;
    let mins = minimal_idempotents(s);
    let left: Vec<Vec<usize>> = mins.iter().map(|&e| left_ideal(s, e)).collect();
    let right: Vec<Vec<usize>> = mins.iter().map(|&e| right_ideal(s, e)).collect();
    let kernel_class = classes(&mins, |a, b| meta.same_kernel(a, b));
    let image_class = classes(&mins, |a, b| meta.same_image(a, b));

    let (mut left_mismatch, mut right_mismatch) = (0usize, 0usize);
    for i in 0..mins.len() {
        for j in 0..mins.len() {
            if (left[i] == left[j]) != (kernel_class[i] == kernel_class[j]) {
                left_mismatch += 1;
            }
            if (right[i] == right[j]) != (image_class[i] == image_class[j]) {
                right_mismatch += 1;
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = kernel_class.iter().copied().zip(image_class.iter().copied()).collect();
    pairs.sort_unstable();
    let total = pairs.len();
    pairs.dedup();
    let duplicate_pairs = total - pairs.len();

    let mut distinct_left = left.clone();
    distinct_left.sort();
    distinct_left.dedup();
    let mut distinct_right = right.clone();
    distinct_right.sort();
    distinct_right.dedup();
    let product_count = distinct_left.len() * distinct_right.len();

    Ok(CheckBlock::new("semigroup.minidem_correspondence")
        .residual("left_ideal_vs_kernel_mismatches", left_mismatch as f64, 0.0)
        .residual("right_ideal_vs_image_mismatches", right_mismatch as f64, 0.0)
        .residual("duplicate_kernel_image_pairs", duplicate_pairs as f64, 0.0)
        .condition("count_is_product", mins.len() == product_count)
        .certificates(json!({
            "minimal_idempotents": mins.len(),
            "minimal_left_ideals": distinct_left.len(),
            "minimal_right_ideals": distinct_right.len(),
            "kernel_classes": kernel_class.iter().max().map_or(0, |m| m + 1),
            "image_classes": image_class.iter().max().map_or(0, |m| m + 1),
        })))
}
