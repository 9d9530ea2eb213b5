//! Row-major tensor helpers shared by the distribution and Fourier code.

use std::ops::{AddAssign, Mul};

use num_traits::Zero;

/// Applies a linear map along one axis of a row-major tensor.
///
/// `kernel` is `out_len x dims[axis]`, row-major. The returned tensor has the
/// same dims except `dims[axis]` becomes `out_len`.
pub fn contract_axis<T, K>(data: &[T], dims: &[usize], axis: usize, kernel: &[K], out_len: usize) -> Vec<T>
where
    T: Copy + Zero + AddAssign + Mul<K, Output = T>,
    K: Copy,
{
    let in_len = dims[axis];
    debug_assert_eq!(kernel.len(), out_len * in_len);
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out = vec![T::zero(); outer * out_len * inner];
    for o in 0..outer {
        let src = &data[o * in_len * inner..(o + 1) * in_len * inner];
        let dst = &mut out[o * out_len * inner..(o + 1) * out_len * inner];
        for b in 0..out_len {
            let row = &mut dst[b * inner..(b + 1) * inner];
            for a in 0..in_len {
                let k = kernel[b * in_len + a];
                let col = &src[a * inner..(a + 1) * inner];
                for (r, &v) in row.iter_mut().zip(col) {
                    *r += v * k;
                }
            }
        }
    }
    out
}

/// Sums a row-major tensor over every axis not listed in `keep`.
/// `keep` must be ascending; the result is row-major over the kept axes.
pub fn marginalize(data: &[f64], dims: &[usize], keep: &[usize]) -> Vec<f64> {
    let out_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let out_len: usize = out_dims.iter().product();
    let mut out = vec![0.0; out_len];
    let mut x = vec![0usize; dims.len()];
    for &v in data {
        let mut ix = 0;
        for &k in keep {
            ix = ix * dims[k] + x[k];
        }
        out[ix] += v;
        // odometer increment
        for i in (0..dims.len()).rev() {
            x[i] += 1;
            if x[i] < dims[i] {
                break;
            }
            x[i] = 0;
        }
    }
    out
}
