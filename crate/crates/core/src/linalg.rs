//! In-place application of 1- and 2-wire operators to row-major buffers.
//!
//! Wire `w` of an `n`-wire register is bit `n - 1 - w` of a basis index, so
//! wire 0 is the most significant bit. For a local operator on `wires`, the
//! first listed wire is the most significant bit of the local index.

use crate::num::{czero, Real, C};

fn masks(n: usize, wires: &[usize]) -> Vec<usize> {
    let k = wires.len();
    (0..1usize << k)
        .map(|local| {
            wires.iter().enumerate().fold(0usize, |acc, (j, &w)| {
                if local >> (k - 1 - j) & 1 == 1 {
                    acc | 1 << (n - 1 - w)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn bases(n: usize, wires: &[usize]) -> impl Iterator<Item = usize> {
    let used = wires.iter().fold(0usize, |acc, &w| acc | 1 << (n - 1 - w));
    (0..1usize << n).filter(move |i| i & used == 0)
}

/// `data[rows x ncols] <- M (on the row index) * data`.
pub(crate) fn apply_rows<T: Real>(
    data: &mut [C<T>],
    n: usize,
    ncols: usize,
    wires: &[usize],
    m: &[C<T>],
) {
    let offs = masks(n, wires);
    let k = offs.len();
    let mut tmp = vec![czero::<T>(); k];
    for base in bases(n, wires) {
        for col in 0..ncols {
            for (a, off) in offs.iter().enumerate() {
                tmp[a] = data[(base | off) * ncols + col];
            }
            for (a, off) in offs.iter().enumerate() {
                let mut acc = czero::<T>();
                for (b, t) in tmp.iter().enumerate() {
                    acc = acc + m[a * k + b] * t;
                }
                data[(base | off) * ncols + col] = acc;
            }
        }
    }
}

/// `data[nrows x 2^n] <- data * M^dagger`, i.e. `conj(M)` acting on the column index.
pub(crate) fn apply_cols_adjoint<T: Real>(
    data: &mut [C<T>],
    n: usize,
    nrows: usize,
    wires: &[usize],
    m: &[C<T>],
) {
    let offs = masks(n, wires);
    let k = offs.len();
    let dim = 1usize << n;
    let mut tmp = vec![czero::<T>(); k];
    for row in 0..nrows {
        let r = &mut data[row * dim..(row + 1) * dim];
        for base in bases(n, wires) {
            for (a, off) in offs.iter().enumerate() {
                tmp[a] = r[base | off];
            }
            for (a, off) in offs.iter().enumerate() {
                let mut acc = czero::<T>();
                for (b, t) in tmp.iter().enumerate() {
                    acc = acc + m[a * k + b].conj() * t;
                }
                r[base | off] = acc;
            }
        }
    }
}
