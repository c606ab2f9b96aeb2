//! Shared inputs for the benchmarks.

use harmean::sampling::{sample_data, Partition};
use harmean::{DataMatrix, Scalar, SpdMatrix, SplitSample};

pub const SEED: u64 = 7;

/// Identity-covariance draw of `total` samples split in two.
pub fn two_split<T: Scalar>(p: usize, total: usize) -> SplitSample<T> {
    let data: DataMatrix<T> = sample_data(&SpdMatrix::identity(p), total, SEED).expect("valid sizes");
    SplitSample::new(&data, &Partition::equal(total, 2).expect("even total")).expect("invertible blocks")
}
