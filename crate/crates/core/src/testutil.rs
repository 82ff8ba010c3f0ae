pub use crate::random::*;

use proptest::prelude::*;

use crate::densemat::ExactMatrix;
use crate::exactfield::FieldSpec;

pub fn matrix_strategy(
    field: FieldSpec,
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = ExactMatrix> {
    (rows, cols, any::<u64>()).prop_map(move |(m, n, seed)| {
        let mut rng = rng_from(seed);
        random_matrix(field, m, n, &mut rng)
    })
}
