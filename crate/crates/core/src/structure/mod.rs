mod rectangle;
mod split;
mod threshold;

pub use rectangle::{max_one_rectangle, max_one_rectangle_with, RectMode, RECT_EXACT_LIMIT};
pub(crate) use split::lemma_split_with;
pub use split::{lemma_split, SplitKind, SplitOutcome};
pub use threshold::{
    threshold_dimension, threshold_dimension_with, Staircase, TdOptions, ThresholdDimension, TD_EXACT_LIMIT,
    TD_NODE_BUDGET,
};
