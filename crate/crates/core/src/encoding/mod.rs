//! Region encodings: pooled region features, the permutation-invariant plan
//! embedding and similarity-threshold instance grouping.

mod embed;
mod features;
mod grouping;

pub use embed::{embed, triplet_accuracy, Embedding};
pub use features::{
    geometric_features, init_layers, normalize_features, region_pool, shared_transform,
    DenseFeatureMap, Layer, Reducer, RegionFeatures, GEOMETRIC_FEATURE_NAMES,
};
pub use grouping::{
    auto_threshold, group_instances, group_rooms, pairwise_distance, vote_room_type,
    InstanceGrouping, SimilarityMatrix,
};
