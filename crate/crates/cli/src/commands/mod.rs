pub mod encode;
pub mod pipeline;
pub mod report;
pub mod synth;
