pub mod corpus;
pub mod dsp;
pub mod learn;
pub mod modelsel;
pub mod numeric;
pub mod pipeline;
pub mod spectral;
pub mod stats;
pub mod synth;
