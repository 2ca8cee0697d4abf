pub mod calibration;
pub mod cli;
pub mod diffusion;
pub mod distance;
pub mod ipa;
pub mod pipeline;
