pub mod cli;
pub mod design;
pub mod detection;
pub mod error;
pub mod fractional;
pub mod linalg;
pub mod sdp;
pub mod signal_model;
