//! File formats: the native complex-field container and grayscale PGM.

pub mod cfd;
pub mod pgm;
