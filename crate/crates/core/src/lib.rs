//! Prediction of exponentially small spectra of metastable diffusion-like
//! operators from the topology of the potential landscape, plus direct
//! discretizations to verify the predictions against.

pub mod operator;
pub mod potential;
pub mod report;
pub mod spectral;
pub mod topology;
