//! Maximum-likelihood reconstruction.
