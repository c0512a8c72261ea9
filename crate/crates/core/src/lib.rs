//! A numerical laboratory for the p-Laplace system `-div(|Du|^{p-2} Du) = -div F`
//! on rectangles: a P1 Kacanov solver, sharp maximal operators, rearrangement
//! invariant norms, oscillation seminorms and an experiment runner that fits the
//! constants of pointwise gradient estimates.

pub mod error;
pub mod io;
pub mod lab;
pub mod maximal;
pub mod mesh;
pub mod nfunc;
pub mod oscillation;
pub mod rearrange;
pub mod solver;

pub use error::{Error, Result};
