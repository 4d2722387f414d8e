//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod coalgebra;
pub mod transfer;
pub mod display;
