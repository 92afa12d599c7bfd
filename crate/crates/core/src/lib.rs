#![no_std]

extern crate alloc;

pub mod exactlin;
pub mod fan;
pub mod kclass;
pub mod potential;
pub mod reeb;
pub mod resolve;
