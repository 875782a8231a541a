#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod kinematics;
pub mod ode;
pub mod optimize;
pub mod output;
pub mod paleo;
mod parallel;
pub mod stiffness;
pub mod studies;
