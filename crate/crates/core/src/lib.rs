//! Detection of Blob Listeners: GUI listener methods that dispatch too many
//! GUI commands through conditional blocks.

pub mod catalog;
pub mod cfg;
pub mod commands;
pub mod detection;
pub mod eval;
pub mod java;
pub mod listeners;
pub mod report;
pub mod span;
pub mod types;
