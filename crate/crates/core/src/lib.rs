//! Citation historiography over tagged bibliographic exports.
//!
//! The pipeline runs `ingest` → `network` → analyses (`rankings`, `linkage`,
//! `qc`) → rendering (`historiograph`, `report`).

pub mod historiograph;
pub mod ingest;
pub mod linkage;
pub mod network;
pub mod qc;
pub mod rankings;
pub mod report;
