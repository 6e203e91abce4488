//! Ship-to-ship transfer detection from AIS tracks, with satellite scene
//! cross-referencing and an audit for transfers that AIS does not show.
//!
//! Modules follow the pipeline order: [`ais`] ingest, [`classify`],
//! [`sts`] detection, [`scene`] tiling, [`dark`] audit, [`capacity`]
//! estimates. [`synth`] generates scenarios with known truth and
//! [`pipeline`] runs every stage on one.

pub mod ais;
pub mod capacity;
pub mod classify;
pub mod dark;
pub mod exec;
pub mod geo;
pub mod pipeline;
pub mod scene;
pub mod sts;
pub mod synth;
pub mod time;

pub use exec::Exec;
pub use geo::GeoPoint;
pub use time::Timestamp;
