//! Volatility connectedness from high-frequency prices.
//!
//! The pipeline runs tick data through [`ingest`] (session calendar and
//! previous-tick resampling), [`realized`] (daily realized variance and
//! semivariances), [`var`] (least-squares VAR and MA coefficients), [`fevd`]
//! (generalized variance decomposition), [`connectedness`] (total,
//! directional, net spillovers and the asymmetry measures) and [`rolling`]
//! (moving windows with block-bootstrap intervals). [`commands`] wires the
//! stages together for the `spillnet` binary.

pub mod commands;
pub mod config;
pub mod connectedness;
pub mod error;
pub mod fevd;
pub mod ingest;
pub mod manifest;
pub mod realized;
pub mod rolling;
pub mod sim;
pub mod var;

pub use connectedness::{SpilloverSnapshot, SystemLayout};
pub use error::{Result, SpillError};
pub use fevd::{gfevd, FevdMatrix};
pub use realized::{BlockOrder, DailyMeasures, MeasurePanel, SystemMode, Transform};
pub use rolling::{run_rolling, RollingConfig, SpilloverSeries};
pub use var::{fit_var, ma_coefficients, MaCoefficients, VarModel};
