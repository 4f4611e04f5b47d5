//! Adelic vector bundles over Q: degrees, slopes, canonical polygons, successive minima,
//! John and Lowner companions, heights, and numerical certification of slope inequalities.

pub mod bundle;
pub mod convexgeom;
pub mod error;
pub mod lattice;
pub mod minima;
pub mod places;
pub mod rational;
pub mod report;
pub mod slopes;
pub mod sympow;
pub mod tolerances;
pub mod verify;

pub use bundle::{AdelicBundle, ArchMetric, HeightValue, MapHeight};
pub use convexgeom::{ConvexBody, EllipsoidResult};
pub use error::{Error, Result};
pub use minima::MinimaResult;
pub use places::{abs_value, adelic_abs, product_formula_check, Idele, Place};
pub use rational::{QMatrix, Q, Z};
pub use report::{CheckDetail, CheckReport};
pub use slopes::{CanonicalPolygon, HnFiltration};
pub use sympow::GammaValue;
