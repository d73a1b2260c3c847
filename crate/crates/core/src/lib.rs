//! Exact-arithmetic billiards on prefractal Koch snowflake tables.
//!
//! Positions and directions are rational combinations of the triangular
//! lattice basis, so the billiard map, corner detection and periodicity
//! tests are decided exactly. Floats appear only in rendering and in the
//! ray-casting prefilter, whose candidates are always re-checked exactly.
//!
//! ```
//! use koch_billiards::billiard::{is_hybrid, run_orbit, Direction, InitialCondition};
//! use koch_billiards::exact::rat;
//! use koch_billiards::prefractal::{build_prefractal, BoundaryPoint};
//!
//! let p = build_prefractal(0)?;
//! let init = InitialCondition::new(&p, BoundaryPoint::new(0, rat(1, 2)), Direction::exact(2, 1)?)?;
//! let orbit = run_orbit(&p, &init, 1_000_000)?;
//! assert_eq!(orbit.period(), Some(18));
//! assert!(is_hybrid(&orbit)?);
//! # Ok::<(), koch_billiards::Error>(())
//! ```

pub mod billiard;
pub mod compat;
pub mod error;
pub mod exact;
pub mod paths;
pub mod prefractal;
pub mod surface;
pub mod svg;
pub mod ternary;

pub use error::{Error, Result};
