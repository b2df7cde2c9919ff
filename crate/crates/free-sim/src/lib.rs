//! Simulation and control-design toolkit for fiber-reinforced elastomeric
//! enclosures (FREEs).
//!
//! A FREE is an elastomeric tube wound with inextensible fibers at a winding
//! angle Γ; internal pressure makes it rotate, elongate (or contract), and
//! expand. This crate implements the lumped-parameter model of a single FREE
//! and the design workflow built on top of it:
//!
//! - [`geometry`] — kinematics of the deformed tube (fiber angle, radius) and
//!   the pressure force/torque and fiber-tension terms, including the critical
//!   winding angle arctan √2 where the axial pressure force vanishes.
//! - [`ode`] — an adaptive Dormand–Prince 5(4) integrator with PI step-size
//!   control and dense output, the solver class the model was tuned with.
//! - [`dynamics`] — the two-degree-of-freedom equations of motion, constant
//!   pressure and closed-loop scenario runners, and a static equilibrium
//!   solver (damped Newton with analytic Jacobian).
//! - [`control`] — PID pressure law with saturation and winding-sign
//!   handling, step schedules, and cubic trajectory references that carry
//!   their integral channel in closed form.
//! - [`linear`] — linearization about the relaxed state, transfer functions
//!   for gain sweeps, polynomial root finding, root loci, and stability
//!   classification.
//! - [`identify`] — stiffness regression and static back-out, log-decrement
//!   damping extraction, normalized RMSD metrics, and the thin-wall/Ogden
//!   material utilities.
//! - [`config`], [`output`], [`runner`] — the batch front end behind the
//!   `free-sim` binary: JSON run configs, deterministic CSV series, and
//!   dependency-free SVG plots.
//!
//! Everything internal is SI (meters, radians, pascals, seconds); degrees and
//! psi exist only at the CLI boundary (see [`units`]).

pub mod config;
pub mod control;
pub mod dynamics;
pub mod geometry;
pub mod identify;
pub mod linear;
pub mod ode;
pub mod output;
pub mod runner;
pub mod units;

pub use control::{PidGains, Reference, ReferenceSample};
pub use dynamics::{BodyParams, Loads, State, TimeSeries};
pub use geometry::{DeformedConfig, ElastomerParams, Geometry, GeometryError};
