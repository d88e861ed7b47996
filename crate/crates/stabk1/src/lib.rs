//! Exact-arithmetic engine for elementary and symplectic matrix groups over
//! commutative rings.
//!
//! The crate is organized bottom-up: `rings` provides a tower of concrete
//! commutative rings with canonical-form elements, `matgroups` puts exact
//! matrices and generator words on top, `reduction` implements stable-range
//! analysis and unimodular row completion with certificates, `symplectic`
//! implements transvection reduction and hyperbolic splitting, and `homotopy`
//! implements polynomial isotopies, dilation, and the local-global and replay
//! harnesses. `certificates` holds the self-contained JSON certificate layer
//! shared with the command line tool.
//!
//! Everything is exact: no floating point anywhere, all values are immutable
//! after construction, and every operation is a pure function.

pub mod budget;
pub mod certificates;
pub mod homotopy;
pub mod matgroups;
pub mod reduction;
pub mod rings;
pub mod symplectic;
