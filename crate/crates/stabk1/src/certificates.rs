//! Placeholder, implementation follows.
