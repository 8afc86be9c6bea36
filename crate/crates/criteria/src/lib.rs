//! Holds the acceptance checks in `tests/acceptance.rs`.
