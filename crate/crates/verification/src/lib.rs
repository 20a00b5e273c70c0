//! Acceptance criteria for the key-rate engine; see `tests/acceptance.rs`.
