//! End-to-end acceptance checks of `winter-nls`; run them with `cargo test -p winter-nls-acceptance`.
