//! Holds the `acceptance` test target, which prints one line per criterion.
//! Run it with `cargo test -p pp-suite --test acceptance`.
