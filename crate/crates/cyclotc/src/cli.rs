//! Command-line entry point. Exit codes: 0 success/accepted, 1
//! rejected/invalid, 2 usage error, 3 resource cap exceeded.

pub fn run(_argv: Vec<String>) -> i32 {
    2
}
