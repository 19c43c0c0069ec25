// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qbo_cli::run(std::env::args_os()))
}
