// Copyright 2026 The continuum-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Process exit codes and the error type that maps onto them.

use std::fmt;
use std::path::Path;

/// Exit status of one command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success,
    /// `solve`/`allocate` found no feasible selection, or `validate` found violations.
    Infeasible,
    Usage,
    Input,
    Internal,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        match self {
            ExitCode::Success => 0,
            ExitCode::Infeasible => 2,
            ExitCode::Usage => 64,
            ExitCode::Input => 65,
            ExitCode::Internal => 70,
        }
    }
}

#[derive(Debug)]
pub enum Error {
    Usage(String),
    /// unreadable or malformed input
    Input(String),
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::Usage(_) => ExitCode::Usage,
            Error::Input(_) => ExitCode::Input,
            Error::Internal(_) => ExitCode::Internal,
        }
    }

    pub fn input(path: &Path, e: impl fmt::Display) -> Self {
        Error::Input(format!("{}: {e}", path.display()))
    }

    pub fn output(path: &Path, e: impl fmt::Display) -> Self {
        Error::Internal(format!("cannot write {}: {e}", path.display()))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Usage(m) | Error::Input(m) | Error::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
