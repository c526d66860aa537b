//! Pipeline configuration and commands.
