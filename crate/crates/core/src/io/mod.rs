//! File formats, run configuration, image output and the command line.

mod atomic;
mod binary;
mod cli;
mod config;
mod pgm;

pub use atomic::{read_file, write_atomic};
pub use binary::{
    decode_grid, decode_trace, encode_grid, encode_trace, read_grid, read_trace, write_grid, write_trace,
    GRID_HEADER_LEN, GRID_MAGIC, TRACE_HEADER_LEN, TRACE_MAGIC, VERSION,
};
pub use cli::{exit_code, run, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};
pub use config::{PhantomSpec, RunConfig};
pub use pgm::{emit_pgm, pgm_bytes};
