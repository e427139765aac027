//! Discretized truncated Wiener–Hopf operators and the regularized trace.

pub mod assemble;
pub mod kernel;
pub mod sectors;
pub mod trace;

pub use assemble::{assemble, DiscretizedWH, GridMethod, GridSpec};
pub use kernel::{build_kernel, build_kernel_with_reach, KernelEval, KernelMethod};
pub use sectors::{assemble_sectors, SectorOperator};
pub use trace::{
    discretize, symbol_integral, trace_d, trace_d_poly, trace_d_polynomial, weyl_trace, Operator, TraceResult,
};
