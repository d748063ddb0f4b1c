//! quboforge: a compilation toolkit for quadratic unconstrained binary
//! optimization.
//!
//! The crate lowers constrained mixed-integer quadratic models into
//! QUBO/Ising normal form and runs the surrounding chores:
//!
//! - [`pbf`] — exact sparse algebra for pseudo-Boolean (multilinear)
//!   polynomials, the working currency of every compilation step.
//! - [`model`] — the constrained-model IR, benchmark generators (TSP, NPP),
//!   random instance generation, and an exhaustive reference solver.
//! - [`encoder`] — six ways of rendering a bounded integer or continuous
//!   variable over fresh binaries, with structural penalties where needed.
//! - [`compiler`] — encode, penalize, quadratize; emits a normal-form
//!   instance plus the variable map that pulls solutions back.
//! - [`formats`] — the instance normal form, the exact boolean/spin
//!   bijection, and bqpjson/QUBO/Qubist codecs with a converter.
//! - [`samplers`] — the sampler contract and the exact, random, identity
//!   and simulated-annealing reference backends.
//! - [`analysis`] — density/conditioning statistics, success rate,
//!   time-to-solution, and plot-data exports.

pub mod analysis;
pub mod compiler;
pub mod encoder;
pub mod formats;
pub mod model;
pub mod pbf;
pub mod samplers;

pub use analysis::{model_report, solution_report, ModelReport, SolutionReport};
pub use compiler::{
    compile, decode_solution, CompilationResult, CompilationSettings, CompileError,
    DecodedSolution, VariableMap,
};
pub use encoder::{EncodingMethod, IdAllocator, VariableEncoding};
pub use formats::{convert, Domain, Format, FormatError, QuboInstance};
pub use model::{brute_force_solve, npp_model, random_qubo, tsp_model, Model, ModelError};
pub use pbf::{PbfError, PseudoBooleanFunction, VarId};
pub use samplers::{
    Sample, SampleSet, Sampler, SamplerError, SamplerParams, SamplerRegistry, Timing,
};
