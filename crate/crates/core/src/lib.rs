//! Degrees-of-freedom analysis and transmission-plan synthesis for the
//! two-user, `L`-subband MISO broadcast channel with imperfect CSIT.
//!
//! The pipeline:
//!
//! 1. [`profile`]: CSIT quality profiles, gaps and problem classes.
//! 2. [`region`]: the optimal DoF region, its weighted-sum composition and
//!    the closed-form sum-DoF comparison for the unmatched two-subband case.
//! 3. [`decomposition`]: per-subband state decomposition, `u0` pairing and
//!    reduction of unbalanced profiles.
//! 4. [`scheme`]: transmission plans (power exponents, pre-logs, precoders,
//!    decode orders), their DoF accounting and structural checks.
//! 5. [`sim`]: finite-SNR Monte-Carlo evaluation and slope fitting.
//! 6. [`io`]: file formats.
//!
//! ```
//! use dofcsit_core::{CsitProfile, User, dof_region, synthesize, rate_accounting};
//!
//! let p = CsitProfile::new(vec![0.7, 0.3], vec![0.3, 0.7]).unwrap();
//! assert!((dof_region(&p).sum_dof() - 1.5).abs() < 1e-12);
//! let plan = synthesize(&p, User::One).unwrap();
//! let d = rate_accounting(&plan);
//! assert!((d.d1 - 1.0).abs() < 1e-12 && (d.d2 - 0.5).abs() < 1e-12);
//! ```

pub mod decomposition;
pub mod error;
pub mod io;
pub mod profile;
pub mod region;
pub mod scheme;
pub mod sim;

pub use decomposition::{
    decompose, pair_u0, reduce_to_balanced, ReducePolicy, Reduction, SubchannelUse, U0Message, U0Schedule,
};
pub use error::{Error, Result};
pub use profile::{
    classify, gaps, split_separable, validate_profile, CsitProfile, GapSummary, ProblemClass, ProblemKind,
    Separation, User,
};
pub use region::{
    compose_weighted, contains, dof_region, sum_dof_optimal, sum_dof_suboptimal, weights, DofRegion, HalfPlane,
    Weights,
};
pub use scheme::{
    all_passed, rate_accounting, synthesize, synthesize_with, validate_plan, CheckResult, DecodeContext, DecodeStep,
    DofPair, MessageId, Precoder, SymbolKind, SymbolSpec, TransmissionPlan,
};
pub use sim::{evaluate_plan, sweep, Evaluation, SimConfig, SweepResult};
