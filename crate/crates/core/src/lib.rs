//! Exact order-`n` terms of the Baker-Campbell-Hausdorff series and its
//! relatives.
//!
//! `z_n`, the degree-`n` part of `log(e^x e^y)`, is the upper-right entry of
//! `log(FG)` for two `(n+1)×(n+1)` unit upper-triangular matrices whose
//! entries are multilinear polynomials in commuting variables `σ_1…σ_n`.
//! Each monomial is then read as a word: `σ_i` present means `y` at
//! position `i`, absent means `x`.
//!
//! ```
//! use bchterm::{bch_term, poly::rat};
//!
//! let z2 = bch_term(2).unwrap();
//! assert_eq!(z2.coefficient_of("xy"), Some(rat(1, 2)));
//! assert_eq!(z2.coefficient_of("yx"), Some(rat(-1, 2)));
//! ```

pub mod bch;
pub mod dynkin;
pub mod error;
pub mod nilmatrix;
pub mod oracle;
pub mod poly;
pub mod series;
pub mod signed;

pub use bch::{bch_term, bch_term_multi, logf_term, t_operator};
pub use dynkin::{dynkin_substitute, expand_commutators, LieTerm};
pub use error::{Error, Result};
pub use poly::{Monomial, MultilinearPoly, Rational};
pub use series::{Alphabet, NCSeries, SeriesSpec, Word};
pub use signed::{build_table, reconstruct_term, scan_nonvanishing, Pruning, SignAssignment};
