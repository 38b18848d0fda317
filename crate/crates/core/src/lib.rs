//! Sign changes of the Liouville function along quadratic polynomials.
//!
//! ```
//! use chowla_core::{scan_certificate, verify_certificate, QuadraticPoly, ScanOutcome};
//!
//! let f: QuadraticPoly = "1,0,1".parse().unwrap();
//! let ScanOutcome::Certificate(cert) = scan_certificate(&f, 100).unwrap() else {
//!     panic!("x^2 + 1 changes sign early");
//! };
//! assert_eq!((cert.witnesses[0].n, cert.witnesses[1].n), (2, 3));
//! assert!(verify_certificate(&cert).is_valid());
//! ```

pub mod certificate;
pub mod error;
pub mod family;
pub mod integer;
pub mod liouville;
pub mod pell;
pub mod signchange;

pub use error::{Error, Result};
pub use family::{
    derive_t0, find_seed, generate_family, verify_member, FamilyMember, QuadraticPoly,
    SeedSolution, SolutionFamily,
};
pub use integer::{
    factorize, find_prime_in_progression, is_perfect_square, is_prime, isqrt, squarefree_decompose,
    Factorization, Factorizer,
};
pub use liouville::{
    ap_sign_flip, build_sieve, dirichlet_partial, lambda_point, summatory, LiouvilleSieve, Sign,
};
pub use pell::{cf_sqrt, pell_fundamental, pell_iterate, CfExpansion, PellSolution};
pub use signchange::{
    compute_a0, decompose_value, monic_witness_conclude, prime_square_disc_solutions,
    scan_certificate, scan_certificate_with, verify_certificate, Decomposition, MonicReport,
    ScanOptions, ScanOutcome, SignChangeCertificate, Verification, Witness,
};
