//! Permutation-invariant Niven numbers: positive integers every digit
//! permutation of which (leading zeros allowed) is divisible by the digit sum.

pub mod arith;
pub mod digits;
pub mod error;
pub mod families;
pub mod perm;
pub mod record;
pub mod repdigit;
pub mod search;

pub use digits::{Digit, DigitMultiset, DigitString, RepBlockForm};
pub use error::{ArithError, DigitError, FamilyError, PermError, SearchError};
pub use families::{FamilyId, FamilyInstance, FamilyTemplate};
pub use perm::{is_niven, is_pinn, is_pinn_bruteforce, is_pinn_criterion, orbit};
pub use record::{PinnProof, PinnRecord, Refutation};
pub use search::{search, SearchConfig, SearchReport};
