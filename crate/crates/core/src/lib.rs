//! Endomorphisms of free products `G_1 * ... * G_n * F_r` of finite groups and
//! a free group.
//!
//! The crate covers normal-form arithmetic ([`word`]), folded subgroup graphs
//! and Kurosh ranks ([`folding`]), endomorphisms and symmetry ([`morphism`]),
//! and the image-chain / stable-image / fixed-subgroup pipeline together with
//! a seeded verification harness ([`analysis`], [`verify`]).
//!
//! ```
//! use fpfix::{catalog, formats, SubgroupGraph};
//! use fpfix::analysis::{image_chain, ChainParams};
//!
//! let sig = catalog::by_name("z2z3").unwrap();
//! let a = sig.parse_word("A[g0]")?;
//! let h = SubgroupGraph::from_generators(&sig, &[a])?;
//! assert_eq!(h.kurosh_decomposition()?.kurosh_rank(), 1);
//!
//! let phi = formats::parse_endomorphism(&sig, "B.g0 = ε")?;
//! let chain = image_chain(&phi, &ChainParams::default())?;
//! assert_eq!(chain.ranks(), vec![2, 1, 1]);
//! # Ok::<(), fpfix::Error>(())
//! ```

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod folding;
pub mod formats;
pub mod grammar;
pub mod group;
pub mod morphism;
pub mod random;
pub mod report;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use folding::{KuroshDecomposition, SubgroupGraph};
pub use group::{FactorHom, FiniteGroup};
pub use morphism::{Endomorphism, SymmetryReport};
pub use word::{Signature, Syllable, Word};
