//! Certifies odd square-free integers as non-congruent numbers.
//!
//! A positive integer is congruent when it is the area of a right triangle
//! with rational sides; deciding this is open in general. For two families of
//! square-free n = p_1 ... p_t q with every p_i = 5 (mod 8) this crate checks
//! classical necessary conditions built from 2-descent data and the 2-primary
//! part of imaginary quadratic class groups:
//!
//! - q = 7 (mod 8), t odd: if 2^{t+2} does not divide h(-n), then n is not
//!   congruent (unconditionally);
//! - q = 3 (mod 8), t even: if h(-n) != h(-P) + 2^{t+1} (mod 2^{t+2}), then n
//!   is not congruent, assuming the 2-part of the Tate-Shafarevich group of
//!   the curve y^2 = x^3 - n^2 x is finite.
//!
//! The supporting machinery is exposed module by module: [`arith`] for
//! primality, factoring, and residue symbols; [`gf2`] for bit-packed linear
//! algebra; [`descent`] for the Monsky matrix, 2-Selmer ranks, and local
//! solvability; [`classgroup`] for class numbers, Redei matrices, and 4-/8-rank
//! criteria; [`theorems`] for certificates, the Tunnell counting check, and
//! root numbers; [`quant`] for density predictions and scans; [`fixtures`] for
//! the bundled reference tables.

pub mod arith;
pub mod classgroup;
pub mod descent;
pub mod fixtures;
pub mod gf2;
pub mod quant;
pub mod theorems;

pub use arith::{factor_squarefree, is_prime, Factored, Sign};
pub use theorems::{certify, Certificate, Verdict};
