//! Extended affine Weyl groups `Ŵ = W_f ⋉ X` of low rank: normal-form
//! arithmetic, Iwahori–Matsumoto length, Bruhat order and interned balls.

mod ball;
mod datum;

pub use ball::{Ball, BallRecord};
pub use datum::{
    FiniteWeyl, LatticeChoice, Root, RootDatum, TypeLabel, Weight, WeylElement, CONVENTION_ID, MAX_RANK,
};
