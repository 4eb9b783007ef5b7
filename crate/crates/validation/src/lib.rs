//! Reference computations that share no code with `rlwe-channel`, used to
//! cross-check it.

pub mod gf;
