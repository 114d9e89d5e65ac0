pub mod accel;
pub mod catalog;
pub mod expr;
pub mod quadrature;
pub mod specfun;
pub mod verifier;
