//! Computational core for counting embedded curves across walls: branched
//! covers and their monodromy, real character theory of the resulting
//! groups, wall-type classification, spectral flow of Cauchy–Riemann
//! operators on the torus, bifurcation bookkeeping and Gopakumar–Vafa series.

pub mod bifurcation;
pub mod covers;
pub mod groups;
pub mod gvseries;
pub mod perm;
pub mod permgroup;
pub mod specflow;
pub mod walls;
