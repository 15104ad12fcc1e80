pub mod cli;
pub mod field;
pub mod lives;
pub mod optics;
pub mod scenario;
pub mod state;
