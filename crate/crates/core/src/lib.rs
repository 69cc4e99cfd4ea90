pub mod error;
pub mod gf;
pub mod linalg;
pub mod code;
pub mod expand;
pub mod codefile;
pub mod cli;
