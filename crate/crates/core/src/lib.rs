pub mod bench;
pub mod depth;
pub mod extremal;
pub mod poset;
pub mod ufg;
