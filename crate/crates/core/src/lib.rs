pub mod compose;
pub mod io;
pub mod linalg;
pub mod mep;
pub mod minrep;
pub mod poly;
pub mod transform;
pub mod verify;
