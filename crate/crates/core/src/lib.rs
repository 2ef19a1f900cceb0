pub mod density;
pub mod entangled;
pub mod error;
pub mod finite_field;
pub mod io;
pub mod linalg;
pub mod mub;
pub mod schwinger;
pub mod state;
pub mod tomography;
