pub mod families;
pub mod geom;
pub mod harness;
pub mod navigator;
pub mod sensor;
pub mod street;
