pub mod calibration;
pub mod pointwise;
pub mod residual;
pub mod stencil;
pub mod systems;
