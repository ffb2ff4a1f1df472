//! Distance distributions of the spherical point processes and exact
//! samplers for users, satellites and fading.

mod distributions;
mod samplers;

pub use distributions::*;
pub use samplers::*;
